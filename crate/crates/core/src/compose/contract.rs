use std::sync::Arc;

use super::finish;
use crate::data::{ForecastingHorizon, LabelVector, Table, TimeSeries};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::estimator::{
    find_param_spec, set_params, AnyEstimator, Estimator, FormalObject, Forecaster, SupervisedLearner,
    Transformer,
};
use crate::params::{ParamMap, ParamSpec, ParamValue, TagMap, NESTING_SEPARATOR};
use crate::registry::{EstimatorDescriptor, Registry};

/// A composite frozen into a primitive-looking kind.
///
/// Only the free leaf parameters remain, addressed by their last name
/// segment: `scaler__with_scale` becomes `with_scale`. Fixed parameters and
/// the component structure are hidden.
#[derive(Debug, Clone)]
pub struct Contracted {
    kind_name: String,
    inner: AnyEstimator,
    /// Public name → deep key in `inner`.
    surface: Vec<(String, String)>,
}

impl Contracted {
    pub fn new(kind_name: impl Into<String>, inner: AnyEstimator, fixed: &ParamMap) -> Result<Self> {
        let mut surface: Vec<(String, String)> = Vec::new();
        for (key, value) in inner.get_params(true).iter() {
            if matches!(value, ParamValue::Estimator(_)) || fixed.contains_key(key) {
                continue;
            }
            let public = key.rsplit(NESTING_SEPARATOR).next().expect("non-empty split");
            if surface.iter().any(|(p, _)| p == public) {
                return Err(Error::AmbiguousParamFlattening(public.to_string()));
            }
            surface.push((public.to_string(), key.to_string()));
        }
        Ok(Contracted {
            kind_name: kind_name.into(),
            inner,
            surface,
        })
    }

    pub fn inner(&self) -> &AnyEstimator {
        &self.inner
    }

    /// Public parameter names in order.
    pub fn surface(&self) -> Vec<&str> {
        self.surface.iter().map(|(p, _)| p.as_str()).collect()
    }

    fn deep_key(&self, public: &str) -> Option<&str> {
        self.surface
            .iter()
            .find(|(p, _)| p == public)
            .map(|(_, d)| d.as_str())
    }

    fn wrong(&self, expected: &str) -> Error {
        Error::WrongScitype {
            expected: expected.into(),
            found: self.inner.scitype().to_string(),
        }
    }

    fn into_any(self) -> AnyEstimator {
        match self.inner {
            AnyEstimator::Supervised(_) => AnyEstimator::supervised(self),
            AnyEstimator::Transformer(_) => AnyEstimator::transformer(self),
            AnyEstimator::Forecaster(_) => AnyEstimator::forecaster(self),
        }
    }
}

/// Registers `kind_name` as a contraction of `prototype` with `fixed`
/// applied and hidden.
pub fn contract(
    registry: &mut Registry,
    kind_name: &str,
    prototype: &AnyEstimator,
    fixed: &ParamMap,
) -> Result<EstimatorDescriptor> {
    if registry.contains(kind_name) {
        return Err(Error::NameCollision(kind_name.to_string()));
    }
    let spec = prototype.blueprint();
    let fixed = fixed.clone();
    let name = kind_name.to_string();
    let constructor = Arc::new(move |registry: &Registry, params: &ParamMap| {
        let mut inner = registry.build(&spec)?;
        inner.set_params(&fixed)?;
        let wrapper = Contracted::new(name.as_str(), inner, &fixed)?;
        finish(wrapper.into_any(), params)
    });
    registry.register_estimator(constructor, None).cloned()
}

impl FormalObject for Contracted {
    fn kind(&self) -> &str {
        &self.kind_name
    }

    fn scitype(&self) -> &str {
        self.inner.scitype()
    }

    fn param_specs(&self) -> Vec<ParamSpec> {
        let inner = self.inner.as_estimator();
        self.surface
            .iter()
            .map(|(public, deep)| {
                let spec = find_param_spec(inner, deep).expect("surface keys come from the inner estimator");
                ParamSpec::new(public.as_str(), spec.domain, spec.default)
            })
            .collect()
    }

    fn params(&self) -> ParamMap {
        let deep = self.inner.get_params(true);
        self.surface
            .iter()
            .map(|(public, key)| (public.clone(), deep.get(key).expect("surface key").clone()))
            .collect()
    }

    fn tags(&self) -> TagMap {
        self.inner
            .tags()
            .with("composite", false)
            .with("contracted_from", self.inner.kind())
    }

    fn domain(&self) -> Domain {
        self.inner.as_estimator().domain()
    }
}

impl Estimator for Contracted {
    fn set_param(&mut self, name: &str, value: &ParamValue) -> Result<()> {
        let key = self
            .deep_key(name)
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))?
            .to_string();
        set_params(self.inner.as_estimator_mut(), &ParamMap::new().with(key, value.clone()))
    }

    fn is_fitted(&self) -> bool {
        self.inner.is_fitted()
    }

    fn fitted_params(&self) -> Result<ParamMap> {
        self.inner.get_fitted_params()
    }

    fn restore_fitted(&mut self, state: &ParamMap) -> Result<()> {
        self.inner.as_estimator_mut().restore_fitted(state)
    }

    fn reset(&mut self) {
        self.inner.as_estimator_mut().reset();
    }
}

impl SupervisedLearner for Contracted {
    fn fit(&mut self, x: &Table, y: &LabelVector) -> Result<()> {
        let wrong = self.wrong("supervised_learner");
        self.inner.as_supervised_mut().ok_or(wrong)?.fit(x, y)
    }

    fn predict(&self, x: &Table) -> Result<LabelVector> {
        self.inner
            .as_supervised()
            .ok_or_else(|| self.wrong("supervised_learner"))?
            .predict(x)
    }
}

impl Transformer for Contracted {
    fn fit(&mut self, x: &Table, y: Option<&LabelVector>) -> Result<()> {
        let wrong = self.wrong("transformer");
        Transformer::fit(self.inner.as_transformer_mut().ok_or(wrong)?, x, y)
    }

    fn transform(&self, x: &Table) -> Result<Table> {
        self.inner
            .as_transformer()
            .ok_or_else(|| self.wrong("transformer"))?
            .transform(x)
    }
}

impl Forecaster for Contracted {
    fn fit(&mut self, y: &TimeSeries) -> Result<()> {
        let wrong = self.wrong("forecaster");
        Forecaster::fit(self.inner.as_forecaster_mut().ok_or(wrong)?, y)
    }

    fn predict(&self, fh: &ForecastingHorizon) -> Result<TimeSeries> {
        self.inner
            .as_forecaster()
            .ok_or_else(|| self.wrong("forecaster"))?
            .predict(fh)
    }
}
