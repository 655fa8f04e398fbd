use std::borrow::Cow;

use super::{build_supervised, build_transformer, check_component_names, composite_tags, finish, remaining, structural_entries};
use crate::data::{LabelVector, Table};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::estimator::{apply_blueprint, blueprint, restore_component, AnyEstimator, Estimator, FormalObject, SupervisedLearner, Transformer};
use crate::params::{EstimatorSpec, ParamMap, ParamSpec, ParamValue, TagMap};
use crate::registry::Registry;

/// `(Transformer)^n × SupervisedLearner → SupervisedLearner`.
///
/// Fitting runs `fit_transform` on each step in order, threading the
/// transformed table, then fits the final learner. The pipeline has the
/// scitype of its final learner.
#[derive(Debug, Clone)]
pub struct Pipeline {
    steps: Vec<(String, Box<dyn Transformer>)>,
    learner_name: String,
    learner: Box<dyn SupervisedLearner>,
    fitted: bool,
}

impl Pipeline {
    pub fn new(
        steps: Vec<(String, Box<dyn Transformer>)>,
        learner_name: impl Into<String>,
        learner: Box<dyn SupervisedLearner>,
    ) -> Result<Self> {
        let learner_name = learner_name.into();
        check_component_names(steps.iter().map(|(n, _)| n.as_str()).chain([learner_name.as_str()]))?;
        let mut p = Pipeline {
            steps,
            learner_name,
            learner,
            fitted: false,
        };
        p.reset();
        Ok(p)
    }

    /// Registry constructor. The last estimator-valued entry is the final
    /// learner, earlier ones are transformer steps. Defaults to
    /// `scaler: StandardScaler` then `learner: LinearRegressor`.
    pub fn from_params(registry: &Registry, params: &ParamMap) -> Result<AnyEstimator> {
        let mut structure = structural_entries(params);
        if structure.is_empty() {
            structure = vec![
                ("scaler".into(), EstimatorSpec::new("StandardScaler")),
                ("learner".into(), EstimatorSpec::new("LinearRegressor")),
            ];
        }
        let (learner_name, learner_spec) = structure.pop().expect("non-empty");
        let steps = structure
            .iter()
            .map(|(name, spec)| Ok((name.clone(), build_transformer(registry, name, spec)?)))
            .collect::<Result<Vec<_>>>()?;
        let learner = build_supervised(registry, &learner_name, &learner_spec)?;
        let p = Pipeline::new(steps, learner_name, learner)?;
        finish(AnyEstimator::supervised(p), &remaining(params, &[]))
    }

    pub fn step_names(&self) -> Vec<&str> {
        self.steps.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn learner(&self) -> &dyn SupervisedLearner {
        self.learner.as_ref()
    }

    fn transform_all<'a>(&self, x: &'a Table) -> Result<Cow<'a, Table>> {
        let mut current = Cow::Borrowed(x);
        for (name, step) in &self.steps {
            current = Cow::Owned(step.transform(&current).map_err(Error::in_component(name))?);
        }
        Ok(current)
    }
}

impl FormalObject for Pipeline {
    fn kind(&self) -> &str {
        "Pipeline"
    }

    fn scitype(&self) -> &str {
        self.learner.scitype()
    }

    fn param_specs(&self) -> Vec<ParamSpec> {
        let mut specs: Vec<ParamSpec> = self
            .steps
            .iter()
            .map(|(name, step)| {
                ParamSpec::new(
                    name.as_str(),
                    Domain::Estimator {
                        scitype: "transformer".into(),
                    },
                    blueprint(step.as_ref()),
                )
            })
            .collect();
        specs.push(ParamSpec::new(
            self.learner_name.as_str(),
            Domain::Estimator {
                scitype: "supervised_learner".into(),
            },
            blueprint(self.learner.as_ref()),
        ));
        specs
    }

    fn params(&self) -> ParamMap {
        let mut out = ParamMap::new();
        for (name, c) in self.components() {
            out.insert(name, blueprint(c));
        }
        out
    }

    fn tags(&self) -> TagMap {
        let components: Vec<&dyn Estimator> = self.components().into_iter().map(|(_, c)| c).collect();
        let features = components[0].tags().get("feature_scitypes").cloned();
        composite_tags(self.learner.scitype(), &components, features)
    }

    fn domain(&self) -> Domain {
        self.learner.domain()
    }
}

impl Estimator for Pipeline {
    fn set_param(&mut self, name: &str, value: &ParamValue) -> Result<()> {
        let spec = value.as_estimator().expect("validated");
        let target = self
            .component_mut(name)
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))?;
        apply_blueprint(target, name, spec)
    }

    fn is_fitted(&self) -> bool {
        self.fitted
    }

    fn fitted_params(&self) -> Result<ParamMap> {
        if !self.fitted {
            return Err(Error::NotFitted);
        }
        let mut state = ParamMap::new();
        for (name, c) in self.components() {
            state.extend_prefixed(name, c.fitted_params()?);
        }
        Ok(state)
    }

    fn restore_fitted(&mut self, state: &ParamMap) -> Result<()> {
        for (name, step) in &mut self.steps {
            restore_component(step.as_mut(), name, state)?;
        }
        restore_component(self.learner.as_mut(), &self.learner_name, state)?;
        self.fitted = true;
        Ok(())
    }

    fn reset(&mut self) {
        self.fitted = false;
        for (_, step) in &mut self.steps {
            step.reset();
        }
        self.learner.reset();
    }

    fn components(&self) -> Vec<(&str, &dyn Estimator)> {
        let mut out: Vec<(&str, &dyn Estimator)> = self
            .steps
            .iter()
            .map(|(n, s)| (n.as_str(), s.as_ref() as &dyn Estimator))
            .collect();
        out.push((self.learner_name.as_str(), self.learner.as_ref()));
        out
    }

    fn component_mut(&mut self, name: &str) -> Option<&mut dyn Estimator> {
        if name == self.learner_name {
            return Some(self.learner.as_mut());
        }
        self.steps
            .iter_mut()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s.as_mut() as &mut dyn Estimator)
    }
}

impl SupervisedLearner for Pipeline {
    fn fit(&mut self, x: &Table, y: &LabelVector) -> Result<()> {
        self.reset();
        let mut current = Cow::Borrowed(x);
        for (name, step) in &mut self.steps {
            let next = step.fit_transform(&current, Some(y)).map_err(Error::in_component(name))?;
            current = Cow::Owned(next);
        }
        self.learner
            .fit(&current, y)
            .map_err(Error::in_component(&self.learner_name))?;
        self.fitted = true;
        Ok(())
    }

    fn predict(&self, x: &Table) -> Result<LabelVector> {
        if !self.fitted {
            return Err(Error::NotFitted);
        }
        let transformed = self.transform_all(x)?;
        self.learner
            .predict(&transformed)
            .map_err(Error::in_component(&self.learner_name))
    }
}
