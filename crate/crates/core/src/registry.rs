//! Kind and scitype registry.
//!
//! A [`Registry`] is an ordinary value: build one, register kinds during
//! startup, then share it read-only. Nothing is global.

use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::compose::{self, Ensemble, GridSearchTuner, Pipeline, ReducedForecaster};
use crate::conformance::Fixture;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::estimator::{AnyEstimator, FormalObject};
use crate::learners::{
    LinearRegressor, MajorityDummyClassifier, MeanRegressor, NaiveLastForecaster, NearestNeighborClassifier,
    SimpleExpSmoothing, StandardScaler,
};
use crate::mathobj::{Distribution, Normal};
use crate::params::{EstimatorSpec, ParamMap, TagMap};

/// Builds an estimator from parameters. Keys not given keep the kind's
/// defaults.
pub type EstimatorConstructor = Arc<dyn Fn(&Registry, &ParamMap) -> Result<AnyEstimator> + Send + Sync>;

pub type DistributionConstructor = Arc<dyn Fn(&ParamMap) -> Result<Box<dyn Distribution>> + Send + Sync>;

/// Supplies kind-specific test data to the conformance checker.
pub type FixtureHook = Arc<dyn Fn() -> Fixture + Send + Sync>;

/// Runtime identity of a scitype.
#[derive(Debug, Clone, PartialEq)]
pub struct SciTypeDescriptor {
    pub id: String,
    pub required_operations: Vec<String>,
    pub statistical_properties: Vec<String>,
    pub parent: Option<String>,
}

impl SciTypeDescriptor {
    pub fn new(id: &str, parent: Option<&str>, operations: &[&str], properties: &[&str]) -> Self {
        Self {
            id: id.to_string(),
            required_operations: operations.iter().map(|s| s.to_string()).collect(),
            statistical_properties: properties.iter().map(|s| s.to_string()).collect(),
            parent: parent.map(str::to_string),
        }
    }
}

#[derive(Clone)]
pub struct EstimatorDescriptor {
    pub kind_name: String,
    pub scitype: String,
    pub default_params: ParamMap,
    pub tags: TagMap,
    constructor: EstimatorConstructor,
    fixture: Option<FixtureHook>,
}

impl EstimatorDescriptor {
    pub fn fixture(&self) -> Option<Fixture> {
        self.fixture.as_ref().map(|f| f())
    }
}

impl fmt::Debug for EstimatorDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EstimatorDescriptor")
            .field("kind_name", &self.kind_name)
            .field("scitype", &self.scitype)
            .field("default_params", &self.default_params)
            .field("tags", &self.tags)
            .field("fixture", &self.fixture.is_some())
            .finish()
    }
}

#[derive(Clone)]
pub struct ValueDescriptor {
    pub kind_name: String,
    pub scitype: String,
    pub default_params: ParamMap,
    pub tags: TagMap,
    constructor: DistributionConstructor,
}

impl fmt::Debug for ValueDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ValueDescriptor")
            .field("kind_name", &self.kind_name)
            .field("scitype", &self.scitype)
            .field("default_params", &self.default_params)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum KindDescriptor {
    Estimator(EstimatorDescriptor),
    Value(ValueDescriptor),
}

impl KindDescriptor {
    pub fn kind_name(&self) -> &str {
        match self {
            KindDescriptor::Estimator(d) => &d.kind_name,
            KindDescriptor::Value(d) => &d.kind_name,
        }
    }

    pub fn scitype(&self) -> &str {
        match self {
            KindDescriptor::Estimator(d) => &d.scitype,
            KindDescriptor::Value(d) => &d.scitype,
        }
    }

    pub fn tags(&self) -> &TagMap {
        match self {
            KindDescriptor::Estimator(d) => &d.tags,
            KindDescriptor::Value(d) => &d.tags,
        }
    }

    pub fn default_params(&self) -> &ParamMap {
        match self {
            KindDescriptor::Estimator(d) => &d.default_params,
            KindDescriptor::Value(d) => &d.default_params,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Registry {
    scitypes: IndexMap<String, SciTypeDescriptor>,
    kinds: IndexMap<String, KindDescriptor>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::new()
    }
}

impl Registry {
    /// The built-in scitype hierarchy and no kinds.
    pub fn new() -> Self {
        let mut scitypes = IndexMap::new();
        for d in [
            SciTypeDescriptor::new(
                "formal_object",
                None,
                &["get_params", "set_params", "get_tags", "scitype_of", "domain_of"],
                &[],
            ),
            SciTypeDescriptor::new("distribution", Some("formal_object"), &["pdf", "cdf"], &["cdf_monotone", "pdf_normalized"]),
            SciTypeDescriptor::new(
                "estimator",
                Some("formal_object"),
                &["get_fitted_params", "clone_unfitted", "save", "load"],
                &[],
            ),
            SciTypeDescriptor::new(
                "supervised_learner",
                Some("estimator"),
                &["fit", "predict"],
                &["row_permutation_invariance", "column_permutation_invariance"],
            ),
            SciTypeDescriptor::new("supervised_classifier", Some("supervised_learner"), &[], &["finite_label_domain"]),
            SciTypeDescriptor::new("supervised_regressor", Some("supervised_learner"), &[], &["real_valued_predictions"]),
            SciTypeDescriptor::new(
                "transformer",
                Some("estimator"),
                &["fit", "transform", "fit_transform"],
                &["row_permutation_invariance", "column_permutation_invariance"],
            ),
            SciTypeDescriptor::new("forecaster", Some("estimator"), &["fit", "predict"], &["temporal_order"]),
        ] {
            scitypes.insert(d.id.clone(), d);
        }
        Registry {
            scitypes,
            kinds: IndexMap::new(),
        }
    }

    /// Every reference kind, the four structural composites and the
    /// contracted `ScaledOLS` kind.
    pub fn reference() -> Self {
        let mut r = Registry::new();
        r.register_distribution(Arc::new(|p| Ok(Box::new(Normal::standard().set_params(p)?))))
            .expect("fresh registry");
        for make in [
            leaf(|| AnyEstimator::supervised(MajorityDummyClassifier::new())),
            leaf(|| AnyEstimator::supervised(NearestNeighborClassifier::default())),
            leaf(|| AnyEstimator::supervised(MeanRegressor::new())),
            leaf(|| AnyEstimator::supervised(LinearRegressor::new())),
            leaf(|| AnyEstimator::transformer(StandardScaler::default())),
            leaf(|| AnyEstimator::forecaster(NaiveLastForecaster::new())),
            leaf(|| AnyEstimator::forecaster(SimpleExpSmoothing::default())),
        ] {
            r.register_estimator(make, None).expect("fresh registry");
        }
        r.register_estimator(Arc::new(Pipeline::from_params), None)
            .expect("fresh registry");
        r.register_estimator(Arc::new(Ensemble::from_params), None)
            .expect("fresh registry");
        r.register_estimator(Arc::new(GridSearchTuner::from_params), None)
            .expect("fresh registry");
        r.register_estimator(Arc::new(ReducedForecaster::from_params), None)
            .expect("fresh registry");
        let prototype = r
            .create("Pipeline", &ParamMap::new())
            .expect("default pipeline");
        compose::contract(
            &mut r,
            "ScaledOLS",
            &prototype,
            &ParamMap::new().with("scaler__with_mean", true),
        )
        .expect("fresh registry");
        r
    }

    pub fn register_scitype(&mut self, descriptor: SciTypeDescriptor) -> Result<()> {
        if self.scitypes.contains_key(&descriptor.id) {
            return Err(Error::NameCollision(descriptor.id));
        }
        if let Some(parent) = &descriptor.parent {
            if !self.scitypes.contains_key(parent) {
                return Err(Error::Unregistered(parent.clone()));
            }
        }
        self.scitypes.insert(descriptor.id.clone(), descriptor);
        Ok(())
    }

    /// Registers an estimator kind. The kind name, scitype, defaults and
    /// tags are read off the instance the constructor builds from no
    /// parameters.
    pub fn register_estimator(
        &mut self,
        constructor: EstimatorConstructor,
        fixture: Option<FixtureHook>,
    ) -> Result<&EstimatorDescriptor> {
        let prototype = constructor(self, &ParamMap::new())?;
        let kind_name = prototype.kind().to_string();
        if self.kinds.contains_key(&kind_name) {
            return Err(Error::NameCollision(kind_name));
        }
        if !self.scitypes.contains_key(prototype.scitype()) {
            return Err(Error::Unregistered(prototype.scitype().to_string()));
        }
        let descriptor = EstimatorDescriptor {
            kind_name: kind_name.clone(),
            scitype: prototype.scitype().to_string(),
            default_params: prototype.get_params(false),
            tags: prototype.tags(),
            constructor,
            fixture,
        };
        self.kinds
            .insert(kind_name.clone(), KindDescriptor::Estimator(descriptor));
        match &self.kinds[&kind_name] {
            KindDescriptor::Estimator(d) => Ok(d),
            KindDescriptor::Value(_) => unreachable!(),
        }
    }

    pub fn register_distribution(&mut self, constructor: DistributionConstructor) -> Result<&ValueDescriptor> {
        let prototype = constructor(&ParamMap::new())?;
        let kind_name = prototype.kind().to_string();
        if self.kinds.contains_key(&kind_name) {
            return Err(Error::NameCollision(kind_name));
        }
        let descriptor = ValueDescriptor {
            kind_name: kind_name.clone(),
            scitype: prototype.scitype().to_string(),
            default_params: prototype.params(),
            tags: prototype.tags(),
            constructor,
        };
        self.kinds.insert(kind_name.clone(), KindDescriptor::Value(descriptor));
        match &self.kinds[&kind_name] {
            KindDescriptor::Value(d) => Ok(d),
            KindDescriptor::Estimator(_) => unreachable!(),
        }
    }

    pub fn contains(&self, kind: &str) -> bool {
        self.kinds.contains_key(kind)
    }

    pub fn get(&self, kind: &str) -> Result<&KindDescriptor> {
        self.kinds
            .get(kind)
            .ok_or_else(|| Error::Unregistered(kind.to_string()))
    }

    pub fn estimator_descriptor(&self, kind: &str) -> Result<&EstimatorDescriptor> {
        match self.get(kind)? {
            KindDescriptor::Estimator(d) => Ok(d),
            KindDescriptor::Value(d) => Err(Error::WrongScitype {
                expected: "estimator".into(),
                found: d.scitype.clone(),
            }),
        }
    }

    /// Registered kinds in registration order.
    pub fn kinds(&self) -> impl Iterator<Item = &KindDescriptor> {
        self.kinds.values()
    }

    pub fn scitypes(&self) -> impl Iterator<Item = &SciTypeDescriptor> {
        self.scitypes.values()
    }

    pub fn scitype(&self, id: &str) -> Result<&SciTypeDescriptor> {
        self.scitypes
            .get(id)
            .ok_or_else(|| Error::Unregistered(id.to_string()))
    }

    /// `id` followed by its ancestors up to `formal_object`.
    pub fn scitype_chain(&self, id: &str) -> Result<Vec<&SciTypeDescriptor>> {
        let mut chain = Vec::new();
        let mut next = Some(id.to_string());
        while let Some(id) = next {
            let d = self.scitype(&id)?;
            if chain.iter().any(|c: &&SciTypeDescriptor| c.id == d.id) {
                return Err(Error::InvalidComposition(format!("scitype cycle at `{id}`")));
            }
            next = d.parent.clone();
            chain.push(d);
        }
        Ok(chain)
    }

    /// True when `id` is `ancestor` or descends from it.
    pub fn is_subtype(&self, id: &str, ancestor: &str) -> bool {
        self.scitype_chain(id)
            .is_ok_and(|chain| chain.iter().any(|d| d.id == ancestor))
    }

    /// Builds an instance of `kind` with `params` over the defaults.
    pub fn create(&self, kind: &str, params: &ParamMap) -> Result<AnyEstimator> {
        let d = self.estimator_descriptor(kind)?;
        (d.constructor)(self, params)
    }

    pub fn build(&self, spec: &EstimatorSpec) -> Result<AnyEstimator> {
        self.create(&spec.kind, &spec.params)
    }

    pub fn create_distribution(&self, kind: &str, params: &ParamMap) -> Result<Box<dyn Distribution>> {
        match self.get(kind)? {
            KindDescriptor::Value(d) => (d.constructor)(params),
            KindDescriptor::Estimator(d) => Err(Error::WrongScitype {
                expected: "distribution".into(),
                found: d.scitype.clone(),
            }),
        }
    }

    /// Most specific scitype of a registered object.
    pub fn scitype_of(&self, obj: &dyn FormalObject) -> Result<&SciTypeDescriptor> {
        self.get(obj.kind())?;
        self.scitype(obj.scitype())
    }

    pub fn domain_of(&self, obj: &dyn FormalObject) -> Result<Domain> {
        self.get(obj.kind())?;
        Ok(obj.domain())
    }
}

/// Constructor for a kind without components: default instance, then
/// `set_params`.
pub fn leaf<F>(make: F) -> EstimatorConstructor
where
    F: Fn() -> AnyEstimator + Send + Sync + 'static,
{
    Arc::new(move |_, params| {
        let mut e = make();
        e.set_params(params)?;
        Ok(e)
    })
}

/// A `tag=value` predicate over kind descriptors. `scitype=x` matches
/// every kind whose scitype is `x` or descends from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagFilter {
    pub tag: String,
    pub value: String,
}

impl TagFilter {
    pub fn parse(text: &str) -> Result<Self> {
        match text.split_once('=') {
            Some((tag, value))
                if !tag.trim().is_empty() && !value.trim().is_empty() && !value.contains('=') =>
            {
                Ok(Self {
                    tag: tag.trim().to_string(),
                    value: value.trim().to_string(),
                })
            }
            _ => Err(Error::BadFilterSyntax(text.to_string())),
        }
    }

    pub fn matches(&self, registry: &Registry, kind: &KindDescriptor) -> bool {
        if self.tag == "scitype" {
            return registry.is_subtype(kind.scitype(), &self.value);
        }
        kind.tags().get(&self.tag).is_some_and(|v| v.to_string() == self.value)
    }
}

impl Registry {
    /// Kinds in registration order, optionally narrowed by a filter.
    pub fn list(&self, filter: Option<&TagFilter>) -> Vec<&KindDescriptor> {
        self.kinds()
            .filter(|k| filter.map_or(true, |f| f.matches(self, k)))
            .collect()
    }
}
