//! The universal object model.
//!
//! [`FormalObject`] carries the interface points every object answers
//! (parameters, tags, scitype, domain). [`Estimator`] adds the entity-object
//! points (fitted state, reset, components). The scitype traits
//! [`SupervisedLearner`], [`Transformer`] and [`Forecaster`] add the
//! learning operations, and [`AnyEstimator`] is the dynamic handle the
//! registry hands out.

use std::fmt;

use dyn_clone::DynClone;
use serde::{Deserialize, Serialize};

use crate::data::{ForecastingHorizon, LabelVector, Table, TimeSeries};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::params::{EstimatorSpec, ParamMap, ParamSpec, ParamValue, TagMap, NESTING_SEPARATOR};

pub trait FormalObject: fmt::Debug + Send + Sync {
    /// Registered kind name, e.g. `"MajorityDummyClassifier"`.
    fn kind(&self) -> &str;

    /// Id of the most specific scitype this object inhabits.
    fn scitype(&self) -> &str;

    /// Declared own parameters with their domains.
    fn param_specs(&self) -> Vec<ParamSpec>;

    /// Own parameter values (component blueprints included, no nesting).
    fn params(&self) -> ParamMap;

    fn tags(&self) -> TagMap;

    fn domain(&self) -> Domain;
}

pub trait Estimator: FormalObject + DynClone {
    /// Sets one validated own parameter. Callers go through [`set_params`],
    /// which checks names and domains first.
    fn set_param(&mut self, name: &str, value: &ParamValue) -> Result<()>;

    fn is_fitted(&self) -> bool;

    /// State-defining variables; composites nest component state under
    /// `component__` keys.
    fn fitted_params(&self) -> Result<ParamMap>;

    /// Rebuilds fitted state from the output of [`Estimator::fitted_params`].
    fn restore_fitted(&mut self, state: &ParamMap) -> Result<()>;

    /// Drops fitted state, returning to `Unfitted`.
    fn reset(&mut self);

    fn components(&self) -> Vec<(&str, &dyn Estimator)> {
        Vec::new()
    }

    fn component_mut(&mut self, _name: &str) -> Option<&mut dyn Estimator> {
        None
    }
}

dyn_clone::clone_trait_object!(Estimator);

pub trait SupervisedLearner: Estimator {
    fn fit(&mut self, x: &Table, y: &LabelVector) -> Result<()>;

    fn predict(&self, x: &Table) -> Result<LabelVector>;

    /// Online update; reference kinds advertise `capability:update = false`.
    fn update(&mut self, _x: &Table, _y: &LabelVector) -> Result<()> {
        Err(Error::Unsupported("update".into()))
    }
}

dyn_clone::clone_trait_object!(SupervisedLearner);

pub trait Transformer: Estimator {
    /// Fits on `x`; `y` is available to kinds that use it.
    fn fit(&mut self, x: &Table, y: Option<&LabelVector>) -> Result<()>;

    fn transform(&self, x: &Table) -> Result<Table>;

    fn fit_transform(&mut self, x: &Table, y: Option<&LabelVector>) -> Result<Table> {
        Transformer::fit(self, x, y)?;
        self.transform(x)
    }
}

dyn_clone::clone_trait_object!(Transformer);

pub trait Forecaster: Estimator {
    fn fit(&mut self, y: &TimeSeries) -> Result<()>;

    /// Forecasts at `last training index + offset` for each offset.
    fn predict(&self, fh: &ForecastingHorizon) -> Result<TimeSeries>;

    fn update(&mut self, _y: &TimeSeries) -> Result<()> {
        Err(Error::Unsupported("update".into()))
    }
}

dyn_clone::clone_trait_object!(Forecaster);

/// Fit status plus the state that goes with it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitState {
    pub status: FitStatus,
    pub fitted_params: ParamMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStatus {
    Unfitted,
    Fitted,
}

/// An estimator of any scitype.
#[derive(Debug, Clone)]
pub enum AnyEstimator {
    Supervised(Box<dyn SupervisedLearner>),
    Transformer(Box<dyn Transformer>),
    Forecaster(Box<dyn Forecaster>),
}

impl AnyEstimator {
    pub fn supervised(e: impl SupervisedLearner + 'static) -> Self {
        AnyEstimator::Supervised(Box::new(e))
    }

    pub fn transformer(e: impl Transformer + 'static) -> Self {
        AnyEstimator::Transformer(Box::new(e))
    }

    pub fn forecaster(e: impl Forecaster + 'static) -> Self {
        AnyEstimator::Forecaster(Box::new(e))
    }

    pub fn as_estimator(&self) -> &dyn Estimator {
        match self {
            AnyEstimator::Supervised(e) => e.as_ref(),
            AnyEstimator::Transformer(e) => e.as_ref(),
            AnyEstimator::Forecaster(e) => e.as_ref(),
        }
    }

    pub fn as_estimator_mut(&mut self) -> &mut dyn Estimator {
        match self {
            AnyEstimator::Supervised(e) => e.as_mut(),
            AnyEstimator::Transformer(e) => e.as_mut(),
            AnyEstimator::Forecaster(e) => e.as_mut(),
        }
    }

    pub fn as_supervised(&self) -> Option<&dyn SupervisedLearner> {
        match self {
            AnyEstimator::Supervised(e) => Some(e.as_ref()),
            _ => None,
        }
    }

    pub fn as_supervised_mut(&mut self) -> Option<&mut dyn SupervisedLearner> {
        match self {
            AnyEstimator::Supervised(e) => Some(e.as_mut()),
            _ => None,
        }
    }

    pub fn as_transformer(&self) -> Option<&dyn Transformer> {
        match self {
            AnyEstimator::Transformer(e) => Some(e.as_ref()),
            _ => None,
        }
    }

    pub fn as_transformer_mut(&mut self) -> Option<&mut dyn Transformer> {
        match self {
            AnyEstimator::Transformer(e) => Some(e.as_mut()),
            _ => None,
        }
    }

    pub fn as_forecaster(&self) -> Option<&dyn Forecaster> {
        match self {
            AnyEstimator::Forecaster(e) => Some(e.as_ref()),
            _ => None,
        }
    }

    pub fn as_forecaster_mut(&mut self) -> Option<&mut dyn Forecaster> {
        match self {
            AnyEstimator::Forecaster(e) => Some(e.as_mut()),
            _ => None,
        }
    }

    pub fn into_supervised(self) -> Result<Box<dyn SupervisedLearner>> {
        match self {
            AnyEstimator::Supervised(e) => Ok(e),
            other => Err(wrong_scitype("supervised_learner", &other)),
        }
    }

    pub fn into_transformer(self) -> Result<Box<dyn Transformer>> {
        match self {
            AnyEstimator::Transformer(e) => Ok(e),
            other => Err(wrong_scitype("transformer", &other)),
        }
    }

    pub fn into_forecaster(self) -> Result<Box<dyn Forecaster>> {
        match self {
            AnyEstimator::Forecaster(e) => Ok(e),
            other => Err(wrong_scitype("forecaster", &other)),
        }
    }

    pub fn kind(&self) -> &str {
        self.as_estimator().kind()
    }

    pub fn scitype(&self) -> &str {
        self.as_estimator().scitype()
    }

    pub fn tags(&self) -> TagMap {
        self.as_estimator().tags()
    }

    pub fn is_fitted(&self) -> bool {
        self.as_estimator().is_fitted()
    }

    pub fn get_params(&self, deep: bool) -> ParamMap {
        get_params(self.as_estimator(), deep)
    }

    /// Applies `updates` atomically: on error the estimator is unchanged.
    /// On success the estimator is reset to `Unfitted`.
    pub fn set_params(&mut self, updates: &ParamMap) -> Result<()> {
        let mut staged = self.clone();
        set_params(staged.as_estimator_mut(), updates)?;
        *self = staged;
        Ok(())
    }

    pub fn get_fitted_params(&self) -> Result<ParamMap> {
        self.as_estimator().fitted_params()
    }

    pub fn fit_state(&self) -> FitState {
        let e = self.as_estimator();
        if e.is_fitted() {
            FitState {
                status: FitStatus::Fitted,
                fitted_params: e.fitted_params().unwrap_or_default(),
            }
        } else {
            FitState {
                status: FitStatus::Unfitted,
                fitted_params: ParamMap::new(),
            }
        }
    }

    pub fn clone_unfitted(&self) -> AnyEstimator {
        let mut c = self.clone();
        c.as_estimator_mut().reset();
        c
    }

    pub fn blueprint(&self) -> EstimatorSpec {
        blueprint(self.as_estimator())
    }
}

fn wrong_scitype(expected: &str, found: &AnyEstimator) -> Error {
    Error::WrongScitype {
        expected: expected.to_string(),
        found: found.scitype().to_string(),
    }
}

/// Own parameters, plus with `deep` every component parameter under
/// `component__key`.
pub fn get_params(e: &dyn Estimator, deep: bool) -> ParamMap {
    let mut out = e.params();
    if deep {
        for (name, component) in e.components() {
            out.extend_prefixed(name, get_params(component, true));
        }
    }
    out
}

/// Kind plus own parameters, recursively including component blueprints.
pub fn blueprint(e: &dyn Estimator) -> EstimatorSpec {
    EstimatorSpec {
        kind: e.kind().to_string(),
        params: e.params(),
    }
}

/// Applies updates key by key, routing nested keys to components, and
/// resets fitted state. Not atomic; use [`AnyEstimator::set_params`] for
/// all-or-nothing semantics.
pub fn set_params(e: &mut dyn Estimator, updates: &ParamMap) -> Result<()> {
    for (key, value) in updates.iter() {
        set_one(e, key, key, value)?;
    }
    e.reset();
    Ok(())
}

fn set_one(e: &mut dyn Estimator, full_key: &str, key: &str, value: &ParamValue) -> Result<()> {
    if let Some((head, rest)) = key.split_once(NESTING_SEPARATOR) {
        let component = e
            .component_mut(head)
            .ok_or_else(|| Error::UnknownParameter(full_key.to_string()))?;
        set_one(component, full_key, rest, value)?;
        component.reset();
        return Ok(());
    }
    let spec = e
        .param_specs()
        .into_iter()
        .find(|s| s.name == key)
        .ok_or_else(|| Error::UnknownParameter(full_key.to_string()))?;
    if !spec.domain.contains(value) {
        return Err(Error::domain(full_key, value, &spec.domain));
    }
    e.set_param(key, value)
}

/// Replaces a component's parameters from a blueprint of the same kind.
pub(crate) fn apply_blueprint(target: &mut dyn Estimator, name: &str, spec: &EstimatorSpec) -> Result<()> {
    if spec.kind != target.kind() {
        return Err(Error::domain(
            name,
            &spec.kind,
            format!("estimator of kind {}", target.kind()),
        ));
    }
    set_params(target, &spec.params)
}

/// Looks up the declared spec of a possibly nested key.
pub fn find_param_spec(e: &dyn Estimator, key: &str) -> Option<ParamSpec> {
    match key.split_once(NESTING_SEPARATOR) {
        Some((head, rest)) => e
            .components()
            .into_iter()
            .find(|(n, _)| *n == head)
            .and_then(|(_, c)| find_param_spec(c, rest)),
        None => e.param_specs().into_iter().find(|s| s.name == key),
    }
}

/// Routes `state` entries under `name__` to a component's restore.
pub(crate) fn restore_component(component: &mut dyn Estimator, name: &str, state: &ParamMap) -> Result<()> {
    let sub = state.strip_prefix(name);
    if sub.is_empty() {
        return Err(Error::Serialization(format!("no fitted state for component `{name}`")));
    }
    component
        .restore_fitted(&sub)
        .map_err(Error::in_component(name))
}

pub(crate) fn require<'a>(state: &'a ParamMap, key: &str) -> Result<&'a ParamValue> {
    state
        .get(key)
        .ok_or_else(|| Error::Serialization(format!("fitted state lacks `{key}`")))
}

pub(crate) fn require_f64(state: &ParamMap, key: &str) -> Result<f64> {
    require(state, key)?
        .as_f64()
        .ok_or_else(|| Error::Serialization(format!("`{key}` is not numeric")))
}
