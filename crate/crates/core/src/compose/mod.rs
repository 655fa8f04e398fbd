//! Composition operations.
//!
//! Every composite is itself an estimator of its resultant scitype, so it
//! can stand wherever a primitive kind can. Composition takes no data:
//! components are configured up front and data arrives through the
//! composite's own `fit`.
//!
//! Registry constructors for composites read the estimator-valued entries
//! of their parameter map as the component list. When such entries are
//! present they define the whole structure; otherwise the kind's default
//! components are used. Remaining keys are then applied with `set_params`.

mod contract;
mod ensemble;
mod pipeline;
mod reduce;
mod tuner;

pub use contract::{contract, Contracted};
pub use ensemble::{Aggregator, Ensemble};
pub use pipeline::Pipeline;
pub use reduce::{ReducedForecaster, Strategy};
pub use tuner::{CvResult, GridSearchTuner, ParamGrid};

use crate::error::{Error, Result};
use crate::estimator::{set_params, AnyEstimator, Estimator, SupervisedLearner, Transformer};
use crate::params::{is_valid_param_name, EstimatorSpec, ParamMap, ParamValue, TagMap, NESTING_SEPARATOR};
use crate::registry::Registry;

/// Estimator-valued top-level entries of `params`, in order.
pub(crate) fn structural_entries(params: &ParamMap) -> Vec<(String, EstimatorSpec)> {
    params
        .iter()
        .filter_map(|(k, v)| match v {
            ParamValue::Estimator(spec) if !k.contains(NESTING_SEPARATOR) => Some((k.to_string(), (**spec).clone())),
            _ => None,
        })
        .collect()
}

/// `params` without its estimator-valued top-level entries and without
/// the keys in `skip`.
pub(crate) fn remaining(params: &ParamMap, skip: &[&str]) -> ParamMap {
    params
        .iter()
        .filter(|(k, v)| !(matches!(v, ParamValue::Estimator(_)) && !k.contains(NESTING_SEPARATOR)) && !skip.contains(k))
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

pub(crate) fn build_supervised(registry: &Registry, name: &str, spec: &EstimatorSpec) -> Result<Box<dyn SupervisedLearner>> {
    registry
        .build(spec)
        .and_then(AnyEstimator::into_supervised)
        .map_err(Error::in_component(name))
}

pub(crate) fn build_transformer(registry: &Registry, name: &str, spec: &EstimatorSpec) -> Result<Box<dyn Transformer>> {
    registry
        .build(spec)
        .and_then(AnyEstimator::into_transformer)
        .map_err(Error::in_component(name))
}

/// Applies `rest` to a freshly built composite.
pub(crate) fn finish(mut e: AnyEstimator, rest: &ParamMap) -> Result<AnyEstimator> {
    if !rest.is_empty() {
        set_params(e.as_estimator_mut(), rest)?;
    }
    Ok(e)
}

pub(crate) fn check_component_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<()> {
    let mut seen = Vec::new();
    for name in names {
        if !is_valid_param_name(name) {
            return Err(Error::InvalidComposition(format!("`{name}` is not a valid component name")));
        }
        if seen.contains(&name) {
            return Err(Error::InvalidComposition(format!("component name `{name}` is used twice")));
        }
        seen.push(name);
    }
    Ok(())
}

/// Tags of a composite, derived from its components.
pub(crate) fn composite_tags(scitype: &str, components: &[&dyn Estimator], features: Option<ParamValue>) -> TagMap {
    let all = |tag: &str, default: bool| {
        components
            .iter()
            .all(|c| c.tags().get_bool(tag).unwrap_or(default))
    };
    let mut entries = vec![
        ("scitype".to_string(), ParamValue::from(scitype)),
        ("deterministic".to_string(), ParamValue::from(all("deterministic", false))),
        ("handles_missing".to_string(), ParamValue::from(all("handles_missing", false))),
        ("capability:update".to_string(), ParamValue::from(false)),
        (
            "capability:row_order_invariant".to_string(),
            ParamValue::from(all("capability:row_order_invariant", true)),
        ),
    ];
    if let Some(features) = features {
        entries.push(("feature_scitypes".to_string(), features));
    }
    entries.push(("composite".to_string(), ParamValue::from(true)));
    TagMap::from_entries(entries)
}
