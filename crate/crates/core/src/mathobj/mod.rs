//! Value-object scitypes: probability distributions and loss functions.

mod loss;
mod normal;

pub use loss::LossFunction;
pub use normal::{standard_normal_cdf, Normal};

use crate::estimator::FormalObject;
use crate::error::Result;
use crate::params::ParamMap;

/// Scitype `distribution`: a value object exposing its density and
/// cumulative distribution function.
pub trait Distribution: FormalObject {
    fn pdf(&self, x: f64) -> f64;

    fn cdf(&self, x: f64) -> f64;

    /// A new distribution of the same kind with `updates` applied.
    fn with_params(&self, updates: &ParamMap) -> Result<Box<dyn Distribution>>;
}
