//! Scientific types for machine learning estimators.
//!
//! Every estimator, transformer, forecaster and distribution is a formal
//! object: a kind with declared parameters, tags and a scitype. Composites
//! are built from other estimators through the [`Registry`], and the
//! [`conformance`] checker verifies each kind against the contract of its
//! scitype.

pub mod compose;
pub mod conformance;
pub mod data;
pub mod domain;
pub mod error;
pub mod estimator;
pub mod learners;
pub mod mathobj;
pub mod params;
pub mod persist;
pub mod registry;
pub mod tasks;
pub mod workflow;

pub use data::{Column, ColumnScitype, ForecastingHorizon, Label, LabelVector, Table, TimeSeries};
pub use domain::Domain;
pub use error::{Error, Result};
pub use estimator::{AnyEstimator, Estimator, FitState, FitStatus, FormalObject, Forecaster, SupervisedLearner, Transformer};
pub use mathobj::{Distribution, LossFunction, Normal};
pub use params::{EstimatorSpec, ParamMap, ParamSpec, ParamValue, TagMap};
pub use registry::{KindDescriptor, Registry, TagFilter};
