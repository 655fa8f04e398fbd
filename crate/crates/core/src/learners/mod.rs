//! Reference estimators for the supervised, transformer and forecaster
//! scitypes.

pub(crate) mod common;
mod dummy;
mod forecasters;
mod knn;
mod linear;
mod mean;
mod scaler;

pub(crate) use dummy::majority_label;
pub(crate) use forecasters::forecaster_tags;
pub use dummy::MajorityDummyClassifier;
pub use forecasters::{NaiveLastForecaster, SimpleExpSmoothing};
pub use knn::NearestNeighborClassifier;
pub use linear::{LinearRegressor, RANK_DEFICIENCY_RIDGE};
pub use mean::MeanRegressor;
pub use scaler::StandardScaler;
