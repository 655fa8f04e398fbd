//! Task specifications and co-strategies: what is to be learned, how data
//! is resampled, and how an estimator is scored. Evaluation lives here,
//! outside every learning strategy.

mod evaluate;
mod splitter;

pub use evaluate::{
    cross_validate, evaluate_forecaster, evaluate_supervised, EvaluationReport, ForecastVariant, ForecastingTask,
    SupervisedTask, Task, TaskFlavor,
};
pub use splitter::{shuffle, Split, Splitter};
