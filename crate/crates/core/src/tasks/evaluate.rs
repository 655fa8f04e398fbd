use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::splitter::{Split, Splitter};
use crate::data::{ForecastingHorizon, LabelVector, Table, TimeSeries};
use crate::error::{Error, Result};
use crate::estimator::{AnyEstimator, SupervisedLearner};
use crate::mathobj::LossFunction;
use crate::params::EstimatorSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskFlavor {
    Classification,
    Regression,
}

impl TaskFlavor {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskFlavor::Classification => "classification",
            TaskFlavor::Regression => "regression",
        }
    }
}

/// Which column to predict from which others, judged by which loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupervisedTask {
    pub target: String,
    /// Feature columns; `None` means every column but the target.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<Vec<String>>,
    pub loss: LossFunction,
    pub flavor: TaskFlavor,
}

impl SupervisedTask {
    pub fn classification(target: impl Into<String>) -> Self {
        Self {
            target: target.into(),
            features: None,
            loss: LossFunction::Misclassification,
            flavor: TaskFlavor::Classification,
        }
    }

    pub fn regression(target: impl Into<String>) -> Self {
        Self {
            target: target.into(),
            features: None,
            loss: LossFunction::Squared,
            flavor: TaskFlavor::Regression,
        }
    }

    pub fn with_features(mut self, features: &[&str]) -> Self {
        self.features = Some(features.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.loss.task() != self.flavor.as_str() {
            return Err(Error::domain(
                "loss",
                self.loss,
                format!("a {} loss", self.flavor.as_str()),
            ));
        }
        if self.features.as_ref().is_some_and(|f| f.contains(&self.target)) {
            return Err(Error::InvalidData(format!("target `{}` is also listed as a feature", self.target)));
        }
        Ok(())
    }

    /// Splits `data` into the feature table and the target vector.
    pub fn prepare(&self, data: &Table) -> Result<(Table, LabelVector)> {
        self.validate()?;
        let column = data
            .column(&self.target)
            .ok_or_else(|| Error::MissingTarget(self.target.clone()))?;
        let y = LabelVector::from_column(column, &self.target, self.flavor == TaskFlavor::Classification)?;
        let x = match &self.features {
            Some(names) => {
                let names: Vec<&str> = names.iter().map(String::as_str).collect();
                data.select(&names)?
            }
            None => data.without(&self.target),
        };
        Ok((x, y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForecastVariant {
    /// Fit once on `Z₁…Z_τ`, forecast the horizon.
    #[default]
    FixedHorizon,
    /// Each step may use only earlier (possibly forecast) values.
    SlidingWindow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastingTask {
    pub fh: ForecastingHorizon,
    #[serde(default)]
    pub variant: ForecastVariant,
    #[serde(default = "squared")]
    pub loss: LossFunction,
}

fn squared() -> LossFunction {
    LossFunction::Squared
}

impl ForecastingTask {
    pub fn new(fh: ForecastingHorizon) -> Result<Self> {
        let task = Self {
            fh,
            variant: ForecastVariant::FixedHorizon,
            loss: LossFunction::Squared,
        };
        task.validate()?;
        Ok(task)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fh.is_empty() {
            return Err(Error::EmptyHorizon);
        }
        if self.loss != LossFunction::Squared {
            return Err(Error::domain("loss", self.loss, "a regression loss"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Task {
    Supervised(SupervisedTask),
    Forecasting(ForecastingTask),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub estimator: EstimatorSpec,
    pub task: Task,
    pub per_fold_losses: Vec<f64>,
    pub mean_loss: f64,
    pub n_splits: usize,
}

/// Mean test loss per split, each from a fresh unfitted clone of `learner`.
/// `learner` itself is only read.
pub fn cross_validate(
    learner: &dyn SupervisedLearner,
    x: &Table,
    y: &LabelVector,
    splits: &[Split],
    loss: LossFunction,
) -> Result<Vec<f64>> {
    let outcomes: Vec<Result<f64>> = splits
        .par_iter()
        .map(|split| {
            let mut model = dyn_clone::clone_box(learner);
            model.reset();
            model.fit(&x.take_rows(&split.train), &y.take(&split.train))?;
            let predictions = model.predict(&x.take_rows(&split.test))?;
            loss.mean_loss(&predictions, &y.take(&split.test))
        })
        .collect();
    outcomes.into_iter().collect()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Resampled generalisation-loss estimate. Works on clones; `e` is
/// unchanged afterwards.
pub fn evaluate_supervised(
    e: &AnyEstimator,
    task: &SupervisedTask,
    data: &Table,
    splitter: &Splitter,
) -> Result<EvaluationReport> {
    let learner = e.as_supervised().ok_or_else(|| Error::WrongScitype {
        expected: "supervised_learner".into(),
        found: e.scitype().to_string(),
    })?;
    let (x, y) = task.prepare(data)?;
    let splits = splitter.split(x.n_rows())?;
    let per_fold_losses = cross_validate(learner, &x, &y, &splits, task.loss)?;
    Ok(EvaluationReport {
        estimator: e.blueprint(),
        task: Task::Supervised(task.clone()),
        mean_loss: mean(&per_fold_losses),
        n_splits: splits.len(),
        per_fold_losses,
    })
}

/// Temporal holdout at `τ = ⌊train_fraction·n⌋`: a clone is fitted on
/// `y₁…y_τ` only, then its forecasts at `τ + offset` are scored against
/// the held-out actuals.
pub fn evaluate_forecaster(
    f: &AnyEstimator,
    task: &ForecastingTask,
    y: &TimeSeries,
    train_fraction: f64,
) -> Result<EvaluationReport> {
    task.validate()?;
    let forecaster = f.as_forecaster().ok_or_else(|| Error::WrongScitype {
        expected: "forecaster".into(),
        found: f.scitype().to_string(),
    })?;
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::domain("train_fraction", train_fraction, "(0, 1)"));
    }
    let n = y.len();
    let tau = (train_fraction * n as f64).floor() as usize;
    if tau == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let reach = tau + task.fh.max().expect("validated non-empty") as usize;
    if reach > n {
        return Err(Error::HorizonBeyondData {
            needed: reach,
            available: n,
        });
    }
    let mut model = dyn_clone::clone_box(forecaster);
    model.reset();
    model.fit(&y.head(tau))?;
    let forecast = model.predict(&task.fh)?;
    let actual: Vec<f64> = task
        .fh
        .offsets()
        .iter()
        .map(|&o| y.values()[tau + o as usize - 1])
        .collect();
    let loss = task.loss.mean_loss(
        &LabelVector::Real(forecast.values().to_vec()),
        &LabelVector::Real(actual),
    )?;
    Ok(EvaluationReport {
        estimator: f.blueprint(),
        task: Task::Forecasting(task.clone()),
        per_fold_losses: vec![loss],
        mean_loss: loss,
        n_splits: 1,
    })
}
