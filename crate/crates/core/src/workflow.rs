//! Declarative workflows: one TOML file names an estimator, a task, a data
//! file and a resampling scheme; running it yields an evaluation report.
//!
//! ```toml
//! [estimator]
//! kind = "MajorityDummyClassifier"
//!
//! [task]
//! kind = "supervised"
//! target = "y"
//! flavor = "classification"
//!
//! [data]
//! path = "train.csv"
//!
//! [splitter]
//! kind = "kfold"
//! params = { k = 2 }
//!
//! [output]
//! path = "report.json"
//! ```
//!
//! Relative paths are resolved against the directory of the workflow file.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::data::{ForecastingHorizon, Table, TimeSeries};
use crate::error::Error;
use crate::estimator::AnyEstimator;
use crate::mathobj::LossFunction;
use crate::params::{EstimatorSpec, ParamMap, ParamValue};
use crate::registry::Registry;
use crate::tasks::{
    evaluate_forecaster, evaluate_supervised, EvaluationReport, ForecastVariant, ForecastingTask, Splitter,
    SupervisedTask, TaskFlavor,
};

#[derive(Debug, thiserror::Error)]
pub enum WorkflowError {
    /// The workflow file is unreadable, malformed or names something that
    /// does not exist.
    #[error("workflow spec error: {0}")]
    Spec(String),
    /// Data could not be read or the evaluation failed.
    #[error(transparent)]
    Domain(#[from] Error),
}

impl WorkflowError {
    /// 2 for spec errors, 1 for data and evaluation errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            WorkflowError::Spec(_) => 2,
            WorkflowError::Domain(_) => 1,
        }
    }
}

fn spec_err(msg: impl std::fmt::Display) -> WorkflowError {
    WorkflowError::Spec(msg.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkflowSpec {
    pub estimator: EstimatorSection,
    pub task: TaskSection,
    pub data: DataSection,
    pub splitter: SplitterSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    pub kind: String,
    #[serde(default)]
    pub params: toml::Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskSection {
    Supervised {
        target: String,
        flavor: TaskFlavor,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        features: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        loss: Option<LossFunction>,
    },
    Forecasting {
        fh: Vec<u32>,
        #[serde(default = "default_value_column")]
        value_column: String,
        #[serde(default)]
        variant: ForecastVariant,
    },
}

fn default_value_column() -> String {
    "y".into()
}

fn csv() -> String {
    "csv".into()
}

fn json() -> String {
    "json".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub path: PathBuf,
    #[serde(default = "csv")]
    pub format: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitterSection {
    pub kind: String,
    #[serde(default)]
    pub params: toml::Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: PathBuf,
    #[serde(default = "json")]
    pub format: String,
}

/// TOML to parameter values: integers, floats, strings and booleans map
/// to themselves, arrays of floats or strings to the list variants, a table
/// with a `kind` key to an estimator blueprint, other tables to maps, and
/// any other array to a generic list.
pub fn param_from_toml(value: &toml::Value) -> Result<ParamValue, WorkflowError> {
    use toml::Value as T;
    Ok(match value {
        T::Integer(i) => ParamValue::Int(*i),
        T::Float(f) => ParamValue::Real(*f),
        T::String(s) => ParamValue::Text(s.clone()),
        T::Boolean(b) => ParamValue::Bool(*b),
        T::Datetime(d) => return Err(spec_err(format!("dates are not parameter values ({d})"))),
        T::Array(items) if !items.is_empty() && items.iter().all(|v| matches!(v, T::Float(_))) => {
            ParamValue::RealList(items.iter().filter_map(T::as_float).collect())
        }
        T::Array(items) if !items.is_empty() && items.iter().all(T::is_str) => {
            ParamValue::TextList(items.iter().filter_map(|v| v.as_str().map(str::to_string)).collect())
        }
        T::Array(items) => ParamValue::List(items.iter().map(param_from_toml).collect::<Result<_, _>>()?),
        T::Table(t) => match t.get("kind") {
            Some(T::String(kind)) => {
                if let Some(extra) = t.keys().find(|k| *k != "kind" && *k != "params") {
                    return Err(spec_err(format!("estimator table `{kind}` has stray key `{extra}`")));
                }
                let params = match t.get("params") {
                    Some(T::Table(p)) => params_from_toml(p)?,
                    Some(other) => return Err(spec_err(format!("`params` of `{kind}` must be a table, got {other}"))),
                    None => ParamMap::new(),
                };
                ParamValue::from(EstimatorSpec {
                    kind: kind.clone(),
                    params,
                })
            }
            _ => ParamValue::Map(params_from_toml(t)?),
        },
    })
}

pub fn params_from_toml(table: &toml::Table) -> Result<ParamMap, WorkflowError> {
    table
        .iter()
        .map(|(k, v)| Ok((k.clone(), param_from_toml(v)?)))
        .collect()
}

impl WorkflowSpec {
    pub fn from_toml_str(text: &str) -> Result<Self, WorkflowError> {
        let spec: WorkflowSpec = toml::from_str(text).map_err(spec_err)?;
        if spec.data.format != "csv" {
            return Err(spec_err(format!("unsupported data format `{}`", spec.data.format)));
        }
        if let Some(out) = &spec.output {
            if out.format != "json" {
                return Err(spec_err(format!("unsupported output format `{}`", out.format)));
            }
        }
        Ok(spec)
    }

    /// Reads a workflow file, resolving its relative paths against the
    /// file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, WorkflowError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| spec_err(format!("{}: {e}", path.display())))?;
        let mut spec = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        spec.data.path = base.join(&spec.data.path);
        if let Some(out) = &mut spec.output {
            out.path = base.join(&out.path);
        }
        Ok(spec)
    }

    /// Builds the estimator through the registry.
    pub fn build_estimator(&self, registry: &Registry) -> Result<AnyEstimator, WorkflowError> {
        let params = params_from_toml(&self.estimator.params)?;
        registry.create(&self.estimator.kind, &params).map_err(spec_err)
    }

    pub fn build_splitter(&self) -> Result<Splitter, WorkflowError> {
        Splitter::from_params(Some(&self.splitter.kind), &params_from_toml(&self.splitter.params)?).map_err(spec_err)
    }

    pub fn supervised_task(&self) -> Result<Option<SupervisedTask>, WorkflowError> {
        let TaskSection::Supervised {
            target,
            flavor,
            features,
            loss,
        } = &self.task
        else {
            return Ok(None);
        };
        let task = SupervisedTask {
            target: target.clone(),
            features: features.clone(),
            loss: loss.unwrap_or(match flavor {
                TaskFlavor::Classification => LossFunction::Misclassification,
                TaskFlavor::Regression => LossFunction::Squared,
            }),
            flavor: *flavor,
        };
        task.validate().map_err(spec_err)?;
        Ok(Some(task))
    }

    pub fn forecasting_task(&self) -> Result<Option<(ForecastingTask, String)>, WorkflowError> {
        let TaskSection::Forecasting {
            fh,
            value_column,
            variant,
        } = &self.task
        else {
            return Ok(None);
        };
        let mut task = ForecastingTask::new(ForecastingHorizon::new(fh.clone()).map_err(spec_err)?).map_err(spec_err)?;
        task.variant = *variant;
        Ok(Some((task, value_column.clone())))
    }

    pub fn read_data(&self) -> Result<Table, WorkflowError> {
        Ok(Table::from_csv_path(&self.data.path)?)
    }
}

/// Evaluation outcome plus the spec that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkflowReport {
    #[serde(flatten)]
    pub evaluation: EvaluationReport,
    pub spec_echo: WorkflowSpec,
    /// Seconds since the Unix epoch.
    pub generated_at: u64,
}

impl WorkflowReport {
    pub fn new(evaluation: EvaluationReport, spec: &WorkflowSpec) -> Self {
        let generated_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            evaluation,
            spec_echo: spec.clone(),
            generated_at,
        }
    }

    pub fn to_json(&self) -> Result<String, WorkflowError> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()).into())
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), WorkflowError> {
        std::fs::write(path.as_ref(), self.to_json()? + "\n")
            .map_err(|e| Error::Serialization(format!("{}: {e}", path.as_ref().display())).into())
    }
}

/// Runs a parsed workflow: build, ingest, dispatch to the matching
/// evaluation.
pub fn run(registry: &Registry, spec: &WorkflowSpec) -> Result<WorkflowReport, WorkflowError> {
    let estimator = spec.build_estimator(registry)?;
    let splitter = spec.build_splitter()?;
    let evaluation = if let Some(task) = spec.supervised_task()? {
        if estimator.as_supervised().is_none() {
            return Err(spec_err(format!("`{}` is not a supervised learner", estimator.kind())));
        }
        let data = spec.read_data()?;
        evaluate_supervised(&estimator, &task, &data, &splitter)?
    } else {
        let (task, value_column) = spec.forecasting_task()?.expect("task is forecasting");
        if estimator.as_forecaster().is_none() {
            return Err(spec_err(format!("`{}` is not a forecaster", estimator.kind())));
        }
        let train_fraction = match splitter {
            Splitter::Holdout { train_fraction } | Splitter::TemporalHoldout { train_fraction } => train_fraction,
            Splitter::Kfold { .. } => {
                return Err(spec_err("forecasting workflows need a holdout or temporal_holdout splitter"))
            }
        };
        let y = TimeSeries::from_table(&spec.read_data()?, &value_column)?;
        evaluate_forecaster(&estimator, &task, &y, train_fraction)?
    };
    Ok(WorkflowReport::new(evaluation, spec))
}

/// [`WorkflowSpec::load`] then [`run`].
pub fn run_file(registry: &Registry, path: impl AsRef<Path>) -> Result<WorkflowReport, WorkflowError> {
    run(registry, &WorkflowSpec::load(path)?)
}
