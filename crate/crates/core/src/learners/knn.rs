use super::common::{check_training_pair, tabular_tags, Schema, NUMERIC_ONLY};
use super::dummy::majority_label;
use crate::data::{Label, LabelVector, Table};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::estimator::{require, Estimator, FormalObject, SupervisedLearner};
use crate::params::{ParamMap, ParamSpec, ParamValue, TagMap};

/// k-nearest-neighbour classifier, Euclidean distance on numeric columns.
///
/// Neighbours are ranked by distance, then by label, then by training
/// position; the vote uses the majority rule of
/// [`MajorityDummyClassifier`](super::MajorityDummyClassifier).
#[derive(Debug, Clone)]
pub struct NearestNeighborClassifier {
    k: usize,
    fitted: Option<Fitted>,
}

#[derive(Debug, Clone)]
struct Fitted {
    schema: Schema,
    rows: Vec<Vec<f64>>,
    labels: Vec<Label>,
}

impl Default for NearestNeighborClassifier {
    fn default() -> Self {
        Self::new(3)
    }
}

impl NearestNeighborClassifier {
    pub fn new(k: usize) -> Self {
        Self { k, fitted: None }
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl FormalObject for NearestNeighborClassifier {
    fn kind(&self) -> &str {
        "NearestNeighborClassifier"
    }

    fn scitype(&self) -> &str {
        "supervised_classifier"
    }

    fn param_specs(&self) -> Vec<ParamSpec> {
        vec![ParamSpec::new("k", Domain::at_least(1), 3i64)]
    }

    fn params(&self) -> ParamMap {
        ParamMap::new().with("k", self.k as i64)
    }

    fn tags(&self) -> TagMap {
        tabular_tags(
            "supervised_classifier",
            NUMERIC_ONLY,
            &[("handles_multiclass", ParamValue::from(true))],
        )
    }

    fn domain(&self) -> Domain {
        match &self.fitted {
            Some(f) => {
                let mut classes = f.labels.clone();
                classes.sort();
                classes.dedup();
                Domain::Labels(classes)
            }
            None => Domain::Any("finite label set (known after fit)".into()),
        }
    }
}

impl Estimator for NearestNeighborClassifier {
    fn set_param(&mut self, name: &str, value: &ParamValue) -> Result<()> {
        match name {
            "k" => self.k = value.as_i64().expect("validated") as usize,
            other => return Err(Error::UnknownParameter(other.to_string())),
        }
        Ok(())
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn fitted_params(&self) -> Result<ParamMap> {
        let f = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        let mut state = ParamMap::new()
            .with(
                "train_rows",
                ParamValue::List(f.rows.iter().map(|r| ParamValue::RealList(r.clone())).collect()),
            )
            .with(
                "train_labels",
                ParamValue::List(f.labels.iter().map(Label::to_param).collect()),
            );
        f.schema.write_state(&mut state);
        Ok(state)
    }

    fn restore_fitted(&mut self, state: &ParamMap) -> Result<()> {
        let bad = |k: &str| Error::Serialization(format!("bad `{k}`"));
        let rows = require(state, "train_rows")?
            .as_list()
            .and_then(|l| l.iter().map(|r| r.as_real_list().map(<[f64]>::to_vec)).collect::<Option<Vec<_>>>())
            .ok_or_else(|| bad("train_rows"))?;
        let labels = require(state, "train_labels")?
            .as_list()
            .and_then(|l| l.iter().map(Label::from_param).collect::<Option<Vec<_>>>())
            .ok_or_else(|| bad("train_labels"))?;
        self.fitted = Some(Fitted {
            schema: Schema::read_state(state)?,
            rows,
            labels,
        });
        Ok(())
    }

    fn reset(&mut self) {
        self.fitted = None;
    }
}

impl SupervisedLearner for NearestNeighborClassifier {
    fn fit(&mut self, x: &Table, y: &LabelVector) -> Result<()> {
        check_training_pair(x, y)?;
        let labels = y.as_classes().ok_or_else(|| Error::ScitypeMismatch { column: "y".into() })?;
        let schema = Schema::fit(x, NUMERIC_ONLY)?;
        if x.n_rows() < self.k {
            return Err(Error::TooFewSamples {
                needed: self.k,
                got: x.n_rows(),
            });
        }
        let rows = schema.numeric_rows(x);
        self.fitted = Some(Fitted {
            schema,
            rows,
            labels: labels.to_vec(),
        });
        Ok(())
    }

    fn predict(&self, x: &Table) -> Result<LabelVector> {
        let f = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        f.schema.check(x)?;
        let queries = f.schema.numeric_rows(x);
        let predictions = queries
            .iter()
            .map(|q| {
                let mut ranked: Vec<(f64, &Label, usize)> = f
                    .rows
                    .iter()
                    .zip(&f.labels)
                    .enumerate()
                    .map(|(i, (row, label))| (squared_distance(q, row), label, i))
                    .collect();
                ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)).then(a.2.cmp(&b.2)));
                majority_label(ranked.iter().take(self.k).map(|(_, l, _)| *l)).expect("k >= 1")
            })
            .collect();
        Ok(LabelVector::Classes(predictions))
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
