use std::collections::BTreeMap;

use super::common::{check_training_pair, tabular_tags, Schema, ANY_COLUMN};
use crate::data::{Label, LabelVector, Table};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::estimator::{require, Estimator, FormalObject, SupervisedLearner};
use crate::params::{ParamMap, ParamSpec, ParamValue, TagMap};

/// Always predicts the most frequent training label.
///
/// Count ties go to the label that sorts first (numbers ascending, then
/// text lexicographically).
#[derive(Debug, Clone, Default)]
pub struct MajorityDummyClassifier {
    fitted: Option<Fitted>,
}

#[derive(Debug, Clone)]
struct Fitted {
    majority: Label,
    classes: Vec<Label>,
    schema: Schema,
}

impl MajorityDummyClassifier {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Arg-max of label counts with the canonical tie rule.
pub(crate) fn majority_label<'a>(labels: impl IntoIterator<Item = &'a Label>) -> Option<Label> {
    let mut counts: BTreeMap<&Label, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_default() += 1;
    }
    let mut best: Option<(&Label, usize)> = None;
    for (label, count) in counts {
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((label, count));
        }
    }
    best.map(|(l, _)| l.clone())
}

impl FormalObject for MajorityDummyClassifier {
    fn kind(&self) -> &str {
        "MajorityDummyClassifier"
    }

    fn scitype(&self) -> &str {
        "supervised_classifier"
    }

    fn param_specs(&self) -> Vec<ParamSpec> {
        Vec::new()
    }

    fn params(&self) -> ParamMap {
        ParamMap::new()
    }

    fn tags(&self) -> TagMap {
        tabular_tags(
            "supervised_classifier",
            ANY_COLUMN,
            &[("handles_multiclass", ParamValue::from(true))],
        )
    }

    fn domain(&self) -> Domain {
        match &self.fitted {
            Some(f) => Domain::Labels(f.classes.clone()),
            None => Domain::Any("finite label set (known after fit)".into()),
        }
    }
}

impl Estimator for MajorityDummyClassifier {
    fn set_param(&mut self, name: &str, _value: &ParamValue) -> Result<()> {
        Err(Error::UnknownParameter(name.to_string()))
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn fitted_params(&self) -> Result<ParamMap> {
        let f = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        let mut state = ParamMap::new()
            .with("majority_class", f.majority.to_param())
            .with(
                "classes",
                ParamValue::List(f.classes.iter().map(Label::to_param).collect()),
            );
        f.schema.write_state(&mut state);
        Ok(state)
    }

    fn restore_fitted(&mut self, state: &ParamMap) -> Result<()> {
        let majority = Label::from_param(require(state, "majority_class")?)
            .ok_or_else(|| Error::Serialization("bad majority_class".into()))?;
        let classes = require(state, "classes")?
            .as_list()
            .and_then(|l| l.iter().map(Label::from_param).collect::<Option<Vec<_>>>())
            .ok_or_else(|| Error::Serialization("bad classes".into()))?;
        self.fitted = Some(Fitted {
            majority,
            classes,
            schema: Schema::read_state(state)?,
        });
        Ok(())
    }

    fn reset(&mut self) {
        self.fitted = None;
    }
}

impl SupervisedLearner for MajorityDummyClassifier {
    fn fit(&mut self, x: &Table, y: &LabelVector) -> Result<()> {
        check_training_pair(x, y)?;
        let labels = y.as_classes().ok_or_else(|| Error::ScitypeMismatch { column: "y".into() })?;
        let schema = Schema::fit(x, ANY_COLUMN)?;
        let majority = majority_label(labels).expect("non-empty labels");
        self.fitted = Some(Fitted {
            majority,
            classes: y.label_set(),
            schema,
        });
        Ok(())
    }

    fn predict(&self, x: &Table) -> Result<LabelVector> {
        let f = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        f.schema.check(x)?;
        Ok(LabelVector::Classes(vec![f.majority.clone(); x.n_rows()]))
    }
}
