use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Label, LabelVector};
use crate::error::{Error, Result};
use crate::params::{ParamValue, TagMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossFunction {
    /// (ŷ − y)²
    Squared,
    /// 1[ŷ ≠ y]
    Misclassification,
}

impl LossFunction {
    pub fn id(self) -> &'static str {
        match self {
            LossFunction::Squared => "squared",
            LossFunction::Misclassification => "misclassification",
        }
    }

    /// `"regression"` or `"classification"`.
    pub fn task(self) -> &'static str {
        match self {
            LossFunction::Squared => "regression",
            LossFunction::Misclassification => "classification",
        }
    }

    pub fn tags(self) -> TagMap {
        TagMap::from_entries([
            ("scitype", ParamValue::from("loss_function")),
            ("task", ParamValue::from(self.task())),
        ])
    }

    pub fn squared(prediction: f64, truth: f64) -> f64 {
        let d = prediction - truth;
        d * d
    }

    pub fn misclassification(prediction: &Label, truth: &Label) -> f64 {
        if prediction == truth {
            0.0
        } else {
            1.0
        }
    }

    /// Loss of one prediction against one truth, both given as parameter
    /// values (reals for squared loss, labels for misclassification).
    pub fn loss(self, prediction: &ParamValue, truth: &ParamValue) -> Result<f64> {
        match self {
            LossFunction::Squared => match (prediction, truth) {
                (ParamValue::Real(_) | ParamValue::Int(_), ParamValue::Real(_) | ParamValue::Int(_)) => {
                    Ok(Self::squared(prediction.as_f64().unwrap(), truth.as_f64().unwrap()))
                }
                _ => Err(Error::domain("prediction", prediction, "ℝ")),
            },
            LossFunction::Misclassification => {
                let p = Label::from_param(prediction);
                let t = Label::from_param(truth);
                match (p, t) {
                    (Some(p), Some(t)) if same_label_domain(&p, &t) => Ok(Self::misclassification(&p, &t)),
                    _ => Err(Error::domain("prediction", prediction, "label set of the truth")),
                }
            }
        }
    }

    /// Per-element losses.
    pub fn losses(self, predictions: &LabelVector, truth: &LabelVector) -> Result<Vec<f64>> {
        if predictions.len() != truth.len() {
            return Err(Error::LengthMismatch {
                expected: truth.len(),
                found: predictions.len(),
            });
        }
        match (self, predictions, truth) {
            (LossFunction::Squared, LabelVector::Real(p), LabelVector::Real(t)) => {
                Ok(p.iter().zip(t).map(|(a, b)| Self::squared(*a, *b)).collect())
            }
            (LossFunction::Misclassification, LabelVector::Classes(p), LabelVector::Classes(t)) => p
                .iter()
                .zip(t)
                .map(|(a, b)| {
                    if same_label_domain(a, b) {
                        Ok(Self::misclassification(a, b))
                    } else {
                        Err(Error::domain("prediction", a, "label set of the truth"))
                    }
                })
                .collect(),
            _ => Err(Error::domain(
                "predictions",
                "mismatched label domain",
                format!("{} targets", self.task()),
            )),
        }
    }

    /// Mean loss; zero-length input is an error.
    pub fn mean_loss(self, predictions: &LabelVector, truth: &LabelVector) -> Result<f64> {
        let losses = self.losses(predictions, truth)?;
        if losses.is_empty() {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        Ok(losses.iter().sum::<f64>() / losses.len() as f64)
    }
}

fn same_label_domain(a: &Label, b: &Label) -> bool {
    matches!(
        (a, b),
        (Label::Number(_), Label::Number(_)) | (Label::Text(_), Label::Text(_))
    )
}

impl fmt::Display for LossFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for LossFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squared" => Ok(LossFunction::Squared),
            "misclassification" => Ok(LossFunction::Misclassification),
            other => Err(Error::domain("loss", other, "one of {squared, misclassification}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let sq = LossFunction::Squared;
        assert_eq!(sq.loss(&3.0.into(), &1.0.into()).unwrap(), 4.0);
        let mc = LossFunction::Misclassification;
        assert_eq!(mc.loss(&"a".into(), &"a".into()).unwrap(), 0.0);
        assert_eq!(mc.loss(&"a".into(), &"b".into()).unwrap(), 1.0);
    }

    #[test]
    fn mismatched_domains_are_rejected() {
        let mc = LossFunction::Misclassification;
        assert!(matches!(mc.loss(&"a".into(), &1.0.into()), Err(Error::DomainViolation { .. })));
        let sq = LossFunction::Squared;
        assert!(matches!(sq.loss(&"a".into(), &1.0.into()), Err(Error::DomainViolation { .. })));
        let p = LabelVector::Real(vec![1.0]);
        let t = LabelVector::classes(["a"]);
        assert!(matches!(sq.losses(&p, &t), Err(Error::DomainViolation { .. })));
    }

    #[test]
    fn tags_carry_task() {
        assert_eq!(LossFunction::Squared.tags().get_str("task"), Some("regression"));
        assert_eq!(
            "misclassification".parse::<LossFunction>().unwrap(),
            LossFunction::Misclassification
        );
    }
}
