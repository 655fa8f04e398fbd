//! Executable domain descriptors: a textual predicate plus a membership test.

use std::fmt;

use crate::data::Label;
use crate::params::ParamValue;

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// All finite reals.
    Reals,
    /// Finite reals strictly greater than zero.
    PositiveReals,
    Interval {
        low: f64,
        high: f64,
        low_closed: bool,
        high_closed: bool,
    },
    Integers {
        min: Option<i64>,
        max: Option<i64>,
    },
    Booleans,
    /// One of a fixed set of text values.
    Choice(Vec<String>),
    /// A finite set of class labels.
    Labels(Vec<Label>),
    /// A nested estimator blueprint whose kind has the given scitype.
    Estimator { scitype: String },
    /// A structured value (map or list) described only in prose.
    Structured(String),
    /// Anything; the text says what is expected.
    Any(String),
}

impl Domain {
    pub fn open_closed(low: f64, high: f64) -> Self {
        Domain::Interval {
            low,
            high,
            low_closed: false,
            high_closed: true,
        }
    }

    pub fn at_least(min: i64) -> Self {
        Domain::Integers {
            min: Some(min),
            max: None,
        }
    }

    pub fn choice(options: &[&str]) -> Self {
        Domain::Choice(options.iter().map(|s| s.to_string()).collect())
    }

    pub fn contains(&self, value: &ParamValue) -> bool {
        match self {
            Domain::Reals => value.as_f64().is_some_and(f64::is_finite),
            Domain::PositiveReals => value.as_f64().is_some_and(|v| v.is_finite() && v > 0.0),
            Domain::Interval {
                low,
                high,
                low_closed,
                high_closed,
            } => value.as_f64().is_some_and(|v| {
                let above = if *low_closed { v >= *low } else { v > *low };
                let below = if *high_closed { v <= *high } else { v < *high };
                v.is_finite() && above && below
            }),
            Domain::Integers { min, max } => value.as_i64().is_some_and(|v| {
                min.is_none_or(|m| v >= m) && max.is_none_or(|m| v <= m)
            }),
            Domain::Booleans => value.as_bool().is_some(),
            Domain::Choice(options) => value.as_str().is_some_and(|s| options.iter().any(|o| o == s)),
            Domain::Labels(labels) => {
                Label::from_param(value).is_some_and(|l| labels.contains(&l))
            }
            Domain::Estimator { .. } => value.as_estimator().is_some(),
            Domain::Structured(_) => matches!(value, ParamValue::Map(_) | ParamValue::List(_)),
            Domain::Any(_) => true,
        }
    }

    /// Convenience for real-valued candidates.
    pub fn contains_real(&self, x: f64) -> bool {
        self.contains(&ParamValue::Real(x))
    }

    /// The label set, when this is a finite label domain.
    pub fn label_set(&self) -> Option<&[Label]> {
        match self {
            Domain::Labels(labels) => Some(labels),
            _ => None,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Reals => f.write_str("ℝ"),
            Domain::PositiveReals => f.write_str("ℝ⁺ (x > 0)"),
            Domain::Interval {
                low,
                high,
                low_closed,
                high_closed,
            } => write!(
                f,
                "{}{low}, {high}{}",
                if *low_closed { '[' } else { '(' },
                if *high_closed { ']' } else { ')' }
            ),
            Domain::Integers { min, max } => match (min, max) {
                (Some(a), Some(b)) => write!(f, "integers in [{a}, {b}]"),
                (Some(a), None) => write!(f, "integers ≥ {a}"),
                (None, Some(b)) => write!(f, "integers ≤ {b}"),
                (None, None) => f.write_str("integers"),
            },
            Domain::Booleans => f.write_str("{true, false}"),
            Domain::Choice(options) => write!(f, "one of {{{}}}", options.join(", ")),
            Domain::Labels(labels) => {
                let parts: Vec<String> = labels.iter().map(ToString::to_string).collect();
                write!(f, "labels {{{}}}", parts.join(", "))
            }
            Domain::Estimator { scitype } => write!(f, "estimator of scitype {scitype}"),
            Domain::Structured(text) | Domain::Any(text) => f.write_str(text),
        }
    }
}
