//! Shared plumbing for the tabular reference learners.

use crate::data::{ColumnScitype, LabelVector, Table};
use crate::error::{Error, Result};
use crate::params::{ParamMap, ParamValue, TagMap};

/// Sum in a canonical order so the result does not depend on row order.
pub(crate) fn canonical_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

pub(crate) fn canonical_mean(values: &[f64]) -> f64 {
    canonical_sum(values.iter().copied()) / values.len() as f64
}

/// Fit-time feature schema, kept sorted by column name. Learners match
/// prediction-time columns by name, so column order never matters.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Schema {
    columns: Vec<(String, ColumnScitype)>,
}

impl Schema {
    pub(crate) fn fit(x: &Table, allowed: &[ColumnScitype]) -> Result<Schema> {
        let mut columns: Vec<(String, ColumnScitype)> = x
            .columns()
            .map(|(name, col)| (name.to_string(), col.scitype()))
            .collect();
        if let Some((name, _)) = columns.iter().find(|(_, s)| !allowed.contains(s)) {
            return Err(Error::ScitypeMismatch { column: name.clone() });
        }
        columns.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Schema { columns })
    }

    pub(crate) fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub(crate) fn check(&self, x: &Table) -> Result<()> {
        if x.n_cols() != self.columns.len() {
            return Err(Error::SchemaMismatch(format!(
                "expected {} columns, got {}",
                self.columns.len(),
                x.n_cols()
            )));
        }
        for (name, scitype) in &self.columns {
            match x.column(name) {
                None => return Err(Error::SchemaMismatch(format!("missing column `{name}`"))),
                Some(c) if c.scitype() != *scitype => {
                    return Err(Error::SchemaMismatch(format!(
                        "column `{name}` is {}, expected {}",
                        c.scitype().as_str(),
                        scitype.as_str()
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Row-major numeric matrix in schema (name-sorted) order.
    pub(crate) fn numeric_rows(&self, x: &Table) -> Vec<Vec<f64>> {
        let cols: Vec<&[f64]> = self
            .columns
            .iter()
            .map(|(n, _)| x.numeric(n).expect("schema checked: numeric column"))
            .collect();
        (0..x.n_rows())
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect()
    }

    pub(crate) fn write_state(&self, state: &mut ParamMap) {
        state.insert(
            "feature_names",
            ParamValue::TextList(self.columns.iter().map(|(n, _)| n.clone()).collect()),
        );
        state.insert(
            "feature_scitypes",
            ParamValue::TextList(
                self.columns
                    .iter()
                    .map(|(_, s)| s.as_str().to_string())
                    .collect(),
            ),
        );
    }

    pub(crate) fn read_state(state: &ParamMap) -> Result<Schema> {
        let bad = |k: &str| Error::Serialization(format!("fitted state lacks `{k}`"));
        let names = state
            .get("feature_names")
            .and_then(ParamValue::as_text_list)
            .ok_or_else(|| bad("feature_names"))?;
        let scitypes = state
            .get("feature_scitypes")
            .and_then(ParamValue::as_text_list)
            .ok_or_else(|| bad("feature_scitypes"))?;
        if names.len() != scitypes.len() {
            return Err(Error::Serialization("schema lengths differ".into()));
        }
        let columns = names
            .iter()
            .zip(scitypes)
            .map(|(n, s)| {
                ColumnScitype::parse(s)
                    .map(|st| (n.clone(), st))
                    .ok_or_else(|| Error::Serialization(format!("unknown column scitype `{s}`")))
            })
            .collect::<Result<_>>()?;
        Ok(Schema { columns })
    }
}

pub(crate) fn check_training_pair(x: &Table, y: &LabelVector) -> Result<()> {
    if x.n_rows() == 0 || y.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if x.n_rows() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.n_rows(),
            found: y.len(),
        });
    }
    Ok(())
}

pub(crate) fn real_targets(y: &LabelVector) -> Result<&[f64]> {
    y.as_real().ok_or_else(|| Error::ScitypeMismatch { column: "y".into() })
}

pub(crate) const NUMERIC_ONLY: &[ColumnScitype] = &[ColumnScitype::Numeric];
pub(crate) const ANY_COLUMN: &[ColumnScitype] = &[ColumnScitype::Numeric, ColumnScitype::Categorical];

/// Tags shared by the tabular reference kinds.
pub(crate) fn tabular_tags(scitype: &str, features: &[ColumnScitype], extra: &[(&str, ParamValue)]) -> TagMap {
    let mut entries = vec![
        ("scitype".to_string(), ParamValue::from(scitype)),
        ("deterministic".to_string(), ParamValue::from(true)),
        ("handles_missing".to_string(), ParamValue::from(false)),
        ("capability:update".to_string(), ParamValue::from(false)),
        ("capability:row_order_invariant".to_string(), ParamValue::from(true)),
        (
            "feature_scitypes".to_string(),
            ParamValue::TextList(features.iter().map(|s| s.as_str().to_string()).collect()),
        ),
        ("composite".to_string(), ParamValue::from(false)),
    ];
    entries.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
    TagMap::from_entries(entries)
}
