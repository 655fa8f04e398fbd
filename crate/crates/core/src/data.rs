//! Immutable data containers: tables, label vectors, time series and
//! forecasting horizons.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ParamValue;

/// A class label: numbers order before text, numbers ascending, text lexicographic.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Number(f64),
    Text(String),
}

impl Label {
    pub fn text(s: impl Into<String>) -> Self {
        Label::Text(s.into())
    }

    pub fn from_param(value: &ParamValue) -> Option<Label> {
        match value {
            ParamValue::Real(v) => Some(Label::Number(*v)),
            ParamValue::Int(v) => Some(Label::Number(*v as f64)),
            ParamValue::Text(s) => Some(Label::Text(s.clone())),
            _ => None,
        }
    }

    pub fn to_param(&self) -> ParamValue {
        match self {
            Label::Number(v) => ParamValue::Real(*v),
            Label::Text(s) => ParamValue::Text(s.clone()),
        }
    }
}

impl PartialEq for Label {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Label {}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Label::Number(a), Label::Number(b)) => a.total_cmp(b),
            (Label::Number(_), Label::Text(_)) => Ordering::Less,
            (Label::Text(_), Label::Number(_)) => Ordering::Greater,
            (Label::Text(a), Label::Text(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Number(v) => write!(f, "{v}"),
            Label::Text(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Label {
    fn from(v: i64) -> Self {
        Label::Number(v as f64)
    }
}

impl From<f64> for Label {
    fn from(v: f64) -> Self {
        Label::Number(v)
    }
}

impl From<&str> for Label {
    fn from(v: &str) -> Self {
        Label::Text(v.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnScitype {
    Numeric,
    Categorical,
}

impl ColumnScitype {
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnScitype::Numeric => "numeric",
            ColumnScitype::Categorical => "categorical",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "numeric" => Some(ColumnScitype::Numeric),
            "categorical" => Some(ColumnScitype::Categorical),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn scitype(&self) -> ColumnScitype {
        match self {
            Column::Numeric(_) => ColumnScitype::Numeric,
            Column::Categorical(_) => ColumnScitype::Categorical,
        }
    }

    pub fn as_numeric(&self) -> Option<&[f64]> {
        match self {
            Column::Numeric(v) => Some(v),
            Column::Categorical(_) => None,
        }
    }

    fn take(&self, rows: &[usize]) -> Column {
        match self {
            Column::Numeric(v) => Column::Numeric(rows.iter().map(|&i| v[i]).collect()),
            Column::Categorical(v) => Column::Categorical(rows.iter().map(|&i| v[i].clone()).collect()),
        }
    }

    pub fn bit_eq(&self, other: &Column) -> bool {
        match (self, other) {
            (Column::Numeric(a), Column::Numeric(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
            }
            (Column::Categorical(a), Column::Categorical(b)) => a == b,
            _ => false,
        }
    }
}

/// Named, column-typed table. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    names: Vec<String>,
    columns: Vec<Column>,
    n_rows: usize,
}

impl Table {
    pub fn new<S: Into<String>>(columns: Vec<(S, Column)>) -> Result<Table> {
        let mut names = Vec::with_capacity(columns.len());
        let mut cols = Vec::with_capacity(columns.len());
        let mut n_rows = None;
        for (name, col) in columns {
            let name = name.into();
            if names.contains(&name) {
                return Err(Error::InvalidData(format!("duplicate column `{name}`")));
            }
            if let Column::Numeric(v) = &col {
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidData(format!("column `{name}` holds a non-finite value")));
                }
            }
            match n_rows {
                None => n_rows = Some(col.len()),
                Some(n) if n != col.len() => {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        found: col.len(),
                    })
                }
                Some(_) => {}
            }
            names.push(name);
            cols.push(col);
        }
        Ok(Table {
            names,
            columns: cols,
            n_rows: n_rows.unwrap_or(0),
        })
    }

    /// All-numeric table from row-major values.
    pub fn from_rows(names: &[&str], rows: &[Vec<f64>]) -> Result<Table> {
        let mut cols = vec![Vec::with_capacity(rows.len()); names.len()];
        for row in rows {
            if row.len() != names.len() {
                return Err(Error::LengthMismatch {
                    expected: names.len(),
                    found: row.len(),
                });
            }
            for (c, v) in cols.iter_mut().zip(row) {
                c.push(*v);
            }
        }
        Table::new(
            names
                .iter()
                .zip(cols)
                .map(|(n, c)| (*n, Column::Numeric(c)))
                .collect(),
        )
    }

    /// A table with `n_rows` rows and no columns.
    pub fn empty_with_rows(n_rows: usize) -> Table {
        Table {
            names: Vec::new(),
            columns: Vec::new(),
            n_rows,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn scitypes(&self) -> Vec<ColumnScitype> {
        self.columns.iter().map(Column::scitype).collect()
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.names.iter().position(|n| n == name).map(|i| &self.columns[i])
    }

    pub fn numeric(&self, name: &str) -> Option<&[f64]> {
        self.column(name).and_then(Column::as_numeric)
    }

    pub fn columns(&self) -> impl Iterator<Item = (&str, &Column)> {
        self.names.iter().map(String::as_str).zip(&self.columns)
    }

    /// Rows at the given positions, in the given order.
    pub fn take_rows(&self, rows: &[usize]) -> Table {
        Table {
            names: self.names.clone(),
            columns: self.columns.iter().map(|c| c.take(rows)).collect(),
            n_rows: rows.len(),
        }
    }

    /// Columns by name, in the requested order.
    pub fn select(&self, names: &[&str]) -> Result<Table> {
        let mut out = Vec::with_capacity(names.len());
        for name in names {
            let col = self
                .column(name)
                .ok_or_else(|| Error::SchemaMismatch(format!("missing column `{name}`")))?;
            out.push((*name, col.clone()));
        }
        let mut t = Table::new(out)?;
        t.n_rows = self.n_rows;
        Ok(t)
    }

    /// Every column except `name`.
    pub fn without(&self, name: &str) -> Table {
        let keep: Vec<&str> = self
            .names
            .iter()
            .map(String::as_str)
            .filter(|n| *n != name)
            .collect();
        self.select(&keep).expect("selected columns exist")
    }

    /// Row `i` of an all-numeric table, in column order.
    pub fn numeric_row(&self, i: usize) -> Option<Vec<f64>> {
        self.columns
            .iter()
            .map(|c| c.as_numeric().map(|v| v[i]))
            .collect()
    }

    /// Structural equality comparing reals by bit pattern.
    pub fn bit_eq(&self, other: &Table) -> bool {
        self.n_rows == other.n_rows
            && self.names == other.names
            && self.columns.iter().zip(&other.columns).all(|(a, b)| a.bit_eq(b))
    }

    /// Reads CSV with a header row. Columns whose every cell parses as a
    /// finite real are numeric; all others are categorical.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Table> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::InvalidData(e.to_string()))?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        let mut raw: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
        for record in rdr.records() {
            let record = record.map_err(|e| Error::InvalidData(e.to_string()))?;
            for (col, cell) in raw.iter_mut().zip(record.iter()) {
                col.push(cell.trim().to_string());
            }
        }
        let columns = headers
            .into_iter()
            .zip(raw)
            .map(|(name, cells)| {
                let parsed: Option<Vec<f64>> = cells
                    .iter()
                    .map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite()))
                    .collect();
                let col = match parsed {
                    Some(v) if !cells.is_empty() => Column::Numeric(v),
                    _ => Column::Categorical(cells),
                };
                (name, col)
            })
            .collect();
        Table::new(columns)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Table> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::InvalidData(format!("{}: {e}", path.display())))?;
        Table::from_csv_reader(file)
    }
}

/// Targets paired with a table: class labels or reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelVector {
    Classes(Vec<Label>),
    Real(Vec<f64>),
}

impl LabelVector {
    pub fn classes<L: Into<Label>>(labels: impl IntoIterator<Item = L>) -> Self {
        LabelVector::Classes(labels.into_iter().map(Into::into).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            LabelVector::Classes(v) => v.len(),
            LabelVector::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn take(&self, rows: &[usize]) -> LabelVector {
        match self {
            LabelVector::Classes(v) => LabelVector::Classes(rows.iter().map(|&i| v[i].clone()).collect()),
            LabelVector::Real(v) => LabelVector::Real(rows.iter().map(|&i| v[i]).collect()),
        }
    }

    pub fn as_classes(&self) -> Option<&[Label]> {
        match self {
            LabelVector::Classes(v) => Some(v),
            LabelVector::Real(_) => None,
        }
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            LabelVector::Real(v) => Some(v),
            LabelVector::Classes(_) => None,
        }
    }

    /// Distinct labels in canonical order.
    pub fn label_set(&self) -> Vec<Label> {
        match self {
            LabelVector::Classes(v) => v.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect(),
            LabelVector::Real(_) => Vec::new(),
        }
    }

    pub fn bit_eq(&self, other: &LabelVector) -> bool {
        match (self, other) {
            (LabelVector::Real(a), LabelVector::Real(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
            }
            (LabelVector::Classes(a), LabelVector::Classes(b)) => {
                a.len() == b.len()
                    && a.iter().zip(b).all(|(x, y)| match (x, y) {
                        (Label::Number(p), Label::Number(q)) => p.to_bits() == q.to_bits(),
                        _ => x == y,
                    })
            }
            _ => false,
        }
    }

    /// Targets read from a table column. Class labels take the column's
    /// values as-is; real targets require a numeric column.
    pub fn from_column(column: &Column, name: &str, classes: bool) -> Result<LabelVector> {
        match (column, classes) {
            (Column::Numeric(v), true) => Ok(LabelVector::Classes(v.iter().map(|&x| Label::Number(x)).collect())),
            (Column::Categorical(v), true) => Ok(LabelVector::Classes(v.iter().map(|s| Label::text(s.as_str())).collect())),
            (Column::Numeric(v), false) => Ok(LabelVector::Real(v.clone())),
            (Column::Categorical(_), false) => Err(Error::ScitypeMismatch {
                column: name.to_string(),
            }),
        }
    }
}

/// Ordered (index, value) observations with a strictly increasing index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    index: Vec<i64>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(index: Vec<i64>, values: Vec<f64>) -> Result<TimeSeries> {
        if index.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: index.len(),
                found: values.len(),
            });
        }
        if index.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidData("time index must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("series holds a non-finite value".into()));
        }
        Ok(TimeSeries { index, values })
    }

    /// Series indexed `0, 1, …, n-1`.
    pub fn from_values(values: Vec<f64>) -> Result<TimeSeries> {
        let index = (0..values.len() as i64).collect();
        TimeSeries::new(index, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index(&self) -> &[i64] {
        &self.index
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn last_index(&self) -> Option<i64> {
        self.index.last().copied()
    }

    /// The first `n` observations.
    pub fn head(&self, n: usize) -> TimeSeries {
        TimeSeries {
            index: self.index[..n].to_vec(),
            values: self.values[..n].to_vec(),
        }
    }

    pub fn reversed(&self) -> TimeSeries {
        TimeSeries {
            index: self.index.clone(),
            values: self.values.iter().rev().copied().collect(),
        }
    }

    pub fn bit_eq(&self, other: &TimeSeries) -> bool {
        self.index == other.index
            && self.values.len() == other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| a.to_bits() == b.to_bits())
    }

    /// Series from a table: the `value_column`, indexed by an integral
    /// `index` column when one exists and by position otherwise.
    pub fn from_table(table: &Table, value_column: &str) -> Result<TimeSeries> {
        let values = table
            .numeric(value_column)
            .ok_or_else(|| Error::MissingTarget(value_column.to_string()))?
            .to_vec();
        match table.numeric("index") {
            Some(idx) if value_column != "index" => {
                if idx.iter().any(|v| v.fract() != 0.0) {
                    return Err(Error::InvalidData("index column must hold integers".into()));
                }
                TimeSeries::new(idx.iter().map(|&v| v as i64).collect(), values)
            }
            _ => TimeSeries::from_values(values),
        }
    }
}

/// Future offsets relative to the end of the training series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct ForecastingHorizon {
    offsets: Vec<u32>,
}

impl ForecastingHorizon {
    pub fn new(offsets: Vec<u32>) -> Result<Self> {
        if offsets.iter().any(|&o| o == 0) {
            return Err(Error::InvalidData("horizon offsets must be at least 1".into()));
        }
        if offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidData("horizon offsets must be strictly increasing".into()));
        }
        Ok(Self { offsets })
    }

    /// Offsets `1..=n`.
    pub fn steps(n: u32) -> Self {
        Self {
            offsets: (1..=n).collect(),
        }
    }

    pub fn offsets(&self) -> &[u32] {
        &self.offsets
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn max(&self) -> Option<u32> {
        self.offsets.last().copied()
    }
}

impl TryFrom<Vec<u32>> for ForecastingHorizon {
    type Error = Error;

    fn try_from(offsets: Vec<u32>) -> Result<Self> {
        ForecastingHorizon::new(offsets)
    }
}

impl From<ForecastingHorizon> for Vec<u32> {
    fn from(fh: ForecastingHorizon) -> Self {
        fh.offsets
    }
}
