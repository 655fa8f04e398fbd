//! Hyper-parameter, fitted-state and tag containers.
//!
//! Every formal object exposes its configuration as a [`ParamMap`]: an
//! ordered map from lower-case names to [`ParamValue`]s. Keys of the form
//! `component__param` address parameters of nested components.

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;

/// Separator between a component name and the key it owns.
pub const NESTING_SEPARATOR: &str = "__";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
    RealList(Vec<f64>),
    TextList(Vec<String>),
    List(Vec<ParamValue>),
    Map(ParamMap),
    Estimator(Box<EstimatorSpec>),
}

impl ParamValue {
    /// Numeric view; integers widen to reals.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ParamValue::Real(v) => Some(*v),
            ParamValue::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            ParamValue::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            ParamValue::Bool(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            ParamValue::Text(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_map(&self) -> Option<&ParamMap> {
        match self {
            ParamValue::Map(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[ParamValue]> {
        match self {
            ParamValue::List(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_real_list(&self) -> Option<&[f64]> {
        match self {
            ParamValue::RealList(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_text_list(&self) -> Option<&[String]> {
        match self {
            ParamValue::TextList(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_estimator(&self) -> Option<&EstimatorSpec> {
        match self {
            ParamValue::Estimator(spec) => Some(spec),
            _ => None,
        }
    }

    /// True when every real contained in the value is finite.
    pub fn is_finite(&self) -> bool {
        match self {
            ParamValue::Real(v) => v.is_finite(),
            ParamValue::RealList(v) => v.iter().all(|x| x.is_finite()),
            ParamValue::List(v) => v.iter().all(ParamValue::is_finite),
            ParamValue::Map(m) => m.values().all(ParamValue::is_finite),
            ParamValue::Estimator(spec) => spec.params.values().all(ParamValue::is_finite),
            _ => true,
        }
    }

    /// Equality that distinguishes reals by bit pattern.
    pub fn bit_eq(&self, other: &ParamValue) -> bool {
        use ParamValue::*;
        match (self, other) {
            (Real(a), Real(b)) => a.to_bits() == b.to_bits(),
            (RealList(a), RealList(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
            }
            (List(a), List(b)) => a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.bit_eq(y)),
            (Map(a), Map(b)) => a.bit_eq(b),
            (Estimator(a), Estimator(b)) => a.kind == b.kind && a.params.bit_eq(&b.params),
            (a, b) => a == b,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Real(v) => write!(f, "{v}"),
            ParamValue::Text(v) => write!(f, "{v}"),
            ParamValue::Bool(v) => write!(f, "{v}"),
            ParamValue::RealList(v) => write!(f, "{v:?}"),
            ParamValue::TextList(v) => write!(f, "{v:?}"),
            ParamValue::List(v) => {
                f.write_str("[")?;
                for (i, item) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str("]")
            }
            ParamValue::Map(m) => write!(f, "{m}"),
            ParamValue::Estimator(spec) => write!(f, "{}({})", spec.kind, spec.params),
        }
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Real(v)
    }
}

impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Text(v)
    }
}

impl From<Vec<f64>> for ParamValue {
    fn from(v: Vec<f64>) -> Self {
        ParamValue::RealList(v)
    }
}

impl From<Vec<String>> for ParamValue {
    fn from(v: Vec<String>) -> Self {
        ParamValue::TextList(v)
    }
}

impl From<ParamMap> for ParamValue {
    fn from(v: ParamMap) -> Self {
        ParamValue::Map(v)
    }
}

impl From<EstimatorSpec> for ParamValue {
    fn from(v: EstimatorSpec) -> Self {
        ParamValue::Estimator(Box::new(v))
    }
}

/// Ordered name → value map.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamMap(IndexMap<String, ParamValue>);

impl ParamMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces `name`, keeping the original position on replace.
    pub fn insert(&mut self, name: impl Into<String>, value: impl Into<ParamValue>) {
        self.0.insert(name.into(), value.into());
    }

    /// Builder-style insert.
    pub fn with(mut self, name: impl Into<String>, value: impl Into<ParamValue>) -> Self {
        self.insert(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.0.get(name)
    }

    pub fn contains_key(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn remove(&mut self, name: &str) -> Option<ParamValue> {
        self.0.shift_remove(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn values(&self) -> impl Iterator<Item = &ParamValue> {
        self.0.values()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ParamValue)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Appends every entry of `other` under `prefix__`.
    pub fn extend_prefixed(&mut self, prefix: &str, other: ParamMap) {
        for (k, v) in other.0 {
            self.0.insert(format!("{prefix}{NESTING_SEPARATOR}{k}"), v);
        }
    }

    /// Entries whose key starts with `prefix__`, with the prefix removed.
    pub fn strip_prefix(&self, prefix: &str) -> ParamMap {
        let head = format!("{prefix}{NESTING_SEPARATOR}");
        self.0
            .iter()
            .filter_map(|(k, v)| k.strip_prefix(&head).map(|rest| (rest.to_string(), v.clone())))
            .collect()
    }

    pub fn bit_eq(&self, other: &ParamMap) -> bool {
        self.len() == other.len()
            && self
                .iter()
                .zip(other.iter())
                .all(|((ka, va), (kb, vb))| ka == kb && va.bit_eq(vb))
    }
}

impl fmt::Display for ParamMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str("}")
    }
}

impl<K: Into<String>, V: Into<ParamValue>> FromIterator<(K, V)> for ParamMap {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        ParamMap(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

impl IntoIterator for ParamMap {
    type Item = (String, ParamValue);
    type IntoIter = indexmap::map::IntoIter<String, ParamValue>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// Checks the `[a-z][a-z0-9_]*` naming rule for a single (non-nested) name.
pub fn is_valid_param_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'))
        && !name.contains(NESTING_SEPARATOR)
}

/// Blueprint of an estimator: its kind plus its own (non-deep) parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub kind: String,
    #[serde(default)]
    pub params: ParamMap,
}

impl EstimatorSpec {
    pub fn new(kind: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            params: ParamMap::new(),
        }
    }

    pub fn with(mut self, name: impl Into<String>, value: impl Into<ParamValue>) -> Self {
        self.params.insert(name, value);
        self
    }
}

/// Declared hyper-parameter: name, domain and default.
#[derive(Debug, Clone)]
pub struct ParamSpec {
    pub name: String,
    pub domain: Domain,
    pub default: ParamValue,
}

impl ParamSpec {
    pub fn new(name: impl Into<String>, domain: Domain, default: impl Into<ParamValue>) -> Self {
        Self {
            name: name.into(),
            domain,
            default: default.into(),
        }
    }
}

/// Read-only traits of an object kind.
///
/// A `TagMap` has no mutating methods; a kind hands out copies, so editing
/// one never reaches the kind it came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TagMap(ParamMap);

impl TagMap {
    pub fn from_entries<K: Into<String>, V: Into<ParamValue>>(
        entries: impl IntoIterator<Item = (K, V)>,
    ) -> Self {
        TagMap(entries.into_iter().collect())
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.0.get(name)
    }

    pub fn get_bool(&self, name: &str) -> Option<bool> {
        self.get(name).and_then(ParamValue::as_bool)
    }

    pub fn get_str(&self, name: &str) -> Option<&str> {
        self.get(name).and_then(ParamValue::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ParamValue)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Returns a new map with `name` set; the receiver is untouched.
    pub fn with(&self, name: &str, value: impl Into<ParamValue>) -> TagMap {
        let mut inner = self.0.clone();
        inner.insert(name, value);
        TagMap(inner)
    }
}

impl std::ops::Index<&str> for TagMap {
    type Output = ParamValue;

    fn index(&self, name: &str) -> &ParamValue {
        self.get(name)
            .unwrap_or_else(|| panic!("no tag named `{name}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_follow_lowercase_rule() {
        assert!(is_valid_param_name("with_mean"));
        assert!(is_valid_param_name("k"));
        assert!(!is_valid_param_name("With"));
        assert!(!is_valid_param_name("_x"));
        assert!(!is_valid_param_name("a__b"));
        assert!(!is_valid_param_name(""));
    }

    #[test]
    fn prefixing_and_stripping() {
        let inner = ParamMap::new().with("mean", 1.0).with("scale", 2.0);
        let mut outer = ParamMap::new().with("own", true);
        outer.extend_prefixed("scaler", inner.clone());
        assert_eq!(
            outer.keys().collect::<Vec<_>>(),
            ["own", "scaler__mean", "scaler__scale"]
        );
        assert_eq!(outer.strip_prefix("scaler"), inner);
    }

    #[test]
    fn json_keeps_int_and_real_apart() {
        let m = ParamMap::new().with("a", 1i64).with("b", 1.0).with("c", vec![0.1, 0.2]);
        let text = serde_json::to_string(&m).unwrap();
        let back: ParamMap = serde_json::from_str(&text).unwrap();
        assert!(m.bit_eq(&back));
        assert_eq!(back.get("a"), Some(&ParamValue::Int(1)));
    }

    #[test]
    fn tag_copies_do_not_write_back() {
        let tags = TagMap::from_entries([("deterministic", true)]);
        let edited = tags.with("deterministic", false);
        assert_eq!(tags.get_bool("deterministic"), Some(true));
        assert_eq!(edited.get_bool("deterministic"), Some(false));
    }
}
