//! Flat baseline forecasters.

use crate::data::{ForecastingHorizon, TimeSeries};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::estimator::{require, require_f64, Estimator, FormalObject, Forecaster};
use crate::params::{ParamMap, ParamSpec, ParamValue, TagMap};

pub(crate) fn forecaster_tags(min_train_length: i64, extra: &[(&str, ParamValue)]) -> TagMap {
    let mut entries = vec![
        ("scitype".to_string(), ParamValue::from("forecaster")),
        ("deterministic".to_string(), ParamValue::from(true)),
        ("handles_missing".to_string(), ParamValue::from(false)),
        ("capability:update".to_string(), ParamValue::from(false)),
        ("min_train_length".to_string(), ParamValue::Int(min_train_length)),
        ("composite".to_string(), ParamValue::from(false)),
    ];
    entries.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
    TagMap::from_entries(entries)
}

/// Repeats `value` at `last_index + offset` for every offset.
pub(crate) fn flat_forecast(last_index: i64, value: f64, fh: &ForecastingHorizon) -> Result<TimeSeries> {
    if fh.is_empty() {
        return Err(Error::EmptyHorizon);
    }
    let index = fh.offsets().iter().map(|&o| last_index + o as i64).collect();
    TimeSeries::new(index, vec![value; fh.offsets().len()])
}

fn last_index_of(state: &ParamMap) -> Result<i64> {
    require(state, "last_index")?
        .as_i64()
        .ok_or_else(|| Error::Serialization("bad `last_index`".into()))
}

/// Forecasts the last observed value.
#[derive(Debug, Clone, Default)]
pub struct NaiveLastForecaster {
    fitted: Option<(f64, i64)>,
}

impl NaiveLastForecaster {
    pub fn new() -> Self {
        Self::default()
    }
}

impl FormalObject for NaiveLastForecaster {
    fn kind(&self) -> &str {
        "NaiveLastForecaster"
    }

    fn scitype(&self) -> &str {
        "forecaster"
    }

    fn param_specs(&self) -> Vec<ParamSpec> {
        Vec::new()
    }

    fn params(&self) -> ParamMap {
        ParamMap::new()
    }

    fn tags(&self) -> TagMap {
        forecaster_tags(1, &[])
    }

    fn domain(&self) -> Domain {
        Domain::Reals
    }
}

impl Estimator for NaiveLastForecaster {
    fn set_param(&mut self, name: &str, _value: &ParamValue) -> Result<()> {
        Err(Error::UnknownParameter(name.to_string()))
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn fitted_params(&self) -> Result<ParamMap> {
        let (value, index) = self.fitted.ok_or(Error::NotFitted)?;
        Ok(ParamMap::new().with("last_value", value).with("last_index", index))
    }

    fn restore_fitted(&mut self, state: &ParamMap) -> Result<()> {
        self.fitted = Some((require_f64(state, "last_value")?, last_index_of(state)?));
        Ok(())
    }

    fn reset(&mut self) {
        self.fitted = None;
    }
}

impl Forecaster for NaiveLastForecaster {
    fn fit(&mut self, y: &TimeSeries) -> Result<()> {
        let (&value, &index) = y
            .values()
            .last()
            .zip(y.index().last())
            .ok_or(Error::TooShort { needed: 1, got: 0 })?;
        self.fitted = Some((value, index));
        Ok(())
    }

    fn predict(&self, fh: &ForecastingHorizon) -> Result<TimeSeries> {
        let (value, index) = self.fitted.ok_or(Error::NotFitted)?;
        flat_forecast(index, value, fh)
    }
}

/// Simple exponential smoothing, `ℓ_t = α·y_t + (1 − α)·ℓ_{t−1}` with
/// `ℓ_1 = y_1`. Point forecasts equal the final level.
#[derive(Debug, Clone)]
pub struct SimpleExpSmoothing {
    alpha: f64,
    fitted: Option<(f64, i64)>,
}

impl Default for SimpleExpSmoothing {
    fn default() -> Self {
        Self::new(0.5)
    }
}

impl SimpleExpSmoothing {
    pub fn new(alpha: f64) -> Self {
        Self { alpha, fitted: None }
    }

    pub fn level(&self) -> Option<f64> {
        self.fitted.map(|(l, _)| l)
    }
}

impl FormalObject for SimpleExpSmoothing {
    fn kind(&self) -> &str {
        "SimpleExpSmoothing"
    }

    fn scitype(&self) -> &str {
        "forecaster"
    }

    fn param_specs(&self) -> Vec<ParamSpec> {
        vec![ParamSpec::new("alpha", Domain::open_closed(0.0, 1.0), 0.5)]
    }

    fn params(&self) -> ParamMap {
        ParamMap::new().with("alpha", self.alpha)
    }

    fn tags(&self) -> TagMap {
        forecaster_tags(1, &[])
    }

    fn domain(&self) -> Domain {
        Domain::Reals
    }
}

impl Estimator for SimpleExpSmoothing {
    fn set_param(&mut self, name: &str, value: &ParamValue) -> Result<()> {
        match name {
            "alpha" => self.alpha = value.as_f64().expect("validated"),
            other => return Err(Error::UnknownParameter(other.to_string())),
        }
        Ok(())
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn fitted_params(&self) -> Result<ParamMap> {
        let (level, index) = self.fitted.ok_or(Error::NotFitted)?;
        Ok(ParamMap::new().with("level", level).with("last_index", index))
    }

    fn restore_fitted(&mut self, state: &ParamMap) -> Result<()> {
        self.fitted = Some((require_f64(state, "level")?, last_index_of(state)?));
        Ok(())
    }

    fn reset(&mut self) {
        self.fitted = None;
    }
}

impl Forecaster for SimpleExpSmoothing {
    fn fit(&mut self, y: &TimeSeries) -> Result<()> {
        let (first, rest) = y
            .values()
            .split_first()
            .ok_or(Error::TooShort { needed: 1, got: 0 })?;
        let level = rest
            .iter()
            .fold(*first, |level, v| self.alpha * v + (1.0 - self.alpha) * level);
        self.fitted = Some((level, y.last_index().expect("non-empty")));
        Ok(())
    }

    fn predict(&self, fh: &ForecastingHorizon) -> Result<TimeSeries> {
        let (level, index) = self.fitted.ok_or(Error::NotFitted)?;
        flat_forecast(index, level, fh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(v: &[f64]) -> TimeSeries {
        TimeSeries::from_values(v.to_vec()).unwrap()
    }

    #[test]
    fn naive_repeats_last_value() {
        let mut f = NaiveLastForecaster::new();
        f.fit(&series(&[5.0, 7.0, 9.0])).unwrap();
        assert_eq!(f.fitted_params().unwrap().get("last_value"), Some(&ParamValue::Real(9.0)));
        let out = f.predict(&ForecastingHorizon::steps(3)).unwrap();
        assert_eq!(out.values(), &[9.0, 9.0, 9.0]);
        assert_eq!(out.index(), &[3, 4, 5]);
    }

    /// Recursion oracle written out independently of the fold in `fit`.
    fn ses_oracle(alpha: f64, y: &[f64]) -> f64 {
        let mut level = y[0];
        for t in 1..y.len() {
            level = alpha * y[t] + (1.0 - alpha) * level;
        }
        level
    }

    #[test]
    fn ses_two_points() {
        let mut f = SimpleExpSmoothing::new(0.5);
        f.fit(&series(&[2.0, 4.0])).unwrap();
        assert_eq!(f.level(), Some(3.0));
        assert_eq!(ses_oracle(0.5, &[2.0, 4.0]), 3.0);
        assert_eq!(f.predict(&ForecastingHorizon::steps(2)).unwrap().values(), &[3.0, 3.0]);
    }

    #[test]
    fn ses_alpha_one_is_last_observation() {
        let y = [1.0, 8.0, -3.0, 6.5];
        let mut f = SimpleExpSmoothing::new(1.0);
        f.fit(&series(&y)).unwrap();
        assert_eq!(f.level(), Some(6.5));
    }

    #[test]
    fn ses_is_order_sensitive() {
        let y = [2.0, 4.0, 7.0];
        let mut fwd = SimpleExpSmoothing::new(0.5);
        fwd.fit(&series(&y)).unwrap();
        let mut rev = SimpleExpSmoothing::new(0.5);
        rev.fit(&series(&y).reversed()).unwrap();
        assert_eq!(fwd.level(), Some(ses_oracle(0.5, &[2.0, 4.0, 7.0])));
        assert_eq!(rev.level(), Some(ses_oracle(0.5, &[7.0, 4.0, 2.0])));
        assert_ne!(fwd.level(), rev.level());
    }

    #[test]
    fn contract_errors() {
        let f = NaiveLastForecaster::new();
        assert_eq!(f.predict(&ForecastingHorizon::steps(1)), Err(Error::NotFitted));
        let mut f = NaiveLastForecaster::new();
        assert!(matches!(f.fit(&series(&[])), Err(Error::TooShort { .. })));
        f.fit(&series(&[1.0])).unwrap();
        assert_eq!(f.predict(&ForecastingHorizon::new(vec![]).unwrap()), Err(Error::EmptyHorizon));
    }
}
