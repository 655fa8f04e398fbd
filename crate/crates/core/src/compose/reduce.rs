use std::fmt;
use std::str::FromStr;

use super::{build_supervised, finish, remaining};
use crate::data::{Column, ForecastingHorizon, LabelVector, Table, TimeSeries};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::estimator::{
    apply_blueprint, blueprint, require, restore_component, AnyEstimator, Estimator, FormalObject, Forecaster,
    SupervisedLearner,
};
use crate::learners::forecaster_tags;
use crate::params::{EstimatorSpec, ParamMap, ParamSpec, ParamValue, TagMap};
use crate::registry::Registry;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// One one-step model, fed its own forecasts.
    Recursive,
    /// One model per offset `1..=max_horizon`.
    Direct,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Recursive => "recursive",
            Strategy::Direct => "direct",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recursive" => Ok(Strategy::Recursive),
            "direct" => Ok(Strategy::Direct),
            other => Err(Error::domain("strategy", other, "one of {recursive, direct}")),
        }
    }
}

#[derive(Debug, Clone)]
struct ReducedFit {
    models: Vec<Box<dyn SupervisedLearner>>,
    last_window: Vec<f64>,
    last_index: i64,
}

/// Forecasting by reduction to tabular regression.
///
/// The series is cut into sliding windows of `window_length` values, laid
/// out as columns `lag_w, …, lag_1` (`lag_1` the most recent), and a
/// regressor learns the value `h` steps after each window. The recursive
/// strategy fits `h = 1` and feeds forecasts back into the window; the
/// direct strategy fits one model per offset up to `max_horizon`.
#[derive(Debug, Clone)]
pub struct ReducedForecaster {
    regressor: Box<dyn SupervisedLearner>,
    window_length: usize,
    strategy: Strategy,
    max_horizon: u32,
    fitted: Option<ReducedFit>,
}

impl ReducedForecaster {
    pub fn new(regressor: Box<dyn SupervisedLearner>, window_length: usize, strategy: Strategy) -> Result<Self> {
        Self::with_max_horizon(regressor, window_length, strategy, 3)
    }

    pub fn with_max_horizon(
        mut regressor: Box<dyn SupervisedLearner>,
        window_length: usize,
        strategy: Strategy,
        max_horizon: u32,
    ) -> Result<Self> {
        if regressor.scitype() != "supervised_regressor" {
            return Err(Error::WrongScitype {
                expected: "supervised_regressor".into(),
                found: regressor.scitype().to_string(),
            });
        }
        if window_length == 0 {
            return Err(Error::domain("window_length", 0, "integers ≥ 1"));
        }
        if max_horizon == 0 {
            return Err(Error::domain("max_horizon", 0, "integers ≥ 1"));
        }
        regressor.reset();
        Ok(ReducedForecaster {
            regressor,
            window_length,
            strategy,
            max_horizon,
            fitted: None,
        })
    }

    /// Registry constructor. Defaults to a recursive `LinearRegressor` on
    /// windows of 3.
    pub fn from_params(registry: &Registry, params: &ParamMap) -> Result<AnyEstimator> {
        let spec = match params.get("regressor") {
            Some(ParamValue::Estimator(spec)) => (**spec).clone(),
            Some(other) => return Err(Error::domain("regressor", other, "estimator of scitype supervised_regressor")),
            None => EstimatorSpec::new("LinearRegressor"),
        };
        let regressor = build_supervised(registry, "regressor", &spec)?;
        let r = ReducedForecaster::new(regressor, 3, Strategy::Recursive)?;
        finish(AnyEstimator::forecaster(r), &remaining(params, &[]))
    }

    /// Shortest series `fit` accepts.
    pub fn min_train_length(&self) -> usize {
        match self.strategy {
            Strategy::Recursive => self.window_length + 1,
            Strategy::Direct => self.window_length + self.max_horizon as usize,
        }
    }

    fn lag_names(&self) -> Vec<String> {
        (1..=self.window_length).rev().map(|j| format!("lag_{j}")).collect()
    }

    /// Windows `y[t−w..t]` with targets `y[t+h−1]`, `t = w..=n−h`.
    fn reduce(&self, y: &[f64], h: usize) -> Result<(Table, LabelVector)> {
        let w = self.window_length;
        let starts = w..=y.len() - h;
        let columns = self
            .lag_names()
            .into_iter()
            .enumerate()
            .map(|(j, name)| (name, Column::Numeric(starts.clone().map(|t| y[t - w + j]).collect())))
            .collect();
        let targets = starts.map(|t| y[t + h - 1]).collect();
        Ok((Table::new(columns)?, LabelVector::Real(targets)))
    }

    fn window_row(&self, window: &[f64]) -> Result<Table> {
        Table::new(
            self.lag_names()
                .into_iter()
                .zip(window)
                .map(|(name, &v)| (name, Column::Numeric(vec![v])))
                .collect(),
        )
    }

    fn predict_one(&self, model: &dyn SupervisedLearner, window: &[f64], name: &str) -> Result<f64> {
        let out = model
            .predict(&self.window_row(window)?)
            .map_err(Error::in_component(name))?;
        out.as_real()
            .and_then(|v| v.first().copied())
            .ok_or_else(|| Error::InvalidData(format!("`{name}` did not return a real prediction")))
    }

    fn model_name(&self, h: usize) -> String {
        match self.strategy {
            Strategy::Recursive => "regressor".into(),
            Strategy::Direct => format!("offset_{h}"),
        }
    }
}

impl FormalObject for ReducedForecaster {
    fn kind(&self) -> &str {
        "ReducedForecaster"
    }

    fn scitype(&self) -> &str {
        "forecaster"
    }

    fn param_specs(&self) -> Vec<ParamSpec> {
        vec![
            ParamSpec::new(
                "regressor",
                Domain::Estimator {
                    scitype: "supervised_regressor".into(),
                },
                blueprint(self.regressor.as_ref()),
            ),
            ParamSpec::new("window_length", Domain::at_least(1), 3i64),
            ParamSpec::new("strategy", Domain::choice(&["recursive", "direct"]), "recursive"),
            ParamSpec::new("max_horizon", Domain::at_least(1), 3i64),
        ]
    }

    fn params(&self) -> ParamMap {
        ParamMap::new()
            .with("regressor", blueprint(self.regressor.as_ref()))
            .with("window_length", self.window_length as i64)
            .with("strategy", self.strategy.as_str())
            .with("max_horizon", self.max_horizon as i64)
    }

    fn tags(&self) -> TagMap {
        let deterministic = self.regressor.tags().get_bool("deterministic").unwrap_or(false);
        forecaster_tags(self.min_train_length() as i64, &[])
            .with("deterministic", deterministic)
            .with("composite", true)
    }

    fn domain(&self) -> Domain {
        Domain::Reals
    }
}

impl Estimator for ReducedForecaster {
    fn set_param(&mut self, name: &str, value: &ParamValue) -> Result<()> {
        match name {
            "regressor" => {
                let spec = value.as_estimator().expect("validated");
                return apply_blueprint(self.regressor.as_mut(), name, spec);
            }
            "window_length" => self.window_length = value.as_i64().expect("validated") as usize,
            "strategy" => self.strategy = value.as_str().expect("validated").parse()?,
            "max_horizon" => {
                self.max_horizon = u32::try_from(value.as_i64().expect("validated"))
                    .map_err(|_| Error::domain(name, value, "integers in [1, 2³²)"))?
            }
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
            .with("last_window", f.last_window.clone())
            .with("last_index", f.last_index);
        for (i, model) in f.models.iter().enumerate() {
            state.extend_prefixed(&self.model_name(i + 1), model.fitted_params()?);
        }
        Ok(state)
    }

    fn restore_fitted(&mut self, state: &ParamMap) -> Result<()> {
        let last_window = require(state, "last_window")?
            .as_real_list()
            .filter(|w| w.len() == self.window_length)
            .ok_or_else(|| Error::Serialization("bad `last_window`".into()))?
            .to_vec();
        let last_index = require(state, "last_index")?
            .as_i64()
            .ok_or_else(|| Error::Serialization("bad `last_index`".into()))?;
        let count = match self.strategy {
            Strategy::Recursive => 1,
            Strategy::Direct => self.max_horizon as usize,
        };
        let models = (1..=count)
            .map(|h| {
                let mut m = self.regressor.clone();
                restore_component(m.as_mut(), &self.model_name(h), state)?;
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        self.fitted = Some(ReducedFit {
            models,
            last_window,
            last_index,
        });
        Ok(())
    }

    fn reset(&mut self) {
        self.fitted = None;
        self.regressor.reset();
    }

    fn components(&self) -> Vec<(&str, &dyn Estimator)> {
        vec![("regressor", self.regressor.as_ref())]
    }

    fn component_mut(&mut self, name: &str) -> Option<&mut dyn Estimator> {
        (name == "regressor").then(|| self.regressor.as_mut() as &mut dyn Estimator)
    }
}

impl Forecaster for ReducedForecaster {
    fn fit(&mut self, y: &TimeSeries) -> Result<()> {
        self.fitted = None;
        let needed = self.min_train_length();
        if y.len() < needed {
            return Err(Error::TooShort { needed, got: y.len() });
        }
        let values = y.values();
        let count = match self.strategy {
            Strategy::Recursive => 1,
            Strategy::Direct => self.max_horizon as usize,
        };
        let mut models = Vec::with_capacity(count);
        for h in 1..=count {
            let (x, target) = self.reduce(values, h)?;
            let mut m = self.regressor.clone();
            m.fit(&x, &target).map_err(Error::in_component(&self.model_name(h)))?;
            models.push(m);
        }
        self.fitted = Some(ReducedFit {
            models,
            last_window: values[values.len() - self.window_length..].to_vec(),
            last_index: y.last_index().expect("non-empty"),
        });
        Ok(())
    }

    fn predict(&self, fh: &ForecastingHorizon) -> Result<TimeSeries> {
        let f = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        let max = fh.max().ok_or(Error::EmptyHorizon)?;
        let values = match self.strategy {
            Strategy::Recursive => {
                let mut window = f.last_window.clone();
                let mut path = Vec::with_capacity(max as usize);
                for _ in 0..max {
                    let next = self.predict_one(f.models[0].as_ref(), &window, "regressor")?;
                    window.remove(0);
                    window.push(next);
                    path.push(next);
                }
                fh.offsets().iter().map(|&o| path[o as usize - 1]).collect()
            }
            Strategy::Direct => {
                if max > self.max_horizon {
                    return Err(Error::HorizonNotFitted {
                        offset: max,
                        max: self.max_horizon,
                    });
                }
                fh.offsets()
                    .iter()
                    .map(|&o| {
                        let h = o as usize;
                        self.predict_one(f.models[h - 1].as_ref(), &f.last_window, &self.model_name(h))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        let index = fh.offsets().iter().map(|&o| f.last_index + o as i64).collect();
        TimeSeries::new(index, values)
    }
}
