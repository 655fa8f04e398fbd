use rayon::prelude::*;

use super::{build_supervised, composite_tags, finish, remaining};
use crate::data::{LabelVector, Table};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::estimator::{
    apply_blueprint, blueprint, find_param_spec, restore_component, require, require_f64, set_params, AnyEstimator,
    Estimator, FormalObject, SupervisedLearner,
};
use crate::learners::common::check_training_pair;
use crate::mathobj::LossFunction;
use crate::params::{EstimatorSpec, ParamMap, ParamSpec, ParamValue, TagMap};
use crate::registry::Registry;
use crate::tasks::{cross_validate, Splitter};

/// Candidate values per parameter of the tuned estimator, in declared
/// order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamGrid {
    entries: Vec<(String, Vec<ParamValue>)>,
}

impl ParamGrid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: impl Into<String>, values: Vec<ParamValue>) -> Self {
        self.entries.push((key.into(), values));
        self
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty() || self.entries.iter().any(|(_, v)| v.is_empty())
    }

    /// Cartesian product in declared key order, the first key varying
    /// slowest and values in listed order. Empty when any key has no
    /// candidates or there are no keys.
    pub fn points(&self) -> Vec<ParamMap> {
        if self.is_empty() {
            return Vec::new();
        }
        let mut points = vec![ParamMap::new()];
        for (key, values) in &self.entries {
            points = points
                .iter()
                .flat_map(|p| values.iter().map(move |v| p.clone().with(key.as_str(), v.clone())))
                .collect();
        }
        points
    }

    pub fn to_param(&self) -> ParamValue {
        ParamValue::Map(
            self.entries
                .iter()
                .map(|(k, v)| (k.clone(), ParamValue::List(v.clone())))
                .collect(),
        )
    }

    /// Accepts a map whose values are lists (`List`, `RealList` or
    /// `TextList`).
    pub fn from_param(value: &ParamValue) -> Result<Self> {
        let map = value
            .as_map()
            .ok_or_else(|| Error::domain("grid", value, "map of parameter name to candidate list"))?;
        let entries = map
            .iter()
            .map(|(k, v)| {
                let values = match v {
                    ParamValue::List(items) => items.clone(),
                    ParamValue::RealList(items) => items.iter().map(|&x| ParamValue::Real(x)).collect(),
                    ParamValue::TextList(items) => items.iter().map(|s| ParamValue::Text(s.clone())).collect(),
                    other => return Err(Error::domain(&format!("grid.{k}"), other, "a list of candidates")),
                };
                Ok((k.to_string(), values))
            })
            .collect::<Result<_>>()?;
        Ok(ParamGrid { entries })
    }

    /// Every key must address a parameter of `e` and every candidate must
    /// lie in its domain.
    fn validate(&self, e: &dyn Estimator) -> Result<()> {
        for (key, values) in &self.entries {
            let spec = find_param_spec(e, key).ok_or_else(|| Error::UnknownParameter(key.clone()))?;
            if let Some(bad) = values.iter().find(|v| !spec.domain.contains(v)) {
                return Err(Error::domain(key, bad, &spec.domain));
            }
        }
        Ok(())
    }
}

/// Cross-validation outcome for one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub params: ParamMap,
    pub fold_losses: Vec<f64>,
    pub mean_loss: f64,
}

impl CvResult {
    fn to_param(&self) -> ParamValue {
        ParamValue::Map(
            ParamMap::new()
                .with("params", self.params.clone())
                .with("fold_losses", self.fold_losses.clone())
                .with("mean_loss", self.mean_loss),
        )
    }

    fn from_param(value: &ParamValue) -> Result<Self> {
        let bad = || Error::Serialization("bad `cv_results` entry".into());
        let map = value.as_map().ok_or_else(bad)?;
        Ok(CvResult {
            params: map.get("params").and_then(ParamValue::as_map).ok_or_else(bad)?.clone(),
            fold_losses: map
                .get("fold_losses")
                .and_then(ParamValue::as_real_list)
                .ok_or_else(bad)?
                .to_vec(),
            mean_loss: map.get("mean_loss").and_then(ParamValue::as_f64).ok_or_else(bad)?,
        })
    }
}

#[derive(Debug, Clone)]
struct TunerFit {
    best_params: ParamMap,
    best_score: f64,
    cv_results: Vec<CvResult>,
    best: Box<dyn SupervisedLearner>,
}

/// Exhaustive grid search. Fitting scores every grid point by
/// cross-validation, picks the lowest mean loss (the first such point in
/// grid order on ties) and refits that configuration on all the data.
///
/// The resampling makes the outcome depend on row order, which the tag
/// `capability:row_order_invariant = false` records.
#[derive(Debug, Clone)]
pub struct GridSearchTuner {
    estimator: Box<dyn SupervisedLearner>,
    grid: ParamGrid,
    splitter: Splitter,
    metric: LossFunction,
    fitted: Option<TunerFit>,
}

impl GridSearchTuner {
    pub fn new(
        estimator: Box<dyn SupervisedLearner>,
        grid: ParamGrid,
        splitter: Splitter,
        metric: LossFunction,
    ) -> Result<Self> {
        grid.validate(estimator.as_ref())?;
        let mut estimator = estimator;
        estimator.reset();
        Ok(GridSearchTuner {
            estimator,
            grid,
            splitter,
            metric,
            fitted: None,
        })
    }

    /// Registry constructor. Defaults to tuning `k ∈ {1, 3}` of a
    /// `NearestNeighborClassifier` by 2-fold misclassification.
    pub fn from_params(registry: &Registry, params: &ParamMap) -> Result<AnyEstimator> {
        let (estimator, grid) = match params.get("estimator") {
            Some(ParamValue::Estimator(spec)) => (
                build_supervised(registry, "estimator", spec)?,
                params.get("grid").map(ParamGrid::from_param).transpose()?.unwrap_or_default(),
            ),
            Some(other) => return Err(Error::domain("estimator", other, "estimator of scitype supervised_learner")),
            None => (
                build_supervised(registry, "estimator", &EstimatorSpec::new("NearestNeighborClassifier"))?,
                match params.get("grid") {
                    Some(g) => ParamGrid::from_param(g)?,
                    None => ParamGrid::new().with("k", vec![ParamValue::Int(1), ParamValue::Int(3)]),
                },
            ),
        };
        let splitter = match params.get("splitter") {
            Some(v) => Splitter::from_params(
                None,
                v.as_map()
                    .ok_or_else(|| Error::domain("splitter", v, "splitter map {kind, …}"))?,
            )?,
            None => Splitter::kfold(2)?,
        };
        let metric = match params.get("metric") {
            Some(v) => v
                .as_str()
                .ok_or_else(|| Error::domain("metric", v, "one of {squared, misclassification}"))?
                .parse()?,
            None => match estimator.scitype() {
                "supervised_regressor" => LossFunction::Squared,
                _ => LossFunction::Misclassification,
            },
        };
        let t = GridSearchTuner::new(estimator, grid, splitter, metric)?;
        finish(
            AnyEstimator::supervised(t),
            &remaining(params, &["grid", "splitter", "metric"]),
        )
    }

    pub fn best_params(&self) -> Option<&ParamMap> {
        self.fitted.as_ref().map(|f| &f.best_params)
    }

    pub fn best_score(&self) -> Option<f64> {
        self.fitted.as_ref().map(|f| f.best_score)
    }

    pub fn cv_results(&self) -> Option<&[CvResult]> {
        self.fitted.as_ref().map(|f| f.cv_results.as_slice())
    }

    pub fn best_estimator(&self) -> Option<&dyn SupervisedLearner> {
        self.fitted.as_ref().map(|f| f.best.as_ref())
    }

    fn configured(&self, point: &ParamMap) -> Result<Box<dyn SupervisedLearner>> {
        let mut candidate = self.estimator.clone();
        set_params(candidate.as_mut(), point)?;
        Ok(candidate)
    }
}

impl FormalObject for GridSearchTuner {
    fn kind(&self) -> &str {
        "GridSearchTuner"
    }

    fn scitype(&self) -> &str {
        self.estimator.scitype()
    }

    fn param_specs(&self) -> Vec<ParamSpec> {
        vec![
            ParamSpec::new(
                "estimator",
                Domain::Estimator {
                    scitype: "supervised_learner".into(),
                },
                blueprint(self.estimator.as_ref()),
            ),
            ParamSpec::new(
                "grid",
                Domain::Structured("map of parameter name to candidate list".into()),
                self.grid.to_param(),
            ),
            ParamSpec::new(
                "splitter",
                Domain::Structured("splitter map {kind, …}".into()),
                self.splitter.to_params(),
            ),
            ParamSpec::new(
                "metric",
                Domain::choice(&["squared", "misclassification"]),
                self.metric.id(),
            ),
        ]
    }

    fn params(&self) -> ParamMap {
        ParamMap::new()
            .with("estimator", blueprint(self.estimator.as_ref()))
            .with("grid", self.grid.to_param())
            .with("splitter", self.splitter.to_params())
            .with("metric", self.metric.id())
    }

    fn tags(&self) -> TagMap {
        let features = self.estimator.tags().get("feature_scitypes").cloned();
        composite_tags(self.scitype(), &[self.estimator.as_ref()], features)
            .with("capability:row_order_invariant", false)
    }

    fn domain(&self) -> Domain {
        match &self.fitted {
            Some(f) => f.best.domain(),
            None => self.estimator.domain(),
        }
    }
}

impl Estimator for GridSearchTuner {
    fn set_param(&mut self, name: &str, value: &ParamValue) -> Result<()> {
        match name {
            "estimator" => {
                let spec = value.as_estimator().expect("validated");
                apply_blueprint(self.estimator.as_mut(), name, spec)?;
                self.grid.validate(self.estimator.as_ref())
            }
            "grid" => {
                let grid = ParamGrid::from_param(value)?;
                grid.validate(self.estimator.as_ref())?;
                self.grid = grid;
                Ok(())
            }
            "splitter" => {
                self.splitter = Splitter::from_params(None, value.as_map().expect("validated"))?;
                Ok(())
            }
            "metric" => {
                self.metric = value.as_str().expect("validated").parse()?;
                Ok(())
            }
            other => Err(Error::UnknownParameter(other.to_string())),
        }
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn fitted_params(&self) -> Result<ParamMap> {
        let f = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        let mut state = ParamMap::new()
            .with("best_params", f.best_params.clone())
            .with("best_score", f.best_score)
            .with(
                "cv_results",
                ParamValue::List(f.cv_results.iter().map(CvResult::to_param).collect()),
            );
        state.extend_prefixed("best_estimator", f.best.fitted_params()?);
        Ok(state)
    }

    fn restore_fitted(&mut self, state: &ParamMap) -> Result<()> {
        let best_params = require(state, "best_params")?
            .as_map()
            .ok_or_else(|| Error::Serialization("bad `best_params`".into()))?
            .clone();
        let cv_results = require(state, "cv_results")?
            .as_list()
            .ok_or_else(|| Error::Serialization("bad `cv_results`".into()))?
            .iter()
            .map(CvResult::from_param)
            .collect::<Result<Vec<_>>>()?;
        let mut best = self.configured(&best_params)?;
        restore_component(best.as_mut(), "best_estimator", state)?;
        self.fitted = Some(TunerFit {
            best_params,
            best_score: require_f64(state, "best_score")?,
            cv_results,
            best,
        });
        Ok(())
    }

    fn reset(&mut self) {
        self.fitted = None;
        self.estimator.reset();
    }

    fn components(&self) -> Vec<(&str, &dyn Estimator)> {
        vec![("estimator", self.estimator.as_ref())]
    }

    fn component_mut(&mut self, name: &str) -> Option<&mut dyn Estimator> {
        (name == "estimator").then(|| self.estimator.as_mut() as &mut dyn Estimator)
    }
}

impl SupervisedLearner for GridSearchTuner {
    fn fit(&mut self, x: &Table, y: &LabelVector) -> Result<()> {
        self.fitted = None;
        check_training_pair(x, y)?;
        let points = self.grid.points();
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let splits = self.splitter.split(x.n_rows())?;
        let outcomes: Vec<Result<CvResult>> = points
            .into_par_iter()
            .map(|point| {
                let candidate = self.configured(&point)?;
                let fold_losses = cross_validate(candidate.as_ref(), x, y, &splits, self.metric)?;
                let mean_loss = fold_losses.iter().sum::<f64>() / fold_losses.len() as f64;
                Ok(CvResult {
                    params: point,
                    fold_losses,
                    mean_loss,
                })
            })
            .collect();
        let cv_results = outcomes
            .into_iter()
            .collect::<Result<Vec<_>>>()
            .map_err(Error::in_component("estimator"))?;

        let mut best_at = 0;
        for (i, r) in cv_results.iter().enumerate() {
            if r.mean_loss < cv_results[best_at].mean_loss {
                best_at = i;
            }
        }
        let best_params = cv_results[best_at].params.clone();
        let mut best = self.configured(&best_params)?;
        best.fit(x, y).map_err(Error::in_component("estimator"))?;
        self.fitted = Some(TunerFit {
            best_score: cv_results[best_at].mean_loss,
            best_params,
            cv_results,
            best,
        });
        Ok(())
    }

    fn predict(&self, x: &Table) -> Result<LabelVector> {
        let f = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        f.best.predict(x).map_err(Error::in_component("estimator"))
    }
}
