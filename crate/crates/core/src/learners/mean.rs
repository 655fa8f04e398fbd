use super::common::{canonical_mean, check_training_pair, real_targets, tabular_tags, Schema, ANY_COLUMN};
use crate::data::{LabelVector, Table};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::estimator::{require_f64, Estimator, FormalObject, SupervisedLearner};
use crate::params::{ParamMap, ParamSpec, ParamValue, TagMap};

/// Predicts the training-target mean for every row; features are ignored.
#[derive(Debug, Clone, Default)]
pub struct MeanRegressor {
    fitted: Option<(f64, Schema)>,
}

impl MeanRegressor {
    pub fn new() -> Self {
        Self::default()
    }
}

impl FormalObject for MeanRegressor {
    fn kind(&self) -> &str {
        "MeanRegressor"
    }

    fn scitype(&self) -> &str {
        "supervised_regressor"
    }

    fn param_specs(&self) -> Vec<ParamSpec> {
        Vec::new()
    }

    fn params(&self) -> ParamMap {
        ParamMap::new()
    }

    fn tags(&self) -> TagMap {
        tabular_tags("supervised_regressor", ANY_COLUMN, &[])
    }

    fn domain(&self) -> Domain {
        Domain::Reals
    }
}

impl Estimator for MeanRegressor {
    fn set_param(&mut self, name: &str, _value: &ParamValue) -> Result<()> {
        Err(Error::UnknownParameter(name.to_string()))
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn fitted_params(&self) -> Result<ParamMap> {
        let (mean, schema) = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        let mut state = ParamMap::new().with("mean", *mean);
        schema.write_state(&mut state);
        Ok(state)
    }

    fn restore_fitted(&mut self, state: &ParamMap) -> Result<()> {
        self.fitted = Some((require_f64(state, "mean")?, Schema::read_state(state)?));
        Ok(())
    }

    fn reset(&mut self) {
        self.fitted = None;
    }
}

impl SupervisedLearner for MeanRegressor {
    fn fit(&mut self, x: &Table, y: &LabelVector) -> Result<()> {
        check_training_pair(x, y)?;
        let targets = real_targets(y)?;
        let schema = Schema::fit(x, ANY_COLUMN)?;
        self.fitted = Some((canonical_mean(targets), schema));
        Ok(())
    }

    fn predict(&self, x: &Table) -> Result<LabelVector> {
        let (mean, schema) = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        schema.check(x)?;
        Ok(LabelVector::Real(vec![*mean; x.n_rows()]))
    }
}
