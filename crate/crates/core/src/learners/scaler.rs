use super::common::{canonical_mean, canonical_sum, tabular_tags, Schema, NUMERIC_ONLY};
use crate::data::{Column, LabelVector, Table};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::estimator::{require, Estimator, FormalObject, Transformer};
use crate::params::{ParamMap, ParamSpec, ParamValue, TagMap};

/// Centres and scales numeric columns by their mean and population
/// standard deviation. A zero-variance column keeps scale 1, so it maps to 0.
///
/// Output columns keep the names and order of the table being transformed.
#[derive(Debug, Clone)]
pub struct StandardScaler {
    with_mean: bool,
    with_scale: bool,
    fitted: Option<Fitted>,
}

#[derive(Debug, Clone)]
struct Fitted {
    schema: Schema,
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Default for StandardScaler {
    fn default() -> Self {
        Self::new(true, true)
    }
}

impl StandardScaler {
    pub fn new(with_mean: bool, with_scale: bool) -> Self {
        Self {
            with_mean,
            with_scale,
            fitted: None,
        }
    }
}

impl FormalObject for StandardScaler {
    fn kind(&self) -> &str {
        "StandardScaler"
    }

    fn scitype(&self) -> &str {
        "transformer"
    }

    fn param_specs(&self) -> Vec<ParamSpec> {
        vec![
            ParamSpec::new("with_mean", Domain::Booleans, true),
            ParamSpec::new("with_scale", Domain::Booleans, true),
        ]
    }

    fn params(&self) -> ParamMap {
        ParamMap::new()
            .with("with_mean", self.with_mean)
            .with("with_scale", self.with_scale)
    }

    fn tags(&self) -> TagMap {
        tabular_tags("transformer", NUMERIC_ONLY, &[("output_scitype", ParamValue::from("numeric"))])
    }

    fn domain(&self) -> Domain {
        Domain::Any("tables of numeric columns named as at fit".into())
    }
}

impl Estimator for StandardScaler {
    fn set_param(&mut self, name: &str, value: &ParamValue) -> Result<()> {
        let v = value.as_bool().expect("validated");
        match name {
            "with_mean" => self.with_mean = v,
            "with_scale" => self.with_scale = v,
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
            .with("mean", f.mean.clone())
            .with("scale", f.scale.clone());
        f.schema.write_state(&mut state);
        Ok(state)
    }

    fn restore_fitted(&mut self, state: &ParamMap) -> Result<()> {
        let list = |k: &str| -> Result<Vec<f64>> {
            require(state, k)?
                .as_real_list()
                .map(<[f64]>::to_vec)
                .ok_or_else(|| Error::Serialization(format!("bad `{k}`")))
        };
        self.fitted = Some(Fitted {
            mean: list("mean")?,
            scale: list("scale")?,
            schema: Schema::read_state(state)?,
        });
        Ok(())
    }

    fn reset(&mut self) {
        self.fitted = None;
    }
}

impl Transformer for StandardScaler {
    fn fit(&mut self, x: &Table, _y: Option<&LabelVector>) -> Result<()> {
        if x.n_rows() == 0 {
            return Err(Error::EmptyTrainingSet);
        }
        let schema = Schema::fit(x, NUMERIC_ONLY)?;
        let n = x.n_rows() as f64;
        let mut mean = Vec::new();
        let mut scale = Vec::new();
        for name in schema.names() {
            let col = x.numeric(name).expect("numeric by schema");
            let m = canonical_mean(col);
            let sd = (canonical_sum(col.iter().map(|v| (v - m) * (v - m))) / n).sqrt();
            mean.push(if self.with_mean { m } else { 0.0 });
            scale.push(if self.with_scale && sd > 0.0 { sd } else { 1.0 });
        }
        self.fitted = Some(Fitted { schema, mean, scale });
        Ok(())
    }

    fn transform(&self, x: &Table) -> Result<Table> {
        let f = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        f.schema.check(x)?;
        let names = f.schema.names();
        let columns = x
            .columns()
            .map(|(name, col)| {
                let j = names.iter().position(|n| *n == name).expect("schema checked");
                let values = col
                    .as_numeric()
                    .expect("schema checked")
                    .iter()
                    .map(|v| (v - f.mean[j]) / f.scale[j])
                    .collect();
                (name, Column::Numeric(values))
            })
            .collect();
        Table::new(columns)
    }
}
