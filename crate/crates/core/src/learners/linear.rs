use super::common::{canonical_sum, check_training_pair, real_targets, tabular_tags, Schema, NUMERIC_ONLY};
use crate::data::{LabelVector, Table};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::estimator::{require, require_f64, Estimator, FormalObject, SupervisedLearner};
use crate::params::{ParamMap, ParamSpec, ParamValue, TagMap};

/// Ridge added when the normal equations are singular.
pub const RANK_DEFICIENCY_RIDGE: f64 = 1e-10;

/// Ordinary least squares with intercept, solved through the normal
/// equations. `ridge_epsilon` adds an explicit ridge penalty on the slope
/// coefficients; a singular system is retried with an extra
/// [`RANK_DEFICIENCY_RIDGE`].
#[derive(Debug, Clone, Default)]
pub struct LinearRegressor {
    ridge_epsilon: f64,
    fitted: Option<Fitted>,
}

#[derive(Debug, Clone)]
struct Fitted {
    intercept: f64,
    coef: Vec<f64>,
    schema: Schema,
}

impl LinearRegressor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_ridge(ridge_epsilon: f64) -> Self {
        Self {
            ridge_epsilon,
            fitted: None,
        }
    }

    /// `(intercept, coefficients in name-sorted column order)`.
    pub fn coefficients(&self) -> Option<(f64, &[f64])> {
        self.fitted.as_ref().map(|f| (f.intercept, f.coef.as_slice()))
    }
}

impl FormalObject for LinearRegressor {
    fn kind(&self) -> &str {
        "LinearRegressor"
    }

    fn scitype(&self) -> &str {
        "supervised_regressor"
    }

    fn param_specs(&self) -> Vec<ParamSpec> {
        vec![ParamSpec::new(
            "ridge_epsilon",
            Domain::Interval {
                low: 0.0,
                high: f64::INFINITY,
                low_closed: true,
                high_closed: false,
            },
            0.0,
        )]
    }

    fn params(&self) -> ParamMap {
        ParamMap::new().with("ridge_epsilon", self.ridge_epsilon)
    }

    fn tags(&self) -> TagMap {
        tabular_tags("supervised_regressor", NUMERIC_ONLY, &[])
    }

    fn domain(&self) -> Domain {
        Domain::Reals
    }
}

impl Estimator for LinearRegressor {
    fn set_param(&mut self, name: &str, value: &ParamValue) -> Result<()> {
        match name {
            "ridge_epsilon" => self.ridge_epsilon = value.as_f64().expect("validated"),
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
            .with("intercept", f.intercept)
            .with("coef", f.coef.clone());
        f.schema.write_state(&mut state);
        Ok(state)
    }

    fn restore_fitted(&mut self, state: &ParamMap) -> Result<()> {
        let coef = require(state, "coef")?
            .as_real_list()
            .ok_or_else(|| Error::Serialization("bad `coef`".into()))?
            .to_vec();
        self.fitted = Some(Fitted {
            intercept: require_f64(state, "intercept")?,
            coef,
            schema: Schema::read_state(state)?,
        });
        Ok(())
    }

    fn reset(&mut self) {
        self.fitted = None;
    }
}

impl SupervisedLearner for LinearRegressor {
    fn fit(&mut self, x: &Table, y: &LabelVector) -> Result<()> {
        check_training_pair(x, y)?;
        let targets = real_targets(y)?;
        let schema = Schema::fit(x, NUMERIC_ONLY)?;
        let rows = schema.numeric_rows(x);
        let p = schema.names().len() + 1;

        let design = |row: &[f64], j: usize| if j == 0 { 1.0 } else { row[j - 1] };
        let mut gram = vec![vec![0.0; p]; p];
        let mut moment = vec![0.0; p];
        for a in 0..p {
            for b in a..p {
                let s = canonical_sum(rows.iter().map(|r| design(r, a) * design(r, b)));
                gram[a][b] = s;
                gram[b][a] = s;
            }
            moment[a] = canonical_sum(rows.iter().zip(targets).map(|(r, t)| design(r, a) * t));
        }

        let solve_with = |lambda: f64, tolerance: f64| {
            let mut a = gram.clone();
            for (j, row) in a.iter_mut().enumerate().skip(1) {
                row[j] += lambda;
            }
            solve(a, moment.clone(), tolerance)
        };
        // The ridged system is positive definite, so the retry only rejects
        // exactly vanishing pivots.
        let beta = match solve_with(self.ridge_epsilon, 1e-12) {
            Some(beta) => beta,
            None => solve_with(self.ridge_epsilon + RANK_DEFICIENCY_RIDGE, 0.0)
                .ok_or_else(|| Error::InvalidData("normal equations are singular".into()))?,
        };
        self.fitted = Some(Fitted {
            intercept: beta[0],
            coef: beta[1..].to_vec(),
            schema,
        });
        Ok(())
    }

    fn predict(&self, x: &Table) -> Result<LabelVector> {
        let f = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        f.schema.check(x)?;
        let predictions = f
            .schema
            .numeric_rows(x)
            .iter()
            .map(|row| f.intercept + row.iter().zip(&f.coef).map(|(v, c)| v * c).sum::<f64>())
            .collect();
        Ok(LabelVector::Real(predictions))
    }
}

/// Gaussian elimination with partial pivoting. `None` when a pivot is at
/// most `tolerance` times the matrix scale.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, tolerance: f64) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= tolerance * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for k in col..n {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
