use crate::data::{Column, ForecastingHorizon, Label, LabelVector, Table, TimeSeries};

/// Data a kind is exercised on.
#[derive(Debug, Clone, PartialEq)]
pub enum Fixture {
    Supervised {
        x_train: Table,
        y_train: LabelVector,
        x_test: Table,
    },
    Transformer {
        x_train: Table,
        x_test: Table,
    },
    Forecasting {
        y: TimeSeries,
        fh: ForecastingHorizon,
    },
}

pub const X1_TRAIN: [f64; 8] = [0.3, 1.1, 2.4, 3.2, 4.7, 5.5, 6.1, 7.9];
pub const X2_TRAIN: [f64; 8] = [2.5, 0.4, 1.8, 3.3, 0.9, 2.2, 4.1, 1.6];
pub const Y_CLASS: [&str; 8] = ["a", "a", "b", "a", "b", "b", "a", "b"];
pub const Y_REG: [f64; 8] = [1.2, 2.9, 3.1, 4.8, 5.0, 6.7, 7.4, 8.9];
pub const X1_TEST: [f64; 3] = [0.8, 3.9, 6.6];
pub const X2_TEST: [f64; 3] = [1.0, 2.7, 3.5];
pub const SERIES: [f64; 10] = [3.0, 5.0, 4.0, 6.0, 7.0, 6.5, 8.0, 9.0, 8.5, 10.0];

fn table(x1: &[f64], x2: &[f64]) -> Table {
    Table::new(vec![
        ("x1", Column::Numeric(x1.to_vec())),
        ("x2", Column::Numeric(x2.to_vec())),
    ])
    .expect("canonical table")
}

impl Fixture {
    /// 8 training rows over numeric columns `x1`, `x2`, with binary labels.
    pub fn classification() -> Fixture {
        Fixture::Supervised {
            x_train: table(&X1_TRAIN, &X2_TRAIN),
            y_train: LabelVector::Classes(Y_CLASS.iter().map(|&s| Label::text(s)).collect()),
            x_test: table(&X1_TEST, &X2_TEST),
        }
    }

    /// The classification features with a real target.
    pub fn regression() -> Fixture {
        Fixture::Supervised {
            x_train: table(&X1_TRAIN, &X2_TRAIN),
            y_train: LabelVector::Real(Y_REG.to_vec()),
            x_test: table(&X1_TEST, &X2_TEST),
        }
    }

    pub fn transformer() -> Fixture {
        Fixture::Transformer {
            x_train: table(&X1_TRAIN, &X2_TRAIN),
            x_test: table(&X1_TEST, &X2_TEST),
        }
    }

    /// 10 points indexed `0..10`, horizon `[1, 2, 3]`.
    pub fn forecasting() -> Fixture {
        Fixture::Forecasting {
            y: TimeSeries::from_values(SERIES.to_vec()).expect("canonical series"),
            fh: ForecastingHorizon::steps(3),
        }
    }

    /// Canonical fixture for an estimator scitype, if there is one.
    pub fn canonical(scitype: &str) -> Option<Fixture> {
        match scitype {
            "supervised_classifier" => Some(Fixture::classification()),
            "supervised_regressor" | "supervised_learner" => Some(Fixture::regression()),
            "transformer" => Some(Fixture::transformer()),
            "forecaster" => Some(Fixture::forecasting()),
            _ => None,
        }
    }

    /// The classification or regression training data as one table, the
    /// labels in column `target`.
    pub fn supervised_table(&self) -> Option<Table> {
        let Fixture::Supervised { x_train, y_train, .. } = self else {
            return None;
        };
        let target = match y_train {
            LabelVector::Real(v) => Column::Numeric(v.clone()),
            LabelVector::Classes(labels) => Column::Categorical(labels.iter().map(ToString::to_string).collect()),
        };
        let mut columns: Vec<(String, Column)> = x_train
            .columns()
            .map(|(n, c)| (n.to_string(), c.clone()))
            .collect();
        columns.push(("target".into(), target));
        Table::new(columns).ok()
    }
}
