//! Deliberately broken kinds, each violating one contract.
//!
//! They wrap [`MeanRegressor`] and change exactly one behaviour, so the
//! checker should fail each on its targeted check and nowhere else.
//!
//! An input-mutating transformer cannot be written: every operation
//! receives its data as `&Table`, and the compiler rejects writes through
//! it.
//!
//! ```compile_fail
//! use scitype_core::data::Table;
//!
//! fn transform_in_place(x: &Table) {
//!     *x = Table::empty_with_rows(0);
//! }
//! ```

use crate::data::{LabelVector, Table};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::estimator::{AnyEstimator, Estimator, FormalObject, SupervisedLearner};
use crate::learners::MeanRegressor;
use crate::params::{ParamMap, ParamSpec, ParamValue, TagMap};
use crate::registry::{leaf, Registry};

/// Defect kinds and the check each must fail.
pub const DEFECTS: &[(&str, &str)] = &[
    ("BrokenFixtureKind", "not_fitted_errors"),
    ("DataInConstructorRegressor", "no_data_at_construction"),
    ("LeakyParamRegressor", "fitted_params_disjointness"),
    ("UntaggedRegressor", "tag_presence"),
];

/// Adds every defect kind to `registry`.
pub fn register_defects(registry: &mut Registry) -> Result<()> {
    registry.register_estimator(leaf(|| AnyEstimator::supervised(BrokenFixtureKind::default())), None)?;
    registry.register_estimator(leaf(|| AnyEstimator::supervised(DataInConstructorRegressor::default())), None)?;
    registry.register_estimator(leaf(|| AnyEstimator::supervised(LeakyParamRegressor::default())), None)?;
    registry.register_estimator(leaf(|| AnyEstimator::supervised(UntaggedRegressor::default())), None)?;
    Ok(())
}

/// The reference registry plus the defect kinds.
pub fn defect_registry() -> Registry {
    let mut r = Registry::reference();
    register_defects(&mut r).expect("defect names are free");
    r
}

/// Predicts zeros before it has been fitted instead of failing.
#[derive(Debug, Clone, Default)]
pub struct BrokenFixtureKind {
    inner: MeanRegressor,
}

/// Takes the name of the target column as a hyper-parameter.
#[derive(Debug, Clone)]
pub struct DataInConstructorRegressor {
    inner: MeanRegressor,
    target_column: String,
}

impl Default for DataInConstructorRegressor {
    fn default() -> Self {
        Self {
            inner: MeanRegressor::new(),
            target_column: "target".into(),
        }
    }
}

/// Repeats its hyper-parameter among its fitted parameters.
#[derive(Debug, Clone, Default)]
pub struct LeakyParamRegressor {
    inner: MeanRegressor,
    offset: f64,
}

/// Declares only its scitype tag.
#[derive(Debug, Clone, Default)]
pub struct UntaggedRegressor {
    inner: MeanRegressor,
}

macro_rules! delegate_formal {
    ($ty:ty, $kind:literal) => {
        impl FormalObject for $ty {
            fn kind(&self) -> &str {
                $kind
            }

            fn scitype(&self) -> &str {
                "supervised_regressor"
            }

            fn param_specs(&self) -> Vec<ParamSpec> {
                self.specs()
            }

            fn params(&self) -> ParamMap {
                self.own_params()
            }

            fn tags(&self) -> TagMap {
                self.own_tags()
            }

            fn domain(&self) -> Domain {
                Domain::Reals
            }
        }
    };
}

delegate_formal!(BrokenFixtureKind, "BrokenFixtureKind");
delegate_formal!(DataInConstructorRegressor, "DataInConstructorRegressor");
delegate_formal!(LeakyParamRegressor, "LeakyParamRegressor");
delegate_formal!(UntaggedRegressor, "UntaggedRegressor");

impl BrokenFixtureKind {
    fn specs(&self) -> Vec<ParamSpec> {
        Vec::new()
    }

    fn own_params(&self) -> ParamMap {
        ParamMap::new()
    }

    fn own_tags(&self) -> TagMap {
        self.inner.tags()
    }
}

impl DataInConstructorRegressor {
    fn specs(&self) -> Vec<ParamSpec> {
        vec![ParamSpec::new("target_column", Domain::Any("a column name".into()), "target")]
    }

    fn own_params(&self) -> ParamMap {
        ParamMap::new().with("target_column", self.target_column.as_str())
    }

    fn own_tags(&self) -> TagMap {
        self.inner.tags()
    }
}

impl LeakyParamRegressor {
    fn specs(&self) -> Vec<ParamSpec> {
        vec![ParamSpec::new("offset", Domain::Reals, 0.0)]
    }

    fn own_params(&self) -> ParamMap {
        ParamMap::new().with("offset", self.offset)
    }

    fn own_tags(&self) -> TagMap {
        self.inner.tags()
    }
}

impl UntaggedRegressor {
    fn specs(&self) -> Vec<ParamSpec> {
        Vec::new()
    }

    fn own_params(&self) -> ParamMap {
        ParamMap::new()
    }

    fn own_tags(&self) -> TagMap {
        TagMap::from_entries([("scitype", "supervised_regressor")])
    }
}

macro_rules! delegate_learning {
    ($ty:ty) => {
        impl SupervisedLearner for $ty {
            fn fit(&mut self, x: &Table, y: &LabelVector) -> Result<()> {
                self.inner.fit(x, y)
            }

            fn predict(&self, x: &Table) -> Result<LabelVector> {
                self.predict_impl(x)
            }
        }
    };
}

delegate_learning!(BrokenFixtureKind);
delegate_learning!(DataInConstructorRegressor);
delegate_learning!(LeakyParamRegressor);
delegate_learning!(UntaggedRegressor);

impl BrokenFixtureKind {
    fn predict_impl(&self, x: &Table) -> Result<LabelVector> {
        if !self.inner.is_fitted() {
            return Ok(LabelVector::Real(vec![0.0; x.n_rows()]));
        }
        self.inner.predict(x)
    }
}

impl DataInConstructorRegressor {
    fn predict_impl(&self, x: &Table) -> Result<LabelVector> {
        self.inner.predict(x)
    }
}

impl LeakyParamRegressor {
    fn predict_impl(&self, x: &Table) -> Result<LabelVector> {
        let base = self.inner.predict(x)?;
        Ok(LabelVector::Real(
            base.as_real().expect("regressor output").iter().map(|v| v + self.offset).collect(),
        ))
    }
}

impl UntaggedRegressor {
    fn predict_impl(&self, x: &Table) -> Result<LabelVector> {
        self.inner.predict(x)
    }
}

macro_rules! delegate_estimator {
    ($ty:ty, |$s:ident, $name:ident, $value:ident| $set:block, |$s2:ident| $state:block) => {
        impl Estimator for $ty {
            fn set_param(&mut self, $name: &str, $value: &ParamValue) -> Result<()> {
                let $s = self;
                $set
            }

            fn is_fitted(&self) -> bool {
                self.inner.is_fitted()
            }

            fn fitted_params(&self) -> Result<ParamMap> {
                let $s2 = self;
                $state
            }

            fn restore_fitted(&mut self, state: &ParamMap) -> Result<()> {
                self.inner.restore_fitted(state)
            }

            fn reset(&mut self) {
                self.inner.reset();
            }
        }
    };
}

fn no_params(name: &str) -> Result<()> {
    Err(Error::UnknownParameter(name.to_string()))
}

delegate_estimator!(
    BrokenFixtureKind,
    |_s, name, _v| { no_params(name) },
    |s| { s.inner.fitted_params() }
);
delegate_estimator!(
    DataInConstructorRegressor,
    |s, name, v| {
        match name {
            "target_column" => {
                s.target_column = v.to_string();
                Ok(())
            }
            other => no_params(other),
        }
    },
    |s| { s.inner.fitted_params() }
);
delegate_estimator!(
    LeakyParamRegressor,
    |s, name, v| {
        match name {
            "offset" => {
                s.offset = v.as_f64().expect("validated");
                Ok(())
            }
            other => no_params(other),
        }
    },
    |s| {
        let mut state = s.inner.fitted_params()?;
        state.insert("offset", s.offset);
        Ok(state)
    }
);
delegate_estimator!(
    UntaggedRegressor,
    |_s, name, _v| { no_params(name) },
    |s| { s.inner.fitted_params() }
);
