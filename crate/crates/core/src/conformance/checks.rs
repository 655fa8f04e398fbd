use rayon::prelude::*;

use super::report::{CheckResult, ConformanceReport};
use super::Fixture;
use crate::data::{Column, ForecastingHorizon, LabelVector, Table, TimeSeries};
use crate::error::{Error, Result};
use crate::estimator::{find_param_spec, get_params, AnyEstimator, FitState};
use crate::mathobj::Distribution;
use crate::params::{ParamMap, ParamValue, TagMap, NESTING_SEPARATOR};
use crate::persist;
use crate::registry::{KindDescriptor, Registry};
use crate::tasks::{
    evaluate_forecaster, evaluate_supervised, shuffle, ForecastingTask, SupervisedTask, Splitter,
};

/// Every check id, in report order.
pub const CHECK_IDS: &[&str] = &[
    // formal objects
    "params_roundtrip",
    "unknown_param_error",
    "tag_presence",
    "scitype_registered",
    // distributions
    "cdf_monotone",
    "pdf_nonnegative",
    "pdf_normalized",
    // estimators
    "persistence_roundtrip",
    "clone_determinism",
    "not_fitted_errors",
    "fitted_params_disjointness",
    "set_params_resets_fit",
    "no_data_at_construction",
    "interface_consistency",
    "input_immutability",
    // tabular learners and transformers
    "row_permutation_invariance",
    "column_permutation_invariance",
    "schema_mismatch_error",
    "empty_training_set_error",
    // learners that are evaluated
    "evaluation_purity",
    // forecasters
    "horizon_handling",
    "output_index_monotonic",
    "too_short_error",
    "empty_horizon_error",
    // composites
    "resultant_scitype",
    "nested_param_addressing",
];

/// Parameter names that would smuggle task or data information into a
/// strategy's configuration.
const DATA_PARAM_NAMES: &[&str] = &[
    "x", "y", "data", "dataset", "table", "series", "x_train", "y_train", "x_test", "target", "features", "columns",
    "column", "index", "labels",
];

const REQUIRED_ESTIMATOR_TAGS: &[&str] = &["scitype", "deterministic", "handles_missing"];

/// Runs the full suite on a default instance of `kind`.
pub fn check_estimator(registry: &Registry, kind: &str) -> Result<ConformanceReport> {
    match registry.get(kind)? {
        KindDescriptor::Estimator(d) => {
            let fixture = d.fixture().or_else(|| Fixture::canonical(&d.scitype));
            Ok(match registry.create(kind, &ParamMap::new()) {
                Ok(e) => check_instance(registry, &e, fixture),
                Err(err) => construction_failure(kind, &d.scitype, &err),
            })
        }
        KindDescriptor::Value(d) => Ok(match registry.create_distribution(kind, &ParamMap::new()) {
            Ok(dist) => check_distribution(registry, dist.as_ref()),
            Err(err) => construction_failure(kind, &d.scitype, &err),
        }),
    }
}

/// One report per registered kind, in registration order. Kinds are
/// checked concurrently; checks within a kind run in sequence.
pub fn check_all(registry: &Registry) -> Vec<ConformanceReport> {
    let kinds: Vec<&str> = registry.kinds().map(KindDescriptor::kind_name).collect();
    kinds
        .par_iter()
        .map(|kind| check_estimator(registry, kind).expect("kind listed by the registry"))
        .collect()
}

fn construction_failure(kind: &str, scitype: &str, err: &Error) -> ConformanceReport {
    let results = CHECK_IDS
        .iter()
        .map(|id| CheckResult::fail(id, format!("default construction failed: {err}")))
        .collect();
    ConformanceReport::new(kind, scitype, results)
}

/// Runs the suite on `e`, which the checker never modifies. Without a
/// fixture, data-driven checks are skipped.
pub fn check_instance(registry: &Registry, e: &AnyEstimator, fixture: Option<Fixture>) -> ConformanceReport {
    let ctx = Ctx {
        registry,
        proto: e.clone_unfitted(),
        tags: e.tags(),
        fixture,
    };
    let results = CHECK_IDS.iter().map(|id| ctx.run(id)).collect();
    ConformanceReport::new(e.kind(), e.scitype(), results)
}

/// Runs the formal-object and distribution checks on a value object.
pub fn check_distribution(registry: &Registry, d: &dyn Distribution) -> ConformanceReport {
    let results = CHECK_IDS
        .iter()
        .map(|&id| match id {
            "params_roundtrip" => dist_params_roundtrip(registry, d),
            "unknown_param_error" => dist_unknown_param(d),
            "tag_presence" => {
                let tags = d.tags();
                match tags.get_str("scitype") {
                    Some(s) if s == d.scitype() => CheckResult::pass(id, ""),
                    Some(s) => CheckResult::fail(id, format!("tag scitype={s} but object reports {}", d.scitype())),
                    None => CheckResult::fail(id, "required tag `scitype` missing"),
                }
            }
            "scitype_registered" => match registry.scitype_of(d) {
                Ok(s) if registry.is_subtype(&s.id, "distribution") => CheckResult::pass(id, ""),
                Ok(s) => CheckResult::fail(id, format!("scitype {} is not a distribution", s.id)),
                Err(err) => CheckResult::fail(id, err.to_string()),
            },
            "cdf_monotone" => cdf_monotone(d),
            "pdf_nonnegative" => pdf_nonnegative(d),
            "pdf_normalized" => pdf_normalized(d),
            other => CheckResult::skip(other, "scitype: distribution"),
        })
        .collect();
    ConformanceReport::new(d.kind(), d.scitype(), results)
}

/// Location and scale for the numeric checks, from `mu`/`sigma` when the
/// kind has them.
fn dist_window(d: &dyn Distribution) -> (f64, f64) {
    let p = d.params();
    let mu = p.get("mu").and_then(ParamValue::as_f64).unwrap_or(0.0);
    let sigma = p.get("sigma").and_then(ParamValue::as_f64).unwrap_or(1.0);
    (mu, sigma)
}

fn dist_params_roundtrip(registry: &Registry, d: &dyn Distribution) -> CheckResult {
    const ID: &str = "params_roundtrip";
    match registry.create_distribution(d.kind(), &d.params()) {
        Ok(back) if back.params().bit_eq(&d.params()) => CheckResult::pass(ID, ""),
        Ok(back) => CheckResult::fail(ID, format!("rebuilt with {} instead of {}", back.params(), d.params())),
        Err(err) => CheckResult::fail(ID, err.to_string()),
    }
}

fn dist_unknown_param(d: &dyn Distribution) -> CheckResult {
    const ID: &str = "unknown_param_error";
    match d.with_params(&ParamMap::new().with("no_such_parameter", 1i64)) {
        Err(Error::UnknownParameter(_)) => CheckResult::pass(ID, ""),
        Err(other) => CheckResult::fail(ID, format!("expected UnknownParameter, got {other}")),
        Ok(_) => CheckResult::fail(ID, "unknown parameter was accepted"),
    }
}

fn cdf_monotone(d: &dyn Distribution) -> CheckResult {
    const ID: &str = "cdf_monotone";
    let (mu, sigma) = dist_window(d);
    let xs: Vec<f64> = (0..=400).map(|i| mu + sigma * (-10.0 + 0.05 * i as f64)).collect();
    let cdf: Vec<f64> = xs.iter().map(|&x| d.cdf(x)).collect();
    if let Some(i) = cdf.windows(2).position(|w| w[1] < w[0]) {
        return CheckResult::fail(ID, format!("cdf decreases between {} and {}", xs[i], xs[i + 1]));
    }
    if cdf.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return CheckResult::fail(ID, "cdf leaves [0, 1]");
    }
    CheckResult::pass(ID, "")
}

fn pdf_nonnegative(d: &dyn Distribution) -> CheckResult {
    const ID: &str = "pdf_nonnegative";
    let (mu, sigma) = dist_window(d);
    match (0..=400)
        .map(|i| mu + sigma * (-10.0 + 0.05 * i as f64))
        .find(|&x| !(d.pdf(x) >= 0.0))
    {
        Some(x) => CheckResult::fail(ID, format!("pdf({x}) = {}", d.pdf(x))),
        None => CheckResult::pass(ID, ""),
    }
}

fn pdf_normalized(d: &dyn Distribution) -> CheckResult {
    const ID: &str = "pdf_normalized";
    let (mu, sigma) = dist_window(d);
    let (a, b, n) = (mu - 12.0 * sigma, mu + 12.0 * sigma, 20_000);
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| d.pdf(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    let integral = h / 3.0 * (d.pdf(a) + inner + d.pdf(b));
    if (integral - 1.0).abs() <= 1e-6 {
        CheckResult::pass(ID, format!("integral {integral}"))
    } else {
        CheckResult::fail(ID, format!("pdf integrates to {integral}"))
    }
}

/// What an estimator produces on the fixture's test input.
#[derive(Debug, Clone)]
enum Output {
    Labels(LabelVector),
    Table(Table),
    Series(TimeSeries),
}

impl Output {
    fn bit_eq(&self, other: &Output) -> bool {
        match (self, other) {
            (Output::Labels(a), Output::Labels(b)) => a.bit_eq(b),
            (Output::Table(a), Output::Table(b)) => tables_equal_by_name(a, b),
            (Output::Series(a), Output::Series(b)) => a.bit_eq(b),
            _ => false,
        }
    }

    fn len(&self) -> usize {
        match self {
            Output::Labels(v) => v.len(),
            Output::Table(t) => t.n_rows(),
            Output::Series(s) => s.len(),
        }
    }
}

/// Same columns by name and bit-identical contents, whatever the order.
fn tables_equal_by_name(a: &Table, b: &Table) -> bool {
    a.n_rows() == b.n_rows()
        && a.n_cols() == b.n_cols()
        && a.columns()
            .all(|(name, col)| b.column(name).is_some_and(|other| col.bit_eq(other)))
}

fn fixture_bit_eq(a: &Fixture, b: &Fixture) -> bool {
    match (a, b) {
        (
            Fixture::Supervised { x_train, y_train, x_test },
            Fixture::Supervised {
                x_train: x2,
                y_train: y2,
                x_test: t2,
            },
        ) => x_train.bit_eq(x2) && y_train.bit_eq(y2) && x_test.bit_eq(t2),
        (Fixture::Transformer { x_train, x_test }, Fixture::Transformer { x_train: x2, x_test: t2 }) => {
            x_train.bit_eq(x2) && x_test.bit_eq(t2)
        }
        (Fixture::Forecasting { y, fh }, Fixture::Forecasting { y: y2, fh: fh2 }) => y.bit_eq(y2) && fh == fh2,
        _ => false,
    }
}

fn mismatch(e: &AnyEstimator, f: &Fixture) -> Error {
    let data = match f {
        Fixture::Supervised { .. } => "supervised",
        Fixture::Transformer { .. } => "transformer",
        Fixture::Forecasting { .. } => "forecasting",
    };
    Error::WrongScitype {
        expected: format!("an estimator for {data} fixtures"),
        found: e.scitype().to_string(),
    }
}

fn fit_on(e: &mut AnyEstimator, f: &Fixture) -> Result<()> {
    match (e, f) {
        (AnyEstimator::Supervised(m), Fixture::Supervised { x_train, y_train, .. }) => m.fit(x_train, y_train),
        (AnyEstimator::Transformer(m), Fixture::Transformer { x_train, .. }) => m.fit(x_train, None),
        (AnyEstimator::Forecaster(m), Fixture::Forecasting { y, .. }) => m.fit(y),
        (e, f) => Err(mismatch(e, f)),
    }
}

fn output_on(e: &AnyEstimator, f: &Fixture) -> Result<Output> {
    match (e, f) {
        (AnyEstimator::Supervised(m), Fixture::Supervised { x_test, .. }) => m.predict(x_test).map(Output::Labels),
        (AnyEstimator::Transformer(m), Fixture::Transformer { x_test, .. }) => m.transform(x_test).map(Output::Table),
        (AnyEstimator::Forecaster(m), Fixture::Forecasting { fh, .. }) => m.predict(fh).map(Output::Series),
        (e, f) => Err(mismatch(e, f)),
    }
}

fn map_tables(f: &Fixture, op: impl Fn(&Table) -> Table) -> Fixture {
    match f {
        Fixture::Supervised { x_train, y_train, x_test } => Fixture::Supervised {
            x_train: op(x_train),
            y_train: y_train.clone(),
            x_test: op(x_test),
        },
        Fixture::Transformer { x_train, x_test } => Fixture::Transformer {
            x_train: op(x_train),
            x_test: op(x_test),
        },
        other => other.clone(),
    }
}

fn permute_training_rows(f: &Fixture, order: &[usize]) -> Fixture {
    match f {
        Fixture::Supervised { x_train, y_train, x_test } => Fixture::Supervised {
            x_train: x_train.take_rows(order),
            y_train: y_train.take(order),
            x_test: x_test.clone(),
        },
        Fixture::Transformer { x_train, x_test } => Fixture::Transformer {
            x_train: x_train.take_rows(order),
            x_test: x_test.clone(),
        },
        other => other.clone(),
    }
}

fn training_rows(f: &Fixture) -> usize {
    match f {
        Fixture::Supervised { x_train, .. } | Fixture::Transformer { x_train, .. } => x_train.n_rows(),
        Fixture::Forecasting { y, .. } => y.len(),
    }
}

fn rename_first_column(t: &Table) -> Table {
    let columns: Vec<(String, Column)> = t
        .columns()
        .enumerate()
        .map(|(i, (n, c))| (if i == 0 { "renamed_column".to_string() } else { n.to_string() }, c.clone()))
        .collect();
    Table::new(columns).expect("renaming keeps a valid table")
}

fn drop_last_column(t: &Table) -> Table {
    let keep: Vec<&str> = t.names()[..t.n_cols() - 1].iter().map(String::as_str).collect();
    t.select(&keep).expect("existing columns")
}

struct Ctx<'a> {
    registry: &'a Registry,
    proto: AnyEstimator,
    tags: TagMap,
    fixture: Option<Fixture>,
}

/// Snapshot compared around evaluation.
#[derive(Debug, PartialEq)]
struct Observable {
    params: ParamMap,
    tags: TagMap,
    state: FitState,
}

impl Observable {
    fn of(e: &AnyEstimator) -> Self {
        Observable {
            params: e.get_params(true),
            tags: e.tags(),
            state: e.fit_state(),
        }
    }

    fn bit_eq(&self, other: &Observable) -> bool {
        self.params.bit_eq(&other.params)
            && self.tags == other.tags
            && self.state.status == other.state.status
            && self.state.fitted_params.bit_eq(&other.state.fitted_params)
    }
}

type Outcome = std::result::Result<String, String>;

fn fail_on<E: std::fmt::Display>(what: &str) -> impl Fn(E) -> String + '_ {
    move |err| format!("{what}: {err}")
}

impl Ctx<'_> {
    fn scitype(&self) -> &str {
        self.proto.scitype()
    }

    fn tag_bool(&self, tag: &str) -> Option<bool> {
        self.tags.get_bool(tag)
    }

    fn is_tabular(&self) -> bool {
        matches!(self.proto, AnyEstimator::Supervised(_) | AnyEstimator::Transformer(_))
    }

    fn is_forecaster(&self) -> bool {
        matches!(self.proto, AnyEstimator::Forecaster(_))
    }

    fn scitype_skip(&self) -> String {
        format!("scitype: {}", self.scitype())
    }

    fn fixture(&self) -> std::result::Result<&Fixture, String> {
        self.fixture.as_ref().ok_or_else(|| "no fixture".to_string())
    }

    fn fitted(&self, f: &Fixture) -> std::result::Result<AnyEstimator, String> {
        let mut e = self.proto.clone_unfitted();
        fit_on(&mut e, f).map_err(fail_on("fit on fixture"))?;
        Ok(e)
    }

    fn fit_output(&self, f: &Fixture) -> std::result::Result<Output, String> {
        let e = self.fitted(f)?;
        output_on(&e, f).map_err(fail_on("output on fixture"))
    }

    fn run(&self, id: &str) -> CheckResult {
        if let Some(reason) = self.skip_reason(id) {
            return CheckResult::skip(id, reason);
        }
        if self.fixture.is_none() && self.needs_fixture(id) {
            return CheckResult::skip(id, "no fixture");
        }
        let outcome = match id {
            "params_roundtrip" => self.params_roundtrip(),
            "unknown_param_error" => self.unknown_param_error(),
            "tag_presence" => self.tag_presence(),
            "scitype_registered" => self.scitype_registered(),
            "persistence_roundtrip" => self.persistence_roundtrip(),
            "clone_determinism" => self.clone_determinism(),
            "not_fitted_errors" => self.not_fitted_errors(),
            "fitted_params_disjointness" => self.fitted_params_disjointness(),
            "set_params_resets_fit" => self.set_params_resets_fit(),
            "no_data_at_construction" => self.no_data_at_construction(),
            "interface_consistency" => self.interface_consistency(),
            "input_immutability" => self.input_immutability(),
            "row_permutation_invariance" => self.row_permutation_invariance(),
            "column_permutation_invariance" => self.column_permutation_invariance(),
            "schema_mismatch_error" => self.schema_mismatch_error(),
            "empty_training_set_error" => self.empty_training_set_error(),
            "evaluation_purity" => self.evaluation_purity(),
            "horizon_handling" => self.horizon_handling(),
            "output_index_monotonic" => self.output_index_monotonic(),
            "too_short_error" => self.too_short_error(),
            "empty_horizon_error" => self.empty_horizon_error(),
            "resultant_scitype" => self.resultant_scitype(),
            "nested_param_addressing" => self.nested_param_addressing(),
            other => Err(format!("unknown check `{other}`")),
        };
        match outcome {
            Ok(detail) => CheckResult::pass(id, detail),
            Err(detail) => CheckResult::fail(id, detail),
        }
    }

    fn skip_reason(&self, id: &str) -> Option<String> {
        match id {
            "cdf_monotone" | "pdf_nonnegative" | "pdf_normalized" => Some(self.scitype_skip()),
            "row_permutation_invariance" | "column_permutation_invariance" => {
                if !self.is_tabular() {
                    Some(self.scitype_skip())
                } else if self.tag_bool("deterministic") != Some(true) {
                    Some("tag: deterministic=false".into())
                } else if id == "row_permutation_invariance"
                    && self.tag_bool("capability:row_order_invariant") == Some(false)
                {
                    Some("tag: capability:row_order_invariant=false".into())
                } else {
                    None
                }
            }
            "schema_mismatch_error" | "empty_training_set_error" if !self.is_tabular() => Some(self.scitype_skip()),
            "evaluation_purity" if matches!(self.proto, AnyEstimator::Transformer(_)) => Some(self.scitype_skip()),
            "horizon_handling" | "output_index_monotonic" | "too_short_error" | "empty_horizon_error"
                if !self.is_forecaster() =>
            {
                Some(self.scitype_skip())
            }
            "too_short_error" if self.tags.get("min_train_length").and_then(ParamValue::as_i64).is_none() => {
                Some("tag: min_train_length absent".into())
            }
            "clone_determinism" if self.tag_bool("deterministic") != Some(true) => {
                Some("tag: deterministic=false".into())
            }
            "resultant_scitype" | "nested_param_addressing" if self.tag_bool("composite") != Some(true) => {
                Some("tag: composite=false".into())
            }
            _ => None,
        }
    }

    fn needs_fixture(&self, id: &str) -> bool {
        !matches!(
            id,
            "params_roundtrip"
                | "unknown_param_error"
                | "tag_presence"
                | "scitype_registered"
                | "no_data_at_construction"
                | "nested_param_addressing"
        )
    }

    fn params_roundtrip(&self) -> Outcome {
        let deep = self.proto.get_params(true);
        let rebuilt = self
            .registry
            .create(self.proto.kind(), &self.proto.get_params(false))
            .map_err(fail_on("rebuilding from get_params(deep=false)"))?;
        if !rebuilt.get_params(true).bit_eq(&deep) {
            return Err(format!("rebuilt instance has params {}", rebuilt.get_params(true)));
        }
        let mut copy = self.proto.clone();
        copy.set_params(&deep).map_err(fail_on("set_params(get_params(deep=true))"))?;
        if !copy.get_params(true).bit_eq(&deep) {
            return Err(format!("set_params changed params to {}", copy.get_params(true)));
        }
        Ok(format!("{} keys", deep.len()))
    }

    fn unknown_param_error(&self) -> Outcome {
        let before = self.proto.get_params(true);
        for key in ["no_such_parameter", "no_such_component__no_such_parameter"] {
            let mut copy = self.proto.clone();
            match copy.set_params(&ParamMap::new().with(key, 1i64)) {
                Err(err) if matches!(err.root(), Error::UnknownParameter(_)) => {}
                Err(err) => return Err(format!("`{key}`: expected UnknownParameter, got {err}")),
                Ok(()) => return Err(format!("`{key}` was accepted")),
            }
            if !copy.get_params(true).bit_eq(&before) {
                return Err(format!("failed set_params on `{key}` still changed parameters"));
            }
        }
        Ok(String::new())
    }

    fn tag_presence(&self) -> Outcome {
        let missing: Vec<&str> = REQUIRED_ESTIMATOR_TAGS
            .iter()
            .copied()
            .filter(|t| self.tags.get(t).is_none())
            .collect();
        if !missing.is_empty() {
            return Err(format!("required tags missing: {}", missing.join(", ")));
        }
        if self.tags.get_str("scitype") != Some(self.scitype()) {
            return Err(format!("tag scitype={} but object reports {}", self.tags["scitype"], self.scitype()));
        }
        for t in ["deterministic", "handles_missing"] {
            if self.tag_bool(t).is_none() {
                return Err(format!("tag `{t}` is not boolean"));
            }
        }
        let mut optional = vec!["capability:update", "composite"];
        if self.is_tabular() {
            optional.extend(["capability:row_order_invariant", "feature_scitypes"]);
        }
        if self.is_forecaster() {
            optional.push("min_train_length");
        }
        let absent: Vec<&str> = optional.into_iter().filter(|t| self.tags.get(t).is_none()).collect();
        if absent.is_empty() {
            Ok(String::new())
        } else {
            Ok(format!("warning: optional tags missing: {}", absent.join(", ")))
        }
    }

    fn scitype_registered(&self) -> Outcome {
        let s = self
            .registry
            .scitype_of(self.proto.as_estimator())
            .map_err(|e| e.to_string())?;
        let family = match self.proto {
            AnyEstimator::Supervised(_) => "supervised_learner",
            AnyEstimator::Transformer(_) => "transformer",
            AnyEstimator::Forecaster(_) => "forecaster",
        };
        if !self.registry.is_subtype(&s.id, family) {
            return Err(format!("scitype {} does not descend from {family}, the interface it implements", s.id));
        }
        Ok(s.id.clone())
    }

    fn persistence_roundtrip(&self) -> Outcome {
        let f = self.fixture()?;
        let blank = persist::from_json(self.registry, &persist::to_json(&self.proto).map_err(|e| e.to_string())?)
            .map_err(fail_on("loading unfitted"))?;
        if blank.is_fitted() || !blank.get_params(true).bit_eq(&self.proto.get_params(true)) {
            return Err("unfitted round trip changed status or params".into());
        }
        let e = self.fitted(f)?;
        let text = persist::to_json(&e).map_err(fail_on("saving"))?;
        let back = persist::from_json(self.registry, &text).map_err(fail_on("loading"))?;
        if back.kind() != e.kind() || !back.get_params(true).bit_eq(&e.get_params(true)) {
            return Err("kind or params differ after load".into());
        }
        if !Observable::of(&back).bit_eq(&Observable::of(&e)) {
            return Err("status, tags or fitted params differ after load".into());
        }
        let a = output_on(&e, f).map_err(fail_on("output before save"))?;
        let b = output_on(&back, f).map_err(fail_on("output after load"))?;
        if !a.bit_eq(&b) {
            return Err("outputs differ after load".into());
        }
        Ok(String::new())
    }

    fn clone_determinism(&self) -> Outcome {
        let f = self.fixture()?;
        let a = self.fitted(f)?;
        let b = self.fitted(f)?;
        let state = |e: &AnyEstimator| e.get_fitted_params().map_err(|e| e.to_string());
        if !state(&a)?.bit_eq(&state(&b)?) {
            return Err("two clones fitted on the same data hold different state".into());
        }
        let oa = output_on(&a, f).map_err(|e| e.to_string())?;
        let ob = output_on(&b, f).map_err(|e| e.to_string())?;
        if !oa.bit_eq(&ob) {
            return Err("two clones fitted on the same data disagree".into());
        }
        let mut again = a.clone();
        fit_on(&mut again, f).map_err(fail_on("refit"))?;
        if !output_on(&again, f).map_err(|e| e.to_string())?.bit_eq(&oa) {
            return Err("refitting changed the outputs".into());
        }
        Ok(String::new())
    }

    fn not_fitted_errors(&self) -> Outcome {
        let f = self.fixture()?;
        let fresh = self.proto.clone_unfitted();
        if fresh.is_fitted() {
            return Err("fresh clone reports fitted".into());
        }
        match fresh.get_fitted_params() {
            Err(Error::NotFitted) => {}
            Err(other) => return Err(format!("get_fitted_params: expected NotFitted, got {other}")),
            Ok(_) => return Err("get_fitted_params succeeded before fit".into()),
        }
        match output_on(&fresh, f) {
            Err(err) if matches!(err.root(), Error::NotFitted) => Ok(String::new()),
            Err(err) => Err(format!("expected NotFitted, got {err}")),
            Ok(_) => Err("produced output before fit".into()),
        }
    }

    fn fitted_params_disjointness(&self) -> Outcome {
        let e = self.fitted(self.fixture()?)?;
        let state = e.get_fitted_params().map_err(|e| e.to_string())?;
        let params = e.get_params(true);
        let shared: Vec<&str> = state.keys().filter(|k| params.contains_key(k)).collect();
        if shared.is_empty() {
            Ok(String::new())
        } else {
            Err(format!("keys both params and fitted params: {}", shared.join(", ")))
        }
    }

    fn set_params_resets_fit(&self) -> Outcome {
        let mut e = self.fitted(self.fixture()?)?;
        let own = e.get_params(false);
        e.set_params(&own).map_err(fail_on("set_params"))?;
        if e.is_fitted() || e.get_fitted_params() != Err(Error::NotFitted) {
            return Err("still fitted after set_params".into());
        }
        Ok(String::new())
    }

    fn no_data_at_construction(&self) -> Outcome {
        let params = self.proto.get_params(true);
        let column_names: Vec<String> = match &self.fixture {
            Some(Fixture::Supervised { x_train, .. }) | Some(Fixture::Transformer { x_train, .. }) => {
                x_train.names().to_vec()
            }
            _ => Vec::new(),
        };
        for (key, value) in params.iter() {
            let leaf = key.rsplit(NESTING_SEPARATOR).next().unwrap_or(key);
            let data_like = DATA_PARAM_NAMES.contains(&leaf)
                || leaf.ends_with("_column")
                || leaf.ends_with("_columns")
                || leaf.starts_with("target_");
            if data_like {
                return Err(format!("parameter `{key}` carries task or data information"));
            }
            let names_a_column = match value {
                ParamValue::Text(s) => column_names.contains(s),
                ParamValue::TextList(v) => v.iter().any(|s| column_names.contains(s)),
                _ => false,
            };
            if names_a_column {
                return Err(format!("parameter `{key}` names a data column"));
            }
        }
        Ok(String::new())
    }

    fn interface_consistency(&self) -> Outcome {
        let f = self.fixture()?;
        let mut e = self.fitted(f)?;
        let out = output_on(&e, f).map_err(fail_on("output"))?;
        let expected = match f {
            Fixture::Supervised { x_test, .. } | Fixture::Transformer { x_test, .. } => x_test.n_rows(),
            Fixture::Forecasting { fh, .. } => fh.offsets().len(),
        };
        if out.len() != expected {
            return Err(format!("output has {} entries for {expected} inputs", out.len()));
        }
        if let (AnyEstimator::Transformer(t), Fixture::Transformer { x_train, .. }) = (&e, f) {
            let mut separate = t.clone();
            let mut combined = t.clone();
            separate.reset();
            combined.reset();
            separate.fit(x_train, None).map_err(|e| e.to_string())?;
            let a = separate.transform(x_train).map_err(|e| e.to_string())?;
            let b = combined.fit_transform(x_train, None).map_err(|e| e.to_string())?;
            if !a.bit_eq(&b) {
                return Err("fit_transform differs from fit then transform".into());
            }
        }
        let update = match (&mut e, f) {
            (AnyEstimator::Supervised(m), Fixture::Supervised { x_train, y_train, .. }) => m.update(x_train, y_train),
            (AnyEstimator::Forecaster(m), Fixture::Forecasting { y, .. }) => m.update(y),
            _ => return Ok(String::new()),
        };
        match (self.tag_bool("capability:update").unwrap_or(false), update) {
            (false, Err(err)) if matches!(err.root(), Error::Unsupported(_)) => Ok(String::new()),
            (false, other) => Err(format!("capability:update=false but update gave {other:?}")),
            (true, Ok(())) => Ok(String::new()),
            (true, Err(err)) => Err(format!("capability:update=true but update failed: {err}")),
        }
    }

    fn input_immutability(&self) -> Outcome {
        let pristine = self.fixture()?;
        let working = pristine.clone();
        let mut e = self.proto.clone_unfitted();
        fit_on(&mut e, &working).map_err(fail_on("fit"))?;
        output_on(&e, &working).map_err(fail_on("output"))?;
        if let (AnyEstimator::Transformer(t), Fixture::Transformer { x_train, .. }) = (&mut e, &working) {
            t.fit_transform(x_train, None).map_err(fail_on("fit_transform"))?;
        }
        if fixture_bit_eq(pristine, &working) {
            Ok(String::new())
        } else {
            Err("inputs changed during fit or predict".into())
        }
    }

    fn row_permutation_invariance(&self) -> Outcome {
        let f = self.fixture()?;
        let base = self.fit_output(f)?;
        let n = training_rows(f);
        let mut orders = vec![(0..n).rev().collect::<Vec<_>>()];
        for seed in 1..=3 {
            let mut order: Vec<usize> = (0..n).collect();
            shuffle(&mut order, seed);
            orders.push(order);
        }
        for order in &orders {
            let out = self.fit_output(&permute_training_rows(f, order))?;
            if !out.bit_eq(&base) {
                return Err(format!("outputs change when training rows are ordered {order:?}"));
            }
        }
        Ok(format!("{} permutations", orders.len()))
    }

    fn column_permutation_invariance(&self) -> Outcome {
        let f = self.fixture()?;
        let base = self.fit_output(f)?;
        let reversed = map_tables(f, |t| {
            let names: Vec<&str> = t.names().iter().rev().map(String::as_str).collect();
            t.select(&names).expect("existing columns")
        });
        if self.fit_output(&reversed)?.bit_eq(&base) {
            Ok(String::new())
        } else {
            Err("outputs change when columns are reordered".into())
        }
    }

    fn schema_mismatch_error(&self) -> Outcome {
        let f = self.fixture()?;
        let e = self.fitted(f)?;
        let mut variants = vec![("renamed column", map_tables(f, rename_first_column))];
        if let Fixture::Supervised { x_test, .. } | Fixture::Transformer { x_test, .. } = f {
            if x_test.n_cols() > 1 {
                variants.push(("dropped column", map_tables(f, drop_last_column)));
            }
        }
        for (what, bad) in variants {
            match output_on(&e, &bad) {
                Err(err) if matches!(err.root(), Error::SchemaMismatch(_)) => {}
                Err(err) => return Err(format!("{what}: expected SchemaMismatch, got {err}")),
                Ok(_) => return Err(format!("{what}: accepted")),
            }
        }
        Ok(String::new())
    }

    fn empty_training_set_error(&self) -> Outcome {
        let f = self.fixture()?;
        let empty = permute_training_rows(f, &[]);
        let mut e = self.proto.clone_unfitted();
        match fit_on(&mut e, &empty) {
            Err(err) if matches!(err.root(), Error::EmptyTrainingSet) => Ok(String::new()),
            Err(err) => Err(format!("expected EmptyTrainingSet, got {err}")),
            Ok(()) => Err("fit on zero rows succeeded".into()),
        }
    }

    fn evaluation_purity(&self) -> Outcome {
        let f = self.fixture()?;
        let evaluate = |e: &AnyEstimator| -> Result<()> {
            match f {
                Fixture::Supervised { y_train, .. } => {
                    let data = f.supervised_table().ok_or_else(|| Error::InvalidData("fixture table".into()))?;
                    let task = match y_train {
                        LabelVector::Classes(_) => SupervisedTask::classification("target"),
                        LabelVector::Real(_) => SupervisedTask::regression("target"),
                    };
                    evaluate_supervised(e, &task, &data, &Splitter::kfold(4)?).map(|_| ())
                }
                Fixture::Forecasting { y, fh } => {
                    evaluate_forecaster(e, &ForecastingTask::new(fh.clone())?, y, 0.7).map(|_| ())
                }
                Fixture::Transformer { .. } => Ok(()),
            }
        };
        for e in [self.proto.clone_unfitted(), self.fitted(f)?] {
            let before = Observable::of(&e);
            evaluate(&e).map_err(fail_on("evaluation"))?;
            if !Observable::of(&e).bit_eq(&before) {
                return Err("evaluation changed the estimator's params, tags or state".into());
            }
        }
        Ok(String::new())
    }

    fn forecaster_data(&self) -> std::result::Result<(&TimeSeries, &ForecastingHorizon), String> {
        match self.fixture()? {
            Fixture::Forecasting { y, fh } => Ok((y, fh)),
            _ => Err("fixture is not a forecasting fixture".into()),
        }
    }

    fn horizon_handling(&self) -> Outcome {
        let f = self.fixture()?;
        let (y, fh) = self.forecaster_data()?;
        let e = self.fitted(f)?;
        let m = e.as_forecaster().expect("forecaster");
        let full = m.predict(fh).map_err(fail_on("predict"))?;
        if full.len() != fh.offsets().len() {
            return Err(format!("{} forecasts for {} offsets", full.len(), fh.offsets().len()));
        }
        let last = y.last_index().ok_or("empty fixture series")?;
        let expected_index: Vec<i64> = fh.offsets().iter().map(|&o| last + o as i64).collect();
        if full.index() != expected_index.as_slice() {
            return Err(format!("index {:?}, expected {expected_index:?}", full.index()));
        }
        for (pos, &o) in fh.offsets().iter().enumerate() {
            let single = m
                .predict(&ForecastingHorizon::new(vec![o]).expect("one offset"))
                .map_err(fail_on("single-offset predict"))?;
            if single.len() != 1 || single.values()[0].to_bits() != full.values()[pos].to_bits() {
                return Err(format!("offset {o} alone gives {:?}, within the horizon {}", single.values(), full.values()[pos]));
            }
        }
        Ok(String::new())
    }

    fn output_index_monotonic(&self) -> Outcome {
        let f = self.fixture()?;
        let (y, fh) = self.forecaster_data()?;
        let e = self.fitted(f)?;
        let out = e.as_forecaster().expect("forecaster").predict(fh).map_err(|e| e.to_string())?;
        let last = y.last_index().ok_or("empty fixture series")?;
        let idx = out.index();
        if idx.windows(2).any(|w| w[0] >= w[1]) || idx.first().is_some_and(|&i| i <= last) {
            return Err(format!("forecast index {idx:?} after training end {last}"));
        }
        Ok(String::new())
    }

    fn too_short_error(&self) -> Outcome {
        let (y, _) = self.forecaster_data()?;
        let m = self.tags["min_train_length"].as_i64().expect("checked in skip_reason");
        let m = usize::try_from(m).map_err(|_| format!("min_train_length={m}"))?;
        if m == 0 || m > y.len() {
            return Err(format!("min_train_length={m} does not fit the {}-point fixture", y.len()));
        }
        let mut e = self.proto.clone_unfitted();
        let f = e.as_forecaster_mut().expect("forecaster");
        match f.fit(&y.head(m - 1)) {
            Err(err) if matches!(err.root(), Error::TooShort { .. }) => {}
            Err(err) => return Err(format!("{} points: expected TooShort, got {err}", m - 1)),
            Ok(()) => return Err(format!("fit on {} points succeeded below min_train_length={m}", m - 1)),
        }
        f.fit(&y.head(m))
            .map_err(|err| format!("fit on min_train_length={m} points failed: {err}"))?;
        Ok(String::new())
    }

    fn empty_horizon_error(&self) -> Outcome {
        let e = self.fitted(self.fixture()?)?;
        let empty = ForecastingHorizon::new(Vec::new()).expect("empty horizon is constructible");
        match e.as_forecaster().expect("forecaster").predict(&empty) {
            Err(err) if matches!(err.root(), Error::EmptyHorizon) => Ok(String::new()),
            Err(err) => Err(format!("expected EmptyHorizon, got {err}")),
            Ok(_) => Err("empty horizon accepted".into()),
        }
    }

    fn resultant_scitype(&self) -> Outcome {
        let s = self.scitype_registered()?;
        if self.tags.get_str("scitype") != Some(s.as_str()) {
            return Err("scitype tag disagrees with the resultant scitype".into());
        }
        for (name, c) in self.proto.as_estimator().components() {
            self.registry
                .scitype(c.scitype())
                .map_err(|e| format!("component `{name}`: {e}"))?;
        }
        let f = self.fixture()?;
        self.fit_output(f)
            .map_err(|e| format!("does not work as a {s} on its fixture: {e}"))?;
        Ok(s)
    }

    fn nested_param_addressing(&self) -> Outcome {
        let e = self.proto.as_estimator();
        let deep = get_params(e, true);
        for (name, c) in e.components() {
            if !deep.strip_prefix(name).bit_eq(&get_params(c, true)) {
                return Err(format!("`{name}__*` keys do not mirror component `{name}`"));
            }
        }
        let mut nested = 0;
        for (key, value) in deep.iter() {
            if !key.contains(NESTING_SEPARATOR) || matches!(value, ParamValue::Estimator(_)) {
                continue;
            }
            nested += 1;
            if find_param_spec(e, key).is_none() {
                return Err(format!("no declared spec reachable for `{key}`"));
            }
            let mut copy = self.proto.clone();
            copy.set_params(&ParamMap::new().with(key, value.clone()))
                .map_err(|err| format!("set_params on `{key}`: {err}"))?;
            if !copy.get_params(true).bit_eq(&deep) {
                return Err(format!("setting `{key}` to its own value changed parameters"));
            }
        }
        Ok(format!("{nested} nested keys"))
    }
}
