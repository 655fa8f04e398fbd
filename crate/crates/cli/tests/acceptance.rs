//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use scitype_core::compose::{GridSearchTuner, ParamGrid, ReducedForecaster, Strategy};
use scitype_core::conformance::{check_all, check_estimator, defects, Fixture, Status};
use scitype_core::learners::{LinearRegressor, MajorityDummyClassifier, MeanRegressor};
use scitype_core::persist;
use scitype_core::tasks::{
    evaluate_forecaster, evaluate_supervised, shuffle, ForecastingTask, Splitter, SupervisedTask,
};
use scitype_core::workflow::{TaskSection, WorkflowReport, WorkflowSpec};
use scitype_core::{
    AnyEstimator, Distribution, EstimatorSpec, ForecastingHorizon, Forecaster, FormalObject, KindDescriptor, LabelVector,
    LossFunction, Normal, ParamMap, ParamValue, Registry, SupervisedLearner, Table, TimeSeries,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("conformance closure", conformance_closure),
        ("permutation invariance", permutation_invariance),
        ("tuner oracle", tuner_oracle),
        ("reduction oracle", reduction_oracle),
        ("composite substitutability", composite_substitutability),
        ("distribution numerics", distribution_numerics),
        ("worked examples", worked_examples),
        ("evaluation purity", evaluation_purity),
        ("persistence", persistence),
        ("cli facade", cli_facade),
    ];
    let started = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let ms = t.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({ms} ms): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({ms} ms): {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1} s",
        criteria.len() - failed,
        criteria.len(),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

// splitmix64, so fixtures do not depend on library randomness.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn uniform(&mut self) -> f64 {
        (self.next() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }
}

struct Tabular {
    x: Table,
    y_class: LabelVector,
    y_real: LabelVector,
    x_test: Table,
}

fn random_table(names: &[&str], n: usize, rng: &mut Rng) -> Table {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| names.iter().map(|_| (rng.uniform() * 20.0 - 10.0).round() / 4.0).collect())
        .collect();
    Table::from_rows(names, &rows).unwrap()
}

fn tabular(names: &[&str], n: usize, seed: u64) -> Tabular {
    let mut rng = Rng(seed);
    let x = random_table(names, n, &mut rng);
    let x_test = random_table(names, 4, &mut rng);
    let real: Vec<f64> = (0..n)
        .map(|i| {
            let row = x.numeric_row(i).unwrap();
            row.iter().enumerate().map(|(j, v)| (j as f64 + 1.0) * v).sum::<f64>() + rng.uniform()
        })
        .collect();
    let classes: Vec<&str> = real.iter().map(|v| ["lo", "mid", "hi"][((v.abs() * 3.0) as usize) % 3]).collect();
    Tabular {
        x,
        y_class: LabelVector::classes(classes),
        y_real: LabelVector::Real(real),
        x_test,
    }
}

fn target<'a>(e: &AnyEstimator, d: &'a Tabular) -> &'a LabelVector {
    if e.scitype() == "supervised_classifier" {
        &d.y_class
    } else {
        &d.y_real
    }
}

enum Out {
    Labels(LabelVector),
    Table(Table),
    Series(TimeSeries),
}

impl Out {
    fn bit_eq(&self, other: &Out) -> bool {
        match (self, other) {
            (Out::Labels(a), Out::Labels(b)) => a.bit_eq(b),
            (Out::Table(a), Out::Table(b)) => a.bit_eq(b),
            (Out::Series(a), Out::Series(b)) => a.bit_eq(b),
            _ => false,
        }
    }
}

fn fit_tabular(e: &mut AnyEstimator, x: &Table, y: &LabelVector) -> Result<(), String> {
    let r = match e {
        AnyEstimator::Supervised(s) => s.fit(x, y),
        AnyEstimator::Transformer(t) => t.fit(x, Some(y)),
        AnyEstimator::Forecaster(_) => return Err("forecaster on tabular data".into()),
    };
    r.map_err(|err| format!("{}: fit: {err}", e.kind()))
}

fn tabular_output(e: &AnyEstimator, x: &Table) -> Result<Out, String> {
    let r = match e {
        AnyEstimator::Supervised(s) => s.predict(x).map(Out::Labels),
        AnyEstimator::Transformer(t) => t.transform(x).map(Out::Table),
        AnyEstimator::Forecaster(_) => return Err("forecaster on tabular data".into()),
    };
    r.map_err(|err| format!("{}: output: {err}", e.kind()))
}

fn estimator_kinds(r: &Registry) -> Vec<String> {
    r.kinds()
        .filter(|k| matches!(k, KindDescriptor::Estimator(_)))
        .map(|k| k.kind_name().to_string())
        .collect()
}

fn conformance_closure() -> Outcome {
    let reference = Registry::reference();
    let kinds = estimator_kinds(&reference);
    ensure!(kinds.len() >= 7, "only {} estimator kinds", kinds.len());
    for needed in ["Pipeline", "Ensemble", "GridSearchTuner", "ReducedForecaster"] {
        ensure!(kinds.iter().any(|k| k == needed), "{needed} is not registered");
    }
    let reports = check_all(&reference);
    let dirty: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("{} {:?}", r.kind_name, r.failed_ids()))
        .collect();
    ensure!(dirty.is_empty(), "reference failures: {}", dirty.join("; "));

    let with_defects = defects::defect_registry();
    ensure!(defects::DEFECTS.len() >= 4, "only {} defect kinds", defects::DEFECTS.len());
    for report in check_all(&with_defects) {
        let expected: Vec<&str> = defects::DEFECTS
            .iter()
            .filter(|(kind, _)| *kind == report.kind_name)
            .map(|(_, check)| *check)
            .collect();
        ensure!(
            report.failed_ids() == expected,
            "{} failed {:?}, expected {:?}",
            report.kind_name,
            report.failed_ids(),
            expected
        );
    }
    Ok(format!(
        "{} kinds clean; {} defect kinds fail only their targeted check; input-mutating transformers are rejected by the compiler (compile_fail doctest)",
        reports.len(),
        defects::DEFECTS.len()
    ))
}

fn permutation_invariance() -> Outcome {
    let r = Registry::reference();
    let names = ["a", "b", "c", "d"];
    let d = tabular(&names, 10, 42);
    let mut column_orders: Vec<Vec<&str>> = Vec::new();
    let mut seed = 0;
    while column_orders.len() < 10 {
        seed += 1;
        let mut order = names.to_vec();
        shuffle(&mut order, seed);
        if order != names && !column_orders.contains(&order) {
            column_orders.push(order);
        }
    }
    let (mut checked, mut exempt) = (Vec::new(), Vec::new());
    for kind in estimator_kinds(&r) {
        let proto = r.create(&kind, &ParamMap::new()).map_err(|e| e.to_string())?;
        if proto.as_forecaster().is_some() {
            continue;
        }
        let tags = proto.tags();
        if tags.get_bool("deterministic") != Some(true)
            || tags.get_bool("capability:row_order_invariant") == Some(false)
        {
            exempt.push(kind);
            continue;
        }
        let y = target(&proto, &d).clone();
        let mut base = proto.clone_unfitted();
        fit_tabular(&mut base, &d.x, &y)?;
        let expected = tabular_output(&base, &d.x_test)?;
        for seed in 1..=20u64 {
            let mut rows: Vec<usize> = (0..d.x.n_rows()).collect();
            shuffle(&mut rows, seed);
            let mut e = proto.clone_unfitted();
            fit_tabular(&mut e, &d.x.take_rows(&rows), &y.take(&rows))?;
            ensure!(tabular_output(&e, &d.x_test)?.bit_eq(&expected), "{kind}: row permutation {seed} changed output");
        }
        for order in &column_orders {
            let mut e = proto.clone_unfitted();
            fit_tabular(&mut e, &d.x.select(order).unwrap(), &y)?;
            let out = match tabular_output(&e, &d.x_test.select(order).unwrap())? {
                Out::Table(t) => Out::Table(t.select(&names).map_err(|e| e.to_string())?),
                other => other,
            };
            ensure!(out.bit_eq(&expected), "{kind}: column order {order:?} changed output");
        }
        checked.push(kind);
    }
    ensure!(checked.len() >= 5, "only {} tabular kinds checked", checked.len());
    Ok(format!(
        "{} kinds x (20 row + 10 column permutations) bit-identical; exempt by tag: {}",
        checked.len(),
        if exempt.is_empty() { "none".into() } else { exempt.join(", ") }
    ))
}

fn fold_loss(metric: LossFunction, predicted: &LabelVector, truth: &LabelVector) -> f64 {
    let n = truth.len() as f64;
    match metric {
        LossFunction::Squared => {
            let (p, t) = (predicted.as_real().unwrap(), truth.as_real().unwrap());
            p.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n
        }
        LossFunction::Misclassification => {
            let (p, t) = (predicted.as_classes().unwrap(), truth.as_classes().unwrap());
            p.iter().zip(t).filter(|(a, b)| a != b).count() as f64 / n
        }
    }
}

fn tuner_oracle() -> Outcome {
    let r = Registry::reference();
    let ints = |v: &[i64]| v.iter().map(|k| ParamValue::Int(*k)).collect::<Vec<_>>();
    let reals = |v: &[f64]| v.iter().map(|k| ParamValue::Real(*k)).collect::<Vec<_>>();
    let bools = || vec![ParamValue::Bool(true), ParamValue::Bool(false)];
    let fixtures = [
        ("NearestNeighborClassifier", ParamGrid::new().with("k", ints(&[1, 3])), 6, Splitter::kfold(2).unwrap(), 1),
        ("NearestNeighborClassifier", ParamGrid::new().with("k", ints(&[1, 2, 3, 4, 5])), 12, Splitter::kfold(3).unwrap(), 2),
        ("LinearRegressor", ParamGrid::new().with("ridge_epsilon", reals(&[0.0, 0.1, 1.0, 10.0])), 10, Splitter::kfold(5).unwrap(), 3),
        (
            "Pipeline",
            ParamGrid::new()
                .with("scaler__with_mean", bools())
                .with("scaler__with_scale", bools())
                .with("learner__ridge_epsilon", reals(&[0.0, 0.5, 5.0])),
            9,
            Splitter::kfold(3).unwrap(),
            4,
        ),
        ("NearestNeighborClassifier", ParamGrid::new().with("k", ints(&[1, 2, 3, 4, 5, 6, 7, 8])), 16, Splitter::kfold_shuffled(4, 11).unwrap(), 5),
    ];
    let mut sizes = Vec::new();
    for (kind, grid, n, splitter, seed) in fixtures {
        let d = tabular(&["u", "v"], n, seed);
        let proto = r.create(kind, &ParamMap::new()).map_err(|e| e.to_string())?;
        let metric = if proto.scitype() == "supervised_classifier" {
            LossFunction::Misclassification
        } else {
            LossFunction::Squared
        };
        let y = target(&proto, &d).clone();
        let points = grid.points();
        ensure!((2..=12).contains(&points.len()), "grid of size {}", points.len());
        let mut tuner = GridSearchTuner::new(proto.into_supervised().unwrap(), grid, splitter.clone(), metric)
            .map_err(|e| e.to_string())?;
        tuner.fit(&d.x, &y).map_err(|e| format!("{kind}: {e}"))?;

        let splits = splitter.split(n).unwrap();
        let mut best: Option<(usize, f64)> = None;
        for (i, point) in points.iter().enumerate() {
            let losses: Vec<f64> = splits
                .iter()
                .map(|s| {
                    let mut m = r.create(kind, point).unwrap();
                    let m = m.as_supervised_mut().unwrap();
                    m.fit(&d.x.take_rows(&s.train), &y.take(&s.train)).unwrap();
                    fold_loss(metric, &m.predict(&d.x.take_rows(&s.test)).unwrap(), &y.take(&s.test))
                })
                .collect();
            let mean = losses.iter().sum::<f64>() / losses.len() as f64;
            let reported = &tuner.cv_results().unwrap()[i];
            ensure!(reported.params.bit_eq(point), "{kind}: cv_results out of grid order");
            for (a, b) in reported.fold_losses.iter().zip(&losses) {
                ensure!((a - b).abs() <= 1e-12, "{kind} {point}: fold loss {a} vs oracle {b}");
            }
            ensure!((reported.mean_loss - mean).abs() <= 1e-12, "{kind} {point}: mean loss");
            if best.is_none_or(|(_, m)| mean < m) {
                best = Some((i, mean));
            }
        }
        let best_point = &points[best.unwrap().0];
        ensure!(
            tuner.best_params().unwrap().bit_eq(best_point),
            "{kind}: tuner picked {} but oracle picked {best_point}",
            tuner.best_params().unwrap()
        );
        sizes.push(points.len().to_string());
    }
    Ok(format!("5 fixtures, grid sizes [{}], best_params exact", sizes.join(", ")))
}

fn lag_names(w: usize) -> Vec<String> {
    (1..=w).rev().map(|l| format!("lag_{l}")).collect()
}

fn reduction_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for (n, w) in [(4usize, 1usize), (7, 2), (12, 3), (20, 4), (30, 5)] {
        let values: Vec<f64> = (0..n).map(|t| (t as f64 * 0.7).sin() * 3.0 + 0.2 * t as f64).collect();
        let mut f = ReducedForecaster::new(Box::new(LinearRegressor::new()), w, Strategy::Recursive).unwrap();
        f.fit(&TimeSeries::from_values(values.clone()).unwrap()).map_err(|e| e.to_string())?;
        let forecast = f.predict(&ForecastingHorizon::steps(5)).map_err(|e| e.to_string())?;

        let names = lag_names(w);
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let rows: Vec<Vec<f64>> = (w..n).map(|t| values[t - w..t].to_vec()).collect();
        let mut reg = LinearRegressor::new();
        reg.fit(
            &Table::from_rows(&names, &rows).unwrap(),
            &LabelVector::Real((w..n).map(|t| values[t]).collect()),
        )
        .unwrap();
        let mut window = values[n - w..].to_vec();
        for (h, got) in forecast.values().iter().enumerate() {
            let next = reg.predict(&Table::from_rows(&names, &[window.clone()]).unwrap()).unwrap().as_real().unwrap()[0];
            let err = (got - next).abs();
            ensure!(err <= 1e-12 * next.abs().max(1.0), "n={n} w={w} h={}: {got} vs oracle {next}", h + 1);
            worst = worst.max(err);
            window.remove(0);
            window.push(next);
        }
    }
    let mut mean = ReducedForecaster::new(Box::new(MeanRegressor::new()), 2, Strategy::Recursive).unwrap();
    mean.fit(&TimeSeries::from_values(vec![1.0, 2.0, 3.0, 4.0]).unwrap()).unwrap();
    let out = mean.predict(&ForecastingHorizon::steps(5)).unwrap();
    ensure!(out.values() == [3.5; 5], "mean fixture gave {:?}", out.values());
    Ok(format!("5 series x horizons 1..5, max abs error {worst:.1e}; mean fixture = 3.5 exactly"))
}

fn composite_substitutability() -> Outcome {
    let r = Registry::reference();
    let mut summary = Vec::new();
    for kind in ["Pipeline", "Ensemble", "GridSearchTuner", "ReducedForecaster", "ScaledOLS"] {
        let report = check_estimator(&r, kind).map_err(|e| e.to_string())?;
        ensure!(report.passed(), "{kind} failed {:?}", report.failed_ids());
        if kind != "ScaledOLS" {
            ensure!(
                report.result("resultant_scitype").map(|c| c.status) == Some(Status::Pass),
                "{kind}: resultant_scitype not checked"
            );
        }
        summary.push(format!("{kind}:{}", report.summary.pass));
    }
    let explicit = r
        .create("Pipeline", &ParamMap::new().with("scaler__with_mean", true))
        .map_err(|e| e.to_string())?;
    let contracted = r.create("ScaledOLS", &ParamMap::new()).map_err(|e| e.to_string())?;
    let mut fixtures: Vec<(Table, LabelVector, Table)> = Vec::new();
    if let Fixture::Supervised { x_train, y_train, x_test } = Fixture::regression() {
        fixtures.push((x_train, y_train, x_test));
    }
    for (seed, names) in [(7u64, &["a", "b"][..]), (8, &["p", "q", "r"]), (9, &["z"])] {
        let d = tabular(names, 12, seed);
        fixtures.push((d.x, d.y_real, d.x_test));
    }
    for (i, (x, y, x_test)) in fixtures.iter().enumerate() {
        let (mut a, mut b) = (explicit.clone_unfitted(), contracted.clone_unfitted());
        fit_tabular(&mut a, x, y)?;
        fit_tabular(&mut b, x, y)?;
        for probe in [x, x_test] {
            ensure!(
                tabular_output(&a, probe)?.bit_eq(&tabular_output(&b, probe)?),
                "ScaledOLS differs from explicit pipeline on fixture {i}"
            );
        }
    }
    Ok(format!(
        "suite passes with checks passed {}; ScaledOLS bit-equal to explicit pipeline on {} fixtures",
        summary.join(" "),
        fixtures.len()
    ))
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn distribution_numerics() -> Outcome {
    let (mu, sigma) = (1.0, 4.0);
    let n = Normal::new(mu, sigma).unwrap();
    // Density written out here rather than taken from the library.
    let density = |x: f64| (-0.5 * ((x - mu) / sigma).powi(2)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let x = mu - 5.0 * sigma + 10.0 * sigma * i as f64 / 49.0;
        let oracle = 0.5 + simpson(density, mu, x, 4000);
        worst = worst.max((n.cdf(x) - oracle).abs());
    }
    ensure!(worst <= 1e-6, "cdf off the quadrature oracle by {worst:e}");
    let mass = simpson(|x| n.pdf(x), mu - 12.0 * sigma, mu + 12.0 * sigma, 40_000);
    ensure!((mass - 1.0).abs() <= 1e-6, "pdf integrates to {mass}");
    for (m, s) in [(1.0, 4.0), (0.0, 1.0), (-3.5, 0.2), (100.0, 30.0)] {
        let d = Normal::new(m, s).unwrap();
        ensure!((d.cdf(m) - 0.5).abs() <= 1e-9, "cdf(mu) = {} for N({m}, {s})", d.cdf(m));
    }
    Ok(format!("max cdf error {worst:.1e} over 50 points; pdf mass {mass:.12}"))
}

fn worked_examples() -> Outcome {
    let mut rng = Rng(2024);
    let alphabet = ["a", "b", "c", "d"];
    let probe = Table::from_rows(&["f"], &[vec![0.0], vec![5.0], vec![-2.0]]).unwrap();
    for trial in 0..100 {
        let n = 1 + rng.below(12);
        let labels: Vec<&str> = (0..n).map(|_| alphabet[rng.below(1 + trial % 4)]).collect();
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for l in &labels {
            *counts.entry(l).or_default() += 1;
        }
        let top = *counts.values().max().unwrap();
        // Ties go to the first label in canonical (lexicographic) order.
        let oracle = counts.iter().find(|(_, c)| **c == top).map(|(l, _)| *l).unwrap();
        let x = Table::from_rows(&["f"], &(0..n).map(|i| vec![i as f64]).collect::<Vec<_>>()).unwrap();
        let mut dummy = MajorityDummyClassifier::new();
        dummy.fit(&x, &LabelVector::classes(labels.clone())).map_err(|e| e.to_string())?;
        let got = dummy.predict(&probe).map_err(|e| e.to_string())?;
        ensure!(got == LabelVector::classes([oracle; 3]), "labels {labels:?}: got {got:?}, oracle {oracle}");
    }
    let r = Registry::reference();
    let normal = r
        .create_distribution("Normal", &ParamMap::new().with("mu", 1.0).with("sigma", 4.0))
        .map_err(|e| e.to_string())?;
    let expected = ParamMap::new().with("mu", 1.0).with("sigma", 4.0);
    ensure!(normal.params() == expected, "Normal(1, 4) params {}", normal.params());
    ensure!(
        MajorityDummyClassifier::new().params().is_empty(),
        "the majority baseline declares parameters"
    );
    Ok("100 random label vectors match the counting oracle; Normal(1, 4) params = {mu: 1, sigma: 4}".into())
}

#[derive(PartialEq)]
struct Snapshot {
    params: String,
    tags: String,
    state: String,
}

fn snapshot(e: &AnyEstimator) -> Snapshot {
    Snapshot {
        params: serde_json::to_string(&e.get_params(true)).unwrap(),
        tags: serde_json::to_string(&e.tags()).unwrap(),
        state: serde_json::to_string(&e.fit_state()).unwrap(),
    }
}

fn evaluate_any(e: &AnyEstimator) -> Result<(), String> {
    let scitype = e.scitype().to_string();
    match e {
        AnyEstimator::Supervised(_) => {
            let fixture = Fixture::canonical(&scitype).unwrap();
            let data = fixture.supervised_table().unwrap();
            let task = if scitype == "supervised_classifier" {
                SupervisedTask::classification("target")
            } else {
                SupervisedTask::regression("target")
            };
            evaluate_supervised(e, &task, &data, &Splitter::kfold(4).unwrap()).map(|_| ())
        }
        AnyEstimator::Forecaster(_) => {
            let Fixture::Forecasting { y, fh } = Fixture::forecasting() else { unreachable!() };
            evaluate_forecaster(e, &ForecastingTask::new(fh).unwrap(), &y, 0.7).map(|_| ())
        }
        AnyEstimator::Transformer(_) => unreachable!("wrapped before evaluation"),
    }
    .map_err(|err| format!("{}: {err}", e.kind()))
}

fn fit_on_canonical(e: &mut AnyEstimator) -> Result<(), String> {
    match Fixture::canonical(e.scitype()).ok_or("no fixture")? {
        Fixture::Supervised { x_train, y_train, .. } => fit_tabular(e, &x_train, &y_train),
        Fixture::Transformer { x_train, .. } => e
            .as_transformer_mut()
            .unwrap()
            .fit(&x_train, None)
            .map_err(|err| err.to_string()),
        Fixture::Forecasting { y, .. } => e.as_forecaster_mut().unwrap().fit(&y).map_err(|err| err.to_string()),
    }
}

fn evaluation_purity() -> Outcome {
    let r = Registry::reference();
    let mut notes = Vec::new();
    let kinds = estimator_kinds(&r);
    for kind in &kinds {
        let mut proto = r.create(kind, &ParamMap::new()).map_err(|e| e.to_string())?;
        if proto.as_transformer().is_some() {
            // Transformers carry no loss; they are evaluated as a pipeline step.
            let spec = EstimatorSpec {
                kind: "Pipeline".into(),
                params: ParamMap::new()
                    .with("step", proto.blueprint())
                    .with("learner", EstimatorSpec::new("MeanRegressor")),
            };
            proto = r.build(&spec).map_err(|e| e.to_string())?;
            notes.push(format!("{kind} via Pipeline"));
        }
        let mut fitted = proto.clone_unfitted();
        fit_on_canonical(&mut fitted)?;
        for e in [&proto, &fitted] {
            let before = snapshot(e);
            evaluate_any(e)?;
            ensure!(snapshot(e) == before, "{kind}: evaluation changed params, tags or fit status");
        }
    }
    Ok(format!(
        "{} kinds, unfitted and fitted, snapshots identical ({})",
        kinds.len(),
        notes.join(", ")
    ))
}

fn output_on_canonical(e: &AnyEstimator) -> Result<Out, String> {
    match Fixture::canonical(e.scitype()).ok_or("no fixture")? {
        Fixture::Supervised { x_test, .. } | Fixture::Transformer { x_test, .. } => tabular_output(e, &x_test),
        Fixture::Forecasting { fh, .. } => e
            .as_forecaster()
            .unwrap()
            .predict(&fh)
            .map(Out::Series)
            .map_err(|err| err.to_string()),
    }
}

fn persistence() -> Outcome {
    let r = Registry::reference();
    let kinds = estimator_kinds(&r);
    for kind in &kinds {
        let mut e = r.create(kind, &ParamMap::new()).map_err(|e| e.to_string())?;
        fit_on_canonical(&mut e)?;
        let mut bytes = Vec::new();
        persist::save(&e, &mut bytes).map_err(|e| e.to_string())?;
        let back = persist::load(&r, bytes.as_slice()).map_err(|err| format!("{kind}: {err}"))?;
        ensure!(
            back.get_fitted_params().unwrap().bit_eq(&e.get_fitted_params().unwrap()),
            "{kind}: fitted params changed"
        );
        ensure!(output_on_canonical(&back)?.bit_eq(&output_on_canonical(&e)?), "{kind}: output changed");
    }
    let normal = Normal::new(1.0, 4.0).unwrap();
    let back = persist::distribution_from_json(&r, &persist::distribution_to_json(&normal).unwrap())
        .map_err(|e| e.to_string())?;
    for i in -20..=20 {
        let x = i as f64 * 0.7;
        ensure!(
            back.cdf(x).to_bits() == normal.cdf(x).to_bits() && back.pdf(x).to_bits() == normal.pdf(x).to_bits(),
            "Normal changed at {x}"
        );
    }
    Ok(format!("{} fitted kinds and Normal reload bit-for-bit", kinds.len()))
}

fn workflows_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/workflows")
}

fn scitype(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_scitype"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn without_timestamp(json: &str) -> String {
    json.lines()
        .filter(|l| !l.trim_start().starts_with("\"generated_at\""))
        .collect::<Vec<_>>()
        .join("\n")
}

// The workflow, done by hand through the library.
fn library_report(path: &Path) -> Result<WorkflowReport, String> {
    let s = |e: &dyn std::fmt::Display| e.to_string();
    let spec = WorkflowSpec::load(path).map_err(|e| s(&e))?;
    let registry = Registry::reference();
    let estimator = registry
        .create(&spec.estimator.kind, &scitype_core::workflow::params_from_toml(&spec.estimator.params).map_err(|e| s(&e))?)
        .map_err(|e| s(&e))?;
    let splitter = spec.build_splitter().map_err(|e| s(&e))?;
    let data = Table::from_csv_path(&spec.data.path).map_err(|e| s(&e))?;
    let evaluation = match &spec.task {
        TaskSection::Supervised { .. } => {
            let task = spec.supervised_task().map_err(|e| s(&e))?.unwrap();
            evaluate_supervised(&estimator, &task, &data, &splitter)
        }
        TaskSection::Forecasting { value_column, .. } => {
            let (task, _) = spec.forecasting_task().map_err(|e| s(&e))?.unwrap();
            let Splitter::Holdout { train_fraction } = splitter else {
                return Err("expected a holdout splitter".into());
            };
            let y = TimeSeries::from_table(&data, value_column).map_err(|e| s(&e))?;
            evaluate_forecaster(&estimator, &task, &y, train_fraction)
        }
    }
    .map_err(|e| s(&e))?;
    Ok(WorkflowReport::new(evaluation, &spec))
}

fn cli_facade() -> Outcome {
    let dir = workflows_dir();
    let out_dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let expected_loss = [("dummy_classification", Some(0.75)), ("pipeline_regression", None), ("naive_forecast", Some(1.0))];
    for (name, loss) in expected_loss {
        let wf = dir.join(format!("{name}.toml"));
        let out = out_dir.path().join(format!("{name}.json"));
        let (code, _, stderr) = scitype(&["run", wf.to_str().unwrap(), "--output", out.to_str().unwrap()]);
        ensure!(code == 0, "run {name} exited {code}: {stderr}");
        let via_cli = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
        let report = library_report(&wf)?;
        let via_lib = report.to_json().map_err(|e| e.to_string())?;
        ensure!(
            without_timestamp(via_cli.trim_end()) == without_timestamp(&via_lib),
            "{name}: CLI and library reports differ"
        );
        if let Some(loss) = loss {
            ensure!(report.evaluation.mean_loss == loss, "{name}: mean loss {}", report.evaluation.mean_loss);
        }
    }

    let unknown = dir.join("unknown_kind.toml");
    let missing = dir.join("missing_data.toml");
    let table: [(&[&str], i32, Option<&str>); 7] = [
        (&["list"], 0, None),
        (&["list", "--filter", "==="], 2, None),
        (&["check", "--all"], 0, None),
        (&["check", "NoSuchKind"], 2, Some("unregistered")),
        (&["check", "BrokenFixtureKind"], 1, None),
        (&["run", unknown.to_str().unwrap()], 2, None),
        (&["run", missing.to_str().unwrap()], 1, None),
    ];
    for (args, expected, stderr_has) in table {
        let (code, _, stderr) = scitype(args);
        ensure!(code == expected, "`scitype {}` exited {code}, expected {expected}", args.join(" "));
        if let Some(text) = stderr_has {
            ensure!(stderr.contains(text), "`scitype {}` stderr lacks {text:?}: {stderr}", args.join(" "));
        }
    }
    let (_, listing, _) = scitype(&["list", "--filter", "scitype=forecaster"]);
    ensure!(
        listing.lines().skip(1).all(|l| l.contains("forecaster")),
        "forecaster filter leaked other kinds"
    );
    Ok(format!("3 workflows identical via CLI and library; {} exit-code invocations as expected", table.len()))
}
