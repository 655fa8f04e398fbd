use proptest::prelude::*;
use proptest::sample::subsequence;

use scitype_core::compose::{GridSearchTuner, ParamGrid, Pipeline, ReducedForecaster, Strategy as Reduction};
use scitype_core::learners::{LinearRegressor, MeanRegressor, NearestNeighborClassifier, SimpleExpSmoothing};
use scitype_core::mathobj::LossFunction;
use scitype_core::persist;
use scitype_core::tasks::{evaluate_supervised, Splitter, SupervisedTask};
use scitype_core::{
    AnyEstimator, Column, Distribution, Forecaster, ForecastingHorizon, LabelVector, Normal, ParamMap,
    ParamValue, Registry, SupervisedLearner, Table, TimeSeries,
};

const TABULAR: &[&str] = &[
    "MajorityDummyClassifier",
    "NearestNeighborClassifier",
    "MeanRegressor",
    "LinearRegressor",
    "StandardScaler",
    "Pipeline",
    "Ensemble",
    "ScaledOLS",
];

#[derive(Debug, Clone)]
struct Data {
    x: Table,
    y_real: LabelVector,
    y_class: LabelVector,
    probe: Table,
}

fn table(names: &[&str], rows: &[Vec<f64>]) -> Table {
    Table::from_rows(names, rows).unwrap()
}

// Quarter-integer grid values keep sums exact enough to make ties likely.
fn data(min_rows: usize) -> impl Strategy<Value = Data> {
    let value = (-40i32..40).prop_map(|v| v as f64 / 4.0);
    (min_rows..12usize)
        .prop_flat_map(move |n| {
            (
                prop::collection::vec((value.clone(), value.clone()), n),
                prop::collection::vec(0u8..3, n),
                prop::collection::vec((value.clone(), value.clone()), 1..5),
            )
        })
        .prop_map(|(rows, classes, probe)| {
            let x = table(&["a", "b"], &rows.iter().map(|(a, b)| vec![*a, *b]).collect::<Vec<_>>());
            Data {
                y_real: LabelVector::Real(rows.iter().map(|(a, b)| 1.5 * a - b + 0.25).collect()),
                y_class: LabelVector::classes(classes.iter().map(|c| ["p", "q", "r"][*c as usize])),
                probe: table(&["a", "b"], &probe.iter().map(|(a, b)| vec![*a, *b]).collect::<Vec<_>>()),
                x,
            }
        })
}

#[derive(Debug, PartialEq)]
enum Out {
    Labels(LabelVector),
    Table(Table),
}

impl Out {
    fn bit_eq(&self, other: &Out) -> bool {
        match (self, other) {
            (Out::Labels(a), Out::Labels(b)) => a.bit_eq(b),
            (Out::Table(a), Out::Table(b)) => a.bit_eq(b),
            _ => false,
        }
    }
}

fn target_for<'a>(e: &AnyEstimator, d: &'a Data) -> &'a LabelVector {
    if e.scitype() == "supervised_classifier" {
        &d.y_class
    } else {
        &d.y_real
    }
}

fn fit(e: &mut AnyEstimator, x: &Table, y: &LabelVector) {
    if let Some(s) = e.as_supervised_mut() {
        s.fit(x, y).unwrap();
    } else {
        e.as_transformer_mut().unwrap().fit(x, Some(y)).unwrap();
    }
}

fn output(e: &AnyEstimator, x: &Table) -> Out {
    match e.as_supervised() {
        Some(s) => Out::Labels(s.predict(x).unwrap()),
        None => Out::Table(e.as_transformer().unwrap().transform(x).unwrap()),
    }
}

fn fitted(kind: &str, d: &Data) -> AnyEstimator {
    let mut e = Registry::reference().create(kind, &ParamMap::new()).unwrap();
    let y = target_for(&e, d).clone();
    fit(&mut e, &d.x, &y);
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn params_roundtrip_preserves_predictions(d in data(4), kind in prop::sample::select(TABULAR)) {
        let e = fitted(kind, &d);
        let mut rebuilt = e.clone_unfitted();
        rebuilt.set_params(&e.get_params(true)).unwrap();
        let y = target_for(&e, &d).clone();
        fit(&mut rebuilt, &d.x, &y);
        prop_assert!(output(&rebuilt, &d.probe).bit_eq(&output(&e, &d.probe)));
    }

    #[test]
    fn params_and_fitted_params_are_disjoint(d in data(4), kind in prop::sample::select(TABULAR)) {
        let e = fitted(kind, &d);
        let params = e.get_params(true);
        let state = e.get_fitted_params().unwrap();
        prop_assert!(state.keys().all(|k| !params.contains_key(k)));
    }

    #[test]
    fn save_load_is_identity(d in data(4), kind in prop::sample::select(TABULAR)) {
        let r = Registry::reference();
        let e = fitted(kind, &d);
        let back = persist::from_json(&r, &persist::to_json(&e).unwrap()).unwrap();
        prop_assert!(back.get_params(true).bit_eq(&e.get_params(true)));
        prop_assert_eq!(back.tags(), e.tags());
        prop_assert!(back.get_fitted_params().unwrap().bit_eq(&e.get_fitted_params().unwrap()));
        prop_assert!(output(&back, &d.probe).bit_eq(&output(&e, &d.probe)));
    }

    #[test]
    fn row_order_does_not_matter(
        d in data(4),
        kind in prop::sample::select(TABULAR),
        seed in any::<u64>(),
    ) {
        let e = fitted(kind, &d);
        let mut order: Vec<usize> = (0..d.x.n_rows()).collect();
        scitype_core::tasks::shuffle(&mut order, seed);
        let shuffled = Data {
            x: d.x.take_rows(&order),
            y_real: d.y_real.take(&order),
            y_class: d.y_class.take(&order),
            probe: d.probe.clone(),
        };
        let other = fitted(kind, &shuffled);
        prop_assert!(output(&other, &d.probe).bit_eq(&output(&e, &d.probe)));
    }

    #[test]
    fn column_order_does_not_matter(d in data(4), kind in prop::sample::select(TABULAR)) {
        let e = fitted(kind, &d);
        let swapped = Data {
            x: d.x.select(&["b", "a"]).unwrap(),
            probe: d.probe.select(&["b", "a"]).unwrap(),
            ..d.clone()
        };
        let other = fitted(kind, &swapped);
        match (output(&other, &swapped.probe), output(&e, &d.probe)) {
            (Out::Table(a), Out::Table(b)) => {
                prop_assert!(a.select(&["a", "b"]).unwrap().bit_eq(&b));
            }
            (a, b) => prop_assert!(a.bit_eq(&b)),
        }
    }

    #[test]
    fn inputs_are_untouched_and_refits_idempotent(d in data(4), kind in prop::sample::select(TABULAR)) {
        let (x, probe) = (d.x.clone(), d.probe.clone());
        let mut e = fitted(kind, &d);
        let first = e.get_fitted_params().unwrap();
        let _ = output(&e, &d.probe);
        let y = target_for(&e, &d).clone();
        fit(&mut e, &d.x, &y);
        prop_assert!(d.x.bit_eq(&x) && d.probe.bit_eq(&probe));
        prop_assert!(e.get_fitted_params().unwrap().bit_eq(&first));
    }

    #[test]
    fn evaluation_is_pure_and_deterministic(d in data(6), kind in prop::sample::select(TABULAR)) {
        let e = Registry::reference().create(kind, &ParamMap::new()).unwrap();
        if e.as_supervised().is_none() {
            return Ok(());
        }
        let target = target_for(&e, &d).clone();
        let mut columns: Vec<(String, Column)> =
            d.x.columns().map(|(n, c)| (n.to_string(), c.clone())).collect();
        columns.push(("y".into(), match &target {
            LabelVector::Real(v) => Column::Numeric(v.clone()),
            LabelVector::Classes(c) => Column::Categorical(c.iter().map(|l| l.to_string()).collect()),
        }));
        let data = Table::new(columns).unwrap();
        let task = if e.scitype() == "supervised_classifier" {
            SupervisedTask::classification("y")
        } else {
            SupervisedTask::regression("y")
        };
        let (params, tags, state) = (e.get_params(true), e.tags(), e.fit_state());
        let splitter = Splitter::kfold(2).unwrap();
        let a = evaluate_supervised(&e, &task, &data, &splitter).unwrap();
        let b = evaluate_supervised(&e, &task, &data, &splitter).unwrap();
        prop_assert!(e.get_params(true).bit_eq(&params));
        prop_assert_eq!(e.tags(), tags);
        prop_assert_eq!(e.fit_state(), state);
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn empty_pipeline_is_its_learner(d in data(3)) {
        let mut p = Pipeline::new(Vec::new(), "learner", Box::new(LinearRegressor::new())).unwrap();
        let mut l = LinearRegressor::new();
        p.fit(&d.x, &d.y_real).unwrap();
        l.fit(&d.x, &d.y_real).unwrap();
        prop_assert!(p.predict(&d.probe).unwrap().bit_eq(&l.predict(&d.probe).unwrap()));
    }

    #[test]
    fn composite_deep_keys_are_prefixed_component_keys(with_mean in any::<bool>(), ridge in 0.0f64..2.0) {
        let r = Registry::reference();
        let p = r
            .create("Pipeline", &ParamMap::new().with("scaler__with_mean", with_mean).with("learner__ridge_epsilon", ridge))
            .unwrap();
        let shallow = p.get_params(false);
        let mut expected: Vec<String> = shallow.keys().map(str::to_string).collect();
        for (name, value) in shallow.iter() {
            if let Some(spec) = value.as_estimator() {
                let component = r.build(spec).unwrap();
                expected.extend(component.get_params(true).keys().map(|k| format!("{name}__{k}")));
            }
        }
        let deep: Vec<String> = p.get_params(true).keys().map(str::to_string).collect();
        prop_assert_eq!(deep, expected);
    }

    #[test]
    fn normal_shape(mu in -50.0f64..50.0, sigma in 0.05f64..20.0) {
        let n = Normal::new(mu, sigma).unwrap();
        prop_assert!((n.cdf(mu) - 0.5).abs() < 1e-9);
        let grid: Vec<f64> = (0..1000).map(|i| mu - 8.0 * sigma + 16.0 * sigma * i as f64 / 999.0).collect();
        let mut last = 0.0;
        for &x in &grid {
            let c = n.cdf(x);
            prop_assert!(c >= last && (0.0..=1.0).contains(&c));
            prop_assert!(n.pdf(x) >= 0.0 && n.pdf(x) <= n.pdf(mu));
            last = c;
        }
    }

    #[test]
    fn losses_are_nonnegative(a in -1e6f64..1e6, b in -1e6f64..1e6, p in "[a-c]", t in "[a-c]") {
        let sq = LossFunction::squared(a, b);
        prop_assert!(sq >= 0.0);
        prop_assert_eq!(sq == 0.0, a == b);
        prop_assert_eq!(LossFunction::squared(a, a), 0.0);
        let m = LossFunction::misclassification(&p.as_str().into(), &t.as_str().into());
        prop_assert!(m == 0.0 || m == 1.0);
        prop_assert_eq!(m == 0.0, p == t);
    }

    #[test]
    fn kfold_partitions(n in 1usize..40, k in 2usize..8, seed in proptest::option::of(any::<u64>())) {
        let splitter = match seed {
            Some(s) => Splitter::kfold_shuffled(k, s).unwrap(),
            None => Splitter::kfold(k).unwrap(),
        };
        let Ok(splits) = splitter.split(n) else {
            prop_assert!(k > n);
            return Ok(());
        };
        prop_assert_eq!(splits.len(), k);
        let mut tests: Vec<usize> = splits.iter().flat_map(|s| s.test.clone()).collect();
        tests.sort_unstable();
        prop_assert_eq!(tests, (0..n).collect::<Vec<_>>());
        for s in &splits {
            let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn temporal_splits_never_leak(n in 2usize..60, f in 0.05f64..0.95) {
        for splitter in [Splitter::holdout(f).unwrap(), Splitter::temporal_holdout(f).unwrap()] {
            if let Ok(splits) = splitter.split(n) {
                for s in splits {
                    prop_assert!(s.train.iter().max() < s.test.iter().min());
                }
            }
        }
    }

    #[test]
    fn recursive_reduction_matches_hand_recursion(
        values in prop::collection::vec(-20.0f64..20.0, 4..30),
        w in 1usize..6,
        h in 1u32..6,
    ) {
        prop_assume!(values.len() > w);
        let y = TimeSeries::from_values(values.clone()).unwrap();
        let mut f = ReducedForecaster::new(Box::new(LinearRegressor::new()), w, Reduction::Recursive).unwrap();
        f.fit(&y).unwrap();
        let forecast = f.predict(&ForecastingHorizon::steps(h)).unwrap();

        // Oracle: tabularise by hand, fit a fresh regressor, roll forward.
        let names: Vec<String> = (1..=w).rev().map(|l| format!("lag_{l}")).collect();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let rows: Vec<Vec<f64>> = (w..values.len()).map(|t| values[t - w..t].to_vec()).collect();
        let targets: Vec<f64> = (w..values.len()).map(|t| values[t]).collect();
        let mut reg = LinearRegressor::new();
        reg.fit(&table(&names, &rows), &LabelVector::Real(targets)).unwrap();
        let mut window = values[values.len() - w..].to_vec();
        for step in 0..h as usize {
            let next = reg.predict(&table(&names, &[window.clone()])).unwrap().as_real().unwrap()[0];
            prop_assert!((forecast.values()[step] - next).abs() <= 1e-12 * next.abs().max(1.0));
            window.remove(0);
            window.push(next);
        }
    }

    #[test]
    fn mean_reduction_is_constant(values in prop::collection::vec(-5.0f64..5.0, 3..20), w in 1usize..3) {
        prop_assume!(values.len() > w);
        let y = TimeSeries::from_values(values.clone()).unwrap();
        let mut f = ReducedForecaster::new(Box::new(MeanRegressor::new()), w, Reduction::Recursive).unwrap();
        f.fit(&y).unwrap();
        let out = f.predict(&ForecastingHorizon::steps(4)).unwrap();
        prop_assert!(out.values().iter().all(|v| v.to_bits() == out.values()[0].to_bits()));
    }

    #[test]
    fn tuner_picks_the_brute_force_minimum(
        d in data(6),
        ks in subsequence(vec![1i64, 2, 3, 4, 5], 1..=5),
        folds in 2usize..4,
    ) {
        let grid = ParamGrid::new().with("k", ks.iter().map(|k| ParamValue::Int(*k)).collect());
        let mut tuner = GridSearchTuner::new(
            Box::new(NearestNeighborClassifier::default()),
            grid,
            Splitter::kfold(folds).unwrap(),
            LossFunction::Misclassification,
        )
        .unwrap();
        let splits = Splitter::kfold(folds).unwrap().split(d.x.n_rows()).unwrap();
        if ks.iter().any(|k| splits.iter().any(|s| s.train.len() < *k as usize)) {
            prop_assert!(tuner.fit(&d.x, &d.y_class).is_err());
            return Ok(());
        }
        tuner.fit(&d.x, &d.y_class).unwrap();
        let mut best: Option<(i64, f64)> = None;
        for (i, k) in ks.iter().enumerate() {
            let losses: Vec<f64> = splits
                .iter()
                .map(|s| {
                    let mut m = NearestNeighborClassifier::new(*k as usize);
                    m.fit(&d.x.take_rows(&s.train), &d.y_class.take(&s.train)).unwrap();
                    let p = m.predict(&d.x.take_rows(&s.test)).unwrap();
                    let truth = d.y_class.take(&s.test);
                    let wrong = p.as_classes().unwrap().iter().zip(truth.as_classes().unwrap()).filter(|(a, b)| a != b).count();
                    wrong as f64 / s.test.len() as f64
                })
                .collect();
            let mean = losses.iter().sum::<f64>() / losses.len() as f64;
            let reported = &tuner.cv_results().unwrap()[i];
            prop_assert!(reported.fold_losses.iter().zip(&losses).all(|(a, b)| (a - b).abs() < 1e-12));
            if best.is_none_or(|(_, m)| mean < m) {
                best = Some((*k, mean));
            }
        }
        prop_assert_eq!(tuner.best_params().unwrap().get("k"), Some(&ParamValue::Int(best.unwrap().0)));
    }

    #[test]
    fn ses_level_follows_the_recursion(values in prop::collection::vec(-100.0f64..100.0, 1..30), alpha in 0.01f64..1.0) {
        let mut f = SimpleExpSmoothing::new(alpha);
        f.fit(&TimeSeries::from_values(values.clone()).unwrap()).unwrap();
        let oracle = values[1..].iter().fold(values[0], |l, y| alpha * y + (1.0 - alpha) * l);
        prop_assert!((f.level().unwrap() - oracle).abs() <= 1e-12 * oracle.abs().max(1.0));
    }
}
