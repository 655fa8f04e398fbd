use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{build_supervised, check_component_names, composite_tags, finish, remaining, structural_entries};
use crate::data::{Label, LabelVector, Table};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::estimator::{apply_blueprint, blueprint, restore_component, AnyEstimator, Estimator, FormalObject, SupervisedLearner};
use crate::learners::majority_label;
use crate::params::{EstimatorSpec, ParamMap, ParamSpec, ParamValue, TagMap};
use crate::registry::Registry;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregator {
    /// Arithmetic mean of real predictions.
    Mean,
    /// Most frequent label; ties go to the canonically smallest label.
    MajorityVote,
}

impl Aggregator {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregator::Mean => "mean",
            Aggregator::MajorityVote => "majority_vote",
        }
    }

    /// The aggregator suited to members of `scitype`.
    pub fn for_scitype(scitype: &str) -> Option<Aggregator> {
        match scitype {
            "supervised_regressor" => Some(Aggregator::Mean),
            "supervised_classifier" => Some(Aggregator::MajorityVote),
            _ => None,
        }
    }

    fn check(self, scitype: &str) -> Result<()> {
        if Aggregator::for_scitype(scitype) == Some(self) {
            Ok(())
        } else {
            Err(Error::AggregatorMismatch {
                aggregator: self.as_str().to_string(),
                scitype: scitype.to_string(),
            })
        }
    }
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Aggregator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Aggregator::Mean),
            "majority_vote" => Ok(Aggregator::MajorityVote),
            other => Err(Error::domain("aggregator", other, "one of {mean, majority_vote}")),
        }
    }
}

/// `(SupervisedLearner)^n → SupervisedLearner`: fits every member on the
/// same data and aggregates their predictions.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<(String, Box<dyn SupervisedLearner>)>,
    aggregator: Aggregator,
    fitted: bool,
}

impl Ensemble {
    pub fn new(members: Vec<(String, Box<dyn SupervisedLearner>)>, aggregator: Aggregator) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(Error::InvalidComposition("an ensemble needs at least one member".into()));
        };
        let scitype = first.scitype().to_string();
        check_component_names(members.iter().map(|(n, _)| n.as_str()))?;
        if let Some((name, m)) = members.iter().find(|(_, m)| m.scitype() != scitype) {
            return Err(Error::InvalidComposition(format!(
                "member `{name}` is a {}, others are {scitype}",
                m.scitype()
            )));
        }
        aggregator.check(&scitype)?;
        let mut e = Ensemble {
            members,
            aggregator,
            fitted: false,
        };
        e.reset();
        Ok(e)
    }

    /// Registry constructor. Defaults to the mean of `m0: MeanRegressor`
    /// and `m1: LinearRegressor`; without an explicit `aggregator` the one
    /// matching the members' scitype is used.
    pub fn from_params(registry: &Registry, params: &ParamMap) -> Result<AnyEstimator> {
        let mut structure = structural_entries(params);
        if structure.is_empty() {
            structure = vec![
                ("m0".into(), EstimatorSpec::new("MeanRegressor")),
                ("m1".into(), EstimatorSpec::new("LinearRegressor")),
            ];
        }
        let members = structure
            .iter()
            .map(|(name, spec)| Ok((name.clone(), build_supervised(registry, name, spec)?)))
            .collect::<Result<Vec<_>>>()?;
        let aggregator = match params.get("aggregator") {
            Some(v) => v
                .as_str()
                .ok_or_else(|| Error::domain("aggregator", v, "one of {mean, majority_vote}"))?
                .parse()?,
            None => members
                .first()
                .and_then(|(_, m)| Aggregator::for_scitype(m.scitype()))
                .unwrap_or(Aggregator::Mean),
        };
        let e = Ensemble::new(members, aggregator)?;
        finish(AnyEstimator::supervised(e), &remaining(params, &["aggregator"]))
    }

    pub fn aggregator(&self) -> Aggregator {
        self.aggregator
    }
}

impl FormalObject for Ensemble {
    fn kind(&self) -> &str {
        "Ensemble"
    }

    fn scitype(&self) -> &str {
        self.members[0].1.scitype()
    }

    fn param_specs(&self) -> Vec<ParamSpec> {
        let mut specs: Vec<ParamSpec> = self
            .members
            .iter()
            .map(|(name, m)| {
                ParamSpec::new(
                    name.as_str(),
                    Domain::Estimator {
                        scitype: self.scitype().to_string(),
                    },
                    blueprint(m.as_ref()),
                )
            })
            .collect();
        specs.push(ParamSpec::new(
            "aggregator",
            Domain::choice(&["mean", "majority_vote"]),
            self.aggregator.as_str(),
        ));
        specs
    }

    fn params(&self) -> ParamMap {
        let mut out = ParamMap::new();
        for (name, m) in &self.members {
            out.insert(name.as_str(), blueprint(m.as_ref()));
        }
        out.insert("aggregator", self.aggregator.as_str());
        out
    }

    fn tags(&self) -> TagMap {
        let components: Vec<&dyn Estimator> = self.members.iter().map(|(_, m)| m.as_ref() as &dyn Estimator).collect();
        let features = components[0].tags().get("feature_scitypes").cloned();
        composite_tags(self.scitype(), &components, features)
    }

    fn domain(&self) -> Domain {
        let mut labels: Vec<Label> = Vec::new();
        for (_, m) in &self.members {
            match m.domain() {
                Domain::Labels(l) => labels.extend(l),
                other => return other,
            }
        }
        labels.sort();
        labels.dedup();
        Domain::Labels(labels)
    }
}

impl Estimator for Ensemble {
    fn set_param(&mut self, name: &str, value: &ParamValue) -> Result<()> {
        if name == "aggregator" {
            let aggregator: Aggregator = value.as_str().expect("validated").parse()?;
            aggregator.check(self.scitype())?;
            self.aggregator = aggregator;
            return Ok(());
        }
        let spec = value.as_estimator().expect("validated");
        let target = self
            .component_mut(name)
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))?;
        apply_blueprint(target, name, spec)
    }

    fn is_fitted(&self) -> bool {
        self.fitted
    }

    fn fitted_params(&self) -> Result<ParamMap> {
        if !self.fitted {
            return Err(Error::NotFitted);
        }
        let mut state = ParamMap::new();
        for (name, m) in &self.members {
            state.extend_prefixed(name, m.fitted_params()?);
        }
        Ok(state)
    }

    fn restore_fitted(&mut self, state: &ParamMap) -> Result<()> {
        for (name, m) in &mut self.members {
            restore_component(m.as_mut(), name, state)?;
        }
        self.fitted = true;
        Ok(())
    }

    fn reset(&mut self) {
        self.fitted = false;
        for (_, m) in &mut self.members {
            m.reset();
        }
    }

    fn components(&self) -> Vec<(&str, &dyn Estimator)> {
        self.members
            .iter()
            .map(|(n, m)| (n.as_str(), m.as_ref() as &dyn Estimator))
            .collect()
    }

    fn component_mut(&mut self, name: &str) -> Option<&mut dyn Estimator> {
        self.members
            .iter_mut()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m.as_mut() as &mut dyn Estimator)
    }
}

impl SupervisedLearner for Ensemble {
    fn fit(&mut self, x: &Table, y: &LabelVector) -> Result<()> {
        self.reset();
        let outcomes: Vec<Result<()>> = self
            .members
            .par_iter_mut()
            .map(|(name, m)| m.fit(x, y).map_err(Error::in_component(name)))
            .collect();
        outcomes.into_iter().collect::<Result<()>>()?;
        self.fitted = true;
        Ok(())
    }

    fn predict(&self, x: &Table) -> Result<LabelVector> {
        if !self.fitted {
            return Err(Error::NotFitted);
        }
        let predictions = self
            .members
            .iter()
            .map(|(name, m)| m.predict(x).map_err(Error::in_component(name)))
            .collect::<Result<Vec<_>>>()?;
        let n = x.n_rows();
        match self.aggregator {
            Aggregator::Mean => {
                let columns = predictions
                    .iter()
                    .zip(&self.members)
                    .map(|(p, (name, _))| {
                        p.as_real()
                            .ok_or_else(|| Error::in_component(name)(Error::ScitypeMismatch { column: "y".into() }))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let m = columns.len() as f64;
                Ok(LabelVector::Real(
                    (0..n)
                        .map(|i| columns.iter().map(|c| c[i]).sum::<f64>() / m)
                        .collect(),
                ))
            }
            Aggregator::MajorityVote => {
                let columns = predictions
                    .iter()
                    .zip(&self.members)
                    .map(|(p, (name, _))| {
                        p.as_classes()
                            .ok_or_else(|| Error::in_component(name)(Error::ScitypeMismatch { column: "y".into() }))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(LabelVector::Classes(
                    (0..n)
                        .map(|i| majority_label(columns.iter().map(|c| &c[i])).expect("at least one member"))
                        .collect(),
                ))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{LinearRegressor, MajorityDummyClassifier, MeanRegressor, NearestNeighborClassifier};

    fn regression() -> (Table, LabelVector) {
        let x = Table::from_rows(
            &["a", "b"],
            &[vec![0.0, 1.0], vec![1.0, 3.0], vec![2.0, 2.0], vec![3.0, 5.0], vec![4.0, 4.5]],
        )
        .unwrap();
        (x, LabelVector::Real(vec![1.0, 2.5, 2.9, 4.7, 5.2]))
    }

    fn boxed(m: impl SupervisedLearner + 'static) -> Box<dyn SupervisedLearner> {
        Box::new(m)
    }

    #[test]
    fn identical_mean_members_equal_a_single_member() {
        let (x, y) = regression();
        let mut e = Ensemble::new(
            vec![("a".into(), boxed(MeanRegressor::new())), ("b".into(), boxed(MeanRegressor::new()))],
            Aggregator::Mean,
        )
        .unwrap();
        e.fit(&x, &y).unwrap();
        let mut single = MeanRegressor::new();
        single.fit(&x, &y).unwrap();
        assert!(e.predict(&x).unwrap().bit_eq(&single.predict(&x).unwrap()));
    }

    #[test]
    fn three_member_mean_is_the_arithmetic_mean() {
        let (x, y) = regression();
        let members = vec![
            ("m0".to_string(), boxed(MeanRegressor::new())),
            ("m1".to_string(), boxed(LinearRegressor::new())),
            ("m2".to_string(), boxed(LinearRegressor::with_ridge(0.5))),
        ];
        let mut oracle = Vec::new();
        for (_, m) in &members {
            let mut m = m.clone();
            m.fit(&x, &y).unwrap();
            oracle.push(m.predict(&x).unwrap().as_real().unwrap().to_vec());
        }
        let mut e = Ensemble::new(members, Aggregator::Mean).unwrap();
        e.fit(&x, &y).unwrap();
        let got = e.predict(&x).unwrap();
        for (i, v) in got.as_real().unwrap().iter().enumerate() {
            let expected = (oracle[0][i] + oracle[1][i] + oracle[2][i]) / 3.0;
            assert!((v - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn vote_tie_goes_to_canonical_first_label() {
        // The dummy always says `b`; 1-NN says `a` near x = 2, giving a 1–1 tie.
        let x = Table::from_rows(&["f"], &[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let y = LabelVector::classes(["b", "b", "a"]);
        let mut e = Ensemble::new(
            vec![
                ("dummy".into(), boxed(MajorityDummyClassifier::new())),
                ("knn".into(), boxed(NearestNeighborClassifier::new(1))),
            ],
            Aggregator::MajorityVote,
        )
        .unwrap();
        e.fit(&x, &y).unwrap();
        let q = Table::from_rows(&["f"], &[vec![2.0], vec![0.0]]).unwrap();
        assert_eq!(e.predict(&q).unwrap(), LabelVector::classes(["a", "b"]));
    }

    #[test]
    fn aggregator_must_match_scitype() {
        let err = Ensemble::new(vec![("k".into(), boxed(NearestNeighborClassifier::new(1)))], Aggregator::Mean).unwrap_err();
        assert!(matches!(err, Error::AggregatorMismatch { .. }));
        let err = Ensemble::new(vec![("m".into(), boxed(MeanRegressor::new()))], Aggregator::MajorityVote).unwrap_err();
        assert!(matches!(err, Error::AggregatorMismatch { .. }));
        let mut e = Ensemble::new(vec![("m".into(), boxed(MeanRegressor::new()))], Aggregator::Mean).unwrap();
        let err = e.set_param("aggregator", &ParamValue::from("majority_vote")).unwrap_err();
        assert!(matches!(err, Error::AggregatorMismatch { .. }));
    }

    #[test]
    fn mixed_member_scitypes_are_rejected() {
        let err = Ensemble::new(
            vec![
                ("m".into(), boxed(MeanRegressor::new())),
                ("k".into(), boxed(NearestNeighborClassifier::new(1))),
            ],
            Aggregator::Mean,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidComposition(_)));
    }
}
