//! Scitype contract checker.
//!
//! Every report lists every check id once. Checks that do not apply to a
//! kind are skipped with the scitype or tag that exempts it. The checker
//! only reads the registry and works on clones.

mod checks;
pub mod defects;
mod fixtures;
mod report;

pub use checks::{check_all, check_distribution, check_estimator, check_instance, CHECK_IDS};
pub use fixtures::Fixture;
pub use report::{reports_to_json, CheckResult, ConformanceReport, Status, Summary};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::Registry;

    #[test]
    fn dummy_classifier_passes_universal_and_tabular_checks() {
        let report = check_estimator(&Registry::reference(), "MajorityDummyClassifier").unwrap();
        assert!(report.passed(), "{}", report.to_text());
        for id in ["params_roundtrip", "row_permutation_invariance", "schema_mismatch_error", "not_fitted_errors"] {
            assert_eq!(report.result(id).unwrap().status, Status::Pass, "{id}");
        }
    }

    #[test]
    fn forecasters_skip_tabular_checks() {
        let report = check_estimator(&Registry::reference(), "NaiveLastForecaster").unwrap();
        assert!(report.passed(), "{}", report.to_text());
        let row = report.result("row_permutation_invariance").unwrap();
        assert_eq!(row.status, Status::Skip);
        assert_eq!(row.skip_reason.as_deref(), Some("scitype: forecaster"));
    }

    #[test]
    fn every_check_appears_once() {
        let report = check_estimator(&Registry::reference(), "Pipeline").unwrap();
        let ids: Vec<&str> = report.results.iter().map(|r| r.check_id.as_str()).collect();
        assert_eq!(ids, CHECK_IDS);
        assert!(report
            .results
            .iter()
            .all(|r| (r.status == Status::Skip) == r.skip_reason.is_some()));
    }

    #[test]
    fn empty_registry_is_vacuously_clean() {
        assert!(check_all(&Registry::new()).is_empty());
    }

    #[test]
    fn unregistered_kind() {
        assert!(matches!(
            check_estimator(&Registry::reference(), "NoSuchKind"),
            Err(crate::error::Error::Unregistered(_))
        ));
    }
}
