//! End-to-end experiments: each one builds a geometric configuration, runs
//! the estimators against oracle-backed reference values, and emits a
//! self-contained report.

mod report;
mod runners;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::caratheodory::CoverConfig;
use crate::density::SearchBudget;
use crate::error::{GmtError, Result};

pub use report::{Check, Quantity, Report, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    EuclideanArea,
    SphericalAreaKoranyi,
    SphericalAreaCc,
    DensityGap,
    RatioBound,
    Sigma2Chain,
    FedererInequalities,
}

impl ExperimentKind {
    pub fn all() -> [ExperimentKind; 7] {
        [
            ExperimentKind::EuclideanArea,
            ExperimentKind::SphericalAreaKoranyi,
            ExperimentKind::SphericalAreaCc,
            ExperimentKind::DensityGap,
            ExperimentKind::RatioBound,
            ExperimentKind::Sigma2Chain,
            ExperimentKind::FedererInequalities,
        ]
    }

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::EuclideanArea => "euclidean_area",
            ExperimentKind::SphericalAreaKoranyi => "spherical_area_koranyi",
            ExperimentKind::SphericalAreaCc => "spherical_area_cc",
            ExperimentKind::DensityGap => "density_gap",
            ExperimentKind::RatioBound => "ratio_bound",
            ExperimentKind::Sigma2Chain => "sigma2_chain",
            ExperimentKind::FedererInequalities => "federer_inequalities",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        ExperimentKind::all()
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| GmtError::Invalid(format!("unknown experiment '{s}'")))
    }
}

/// Comparison tolerances. Cover-based quantities carry one-sided estimator
/// bias, density estimates carry search noise, and closed-form-backed
/// constants should be tight.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub cover_rel: f64,
    pub density_rel: f64,
    pub constant_abs: f64,
    /// Euclidean segment covers are near-exact, so the sanity experiment is
    /// held to a tighter bar.
    pub euclidean_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cover_rel: 0.05,
            density_rel: 0.03,
            constant_abs: 1e-3,
            euclidean_rel: 0.02,
        }
    }
}

/// Numeric effort knobs, each within a documented range (see `validate`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    /// Quadrature samples for curve measures.
    pub quad_samples: usize,
    /// Radial grid of the unit-ball profile.
    pub profile_radial: usize,
    /// Vertical scan per radial station of the profile.
    pub profile_t: usize,
    /// Randomized finite instances for the inequality suite.
    pub instances: usize,
    pub search: SearchBudget,
    pub cover: CoverConfig,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            quad_samples: 65_537,
            profile_radial: 96,
            profile_t: 384,
            instances: 200,
            search: SearchBudget::default(),
            cover: CoverConfig::default(),
        }
    }
}

impl Budgets {
    pub fn validate(&self) -> Result<()> {
        if !(1_025..=1 << 22).contains(&self.quad_samples) {
            return Err(GmtError::Invalid("quad_samples must lie in [1025, 2^22]".into()));
        }
        if !(64..=4_096).contains(&self.profile_radial) || !(256..=65_536).contains(&self.profile_t) {
            return Err(GmtError::Invalid(
                "profile grid must satisfy radial in [64, 4096], t in [256, 65536]".into(),
            ));
        }
        if !(1..=10_000).contains(&self.instances) {
            return Err(GmtError::Invalid("instances must lie in [1, 10000]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub budgets: Budgets,
}

fn default_seed() -> u64 {
    42
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            seed: default_seed(),
            tolerances: Tolerances::default(),
            budgets: Budgets::default(),
        }
    }

    pub fn with_seed(experiment: ExperimentKind, seed: u64) -> Self {
        ExperimentConfig { seed, ..ExperimentConfig::new(experiment) }
    }
}

/// Runs one experiment; estimator failures become failed checks in the
/// report, never a crash.
pub fn run(config: &ExperimentConfig) -> Report {
    let started = Instant::now();
    let echo = serde_json::to_value(config).unwrap_or(serde_json::Value::Null);
    let mut report = Report::new(config.experiment.name(), config.seed, echo);
    let outcome = config.budgets.validate().and_then(|_| match config.experiment {
        ExperimentKind::EuclideanArea => runners::euclidean_area(config, &mut report),
        ExperimentKind::SphericalAreaKoranyi => {
            runners::spherical_area(config, &mut report, crate::heisenberg::HMetric::Koranyi)
        }
        ExperimentKind::SphericalAreaCc => {
            runners::spherical_area(config, &mut report, crate::heisenberg::HMetric::Cc)
        }
        ExperimentKind::DensityGap => runners::density_gap(config, &mut report),
        ExperimentKind::RatioBound => runners::ratio_bound(config, &mut report),
        ExperimentKind::Sigma2Chain => runners::sigma2_chain(config, &mut report),
        ExperimentKind::FedererInequalities => runners::federer_inequalities(config, &mut report),
    });
    if let Err(err) = outcome {
        report.error(config.experiment.name(), &err);
    }
    report.finalize(started);
    report
}

/// The full suite with one shared seed, in declaration order.
pub fn run_all(seed: u64) -> Vec<Report> {
    ExperimentKind::all()
        .into_iter()
        .map(|kind| run(&ExperimentConfig::with_seed(kind, seed)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for kind in ExperimentKind::all() {
            assert_eq!(ExperimentKind::parse(kind.name()).unwrap(), kind);
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json, format!("\"{}\"", kind.name()));
        }
        assert!(ExperimentKind::parse("nope").is_err());
    }

    #[test]
    fn config_defaults_deserialize() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"experiment": "ratio_bound"}"#).unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::RatioBound);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.budgets.instances, 200);
        assert!(cfg.budgets.validate().is_ok());
    }

    #[test]
    fn bad_budgets_fail_the_report_not_the_process() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::RatioBound);
        cfg.budgets.instances = 0;
        let report = run(&cfg);
        assert!(!report.passed);
        assert!(report.checks.iter().any(|c| !c.passed));
    }
}
