//! Scenario comparison.
//!
//! Per (fleet, range) condition, daily HI or PSD values are regressed on the
//! scenario indicators with a log-link Gamma GLM. The day-level random effect
//! of a mixed model is approximated by standard errors clustered on day, and
//! each indicator is cross-checked with a paired sign-flip permutation test
//! against scenario 1.

mod analysis;
mod glm;
mod inference;
mod robust;

use chrono::NaiveDate;
use nalgebra::DMatrix;
use thiserror::Error;

use crate::sim::Scenario;

pub use analysis::{
    analyze, write_flat_csv, AnalysisOptions, FitReport, IndicatorTriple, Response, FLAT_HEADER,
};
pub use glm::{fit_gamma_log, gamma_deviance, GlmFit, DEVIANCE_TOLERANCE, MAX_ITERATIONS};
pub use inference::{
    paired_permutation_test, wald_pvalue, PermutationResult, EXACT_MAX_PAIRS, MONTE_CARLO_FLIPS,
};
pub use robust::{cluster_robust_covariance, cluster_robust_se, standard_errors};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("need at least 5 rows and more rows than the {params} parameters, got {rows}")]
    TooFewRows { rows: usize, params: usize },
    #[error("responses must be finite and positive, found {0}")]
    NonPositiveResponse(f64),
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("need at least 2 clusters, found {0}")]
    TooFewClusters(usize),
    #[error("fit did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("{0}")]
    Data(String),
}

/// Scenario indicators `(x1, x2, x3)`; scenario 1 is the baseline.
pub fn encode_scenario(s: Scenario) -> [u8; 3] {
    match s {
        Scenario::S1 => [0, 0, 0],
        Scenario::S2 => [1, 0, 0],
        Scenario::S3 => [0, 1, 0],
        Scenario::S4 => [0, 0, 1],
    }
}

/// One regression observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignRow {
    pub y: f64,
    pub x: [u8; 3],
    pub day: NaiveDate,
}

impl DesignRow {
    pub fn new(y: f64, scenario: Scenario, day: NaiveDate) -> Self {
        Self { y, x: encode_scenario(scenario), day }
    }
}

/// Intercept plus the three indicators.
pub fn design_matrix(rows: &[DesignRow]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), 4, |i, j| if j == 0 { 1.0 } else { rows[i].x[j - 1] as f64 })
}

/// A fitted scenario regression with day-clustered covariance.
#[derive(Debug, Clone)]
pub struct ScenarioFit {
    pub glm: GlmFit,
    pub cov_cluster: DMatrix<f64>,
    pub se_cluster: Vec<f64>,
    /// Wald p-values for x1, x2, x3.
    pub p_values: [f64; 3],
}

pub fn fit_gamma_glm(rows: &[DesignRow]) -> Result<GlmFit, StatsError> {
    let y: Vec<f64> = rows.iter().map(|r| r.y).collect();
    fit_gamma_log(&design_matrix(rows), &y)
}

/// Fit, cluster on day, and test the indicators. Fails if IRLS does not
/// converge.
pub fn fit_scenarios(rows: &[DesignRow]) -> Result<ScenarioFit, StatsError> {
    let x = design_matrix(rows);
    let y: Vec<f64> = rows.iter().map(|r| r.y).collect();
    let days: Vec<NaiveDate> = rows.iter().map(|r| r.day).collect();
    let glm = fit_gamma_log(&x, &y)?;
    let cov_cluster = cluster_robust_covariance(&glm, &x, &y, &days)?;
    let se_cluster = standard_errors(&cov_cluster);
    let p_values = [1, 2, 3].map(|k| wald_pvalue(glm.beta[k], se_cluster[k]));
    Ok(ScenarioFit { glm, cov_cluster, se_cluster, p_values })
}
