use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::{GlmFit, StatsError};

/// Cluster-robust (sandwich) covariance for a log-link Gamma fit.
///
/// Scores are xᵢ (yᵢ − μᵢ)/μᵢ, summed within each cluster; the meat is the sum
/// of outer products of those cluster scores and the bread is (XᵀX)⁻¹. The
/// result is scaled by G/(G−1) · (n−1)/(n−p).
pub fn cluster_robust_covariance<K: Ord>(
    fit: &GlmFit,
    x: &DMatrix<f64>,
    y: &[f64],
    clusters: &[K],
) -> Result<DMatrix<f64>, StatsError> {
    let (n, p) = x.shape();
    if y.len() != n || clusters.len() != n || fit.fitted.len() != n || fit.n_params() != p {
        return Err(StatsError::Shape("fit, design, response and clusters disagree".into()));
    }
    if !fit.converged {
        return Err(StatsError::NotConverged { iterations: fit.iterations });
    }
    // BTreeMap keeps the summation order independent of row order within
    // cluster boundaries.
    let mut sums: BTreeMap<&K, DVector<f64>> = BTreeMap::new();
    for i in 0..n {
        let mu = fit.fitted[i];
        let r = (y[i] - mu) / mu;
        let score = x.row(i).transpose() * r;
        *sums.entry(&clusters[i]).or_insert_with(|| DVector::zeros(p)) += score;
    }
    let g = sums.len();
    if g < 2 {
        return Err(StatsError::TooFewClusters(g));
    }
    let mut meat = DMatrix::<f64>::zeros(p, p);
    for s in sums.values() {
        meat += s * s.transpose();
    }
    let factor = (g as f64 / (g - 1) as f64) * ((n - 1) as f64 / (n - p) as f64);
    let cov = &fit.bread * meat * &fit.bread * factor;
    // Symmetrise away rounding asymmetry.
    Ok((&cov + cov.transpose()) * 0.5)
}

pub fn standard_errors(cov: &DMatrix<f64>) -> Vec<f64> {
    cov.diagonal().iter().map(|v| v.max(0.0).sqrt()).collect()
}

/// Convenience wrapper returning standard errors only.
pub fn cluster_robust_se<K: Ord>(
    fit: &GlmFit,
    x: &DMatrix<f64>,
    y: &[f64],
    clusters: &[K],
) -> Result<Vec<f64>, StatsError> {
    cluster_robust_covariance(fit, x, y, clusters).map(|c| standard_errors(&c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::fit_gamma_log;

    #[test]
    fn zero_residuals_give_zero_se() {
        let x = DMatrix::from_fn(6, 2, |i, j| if j == 0 { 1.0 } else { (i % 2) as f64 });
        let y = [1.0, 2.0, 1.0, 2.0, 1.0, 2.0];
        let fit = fit_gamma_log(&x, &y).unwrap();
        let se = cluster_robust_se(&fit, &x, &y, &[0, 0, 1, 1, 2, 2]).unwrap();
        assert!(se.iter().all(|s| *s < 1e-12), "{se:?}");
    }

    #[test]
    fn needs_two_clusters() {
        let x = DMatrix::from_element(6, 1, 1.0);
        let y = [1.0, 2.0, 3.0, 1.0, 2.0, 3.0];
        let fit = fit_gamma_log(&x, &y).unwrap();
        assert!(matches!(cluster_robust_se(&fit, &x, &y, &[7; 6]), Err(StatsError::TooFewClusters(1))));
        assert!(matches!(cluster_robust_se(&fit, &x, &y, &[7; 5]), Err(StatsError::Shape(_))));
    }

    #[test]
    fn covariance_is_symmetric_psd() {
        let x = DMatrix::from_fn(12, 2, |i, j| if j == 0 { 1.0 } else { (i % 3) as f64 });
        let y: Vec<f64> = (0..12).map(|i| 0.3 + 0.1 * ((i * 7) % 5) as f64).collect();
        let fit = fit_gamma_log(&x, &y).unwrap();
        let cov = cluster_robust_covariance(&fit, &x, &y, &[0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3]).unwrap();
        assert_eq!(cov, cov.transpose());
        let eig = cov.symmetric_eigenvalues();
        assert!(eig.iter().all(|e| *e > -1e-15), "{eig}");
    }
}
