use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::StatsError;

/// Up to this many pairs the sign-flip distribution is enumerated exactly.
pub const EXACT_MAX_PAIRS: usize = 20;
pub const MONTE_CARLO_FLIPS: usize = 10_000;
const ZERO_COEFFICIENT: f64 = 1e-12;

/// Two-sided normal-approximation p-value for β / se.
///
/// Coefficients below 1e-12 in magnitude count as zero and give p = 1, which
/// keeps rounding noise over a zero standard error from reading as p = 0. A
/// zero standard error with a real coefficient gives p = 0.
pub fn wald_pvalue(beta: f64, se: f64) -> f64 {
    if beta.abs() < ZERO_COEFFICIENT {
        return 1.0;
    }
    if se == 0.0 {
        return 0.0;
    }
    let z = (beta / se).abs();
    // 2(1 − Φ(z)) = erfc(z/√2)
    libm::erfc(z / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PermutationResult {
    pub p_value: f64,
    pub exact: bool,
    pub flips: u64,
}

/// Paired sign-flip test on the mean difference `a − b`.
///
/// Exact (all 2ⁿ flips) for n ≤ 20, where p counts flips whose |Σ sᵢdᵢ| is at
/// least the observed one. Larger samples use 10,000 seeded random flips with
/// p = (1 + hits) / (1 + flips).
pub fn paired_permutation_test(a: &[f64], b: &[f64], seed: u64) -> Result<PermutationResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::Shape(format!("paired samples differ in length: {} vs {}", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(StatsError::TooFewRows { rows: a.len(), params: 1 });
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if d.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::Shape("non-finite paired difference".into()));
    }
    let n = d.len();
    if d.iter().all(|v| *v == 0.0) {
        return Ok(PermutationResult { p_value: 1.0, exact: n <= EXACT_MAX_PAIRS, flips: 0 });
    }
    let observed = d.iter().sum::<f64>().abs();
    // Flipped sums that equal the observed one up to rounding count as ties.
    let eps = 1e-12 * d.iter().map(|v| v.abs()).sum::<f64>();
    let extreme = |t: f64| t.abs() >= observed - eps;

    if n <= EXACT_MAX_PAIRS {
        let total = 1u64 << n;
        let hits = (0..total)
            .filter(|mask| {
                let t: f64 = d
                    .iter()
                    .enumerate()
                    .map(|(i, v)| if mask >> i & 1 == 1 { -v } else { *v })
                    .sum();
                extreme(t)
            })
            .count() as u64;
        Ok(PermutationResult { p_value: hits as f64 / total as f64, exact: true, flips: total })
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0u64;
        let mut bits = 0u64;
        let mut left = 0;
        for _ in 0..MONTE_CARLO_FLIPS {
            let mut t = 0.0;
            for v in &d {
                if left == 0 {
                    bits = rng.next_u64();
                    left = 64;
                }
                t += if bits & 1 == 1 { -v } else { *v };
                bits >>= 1;
                left -= 1;
            }
            hits += extreme(t) as u64;
        }
        let flips = MONTE_CARLO_FLIPS as u64;
        Ok(PermutationResult { p_value: (1 + hits) as f64 / (1 + flips) as f64, exact: false, flips })
    }
}
