//! Reference computations for the regression layer, written without the
//! library's linear algebra.
#![allow(dead_code, clippy::excessive_precision, clippy::needless_range_loop)]

use scootsim::sim::StreamRng;

/// Two-sided normal tail 2(1 − Φ(z)) at selected z, evaluated to 20
/// significant digits with 40-digit arithmetic.
pub const NORMAL_TAIL: [(f64, f64); 9] = [
    (0.0, 1.0),
    (0.5, 0.617_075_077_451_973_8),
    (1.0, 0.317_310_507_862_914_1),
    (1.959_963_984_540_054, 0.050_000_000_000_000_02),
    (2.5, 0.012_419_330_651_552_27),
    (3.290_526_731_491_894_5, 0.001_000_000_000_000_001_2),
    (4.0, 6.334_248_366_623_984e-5),
    (6.0, 1.973_175_290_075_396_3e-9),
    (8.5, 1.895_906_964_440_663_7e-17),
];

fn unit(rng: &mut StreamRng) -> f64 {
    // 53 random bits in (0, 1)
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

fn normal(rng: &mut StreamRng) -> f64 {
    let (u, v) = (unit(rng), unit(rng));
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

/// Gamma(shape, 1) for shape ≥ 1 by Marsaglia and Tsang's method.
pub fn gamma_unit(rng: &mut StreamRng, shape: f64) -> f64 {
    assert!(shape >= 1.0);
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = normal(rng);
        let v = (1.0 + c * x).powi(3);
        if v <= 0.0 {
            continue;
        }
        let u = unit(rng);
        if u.ln() < 0.5 * x * x + d - d * v + d * v.ln() {
            return d * v;
        }
    }
}

/// `n` rows cycling through the four scenario codings, with Gamma responses
/// of the given shape around μ = exp(xβ).
pub fn gamma_sample(n: usize, beta: [f64; 4], shape: f64, seed: u64) -> (Vec<[f64; 4]>, Vec<f64>) {
    let mut rng = StreamRng::from_seed(seed);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = [1.0, 0.0, 0.0, 0.0];
        if i % 4 > 0 {
            x[i % 4] = 1.0;
        }
        let eta: f64 = x.iter().zip(beta).map(|(a, b)| a * b).sum();
        ys.push(eta.exp() / shape * gamma_unit(&mut rng, shape));
        xs.push(x);
    }
    (xs, ys)
}

fn solve<const P: usize>(mut a: [[f64; P]; P], mut b: [f64; P]) -> [f64; P] {
    // Gaussian elimination with partial pivoting.
    for col in 0..P {
        let piv = (col..P).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..P {
            let f = a[row][col] / a[col][col];
            for k in col..P {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; P];
    for row in (0..P).rev() {
        let s: f64 = (row + 1..P).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Gamma deviance 2 Σ [y/μ − ln(y/μ) − 1].
pub fn deviance<const P: usize>(xs: &[[f64; P]], ys: &[f64], beta: &[f64; P]) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(x, &y)| {
            let mu = x.iter().zip(beta).map(|(a, b)| a * b).sum::<f64>().exp();
            2.0 * (y / mu - (y / mu).ln() - 1.0)
        })
        .sum()
}

/// Minimise the deviance by Newton's method on the observed Hessian
/// (Σ x xᵀ y/μ, not the expected information used by IRLS), starting from a
/// coarse grid over the intercept and halving steps that fail to descend.
pub fn newton_mle<const P: usize>(xs: &[[f64; P]], ys: &[f64]) -> [f64; P] {
    let mut beta = [0.0; P];
    let mut best = f64::INFINITY;
    for k in -200..=200 {
        let mut b = [0.0; P];
        b[0] = k as f64 * 0.025;
        let d = deviance(xs, ys, &b);
        if d < best {
            best = d;
            beta = b;
        }
    }
    for _ in 0..500 {
        let mut g = [0.0; P];
        let mut h = [[0.0; P]; P];
        for (x, &y) in xs.iter().zip(ys) {
            let mu = x.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>().exp();
            for i in 0..P {
                g[i] += x[i] * (1.0 - y / mu);
                for j in 0..P {
                    h[i][j] += x[i] * x[j] * y / mu;
                }
            }
        }
        let step = solve(h, g);
        let mut t = 1.0;
        let current = deviance(xs, ys, &beta);
        loop {
            let mut next = beta;
            for i in 0..P {
                next[i] -= t * step[i];
            }
            if deviance(xs, ys, &next) <= current || t < 1e-12 {
                beta = next;
                break;
            }
            t *= 0.5;
        }
        if step.iter().all(|s| s.abs() < 1e-14) {
            break;
        }
    }
    beta
}

/// Day-clustered sandwich for a saturated four-group design with three rows
/// per group, one per day. The bread for this balanced coding is
/// (1/3)·[[1,−1,−1,−1],[−1,2,1,1],[−1,1,2,1],[−1,1,1,2]], fitted means are
/// the group means, and the small-sample factor is 3/2 · 11/8.
pub fn manual_sandwich(y: &[[f64; 4]; 3]) -> [[f64; 4]; 4] {
    let bread = [
        [1.0, -1.0, -1.0, -1.0],
        [-1.0, 2.0, 1.0, 1.0],
        [-1.0, 1.0, 2.0, 1.0],
        [-1.0, 1.0, 1.0, 2.0],
    ]
    .map(|r| r.map(|v| v / 3.0));
    let mean: Vec<f64> = (0..4).map(|g| (y[0][g] + y[1][g] + y[2][g]) / 3.0).collect();
    let mut meat = [[0.0; 4]; 4];
    for day in y {
        let mut s = [0.0; 4];
        for g in 0..4 {
            let r = (day[g] - mean[g]) / mean[g];
            s[0] += r;
            if g > 0 {
                s[g] += r;
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                meat[i][j] += s[i] * s[j];
            }
        }
    }
    let mul = |a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]| {
        let mut c = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        c
    };
    let v = mul(&mul(&bread, &meat), &bread);
    v.map(|r| r.map(|x| x * 1.5 * 11.0 / 8.0))
}

/// Exact two-sided sign-flip p-value on integer differences by listing all
/// 2ⁿ sign patterns.
pub fn sign_flip_exact(d: &[i64]) -> f64 {
    let observed: i64 = d.iter().sum::<i64>().abs();
    let n = d.len();
    let mut hits = 0u64;
    for mask in 0u64..1 << n {
        let t: i64 = d.iter().enumerate().map(|(i, v)| if mask & (1 << i) != 0 { -v } else { *v }).sum();
        if t.abs() >= observed {
            hits += 1;
        }
    }
    hits as f64 / (1u64 << n) as f64
}
