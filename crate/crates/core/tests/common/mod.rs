//! Independent oracles shared by the integration suites.
//!
//! Nothing in here calls into the library's numeric paths: least squares is
//! solved in exact rational arithmetic, Student-t tails and beta integrals by
//! adaptive Gauss-Kronrod quadrature, and gamma normalisers by exact
//! factorial-style recurrences.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

// ---------------------------------------------------------------------------
// Exact rational linear algebra
// ---------------------------------------------------------------------------

pub fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("representable")
}

/// Gauss-Jordan inverse with exact pivots. Returns `None` when singular.
pub fn rational_inverse(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { BigRational::one() } else { BigRational::zero() });
            }
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v = &*v / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in 0..2 * n {
                    let delta = &factor * &a[col][c];
                    a[r][c] = &a[r][c] - delta;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Exact solve of `m x = rhs`, rounded once to f64 at the end.
pub fn rational_solve(m: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let mr: Vec<Vec<BigRational>> = m.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect();
    let inv = rational_inverse(&mr).expect("non-singular");
    inv.iter()
        .map(|row| {
            let s = row
                .iter()
                .zip(rhs)
                .fold(BigRational::zero(), |acc, (a, &b)| acc + a * rat(b));
            to_f64(&s)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct OracleFit {
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    pub r_squared: f64,
    pub ser: f64,
    pub residuals: Vec<f64>,
}

/// Textbook through-origin OLS: beta = (X'X)^-1 X'y, sigma^2 = SSR/(n-k),
/// cov = sigma^2 (X'X)^-1, R^2 = 1 - SSR / sum(y^2). Columns are predictors.
pub fn ols_oracle(columns: &[Vec<f64>], y: &[f64]) -> OracleFit {
    let k = columns.len();
    let n = y.len();
    let xc: Vec<Vec<BigRational>> = columns
        .iter()
        .map(|c| c.iter().map(|&v| rat(v)).collect())
        .collect();
    let yr: Vec<BigRational> = y.iter().map(|&v| rat(v)).collect();
    let dot = |a: &[BigRational], b: &[BigRational]| {
        a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
    };
    let xtx: Vec<Vec<BigRational>> = (0..k)
        .map(|i| (0..k).map(|j| dot(&xc[i], &xc[j])).collect())
        .collect();
    let xty: Vec<BigRational> = (0..k).map(|i| dot(&xc[i], &yr)).collect();
    let inv = rational_inverse(&xtx).expect("full rank oracle input");
    let beta: Vec<BigRational> = (0..k).map(|i| dot(&inv[i], &xty)).collect();
    let residuals: Vec<BigRational> = (0..n)
        .map(|r| {
            let fitted = (0..k).fold(BigRational::zero(), |acc, j| acc + &beta[j] * &xc[j][r]);
            &yr[r] - fitted
        })
        .collect();
    let ssr = dot(&residuals, &residuals);
    let sst = dot(&yr, &yr);
    let dof = n - k;
    let sigma2 = &ssr / BigRational::from_integer(BigInt::from(dof));
    let r2 = BigRational::one() - &ssr / &sst;
    let coefficients: Vec<f64> = beta.iter().map(to_f64).collect();
    let standard_errors: Vec<f64> = (0..k).map(|j| to_f64(&(&sigma2 * &inv[j][j])).sqrt()).collect();
    let t_stats: Vec<f64> = coefficients
        .iter()
        .zip(&standard_errors)
        .map(|(b, s)| b / s)
        .collect();
    let p_values = t_stats.iter().map(|&t| t_tail_two_sided(t, dof as u32)).collect();
    OracleFit {
        coefficients,
        standard_errors,
        t_stats,
        p_values,
        r_squared: to_f64(&r2),
        ser: to_f64(&sigma2).sqrt(),
        residuals: residuals.iter().map(to_f64).collect(),
    }
}

pub fn rational_abs_max(v: &[BigRational]) -> BigRational {
    v.iter().map(|x| x.abs()).fold(BigRational::zero(), |a, b| if b > a { b } else { a })
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = K15_WEIGHTS[7] * f(c);
    let mut gauss = G7_WEIGHTS[3] * f(c);
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        kronrod += K15_WEIGHTS[i] * s;
        if i % 2 == 1 {
            gauss += G7_WEIGHTS[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (est, err) = gk15(f, a, b);
    if err <= tol || depth == 0 || (b - a).abs() < 1e-15 {
        return est;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, tol / 2.0, depth - 1) + adapt(f, m, b, tol / 2.0, depth - 1)
}

/// Adaptive Gauss-Kronrod on [a, b] with a tolerance relative to a coarse
/// first estimate (floored at `abs_floor`).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel: f64, abs_floor: f64) -> f64 {
    let coarse = adapt(&f, a, b, abs_floor, 8).abs();
    adapt(&f, a, b, (coarse * rel).max(abs_floor), 50)
}

/// ln Gamma(m/2) for a positive integer m by the exact half-integer recurrence.
pub fn ln_gamma_half_integer(m: u32) -> f64 {
    assert!(m >= 1);
    let (mut acc, mut x) = if m.is_multiple_of(2) {
        (0.0f64, 1.0f64)
    } else {
        (0.5 * std::f64::consts::PI.ln(), 0.5f64)
    };
    while 2.0 * x < m as f64 {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

fn t_ln_normaliser(dof: u32) -> f64 {
    ln_gamma_half_integer(dof + 1)
        - ln_gamma_half_integer(dof)
        - 0.5 * (dof as f64 * std::f64::consts::PI).ln()
}

pub fn t_density(s: f64, dof: u32) -> f64 {
    let nu = dof as f64;
    (t_ln_normaliser(dof) - 0.5 * (nu + 1.0) * (s * s / nu).ln_1p()).exp()
}

/// P(|T| >= |t|) by integrating the density over the tail after the map
/// s = |t| + u / (1 - u).
pub fn t_tail_two_sided(t: f64, dof: u32) -> f64 {
    let t0 = t.abs();
    let nu = dof as f64;
    let ln_c = t_ln_normaliser(dof);
    let g = |u: f64| {
        if u >= 1.0 {
            return 0.0;
        }
        let w = 1.0 - u;
        let s = t0 + u / w;
        (ln_c - 0.5 * (nu + 1.0) * (s * s / nu).ln_1p()).exp() / (w * w)
    };
    (2.0 * integrate(g, 0.0, 1.0, 1e-13, 1e-300)).min(1.0)
}

/// Integral of t^(a-1) (1-t)^(b-1) over [lo, hi] within [0, 1/2]. For a < 1
/// the substitution t = u^(1/a) removes the singularity at 0.
fn beta_left(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    if a < 1.0 {
        let g = |u: f64| (1.0 - u.powf(1.0 / a)).powf(b - 1.0) / a;
        integrate(g, lo.powf(a), hi.powf(a), 1e-14, 1e-300)
    } else {
        let g = |t: f64| t.powf(a - 1.0) * (1.0 - t).powf(b - 1.0);
        integrate(g, lo, hi, 1e-14, 1e-300)
    }
}

/// I_x(a, b) as a ratio of two quadratures of t^(a-1) (1-t)^(b-1), split at
/// 1/2 and reflected so each piece has its only possible singularity at 0.
pub fn beta_reg_quadrature(a: f64, b: f64, x: f64) -> f64 {
    let half_left = beta_left(a, b, 0.0, 0.5);
    let half_right = beta_left(b, a, 0.0, 0.5);
    let part = if x <= 0.5 {
        beta_left(a, b, 0.0, x)
    } else {
        half_left + beta_left(b, a, 1.0 - x, 0.5)
    };
    part / (half_left + half_right)
}

// ---------------------------------------------------------------------------
// Seeded synthetic data
// ---------------------------------------------------------------------------

pub struct Synthetic {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

/// Predictors uniform on [0.5, 10], response = sum beta_j x_j + N(0, sd).
pub fn synthetic(seed: u64, n: usize, betas: &[f64], noise_sd: f64) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_sd).unwrap();
    let columns: Vec<Vec<f64>> = betas
        .iter()
        .map(|_| (0..n).map(|_| rng.random_range(0.5..10.0)).collect())
        .collect();
    let y = (0..n)
        .map(|r| {
            betas
                .iter()
                .zip(&columns)
                .map(|(b, c)| b * c[r])
                .sum::<f64>()
                + noise.sample(&mut rng)
        })
        .collect();
    Synthetic {
        names: (1..=betas.len()).map(|i| format!("x{i}")).collect(),
        columns,
        y,
    }
}

/// Two real signals (3 x1 + 2 x2) plus one pure-noise candidate x3.
pub fn two_signal_one_noise(seed: u64, n: usize) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let columns: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..n).map(|_| rng.random_range(0.5..10.0)).collect())
        .collect();
    let y = (0..n)
        .map(|r| 3.0 * columns[0][r] + 2.0 * columns[1][r] + noise.sample(&mut rng))
        .collect();
    Synthetic {
        names: vec!["x1".into(), "x2".into(), "x3".into()],
        columns,
        y,
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs());
    scale == 0.0 || (a - b).abs() <= tol * scale
}
