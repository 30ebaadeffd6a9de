//! Through-origin least squares with full coefficient inference.
//!
//! The model is `y = Xβ + ε` with no intercept. Goodness of fit uses the
//! uncentered total sum of squares `Σy²`, which keeps R² inside [0, 1] for
//! zero-intercept fits; the centered value is kept as a diagnostic.

pub mod linalg;
pub mod special;

use std::collections::HashSet;

use thiserror::Error;

pub use linalg::{solve_normal_equations, SquareMatrix};
pub use special::{ln_gamma, regularized_incomplete_beta, t_two_sided_p};

/// Smallest accepted eigenvalue ratio of the unit-diagonal scaled `XᵀX`.
pub const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegressionError {
    #[error("design matrix is rank deficient: {0}")]
    RankDeficient(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("need more observations than predictors (n = {n}, k = {k})")]
    InsufficientObservations { n: usize, k: usize },
    #[error("design matrix is empty")]
    EmptyDesign,
    #[error("duplicate variable id `{0}`")]
    DuplicateVariable(String),
    #[error("non-finite value in `{0}`")]
    NonFinite(String),
    #[error("response is identically zero")]
    ZeroResponse,
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}

/// Named predictor columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    columns: Vec<(String, Vec<f64>)>,
    n_rows: usize,
}

impl DesignMatrix {
    pub fn new<S: Into<String>>(columns: Vec<(S, Vec<f64>)>) -> Result<Self, RegressionError> {
        let columns: Vec<(String, Vec<f64>)> = columns.into_iter().map(|(n, c)| (n.into(), c)).collect();
        let n_rows = columns.first().map(|(_, c)| c.len()).ok_or(RegressionError::EmptyDesign)?;
        if n_rows == 0 {
            return Err(RegressionError::EmptyDesign);
        }
        let mut seen = HashSet::new();
        for (name, col) in &columns {
            if col.len() != n_rows {
                return Err(RegressionError::DimensionMismatch {
                    expected: n_rows,
                    found: col.len(),
                });
            }
            if !seen.insert(name.as_str()) {
                return Err(RegressionError::DuplicateVariable(name.clone()));
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(RegressionError::NonFinite(name.clone()));
            }
        }
        Ok(Self { columns, n_rows })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[(String, Vec<f64>)] {
        &self.columns
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    /// Design restricted to the given column positions, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self, RegressionError> {
        Self::new(indices.iter().map(|&i| self.columns[i].clone()).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseVector {
    pub name: String,
    pub values: Vec<f64>,
}

impl ResponseVector {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self, RegressionError> {
        let name = name.into();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(RegressionError::NonFinite(name));
        }
        Ok(Self { name, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One coefficient row of a fitted model.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub response: String,
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub multiple_r: f64,
    pub adjusted_r_squared: f64,
    /// `sqrt(SSR / (n - k))`.
    pub standard_error_of_regression: f64,
    /// Centered R² (`1 - SSR / Σ(y - ȳ)²`). Diagnostic only; may be negative.
    pub centered_r_squared: f64,
    pub n: usize,
    pub k: usize,
    pub dof: usize,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    pub ssr: f64,
}

impl RegressionFit {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.coefficients.iter().map(|c| c.name.as_str())
    }

    /// True when every coefficient has `p <= alpha`.
    pub fn all_significant(&self, alpha: f64) -> bool {
        self.coefficients.iter().all(|c| c.p_value <= alpha)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Least squares fit of `y` on the columns of `x` with the intercept fixed at 0.
pub fn fit_through_origin(x: &DesignMatrix, y: &ResponseVector) -> Result<RegressionFit, RegressionError> {
    let n = x.n_rows();
    let k = x.n_cols();
    if y.len() != n {
        return Err(RegressionError::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    if n <= k {
        return Err(RegressionError::InsufficientObservations { n, k });
    }
    let cols = x.columns();
    for (name, col) in cols {
        if col.iter().all(|&v| v == 0.0) {
            return Err(RegressionError::RankDeficient(format!("column `{name}` is all zero")));
        }
    }

    // Work on the unit-diagonal scaling D·XᵀX·D so the rank test and the
    // factorisation do not depend on column units.
    let mut xtx = SquareMatrix::zeros(k);
    for i in 0..k {
        for j in 0..=i {
            let v = dot(&cols[i].1, &cols[j].1);
            xtx[(i, j)] = v;
            xtx[(j, i)] = v;
        }
    }
    let scale: Vec<f64> = (0..k).map(|i| 1.0 / xtx[(i, i)].sqrt()).collect();
    let mut scaled = SquareMatrix::zeros(k);
    for i in 0..k {
        for j in 0..k {
            scaled[(i, j)] = xtx[(i, j)] * scale[i] * scale[j];
        }
    }
    let eig = linalg::symmetric_eigenvalues(&scaled);
    let ratio = eig[0] / eig[k - 1];
    if !(ratio >= RANK_TOLERANCE) {
        return Err(RegressionError::RankDeficient(format!(
            "eigenvalue ratio {ratio:.3e} of scaled XᵀX is below {RANK_TOLERANCE:e}"
        )));
    }
    let chol = linalg::Cholesky::factor(&scaled)
        .map_err(|_| RegressionError::RankDeficient("scaled XᵀX is not positive definite".into()))?;
    let xty_scaled: Vec<f64> = (0..k).map(|i| dot(&cols[i].1, &y.values) * scale[i]).collect();
    let beta: Vec<f64> = chol.solve(&xty_scaled).iter().zip(&scale).map(|(z, s)| z * s).collect();
    let inv_scaled = chol.inverse();

    let fitted: Vec<f64> = (0..n)
        .map(|r| cols.iter().zip(&beta).map(|((_, c), b)| c[r] * b).sum())
        .collect();
    let residuals: Vec<f64> = y.values.iter().zip(&fitted).map(|(a, f)| a - f).collect();
    let ssr = dot(&residuals, &residuals);
    let sst = dot(&y.values, &y.values);
    if sst == 0.0 {
        return Err(RegressionError::ZeroResponse);
    }
    let mean = y.values.iter().sum::<f64>() / n as f64;
    let sst_centered: f64 = y.values.iter().map(|v| (v - mean) * (v - mean)).sum();

    let dof = n - k;
    let sigma2 = ssr / dof as f64;
    let mut coefficients = Vec::with_capacity(k);
    for j in 0..k {
        let var = sigma2 * inv_scaled[(j, j)] * scale[j] * scale[j];
        let std_error = var.max(0.0).sqrt();
        let t_stat = if std_error > 0.0 {
            beta[j] / std_error
        } else if beta[j] == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(beta[j])
        };
        coefficients.push(Coefficient {
            name: cols[j].0.clone(),
            estimate: beta[j],
            std_error,
            t_stat,
            p_value: t_two_sided_p(t_stat, dof)?,
        });
    }

    let r_squared = (1.0 - ssr / sst).clamp(0.0, 1.0);
    Ok(RegressionFit {
        response: y.name.clone(),
        coefficients,
        r_squared,
        multiple_r: r_squared.sqrt(),
        adjusted_r_squared: 1.0 - (1.0 - r_squared) * (n as f64 / dof as f64),
        standard_error_of_regression: sigma2.sqrt(),
        centered_r_squared: if sst_centered > 0.0 {
            1.0 - ssr / sst_centered
        } else {
            f64::NAN
        },
        n,
        k,
        dof,
        residuals,
        fitted,
        ssr,
    })
}
