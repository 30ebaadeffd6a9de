//! The two published valuation regressions exactly as printed, and helpers to
//! check their internal consistency.
//!
//! The original training sample (enterprise values and predictors of 37
//! European clubs) was never released, so the coefficient blocks can only be
//! checked against themselves: `coeff / SE ≈ t`, `R = √R²`, and `p(t, dof)`
//! against the printed p-value for a common residual dof.

use std::ops::RangeInclusive;

use crate::regression::{t_two_sided_p, RegressionError};

/// A number printed in scientific notation with a fixed count of significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintedSci {
    pub value: f64,
    pub significant_digits: u32,
}

impl PrintedSci {
    /// Size of one unit in the last printed digit.
    pub fn last_digit_unit(&self) -> f64 {
        let exponent = self.value.abs().log10().floor() as i32;
        10f64.powi(exponent - (self.significant_digits as i32 - 1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PublishedTerm {
    pub variable: &'static str,
    pub label: &'static str,
    pub coefficient: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub p_value: PrintedSci,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PublishedModel {
    pub name: &'static str,
    pub multiple_r: f64,
    pub r_squared: f64,
    pub adjusted_r_squared: f64,
    pub standard_error: f64,
    pub terms: Vec<PublishedTerm>,
}

/// Residual degrees of freedom that make every printed (t, p) pair agree
/// (37 clubs, two predictors, no intercept).
pub const CONSISTENT_DOF: usize = 35;

pub fn sns_revenue_model() -> PublishedModel {
    PublishedModel {
        name: "Formula 1 (SNS & Revenue)",
        multiple_r: 0.9878,
        r_squared: 0.9758,
        adjusted_r_squared: 0.9466,
        standard_error: 223.7454,
        terms: vec![
            PublishedTerm {
                variable: "sns_followers_m",
                label: "SNS Followers (m)",
                coefficient: 3.7233,
                std_error: 0.6486,
                t_stat: 5.7410,
                p_value: PrintedSci { value: 1.69e-6, significant_digits: 3 },
            },
            PublishedTerm {
                variable: "revenue_meur",
                label: "Revenue (m€)",
                coefficient: 2.9233,
                std_error: 0.2284,
                t_stat: 12.8016,
                p_value: PrintedSci { value: 9.17e-15, significant_digits: 3 },
            },
        ],
    }
}

pub fn sns_market_value_model() -> PublishedModel {
    PublishedModel {
        name: "Formula 2 (SNS & Player Market Value)",
        multiple_r: 0.9749,
        r_squared: 0.9505,
        adjusted_r_squared: 0.9205,
        standard_error: 320.1838,
        terms: vec![
            PublishedTerm {
                variable: "sns_followers_m",
                label: "SNS Followers (m)",
                coefficient: 5.7754,
                std_error: 0.7994,
                t_stat: 7.2246,
                p_value: PrintedSci { value: 1.96e-8, significant_digits: 3 },
            },
            PublishedTerm {
                variable: "player_market_value_meur",
                label: "Player Market Value (m€)",
                coefficient: 1.2599,
                std_error: 0.1599,
                t_stat: 7.8815,
                p_value: PrintedSci { value: 2.89e-9, significant_digits: 3 },
            },
        ],
    }
}

pub fn published_models() -> [PublishedModel; 2] {
    [sns_revenue_model(), sns_market_value_model()]
}

/// Worst mismatch, in units of the last printed digit, between
/// `t_two_sided_p(t, dof)` and each printed p-value.
pub fn p_value_mismatch(terms: &[&PublishedTerm], dof: usize) -> Result<f64, RegressionError> {
    terms.iter().try_fold(0.0f64, |worst, term| {
        let p = t_two_sided_p(term.t_stat, dof)?;
        Ok(worst.max((p - term.p_value.value).abs() / term.p_value.last_digit_unit()))
    })
}

/// Every dof in `range` whose worst mismatch is at most one printed unit,
/// with that mismatch.
pub fn consistent_dofs(
    terms: &[&PublishedTerm],
    range: RangeInclusive<usize>,
) -> Result<Vec<(usize, f64)>, RegressionError> {
    let mut hits = Vec::new();
    for dof in range {
        let m = p_value_mismatch(terms, dof)?;
        if m <= 1.0 {
            hits.push((dof, m));
        }
    }
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_of_last_digit() {
        let p = PrintedSci { value: 9.17e-15, significant_digits: 3 };
        assert!((p.last_digit_unit() - 1e-17).abs() < 1e-30);
        let p = PrintedSci { value: 1.69e-6, significant_digits: 3 };
        assert!((p.last_digit_unit() - 1e-8).abs() < 1e-22);
    }

    #[test]
    fn single_consistent_dof_in_search_window() {
        let models = published_models();
        let terms: Vec<&PublishedTerm> = models.iter().flat_map(|m| m.terms.iter()).collect();
        let hits = consistent_dofs(&terms, 10..=200).unwrap();
        assert_eq!(hits.len(), 1, "{hits:?}");
        assert_eq!(hits[0].0, CONSISTENT_DOF);
    }
}
