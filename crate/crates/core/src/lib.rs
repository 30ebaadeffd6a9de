//! Football club valuation with through-origin regression formulae.
//!
//! The crate fits zero-intercept multiple regressions with full inference
//! (standard errors, t statistics, Student-t p-values, R² variants), searches
//! predictor subsets, applies the two published SNS-based valuation formulae
//! to club records, compares the results with historical transaction prices
//! and renders tables and scatter plots.
//!
//! Batch work (subset fits, per-club valuation) runs on rayon when the
//! default `parallel` feature is enabled; see [`parallel::Execution`].

pub mod cli;
pub mod dataset;
pub mod parallel;
pub mod published;
pub mod regression;
pub mod report;
pub mod selection;
pub mod valuation;

pub use dataset::{ClubRecord, EuropeanReference, FxRate, TransactionCase};
pub use parallel::Execution;
pub use regression::{fit_through_origin, DesignMatrix, RegressionFit, ResponseVector};
pub use valuation::{formula_1, formula_2, ValuationModel, ValuationResult};
