//! Explanatory-variable selection over a small candidate pool.
//!
//! Two searches are provided: exhaustive enumeration of every subset up to a
//! size bound, and significance-driven stepwise addition/removal. Both rank
//! models by adjusted R².

use std::cmp::Ordering;
use std::collections::HashSet;

use thiserror::Error;

use crate::parallel::Execution;
use crate::regression::{fit_through_origin, DesignMatrix, RegressionError, RegressionFit, ResponseVector};

/// Hard cap on the candidate pool (2^12 - 1 subsets).
pub const MAX_CANDIDATES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("{0} candidates exceed the limit of {MAX_CANDIDATES}")]
    TooManyCandidates(usize),
    #[error("max subset size {max_size} must be between 1 and the number of candidates ({candidates})")]
    InvalidMaxSize { max_size: usize, candidates: usize },
    #[error("invalid candidate set: {0}")]
    InvalidCandidates(String),
    #[error(transparent)]
    Regression(#[from] RegressionError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    design: DesignMatrix,
    response: ResponseVector,
}

impl CandidateSet {
    pub fn new<S: Into<String>>(
        predictors: Vec<(S, Vec<f64>)>,
        response: ResponseVector,
    ) -> Result<Self, SelectionError> {
        if predictors.is_empty() {
            return Err(SelectionError::InvalidCandidates("no candidates".into()));
        }
        let design = DesignMatrix::new(predictors)?;
        if design.n_rows() != response.len() {
            return Err(SelectionError::InvalidCandidates(format!(
                "response has {} rows, candidates have {}",
                response.len(),
                design.n_rows()
            )));
        }
        Ok(Self { design, response })
    }

    pub fn len(&self) -> usize {
        self.design.n_cols()
    }

    pub fn is_empty(&self) -> bool {
        self.design.n_cols() == 0
    }

    pub fn names(&self) -> Vec<String> {
        self.design.names().map(str::to_string).collect()
    }

    pub fn response(&self) -> &ResponseVector {
        &self.response
    }

    fn fit_subset(&self, indices: &[usize]) -> Result<RegressionFit, RegressionError> {
        fit_through_origin(&self.design.select(indices)?, &self.response)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionOptions {
    /// Threshold for the all-significant flag.
    pub alpha: f64,
    pub alpha_in: f64,
    pub alpha_out: f64,
    pub execution: Execution,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            alpha_in: 0.05,
            alpha_out: 0.10,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedModel {
    pub variables: Vec<String>,
    pub fit: RegressionFit,
    pub all_significant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedSubset {
    pub variables: Vec<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMethod {
    Exhaustive,
    Stepwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionStatus {
    Complete,
    /// Stepwise admitted no variable.
    EmptyModel,
    /// Stepwise revisited a model; the state at detection is returned.
    CycleDetected,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepAction {
    Added,
    Removed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub action: StepAction,
    pub variable: String,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    pub method: SelectionMethod,
    pub ranked_models: Vec<RankedModel>,
    pub skipped: Vec<SkippedSubset>,
    /// Subsets attempted (fitted plus skipped).
    pub attempted: usize,
    pub status: SelectionStatus,
    pub steps: Vec<Step>,
    pub alpha: f64,
}

impl SelectionReport {
    pub fn best(&self) -> Option<&RankedModel> {
        self.ranked_models.first()
    }
}

/// Adjusted R² descending, then fewer variables, then ids lexicographically.
pub fn rank_order(a: &RankedModel, b: &RankedModel) -> Ordering {
    b.fit
        .adjusted_r_squared
        .total_cmp(&a.fit.adjusted_r_squared)
        .then(a.variables.len().cmp(&b.variables.len()))
        .then_with(|| a.variables.cmp(&b.variables))
}

/// All index combinations of sizes 1..=max_size, size-major, lexicographic within a size.
pub fn subsets(n: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 1..=max_size.min(n) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.clone());
            let Some(pos) = (0..size).rev().find(|&i| idx[i] != i + n - size) else {
                break;
            };
            idx[pos] += 1;
            for j in pos + 1..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

fn check_size(cands: &CandidateSet) -> Result<(), SelectionError> {
    if cands.len() > MAX_CANDIDATES {
        return Err(SelectionError::TooManyCandidates(cands.len()));
    }
    Ok(())
}

pub fn exhaustive_subsets(cands: &CandidateSet, max_size: usize) -> Result<SelectionReport, SelectionError> {
    exhaustive_subsets_with(cands, max_size, &SelectionOptions::default())
}

pub fn exhaustive_subsets_with(
    cands: &CandidateSet,
    max_size: usize,
    opts: &SelectionOptions,
) -> Result<SelectionReport, SelectionError> {
    check_size(cands)?;
    if max_size == 0 || max_size > cands.len() {
        return Err(SelectionError::InvalidMaxSize {
            max_size,
            candidates: cands.len(),
        });
    }
    let names = cands.names();
    let all = subsets(cands.len(), max_size);
    let fits = opts.execution.map(&all, |idx| cands.fit_subset(idx));

    let mut ranked = Vec::new();
    let mut skipped = Vec::new();
    for (idx, fit) in all.iter().zip(fits) {
        let variables: Vec<String> = idx.iter().map(|&i| names[i].clone()).collect();
        match fit {
            Ok(fit) => ranked.push(RankedModel {
                all_significant: fit.all_significant(opts.alpha),
                variables,
                fit,
            }),
            Err(e) => skipped.push(SkippedSubset {
                variables,
                reason: e.to_string(),
            }),
        }
    }
    ranked.sort_by(rank_order);
    Ok(SelectionReport {
        method: SelectionMethod::Exhaustive,
        ranked_models: ranked,
        skipped,
        attempted: all.len(),
        status: SelectionStatus::Complete,
        steps: Vec::new(),
        alpha: opts.alpha,
    })
}

pub fn stepwise(cands: &CandidateSet, alpha_in: f64, alpha_out: f64) -> Result<SelectionReport, SelectionError> {
    stepwise_with(
        cands,
        &SelectionOptions {
            alpha_in,
            alpha_out,
            ..SelectionOptions::default()
        },
    )
}

pub fn stepwise_with(cands: &CandidateSet, opts: &SelectionOptions) -> Result<SelectionReport, SelectionError> {
    check_size(cands)?;
    let names = cands.names();
    let mut current: Vec<usize> = Vec::new();
    let mut visited: HashSet<Vec<usize>> = HashSet::from([Vec::new()]);
    let mut steps = Vec::new();
    let mut attempted = 0usize;
    let mut skipped = Vec::new();
    let mut status = SelectionStatus::Complete;

    loop {
        let mut changed = false;

        // Forward: the entering candidate with the smallest p below alpha_in.
        let trials: Vec<usize> = (0..cands.len()).filter(|c| !current.contains(c)).collect();
        let trial_fits = opts.execution.map(&trials, |&c| {
            let mut idx = current.clone();
            idx.push(c);
            idx.sort_unstable();
            cands.fit_subset(&idx).map(|f| {
                let p = f.coefficient(&names[c]).expect("entering variable is in the fit").p_value;
                p
            })
        });
        attempted += trials.len();
        let mut best: Option<(usize, f64)> = None;
        for (&c, res) in trials.iter().zip(trial_fits) {
            match res {
                Ok(p) if p < opts.alpha_in && best.is_none_or(|(_, bp)| p < bp) => best = Some((c, p)),
                Ok(_) => {}
                Err(e) => {
                    let mut vars: Vec<String> = current.iter().map(|&i| names[i].clone()).collect();
                    vars.push(names[c].clone());
                    skipped.push(SkippedSubset {
                        variables: vars,
                        reason: e.to_string(),
                    });
                }
            }
        }
        if let Some((c, p)) = best {
            current.push(c);
            current.sort_unstable();
            steps.push(Step {
                action: StepAction::Added,
                variable: names[c].clone(),
                p_value: p,
            });
            changed = true;
        }

        // Backward: drop the worst variable above alpha_out until none remains.
        while !current.is_empty() {
            let fit = cands.fit_subset(&current)?;
            attempted += 1;
            let worst = fit
                .coefficients
                .iter()
                .enumerate()
                .filter(|(_, c)| c.p_value > opts.alpha_out)
                .fold(None::<(usize, f64)>, |acc, (i, c)| match acc {
                    Some((_, p)) if p >= c.p_value => acc,
                    _ => Some((i, c.p_value)),
                });
            let Some((pos, p)) = worst else { break };
            let removed = current.remove(pos);
            steps.push(Step {
                action: StepAction::Removed,
                variable: names[removed].clone(),
                p_value: p,
            });
            changed = true;
        }

        if !changed {
            break;
        }
        if !visited.insert(current.clone()) {
            status = SelectionStatus::CycleDetected;
            break;
        }
    }

    let mut ranked = Vec::new();
    if current.is_empty() {
        if status == SelectionStatus::Complete {
            status = SelectionStatus::EmptyModel;
        }
    } else {
        let fit = cands.fit_subset(&current)?;
        ranked.push(RankedModel {
            variables: current.iter().map(|&i| names[i].clone()).collect(),
            all_significant: fit.all_significant(opts.alpha),
            fit,
        });
    }
    Ok(SelectionReport {
        method: SelectionMethod::Stepwise,
        ranked_models: ranked,
        skipped,
        attempted,
        status,
        steps,
        alpha: opts.alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64)
    }

    #[test]
    fn subset_counts() {
        assert_eq!(subsets(6, 2).len(), 21);
        assert_eq!(subsets(4, 4).len(), 15);
        assert_eq!(subsets(3, 2), vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn single_candidate() {
        let y = ResponseVector::new("y", vec![1.0, 2.1, 2.9, 4.2]).unwrap();
        let c = CandidateSet::new(vec![("x", vec![1.0, 2.0, 3.0, 4.0])], y).unwrap();
        let r = exhaustive_subsets(&c, 1).unwrap();
        assert_eq!(r.ranked_models.len(), 1);
        assert_eq!(r.best().unwrap().variables, vec!["x"]);
    }

    #[test]
    fn guards() {
        let n = 20;
        let mut s = 7;
        let cols: Vec<(String, Vec<f64>)> = (0..13).map(|i| (format!("c{i}"), (0..n).map(|_| lcg(&mut s)).collect())).collect();
        let y = ResponseVector::new("y", (0..n).map(|_| lcg(&mut s)).collect()).unwrap();
        let c = CandidateSet::new(cols.clone(), y.clone()).unwrap();
        assert_eq!(exhaustive_subsets(&c, 2), Err(SelectionError::TooManyCandidates(13)));
        assert_eq!(stepwise(&c, 0.05, 0.1), Err(SelectionError::TooManyCandidates(13)));
        let c = CandidateSet::new(cols[..3].to_vec(), y.clone()).unwrap();
        assert!(matches!(exhaustive_subsets(&c, 4), Err(SelectionError::InvalidMaxSize { .. })));
        assert!(matches!(exhaustive_subsets(&c, 0), Err(SelectionError::InvalidMaxSize { .. })));
        assert!(CandidateSet::new(Vec::<(String, Vec<f64>)>::new(), y).is_err());
    }

    #[test]
    fn rank_deficient_subsets_are_skipped() {
        let a = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let b: Vec<f64> = a.iter().map(|v| v * 2.0).collect();
        let y = ResponseVector::new("y", vec![1.1, 1.9, 3.2, 3.9, 5.1]).unwrap();
        let c = CandidateSet::new(vec![("a", a), ("b", b)], y).unwrap();
        let r = exhaustive_subsets(&c, 2).unwrap();
        assert_eq!(r.attempted, 3);
        assert_eq!(r.ranked_models.len(), 2);
        assert_eq!(r.skipped.len(), 1);
        assert_eq!(r.skipped[0].variables, vec!["a", "b"]);
    }

    #[test]
    fn ties_break_on_size_then_ids() {
        let y = ResponseVector::new("y", vec![1.0, 2.0, 3.0]).unwrap();
        let c = CandidateSet::new(
            vec![("b", vec![1.0, 2.0, 3.0]), ("a", vec![1.0, 2.0, 3.0])],
            y,
        )
        .unwrap();
        let r = exhaustive_subsets(&c, 1).unwrap();
        let order: Vec<_> = r.ranked_models.iter().map(|m| m.variables.clone()).collect();
        assert_eq!(order, vec![vec!["a".to_string()], vec!["b".to_string()]]);
    }
}
