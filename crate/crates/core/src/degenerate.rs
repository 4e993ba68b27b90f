//! Spectra with a repeated eigenvalue.
//!
//! For an ordered multiplicity pattern `(m_1, ..., m_g)` with some
//! `m_k >= 2`, the first repeated eigenvalue `μ_k` must be the `k`-th root of
//! `F' = F0'`, which does not depend on `f`. Requiring `F(μ_k) = 0` then
//! pins the constant term and hence the whole characteristic polynomial, so
//! each pattern admits at most one candidate spectrum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::{ConstraintModel, Spectrum};

/// An ordered composition of `n` with at least one part `>= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct MultiplicityPattern(Vec<usize>);

impl MultiplicityPattern {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidInput("pattern parts must be positive".into()));
        }
        if parts.iter().all(|&m| m == 1) {
            return Err(Error::InvalidInput(
                "pattern needs a part of at least 2".into(),
            ));
        }
        Ok(Self(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of distinct eigenvalues.
    pub fn g(&self) -> usize {
        self.0.len()
    }

    /// 1-based index of the first part `>= 2`.
    pub fn first_repeated(&self) -> usize {
        self.0.iter().position(|&m| m >= 2).map(|k| k + 1).unwrap_or(0)
    }
}

impl std::fmt::Display for MultiplicityPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|m| m.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegenerateSolution {
    pub spectrum: Spectrum,
    pub f_value: f64,
    pub pattern: MultiplicityPattern,
}

/// Result of the construction for one pattern.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PatternOutcome {
    Solved(DegenerateSolution),
    /// The constructed polynomial has all roots real but another
    /// multiplicity pattern.
    Mismatch { found: Vec<usize> },
    /// The constructed polynomial has fewer than `n` real roots.
    NonReal { real_roots: usize },
    /// `F0'` has fewer than `k` real roots.
    InsufficientCriticalRoots { needed: usize, available: usize },
}

impl PatternOutcome {
    pub fn solution(&self) -> Option<&DegenerateSolution> {
        match self {
            Self::Solved(s) => Some(s),
            _ => None,
        }
    }

    pub fn into_solution(self) -> Option<DegenerateSolution> {
        match self {
            Self::Solved(s) => Some(s),
            _ => None,
        }
    }

    pub fn reason(&self) -> String {
        match self {
            Self::Solved(_) => "solved".into(),
            Self::Mismatch { found } => format!("construction realises pattern {found:?}"),
            Self::NonReal { real_roots } => {
                format!("construction has only {real_roots} real roots")
            }
            Self::InsufficientCriticalRoots { needed, available } => format!(
                "F0' has {available} real roots, the construction needs {needed}"
            ),
        }
    }
}

/// All ordered compositions of `n` except `(1, ..., 1)`: `2^{n-1} - 1`
/// patterns, ordered by number of parts and then lexicographically
/// descending.
pub fn enumerate_patterns(n: usize) -> Result<Vec<MultiplicityPattern>> {
    if n < 2 {
        return Err(Error::InvalidInput("n must be at least 2".into()));
    }
    if n > 24 {
        return Err(Error::InvalidInput("pattern enumeration capped at n = 24".into()));
    }
    let mut out = Vec::with_capacity((1 << (n - 1)) - 1);
    // Bit i of the mask set means a cut after position i + 1.
    for mask in 0u32..(1 << (n - 1)) {
        let mut parts = Vec::new();
        let mut run = 1;
        for i in 0..n - 1 {
            if mask & (1 << i) != 0 {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        if parts.iter().any(|&m| m >= 2) {
            out.push(MultiplicityPattern(parts));
        }
    }
    out.sort_by(|x, y| x.0.len().cmp(&y.0.len()).then_with(|| y.0.cmp(&x.0)));
    Ok(out)
}

/// Runs the construction for one pattern.
pub fn solve_pattern(
    model: &ConstraintModel,
    pattern: &MultiplicityPattern,
    tol: f64,
) -> Result<PatternOutcome> {
    let n = model.n();
    if pattern.n() != n {
        return Err(Error::InvalidInput(format!(
            "pattern {pattern} does not sum to n = {n}"
        )));
    }
    let k = pattern.first_repeated();
    let crit = model.f0().critical_points(tol)?.expanded();
    if crit.len() < k {
        return Ok(PatternOutcome::InsufficientCriticalRoots {
            needed: k,
            available: crit.len(),
        });
    }
    let mu = crit[k - 1];

    // F = F0 - F0(μ_k) vanishes at μ_k; d_n = (-1)^{n-1} F0(μ_k).
    let shift = -model.f0().eval(mu);
    let f_value = model.f_for_shift(shift);
    let roots = model.f0().add_constant(shift).real_roots(tol)?;

    let total = roots.total_multiplicity();
    if total < n {
        return Ok(PatternOutcome::NonReal { real_roots: total });
    }
    let found: Vec<usize> = roots.roots().iter().map(|r| r.multiplicity).collect();
    if found != pattern.parts() {
        return Ok(PatternOutcome::Mismatch { found });
    }
    Ok(PatternOutcome::Solved(DegenerateSolution {
        spectrum: Spectrum::from_roots(&roots)?,
        f_value,
        pattern: pattern.clone(),
    }))
}

/// Every pattern's outcome, in [`enumerate_patterns`] order.
pub fn solve_all_patterns(
    model: &ConstraintModel,
    tol: f64,
) -> Result<Vec<(MultiplicityPattern, PatternOutcome)>> {
    enumerate_patterns(model.n())?
        .into_iter()
        .map(|p| solve_pattern(model, &p, tol).map(|o| (p, o)))
        .collect()
}

/// The discrete set of `f` values realised by degenerate spectra, sorted by
/// `f` and deduplicated within `10·tol·(1 + |f|)`.
pub fn all_degenerate_values(
    model: &ConstraintModel,
    tol: f64,
) -> Result<Vec<(f64, MultiplicityPattern)>> {
    let mut sols: Vec<(f64, MultiplicityPattern)> = solve_all_patterns(model, tol)?
        .into_iter()
        .filter_map(|(_, o)| o.into_solution())
        .map(|s| (s.f_value, s.pattern))
        .collect();
    sols.sort_by(|x, y| x.0.total_cmp(&y.0));
    sols.dedup_by(|cur, prev| (cur.0 - prev.0).abs() <= 10.0 * tol * (1.0 + prev.0.abs()));
    Ok(sols)
}
