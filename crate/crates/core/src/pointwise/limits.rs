//! Behaviour of `(-1)^n u_p` as `f` approaches an endpoint of the feasible
//! interval.
//!
//! Indices in a doubled pair of the boundary spectrum blow up (to `+∞` at
//! `b`, `-∞` at `a`); the others converge. For those, the pair terms
//! `u_pi + u_{p,i+1}` form a divided difference of `1/H` with
//! `H(x) = (λ_p - x)^2 ∏_{k∉{p,i,i+1}} (λ_k - x)`, whose limit is
//! `H'(β)/H(β)^2`.

use serde::Serialize;

use super::{factorial, sign_pow, u_all};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::spectrum::{BoundaryPattern, ConstraintModel, Endpoint};

/// `|(-1)^n u_p|` must pass this along the schedule to count as diverging.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

/// Divergence has to show before `f` is this close to the endpoint.
pub const DIVERGENCE_OFFSET: f64 = 1e-10;

/// Samples closer to the endpoint than `EXTRAPOLATION_FLOOR·(1 + |end|)`
/// are left out of the extrapolation window.
pub const EXTRAPOLATION_FLOOR: f64 = 1e-8;

const EXTRAPOLATION_POINTS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSample {
    pub f: f64,
    /// Distance `|f - endpoint|`.
    pub offset: f64,
    /// `(-1)^n u_p` for every `p`.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexSummary {
    pub index: usize,
    pub doubled: bool,
    pub min_value: f64,
    pub max_value: f64,
    pub last_value: f64,
    /// Largest offset at which `(-1)^n u_p` passed
    /// [`DIVERGENCE_THRESHOLD`] with the expected sign.
    pub threshold_offset: Option<f64>,
    pub diverges: bool,
    pub converges: bool,
    pub extrapolated_limit: Option<f64>,
    pub closed_form_limit: Option<f64>,
    pub relative_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssertionReport {
    pub endpoint: Endpoint,
    pub endpoint_value: f64,
    pub eps: f64,
    pub boundary: BoundaryPattern,
    pub samples: Vec<ScanSample>,
    pub indices: Vec<IndexSummary>,
    /// `max_p |A(p)| + 1` over the converging indices (1 if there are none).
    pub closed_form_bound: f64,
    /// Over all samples and indices: the minimum of `(-1)^n u_p` at `b`,
    /// the maximum at `a`.
    pub empirical_bound: f64,
    /// Why sampling stopped before `n_samples`, if it did.
    pub stopped_early: Option<String>,
}

impl AssertionReport {
    /// Doubled indices diverge with the expected sign and all other indices
    /// converge to their closed-form limits within `rel_tol`.
    pub fn passes(&self, rel_tol: f64) -> bool {
        self.indices.iter().all(|s| {
            if s.doubled {
                s.diverges
            } else {
                s.converges && s.relative_error.is_some_and(|e| e <= rel_tol)
            }
        })
    }
}

/// Limit of `(-1)^n u_p` at the endpoint for an index outside every doubled
/// pair.
pub fn boundary_limit(model: &ConstraintModel, end: Endpoint, p: usize, tol: f64) -> Result<f64> {
    let boundary = model.boundary_pattern(end, tol)?;
    limit_from_boundary(&boundary, p)
}

fn limit_from_boundary(boundary: &BoundaryPattern, p: usize) -> Result<f64> {
    let beta = boundary.spectrum.eigenvalues();
    let n = beta.len();
    if p >= n {
        return Err(Error::InvalidInput(format!("index {p} out of range")));
    }
    if boundary.in_doubled_pair(p) {
        return Err(Error::IndexInDoubledPair { index: p });
    }
    let s = sign_pow(n + 1);
    let mut acc = 0.0;
    for pair in &boundary.doubled {
        let i = pair.start;
        let b = beta[i];
        let mut h = Poly::from_roots(&[beta[p], beta[p]]);
        for (k, &bk) in beta.iter().enumerate() {
            if k != p && k != i && k != i + 1 {
                // (β_k - x) = -(x - β_k)
                h = h.mul(&Poly::new(vec![bk, -1.0]));
            }
        }
        let hv = h.eval(b);
        acc += s * h.derivative().eval(b) / (hv * hv);
    }
    for j in 0..n {
        if j == p || boundary.in_doubled_pair(j) {
            continue;
        }
        let prod: f64 = beta
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != p && k != j)
            .map(|(_, &bk)| bk - beta[j])
            .product();
        let d = beta[p] - beta[j];
        acc += s / (d * d * prod);
    }
    Ok(2.0 * factorial(n - 2) / n as f64 * acc)
}

/// Value at `x = 0` of the interpolating polynomial through `(x_k, y_k)`.
pub fn neville_extrapolate(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.is_empty() || xs.len() != ys.len() {
        return None;
    }
    let mut p = ys.to_vec();
    let m = xs.len();
    for level in 1..m {
        for k in 0..m - level {
            let (xa, xb) = (xs[k], xs[k + level]);
            if xa == xb {
                return None;
            }
            p[k] = (xa * p[k + 1] - xb * p[k]) / (xa - xb);
        }
    }
    Some(p[0])
}

/// Samples `f_k = b - eps·2^{-k}` (or `a + eps·2^{-k}`), `k = 0..n_samples`,
/// and tracks `(-1)^n u_p` for every index.
///
/// Sampling stops at the first `f` whose spectrum is not simple (the pair
/// has merged at the root-finder's resolution).
pub fn assertion_scan(
    model: &ConstraintModel,
    end: Endpoint,
    eps: f64,
    n_samples: usize,
    tol: f64,
) -> Result<AssertionReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let interval = model.feasible_interval_with_tol(tol)?;
    if interval.is_bounded() && eps >= (interval.b - interval.a) / 2.0 {
        return Err(Error::InvalidInput(format!(
            "eps must be below (b - a)/2 = {}",
            (interval.b - interval.a) / 2.0
        )));
    }
    let boundary = model.boundary_pattern(end, tol)?;
    let n = model.n();
    let sign_n = sign_pow(n);
    let endpoint_value = boundary.f;
    let direction = match end {
        Endpoint::Upper => -1.0,
        Endpoint::Lower => 1.0,
    };

    let mut samples = Vec::with_capacity(n_samples);
    let mut stopped_early = None;
    for k in 0..n_samples {
        let f = endpoint_value + direction * eps * 0.5f64.powi(k as i32);
        let offset = (f - endpoint_value).abs();
        if offset == 0.0 {
            stopped_early = Some(format!("sample {k} rounds onto the endpoint"));
            break;
        }
        let spectrum = match model.spectrum_at(f, tol) {
            Ok(s) if s.is_simple() => s,
            Ok(s) => {
                stopped_early = Some(format!(
                    "pattern {:?} at offset {offset:e}",
                    s.multiplicities()
                ));
                break;
            }
            Err(e) => {
                stopped_early = Some(format!("{e} at offset {offset:e}"));
                break;
            }
        };
        let values = match u_all(&spectrum.eigenvalues()) {
            Ok(u) => u.into_iter().map(|x| sign_n * x).collect(),
            Err(e) => {
                stopped_early = Some(format!("{e} at offset {offset:e}"));
                break;
            }
        };
        samples.push(ScanSample { f, offset, values });
    }

    let expected_sign = match end {
        Endpoint::Upper => 1.0,
        Endpoint::Lower => -1.0,
    };
    let floor = EXTRAPOLATION_FLOOR * (1.0 + endpoint_value.abs());
    let window: Vec<&ScanSample> = {
        let eligible: Vec<&ScanSample> = samples.iter().filter(|s| s.offset >= floor).collect();
        let start = eligible.len().saturating_sub(EXTRAPOLATION_POINTS);
        eligible[start..].to_vec()
    };

    let mut indices = Vec::with_capacity(n);
    let mut closed_form_bound: f64 = 1.0;
    for p in 0..n {
        let series: Vec<f64> = samples.iter().map(|s| s.values[p]).collect();
        let doubled = boundary.in_doubled_pair(p);
        let (min_value, max_value) = series
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let last_value = series.last().copied().unwrap_or(f64::NAN);

        let resolved: Vec<f64> = samples
            .iter()
            .filter(|s| s.offset >= DIVERGENCE_OFFSET)
            .map(|s| s.values[p])
            .collect();
        let tail = &resolved[resolved.len().saturating_sub(5)..];
        let monotone = tail.windows(2).all(|w| w[1].abs() >= w[0].abs());
        let threshold_offset = samples
            .iter()
            .find(|s| s.values[p] * expected_sign > DIVERGENCE_THRESHOLD)
            .map(|s| s.offset);
        let diverges = doubled
            && tail.len() >= 2
            && monotone
            && tail.last().is_some_and(|v| v * expected_sign > DIVERGENCE_THRESHOLD)
            && threshold_offset.is_some_and(|o| o >= DIVERGENCE_OFFSET);

        let (extrapolated_limit, closed_form_limit, relative_error, converges) = if doubled {
            (None, None, None, false)
        } else {
            let xs: Vec<f64> = window.iter().map(|s| s.offset).collect();
            let ys: Vec<f64> = window.iter().map(|s| s.values[p]).collect();
            let extrapolated = if xs.len() >= 2 {
                neville_extrapolate(&xs, &ys)
            } else {
                None
            };
            let closed = limit_from_boundary(&boundary, p)?;
            closed_form_bound = closed_form_bound.max(closed.abs() + 1.0);
            let rel = extrapolated.map(|e| (e - closed).abs() / closed.abs().max(1e-300));
            let converges = ys.len() >= 2 && {
                let (prev, last) = (ys[ys.len() - 2], ys[ys.len() - 1]);
                (last - prev).abs() <= 1e-6 * (1.0 + last.abs())
            };
            (extrapolated, Some(closed), rel, converges)
        };

        indices.push(IndexSummary {
            index: p,
            doubled,
            min_value,
            max_value,
            last_value,
            threshold_offset,
            diverges,
            converges,
            extrapolated_limit,
            closed_form_limit,
            relative_error,
        });
    }

    let empirical_bound = match end {
        Endpoint::Upper => indices
            .iter()
            .map(|s| s.min_value)
            .fold(f64::INFINITY, f64::min),
        Endpoint::Lower => indices
            .iter()
            .map(|s| s.max_value)
            .fold(f64::NEG_INFINITY, f64::max),
    };

    Ok(AssertionReport {
        endpoint: end,
        endpoint_value,
        eps,
        boundary,
        samples,
        indices,
        closed_form_bound,
        empirical_bound,
        stopped_early,
    })
}
