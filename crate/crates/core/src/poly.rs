//! Dense real univariate polynomials and real-root isolation.
//!
//! Roots are isolated by recursion on the derivative: the real roots of
//! `P'` split the Cauchy interval into pieces on which `P` is monotone, so
//! each piece holds at most one simple root and bisection finds it. A
//! critical point where `P` itself vanishes (to the residual threshold) is
//! a multiple root whose multiplicity is one more than its multiplicity as
//! a root of `P'`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_BISECTIONS: usize = 200;

/// Multiple of `deg·ε·Σ|a_k||x|^k` allowed for evaluation rounding.
const ROUNDING_FACTOR: f64 = 16.0;

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Coefficients in ascending degree order. Trailing zeros are stripped, so
/// the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub value: f64,
    pub multiplicity: usize,
}

/// Real roots sorted by strictly increasing value.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RootList {
    roots: Vec<Root>,
}

impl RootList {
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Values repeated by multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat(r.value).take(r.multiplicity))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct LocalExtrema {
    pub maxima: Vec<Extremum>,
    pub minima: Vec<Extremum>,
    /// Critical points that are not extrema. They appear in neither list.
    pub inflections: Vec<f64>,
}

impl LocalExtrema {
    pub fn max_values(&self) -> Vec<f64> {
        self.maxima.iter().map(|e| e.value).collect()
    }

    pub fn min_values(&self) -> Vec<f64> {
        self.minima.iter().map(|e| e.value).collect()
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `∏ (x - r)` over `roots`.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut coeffs = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// `j`-th derivative evaluated at `x`.
    pub fn eval_derivative(&self, j: usize, x: f64) -> f64 {
        let mut d = self.clone();
        for _ in 0..j {
            d = d.derivative();
        }
        d.eval(x)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; len];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, &c) in other.coeffs.iter().enumerate() {
            out[k] += c;
        }
        Poly::new(out)
    }

    pub fn add_constant(&self, c: f64) -> Poly {
        let mut coeffs = self.coeffs.clone();
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        coeffs[0] += c;
        Poly::new(coeffs)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `1 + max_{k<deg} |a_k| / |a_deg|`; every root has modulus below it.
    pub fn cauchy_bound(&self) -> f64 {
        let lead = self.leading().abs();
        let deg = self.degree();
        let m = self.coeffs[..deg]
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.abs()));
        1.0 + m / lead
    }

    /// Magnitude used to scale residual thresholds at `x`: the Horner
    /// rounding bound `Σ|a_k| |x|^k`, never larger than
    /// `Σ|a_k| · max(1, |x|)^deg`.
    pub fn residual_scale(&self, x: f64) -> f64 {
        self.scale_near(x, 0.0)
    }

    /// `Σ|a_k| (|x| + r)^k`.
    fn scale_near(&self, x: f64, r: f64) -> f64 {
        let ax = x.abs() + r;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * ax + c.abs())
    }

    /// All real roots with multiplicities.
    ///
    /// Bisection always runs to floating-point resolution (at most 200
    /// halvings). A critical point `c` of multiplicity `m - 1` is a root of
    /// multiplicity `m` when `|P(c)|` is below `|P^(m)(c)| tol^m / m!` plus
    /// evaluation rounding, that is when the roots it stands for lie within
    /// about `tol` of `c`. Located roots closer than `10·tol` are merged.
    pub fn real_roots(&self, tol: f64) -> Result<RootList> {
        if !(tol > 0.0) {
            return Err(Error::InvalidInput("tol must be positive".into()));
        }
        if self.is_zero() || self.degree() == 0 {
            return Err(Error::InvalidInput(
                "root isolation needs degree >= 1".into(),
            ));
        }
        if self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        let roots = self.isolate(tol)?;
        Ok(RootList { roots })
    }

    fn isolate(&self, tol: f64) -> Result<Vec<Root>> {
        let deg = self.degree();
        if deg == 1 {
            return Ok(vec![Root {
                value: -self.coeffs[0] / self.coeffs[1],
                multiplicity: 1,
            }]);
        }

        let bound = self.cauchy_bound();
        let crit = self.derivative().isolate(tol)?;

        let mut roots = Vec::new();
        // Breakpoints carry whether P vanishes there.
        let mut points: Vec<(f64, bool)> = Vec::with_capacity(crit.len() + 2);
        points.push((-bound, false));
        for c in &crit {
            let x = c.value.clamp(-bound, bound);
            // Roots of P that close in around c lie within tol of it when
            // |P(c)| <= |P^(m+1)(c)| tol^(m+1) / (m+1)!, up to rounding.
            let m = c.multiplicity + 1;
            let spread = self.eval_derivative(m, x).abs() / factorial(m) * tol.powi(m as i32);
            let rounding = ROUNDING_FACTOR * deg as f64 * f64::EPSILON * self.residual_scale(x);
            let on_root = self.eval(x).abs() <= spread + rounding;
            if on_root {
                roots.push(Root {
                    value: x,
                    multiplicity: c.multiplicity + 1,
                });
            }
            points.push((x, on_root));
        }
        points.push((bound, false));

        for w in points.windows(2) {
            let ((lo, lo_root), (hi, hi_root)) = (w[0], w[1]);
            // P is monotone between breakpoints; a zero at either end rules
            // out another inside.
            if lo_root || hi_root || hi <= lo {
                continue;
            }
            let (plo, phi) = (self.eval(lo), self.eval(hi));
            if plo.signum() != phi.signum() && plo != 0.0 && phi != 0.0 {
                roots.push(Root {
                    value: self.bisect(lo, hi, plo.signum()),
                    multiplicity: 1,
                });
            }
        }

        roots.sort_by(|a, b| a.value.total_cmp(&b.value));
        let roots = self.merge_clusters(roots, tol)?;

        let total: usize = roots.iter().map(|r| r.multiplicity).sum();
        if total > deg {
            let at = roots.first().map(|r| r.value).unwrap_or(0.0);
            return Err(Error::IllConditioned { at });
        }
        Ok(roots)
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, sign_lo: f64) -> f64 {
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = self.eval(mid);
            if v == 0.0 {
                return mid;
            }
            if v.signum() == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Merges roots closer than `10·tol`. A merged cluster of total
    /// multiplicity `m` must have `|P^(j)(v)| < j!·scale·√tol` for
    /// `j < m`, otherwise the cluster is reported as ill-conditioned.
    fn merge_clusters(&self, roots: Vec<Root>, tol: f64) -> Result<Vec<Root>> {
        let radius = 10.0 * tol;
        let mut out: Vec<Root> = Vec::with_capacity(roots.len());
        let mut cluster: Vec<Root> = Vec::new();

        let flush = |cluster: &mut Vec<Root>, out: &mut Vec<Root>| -> Result<()> {
            if cluster.len() == 1 {
                out.push(cluster[0]);
            } else if cluster.len() > 1 {
                let m: usize = cluster.iter().map(|r| r.multiplicity).sum();
                let v = cluster.iter().map(|r| r.value * r.multiplicity as f64).sum::<f64>()
                    / m as f64;
                let scale = self.scale_near(v, radius);
                let mut fact = 1.0;
                for j in 1..m {
                    fact *= j as f64;
                    if self.eval_derivative(j, v).abs() >= fact * scale * tol.sqrt() {
                        return Err(Error::IllConditioned { at: v });
                    }
                }
                out.push(Root {
                    value: v,
                    multiplicity: m,
                });
            }
            cluster.clear();
            Ok(())
        };

        for r in roots {
            if let Some(last) = cluster.last() {
                if r.value - last.value > radius {
                    flush(&mut cluster, &mut out)?;
                }
            }
            cluster.push(r);
        }
        flush(&mut cluster, &mut out)?;
        Ok(out)
    }

    /// Real roots of `P'`, sorted.
    pub fn critical_points(&self, tol: f64) -> Result<RootList> {
        if self.degree() < 2 {
            return Err(Error::InvalidInput(
                "critical points need degree >= 2".into(),
            ));
        }
        self.derivative().real_roots(tol)
    }

    /// Values of `P` at its local maxima and minima.
    ///
    /// A critical point of odd multiplicity `m` (as a root of `P'`) is an
    /// extremum whose type is the sign of `P^(m+1)`; if that derivative
    /// vanishes numerically, the sign change of `P'` across the point
    /// decides. Even multiplicity means an inflection, which is listed
    /// separately rather than treated as an error.
    pub fn local_extreme_values(&self, tol: f64) -> Result<LocalExtrema> {
        let crit = self.critical_points(tol)?;
        let d1 = self.derivative();
        let bound = self.cauchy_bound();
        let mut out = LocalExtrema::default();
        let roots = crit.roots();
        for (k, c) in roots.iter().enumerate() {
            let x = c.value;
            if c.multiplicity % 2 == 0 {
                out.inflections.push(x);
                continue;
            }
            let curvature = self.eval_derivative(c.multiplicity + 1, x);
            let thresh = self.residual_scale(x) * tol;
            let is_max = if curvature.abs() > thresh {
                curvature < 0.0
            } else {
                let left = if k > 0 { roots[k - 1].value } else { -bound };
                let right = if k + 1 < roots.len() {
                    roots[k + 1].value
                } else {
                    bound
                };
                let (l, r) = (d1.eval(0.5 * (left + x)), d1.eval(0.5 * (x + right)));
                if l.signum() == r.signum() {
                    out.inflections.push(x);
                    continue;
                }
                l > 0.0
            };
            let e = Extremum {
                x,
                value: self.eval(x),
            };
            if is_max {
                out.maxima.push(e);
            } else {
                out.minima.push(e);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                1 if a == 1.0 => write!(f, "x")?,
                1 => write!(f, "{a}x")?,
                _ if a == 1.0 => write!(f, "x^{k}")?,
                _ => write!(f, "{a}x^{k}")?,
            }
        }
        Ok(())
    }
}
