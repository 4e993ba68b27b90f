//! Principal curvatures of isoparametric hypersurfaces in the unit sphere
//! and the scalar curvature `R = n(n-1) + H^2 - S` built from them.
//!
//! A family is given by the number `g` of distinct principal curvatures and
//! the alternating multiplicities `(m1, m2)`. At angle `θ` the curvatures
//! are `cot(θ + (i-1)π/g)`, `i = 1..g`, with multiplicity `m1` for odd `i`
//! and `m2` for even `i`. For `g = 1` there is a single curvature and `m2`
//! is set equal to `m1`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Angles within this distance of a multiple of `π` are poles.
pub const POLE_TOL: f64 = 1e-8;

/// Grid points stay this fraction of `π/g` away from every pole.
pub const GRID_POLE_MARGIN: f64 = 1e-2;

const ALLOWED_G: [usize; 5] = [1, 2, 3, 4, 6];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct IsoparametricFamily {
    g: usize,
    m1: usize,
    m2: usize,
}

impl IsoparametricFamily {
    pub fn new(g: usize, m1: usize, m2: usize) -> Result<Self> {
        if !ALLOWED_G.contains(&g) {
            return Err(Error::InvalidInput(format!(
                "g = {g} is not one of 1, 2, 3, 4, 6"
            )));
        }
        if m1 == 0 || m2 == 0 {
            return Err(Error::InvalidInput("multiplicities must be positive".into()));
        }
        let m2 = if g == 1 { m1 } else { m2 };
        if g % 2 == 1 && m1 != m2 {
            return Err(Error::InvalidInput(format!(
                "odd g = {g} needs m1 = m2, got ({m1}, {m2})"
            )));
        }
        Ok(Self { g, m1, m2 })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn m1(&self) -> usize {
        self.m1
    }

    pub fn m2(&self) -> usize {
        self.m2
    }

    pub fn n(&self) -> usize {
        self.g * (self.m1 + self.m2) / 2
    }

    pub fn equal_multiplicities(&self) -> bool {
        self.m1 == self.m2
    }

    /// Whether `min R = 0` is attained: `g = n`, which for this
    /// parametrisation is `m1 = m2 = 1`.
    pub fn is_equality_case(&self) -> bool {
        self.m1 == 1 && self.m2 == 1
    }

    fn multiplicity(&self, i: usize) -> usize {
        if i % 2 == 0 {
            self.m1
        } else {
            self.m2
        }
    }

    fn angle(&self, theta: f64, i: usize) -> f64 {
        theta + i as f64 * PI / self.g as f64
    }
}

/// Every family with `g ∈ {1,2,3,4,6}` and `1 <= n <= n_max`.
pub fn admissible_families(n_max: usize) -> Vec<IsoparametricFamily> {
    let mut out = Vec::new();
    for g in ALLOWED_G {
        for m1 in 1..=n_max {
            for m2 in 1..=n_max {
                if (g % 2 == 1 && m1 != m2) || g * (m1 + m2) % 2 != 0 {
                    continue;
                }
                if g * (m1 + m2) / 2 > n_max {
                    continue;
                }
                out.push(IsoparametricFamily { g, m1, m2 });
            }
        }
    }
    out
}

fn check_pole(angle: f64) -> Result<()> {
    let k = (angle / PI).round();
    if (angle - k * PI).abs() < POLE_TOL {
        Err(Error::PoleAngle { angle })
    } else {
        Ok(())
    }
}

fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Curvature {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureProfile {
    pub theta: f64,
    pub curvatures: Vec<Curvature>,
    pub h: f64,
    pub s: f64,
    pub r_m: f64,
}

pub fn principal_curvatures(fam: &IsoparametricFamily, theta: f64) -> Result<Vec<Curvature>> {
    if !theta.is_finite() {
        return Err(Error::InvalidInput("theta must be finite".into()));
    }
    (0..fam.g)
        .map(|i| {
            let a = fam.angle(theta, i);
            check_pole(a)?;
            Ok(Curvature {
                value: cot(a),
                multiplicity: if fam.g == 1 { fam.n() } else { fam.multiplicity(i) },
            })
        })
        .collect()
}

pub fn curvature_profile(fam: &IsoparametricFamily, theta: f64) -> Result<CurvatureProfile> {
    let curvatures = principal_curvatures(fam, theta)?;
    let h: f64 = curvatures.iter().map(|c| c.multiplicity as f64 * c.value).sum();
    let s: f64 = curvatures
        .iter()
        .map(|c| c.multiplicity as f64 * c.value * c.value)
        .sum();
    let n = fam.n() as f64;
    Ok(CurvatureProfile {
        theta,
        curvatures,
        h,
        s,
        r_m: n * (n - 1.0) + h * h - s,
    })
}

/// `n(n-g)(1 + cot^2 gθ)` when `m1 = m2`, otherwise
/// `(g^2/4)(m1(m1-1)(1+t^2) + m2(m2-1)(1+1/t^2))` with `t = cot(gθ/2)`.
pub fn scalar_curvature_closed_form(fam: &IsoparametricFamily, theta: f64) -> Result<f64> {
    for i in 0..fam.g {
        check_pole(fam.angle(theta, i))?;
    }
    let g = fam.g as f64;
    if fam.equal_multiplicities() {
        let n = fam.n() as f64;
        let c = cot(g * theta);
        Ok(n * (n - g) * (1.0 + c * c))
    } else {
        let t = cot(g * theta / 2.0);
        if t == 0.0 {
            return Err(Error::PoleAngle { angle: theta });
        }
        let (m1, m2) = (fam.m1 as f64, fam.m2 as f64);
        Ok(g * g / 4.0 * (m1 * (m1 - 1.0) * (1.0 + t * t) + m2 * (m2 - 1.0) * (1.0 + 1.0 / (t * t))))
    }
}

/// Root of `H(θ)` in `bracket`, which must lie inside one smooth branch.
pub fn minimal_theta(fam: &IsoparametricFamily, bracket: (f64, f64)) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(Error::InvalidInput("bracket must satisfy lo < hi".into()));
    }
    let h = |t: f64| curvature_profile(fam, t).map(|p| p.h);
    let mut h_lo = h(lo)?;
    let h_hi = h(hi)?;
    if h_lo == 0.0 {
        return Ok(lo);
    }
    if h_hi == 0.0 {
        return Ok(hi);
    }
    if h_lo.signum() == h_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let h_mid = h(mid)?;
        if h_mid == 0.0 {
            return Ok(mid);
        }
        if h_mid.signum() == h_lo.signum() {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// [`minimal_theta`] on the first branch `(0, π/g)`.
pub fn minimal_theta_default(fam: &IsoparametricFamily) -> Result<f64> {
    let w = PI / fam.g as f64;
    minimal_theta(fam, (1e-6 * w, (1.0 - 1e-6) * w))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityPair {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentityPair {
    pub fn relative_error(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs().max(1.0)
    }
}

/// `Σ cot(θ + (k-1)π/n) = n cot nθ` and
/// `Σ cot^2(θ + (k-1)π/n) = n^2 cot^2 nθ + n^2 - n`.
pub fn cot_sum_identity(n: usize, theta: f64) -> Result<(IdentityPair, IdentityPair)> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let step = PI / n as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for k in 0..n {
        let a = theta + k as f64 * step;
        check_pole(a)?;
        let c = cot(a);
        sum += c;
        sum_sq += c * c;
    }
    let nf = n as f64;
    check_pole(nf * theta)?;
    let cn = cot(nf * theta);
    Ok((
        IdentityPair { lhs: sum, rhs: nf * cn },
        IdentityPair {
            lhs: sum_sq,
            rhs: nf * nf * cn * cn + nf * nf - nf,
        },
    ))
}

/// `∏ sin(θ + (k-1)π/n) = 2^{1-n} sin nθ` for `θ ∈ (0, π/n)`.
pub fn sin_product_identity(n: usize, theta: f64) -> Result<IdentityPair> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let nf = n as f64;
    if !(theta > 0.0 && theta < PI / nf) {
        return Err(Error::InvalidInput(format!(
            "theta = {theta} must lie in (0, pi/{n})"
        )));
    }
    let lhs = (0..n)
        .map(|k| (theta + k as f64 * PI / nf).sin())
        .product();
    Ok(IdentityPair {
        lhs,
        rhs: 2f64.powi(1 - n as i32) * (nf * theta).sin(),
    })
}

/// `points` angles covering one full period `(0, 2π/g)`, split evenly over
/// the branches `(0, π/g)` and `(π/g, 2π/g)`, each kept
/// [`GRID_POLE_MARGIN`]`·π/g` away from its poles.
pub fn theta_grid(fam: &IsoparametricFamily, points: usize) -> Vec<f64> {
    let w = PI / fam.g as f64;
    let margin = GRID_POLE_MARGIN * w;
    let first = points.div_ceil(2);
    let mut out = Vec::with_capacity(points);
    for (branch, count) in [(0usize, first), (1, points - first)] {
        let lo = branch as f64 * w + margin;
        let hi = (branch + 1) as f64 * w - margin;
        match count {
            0 => {}
            1 => out.push(0.5 * (lo + hi)),
            _ => out.extend(
                (0..count).map(|j| lo + (hi - lo) * j as f64 / (count - 1) as f64),
            ),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub theta: f64,
    pub h: f64,
    pub s: f64,
    pub r_m: f64,
    pub r_closed: f64,
}

impl GridPoint {
    pub fn residual(&self) -> f64 {
        (self.r_m - self.r_closed).abs() / self.r_closed.abs().max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub family: IsoparametricFamily,
    pub n: usize,
    pub min_r_m: f64,
    pub argmin_theta: f64,
    pub max_closed_form_residual: f64,
    pub equality_expected: bool,
    /// `min R < 1e-6` on the grid.
    pub equality_found: bool,
    pub minimal_theta: f64,
    pub s_at_minimal: f64,
    pub peng_terng_target: f64,
}

/// Evaluates the profile and the closed form on [`theta_grid`].
pub fn sweep(fam: &IsoparametricFamily, points: usize) -> Result<(Vec<GridPoint>, SweepSummary)> {
    let grid = theta_grid(fam, points);
    let mut rows = Vec::with_capacity(grid.len());
    for theta in grid {
        let p = curvature_profile(fam, theta)?;
        rows.push(GridPoint {
            theta,
            h: p.h,
            s: p.s,
            r_m: p.r_m,
            r_closed: scalar_curvature_closed_form(fam, theta)?,
        });
    }
    let (min_r_m, argmin_theta) = rows
        .iter()
        .map(|r| (r.r_m, r.theta))
        .fold((f64::INFINITY, f64::NAN), |acc, x| if x.0 < acc.0 { x } else { acc });
    let max_closed_form_residual = rows.iter().map(GridPoint::residual).fold(0.0, f64::max);
    let minimal = minimal_theta_default(fam)?;
    let s_at_minimal = curvature_profile(fam, minimal)?.s;
    let summary = SweepSummary {
        family: *fam,
        n: fam.n(),
        min_r_m,
        argmin_theta,
        max_closed_form_residual,
        equality_expected: fam.is_equality_case(),
        equality_found: min_r_m < 1e-6,
        minimal_theta: minimal,
        s_at_minimal,
        peng_terng_target: ((fam.g - 1) * fam.n()) as f64,
    };
    Ok((rows, summary))
}
