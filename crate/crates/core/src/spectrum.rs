//! Constraint models: the polynomial `F0` determined by the fixed power sums
//! `c_1..c_{n-1}`, the interval of attainable top power sums `f = p_n`, and
//! the spectra realised along it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{LocalExtrema, Poly, RootList, DEFAULT_TOL};
use crate::symfunc::{dn_offset, power_sums_to_elementary, ElementarySymmetric, PowerSums};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub value: f64,
    pub multiplicity: usize,
}

/// Distinct eigenvalues in strictly increasing order with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    entries: Vec<Eigenvalue>,
}

impl Spectrum {
    pub fn new(entries: Vec<(f64, usize)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("empty spectrum".into()));
        }
        let entries: Vec<Eigenvalue> = entries
            .into_iter()
            .map(|(value, multiplicity)| Eigenvalue {
                value,
                multiplicity,
            })
            .collect();
        for (k, e) in entries.iter().enumerate() {
            if !e.value.is_finite() {
                return Err(Error::InvalidInput(format!("eigenvalue {k} is not finite")));
            }
            if e.multiplicity == 0 {
                return Err(Error::InvalidInput(format!("eigenvalue {k} has multiplicity 0")));
            }
            if k > 0 && entries[k - 1].value >= e.value {
                return Err(Error::InvalidInput(
                    "eigenvalues must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self { entries })
    }

    /// Groups a list of reals into a spectrum; the input need not be sorted.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let mut entries: Vec<(f64, usize)> = Vec::new();
        for x in v {
            match entries.last_mut() {
                Some((last, m)) if *last == x => *m += 1,
                _ => entries.push((x, 1)),
            }
        }
        Self::new(entries)
    }

    pub fn from_roots(roots: &RootList) -> Result<Self> {
        Self::new(
            roots
                .roots()
                .iter()
                .map(|r| (r.value, r.multiplicity))
                .collect(),
        )
    }

    pub fn entries(&self) -> &[Eigenvalue] {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.multiplicity).collect()
    }

    /// Eigenvalues repeated by multiplicity, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat(e.value).take(e.multiplicity))
            .collect()
    }

    pub fn is_simple(&self) -> bool {
        self.entries.iter().all(|e| e.multiplicity == 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Lower,
    Upper,
}

impl std::str::FromStr for Endpoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" | "a" => Ok(Self::Lower),
            "upper" | "b" => Ok(Self::Upper),
            _ => Err(Error::InvalidInput(format!("unknown endpoint '{s}'"))),
        }
    }
}

/// Range `[a, b]` of the top power sum, with the `F0` critical values
/// `a'`, `b'` it is derived from. Missing extrema give infinite ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibleInterval {
    pub a: f64,
    pub b: f64,
    pub a_prime: f64,
    pub b_prime: f64,
}

impl FeasibleInterval {
    pub fn endpoint(&self, end: Endpoint) -> f64 {
        match end {
            Endpoint::Lower => self.a,
            Endpoint::Upper => self.b,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionLabel {
    X,
    Y,
    Z,
    #[serde(rename = "X_eps")]
    XEps,
    #[serde(rename = "Y_eps")]
    YEps,
    #[serde(rename = "Z_eps")]
    ZEps,
}

/// Coarse region (`X`, `Y` or `Z`) plus, inside `Y`, the ε-band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub region: RegionLabel,
    pub band: Option<RegionLabel>,
}

/// A repeated eigenvalue at an endpoint of the feasible interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoubledPair {
    /// 0-based position of the first copy in the ascending eigenvalue list.
    pub start: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryPattern {
    pub endpoint: Endpoint,
    pub f: f64,
    pub spectrum: Spectrum,
    pub doubled: Vec<DoubledPair>,
}

impl BoundaryPattern {
    pub fn doubled_indices(&self) -> Vec<usize> {
        self.doubled
            .iter()
            .flat_map(|d| [d.start, d.start + 1])
            .collect()
    }

    pub fn in_doubled_pair(&self, index: usize) -> bool {
        self.doubled
            .iter()
            .any(|d| index == d.start || index == d.start + 1)
    }
}

/// `F0(x) = x^n - d_1 x^{n-1} + ... + (-1)^{n-1} d_{n-1} x` for fixed
/// `c_1..c_{n-1}`, with `F(x) = F0(x) - f/n + (-1)^n C`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintModel {
    n: usize,
    c: PowerSums,
    d: ElementarySymmetric,
    offset: f64,
    f0: Poly,
}

/// Relative tolerance for `f` sitting on an endpoint.
pub fn endpoint_tolerance(x: f64) -> f64 {
    1e-9 * (1.0 + x.abs())
}

fn sign_pow(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl ConstraintModel {
    pub fn build(n: usize, c: &[f64]) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("n must be at least 2".into()));
        }
        if c.len() != n - 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} constraint values for n = {n}, got {}",
                n - 1,
                c.len()
            )));
        }
        let c = PowerSums::new(n, c.to_vec())?;
        let d = power_sums_to_elementary(&c);
        let offset = dn_offset(&c)?;

        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        for k in 1..n {
            coeffs[n - k] = sign_pow(k) * d.get(k);
        }
        let f0 = Poly::new(coeffs);
        Ok(Self {
            n,
            c,
            d,
            offset,
            f0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constraints(&self) -> &PowerSums {
        &self.c
    }

    pub fn elementary(&self) -> &ElementarySymmetric {
        &self.d
    }

    /// The constant `C` of `d_n = ((-1)^{n-1}/n) f + C`.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn f0(&self) -> &Poly {
        &self.f0
    }

    /// Constant shift taking `F0` to `F` at top power sum `f`.
    pub fn shift(&self, f: f64) -> f64 {
        -f / self.n as f64 + sign_pow(self.n) * self.offset
    }

    /// Inverse of [`shift`](Self::shift): the `f` at which `F = F0 + shift`.
    pub fn f_for_shift(&self, shift: f64) -> f64 {
        self.n as f64 * (sign_pow(self.n) * self.offset - shift)
    }

    pub fn char_poly_at(&self, f: f64) -> Poly {
        self.f0.add_constant(self.shift(f))
    }

    pub fn extrema(&self, tol: f64) -> Result<LocalExtrema> {
        self.f0.local_extreme_values(tol)
    }

    pub fn feasible_interval(&self) -> Result<FeasibleInterval> {
        self.feasible_interval_with_tol(DEFAULT_TOL)
    }

    /// `b'` = smallest local maximum of `F0`, `a'` = largest local minimum;
    /// `a = n(a' + (-1)^n C)`, `b = n(b' + (-1)^n C)`.
    pub fn feasible_interval_with_tol(&self, tol: f64) -> Result<FeasibleInterval> {
        let ext = self.extrema(tol)?;
        let b_prime = ext
            .maxima
            .iter()
            .map(|e| e.value)
            .fold(f64::INFINITY, f64::min);
        let a_prime = ext
            .minima
            .iter()
            .map(|e| e.value)
            .fold(f64::NEG_INFINITY, f64::max);
        let n = self.n as f64;
        let s = sign_pow(self.n) * self.offset;
        Ok(FeasibleInterval {
            a: n * (a_prime + s),
            b: n * (b_prime + s),
            a_prime,
            b_prime,
        })
    }

    /// Roots of `F` at top power sum `f`; fails unless all `n` are real.
    pub fn spectrum_at(&self, f: f64, tol: f64) -> Result<Spectrum> {
        if !f.is_finite() {
            return Err(Error::InvalidInput("f must be finite".into()));
        }
        self.spectrum_at_shift(self.shift(f), tol)
    }

    /// Roots of `F0 + shift`; fails unless all `n` are real.
    pub fn spectrum_at_shift(&self, shift: f64, tol: f64) -> Result<Spectrum> {
        if !shift.is_finite() {
            return Err(Error::InvalidInput("shift must be finite".into()));
        }
        let roots = self.f0.add_constant(shift).real_roots(tol)?;
        let found = roots.total_multiplicity();
        if found < self.n {
            return Err(Error::NonRealRoots {
                found,
                expected: self.n,
            });
        }
        Spectrum::from_roots(&roots)
    }

    pub fn classify_point(
        &self,
        interval: &FeasibleInterval,
        f: f64,
        eps: f64,
    ) -> Result<Classification> {
        classify_point(interval, f, eps)
    }

    /// Spectrum at an endpoint together with a check of the doubling
    /// structure: multiplicities at most 2, each doubled eigenvalue a local
    /// maximum of `F0` at `b` (minimum at `a`), and the first copy at a
    /// position congruent to `n` mod 2 at `b` (`n + 1` at `a`) in 1-based
    /// terms.
    pub fn boundary_pattern(&self, end: Endpoint, tol: f64) -> Result<BoundaryPattern> {
        let interval = self.feasible_interval_with_tol(tol)?;
        let f = interval.endpoint(end);
        if !f.is_finite() {
            return Err(Error::InvalidInput(format!(
                "{end:?} endpoint is infinite"
            )));
        }
        let critical_value = match end {
            Endpoint::Lower => interval.a_prime,
            Endpoint::Upper => interval.b_prime,
        };
        let spectrum = self.spectrum_at_shift(-critical_value, tol)?;

        let d2 = self.f0.derivative().derivative();
        let mut doubled = Vec::new();
        let mut pos = 0usize;
        for e in spectrum.entries() {
            match e.multiplicity {
                1 => {}
                2 => {
                    // 1-based index of the first copy is pos + 1.
                    let one_based = pos + 1;
                    let parity_ok = match end {
                        Endpoint::Upper => one_based % 2 == self.n % 2,
                        Endpoint::Lower => one_based % 2 != self.n % 2,
                    };
                    if !parity_ok {
                        return Err(Error::PatternViolation(format!(
                            "doubled eigenvalue {} at position {one_based} has the wrong parity for n = {}",
                            e.value, self.n
                        )));
                    }
                    let curv = d2.eval(e.value);
                    let kind_ok = match end {
                        Endpoint::Upper => curv < 0.0,
                        Endpoint::Lower => curv > 0.0,
                    };
                    if !kind_ok {
                        return Err(Error::PatternViolation(format!(
                            "doubled eigenvalue {} is not a local {} of F0",
                            e.value,
                            if end == Endpoint::Upper { "maximum" } else { "minimum" }
                        )));
                    }
                    doubled.push(DoubledPair {
                        start: pos,
                        value: e.value,
                    });
                }
                m => {
                    return Err(Error::PatternViolation(format!(
                        "eigenvalue {} has multiplicity {m}",
                        e.value
                    )))
                }
            }
            pos += e.multiplicity;
        }
        Ok(BoundaryPattern {
            endpoint: end,
            f,
            spectrum,
            doubled,
        })
    }
}

/// `X`/`Z` on the endpoints (relative tolerance 1e-9), `Y` strictly
/// between, refined into `X_eps`, `Y_eps`, `Z_eps` bands of width `eps`.
pub fn classify_point(interval: &FeasibleInterval, f: f64, eps: f64) -> Result<Classification> {
    let (a, b) = (interval.a, interval.b);
    if !interval.is_bounded() {
        return Err(Error::InvalidInput(
            "classification needs a bounded interval".into(),
        ));
    }
    if !(eps > 0.0 && eps < (b - a) / 2.0) {
        return Err(Error::InvalidInput(format!(
            "eps must lie in (0, {})",
            (b - a) / 2.0
        )));
    }
    let (ta, tb) = (endpoint_tolerance(a), endpoint_tolerance(b));
    if f < a - ta || f > b + tb || !f.is_finite() {
        return Err(Error::OutOfRange { f, a, b });
    }
    if (f - a).abs() <= ta {
        return Ok(Classification {
            region: RegionLabel::X,
            band: None,
        });
    }
    if (f - b).abs() <= tb {
        return Ok(Classification {
            region: RegionLabel::Z,
            band: None,
        });
    }
    let band = if f < a + eps {
        RegionLabel::XEps
    } else if f > b - eps {
        RegionLabel::ZEps
    } else {
        RegionLabel::YEps
    };
    Ok(Classification {
        region: RegionLabel::Y,
        band: Some(band),
    })
}
