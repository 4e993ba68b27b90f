//! Newton's identities between power sums and elementary symmetric
//! polynomials.
//!
//! Elementary symmetric values are stored with positive sign
//! (`e_1 = Σλ_i`, `e_2 = Σ_{i<j} λ_iλ_j`, ...). The alternating signs of a
//! characteristic polynomial are applied only when a [`Poly`](crate::Poly)
//! is assembled.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

/// Leading power sums `p_1..p_m` of a multiset of `n` reals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerSums {
    n: usize,
    values: Vec<f64>,
}

impl PowerSums {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        if values.is_empty() {
            return Err(Error::InvalidInput("at least one power sum required".into()));
        }
        if values.len() > n {
            return Err(Error::InvalidInput(format!(
                "{} power sums given for n = {n}",
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("p_{} is not finite", k + 1)));
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `p_k`, 1-based.
    pub fn get(&self, k: usize) -> f64 {
        self.values[k - 1]
    }
}

/// Elementary symmetric values `e_1..e_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementarySymmetric {
    values: Vec<f64>,
}

impl ElementarySymmetric {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("e_{} is not finite", k + 1)));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `e_k`, 1-based, with `e_0 = 1`.
    pub fn get(&self, k: usize) -> f64 {
        if k == 0 {
            1.0
        } else {
            self.values[k - 1]
        }
    }
}

#[inline]
fn alt(i: usize) -> f64 {
    // (-1)^(i-1)
    if i % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `e_k = (1/k) Σ_{i=1..k} (-1)^{i-1} e_{k-i} p_i`, accumulated in ascending `i`.
pub fn power_sums_to_elementary(p: &PowerSums) -> ElementarySymmetric {
    let mut e = vec![1.0];
    for k in 1..=p.len() {
        let mut acc = 0.0;
        for i in 1..=k {
            acc += alt(i) * e[k - i] * p.get(i);
        }
        e.push(acc / k as f64);
    }
    e.remove(0);
    ElementarySymmetric { values: e }
}

/// `p_k = Σ_{i=1..k-1} (-1)^{i-1} e_i p_{k-i} + (-1)^{k-1} k e_k`.
///
/// The returned [`PowerSums`] uses `n = max(1, len(e))`.
pub fn elementary_to_power_sums(e: &ElementarySymmetric) -> PowerSums {
    let mut p: Vec<f64> = Vec::with_capacity(e.len());
    for k in 1..=e.len() {
        let mut acc = 0.0;
        for i in 1..k {
            acc += alt(i) * e.get(i) * p[k - i - 1];
        }
        acc += alt(k) * k as f64 * e.get(k);
        p.push(acc);
    }
    PowerSums {
        n: e.len().max(1),
        values: p,
    }
}

/// `p_k = Σ_i m_i μ_i^k` for `k = 1..k_max`.
pub fn power_sums_of(s: &Spectrum, k_max: usize) -> PowerSums {
    let mut values = vec![0.0; k_max];
    for ev in s.entries() {
        let mut pow = 1.0;
        for v in values.iter_mut() {
            pow *= ev.value;
            *v += ev.multiplicity as f64 * pow;
        }
    }
    PowerSums {
        n: s.n().max(k_max),
        values,
    }
}

/// The constant `C` with `e_n = ((-1)^{n-1}/n)·p_n + C`, given `c = p_1..p_{n-1}`.
///
/// `c` must hold exactly `n - 1` values.
pub fn dn_offset(c: &PowerSums) -> Result<f64> {
    let n = c.n();
    if c.len() + 1 != n {
        return Err(Error::InvalidInput(format!(
            "expected {} constraint values for n = {n}, got {}",
            n.saturating_sub(1),
            c.len()
        )));
    }
    let d = power_sums_to_elementary(c);
    let mut acc = 0.0;
    for i in 1..n {
        acc += alt(i) * d.get(n - i) * c.get(i);
    }
    Ok(acc / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ps(n: usize, v: &[f64]) -> PowerSums {
        PowerSums::new(n, v.to_vec()).unwrap()
    }

    #[test]
    fn zero_spectrum() {
        let e = power_sums_to_elementary(&ps(3, &[0.0, 0.0, 0.0]));
        assert_eq!(e.values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn three_point_spectrum() {
        // (x+1)x(x-1) = x^3 - x: e = (0, -1, 0)
        let e = power_sums_to_elementary(&ps(3, &[0.0, 2.0, 0.0]));
        assert_abs_diff_eq!(e.values()[0], 0.0);
        assert_abs_diff_eq!(e.values()[1], -1.0);
        assert_abs_diff_eq!(e.values()[2], 0.0);
        // Truncated list for n = 4 ({-1, 0, 0, 1}) gives the same leading e's.
        let e4 = power_sums_to_elementary(&ps(4, &[0.0, 2.0, 0.0]));
        assert_eq!(e.values(), e4.values());
    }

    #[test]
    fn inverse_direction() {
        let p = elementary_to_power_sums(&ElementarySymmetric::new(vec![0.0, -1.0, 0.0]).unwrap());
        assert_eq!(p.values(), &[0.0, 2.0, 0.0]);
        let p = elementary_to_power_sums(&ElementarySymmetric::new(vec![0.0, 0.0]).unwrap());
        assert_eq!(p.values(), &[0.0, 0.0]);
        let p = elementary_to_power_sums(&ElementarySymmetric::new(vec![2.0, 1.0]).unwrap());
        assert_eq!(p.values(), &[2.0, 2.0]);
    }

    #[test]
    fn power_sums_of_spectra() {
        let s = Spectrum::new(vec![(-1.0, 1), (1.0, 1)]).unwrap();
        assert_eq!(power_sums_of(&s, 2).values(), &[0.0, 2.0]);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = Spectrum::new(vec![(-h, 2), (h, 2)]).unwrap();
        let p = power_sums_of(&s, 4);
        for (got, want) in p.values().iter().zip([0.0, 2.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }

        let s = Spectrum::new(vec![(-1.0, 1), (0.0, 2), (1.0, 1)]).unwrap();
        assert_eq!(power_sums_of(&s, 4).values(), &[0.0, 2.0, 0.0, 2.0]);
    }

    #[test]
    fn offsets() {
        assert_abs_diff_eq!(dn_offset(&ps(3, &[0.0, 2.0])).unwrap(), 0.0);
        assert_abs_diff_eq!(dn_offset(&ps(4, &[0.0, 2.0, 0.0])).unwrap(), 0.5);
        assert_abs_diff_eq!(dn_offset(&ps(2, &[0.0])).unwrap(), 0.0);
    }

    #[test]
    fn offset_requires_n_minus_one_values() {
        assert!(matches!(
            dn_offset(&ps(4, &[0.0, 2.0])),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn rejects_non_finite() {
        assert!(PowerSums::new(2, vec![f64::NAN]).is_err());
        assert!(PowerSums::new(2, vec![]).is_err());
        assert!(PowerSums::new(1, vec![1.0, 2.0]).is_err());
    }
}
