use isorigid::pointwise::{compare_gradients, dfpsi_density, dpsi_density, l_value, u_ij};
use isorigid::symfunc::{
    dn_offset, elementary_to_power_sums, power_sums_of, power_sums_to_elementary,
};
use isorigid::{ConstraintModel, Poly, PowerSums, Spectrum, DEFAULT_TOL};
use proptest::prelude::*;

/// Coefficients of ∏(x - r_i), ascending, by repeated multiplication.
fn expand(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (k, &a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= r * a;
        }
        c = next;
    }
    c
}

/// `-2 (n-2)! / n`.
fn prefactor(n: usize) -> f64 {
    -2.0 * (1..=n - 2).map(|k| k as f64).product::<f64>() / n as f64
}

fn naive_power_sum(v: &[f64], k: i32) -> f64 {
    v.iter().map(|x| x.powi(k)).sum()
}

fn abs_power_sum(v: &[f64], k: i32) -> f64 {
    v.iter().map(|x| x.abs().powi(k)).sum()
}

fn separated(mut v: Vec<f64>, gap: f64) -> Option<Vec<f64>> {
    v.sort_by(f64::total_cmp);
    v.windows(2).all(|w| w[1] - w[0] >= gap).then_some(v)
}

prop_compose! {
    fn distinct_roots(max_n: usize, lo: f64, hi: f64, gap: f64)
        (v in prop::collection::vec(lo..hi, 2..=max_n)
            .prop_filter_map("roots too close", move |v| separated(v, gap)))
        -> Vec<f64> { v }
}

prop_compose! {
    fn spectrum_entries(max_g: usize, gap: f64)
        (values in prop::collection::vec(-2.0f64..2.0, 1..=max_g)
            .prop_filter_map("values too close", move |v| separated(v, gap)))
        (mults in prop::collection::vec(1usize..=3, values.len()), values in Just(values))
        -> Vec<(f64, usize)> { values.into_iter().zip(mults).collect() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn newton_round_trip(values in prop::collection::vec(-5.0f64..5.0, 1..=12)) {
        let n = values.len();
        let p = PowerSums::new(n, values.clone()).unwrap();
        let back = elementary_to_power_sums(&power_sums_to_elementary(&p));
        for (k, (a, b)) in values.iter().zip(back.values()).enumerate() {
            let err = (a - b).abs() / a.abs().max(1.0);
            prop_assert!(err < 1e-10, "k = {}: {} vs {}", k + 1, a, b);
        }
    }

    #[test]
    fn elementary_match_expanded_product(entries in spectrum_entries(5, 1e-2)) {
        let s = Spectrum::new(entries).unwrap();
        let roots = s.eigenvalues();
        let n = roots.len();
        let e = power_sums_to_elementary(&power_sums_of(&s, n));
        let coeffs = expand(&roots);
        for k in 1..=n {
            // ∏(x - r) = Σ_k (-1)^k e_k x^{n-k}
            let want = if k % 2 == 0 { coeffs[n - k] } else { -coeffs[n - k] };
            let scale = expand(&roots.iter().map(|r| -r.abs()).collect::<Vec<_>>())[n - k].abs();
            prop_assert!((e.get(k) - want).abs() <= 1e-9 * scale.max(1.0),
                "e_{} = {} vs {}", k, e.get(k), want);
        }
        let from_poly = Poly::from_roots(&roots);
        for (a, b) in from_poly.coeffs().iter().zip(&coeffs) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn offset_matches_spectra(entries in spectrum_entries(5, 1e-2)) {
        let s = Spectrum::new(entries).unwrap();
        let n = s.n();
        prop_assume!(n >= 2);
        let p = power_sums_of(&s, n);
        let c = PowerSums::new(n, p.values()[..n - 1].to_vec()).unwrap();
        let e = power_sums_to_elementary(&p);
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let got = e.get(n) - sign / n as f64 * p.values()[n - 1];
        let want = dn_offset(&c).unwrap();
        let scale = abs_power_sum(&s.eigenvalues(), n as i32).max(1.0);
        prop_assert!((got - want).abs() <= 1e-9 * scale, "{} vs {}", got, want);
    }

    #[test]
    fn simple_roots_recovered(roots in distinct_roots(10, -2.0, 2.0, 1e-3)) {
        let p = Poly::from_roots(&roots);
        let found = p.real_roots(1e-10).unwrap();
        prop_assert_eq!(found.roots().len(), roots.len());
        let d = p.derivative();
        for (r, got) in roots.iter().zip(found.roots()) {
            prop_assert_eq!(got.multiplicity, 1);
            // Forward-error bound of a simple root under coefficient rounding.
            let cond = p.residual_scale(*r) / d.eval(*r).abs();
            prop_assert!((got.value - r).abs() <= 1e-10 + 64.0 * f64::EPSILON * cond,
                "root {} found at {}", r, got.value);
            prop_assert!(p.eval(got.value).abs()
                <= p.coeffs().iter().map(|c| c.abs()).sum::<f64>()
                    * got.value.abs().max(1.0).powi(p.degree() as i32) * 1e-10);
        }
    }

    #[test]
    fn well_separated_roots_within_tol(roots in distinct_roots(6, -2.0, 2.0, 0.2)) {
        let p = Poly::from_roots(&roots);
        let found = p.real_roots(1e-10).unwrap();
        prop_assert_eq!(found.values().len(), roots.len());
        for (r, v) in roots.iter().zip(found.values()) {
            prop_assert!((v - r).abs() <= 1e-10, "{} vs {}", r, v);
        }
    }

    #[test]
    fn multiple_roots_keep_multiplicity(entries in spectrum_entries(3, 0.25)) {
        let s = Spectrum::new(entries.clone()).unwrap();
        let p = Poly::from_roots(&s.eigenvalues());
        let found = p.real_roots(DEFAULT_TOL).unwrap();
        let got: Vec<usize> = found.roots().iter().map(|r| r.multiplicity).collect();
        prop_assert_eq!(got, s.multiplicities());
        let deg = p.degree() as f64;
        for (r, e) in found.roots().iter().zip(s.entries()) {
            // A root of multiplicity m moves by about (δ/|Q(r)|)^(1/m) when
            // the coefficients are perturbed by δ, where P = (x - r)^m Q.
            let q: f64 = s
                .entries()
                .iter()
                .filter(|o| o.value != e.value)
                .map(|o| (e.value - o.value).abs().powi(o.multiplicity as i32))
                .product();
            let delta = 16.0 * deg * f64::EPSILON * p.residual_scale(e.value);
            let allowed = 10.0 * (delta / q).powf(1.0 / e.multiplicity as f64) + 1e-12;
            prop_assert!((r.value - e.value).abs() <= allowed,
                "{} vs {} (allowed {})", r.value, e.value, allowed);
        }
    }

    #[test]
    fn rolle_interlacing(roots in distinct_roots(9, -2.0, 2.0, 1e-2)) {
        let p = Poly::from_roots(&roots);
        let found = p.real_roots(DEFAULT_TOL).unwrap().values();
        let crit = p.critical_points(DEFAULT_TOL).unwrap().values();
        for w in found.windows(2) {
            prop_assert!(crit.iter().any(|&c| c > w[0] && c < w[1]));
        }
        let via_derivative = p.derivative().real_roots(DEFAULT_TOL).unwrap().values();
        prop_assert_eq!(crit, via_derivative);
    }

    #[test]
    fn spectrum_reproduces_constraints(roots in distinct_roots(8, -2.0, 2.0, 1e-3)) {
        let n = roots.len();
        let c: Vec<f64> = (1..n as i32).map(|k| naive_power_sum(&roots, k)).collect();
        let f = naive_power_sum(&roots, n as i32);
        let m = ConstraintModel::build(n, &c).unwrap();
        let s = m.spectrum_at(f, DEFAULT_TOL).unwrap();
        prop_assert!(s.is_simple());
        let p = power_sums_of(&s, n);
        for k in 1..=n {
            let want = if k < n { c[k - 1] } else { f };
            let scale = abs_power_sum(&roots, k as i32).max(1.0);
            prop_assert!((p.get(k) - want).abs() <= 1e-8 * scale,
                "p_{} = {} vs {}", k, p.get(k), want);
        }
        let iv = m.feasible_interval().unwrap();
        prop_assert!(iv.a <= f + 1e-9 * (1.0 + f.abs()));
        prop_assert!(f <= iv.b + 1e-9 * (1.0 + f.abs()));
        prop_assert!(iv.b_prime > iv.a_prime);
    }

    #[test]
    fn l_is_negative(roots in distinct_roots(8, -2.0, 2.0, 1e-3)) {
        prop_assume!(roots.len() >= 3);
        for r in 0..roots.len() {
            prop_assert!(l_value(&roots, r).unwrap() < 0.0);
        }
    }

    #[test]
    fn gradient_forms_agree(
        roots in distinct_roots(8, -2.0, 2.0, 1e-2),
        seed in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        let f_grad = &seed[..roots.len()];
        let cmp = compare_gradients(&roots, f_grad, DEFAULT_TOL).unwrap();
        prop_assert!(cmp.max_relative_discrepancy < 1e-9);
        prop_assert!(cmp.max_residual_closed < 1e-9);
        prop_assert!(cmp.max_residual_solve < 1e-9);
    }

    #[test]
    fn density_forms(
        roots in distinct_roots(8, -2.0, 2.0, 1e-2),
        grad in prop::collection::vec(-1.0f64..1.0, 8),
        r_m in 0.0f64..10.0,
    ) {
        prop_assume!(roots.len() >= 3);
        let n = roots.len();
        let f_grad = &grad[..n];
        prop_assert!(dpsi_density(&roots, r_m, f_grad).unwrap() >= 0.0);

        let single = dfpsi_density(&roots, f_grad).unwrap();
        let mut double = 0.0;
        let mut mag = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let t = f_grad[i] * f_grad[i] * u_ij(&roots, i, j).unwrap();
                    double += t;
                    mag += t.abs();
                }
            }
        }
        double *= prefactor(n);
        mag *= prefactor(n).abs();
        prop_assert!((single - double).abs() <= 1e-10 * mag.max(1.0));
    }
}
