use isorigid::degenerate::{enumerate_patterns, solve_pattern};
use isorigid::pointwise::boundary_limit;
use isorigid::spectrum::endpoint_tolerance;
use isorigid::{ConstraintModel, Endpoint, Sampler, DEFAULT_TOL};
use nalgebra::{DMatrix, DVector};

fn power_sum(v: &[f64], k: i32) -> f64 {
    v.iter().map(|x| x.powi(k)).sum()
}

/// Extremes of `p_3` over spectra with `p_1 = c1`, `p_2 = c2`, sweeping
/// `λ1` on a grid and solving the remaining quadratic for `λ2`
/// (`λ3 = c1 - λ1 - λ2`).
fn n3_grid_oracle(c1: f64, c2: f64, steps: usize) -> (f64, f64) {
    let radius = c2.abs().sqrt() + c1.abs() + 1.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=steps {
        let l1 = -radius + 2.0 * radius * i as f64 / steps as f64;
        // l1^2 + l2^2 + (c1 - l1 - l2)^2 = c2, a quadratic in l2.
        let s = c1 - l1;
        let (qa, qb, qc) = (2.0, -2.0 * s, l1 * l1 + s * s - c2);
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            continue;
        }
        for sign in [-1.0, 1.0] {
            let l2 = (-qb + sign * disc.sqrt()) / (2.0 * qa);
            let spec = [l1, l2, s - l2];
            if (power_sum(&spec, 2) - c2).abs() >= 1e-6 {
                continue;
            }
            let p3 = power_sum(&spec, 3);
            lo = lo.min(p3);
            hi = hi.max(p3);
        }
    }
    (lo, hi)
}

#[test]
fn n3_interval_matches_grid() {
    let mut rng = Sampler::new(11);
    let mut cases = vec![(0.0, 2.0)];
    for _ in 0..20 {
        let v = rng.distinct_spectrum(3, -2.0, 2.0, 1e-2);
        cases.push((power_sum(&v, 1), power_sum(&v, 2)));
    }
    for (c1, c2) in cases {
        let m = ConstraintModel::build(3, &[c1, c2]).unwrap();
        let iv = m.feasible_interval().unwrap();
        let (lo, hi) = n3_grid_oracle(c1, c2, 200_000);
        assert!((iv.a - lo).abs() < 1e-3, "c = ({c1}, {c2}): a = {} vs {lo}", iv.a);
        assert!((iv.b - hi).abs() < 1e-3, "c = ({c1}, {c2}): b = {} vs {hi}", iv.b);
    }
}

fn random_model(rng: &mut Sampler, n: usize) -> (ConstraintModel, Vec<f64>) {
    let v = rng.distinct_spectrum(n, -2.0, 2.0, 1e-2);
    let c: Vec<f64> = (1..n as i32).map(|k| power_sum(&v, k)).collect();
    (ConstraintModel::build(n, &c).unwrap(), v)
}

#[test]
fn feasibility_characterisation() {
    let mut rng = Sampler::new(5);
    for n in 3..=6 {
        for _ in 0..10 {
            let (m, _) = random_model(&mut rng, n);
            let iv = m.feasible_interval().unwrap();
            let width = iv.b - iv.a;
            for _ in 0..200 {
                let f = rng.uniform(iv.a - 0.5 * width, iv.b + 0.5 * width);
                let near = (f - iv.a).abs() <= endpoint_tolerance(iv.a)
                    || (f - iv.b).abs() <= endpoint_tolerance(iv.b);
                if near {
                    continue;
                }
                let inside = iv.a < f && f < iv.b;
                let got = m.spectrum_at(f, DEFAULT_TOL);
                assert_eq!(got.is_ok(), inside, "n = {n}, f = {f}, [{}, {}]", iv.a, iv.b);
                if let Ok(s) = got {
                    assert!(s.is_simple(), "interior f = {f} gave {:?}", s.multiplicities());
                }
            }
        }
    }
}

#[test]
fn degenerate_values_sit_on_endpoints() {
    let mut rng = Sampler::new(9);
    for n in 2..=6 {
        for _ in 0..10 {
            let (m, _) = random_model(&mut rng, n);
            let iv = m.feasible_interval().unwrap();
            for p in enumerate_patterns(n).unwrap() {
                let out = solve_pattern(&m, &p, DEFAULT_TOL).unwrap();
                if let Some(s) = out.solution() {
                    let on_end = [iv.a, iv.b]
                        .iter()
                        .any(|e| (s.f_value - e).abs() <= 1e-8 * (1.0 + e.abs()));
                    assert!(on_end, "pattern {p}: f = {} not in {{{}, {}}}", s.f_value, iv.a, iv.b);
                    let v = s.spectrum.eigenvalues();
                    for (k, c) in m.constraints().values().iter().enumerate() {
                        let scale = v.iter().map(|x| x.abs().powi(k as i32 + 1)).sum::<f64>();
                        assert!((power_sum(&v, k as i32 + 1) - c).abs() <= 1e-8 * scale.max(1.0));
                    }
                }
            }
        }
    }
}

/// Multi-start Gauss-Newton on `Σ m_i μ_i^k = c_k`, `k = 1..n-1`, over
/// strictly increasing `μ`. Returns every converged solution.
fn gauss_newton_patterns(pattern: &[usize], c: &[f64]) -> Vec<Vec<f64>> {
    let g = pattern.len();
    let rows = c.len();
    let grid: Vec<f64> = (0..7).map(|i| -2.4 + 0.8 * i as f64).collect();
    let mut starts = vec![vec![]];
    for _ in 0..g {
        starts = starts
            .into_iter()
            .flat_map(|s| {
                grid.iter().map(move |&x| {
                    let mut t = s.clone();
                    t.push(x + 0.013 * t.len() as f64);
                    t
                })
            })
            .collect();
    }
    let residual = |mu: &[f64]| -> DVector<f64> {
        DVector::from_fn(rows, |k, _| {
            pattern
                .iter()
                .zip(mu)
                .map(|(&m, &x)| m as f64 * x.powi(k as i32 + 1))
                .sum::<f64>()
                - c[k]
        })
    };
    let mut found: Vec<Vec<f64>> = Vec::new();
    for start in starts {
        let mut mu = DVector::from_vec(start);
        for _ in 0..100 {
            let r = residual(mu.as_slice());
            let j = DMatrix::from_fn(rows, g, |k, i| {
                (k + 1) as f64 * pattern[i] as f64 * mu[i].powi(k as i32)
            });
            let Ok(step) = j.clone().svd(true, true).solve(&r, 1e-14) else {
                break;
            };
            mu -= step;
            if !mu.iter().all(|x| x.is_finite() && x.abs() < 10.0) {
                break;
            }
        }
        let r = residual(mu.as_slice());
        let ordered = mu.as_slice().windows(2).all(|w| w[1] - w[0] > 1e-3);
        if r.norm() < 1e-10 && ordered {
            let v = mu.as_slice().to_vec();
            if !found
                .iter()
                .any(|u| u.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-6))
            {
                found.push(v);
            }
        }
    }
    found
}

#[test]
fn degenerate_solver_matches_search() {
    let mut models = vec![
        ConstraintModel::build(3, &[0.0, 2.0]).unwrap(),
        ConstraintModel::build(4, &[0.0, 2.0, 0.0]).unwrap(),
        ConstraintModel::build(2, &[0.0]).unwrap(),
    ];
    let mut rng = Sampler::new(3);
    for n in [3, 3, 4, 4] {
        models.push(random_model(&mut rng, n).0);
    }
    for m in &models {
        let c = m.constraints().values().to_vec();
        for p in enumerate_patterns(m.n()).unwrap() {
            let ours = solve_pattern(m, &p, DEFAULT_TOL).unwrap();
            let search = gauss_newton_patterns(p.parts(), &c);
            assert!(search.len() <= 1, "pattern {p}: several solutions {search:?}");
            match (ours.solution(), search.first()) {
                (Some(s), Some(mu)) => {
                    let values: Vec<f64> = s.spectrum.entries().iter().map(|e| e.value).collect();
                    for (a, b) in values.iter().zip(mu) {
                        assert!((a - b).abs() < 1e-4, "pattern {p}: {values:?} vs {mu:?}");
                    }
                }
                (None, None) => {}
                (a, b) => panic!("pattern {p} on c = {c:?}: solver {a:?}, search {b:?}"),
            }
        }
    }
}

/// Limit of `(-1)^n u_p` at the boundary with the pair term's derivative
/// `H'(β)` replaced by Richardson-extrapolated central differences.
fn limit_by_differences(beta: &[f64], pairs: &[usize], p: usize) -> f64 {
    let n = beta.len();
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let mut acc = 0.0;
    for &i in pairs {
        let h_fn = |x: f64| {
            let mut v = (beta[p] - x).powi(2);
            for (k, &b) in beta.iter().enumerate() {
                if k != p && k != i && k != i + 1 {
                    v *= b - x;
                }
            }
            v
        };
        let b = beta[i];
        let central = |h: f64| (h_fn(b + h) - h_fn(b - h)) / (2.0 * h);
        let mut table: Vec<f64> = (0..5).map(|k| central(1e-2 / 2f64.powi(k))).collect();
        let mut factor = 4.0;
        for level in 1..table.len() {
            for k in (level..table.len()).rev() {
                table[k] = (factor * table[k] - table[k - 1]) / (factor - 1.0);
            }
            factor *= 4.0;
        }
        let dh = table[table.len() - 1];
        let hv = h_fn(b);
        acc += sign * dh / (hv * hv);
    }
    let in_pair = |j: usize| pairs.iter().any(|&i| j == i || j == i + 1);
    for j in 0..n {
        if j == p || in_pair(j) {
            continue;
        }
        let prod: f64 = (0..n)
            .filter(|&k| k != p && k != j)
            .map(|k| beta[k] - beta[j])
            .product();
        acc += sign / ((beta[p] - beta[j]).powi(2) * prod);
    }
    let fact: f64 = (1..=n - 2).map(|k| k as f64).product();
    2.0 * fact / n as f64 * acc
}

#[test]
fn boundary_limit_matches_differences() {
    let models = [
        ConstraintModel::build(3, &[0.0, 2.0]).unwrap(),
        ConstraintModel::build(4, &[0.0, 2.0, 0.0]).unwrap(),
        ConstraintModel::build(5, &[0.0, 3.0, 0.5, 4.0]).unwrap(),
    ];
    let mut checked = 0;
    for m in &models {
        for end in [Endpoint::Lower, Endpoint::Upper] {
            let Ok(bp) = m.boundary_pattern(end, DEFAULT_TOL) else {
                continue;
            };
            let beta = bp.spectrum.eigenvalues();
            let pairs: Vec<usize> = bp.doubled.iter().map(|d| d.start).collect();
            for p in 0..m.n() {
                if bp.in_doubled_pair(p) {
                    continue;
                }
                let ours = boundary_limit(m, end, p, DEFAULT_TOL).unwrap();
                let fd = limit_by_differences(&beta, &pairs, p);
                assert!(
                    (ours - fd).abs() <= 1e-9 * ours.abs().max(1.0),
                    "n = {}, {end:?}, p = {p}: {ours} vs {fd}",
                    m.n()
                );
                checked += 1;
            }
        }
    }
    assert!(checked >= 3);
}
