"""Smoke test for the isorigid_py extension module.

Build and install the wheel first:

    maturin build --release -m crates/py/Cargo.toml
    pip install --force-reinstall target/wheels/isorigid_py-*.whl
    python python/smoke_test.py
"""

import math
import sys

import isorigid_py as iso


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def check(cond, what):
    if not cond:
        raise AssertionError(what)
    print(f"ok  {what}")


def main():
    m = iso.ConstraintModel(4, [0.0, 2.0, 0.0])
    iv = m.feasible_interval()
    check(close(iv["a"], 1.0) and close(iv["b"], 2.0), "worked model n=4 interval (1, 2)")
    check(m.f0_coefficients == [0.0, 0.0, -1.0, 0.0, 1.0], "F0 = x^4 - x^2")

    lower = m.boundary_pattern("lower")
    mults = [e["multiplicity"] for e in lower["spectrum"]["entries"]]
    check(mults == [2, 2], "spectrum at a is two doubled eigenvalues")
    upper = m.spectrum_at(2.0)
    check([k for _, k in upper] == [1, 2, 1], "spectrum at b has pattern (1, 2, 1)")

    rows = m.degenerate_patterns()
    solved = sorted((tuple(r["pattern"]), r["f"]) for r in rows if r["solved"])
    check(
        len(rows) == 7 and [p for p, _ in solved] == [(1, 2, 1), (2, 2)],
        "degenerate solver: (2,2) and (1,2,1) solved, five rejected",
    )

    m3 = iso.ConstraintModel(3, [0.0, 2.0])
    iv3 = m3.feasible_interval()
    w = 2.0 / math.sqrt(3.0)
    check(close(iv3["a"], -w) and close(iv3["b"], w), "worked model n=3 interval")
    check(math.isinf(iso.ConstraintModel(2, [0.0]).feasible_interval()["b"]), "n=2 has b = +inf")

    p = [1.5, 2.25, 3.375]
    check(
        all(close(x, y, 1e-12) for x, y in zip(iso.elementary_to_power_sums(iso.power_sums_to_elementary(p)), p)),
        "Newton identities round trip",
    )
    check(iso.real_roots([0.0, -1.0, 0.0, 1.0]) == [(-1.0, 1), (0.0, 1), (1.0, 1)], "roots of x^3 - x")

    rng = iso.Sampler(7)
    lam = rng.distinct_spectrum(6)
    check(all(iso.l_value(lam, r) < 0 for r in range(6)), "L(r) < 0 on a random spectrum")
    grad = [rng.uniform(-1.0, 1.0) for _ in lam]
    cmp = iso.compare_gradients(lam, grad)
    check(cmp["max_relative_discrepancy"] < 1e-9, "gradient forms agree")
    check(iso.dpsi_density(lam, 0.0, grad) >= 0.0, "d psi density is non-negative")

    scan = m.assertion_scan("upper")
    check(scan["passes"], "boundary scan at b: doubled indices diverge, others converge")

    sweep = iso.isopar_sweep(4, 1, 1, points=2000)["summary"]
    check(close(sweep["s_at_minimal"], 12.0, 1e-8), "g=4, m=1: S = 12 at the minimal angle")
    check(sweep["equality_found"], "g=4, m=1 reaches R_M = 0")
    theta = iso.minimal_theta(2, 1, 3)
    check(close(1.0 / math.tan(theta), math.sqrt(3.0), 1e-9), "Clifford torus angle cot = sqrt(3)")

    (s1, s2) = iso.cot_sum_identity(5, 0.3)
    check(close(s1[0], s1[1]) and close(s2[0], s2[1], 1e-8), "cotangent sum identities")

    try:
        iso.ConstraintModel(4, [0.0, 2.0])
    except iso.IsorigidError as e:
        check("constraint" in str(e), "invalid input raises IsorigidError")
    else:
        raise AssertionError("expected IsorigidError")

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
