//! Python bindings. Structured results come back as plain dicts and lists;
//! infinite interval ends are Python `inf`.

use isorigid::degenerate::solve_all_patterns;
use isorigid::isopar::{self, IsoparametricFamily};
use isorigid::pointwise;
use isorigid::symfunc::{self, ElementarySymmetric, PowerSums};
use isorigid::{ConstraintModel, Endpoint, Poly, Sampler, DEFAULT_TOL};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde::Serialize;
use serde_value::Value;

create_exception!(isorigid_py, IsorigidError, PyValueError);

fn err(e: isorigid::Error) -> PyErr {
    IsorigidError::new_err(e.to_string())
}

fn value_to_py<'py>(py: Python<'py>, v: Value) -> PyResult<Bound<'py, PyAny>> {
    match v {
        Value::Bool(b) => b.into_bound_py_any(py),
        Value::U8(x) => x.into_bound_py_any(py),
        Value::U16(x) => x.into_bound_py_any(py),
        Value::U32(x) => x.into_bound_py_any(py),
        Value::U64(x) => x.into_bound_py_any(py),
        Value::I8(x) => x.into_bound_py_any(py),
        Value::I16(x) => x.into_bound_py_any(py),
        Value::I32(x) => x.into_bound_py_any(py),
        Value::I64(x) => x.into_bound_py_any(py),
        Value::F32(x) => (x as f64).into_bound_py_any(py),
        Value::F64(x) => x.into_bound_py_any(py),
        Value::Char(c) => c.to_string().into_bound_py_any(py),
        Value::String(s) => s.into_bound_py_any(py),
        Value::Unit => py.None().into_bound_py_any(py),
        Value::Option(o) => match o {
            Some(inner) => value_to_py(py, *inner),
            None => py.None().into_bound_py_any(py),
        },
        Value::Newtype(inner) => value_to_py(py, *inner),
        Value::Seq(items) => {
            let items = items
                .into_iter()
                .map(|i| value_to_py(py, i))
                .collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_bound_py_any(py)
        }
        Value::Map(map) => {
            let d = PyDict::new(py);
            for (k, v) in map {
                d.set_item(value_to_py(py, k)?, value_to_py(py, v)?)?;
            }
            d.into_bound_py_any(py)
        }
        Value::Bytes(b) => b.into_bound_py_any(py),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_value::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    value_to_py(py, v)
}

fn endpoint(end: &str) -> PyResult<Endpoint> {
    end.parse().map_err(err)
}

/// Spectra with fixed power sums `c_1..c_{n-1}`.
#[pyclass(name = "ConstraintModel", frozen)]
struct PyConstraintModel {
    inner: ConstraintModel,
}

#[pymethods]
impl PyConstraintModel {
    #[new]
    fn new(n: usize, c: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: ConstraintModel::build(n, &c).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn c(&self) -> Vec<f64> {
        self.inner.constraints().values().to_vec()
    }

    #[getter]
    fn elementary(&self) -> Vec<f64> {
        self.inner.elementary().values().to_vec()
    }

    /// The constant `C` in `F = F0 - f/n + (-1)^n C`.
    #[getter]
    fn offset(&self) -> f64 {
        self.inner.offset()
    }

    /// Ascending coefficients of `F0`.
    #[getter]
    fn f0_coefficients(&self) -> Vec<f64> {
        self.inner.f0().coeffs().to_vec()
    }

    fn shift(&self, f: f64) -> f64 {
        self.inner.shift(f)
    }

    fn f_for_shift(&self, shift: f64) -> f64 {
        self.inner.f_for_shift(shift)
    }

    /// `{"maxima": [...], "minima": [...], "inflections": [...]}` of `F0`.
    #[pyo3(signature = (tol = DEFAULT_TOL))]
    fn extrema<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.extrema(tol).map_err(err)?)
    }

    /// `{"a", "b", "a_prime", "b_prime"}`.
    #[pyo3(signature = (tol = DEFAULT_TOL))]
    fn feasible_interval<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.feasible_interval_with_tol(tol).map_err(err)?)
    }

    /// Eigenvalues with multiplicities as `(value, multiplicity)` pairs.
    #[pyo3(signature = (f, tol = DEFAULT_TOL))]
    fn spectrum_at(&self, f: f64, tol: f64) -> PyResult<Vec<(f64, usize)>> {
        let s = self.inner.spectrum_at(f, tol).map_err(err)?;
        Ok(s.entries().iter().map(|e| (e.value, e.multiplicity)).collect())
    }

    /// `end` is `"lower"` or `"upper"`.
    #[pyo3(signature = (end, tol = DEFAULT_TOL))]
    fn boundary_pattern<'py>(
        &self,
        py: Python<'py>,
        end: &str,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let bp = self.inner.boundary_pattern(endpoint(end)?, tol).map_err(err)?;
        to_py(py, &bp)
    }

    /// `{"region": ..., "band": ...}` for `f` against the feasible interval.
    fn classify<'py>(&self, py: Python<'py>, f: f64, eps: f64) -> PyResult<Bound<'py, PyAny>> {
        let iv = self.inner.feasible_interval().map_err(err)?;
        to_py(py, &self.inner.classify_point(&iv, f, eps).map_err(err)?)
    }

    /// One dict per multiplicity pattern with its outcome.
    #[pyo3(signature = (tol = DEFAULT_TOL))]
    fn degenerate_patterns<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let outcomes = solve_all_patterns(&self.inner, tol).map_err(err)?;
        let rows = outcomes
            .iter()
            .map(|(p, o)| {
                let d = PyDict::new(py);
                d.set_item("pattern", p.parts().to_vec())?;
                d.set_item("solved", o.solution().is_some())?;
                d.set_item("f", o.solution().map(|s| s.f_value))?;
                d.set_item(
                    "spectrum",
                    o.solution().map(|s| {
                        s.spectrum
                            .entries()
                            .iter()
                            .map(|e| (e.value, e.multiplicity))
                            .collect::<Vec<_>>()
                    }),
                )?;
                d.set_item("reason", o.reason())?;
                Ok(d)
            })
            .collect::<PyResult<Vec<_>>>()?;
        PyList::new(py, rows)?.into_bound_py_any(py)
    }

    /// Limit of `(-1)^n u_p` at an endpoint, for `p` outside every doubled pair.
    #[pyo3(signature = (end, p, tol = DEFAULT_TOL))]
    fn boundary_limit(&self, end: &str, p: usize, tol: f64) -> PyResult<f64> {
        pointwise::boundary_limit(&self.inner, endpoint(end)?, p, tol).map_err(err)
    }

    /// Scan of `(-1)^n u_p` toward an endpoint; the dict mirrors the CLI report.
    #[pyo3(signature = (end, eps = 1e-2, n_samples = 50, tol = DEFAULT_TOL))]
    fn assertion_scan<'py>(
        &self,
        py: Python<'py>,
        end: &str,
        eps: f64,
        n_samples: usize,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let r = pointwise::assertion_scan(&self.inner, endpoint(end)?, eps, n_samples, tol)
            .map_err(err)?;
        let d = to_py(py, &r)?;
        d.set_item("passes", r.passes(1e-6))?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "ConstraintModel(n={}, c={:?})",
            self.inner.n(),
            self.inner.constraints().values()
        )
    }
}

/// Reproducible xoshiro256** stream.
#[pyclass(name = "Sampler")]
struct PySampler {
    inner: Sampler,
}

#[pymethods]
impl PySampler {
    #[new]
    fn new(seed: u64) -> Self {
        Self {
            inner: Sampler::new(seed),
        }
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn unit(&mut self) -> f64 {
        self.inner.unit()
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.inner.uniform(lo, hi)
    }

    #[pyo3(signature = (n, lo = -2.0, hi = 2.0, min_gap = 1e-3))]
    fn distinct_spectrum(&mut self, n: usize, lo: f64, hi: f64, min_gap: f64) -> PyResult<Vec<f64>> {
        if !(hi > lo) || n as f64 * min_gap > hi - lo {
            return Err(PyValueError::new_err("no room for n values with that gap"));
        }
        Ok(self.inner.distinct_spectrum(n, lo, hi, min_gap))
    }
}

/// Elementary symmetric values `d_1..d_n` from power sums `p_1..p_n`.
#[pyfunction]
fn power_sums_to_elementary(p: Vec<f64>) -> PyResult<Vec<f64>> {
    let ps = PowerSums::new(p.len(), p).map_err(err)?;
    Ok(symfunc::power_sums_to_elementary(&ps).values().to_vec())
}

/// Power sums `p_1..p_n` from elementary symmetric values `d_1..d_n`.
#[pyfunction]
fn elementary_to_power_sums(d: Vec<f64>) -> PyResult<Vec<f64>> {
    let e = ElementarySymmetric::new(d).map_err(err)?;
    Ok(symfunc::elementary_to_power_sums(&e).values().to_vec())
}

/// Real roots of the polynomial with ascending coefficients.
#[pyfunction]
#[pyo3(signature = (coeffs, tol = DEFAULT_TOL))]
fn real_roots(coeffs: Vec<f64>, tol: f64) -> PyResult<Vec<(f64, usize)>> {
    let roots = Poly::new(coeffs).real_roots(tol).map_err(err)?;
    Ok(roots.roots().iter().map(|r| (r.value, r.multiplicity)).collect())
}

#[pyfunction]
fn l_value(lam: Vec<f64>, r: usize) -> PyResult<f64> {
    pointwise::l_value(&lam, r).map_err(err)
}

#[pyfunction]
fn u_ij(lam: Vec<f64>, i: usize, j: usize) -> PyResult<f64> {
    pointwise::u_ij(&lam, i, j).map_err(err)
}

#[pyfunction]
fn u_i(lam: Vec<f64>, i: usize) -> PyResult<f64> {
    pointwise::u_i(&lam, i).map_err(err)
}

#[pyfunction]
fn u_all(lam: Vec<f64>) -> PyResult<Vec<f64>> {
    pointwise::u_all(&lam).map_err(err)
}

#[pyfunction]
fn dpsi_density(lam: Vec<f64>, scalar_curvature: f64, f_grad: Vec<f64>) -> PyResult<f64> {
    pointwise::dpsi_density(&lam, scalar_curvature, &f_grad).map_err(err)
}

#[pyfunction]
fn dfpsi_density(lam: Vec<f64>, f_grad: Vec<f64>) -> PyResult<f64> {
    pointwise::dfpsi_density(&lam, &f_grad).map_err(err)
}

fn matrix_rows(g: &pointwise::GradientData) -> Vec<Vec<f64>> {
    let m = &g.lambda_grad;
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Row `i`, column `j` holds the derivative of `λ_i` along the `j`-th
/// direction.
#[pyfunction]
fn lambda_gradient_closed_form(lam: Vec<f64>, f_grad: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
    let g = pointwise::lambda_gradient_closed_form(&lam, &f_grad).map_err(err)?;
    Ok(matrix_rows(&g))
}

#[pyfunction]
#[pyo3(signature = (lam, f_grad, tol = DEFAULT_TOL))]
fn lambda_gradient_linear_solve(lam: Vec<f64>, f_grad: Vec<f64>, tol: f64) -> PyResult<Vec<Vec<f64>>> {
    let g = pointwise::lambda_gradient_linear_solve(&lam, &f_grad, tol).map_err(err)?;
    Ok(matrix_rows(&g))
}

#[pyfunction]
#[pyo3(signature = (lam, f_grad, tol = DEFAULT_TOL))]
fn compare_gradients<'py>(
    py: Python<'py>,
    lam: Vec<f64>,
    f_grad: Vec<f64>,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &pointwise::compare_gradients(&lam, &f_grad, tol).map_err(err)?)
}

fn family(g: usize, m1: usize, m2: Option<usize>) -> PyResult<IsoparametricFamily> {
    IsoparametricFamily::new(g, m1, m2.unwrap_or(m1)).map_err(err)
}

/// `(g, m1, m2)` for every admissible family with `n <= n_max`.
#[pyfunction]
fn admissible_families(n_max: usize) -> Vec<(usize, usize, usize)> {
    isopar::admissible_families(n_max)
        .into_iter()
        .map(|f| (f.g(), f.m1(), f.m2()))
        .collect()
}

#[pyfunction]
#[pyo3(signature = (g, m1, theta, m2 = None))]
fn curvature_profile<'py>(
    py: Python<'py>,
    g: usize,
    m1: usize,
    theta: f64,
    m2: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let fam = family(g, m1, m2)?;
    to_py(py, &isopar::curvature_profile(&fam, theta).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (g, m1, m2 = None))]
fn minimal_theta(g: usize, m1: usize, m2: Option<usize>) -> PyResult<f64> {
    isopar::minimal_theta_default(&family(g, m1, m2)?).map_err(err)
}

/// `{"summary": {...}, "grid": [...]}` over a θ grid avoiding the poles.
#[pyfunction]
#[pyo3(signature = (g, m1, m2 = None, points = 1000))]
fn isopar_sweep<'py>(
    py: Python<'py>,
    g: usize,
    m1: usize,
    m2: Option<usize>,
    points: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let (grid, summary) = isopar::sweep(&family(g, m1, m2)?, points).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("summary", to_py(py, &summary)?)?;
    d.set_item("grid", to_py(py, &grid)?)?;
    d.into_bound_py_any(py)
}

/// `((lhs, rhs), (lhs, rhs))` for the cotangent sum and sum of squares.
#[pyfunction]
fn cot_sum_identity(n: usize, theta: f64) -> PyResult<((f64, f64), (f64, f64))> {
    let (a, b) = isopar::cot_sum_identity(n, theta).map_err(err)?;
    Ok(((a.lhs, a.rhs), (b.lhs, b.rhs)))
}

#[pyfunction]
fn sin_product_identity(n: usize, theta: f64) -> PyResult<(f64, f64)> {
    let p = isopar::sin_product_identity(n, theta).map_err(err)?;
    Ok((p.lhs, p.rhs))
}

#[pymodule]
fn isorigid_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("IsorigidError", m.py().get_type::<IsorigidError>())?;
    m.add("DEFAULT_TOL", DEFAULT_TOL)?;
    m.add_class::<PyConstraintModel>()?;
    m.add_class::<PySampler>()?;
    m.add_function(wrap_pyfunction!(power_sums_to_elementary, m)?)?;
    m.add_function(wrap_pyfunction!(elementary_to_power_sums, m)?)?;
    m.add_function(wrap_pyfunction!(real_roots, m)?)?;
    m.add_function(wrap_pyfunction!(l_value, m)?)?;
    m.add_function(wrap_pyfunction!(u_ij, m)?)?;
    m.add_function(wrap_pyfunction!(u_i, m)?)?;
    m.add_function(wrap_pyfunction!(u_all, m)?)?;
    m.add_function(wrap_pyfunction!(dpsi_density, m)?)?;
    m.add_function(wrap_pyfunction!(dfpsi_density, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_gradient_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_gradient_linear_solve, m)?)?;
    m.add_function(wrap_pyfunction!(compare_gradients, m)?)?;
    m.add_function(wrap_pyfunction!(admissible_families, m)?)?;
    m.add_function(wrap_pyfunction!(curvature_profile, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_theta, m)?)?;
    m.add_function(wrap_pyfunction!(isopar_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(cot_sum_identity, m)?)?;
    m.add_function(wrap_pyfunction!(sin_product_identity, m)?)?;
    Ok(())
}
