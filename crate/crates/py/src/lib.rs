//! Python bindings. Report structs cross the boundary as plain dicts.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use mixsum::characters::{Character, CharacterFamily as CoreFamily};
use mixsum::diophantine::{self as dioph, Theta as CoreTheta};
use mixsum::dual::{poisson_residuals, DualSetup};
use mixsum::weight::WeightFunction;
use mixsum::{counting, shortsum, sums, verify};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// serde value -> Python object, through the json module.
fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    let json = PyModule::import(py, "json")?;
    Ok(json.call_method1("loads", (text,))?.unbind())
}

#[pyclass(module = "mixsum", frozen)]
struct Theta {
    inner: CoreTheta,
}

#[pymethods]
impl Theta {
    /// `quad:p,d,q` for (p + √d)/q, `sqrt:d`, `rat:a/q`, `const:pi`, `const:e`.
    #[new]
    #[pyo3(signature = (spec, bits = 256))]
    fn new(spec: &str, bits: u32) -> PyResult<Self> {
        Ok(Self {
            inner: CoreTheta::parse(spec, bits).map_err(err)?,
        })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label()
    }

    #[getter]
    fn is_rational(&self) -> bool {
        self.inner.is_rational()
    }

    /// θ mod 1 as a float.
    fn reduced(&self) -> f64 {
        self.inner.reduced()
    }

    /// nθ mod 1.
    fn phase(&self, n: i64) -> f64 {
        self.inner.phase(n)
    }

    /// Certified enclosure (lo, hi) of ‖qθ‖.
    fn dist_nearest_int(&self, q: i64) -> (f64, f64) {
        let e = self.inner.dist_nearest_int(q);
        (e.lo, e.hi)
    }

    fn continued_fraction(&self, py: Python<'_>, depth: usize) -> PyResult<Py<PyAny>> {
        to_py(py, &dioph::continued_fraction(&self.inner, depth).map_err(err)?)
    }

    #[pyo3(signature = (constant = 0.05, q_max = 10_000))]
    fn check_condition(&self, py: Python<'_>, constant: f64, q_max: u64) -> PyResult<Py<PyAny>> {
        to_py(py, &dioph::check_condition(&self.inner, constant, q_max).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("Theta({:?})", self.inner.label())
    }
}

#[pyclass(module = "mixsum", frozen)]
struct Weight {
    inner: WeightFunction,
}

#[pymethods]
impl Weight {
    /// `bump` or `flat`.
    #[new]
    #[pyo3(signature = (spec = "bump"))]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self {
            inner: WeightFunction::parse(spec).map_err(err)?,
        })
    }

    #[getter]
    fn is_smooth(&self) -> bool {
        self.inner.is_smooth()
    }

    fn __call__(&self, t: f64) -> f64 {
        self.inner.eval(t)
    }

    /// (ŵ(ω), error bound).
    fn fourier(&self, omega: f64) -> PyResult<(Complex64, f64)> {
        self.inner.fourier(omega).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Weight({:?})", self.inner.to_string())
    }
}

/// The r - 1 Dirichlet characters mod a prime r.
#[pyclass(module = "mixsum", frozen)]
struct CharacterFamily {
    inner: CoreFamily,
}

impl CharacterFamily {
    fn chi(&self, j: u64) -> PyResult<Character> {
        self.inner.character(j).map_err(err)
    }
}

#[pymethods]
impl CharacterFamily {
    #[new]
    fn new(r: u64) -> PyResult<Self> {
        Ok(Self {
            inner: CoreFamily::new(r).map_err(err)?,
        })
    }

    #[getter]
    fn r(&self) -> u64 {
        self.inner.r()
    }

    fn __len__(&self) -> usize {
        self.inner.size()
    }

    /// χ_j(n).
    fn value(&self, j: u64, n: i64) -> PyResult<Complex64> {
        Ok(self.inner.value(self.chi(j)?, n))
    }

    fn gauss_sum(&self, j: u64) -> PyResult<Complex64> {
        Ok(self.inner.gauss_sum(self.chi(j)?).tau)
    }

    /// Σ_{n⩽x} χ_j(n) e(nθ) w(n/x), summed directly.
    #[pyo3(signature = (j, x, theta, weight = None))]
    fn mixed_sum(&self, j: u64, x: f64, theta: &Theta, weight: Option<&Weight>) -> PyResult<Complex64> {
        let w = weight.map_or_else(WeightFunction::bump, |w| w.inner.clone());
        Ok(sums::mixed_sum_direct(&self.inner, self.chi(j)?, x, &theta.inner, &w))
    }

    /// S(χ_j) for every j, through the index-class DFT.
    #[pyo3(signature = (x, theta, weight = None))]
    fn family_sums(&self, py: Python<'_>, x: f64, theta: &Theta, weight: Option<&Weight>) -> Vec<Complex64> {
        let w = weight.map_or_else(WeightFunction::bump, |w| w.inner.clone());
        py.detach(|| sums::family_sums(&self.inner, x, &theta.inner, &w).values)
    }

    #[pyo3(signature = (x, theta, weight = None))]
    fn moments(&self, py: Python<'_>, x: f64, theta: &Theta, weight: Option<&Weight>) -> PyResult<Py<PyAny>> {
        let w = weight.map_or_else(WeightFunction::bump, |w| w.inner.clone());
        let rep = py.detach(|| {
            let fs = sums::family_sums(&self.inner, x, &theta.inner, &w);
            sums::moments(&fs, &w)
        });
        to_py(py, &rep)
    }

    /// Poisson residuals for the characters j in `js`.
    #[pyo3(signature = (x, theta, js, weight = None, delta = 0.1, j_max = 8, m_max = None))]
    #[allow(clippy::too_many_arguments)]
    fn poisson_residuals(
        &self,
        py: Python<'_>,
        x: f64,
        theta: &Theta,
        js: Vec<u64>,
        weight: Option<&Weight>,
        delta: f64,
        j_max: usize,
        m_max: Option<i64>,
    ) -> PyResult<Py<PyAny>> {
        let w = weight.map_or_else(WeightFunction::bump, |w| w.inner.clone());
        let chars = js.into_iter().map(|j| self.chi(j)).collect::<PyResult<Vec<_>>>()?;
        let setup = DualSetup::new(self.inner.r(), x, &theta.inner, delta, j_max).map_err(err)?;
        let m_max = m_max.unwrap_or_else(|| (100.0 * setup.base()).ceil() as i64);
        let res = py
            .detach(|| poisson_residuals(&self.inner, &chars, &setup, &w, &theta.inner, m_max))
            .map_err(err)?;
        to_py(py, &res)
    }

    fn __repr__(&self) -> String {
        format!("CharacterFamily(r={})", self.inner.r())
    }
}

/// N(d, q) = #{(a, b) mod q : ab ≡ d}.
#[pyfunction]
fn n_count(d: i64, q: u64) -> u64 {
    counting::n_fast(d, q)
}

/// N_{S,P}(T) with box half-width `bx`.
#[pyfunction]
fn nsp_count(s: i64, p: i64, bx: i64) -> u64 {
    counting::nsp_fast(s, p, bx)
}

#[pyfunction]
fn injection_check(py: Python<'_>, bound: i64) -> PyResult<Py<PyAny>> {
    to_py(py, &py.detach(|| counting::injection_check(bound)))
}

#[pyfunction]
#[pyo3(signature = (s, terms = 10_000))]
fn dyadic_tail(py: Python<'_>, s: i64, terms: i64) -> PyResult<Py<PyAny>> {
    to_py(py, &counting::dyadic_tail(s, terms).map_err(err)?)
}

/// Σ over m₁m₂ = n₁n₂ ⩽ x, {m₁,m₂} ≠ {n₁,n₂}, of e((m₁+m₂-n₁-n₂)θ).
#[pyfunction]
fn offdiag_sum(py: Python<'_>, x: u64, theta: &Theta) -> Complex64 {
    py.detach(|| shortsum::offdiag_sum(x, &theta.inner))
}

#[pyfunction]
fn offdiag_brute(py: Python<'_>, x: u64, theta: &Theta) -> Complex64 {
    py.detach(|| shortsum::offdiag_brute(x, &theta.inner))
}

#[pyfunction]
#[pyo3(signature = (x, theta, eps = 0.1))]
fn case_decomposition(py: Python<'_>, x: u64, theta: &Theta, eps: f64) -> PyResult<Py<PyAny>> {
    let d = py.detach(|| shortsum::case_decomposition(x, &theta.inner, eps)).map_err(err)?;
    to_py(py, &d)
}

#[pyfunction]
fn fourth_moment_closure(py: Python<'_>, r: u64, x: u64, theta: &Theta) -> PyResult<Py<PyAny>> {
    let c = py.detach(|| shortsum::fourth_moment_closure(r, x, &theta.inner)).map_err(err)?;
    to_py(py, &c)
}

/// Exact identities at one (θ, r, x).
#[pyfunction]
#[pyo3(signature = (theta, r, x, weight = None))]
fn identity_suite(py: Python<'_>, theta: &Theta, r: u64, x: f64, weight: Option<&Weight>) -> PyResult<Py<PyAny>> {
    let w = weight.map_or_else(WeightFunction::bump, |w| w.inner.clone());
    let s = py.detach(|| verify::identity_suite(&theta.inner, r, x, &w)).map_err(err)?;
    to_py(py, &s)
}

/// One acceptance criterion, 1 through 10.
#[pyfunction]
fn run_criterion(py: Python<'_>, id: u8) -> PyResult<Py<PyAny>> {
    if !(1..=10).contains(&id) {
        return Err(PyValueError::new_err(format!("criterion {id} is not in 1..=10")));
    }
    to_py(py, &py.detach(|| verify::run(id)))
}

#[pymodule]
#[pyo3(name = "mixsum")]
fn mixsum_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Theta>()?;
    m.add_class::<Weight>()?;
    m.add_class::<CharacterFamily>()?;
    m.add_function(wrap_pyfunction!(n_count, m)?)?;
    m.add_function(wrap_pyfunction!(nsp_count, m)?)?;
    m.add_function(wrap_pyfunction!(injection_check, m)?)?;
    m.add_function(wrap_pyfunction!(dyadic_tail, m)?)?;
    m.add_function(wrap_pyfunction!(offdiag_sum, m)?)?;
    m.add_function(wrap_pyfunction!(offdiag_brute, m)?)?;
    m.add_function(wrap_pyfunction!(case_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(fourth_moment_closure, m)?)?;
    m.add_function(wrap_pyfunction!(identity_suite, m)?)?;
    m.add_function(wrap_pyfunction!(run_criterion, m)?)?;
    Ok(())
}
