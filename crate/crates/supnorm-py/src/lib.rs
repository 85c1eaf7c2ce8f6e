//! Python bindings: the main value types and the verification suites.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::collections::BTreeMap;
use supnorm::archimedean::{Letter, Profile, WeightModule};
use supnorm::config::RunConfig;
use supnorm::sl2::{LieVector, QuadratureSpec};

fn err(e: supnorm::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn letters(word: &str) -> PyResult<Vec<Letter>> {
    word.chars()
        .map(|c| match c {
            'A' => Ok(Letter::A),
            'B' => Ok(Letter::B),
            'C' => Ok(Letter::C),
            _ => Err(PyValueError::new_err(format!("unknown letter {c:?}"))),
        })
        .collect()
}

#[pyclass(name = "WeightModule", frozen)]
struct PyWeightModule {
    inner: WeightModule,
}

#[pymethods]
impl PyWeightModule {
    #[new]
    #[pyo3(signature = (t, n=None))]
    fn new(t: f64, n: Option<usize>) -> Self {
        let inner = n.map_or_else(|| WeightModule::with_default_truncation(t), |n| WeightModule::new(t, n));
        Self { inner }
    }

    #[getter]
    fn t(&self) -> f64 {
        self.inner.t
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Coefficients of the sharp ("sharp") or smooth ("smooth") lift.
    fn lift(&self, kind: &str) -> PyResult<Vec<f64>> {
        let v = match kind {
            "sharp" => self.inner.build_sharp_lift(),
            "smooth" => self.inner.build_smooth_lift(Profile::Bump),
            _ => return Err(PyValueError::new_err("kind must be 'sharp' or 'smooth'")),
        }
        .map_err(err)?;
        Ok(v.coeffs.iter().map(|z| z.re).collect())
    }

    /// Defect of a lift at τ = T·A for a word such as "A" or "CB".
    fn localisation_defect(&self, kind: &str, word: &str) -> PyResult<f64> {
        let v = match kind {
            "sharp" => self.inner.build_sharp_lift(),
            "smooth" => self.inner.build_smooth_lift(Profile::Bump),
            _ => return Err(PyValueError::new_err("kind must be 'sharp' or 'smooth'")),
        }
        .map_err(err)?;
        let tau = self.inner.t * supnorm::sl2::A;
        self.inner.localisation_defect(&v, &tau, &letters(word)?).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("WeightModule(t={}, n={})", self.inner.t, self.inner.n)
    }
}

#[pyclass(name = "PrincipalModel", frozen)]
struct PyPrincipalModel {
    inner: supnorm::principal::PrincipalModel,
}

#[pymethods]
impl PyPrincipalModel {
    #[new]
    fn new(p: u64, r: u32) -> PyResult<Self> {
        supnorm::principal::PrincipalModel::new(p, r).map(|inner| Self { inner }).map_err(err)
    }

    fn num_cosets(&self) -> usize {
        self.inner.num_cosets()
    }

    fn new_vector_space_dim(&self) -> PyResult<usize> {
        self.inner.new_vector_space_dim().map_err(err)
    }

    fn ml_eigenspace_dim(&self) -> PyResult<usize> {
        self.inner.ml_eigenspace_dim().map_err(err)
    }

    /// (Σ|a_t|², [|a_t|]) for the newform in translates of the localised vector.
    fn newform_coefficients(&self) -> (f64, Vec<f64>) {
        let t = supnorm::principal::newform_decomposition(&self.inner);
        (t.sum_sq, t.rows.iter().map(|r| r.abs).collect())
    }
}

#[pyfunction]
fn bessel_k_scaled(t: f64, x: f64) -> PyResult<f64> {
    supnorm::bessel::bessel_k_scaled(t, x).map_err(err)
}

#[pyfunction]
fn bessel_k_scaled_series(t: f64, x: f64) -> f64 {
    supnorm::bessel::bessel_k_scaled_series(t, x)
}

#[pyfunction]
fn orbit_fourier(t: f64, a: f64, b: f64, c: f64) -> PyResult<f64> {
    supnorm::sl2::orbit_fourier(t, &LieVector::new(a, b, c), &QuadratureSpec::default()).map_err(err)
}

#[pyfunction]
fn orbit_fourier_closed_form(t: f64, a: f64, b: f64, c: f64) -> f64 {
    supnorm::sl2::orbit_fourier_closed_form(t, &LieVector::new(a, b, c))
}

#[pyfunction]
fn amplifier_coefficients(primes: Vec<u64>, x_l: Vec<f64>, x_l2: Vec<f64>) -> BTreeMap<u64, f64> {
    supnorm::amplifier::closed_form_coefficients(&primes, &x_l, &x_l2)
}

#[pyfunction]
fn key_inequality_infimum(step: f64) -> (f64, f64) {
    supnorm::amplifier::key_inequality_grid(step)
}

type Ledgers = BTreeMap<String, (String, String)>;

/// {"naive" | "amplified" | "improved": (X, main term)} and the final exponent as (num, den).
#[pyfunction]
fn theorem_exponents() -> PyResult<(Ledgers, Option<(i64, i64)>)> {
    let r = supnorm::exponents::derive_theorem_exponents().map_err(err)?;
    let ledgers = r
        .ledgers()
        .into_iter()
        .map(|l| (l.name.to_string(), (l.choice.x.to_string(), l.main.to_string())))
        .collect();
    Ok((ledgers, r.final_exponent.map(|e| (*e.numer(), *e.denom()))))
}

#[pyfunction]
fn exponent_table() -> PyResult<String> {
    supnorm::exponents::derive_theorem_exponents().map(|r| r.table()).map_err(err)
}

/// (l, t, s_l) for g = [[a, b], [v, w]] ∈ GL₂(ℤ_p).
#[pyfunction]
fn gtlv_invariants(a: i64, b: i64, v: i64, w: i64, p: u64, n: u32) -> PyResult<(u32, i64, u32)> {
    let g = [a as i128, b as i128, v as i128, w as i128];
    let r = supnorm::whittaker::gtlv_invariants(g, p, n).map_err(err)?;
    Ok((r.l, r.t, r.s_l))
}

/// Runs a suite and returns (passed, report JSON).
#[pyfunction]
#[pyo3(signature = (name, p=None, r=1, n=1, tmax=6400.0, seed=7))]
fn run_suite(name: &str, p: Option<u64>, r: u32, n: u32, tmax: f64, seed: u64) -> PyResult<(bool, String)> {
    let cfg = RunConfig { p, r, n, tmax, seed, ..RunConfig::default() };
    let rep = supnorm::suites::run(name, &cfg).map_err(err)?;
    Ok((rep.passed(), rep.to_json()))
}

#[pymodule]
pub fn supnorm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWeightModule>()?;
    m.add_class::<PyPrincipalModel>()?;
    m.add_function(wrap_pyfunction!(bessel_k_scaled, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_k_scaled_series, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_fourier, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_fourier_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(amplifier_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(key_inequality_infimum, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_exponents, m)?)?;
    m.add_function(wrap_pyfunction!(exponent_table, m)?)?;
    m.add_function(wrap_pyfunction!(gtlv_invariants, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add("SUITES", supnorm::suites::SUITES.to_vec())?;
    Ok(())
}
