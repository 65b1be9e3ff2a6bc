//! Python module `crlab`.

use pyo3::exceptions::{PyMemoryError, PyOSError, PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyComplex;

use crlab_core::arith;
use crlab_core::asymptotics::{self, CorrelationConfig, CorrelationSource, LemmaGrid, LemmaId};
use crlab_core::crsum;
use crlab_core::expansion::{self, ArgumentMode, Provenance};
use crlab_core::{Error, SExponent};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Overflow(_) => PyOverflowError::new_err(e.to_string()),
        Error::Resource(_) => PyMemoryError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        Error::Domain(_) | Error::Precondition(_) | Error::Parse(_) => {
            PyValueError::new_err(e.to_string())
        }
    }
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for crlab_core::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn exponent(s: u32) -> PyResult<SExponent> {
    SExponent::new(s).py_err()
}

fn mode_from(name: &str) -> PyResult<ArgumentMode> {
    match name {
        "plain_n" => Ok(ArgumentMode::PlainN),
        "n_to_s" => Ok(ArgumentMode::NToS),
        other => Err(PyValueError::new_err(format!(
            "argument mode must be 'plain_n' or 'n_to_s', not {other:?}"
        ))),
    }
}

/// c_r^s(n) as an exact integer.
#[pyfunction]
#[pyo3(signature = (r, n, s = 1))]
fn cr_sum(r: u64, n: u64, s: u32) -> PyResult<i128> {
    crsum::cr_sum_exact(r, n, exponent(s)?).py_err()
}

/// c_r^s(n) from the exponential sum over an s-reduced residue system.
#[pyfunction]
#[pyo3(signature = (r, n, s = 1))]
fn cr_sum_exponential(py: Python<'_>, r: u64, n: u64, s: u32) -> PyResult<Bound<'_, PyComplex>> {
    let z = crsum::cr_sum_exponential(r, n, exponent(s)?).py_err()?;
    Ok(PyComplex::from_doubles(py, z.re, z.im))
}

/// Orthogonality value modulo r^s as a (numerator, denominator) pair.
#[pyfunction]
#[pyo3(signature = (r, d, t, s = 1))]
fn orthogonality_value(r: u64, d: u64, t: u64, s: u32) -> PyResult<(i128, i128)> {
    let v = crsum::orthogonality_value(r, d, t, exponent(s)?).py_err()?;
    Ok((*v.numer(), *v.denom()))
}

#[pyfunction]
fn mobius(n: u64) -> PyResult<i8> {
    arith::mobius(n).py_err()
}

#[pyfunction]
#[pyo3(signature = (m, n, s = 1))]
fn gcd_s(m: u64, n: u64, s: u32) -> PyResult<u64> {
    arith::gcd_s(m, n, exponent(s)?).py_err()
}

#[pyfunction]
#[pyo3(signature = (n, s = 1))]
fn jordan_totient(n: u64, s: u32) -> PyResult<u128> {
    arith::jordan_totient(n, exponent(s)?).py_err()
}

#[pyfunction]
#[pyo3(signature = (n, s = 1))]
fn klee_phi(n: u64, s: u32) -> PyResult<u64> {
    arith::klee_phi(n, exponent(s)?).py_err()
}

#[pyfunction]
#[pyo3(signature = (n, s = 1))]
fn tau_s(n: u64, s: u32) -> PyResult<u64> {
    arith::tau_s(n, exponent(s)?).py_err()
}

#[pyfunction]
#[pyo3(signature = (n, k, s = 1))]
fn sigma_ks(n: u64, k: u32, s: u32) -> PyResult<u128> {
    arith::sigma_ks(n, k, exponent(s)?).py_err()
}

#[pyfunction]
fn zeta(x: f64) -> PyResult<f64> {
    arith::zeta(x).py_err()
}

/// (m, k) with h = m^s k and k s-th power free.
#[pyfunction]
#[pyo3(signature = (h, s = 1))]
fn decompose_h(h: u64, s: u32) -> PyResult<(u64, u64)> {
    let d = asymptotics::decompose_h(h, exponent(s)?).py_err()?;
    Ok((d.m, d.k))
}

#[pyfunction]
#[pyo3(signature = (a, b, h, s = 1))]
fn corollary_main(a: f64, b: f64, h: u64, s: u32) -> PyResult<f64> {
    asymptotics::corollary_main(a, b, exponent(s)?, h).py_err()
}

#[pyfunction]
#[pyo3(signature = (a, b, h, n_max, s = 1))]
fn corollary_lhs(a: f64, b: f64, h: u64, n_max: u64, s: u32) -> PyResult<f64> {
    asymptotics::corollary_lhs(a, b, exponent(s)?, h, n_max).py_err()
}

/// Correlation report for the σ pair with exponents a, b, as JSON text.
#[pyfunction]
#[pyo3(signature = (a, b, h, schedule, s = 1))]
fn corollary_report_json(a: f64, b: f64, h: u64, schedule: Vec<u64>, s: u32) -> PyResult<String> {
    let report = asymptotics::run_correlation_report(&CorrelationConfig {
        s: exponent(s)?,
        h,
        schedule,
        source: CorrelationSource::Corollary { a, b },
    })
    .py_err()?;
    let mut buf = Vec::new();
    report.write_json(&mut buf).py_err()?;
    String::from_utf8(buf).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Lemma grid report as JSON text. `which` is 1 to 4.
#[pyfunction]
#[pyo3(signature = (which, r_max, k_max, n_values, s_values = vec![1], h_values = vec![0]))]
fn lemma_check_json(
    which: &str,
    r_max: u64,
    k_max: u64,
    n_values: Vec<u64>,
    s_values: Vec<u32>,
    h_values: Vec<u64>,
) -> PyResult<String> {
    let lemma: LemmaId = which.parse().py_err()?;
    let grid = LemmaGrid {
        r_max,
        k_max,
        s_values: s_values
            .into_iter()
            .map(exponent)
            .collect::<PyResult<_>>()?,
        h_values,
        n_values,
    };
    let report = asymptotics::lemma_check(lemma, &grid).py_err()?;
    let mut buf = Vec::new();
    report.write_json(&mut buf).py_err()?;
    String::from_utf8(buf).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Immutable table of c_r^s(n) for 1 <= r <= r_max, 0 <= n <= n_max.
#[pyclass(name = "CRSumTable", frozen)]
struct PyCRSumTable {
    inner: crsum::CRSumTable,
}

#[pymethods]
impl PyCRSumTable {
    #[new]
    #[pyo3(signature = (r_max, n_max, s = 1))]
    fn new(r_max: u64, n_max: u64, s: u32) -> PyResult<Self> {
        let inner = crsum::CRSumTable::build(r_max, n_max, exponent(s)?).py_err()?;
        Ok(PyCRSumTable { inner })
    }

    #[getter]
    fn s(&self) -> u32 {
        self.inner.s().get()
    }

    #[getter]
    fn r_max(&self) -> usize {
        self.inner.r_max()
    }

    #[getter]
    fn n_max(&self) -> usize {
        self.inner.n_max()
    }

    fn get(&self, r: usize, n: usize) -> PyResult<i64> {
        self.inner
            .get(r, n)
            .ok_or_else(|| PyValueError::new_err(format!("({r}, {n}) is outside the table")))
    }

    fn row(&self, r: usize) -> PyResult<Vec<i64>> {
        self.inner
            .row(r)
            .map(<[i64]>::to_vec)
            .ok_or_else(|| PyValueError::new_err(format!("row {r} is outside the table")))
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.write_csv(&mut buf).py_err()?;
        String::from_utf8(buf).map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

/// Truncated expansion coefficients f̂(1), …, f̂(R).
#[pyclass(name = "ExpansionCoefficients", frozen)]
struct PyExpansion {
    inner: expansion::ExpansionCoefficients,
}

#[pymethods]
impl PyExpansion {
    /// Coefficients given directly; `mode` is "plain_n" or "n_to_s".
    #[new]
    #[pyo3(signature = (coefficients, s = 1, mode = "plain_n"))]
    fn new(coefficients: Vec<f64>, s: u32, mode: &str) -> PyResult<Self> {
        let inner = expansion::ExpansionCoefficients::new(
            exponent(s)?,
            mode_from(mode)?,
            coefficients,
            Provenance::Imported,
        )
        .py_err()?;
        Ok(PyExpansion { inner })
    }

    /// Closed-form family for σ_{ks}(n)/n^{ks}.
    #[staticmethod]
    #[pyo3(signature = (k, terms, s = 1))]
    fn sigma(k: u32, terms: usize, s: u32) -> PyResult<Self> {
        let inner = expansion::sigma_expansion(k, exponent(s)?, terms).py_err()?;
        Ok(PyExpansion { inner })
    }

    /// Mean-value coefficients of `f` over n = 1..=samples.
    #[staticmethod]
    #[pyo3(signature = (f, terms, samples, s = 1))]
    fn from_mean_values(f: Bound<'_, PyAny>, terms: usize, samples: u64, s: u32) -> PyResult<Self> {
        let values = (1..=samples)
            .map(|n| f.call1((n,))?.extract::<f64>())
            .collect::<PyResult<Vec<f64>>>()?;
        let inner = expansion::mean_value_family(
            |n| values[(n - 1) as usize],
            terms,
            exponent(s)?,
            samples,
        )
        .py_err()?;
        Ok(PyExpansion { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (text, s = 1, mode = "plain_n"))]
    fn from_csv(text: &str, s: u32, mode: &str) -> PyResult<Self> {
        let inner = expansion::ExpansionCoefficients::read_csv(
            text.as_bytes(),
            exponent(s)?,
            mode_from(mode)?,
            Provenance::Imported,
        )
        .py_err()?;
        Ok(PyExpansion { inner })
    }

    #[getter]
    fn s(&self) -> u32 {
        self.inner.s().get()
    }

    #[getter]
    fn mode(&self) -> &'static str {
        match self.inner.mode() {
            ArgumentMode::PlainN => "plain_n",
            ArgumentMode::NToS => "n_to_s",
        }
    }

    #[getter]
    fn coefficients(&self) -> Vec<f64> {
        self.inner.coefficients().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn evaluate(&self, n: u64) -> PyResult<f64> {
        self.inner.evaluate(n).py_err()
    }

    fn evaluate_truncated(&self, n: u64, terms: usize) -> PyResult<f64> {
        self.inner.evaluate_truncated(n, terms).py_err()
    }

    fn tau_weighted_norm(&self) -> PyResult<f64> {
        self.inner.tau_weighted_norm().py_err()
    }

    fn shift(&self, h: u64) -> PyResult<Self> {
        let inner = expansion::shift_coefficients(&self.inner, h).py_err()?;
        Ok(PyExpansion { inner })
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.write_csv(&mut buf).py_err()?;
        String::from_utf8(buf).map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

#[pyfunction]
#[pyo3(signature = (f, g, terms = None))]
fn theorem1_main(f: &PyExpansion, g: &PyExpansion, terms: Option<usize>) -> PyResult<f64> {
    let terms = terms.unwrap_or(f.inner.len().min(g.inner.len()));
    asymptotics::theorem1_main(&f.inner, &g.inner, terms).py_err()
}

#[pyfunction]
#[pyo3(signature = (f, g, h, terms = None))]
fn theorem2_main(f: &PyExpansion, g: &PyExpansion, h: u64, terms: Option<usize>) -> PyResult<f64> {
    let terms = terms.unwrap_or(f.inner.len().min(g.inner.len()));
    asymptotics::theorem2_main(&f.inner, &g.inner, h, terms).py_err()
}

#[pymodule]
fn crlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCRSumTable>()?;
    m.add_class::<PyExpansion>()?;
    m.add_function(wrap_pyfunction!(cr_sum, m)?)?;
    m.add_function(wrap_pyfunction!(cr_sum_exponential, m)?)?;
    m.add_function(wrap_pyfunction!(orthogonality_value, m)?)?;
    m.add_function(wrap_pyfunction!(mobius, m)?)?;
    m.add_function(wrap_pyfunction!(gcd_s, m)?)?;
    m.add_function(wrap_pyfunction!(jordan_totient, m)?)?;
    m.add_function(wrap_pyfunction!(klee_phi, m)?)?;
    m.add_function(wrap_pyfunction!(tau_s, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_ks, m)?)?;
    m.add_function(wrap_pyfunction!(zeta, m)?)?;
    m.add_function(wrap_pyfunction!(decompose_h, m)?)?;
    m.add_function(wrap_pyfunction!(corollary_main, m)?)?;
    m.add_function(wrap_pyfunction!(corollary_lhs, m)?)?;
    m.add_function(wrap_pyfunction!(corollary_report_json, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_check_json, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_main, m)?)?;
    m.add_function(wrap_pyfunction!(theorem2_main, m)?)?;
    Ok(())
}
