//! Python bindings: algebras, invariants, codimensions, Kemer reports,
//! asymptotics and path bounds. Structured results come back as JSON strings
//! with the same layout the CLI writes.

use num_bigint::BigUint;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use picodim::asymptotics::{self, AsymptoticParams, ConjectureOptions, DEFAULT_PRECISION};
use picodim::codim::{self, CodimOptions, ORACLE_BUDGET};
use picodim::kemer::{self, KemerOptions};
use picodim::multilinear::{self, MultilinearPolynomial, SearchStrategy};
use picodim::paths::{self, MatrixCodims};
use picodim::scalar::{format_scalar, parse_decimal};
use picodim::{Error, StructureAlgebra};

fn py_err(e: Error) -> PyErr {
    if e.is_contract_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// A finite-dimensional associative algebra given by structure constants.
#[pyclass(name = "Algebra", frozen)]
struct PyAlgebra {
    inner: StructureAlgebra,
}

#[pymethods]
impl PyAlgebra {
    /// `mat:d`, `ut:d1,d2,...`, `assoc:blocks;r;u`, `prod:A*B` or `F`.
    #[staticmethod]
    fn build(spec: &str) -> PyResult<Self> {
        Ok(Self { inner: StructureAlgebra::from_builder_spec(spec).map_err(py_err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: StructureAlgebra::from_json(text).map_err(py_err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn basis(&self) -> Vec<String> {
        self.inner.basis_labels().to_vec()
    }

    fn radical_dim(&self) -> usize {
        self.inner.radical().dimension()
    }

    /// `(dim A_ss, nildeg(J) - 1)`.
    fn par(&self) -> PyResult<(usize, usize)> {
        let p = self.inner.par().map_err(py_err)?;
        Ok((p.dim_ss, p.s))
    }

    fn wedderburn(&self) -> PyResult<String> {
        to_json(&self.inner.wedderburn_data().map_err(py_err)?)
    }

    fn exp(&self) -> PyResult<usize> {
        kemer::exp_gz(&self.inner).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Algebra({:?}, dim={})", self.inner.name(), self.inner.dim())
    }
}

/// A multilinear polynomial with lazily kept alternations.
#[pyclass(name = "Polynomial", frozen)]
struct PyPolynomial {
    inner: MultilinearPolynomial,
}

#[pymethods]
impl PyPolynomial {
    #[staticmethod]
    fn capelli(n: usize) -> PyResult<Self> {
        Ok(Self { inner: multilinear::capelli(n).map_err(py_err)? })
    }

    /// Terms as `(word, coefficient)` with coefficients like `"-3/2"`.
    #[staticmethod]
    fn from_terms(variables: Vec<String>, terms: Vec<(Vec<String>, String)>) -> PyResult<Self> {
        let terms = terms
            .into_iter()
            .map(|(w, c)| Ok((w, parse_decimal(&c)?)))
            .collect::<picodim::Result<Vec<_>>>()
            .map_err(py_err)?;
        Ok(Self { inner: MultilinearPolynomial::new(&variables, terms).map_err(py_err)? })
    }

    fn alternate(&self, subset: Vec<String>) -> PyResult<Self> {
        Ok(Self { inner: self.inner.alternate(&subset).map_err(py_err)? })
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn terms(&self) -> Vec<(Vec<String>, String)> {
        self.inner.terms().into_iter().map(|(w, c)| (w, format_scalar(&c))).collect()
    }

    fn is_identity(&self, algebra: &PyAlgebra) -> PyResult<bool> {
        multilinear::is_identity(&self.inner, &algebra.inner).map_err(py_err)
    }

    /// JSON witness or `None` when the search found nothing.
    #[pyo3(signature = (algebra, seed = 0, budget = None))]
    fn find_nonzero_evaluation(&self, algebra: &PyAlgebra, seed: u64, budget: Option<u64>) -> PyResult<Option<String>> {
        let strategy = match budget {
            None => SearchStrategy::Structured { budget: None },
            Some(b) => SearchStrategy::Auto { seed, structured_budget: Some(b), random_budget: b },
        };
        let w = multilinear::find_nonzero_evaluation(&self.inner, &algebra.inner, strategy).map_err(py_err)?;
        w.as_ref().map(to_json).transpose()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }
}

fn codim_options(seed: u64, primes: Option<Vec<u64>>) -> CodimOptions {
    CodimOptions { seed, primes, ..Default::default() }
}

/// `[c_1, ..., c_n]` from verified modular ranks.
#[pyfunction]
#[pyo3(signature = (algebra, n, seed = 0, primes = None))]
fn codim_sequence(algebra: &PyAlgebra, n: usize, seed: u64, primes: Option<Vec<u64>>) -> PyResult<Vec<u64>> {
    Ok(codim::codim_sequence(&algebra.inner, n, &codim_options(seed, primes)).map_err(py_err)?.values())
}

/// Full records (method, primes, verification) as JSON, timings zeroed.
#[pyfunction]
#[pyo3(signature = (algebra, n, seed = 0))]
fn codim_records(algebra: &PyAlgebra, n: usize, seed: u64) -> PyResult<String> {
    let mut seq = codim::codim_sequence(&algebra.inner, n, &codim_options(seed, None)).map_err(py_err)?;
    for r in &mut seq.records {
        r.seconds = 0.0;
    }
    to_json(&seq)
}

#[pyfunction]
fn codim_exact(algebra: &PyAlgebra, n: usize) -> PyResult<u64> {
    Ok(codim::codimension_exact_oracle(&algebra.inner, n, ORACLE_BUDGET).map_err(py_err)?.c_n)
}

fn kemer_options(nu: usize, budget: u64, seed: u64) -> KemerOptions {
    KemerOptions { nu, budget, seed, ..Default::default() }
}

#[pyfunction]
#[pyo3(signature = (algebra, nu = kemer::DEFAULT_NU, budget = kemer::DEFAULT_BUDGET, seed = 0, exhaustive = None))]
fn kemer_report(algebra: &PyAlgebra, nu: usize, budget: u64, seed: u64, exhaustive: Option<usize>) -> PyResult<String> {
    to_json(&kemer::kemer_report(&algebra.inner, &kemer_options(nu, budget, seed), exhaustive).map_err(py_err)?)
}

#[pyfunction]
fn basicness_check(algebra: &PyAlgebra) -> PyResult<String> {
    to_json(&kemer::basicness_check(&algebra.inner).map_err(py_err)?)
}

/// `(q - d)/2 + s` as a reduced fraction string.
#[pyfunction]
fn predicted_t(q: usize, d: usize, s: usize) -> PyResult<String> {
    Ok(format_scalar(&asymptotics::predicted_t(q, d, s).map_err(py_err)?))
}

/// Rows `(n, lhs, rhs, ratio)`; `k` and `r` are decimal or fraction strings.
#[pyfunction]
#[pyo3(signature = (k, r, ns, precision = DEFAULT_PRECISION))]
fn regev_beckner(
    k: Vec<String>,
    r: Vec<String>,
    ns: Vec<usize>,
    precision: usize,
) -> PyResult<Vec<(usize, String, String, f64)>> {
    let parse = |v: &[String]| v.iter().map(|s| parse_decimal(s)).collect::<picodim::Result<Vec<_>>>();
    let params = AsymptoticParams::new(parse(&k).map_err(py_err)?, parse(&r).map_err(py_err)?).map_err(py_err)?;
    let rows = asymptotics::regev_beckner_table(&params, &ns, precision).map_err(py_err)?;
    Ok(rows.into_iter().map(|x| (x.n, x.lhs, x.rhs, x.ratio)).collect())
}

#[pyfunction]
#[pyo3(signature = (algebra, n, seed = 0))]
fn conjecture_report(algebra: &PyAlgebra, n: usize, seed: u64) -> PyResult<String> {
    let opts = ConjectureOptions {
        codim: codim_options(seed, None),
        kemer: KemerOptions { seed, ..Default::default() },
        window: None,
    };
    let mut report = asymptotics::conjecture_report(&algebra.inner, n, &opts).map_err(py_err)?;
    report.clear_timings();
    to_json(&report)
}

/// Rendered path structures with at most `s` radical words.
#[pyfunction]
fn path_structures(algebra: &PyAlgebra, s: usize) -> PyResult<Vec<String>> {
    let syms = paths::enumerate_symbols(&algebra.inner).map_err(py_err)?;
    let all = paths::enumerate_path_structures(&algebra.inner, s).map_err(py_err)?;
    Ok(all.iter().map(|p| p.render(&syms)).collect())
}

#[pyfunction]
#[pyo3(signature = (algebra, n, seed = 0))]
fn upper_bound_series(algebra: &PyAlgebra, n: usize, seed: u64) -> PyResult<BigUint> {
    let info = algebra.inner.associated_info().ok_or_else(|| py_err(Error::NotAssociated))?;
    let codims = MatrixCodims::compute(&info.block_dims, n, &codim_options(seed, None)).map_err(py_err)?;
    paths::upper_bound_series(&algebra.inner, n, &codims).map_err(py_err)
}

#[pymodule]
#[pyo3(name = "picodim")]
fn picodim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyAlgebra>()?;
    m.add_class::<PyPolynomial>()?;
    m.add_function(wrap_pyfunction!(codim_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(codim_records, m)?)?;
    m.add_function(wrap_pyfunction!(codim_exact, m)?)?;
    m.add_function(wrap_pyfunction!(kemer_report, m)?)?;
    m.add_function(wrap_pyfunction!(basicness_check, m)?)?;
    m.add_function(wrap_pyfunction!(predicted_t, m)?)?;
    m.add_function(wrap_pyfunction!(regev_beckner, m)?)?;
    m.add_function(wrap_pyfunction!(conjecture_report, m)?)?;
    m.add_function(wrap_pyfunction!(path_structures, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bound_series, m)?)?;
    Ok(())
}
