//! Python bindings: `import fibtower`.

use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use fibtower_core::factor::DEFAULT_RHO_BUDGET;
use fibtower_core::fib::DEFAULT_MAX_EXACT_INDEX;
use fibtower_core::oracle::DEFAULT_ORACLE_MAX_INDEX;
use fibtower_core::pisano::{pisano_period_with, PisanoMethod};
use fibtower_core::{AnalysisReport, Error, Grid, OracleResult, TowerSpec};

create_exception!(fibtower, BudgetError, PyRuntimeError, "A computation exceeded its budget.");
create_exception!(fibtower, MismatchError, PyRuntimeError, "A result contradicts its closed form.");

fn to_py(err: Error) -> PyErr {
    match err {
        Error::PreconditionViolated(_) | Error::NoC { .. } | Error::NoWitness { .. } => {
            PyValueError::new_err(err.to_string())
        }
        Error::BudgetExceeded { .. }
        | Error::OracleBudgetExceeded { .. }
        | Error::FactorBudgetExceeded { .. }
        | Error::CapExceeded { .. } => BudgetError::new_err(err.to_string()),
    }
}

fn spec(k: u64, n: u64, m: u64) -> PyResult<TowerSpec> {
    TowerSpec::new(k, n, m).map_err(to_py)
}

/// Exact F_i.
#[pyfunction]
#[pyo3(signature = (i, max_index = DEFAULT_MAX_EXACT_INDEX))]
fn fib(i: u64, max_index: u64) -> PyResult<BigUint> {
    fibtower_core::fib::fib_with_budget(i, max_index).map_err(to_py)
}

/// F_i mod m for arbitrary-size i and m >= 1.
#[pyfunction]
fn fib_mod(i: BigUint, m: BigUint) -> PyResult<BigUint> {
    if m == BigUint::ZERO {
        return Err(PyValueError::new_err("modulus must be at least 1"));
    }
    Ok(fibtower_core::fib_mod(&i, &m))
}

/// π(m) by "brute", "factored" or "auto".
#[pyfunction]
#[pyo3(signature = (m, method = "auto"))]
fn pisano_period(m: BigUint, method: &str) -> PyResult<BigUint> {
    let method = match method {
        "brute" => PisanoMethod::Brute,
        "factored" => PisanoMethod::Factored,
        "auto" => PisanoMethod::Auto,
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    };
    pisano_period_with(&m, method).map_err(to_py)
}

/// Prime factorization as a list of (prime, exponent).
#[pyfunction]
fn factorize(x: BigUint) -> PyResult<Vec<(BigUint, u32)>> {
    if x == BigUint::ZERO {
        return Err(PyValueError::new_err("cannot factor 0"));
    }
    let f = fibtower_core::factorize(&x, DEFAULT_RHO_BUDGET).map_err(to_py)?;
    Ok(f.factors().to_vec())
}

/// G(k,n,m) mod `modulus`.
#[pyfunction]
fn tower_residue(k: u64, n: u64, m: u64, modulus: BigUint) -> PyResult<BigUint> {
    if modulus == BigUint::ZERO {
        return Err(PyValueError::new_err("modulus must be at least 1"));
    }
    let f = fibtower_core::factorize(&modulus, DEFAULT_RHO_BUDGET).map_err(to_py)?;
    fibtower_core::tower_residue(&spec(k, n, m)?, &f).map_err(to_py)
}

/// Closed-form case name and predicted unit residue (None out of range).
#[pyfunction]
fn predicted_residue(k: u64, n: u64, m: u64) -> PyResult<(String, Option<BigUint>)> {
    let (case, value) = fibtower_core::predicted_residue(&spec(k, n, m)?).map_err(to_py)?;
    Ok((case.as_str().to_owned(), value))
}

#[pyclass(frozen, get_all, module = "fibtower")]
struct Analysis {
    k: u64,
    n: u64,
    m: u64,
    fn_value: BigUint,
    expected_valuation: u64,
    divisibility_ok: bool,
    unit_residue: BigUint,
    exact: Option<bool>,
    case: String,
    branch: Option<String>,
    predicted_residue: Option<BigUint>,
    matches: Option<bool>,
    chain_moduli: Vec<String>,
    chain_verified: bool,
    report: String,
}

#[pymethods]
impl Analysis {
    /// The report as the CLI prints it with `--json`.
    fn to_json(&self) -> String {
        self.report.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Analysis(G({},{},{}), unit_residue={}, case={})",
            self.k, self.n, self.m, self.unit_residue, self.case
        )
    }
}

impl From<AnalysisReport> for Analysis {
    fn from(r: AnalysisReport) -> Self {
        Analysis {
            k: r.spec.k,
            n: r.spec.n,
            m: r.spec.m,
            report: serde_json::to_string_pretty(&r).expect("serializable"),
            fn_value: r.fn_value,
            expected_valuation: r.expected_valuation,
            divisibility_ok: r.divisibility_ok,
            unit_residue: r.unit_residue,
            exact: r.exact,
            case: r.case.as_str().to_owned(),
            branch: r.branch.map(|b| b.as_str().to_owned()),
            predicted_residue: r.predicted_residue,
            matches: r.matches,
            chain_moduli: r.chain.moduli,
            chain_verified: r.chain.verified,
        }
    }
}

/// Valuation, unit residue and closed-form comparison for G(k,n,m).
#[pyfunction]
fn analyze(k: u64, n: u64, m: u64) -> PyResult<Analysis> {
    fibtower_core::analyze(&spec(k, n, m)?)
        .map(Analysis::from)
        .map_err(to_py)
}

#[pyclass(frozen, get_all, module = "fibtower")]
struct Oracle {
    value: BigUint,
    top_index: Option<u64>,
    valuation: Option<u64>,
    unit_residue: BigUint,
    quotient_residue: Option<BigUint>,
}

impl From<OracleResult> for Oracle {
    fn from(r: OracleResult) -> Self {
        Oracle {
            value: r.value,
            top_index: r.top_index,
            valuation: r.valuation,
            unit_residue: r.unit_residue,
            quotient_residue: r.quotient_residue,
        }
    }
}

/// G(k,n,m) computed exactly, refusing Fibonacci indices above `max_index`.
#[pyfunction]
#[pyo3(signature = (k, n, m, max_index = DEFAULT_ORACLE_MAX_INDEX))]
fn oracle_eval(py: Python<'_>, k: u64, n: u64, m: u64, max_index: u64) -> PyResult<Oracle> {
    let spec = spec(k, n, m)?;
    py.detach(|| fibtower_core::oracle_eval(&spec, max_index))
        .map(Oracle::from)
        .map_err(to_py)
}

/// Sweeps a grid given as range strings ("1..=6") and returns the report
/// as JSON or CSV text. Raises MismatchError if `strict` and any row fails.
#[pyfunction]
#[pyo3(signature = (k, n, m, jobs = 1, format = "json", strict = false))]
fn sweep(
    py: Python<'_>,
    k: &str,
    n: &str,
    m: &str,
    jobs: usize,
    format: &str,
    strict: bool,
) -> PyResult<String> {
    let grid = Grid {
        k: k.parse().map_err(to_py)?,
        n: n.parse().map_err(to_py)?,
        m: m.parse().map_err(to_py)?,
    };
    let report = py
        .detach(|| fibtower_core::run_sweep(&grid, jobs))
        .map_err(to_py)?;
    if strict && !report.all_ok() {
        return Err(MismatchError::new_err(format!(
            "{} mismatching rows",
            report.summary.mismatch
        )));
    }
    match format {
        "json" => Ok(report.to_json()),
        "csv" => Ok(report.to_csv()),
        other => Err(PyValueError::new_err(format!("unknown format {other:?}"))),
    }
}

#[pymodule]
fn fibtower(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(fib, m)?)?;
    m.add_function(wrap_pyfunction!(fib_mod, m)?)?;
    m.add_function(wrap_pyfunction!(pisano_period, m)?)?;
    m.add_function(wrap_pyfunction!(factorize, m)?)?;
    m.add_function(wrap_pyfunction!(tower_residue, m)?)?;
    m.add_function(wrap_pyfunction!(predicted_residue, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_eval, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_class::<Analysis>()?;
    m.add_class::<Oracle>()?;
    m.add("BudgetError", m.py().get_type::<BudgetError>())?;
    m.add("MismatchError", m.py().get_type::<MismatchError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
