use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use spectral_growth::cli::{self, Format, JobArgs};
use spectral_growth::group::{self as grp, GroupElement, GroupModel, Limits};
use spectral_growth::kernels::{self, LengthKernel, DEFAULT_TOLERANCE, DEFAULT_T_GRID};
use spectral_growth::Error;

create_exception!(spectral_growth, SpectralGrowthError, PyException);
create_exception!(spectral_growth, ResourceLimitError, SpectralGrowthError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Parse(_) | Error::InvalidArgument(_) => PyValueError::new_err(e.to_string()),
        Error::ResourceLimit { .. } => ResourceLimitError::new_err(e.to_string()),
        other => SpectralGrowthError::new_err(other.to_string()),
    }
}

fn limits() -> PyResult<Limits> {
    Limits::from_env().map_err(to_py)
}

/// A finitely generated group model built from the group grammar.
#[pyclass(frozen, module = "spectral_growth")]
struct Group {
    model: GroupModel,
}

impl Group {
    fn element(&self, text: &str) -> PyResult<GroupElement> {
        self.model.parse_element(text).map_err(to_py)
    }
}

#[pymethods]
impl Group {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Group { model: cli::parse_group(spec).map_err(to_py)? })
    }

    #[getter]
    fn label(&self) -> String {
        self.model.label()
    }

    #[getter]
    fn order(&self) -> Option<u64> {
        self.model.order()
    }

    fn identity(&self) -> String {
        self.model.format_element(&self.model.identity())
    }

    fn generators(&self) -> Vec<String> {
        self.model.generators().iter().map(|g| self.model.format_element(g)).collect()
    }

    fn multiply(&self, a: &str, b: &str) -> PyResult<String> {
        let (a, b) = (self.element(a)?, self.element(b)?);
        Ok(self.model.format_element(&self.model.multiply(&a, &b)))
    }

    fn invert(&self, g: &str) -> PyResult<String> {
        Ok(self.model.format_element(&self.model.invert(&self.element(g)?)))
    }

    /// Word length of `g`, or `None` beyond `horizon`.
    #[pyo3(signature = (g, horizon = 32))]
    fn word_length(&self, py: Python<'_>, g: &str, horizon: u64) -> PyResult<Option<u64>> {
        let g = self.element(g)?;
        let lim = limits()?;
        py.detach(|| grp::word_length(self.model.as_ref(), &g, horizon, &lim)).map_err(to_py)
    }

    /// Sphere sizes `|S_0|, …, |S_n|`.
    fn sphere_sizes(&self, py: Python<'_>, n: u64) -> PyResult<Vec<u64>> {
        let lim = limits()?;
        let ball = py.detach(|| grp::ball_enumerate(self.model.as_ref(), n, &lim)).map_err(to_py)?;
        Ok(ball.sphere_sizes)
    }

    /// Elements of the ball of radius `n`, in enumeration order.
    fn ball(&self, py: Python<'_>, n: u64) -> PyResult<Vec<String>> {
        let lim = limits()?;
        let ball = py.detach(|| grp::ball_enumerate(self.model.as_ref(), n, &lim)).map_err(to_py)?;
        Ok(ball.elements.iter().map(|g| self.model.format_element(g)).collect())
    }

    fn __repr__(&self) -> String {
        format!("Group({:?})", self.model.label())
    }
}

/// A length kernel on a group, built from the kernel grammar.
#[pyclass(frozen, module = "spectral_growth")]
struct Kernel {
    model: GroupModel,
    kernel: LengthKernel,
}

#[pymethods]
impl Kernel {
    #[new]
    fn new(group: &Group, spec: &str) -> PyResult<Self> {
        let kernel = cli::parse_kernel(spec, &group.model, &limits()?, None).map_err(to_py)?;
        Ok(Kernel { model: group.model.clone(), kernel })
    }

    #[getter]
    fn label(&self) -> String {
        self.kernel.label().to_string()
    }

    fn __call__(&self, g: &str) -> PyResult<f64> {
        let g = self.model.parse_element(g).map_err(to_py)?;
        Ok(self.kernel.evaluate(&g))
    }

    /// Whether `exp(-t·ℓ)` is positive semidefinite on the ball for every `t` in `ts`.
    #[pyo3(signature = (radius, ts = None, tolerance = DEFAULT_TOLERANCE))]
    fn schoenberg(&self, py: Python<'_>, radius: u64, ts: Option<Vec<f64>>, tolerance: f64) -> PyResult<bool> {
        let ts = ts.unwrap_or_else(|| DEFAULT_T_GRID.to_vec());
        let lim = limits()?;
        let report = py
            .detach(|| kernels::schoenberg_check(self.model.as_ref(), &self.kernel, radius, &ts, tolerance, &lim))
            .map_err(to_py)?;
        Ok(report.pass)
    }

    /// Largest eigenvalue of the centred Gram matrix, or `None` for a one-point ball.
    #[pyo3(signature = (radius, tolerance = DEFAULT_TOLERANCE))]
    fn cnd_eigenvalue(&self, py: Python<'_>, radius: u64, tolerance: f64) -> PyResult<Option<f64>> {
        let lim = limits()?;
        let report = py
            .detach(|| kernels::direct_cnd_check(self.model.as_ref(), &self.kernel, radius, tolerance, &lim))
            .map_err(to_py)?;
        Ok(report.max_restricted_eigenvalue)
    }

    fn __repr__(&self) -> String {
        format!("Kernel({:?}, {:?})", self.model.label(), self.kernel.label())
    }
}

/// Runs a subcommand and returns `(json, uncertified_reason)`.
///
/// Keyword arguments mirror the command-line flags; `big_n` is `--N`.
#[pyfunction]
#[pyo3(signature = (
    command, *, group = None, kernel = None, inclusion = None, n = None, big_n = None,
    lambda_ = None, t = None, radius = None, max_radius = None, tolerance = None,
    depth = None, probe_radius = None, horizons = None, config = None,
))]
#[allow(clippy::too_many_arguments)]
fn run(
    py: Python<'_>,
    command: &str,
    group: Option<String>,
    kernel: Option<String>,
    inclusion: Option<String>,
    n: Option<u64>,
    big_n: Option<usize>,
    lambda_: Option<f64>,
    t: Option<Vec<f64>>,
    radius: Option<u64>,
    max_radius: Option<u64>,
    tolerance: Option<f64>,
    depth: Option<usize>,
    probe_radius: Option<u64>,
    horizons: Option<Vec<u64>>,
    config: Option<PathBuf>,
) -> PyResult<(String, Option<String>)> {
    let mut args = JobArgs {
        group,
        kernel,
        inclusion,
        n,
        big_n,
        lambda: lambda_,
        t,
        radius,
        max_radius,
        tolerance,
        depth,
        probe_radius,
        horizons,
        format: Some(Format::Json),
        output: None,
        config: None,
    };
    if let Some(path) = config {
        args.merge_config(&cli::read_config(&path).map_err(to_py)?).map_err(to_py)?;
    }
    args.format = Some(Format::Json);
    let lim = limits()?;
    let outcome = py.detach(|| cli::run_job(command, &args, &lim)).map_err(to_py)?;
    Ok((outcome.text, outcome.uncertified))
}

#[pymodule]
#[pyo3(name = "spectral_growth")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Group>()?;
    m.add_class::<Kernel>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("SpectralGrowthError", m.py().get_type::<SpectralGrowthError>())?;
    m.add("ResourceLimitError", m.py().get_type::<ResourceLimitError>())?;
    Ok(())
}
