//! Python bindings for the flow-solution library.
//!
//! Exposes the main types as Python classes: `Model` (Massieu-Planck
//! potential), `Process` (curve rho -> p with derivatives), `Family` (the
//! solution family with branches, caustic, cusp, potential and shock
//! front), plus module-level `run_verify` and `fvm_crosscheck` drivers.
//!
//! Build with `cargo build --release -p eulerflow-py`; the cdylib in
//! `target/release` imports as `eulerflow_py` once renamed to
//! `eulerflow_py.so` (see python/smoke_test.py).

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use eulerflow::error::Error;
use eulerflow::exact::SolutionFamily;
use eulerflow::fvm;
use eulerflow::geometry;
use eulerflow::interval::Interval;
use eulerflow::process::ProcessCurve;
use eulerflow::singularity::{self, Branch};
use eulerflow::thermo::PotentialModel;
use eulerflow::verify;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Config(_) | Error::Singular(_) | Error::Ambiguous(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// A thermodynamic model (Massieu-Planck potential plus gas constant).
#[pyclass]
#[derive(Clone)]
struct Model {
    inner: PotentialModel,
}

#[pymethods]
impl Model {
    /// Ideal gas with n >= 3 degrees of freedom.
    #[staticmethod]
    fn ideal(n: f64, r: f64) -> PyResult<Self> {
        Ok(Model {
            inner: PotentialModel::ideal_gas(n, r).map_err(to_py_err)?,
        })
    }

    /// Van der Waals gas with attraction a and covolume b.
    #[staticmethod]
    fn van_der_waals(n: f64, r: f64, a: f64, b: f64) -> PyResult<Self> {
        Ok(Model {
            inner: PotentialModel::van_der_waals(n, r, a, b).map_err(to_py_err)?,
        })
    }

    /// State variables {v, T, p, e, s} at (v, T).
    fn state<'py>(&self, py: Python<'py>, v: f64, t: f64) -> PyResult<Bound<'py, PyDict>> {
        let s = self.inner.eval_state(v, t).map_err(to_py_err)?;
        let d = PyDict::new(py);
        d.set_item("v", s.v)?;
        d.set_item("T", s.temperature)?;
        d.set_item("p", s.pressure)?;
        d.set_item("e", s.energy)?;
        d.set_item("s", s.entropy)?;
        Ok(d)
    }

    /// Coefficients and verdict of the applicability form kappa at (v, T).
    fn kappa<'py>(&self, py: Python<'py>, v: f64, t: f64) -> PyResult<Bound<'py, PyDict>> {
        let k = self.inner.kappa_at(v, t).map_err(to_py_err)?;
        let d = PyDict::new(py);
        d.set_item("coeff_tt", k.coeff_tt)?;
        d.set_item("coeff_vv", k.coeff_vv)?;
        d.set_item("applicable", k.applicable)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// A process curve rho -> (T, p, ...) closing the flow system.
#[pyclass]
#[derive(Clone)]
struct Process {
    inner: ProcessCurve,
}

#[pymethods]
impl Process {
    /// Adiabatic process s = s0 on a model over [rho_min, rho_max].
    #[staticmethod]
    #[pyo3(signature = (model, s0=0.0, rho_min=1e-3, rho_max=1e3))]
    fn adiabatic(model: &Model, s0: f64, rho_min: f64, rho_max: f64) -> PyResult<Self> {
        let domain = Interval::positive(rho_min, rho_max).map_err(to_py_err)?;
        Ok(Process {
            inner: ProcessCurve::adiabatic(&model.inner, s0, domain).map_err(to_py_err)?,
        })
    }

    /// Tabulated barotropic curve from (rho, p) pairs.
    #[staticmethod]
    fn from_table(points: Vec<(f64, f64)>) -> PyResult<Self> {
        Ok(Process {
            inner: ProcessCurve::from_table(&points).map_err(to_py_err)?,
        })
    }

    fn temperature(&self, rho: f64) -> PyResult<f64> {
        self.inner.temperature(rho).map_err(to_py_err)
    }

    fn pressure(&self, rho: f64) -> PyResult<f64> {
        self.inner.pressure(rho).map_err(to_py_err)
    }

    fn dp_drho(&self, rho: f64) -> PyResult<f64> {
        self.inner.dp_drho(rho).map_err(to_py_err)
    }

    /// A(rho) = sqrt(p'(rho)) / rho.
    fn a_coeff(&self, rho: f64) -> PyResult<f64> {
        self.inner.a_coeff(rho).map_err(to_py_err)
    }

    /// "hyperbolic" | "elliptic" | "parabolic".
    fn classify(&self, rho: f64) -> PyResult<String> {
        let rep = self.inner.classify_at(rho).map_err(to_py_err)?;
        Ok(format!("{:?}", rep.classification).to_lowercase())
    }

    /// True iff p(rho) = c0 rho^3 + c1 (characteristic integrability).
    #[pyo3(signature = (tol=1e-8))]
    fn is_cubic_pressure(&self, tol: f64) -> PyResult<bool> {
        self.inner
            .is_characteristically_integrable(tol)
            .map_err(to_py_err)
    }
}

/// The solution family x = g(rho, t), u = U(rho, t).
#[pyclass]
struct Family {
    inner: SolutionFamily,
}

#[pymethods]
impl Family {
    #[new]
    fn new(process: &Process, alpha: [f64; 4]) -> PyResult<Self> {
        Ok(Family {
            inner: SolutionFamily::new(alpha, process.inner.clone()).map_err(to_py_err)?,
        })
    }

    fn g(&self, rho: f64, t: f64) -> PyResult<f64> {
        self.inner.g(rho, t).map_err(to_py_err)
    }

    fn velocity(&self, rho: f64, t: f64) -> PyResult<f64> {
        self.inner.velocity(rho, t).map_err(to_py_err)
    }

    fn potential_h(&self, rho: f64, t: f64) -> PyResult<f64> {
        singularity::potential_h(&self.inner, rho, t).map_err(to_py_err)
    }

    /// Density branches at (t, x) inside the window:
    /// {t, x, roots: [{rho, near_caustic}], edge_warning}.
    fn branches<'py>(
        &self,
        py: Python<'py>,
        t: f64,
        x: f64,
        window: (f64, f64),
    ) -> PyResult<Bound<'py, PyDict>> {
        let set = self.inner.branches(t, x, window).map_err(to_py_err)?;
        let roots = PyList::empty(py);
        for r in &set.roots {
            let d = PyDict::new(py);
            d.set_item("rho", r.rho)?;
            d.set_item("near_caustic", r.near_caustic)?;
            roots.append(d)?;
        }
        let out = PyDict::new(py);
        out.set_item("t", set.t)?;
        out.set_item("x", set.x)?;
        out.set_item("roots", roots)?;
        out.set_item("edge_warning", set.edge_warning)?;
        Ok(out)
    }

    /// Parametric profile [(x, rho, u)] over a density grid.
    fn section(&self, t: f64, rho_grid: Vec<f64>) -> PyResult<Vec<(f64, f64, f64)>> {
        let pts = self
            .inner
            .profile_section(t, &rho_grid)
            .map_err(to_py_err)?;
        Ok(pts.iter().map(|p| (p.x, p.rho, p.u)).collect())
    }

    /// Caustic branch "+" or "-" over a density grid: [(rho, t, x)].
    fn caustic(&self, branch: &str, rho_grid: Vec<f64>) -> PyResult<Vec<(f64, f64, f64)>> {
        let branch: Branch = branch.parse().map_err(to_py_err)?;
        let curve = singularity::caustic(&self.inner, branch, &rho_grid).map_err(to_py_err)?;
        Ok(curve.samples.iter().map(|s| (s.rho, s.t, s.x)).collect())
    }

    /// The shock birth point {rho, t, x} on the forward branch.
    fn cusp<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let c = singularity::cusp(&self.inner, singularity::forward_branch(&self.inner))
            .map_err(to_py_err)?;
        let d = PyDict::new(py);
        d.set_item("rho", c.rho)?;
        d.set_item("t", c.t)?;
        d.set_item("x", c.x)?;
        Ok(d)
    }

    /// Shock front samples over [t_min, t_max]: list of
    /// {t, x, rho_left, rho_right}.
    fn front<'py>(
        &self,
        py: Python<'py>,
        t_min: f64,
        t_max: f64,
        steps: usize,
    ) -> PyResult<Bound<'py, PyList>> {
        let front =
            singularity::shock_front(&self.inner, (t_min, t_max), steps).map_err(to_py_err)?;
        let out = PyList::empty(py);
        for s in &front.samples {
            let d = PyDict::new(py);
            d.set_item("t", s.t)?;
            d.set_item("x", s.x)?;
            d.set_item("rho_left", s.rho_left)?;
            d.set_item("rho_right", s.rho_right)?;
            out.append(d)?;
        }
        Ok(out)
    }

    /// Largest residual of the defining second-order PDE over seeded sample
    /// points (should be at roundoff level).
    #[pyo3(signature = (seed=1, samples=100))]
    fn ansatz_pde_residual(&self, seed: u64, samples: usize) -> PyResult<f64> {
        let pts = geometry::sample_points(self.inner.curve(), seed, samples).map_err(to_py_err)?;
        geometry::ansatz_pde_max_residual(&self.inner, &pts).map_err(to_py_err)
    }
}

/// Run the verification suite; returns {check: {residual, threshold,
/// passed}} plus an "all_passed" entry.
#[pyfunction]
#[pyo3(signature = (family, seed=1, samples=100))]
fn run_verify<'py>(
    py: Python<'py>,
    family: &Family,
    seed: u64,
    samples: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let report = verify::run_verification(&family.inner, seed, samples).map_err(to_py_err)?;
    let out = PyDict::new(py);
    for c in &report.checks {
        let row = PyDict::new(py);
        row.set_item("residual", c.residual)?;
        row.set_item("threshold", c.threshold)?;
        row.set_item("passed", c.passed)?;
        out.set_item(c.name, row)?;
    }
    out.set_item("all_passed", report.all_passed())?;
    Ok(out)
}

/// Run the finite-volume cross-check and report the located shock.
#[pyfunction]
#[pyo3(signature = (family, t0, t_end, cells, x_min, x_max, window, cfl=0.45))]
#[allow(clippy::too_many_arguments)]
fn fvm_crosscheck<'py>(
    py: Python<'py>,
    family: &Family,
    t0: f64,
    t_end: f64,
    cells: usize,
    x_min: f64,
    x_max: f64,
    window: (f64, f64),
    cfl: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = fvm::GridSpec {
        x_min,
        x_max,
        n_cells: cells,
    };
    let state = fvm::init_from_analytic(&family.inner, t0, spec, window).map_err(to_py_err)?;
    let report = fvm::run_to(
        family.inner.curve(),
        state,
        t_end,
        cfl,
        fvm::BoundaryCondition::Outflow,
    )
    .map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("steps", report.steps)?;
    d.set_item("dx", report.state.dx())?;
    d.set_item(
        "mass_conservation_residual",
        report.mass_conservation_residual,
    )?;
    match fvm::locate_shock(&report.state) {
        Some(loc) => {
            d.set_item("shock_x", loc.x)?;
            d.set_item("shock_jump", loc.jump)?;
            d.set_item("shock_multiple", loc.multiple)?;
        }
        None => d.set_item("shock_x", py.None())?,
    }
    Ok(d)
}

#[pymodule]
fn eulerflow_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_class::<Process>()?;
    m.add_class::<Family>()?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    m.add_function(wrap_pyfunction!(fvm_crosscheck, m)?)?;
    Ok(())
}
