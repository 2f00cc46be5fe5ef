//! Shock-capturing finite-volume solver for the barotropic system.
//!
//! Conserved variables (rho, rho u), flux (rho u, rho u^2 + p(rho)) with
//! p(rho) supplied by a process curve. The scheme is first-order Rusanov
//! (local Lax-Friedrichs) with wave speed bound |u| + sqrt(p'(rho)): the
//! simplest method whose shock position is trustworthy. It exists purely to
//! validate the analytic construction, so independence matters more than
//! accuracy order.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::SolutionFamily;

/// Spatial extent and resolution of a run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
}

/// Boundary treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    /// Constant extrapolation into the ghost cells.
    Outflow,
    /// Wrap-around.
    Periodic,
}

/// Cell-averaged conserved state at one time level.
#[derive(Debug, Clone)]
pub struct GridState {
    pub x_min: f64,
    pub x_max: f64,
    pub rho: Vec<f64>,
    pub momentum: Vec<f64>,
    pub time: f64,
}

impl GridState {
    pub fn n_cells(&self) -> usize {
        self.rho.len()
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells() as f64
    }

    pub fn cell_center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    pub fn velocity(&self, i: usize) -> f64 {
        self.momentum[i] / self.rho[i]
    }

    /// Total mass, i.e. the sum of cell averages times dx.
    pub fn total_mass(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.dx()
    }

    fn check_positive(&self) -> Result<()> {
        for (i, &r) in self.rho.iter().enumerate() {
            if !(r > 0.0) {
                return Err(Error::numeric(format!(
                    "vacuum or negative density {r} in cell {i} at t = {}",
                    self.time
                )));
            }
        }
        Ok(())
    }
}

/// Build the initial state by midpoint-sampling the analytic profile at a
/// pre-cusp time: every cell center must carry exactly one density branch.
pub fn init_from_analytic(
    family: &SolutionFamily,
    t0: f64,
    spec: GridSpec,
    rho_window: (f64, f64),
) -> Result<GridState> {
    if spec.n_cells == 0 {
        return Err(Error::domain("grid needs at least one cell".to_string()));
    }
    if !(spec.x_min < spec.x_max) {
        return Err(Error::domain(format!(
            "grid needs x_min < x_max, got [{}, {}]",
            spec.x_min, spec.x_max
        )));
    }
    let mut rho = Vec::with_capacity(spec.n_cells);
    let mut momentum = Vec::with_capacity(spec.n_cells);
    let dx = (spec.x_max - spec.x_min) / spec.n_cells as f64;
    for i in 0..spec.n_cells {
        let x = spec.x_min + (i as f64 + 0.5) * dx;
        let set = family.branches(t0, x, rho_window)?;
        match set.len() {
            1 => {
                let r = set.roots[0].rho;
                rho.push(r);
                momentum.push(r * family.velocity(r, t0)?);
            }
            0 => {
                return Err(Error::domain(format!(
                    "no density branch at cell center x = {x}: the grid leaves the \
                     profile range covered by rho window [{}, {}]",
                    rho_window.0, rho_window.1
                )));
            }
            n => {
                let hint = crate::singularity::cusp(
                    family,
                    crate::singularity::forward_branch(family),
                )
                .map(|c| format!(" (cusp time t* = {})", c.t))
                .unwrap_or_default();
                return Err(Error::domain(format!(
                    "profile is multivalued at t0 = {t0} (found {n} branches at x = {x}); \
                     initialize before the cusp{hint}"
                )));
            }
        }
    }
    Ok(GridState {
        x_min: spec.x_min,
        x_max: spec.x_max,
        rho,
        momentum,
        time: t0,
    })
}

/// Outcome of one explicit step.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    pub dt: f64,
    /// Net mass entering the domain through the boundaries during the step
    /// (zero for periodic runs). Lets callers verify discrete conservation.
    pub boundary_mass_influx: f64,
}

/// One conservative Rusanov update. The time step is cfl * dx / max wave
/// speed, so the CFL condition holds by construction.
pub fn step(
    curve: &crate::process::ProcessCurve,
    state: &GridState,
    cfl: f64,
    bc: BoundaryCondition,
) -> Result<(GridState, StepInfo)> {
    if !(cfl > 0.0 && cfl < 1.0) {
        return Err(Error::domain(format!("cfl must lie in (0, 1), got {cfl}")));
    }
    state.check_positive()?;
    let n = state.n_cells();
    let dx = state.dx();

    // primitive data and wave speeds
    let mut pressure = vec![0.0; n];
    let mut speed = vec![0.0; n];
    let mut max_speed = 0.0_f64;
    for i in 0..n {
        let r = state.rho[i];
        let u = state.momentum[i] / r;
        pressure[i] = curve.pressure(r)?;
        let dp = curve.dp_drho(r)?;
        if dp <= 0.0 {
            return Err(Error::singular(format!(
                "dp/drho = {dp} <= 0 at rho = {r}: system not hyperbolic"
            )));
        }
        speed[i] = u.abs() + dp.sqrt();
        max_speed = max_speed.max(speed[i]);
    }
    if max_speed <= 0.0 {
        return Err(Error::numeric("zero wave speed on the grid".to_string()));
    }
    let dt = cfl * dx / max_speed;

    let flux = |i: usize| -> (f64, f64) {
        let r = state.rho[i];
        let mu = state.momentum[i];
        (mu, mu * mu / r + pressure[i])
    };
    // interface fluxes, ghost cells by constant extrapolation or wrap
    let left_of = |i: usize| -> usize {
        if i == 0 {
            match bc {
                BoundaryCondition::Outflow => 0,
                BoundaryCondition::Periodic => n - 1,
            }
        } else {
            i - 1
        }
    };
    let right_of = |i: usize| -> usize {
        if i == n - 1 {
            match bc {
                BoundaryCondition::Outflow => n - 1,
                BoundaryCondition::Periodic => 0,
            }
        } else {
            i + 1
        }
    };

    // interface i + 1/2 for i in -1..n-1; encode as function of the two
    // neighbor cell indices
    let rusanov = |l: usize, r: usize| -> (f64, f64) {
        let (f_l0, f_l1) = flux(l);
        let (f_r0, f_r1) = flux(r);
        let s = speed[l].max(speed[r]);
        (
            0.5 * (f_l0 + f_r0) - 0.5 * s * (state.rho[r] - state.rho[l]),
            0.5 * (f_l1 + f_r1) - 0.5 * s * (state.momentum[r] - state.momentum[l]),
        )
    };

    let mut rho_new = vec![0.0; n];
    let mut mom_new = vec![0.0; n];
    let lambda = dt / dx;
    let mut left_flux = rusanov(left_of(0), 0);
    let boundary_in = left_flux.0;
    let mut boundary_out = 0.0;
    for i in 0..n {
        let right_flux = rusanov(i, right_of(i));
        rho_new[i] = state.rho[i] - lambda * (right_flux.0 - left_flux.0);
        mom_new[i] = state.momentum[i] - lambda * (right_flux.1 - left_flux.1);
        if i == n - 1 {
            boundary_out = right_flux.0;
        }
        left_flux = right_flux;
    }

    let new_state = GridState {
        x_min: state.x_min,
        x_max: state.x_max,
        rho: rho_new,
        momentum: mom_new,
        time: state.time + dt,
    };
    new_state.check_positive()?;
    let boundary_mass_influx = match bc {
        BoundaryCondition::Periodic => 0.0,
        BoundaryCondition::Outflow => dt * (boundary_in - boundary_out),
    };
    Ok((
        new_state,
        StepInfo {
            dt,
            boundary_mass_influx,
        },
    ))
}

/// Result of marching a state to a target time.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub state: GridState,
    pub steps: usize,
    /// |M_end - M_start - boundary influx| / M_start: discrete mass
    /// conservation residual of the whole run.
    pub mass_conservation_residual: f64,
}

/// March to `t_end` (the final step is clipped to land exactly on it).
pub fn run_to(
    curve: &crate::process::ProcessCurve,
    mut state: GridState,
    t_end: f64,
    cfl: f64,
    bc: BoundaryCondition,
) -> Result<RunReport> {
    if t_end < state.time {
        return Err(Error::domain(format!(
            "t_end = {t_end} is before the state time {}",
            state.time
        )));
    }
    let mass_start = state.total_mass();
    // Kahan-compensated accumulation of the boundary influx.
    let mut influx = 0.0_f64;
    let mut influx_c = 0.0_f64;
    let mut steps = 0usize;
    while state.time < t_end {
        let (mut next, info) = step(curve, &state, cfl, bc)?;
        let mut gained = info.boundary_mass_influx;
        if next.time > t_end {
            // redo the final step with the exact remaining dt by linear
            // rescaling of the conservative update
            let frac = (t_end - state.time) / info.dt;
            for i in 0..state.n_cells() {
                next.rho[i] = state.rho[i] + frac * (next.rho[i] - state.rho[i]);
                next.momentum[i] = state.momentum[i] + frac * (next.momentum[i] - state.momentum[i]);
            }
            next.time = t_end;
            gained *= frac;
        }
        let y = gained - influx_c;
        let t = influx + y;
        influx_c = (t - influx) - y;
        influx = t;
        state = next;
        steps += 1;
        if steps > 50_000_000 {
            return Err(Error::numeric("step budget exhausted".to_string()));
        }
    }
    let mass_end = state.total_mass();
    let residual = (mass_end - mass_start - influx).abs() / mass_start.abs();
    Ok(RunReport {
        state,
        steps,
        mass_conservation_residual: residual,
    })
}

/// A located discontinuity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShockLocation {
    /// Sub-cell estimate: centroid of |d rho| over the stencil around the
    /// strongest interface jump.
    pub x: f64,
    /// Density jump magnitude at the strongest interface.
    pub jump: f64,
    /// More than one well-separated sharp interface was present.
    pub multiple: bool,
}

/// Steepest-gradient shock locator.
///
/// Reports the interface with the largest |d rho|, refined by the centroid
/// of the jump magnitudes over a 5-interface stencil. Returns `None` when
/// the strongest jump does not stand out from the smooth background (ratio
/// against the 75th percentile) or is insignificant against the global
/// density range.
pub fn locate_shock(state: &GridState) -> Option<ShockLocation> {
    let n = state.n_cells();
    if n < 8 {
        return None;
    }
    let dx = state.dx();
    let jumps: Vec<f64> = (0..n - 1)
        .map(|i| (state.rho[i + 1] - state.rho[i]).abs())
        .collect();
    let (i_max, &jump) = jumps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;

    let mut sorted = jumps.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let p75 = sorted[(3 * sorted.len()) / 4];
    let rho_min = state.rho.iter().cloned().fold(f64::INFINITY, f64::min);
    let rho_max = state.rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = rho_max - rho_min;
    if jump < 5.0 * p75.max(1e-300) || jump < 1e-3 * range {
        return None;
    }

    // centroid of |d rho| over interfaces i_max - 2 ..= i_max + 2
    let lo = i_max.saturating_sub(2);
    let hi = (i_max + 2).min(n - 2);
    let mut weight = 0.0;
    let mut moment = 0.0;
    for i in lo..=hi {
        let xi = state.x_min + (i as f64 + 1.0) * dx; // interface position
        weight += jumps[i];
        moment += jumps[i] * xi;
    }
    let x = moment / weight;

    // a second, well-separated sharp interface marks multiplicity
    let second_threshold = (5.0 * p75).max(0.1 * jump).max(1e-3 * range);
    let multiple = jumps.iter().enumerate().any(|(i, &j)| {
        (i as i64 - i_max as i64).unsigned_abs() as usize > 8 && j > second_threshold
    });

    Some(ShockLocation { x, jump, multiple })
}

/// L1 distance between the cell densities and the single-valued analytic
/// profile at the state's time.
pub fn l1_density_error(
    family: &SolutionFamily,
    state: &GridState,
    rho_window: (f64, f64),
) -> Result<f64> {
    l1_density_error_in(family, state, rho_window, (state.x_min, state.x_max))
}

/// `l1_density_error` restricted to cells with centers inside `x_range`.
///
/// Boundary cells of an outflow run carry an O(1) modeling error wherever
/// the true solution keeps feeding new states through the boundary, so
/// convergence studies must measure inside the domain of determinacy of the
/// initial data.
pub fn l1_density_error_in(
    family: &SolutionFamily,
    state: &GridState,
    rho_window: (f64, f64),
    x_range: (f64, f64),
) -> Result<f64> {
    let mut err = 0.0;
    for i in 0..state.n_cells() {
        let x = state.cell_center(i);
        if x < x_range.0 || x > x_range.1 {
            continue;
        }
        let set = family.branches(state.time, x, rho_window)?;
        if set.len() != 1 {
            return Err(Error::domain(format!(
                "analytic profile not single-valued at x = {x}, t = {}",
                state.time
            )));
        }
        err += (state.rho[i] - set.roots[0].rho).abs();
    }
    Ok(err * state.dx())
}
