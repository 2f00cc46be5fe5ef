//! Caustics, the cusp, the conservation-law potential and the shock front.
//!
//! The fold locus of the projection of the solution surface to the (t, x)
//! plane is where dg/drho = 0. With D(t) = a2 a3 t + a1 a3 - a0 that
//! condition collapses to D(t)^2 = A^2 (rho + a3)^4, so each caustic branch
//! is explicit in rho:
//!
//! ```text
//! t(rho) = (+-A (rho + a3)^2 - a1 a3 + a0) / (a3 a2)
//! x(rho) = g(rho, t(rho))
//! ```
//!
//! The earliest fold time along a branch (the cusp) is where a shock is
//! born. Past it, the jump pair (rho1, rho2) is fixed by equal values of the
//! potential H of the mass-flux form Theta = rho dx - rho U dt restricted to
//! the solution, together with equal positions:
//!
//! ```text
//! H(rho1, t) = H(rho2, t),   g(rho1, t) = g(rho2, t)
//! ```
//!
//! which this module solves by damped Newton continuation in t.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::SolutionFamily;
use crate::quad::integrate;
use crate::roots;

/// Sign choice selecting one of the two caustic branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Branch::Plus),
            "-" | "minus" => Ok(Branch::Minus),
            other => Err(Error::domain(format!(
                "unknown caustic branch {other:?} (expected + or -)"
            ))),
        }
    }
}

/// One caustic point, parametrized by its density.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CausticSample {
    pub rho: f64,
    pub t: f64,
    pub x: f64,
}

/// A sampled caustic branch.
#[derive(Debug, Clone, Serialize)]
pub struct CausticCurve {
    pub branch: Branch,
    pub samples: Vec<CausticSample>,
}

/// The cusp: earliest fold time along a caustic branch.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CuspPoint {
    pub rho: f64,
    pub t: f64,
    pub x: f64,
}

/// One point of the shock front with its jump pair (rho_left < rho_right).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrontSample {
    pub t: f64,
    pub x: f64,
    pub rho_left: f64,
    pub rho_right: f64,
}

/// The computed shock front.
#[derive(Debug, Clone, Serialize)]
pub struct FrontCurve {
    pub samples: Vec<FrontSample>,
    /// The cusp the front emanates from.
    pub born_at: CuspPoint,
    /// Whether rho_left decreased and rho_right increased monotonically over
    /// the samples. Reported, not enforced.
    pub monotone_strengthening: bool,
}

fn require_alpha3(family: &SolutionFamily) -> Result<f64> {
    let a3 = family.alpha()[3];
    if a3 == 0.0 {
        return Err(Error::singular(
            "alpha3 = 0: caustic formulas divide by alpha3".to_string(),
        ));
    }
    Ok(a3)
}

/// Caustic time t(rho) on the chosen branch.
pub fn caustic_time(family: &SolutionFamily, branch: Branch, rho: f64) -> Result<f64> {
    let a2 = family.require_alpha2()?;
    let a3 = require_alpha3(family)?;
    let [a0, a1, _, _] = family.alpha();
    let a = family.curve().a_coeff(rho)?;
    let w = rho + a3;
    Ok((branch.sign() * a * w * w - a1 * a3 + a0) / (a3 * a2))
}

/// Caustic point (rho, t, x) on the chosen branch.
///
/// x comes from the explicit fold formula; it coincides with
/// g(rho, t(rho)) identically.
pub fn caustic_point(family: &SolutionFamily, branch: Branch, rho: f64) -> Result<CausticSample> {
    let a2 = family.require_alpha2()?;
    let a3 = require_alpha3(family)?;
    let [a0, a1, _, _] = family.alpha();
    let t = caustic_time(family, branch, rho)?;
    let a = family.curve().a_coeff(rho)?;
    let w = rho + a3;
    let i = family.antideriv_i(rho)?;
    let x = -i / a2
        + (rho * (rho + 2.0 * a3) * w * w * a * a - a3 * a3 * a1 * a1
            + a0 * a0
            + branch.sign() * 2.0 * a0 * w * w * a)
            / (2.0 * a3 * a3 * a2);
    Ok(CausticSample { rho, t, x })
}

/// Sample one caustic branch over a density grid.
///
/// Every emitted sample is checked against the fold condition dg/drho = 0;
/// for alpha3 = 0 the explicit formulas are inapplicable and the routine
/// falls back to locating the fold numerically.
pub fn caustic(family: &SolutionFamily, branch: Branch, rho_grid: &[f64]) -> Result<CausticCurve> {
    family.require_alpha2()?;
    let mut samples = Vec::with_capacity(rho_grid.len());
    if family.alpha()[3] != 0.0 {
        for &rho in rho_grid {
            let s = caustic_point(family, branch, rho)?;
            let resid = family.g_rho(rho, s.t)?;
            let scale = fold_gradient_scale(family, rho, s.t)?;
            if resid.abs() > 1e-8 * scale {
                return Err(Error::numeric(format!(
                    "caustic sample at rho = {rho} fails the fold condition: g_rho = {resid}"
                )));
            }
            samples.push(s);
        }
    } else {
        // Degenerate family: D(t) is constant, so g_rho does not depend on
        // t and the fold densities are isolated roots of A^2 rho^4 = a0^2.
        // The caustic is a union of vertical lines in the (t, x) plane; emit
        // each line sampled over a default time span.
        for rho_c in degenerate_fold_densities(family, rho_grid)? {
            let n_t = rho_grid.len().max(2);
            for k in 0..n_t {
                let t = -5.0 + 10.0 * k as f64 / (n_t - 1) as f64;
                let x = family.g(rho_c, t)?;
                samples.push(CausticSample { rho: rho_c, t, x });
            }
        }
    }
    Ok(CausticCurve { branch, samples })
}

/// Fold densities of an alpha3 = 0 family: roots of A(rho)^2 rho^4 = a0^2
/// over the span of the grid.
fn degenerate_fold_densities(family: &SolutionFamily, rho_grid: &[f64]) -> Result<Vec<f64>> {
    let a0 = family.alpha()[0];
    let lo = rho_grid.first().copied().unwrap_or(1e-3);
    let hi = rho_grid.last().copied().unwrap_or(1e3);
    let dom = crate::interval::Interval::positive(lo, hi)?;
    let fold = |rho: f64| match family.curve().a_coeff(rho) {
        Ok(a) => a * a * rho.powi(4) - a0 * a0,
        Err(_) => f64::NAN,
    };
    let grid = dom.scan_grid(rho_grid.len().max(64));
    Ok(roots::scan_roots(
        fold,
        None::<fn(f64) -> f64>,
        &grid,
        1e-13,
        8,
    ))
}

/// Magnitude scale of the two terms whose cancellation defines the fold.
fn fold_gradient_scale(family: &SolutionFamily, rho: f64, t: f64) -> Result<f64> {
    let a2 = family.alpha()[2];
    let a3 = family.alpha()[3];
    let a = family.curve().a_coeff(rho)?;
    let w = rho + a3;
    let d = family.d_of_t(t);
    Ok(((d * d).abs() + (a * a * w.powi(4)).abs()) / (a2 * w.powi(3)).abs().max(1e-300))
}

/// Locate the cusp on a caustic branch within the full process domain.
pub fn cusp(family: &SolutionFamily, branch: Branch) -> Result<CuspPoint> {
    let dom = family.curve().domain();
    cusp_in(family, branch, (dom.lo, dom.hi))
}

/// Locate the cusp on a caustic branch within a density window.
///
/// Minimizes A(rho)(rho + a3)^2 (whose interior minimum is the extremal fold
/// time on either branch) by golden section, then polishes the stationarity
/// condition A'(rho)(rho + a3) + 2 A(rho) = 0.
pub fn cusp_in(family: &SolutionFamily, branch: Branch, window: (f64, f64)) -> Result<CuspPoint> {
    family.require_alpha2()?;
    require_alpha3(family)?;
    let dom = family.curve().domain();
    let lo = window.0.max(dom.lo);
    let hi = window.1.min(dom.hi);
    if !(lo < hi) {
        return Err(Error::domain(format!("empty cusp window [{lo}, {hi}]")));
    }
    let a3 = family.alpha()[3];
    let height = |rho: f64| match family.curve().a_coeff(rho) {
        Ok(a) => a * (rho + a3) * (rho + a3),
        Err(_) => f64::INFINITY,
    };
    let rho_min = roots::golden_min(height, lo, hi, 1e-12, 300);

    // A boundary minimum means the caustic time is monotone on the window.
    let span = hi - lo;
    if rho_min - lo < 1e-6 * span || hi - rho_min < 1e-6 * span {
        return Err(Error::MonotoneCaustic);
    }

    // Derivative polish on the stationarity residual.
    let stationarity = |rho: f64| {
        let a = family.curve().a_coeff(rho).unwrap_or(f64::NAN);
        let ap = family.curve().a_prime(rho).unwrap_or(f64::NAN);
        ap * (rho + a3) + 2.0 * a
    };
    let mut rho_star = rho_min;
    let bracket = 1e-2 * rho_min.abs().max(1e-6);
    let (blo, bhi) = ((rho_min - bracket).max(lo), (rho_min + bracket).min(hi));
    if stationarity(blo).signum() * stationarity(bhi).signum() < 0.0 {
        if let Ok(r) =
            roots::bisect_polish(stationarity, None::<fn(f64) -> f64>, blo, bhi, 1e-14, 200)
        {
            rho_star = r;
        }
    }

    let t_star = caustic_time(family, branch, rho_star)?;
    let x_star = family.g(rho_star, t_star)?;
    Ok(CuspPoint {
        rho: rho_star,
        t: t_star,
        x: x_star,
    })
}

/// The potential H(rho, t) of the restricted mass-flux form, satisfying
/// dH/drho = rho dg/drho and dH/dt = rho (dg/dt - U).
pub fn potential_h(family: &SolutionFamily, rho: f64, t: f64) -> Result<f64> {
    let a2 = family.require_alpha2()?;
    let [a0, a1, _, a3] = family.alpha();
    let j = family.antideriv_j(rho)?;
    let w = rho + a3;
    let lead = (a2 * rho * t - a1 * a3 + a0)
        * (a1 * a3 * a3 + a3 * ((t * a2 + 2.0 * a1) * rho - a0) - 2.0 * rho * a0)
        / (2.0 * a2 * w * w);
    Ok(lead - j / a2)
}

/// Oriented integral of Theta restricted to the solution around the closed
/// loop formed by the cut profile between rho1 and rho2 at fixed t: the
/// profile segment contributes the integral of rho dg/drho, the closing
/// vertical segment nothing. Vanishes exactly on a correct shock cut.
///
/// Evaluated by adaptive quadrature, independently of the closed form of H.
pub fn theta_loop_integral(family: &SolutionFamily, rho1: f64, rho2: f64, t: f64) -> Result<f64> {
    let failure = std::cell::RefCell::new(None);
    let integrand = |rho: f64| match family.g_rho(rho, t) {
        Ok(slope) => rho * slope,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let value = integrate(integrand, rho1, rho2, 1e-12);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    value
}

/// Shock speed demanded by the mass jump condition: the jump of rho U over
/// the jump of rho.
pub fn rankine_hugoniot_speed(family: &SolutionFamily, sample: &FrontSample) -> Result<f64> {
    let u1 = family.velocity(sample.rho_left, sample.t)?;
    let u2 = family.velocity(sample.rho_right, sample.t)?;
    Ok((sample.rho_right * u2 - sample.rho_left * u1) / (sample.rho_right - sample.rho_left))
}

/// The caustic branch that opens a fold for increasing t.
pub fn forward_branch(family: &SolutionFamily) -> Branch {
    let [_, _, a2, a3] = family.alpha();
    if a2 * a3 >= 0.0 {
        Branch::Plus
    } else {
        Branch::Minus
    }
}

/// Solve the front system over `t_range`, emitting `steps` samples.
///
/// The range must start at or after the cusp time of the forward branch. A
/// starting point exactly at the cusp is reported through `born_at` rather
/// than solved (the jump pair collapses there).
pub fn shock_front(
    family: &SolutionFamily,
    t_range: (f64, f64),
    steps: usize,
) -> Result<FrontCurve> {
    let cusp_pt = cusp(family, forward_branch(family))?;
    shock_front_from(family, &cusp_pt, t_range, steps)
}

/// `shock_front` with a precomputed cusp.
pub fn shock_front_from(
    family: &SolutionFamily,
    cusp_pt: &CuspPoint,
    t_range: (f64, f64),
    steps: usize,
) -> Result<FrontCurve> {
    let (t_lo, t_hi) = t_range;
    if !(t_lo <= t_hi) || steps < 1 {
        return Err(Error::domain(
            "front range needs t_min <= t_max and steps >= 1".to_string(),
        ));
    }
    let t_star = cusp_pt.t;
    let t_tol = 1e-9 * t_star.abs().max(1.0);
    if t_lo < t_star - t_tol {
        return Err(Error::domain(format!(
            "front range starts at t = {t_lo}, before the cusp at t* = {t_star}; \
             the front exists only for t >= t*"
        )));
    }

    let solver = FrontSolver::new(family, cusp_pt)?;

    // March from just past the cusp up to the start of the requested range,
    // with spacing quadratically refined toward the cusp where the jump pair
    // varies like sqrt(t - t*).
    let mut pair = solver.seed_pair();
    let ladder_end = t_lo.max(t_star + t_tol);
    let ladder_steps = 48;
    let mut t_prev = t_star;
    for k in 1..=ladder_steps {
        let frac = k as f64 / ladder_steps as f64;
        let t = t_star + (ladder_end - t_star) * frac * frac;
        pair = solver.advance(pair, t_prev, t, 14)?;
        t_prev = t;
    }

    let mut samples = Vec::with_capacity(steps);
    let starts_at_cusp = (t_lo - t_star).abs() <= t_tol;
    let n = steps.max(1);
    for k in 0..n {
        let t = if n == 1 {
            t_hi
        } else {
            t_lo + (t_hi - t_lo) * k as f64 / (n - 1) as f64
        };
        if t <= t_star + t_tol {
            // collapse point: covered by born_at
            debug_assert!(starts_at_cusp);
            continue;
        }
        pair = solver.advance(pair, t_prev, t.max(ladder_end), 14)?;
        t_prev = t.max(ladder_end);
        samples.push(solver.sample(t_prev, pair)?);
    }

    let monotone_strengthening = samples
        .windows(2)
        .all(|w| w[1].rho_left <= w[0].rho_left && w[1].rho_right >= w[0].rho_right);
    Ok(FrontCurve {
        samples,
        born_at: *cusp_pt,
        monotone_strengthening,
    })
}

/// Damped Newton solver for the 2x2 front system, shared by the marching
/// loop.
struct FrontSolver<'a> {
    family: &'a SolutionFamily,
    rho_star: f64,
    tol_h: f64,
    tol_g: f64,
    h_scale: f64,
    g_scale: f64,
    dom_lo: f64,
    dom_hi: f64,
}

impl<'a> FrontSolver<'a> {
    fn new(family: &'a SolutionFamily, cusp_pt: &CuspPoint) -> Result<Self> {
        let h_star = potential_h(family, cusp_pt.rho, cusp_pt.t)?;
        let dom = family.curve().domain();
        Ok(FrontSolver {
            family,
            rho_star: cusp_pt.rho,
            tol_h: 1e-10 * h_star.abs().max(1.0),
            tol_g: 1e-10 * cusp_pt.x.abs().max(1.0),
            h_scale: h_star.abs().max(1.0),
            g_scale: cusp_pt.x.abs().max(1.0),
            dom_lo: dom.lo,
            dom_hi: dom.hi,
        })
    }

    /// Initial guess just past the cusp: (rho* - delta, rho* + delta) with
    /// delta = 1e-3 rho*.
    fn seed_pair(&self) -> (f64, f64) {
        let delta = 1e-3 * self.rho_star;
        (self.rho_star - delta, self.rho_star + delta)
    }

    /// Divided-difference residuals of the front system. Dividing by
    /// rho1 - rho2 removes the spurious collapsed solution rho1 = rho2 and
    /// keeps the Jacobian regular near the cusp.
    fn residuals(&self, rho1: f64, rho2: f64, t: f64) -> Result<(f64, f64)> {
        let dh = potential_h(self.family, rho1, t)? - potential_h(self.family, rho2, t)?;
        let dg = self.family.g(rho1, t)? - self.family.g(rho2, t)?;
        let d = rho1 - rho2;
        Ok((dh / d / self.h_scale, dg / d / self.g_scale))
    }

    fn objective(&self, rho1: f64, rho2: f64, t: f64) -> f64 {
        match self.residuals(rho1, rho2, t) {
            Ok((r1, r2)) => r1 * r1 + r2 * r2,
            Err(_) => f64::INFINITY,
        }
    }

    /// One damped Newton solve at fixed t from the given seed.
    fn solve_at(&self, t: f64, seed: (f64, f64)) -> Result<(f64, f64)> {
        let (mut rho1, mut rho2) = seed;
        for _ in 0..120 {
            let (g1, g2) = self.residuals(rho1, rho2, t)?;
            // Analytic Jacobian through H_rho = rho g_rho.
            let d = rho1 - rho2;
            let s1 = self.family.g_rho(rho1, t)?;
            let s2 = self.family.g_rho(rho2, t)?;
            let j11 = (rho1 * s1 / self.h_scale - g1) / d;
            let j12 = (-rho2 * s2 / self.h_scale + g1) / d;
            let j21 = (s1 / self.g_scale - g2) / d;
            let j22 = (-s2 / self.g_scale + g2) / d;
            let det = j11 * j22 - j12 * j21;
            if det.abs() < 1e-300 {
                return Err(Error::numeric(
                    "front Newton Jacobian is singular".to_string(),
                ));
            }
            let step1 = (-g1 * j22 + g2 * j12) / det;
            let step2 = (-j11 * g2 + j21 * g1) / det;

            let phi0 = g1 * g1 + g2 * g2;
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..50 {
                let c1 = rho1 + lambda * step1;
                let c2 = rho2 + lambda * step2;
                let valid = c1 > self.dom_lo
                    && c2 < self.dom_hi
                    && c1 < self.rho_star
                    && c2 > self.rho_star;
                if valid {
                    let phi = self.objective(c1, c2, t);
                    if phi < phi0 * (1.0 - 1e-4 * lambda) || phi < 1e-28 {
                        rho1 = c1;
                        rho2 = c2;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                return Err(Error::numeric(format!("front Newton stalled at t = {t}")));
            }
            // Converged when the undivided residuals are inside tolerance.
            let dh =
                (potential_h(self.family, rho1, t)? - potential_h(self.family, rho2, t)?).abs();
            let dg = (self.family.g(rho1, t)? - self.family.g(rho2, t)?).abs();
            if dh <= self.tol_h && dg <= self.tol_g {
                return Ok((rho1, rho2));
            }
        }
        Err(Error::numeric(format!(
            "front Newton failed to converge at t = {t}"
        )))
    }

    /// Continuation step from a converged pair at t_prev to the target t,
    /// bisecting the time step on divergence.
    fn advance(&self, pair: (f64, f64), t_prev: f64, t: f64, depth: usize) -> Result<(f64, f64)> {
        if t <= t_prev {
            return Ok(pair);
        }
        match self.solve_at(t, pair) {
            Ok(p) => Ok(p),
            Err(e) => {
                if depth == 0 {
                    return Err(e);
                }
                let t_mid = 0.5 * (t_prev + t);
                let mid = self.advance(pair, t_prev, t_mid, depth - 1)?;
                self.advance(mid, t_mid, t, depth - 1)
            }
        }
    }

    fn sample(&self, t: f64, pair: (f64, f64)) -> Result<FrontSample> {
        Ok(FrontSample {
            t,
            x: self.family.g(pair.0, t)?,
            rho_left: pair.0,
            rho_right: pair.1,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use crate::process::ProcessCurve;
    use crate::thermo::PotentialModel;

    fn reference_family() -> SolutionFamily {
        let model = PotentialModel::ideal_gas(3.0, 0.6).unwrap();
        let curve =
            ProcessCurve::adiabatic(&model, 0.0, Interval::new(1e-3, 1e3).unwrap()).unwrap();
        SolutionFamily::new([0.0, 0.0, 1.0, 1.0], curve).unwrap()
    }

    fn t_star_exact() -> f64 {
        2.0_f64.powf(2.0 / 3.0) * 2.25
    }

    #[test]
    fn caustic_time_reference_values() {
        let fam = reference_family();
        // t(rho) = rho^(-2/3) (rho + 1)^2: t(1) = 4 on the plus branch.
        assert!((caustic_time(&fam, Branch::Plus, 1.0).unwrap() - 4.0).abs() < 1e-12);
        assert!((caustic_time(&fam, Branch::Minus, 1.0).unwrap() + 4.0).abs() < 1e-12);
        // fold condition holds at the closed-form time
        assert!(fam.g_rho(1.0, 4.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn caustic_samples_satisfy_fold_condition() {
        let fam = reference_family();
        let grid = Interval::new(0.1, 5.0).unwrap().logspace(40);
        for branch in [Branch::Plus, Branch::Minus] {
            let curve = caustic(&fam, branch, &grid).unwrap();
            assert_eq!(curve.samples.len(), grid.len());
            for s in &curve.samples {
                let resid = fam.g_rho(s.rho, s.t).unwrap();
                let scale = fold_gradient_scale(&fam, s.rho, s.t).unwrap();
                assert!(resid.abs() < 1e-10 * scale);
                // explicit x formula agrees with g at the caustic time
                let x_direct = fam.g(s.rho, s.t).unwrap();
                assert!((s.x - x_direct).abs() < 1e-11 * x_direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn branches_mirror_when_a0_and_a1_vanish() {
        let fam = reference_family();
        for &rho in &[0.2, 1.0, 3.0] {
            let tp = caustic_time(&fam, Branch::Plus, rho).unwrap();
            let tm = caustic_time(&fam, Branch::Minus, rho).unwrap();
            assert!((tp + tm).abs() < 1e-13 * tp.abs());
        }
    }

    #[test]
    fn cusp_matches_independent_minimization() {
        let fam = reference_family();
        let c = cusp(&fam, Branch::Plus).unwrap();
        assert!((c.rho - 0.5).abs() < 1e-8, "rho* = {}", c.rho);
        assert!((c.t - t_star_exact()).abs() < 1e-8, "t* = {}", c.t);

        // Independent oracle: golden-section on the closed-form caustic time.
        let t_of_rho = |rho: f64| rho.powf(-2.0 / 3.0) * (rho + 1.0) * (rho + 1.0);
        let rho_oracle = crate::roots::golden_min(t_of_rho, 0.05, 5.0, 1e-13, 400);
        assert!((c.rho - rho_oracle).abs() < 1e-6);
        assert!((c.t - t_of_rho(rho_oracle)).abs() < 1e-8);
        // stationarity by hand: t'(rho) vanishes where 4 rho - 2 = 0
        assert!((4.0 * c.rho - 2.0).abs() < 1e-7);
    }

    #[test]
    fn window_excluding_minimum_reports_monotone() {
        let fam = reference_family();
        let err = cusp_in(&fam, Branch::Plus, (1.0, 50.0)).unwrap_err();
        assert!(matches!(err, Error::MonotoneCaustic));
    }

    #[test]
    fn potential_reference_value_both_paths() {
        // H(1, 0) = -J(1) = -(3/5 + 3/2) = -2.1 for the reference family.
        let fam = reference_family();
        assert!((potential_h(&fam, 1.0, 0.0).unwrap() + 2.1).abs() < 1e-12);

        let model = PotentialModel::ideal_gas(3.0, 0.6).unwrap();
        let curve =
            ProcessCurve::adiabatic(&model, 0.0, Interval::new(1e-3, 1e3).unwrap()).unwrap();
        let quad =
            SolutionFamily::with_quadrature_antiderivatives([0.0, 0.0, 1.0, 1.0], curve).unwrap();
        assert!((potential_h(&quad, 1.0, 0.0).unwrap() + 2.1).abs() < 1e-9);

        // alpha0 = alpha1 = 0 and t = 0 kill the leading term entirely.
        for &rho in &[0.3, 2.0] {
            let h = potential_h(&fam, rho, 0.0).unwrap();
            let j = fam.antideriv_j(rho).unwrap();
            assert!((h + j).abs() < 1e-13 * j.abs().max(1.0));
        }
    }

    #[test]
    fn potential_gradient_identities() {
        let fam = reference_family();
        let mut k = 0u64;
        for _ in 0..50 {
            k += 1;
            let rho = 0.15 + 6.0 * ((k as f64 * 0.754_877_666) % 1.0);
            let t = -3.0 + 9.0 * ((k as f64 * 0.569_840_290) % 1.0);
            let h = 1e-6;
            let dh_rho = (potential_h(&fam, rho + h, t).unwrap()
                - potential_h(&fam, rho - h, t).unwrap())
                / (2.0 * h);
            let dh_t = (potential_h(&fam, rho, t + h).unwrap()
                - potential_h(&fam, rho, t - h).unwrap())
                / (2.0 * h);
            let expect_rho = rho * fam.g_rho(rho, t).unwrap();
            let expect_t = rho * (fam.g_t(rho, t).unwrap() - fam.velocity(rho, t).unwrap());
            assert!((dh_rho - expect_rho).abs() < 1e-8 * expect_rho.abs().max(1e2));
            assert!((dh_t - expect_t).abs() < 1e-8 * expect_t.abs().max(1e2));
        }
    }

    #[test]
    fn mass_flux_form_is_closed() {
        // Mixed partials of H two ways: d/dt (rho g_rho) vs d/drho (rho (g_t - U)).
        let fam = reference_family();
        for &(rho, t) in &[(0.4, 1.0), (1.2, 3.0), (2.5, -0.7)] {
            let h = 1e-5;
            let a = (rho * fam.g_rho(rho, t + h).unwrap() - rho * fam.g_rho(rho, t - h).unwrap())
                / (2.0 * h);
            let f = |r: f64| r * (fam.g_t(r, t).unwrap() - fam.velocity(r, t).unwrap());
            let b = (f(rho + h) - f(rho - h)) / (2.0 * h);
            assert!((a - b).abs() < 1e-6 * a.abs().max(1.0));
        }
    }

    #[test]
    fn front_is_born_at_the_cusp() {
        let fam = reference_family();
        let c = cusp(&fam, Branch::Plus).unwrap();
        let eps = 1e-3;
        let front = shock_front(&fam, (c.t + eps, c.t + eps), 1).unwrap();
        assert_eq!(front.samples.len(), 1);
        let s = front.samples[0];
        assert!(s.rho_left < c.rho && c.rho < s.rho_right);
        assert!((s.rho_left - c.rho).abs() < 0.1);
        assert!((s.rho_right - c.rho).abs() < 0.1);
        // The front leaves the cusp at the characteristic drift speed of the
        // mass conservation law, dx/dt -> U + rho U_rho.
        let drift =
            fam.velocity(c.rho, c.t).unwrap() + c.rho * fam.velocity_rho(c.rho, c.t).unwrap();
        assert!(
            (s.x - c.x - drift * eps).abs() < 1e-4,
            "x = {}, cusp x = {}, drift = {}",
            s.x,
            c.x,
            drift
        );
    }

    #[test]
    fn front_samples_satisfy_the_jump_system() {
        let fam = reference_family();
        let t_star = t_star_exact();
        let front = shock_front(&fam, (t_star + 0.05, 1.2 * t_star), 40).unwrap();
        assert_eq!(front.samples.len(), 40);
        let h_scale = potential_h(&fam, front.born_at.rho, front.born_at.t)
            .unwrap()
            .abs()
            .max(1.0);
        for s in &front.samples {
            let dh = potential_h(&fam, s.rho_left, s.t).unwrap()
                - potential_h(&fam, s.rho_right, s.t).unwrap();
            let dg = fam.g(s.rho_left, s.t).unwrap() - fam.g(s.rho_right, s.t).unwrap();
            assert!(dh.abs() <= 1e-10 * h_scale);
            assert!(dg.abs() <= 1e-10 * front.born_at.x.abs().max(1.0));
            assert!(s.rho_left < s.rho_right);
            assert!((s.x - fam.g(s.rho_left, s.t).unwrap()).abs() < 1e-12);
        }
        assert!(
            front.monotone_strengthening,
            "reference family strengthens monotonically"
        );
    }

    #[test]
    fn front_matches_scalar_equal_area_construction() {
        // Independent oracle: at fixed t, sweep the cut position x through
        // the fold and bisect the potential difference between the two outer
        // branches. One scalar root-find, no Newton, no continuation.
        let fam = reference_family();
        let t = 1.2 * t_star_exact();
        let window = (0.02, 50.0);
        let w_of_x = |x: f64| {
            let set = fam.branches(t, x, window).unwrap();
            assert_eq!(set.len(), 3, "x = {x} must lie inside the fold");
            potential_h(&fam, set.roots[2].rho, t).unwrap()
                - potential_h(&fam, set.roots[0].rho, t).unwrap()
        };
        // fold interval: caustic positions of the two arms at t
        let arm = |lo: f64, hi: f64| {
            roots::bisect_polish(
                |r| caustic_time(&fam, Branch::Plus, r).unwrap() - t,
                None::<fn(f64) -> f64>,
                lo,
                hi,
                1e-12,
                200,
            )
            .unwrap()
        };
        let x_lo = fam.g(arm(1e-3, 0.5), t).unwrap();
        let x_hi = fam.g(arm(0.5, 100.0), t).unwrap();
        let margin = 1e-6 * (x_hi - x_lo);
        let x_oracle = roots::bisect_polish(
            w_of_x,
            None::<fn(f64) -> f64>,
            x_lo + margin,
            x_hi - margin,
            1e-13,
            200,
        )
        .unwrap();
        let front = shock_front(&fam, (t, t), 1).unwrap();
        assert!(
            (front.samples[0].x - x_oracle).abs() < 1e-8 * x_oracle.abs(),
            "newton {} vs scalar construction {}",
            front.samples[0].x,
            x_oracle
        );
    }

    #[test]
    fn front_stays_between_caustic_arms() {
        let fam = reference_family();
        let t_star = t_star_exact();
        let front = shock_front(&fam, (t_star + 0.1, 1.3 * t_star), 24).unwrap();
        for s in &front.samples {
            // The fold-edge densities at time t, one per caustic arm, give
            // the x extremes of the fold; the front must sit between them.
            let arm = |lo: f64, hi: f64| -> f64 {
                roots::bisect_polish(
                    |r| caustic_time(&fam, Branch::Plus, r).unwrap() - s.t,
                    None::<fn(f64) -> f64>,
                    lo,
                    hi,
                    1e-12,
                    200,
                )
                .unwrap()
            };
            let rho_arm_lo = arm(1e-3, 0.5);
            let rho_arm_hi = arm(0.5, 100.0);
            let x_a = fam.g(rho_arm_lo, s.t).unwrap();
            let x_b = fam.g(rho_arm_hi, s.t).unwrap();
            let (x_min, x_max) = if x_a < x_b { (x_a, x_b) } else { (x_b, x_a) };
            let tol = 1e-9 * x_max.abs().max(1.0);
            assert!(
                s.x >= x_min - tol && s.x <= x_max + tol,
                "front x = {} outside caustic arms [{x_min}, {x_max}] at t = {}",
                s.x,
                s.t
            );
        }
    }

    #[test]
    fn front_slope_obeys_mass_jump_condition() {
        let fam = reference_family();
        let t_star = t_star_exact();
        let front = shock_front(&fam, (t_star + 0.05, 1.2 * t_star), 200).unwrap();
        let n = front.samples.len();
        for i in 1..n - 1 {
            let prev = front.samples[i - 1];
            let next = front.samples[i + 1];
            let mid = front.samples[i];
            let slope = (next.x - prev.x) / (next.t - prev.t);
            let rh = rankine_hugoniot_speed(&fam, &mid).unwrap();
            assert!(
                (slope - rh).abs() < 1e-3 * rh.abs(),
                "slope {slope} vs RH {rh} at t = {}",
                mid.t
            );
        }
    }

    #[test]
    fn equal_area_loop_vanishes_on_the_front() {
        let fam = reference_family();
        let t_star = t_star_exact();
        let front = shock_front(&fam, (t_star + 0.2, 1.2 * t_star), 8).unwrap();
        let scale = potential_h(&fam, front.born_at.rho, front.born_at.t)
            .unwrap()
            .abs()
            .max(1.0);
        for s in &front.samples {
            let loop_int = theta_loop_integral(&fam, s.rho_left, s.rho_right, s.t).unwrap();
            assert!(
                loop_int.abs() < 1e-8 * scale,
                "loop integral {loop_int} at t = {}",
                s.t
            );
        }
    }

    #[test]
    fn flipped_alpha2_uses_minus_branch() {
        let model = PotentialModel::ideal_gas(3.0, 0.6).unwrap();
        let curve =
            ProcessCurve::adiabatic(&model, 0.0, Interval::new(1e-3, 1e3).unwrap()).unwrap();
        let fam = SolutionFamily::new([0.0, 0.0, -1.0, 1.0], curve).unwrap();
        assert_eq!(forward_branch(&fam), Branch::Minus);
        let c = cusp(&fam, Branch::Minus).unwrap();
        // the minus branch opens forward in time for alpha2 alpha3 < 0
        assert!((c.t - t_star_exact()).abs() < 1e-8);
        let front = shock_front(&fam, (c.t + 0.1, c.t + 0.5), 4).unwrap();
        assert_eq!(front.samples.len(), 4);
    }

    #[test]
    fn degenerate_alpha3_falls_back_to_vertical_caustic() {
        let model = PotentialModel::ideal_gas(3.0, 0.6).unwrap();
        let curve =
            ProcessCurve::adiabatic(&model, 0.0, Interval::new(1e-3, 1e3).unwrap()).unwrap();
        // alpha3 = 0 with alpha0 = 1: fold densities solve A^2 rho^4 = 1,
        // i.e. rho^(8/3) = 1, so rho_c = 1.
        let fam = SolutionFamily::new([1.0, 0.0, 1.0, 0.0], curve).unwrap();
        assert!(caustic_point(&fam, Branch::Plus, 1.0).is_err());
        let grid = Interval::new(0.2, 5.0).unwrap().logspace(33);
        let curve = caustic(&fam, Branch::Plus, &grid).unwrap();
        assert!(!curve.samples.is_empty());
        for s in &curve.samples {
            assert!((s.rho - 1.0).abs() < 1e-9);
            assert!(fam.g_rho(s.rho, s.t).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn front_range_before_cusp_is_rejected() {
        let fam = reference_family();
        let err = shock_front(&fam, (1.0, 2.0), 4).unwrap_err();
        assert!(format!("{err}").contains("cusp"));
    }
}
