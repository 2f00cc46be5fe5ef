//! One-parameter thermodynamic process curves.
//!
//! A process curve closes the flow system into barotropic form: along the
//! curve every state variable is a function of the density rho, in particular
//! p = p(rho). The curve also carries the normalized characteristic
//! coefficient
//!
//! ```text
//! A(rho) = sqrt(p'(rho)) / rho
//! ```
//!
//! which drives the whole solution machinery. The adiabatic process is built
//! in (closed form on the ideal gas, bracketed root solving elsewhere); other
//! processes enter as user-supplied T(rho) closures on a model, plain p(rho)
//! closures, or tabulated (rho, p) data.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::quad::power_antiderivative;
use crate::roots;
use crate::thermo::{PotentialModel, StatePoint};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Type of the linearized system at a point of the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Hyperbolic,
    Elliptic,
    Parabolic,
}

/// Pairing matrix of the defining 2-forms at one density, and its verdict.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HyperbolicityReport {
    /// diag(2 rho, -2 p'(rho) / rho).
    pub p_matrix: [[f64; 2]; 2],
    /// det(P) = -4 p'(rho).
    pub det: f64,
    pub classification: Classification,
}

#[derive(Clone)]
enum CurveKind {
    /// Ideal-gas adiabat: everything in closed form.
    AdiabaticIdeal {
        model: PotentialModel,
        /// T(rho) = t_coeff * rho^t_exp
        t_coeff: f64,
        t_exp: f64,
        /// p(rho) = p_coeff * rho^p_exp
        p_coeff: f64,
        p_exp: f64,
        /// A(rho) = a0 * rho^m
        a0: f64,
        m: f64,
    },
    /// Adiabat on an arbitrary model: T(rho) by bracketed root solving.
    AdiabaticNumeric { model: PotentialModel, s0: f64 },
    /// User-supplied T(rho) on a model (isothermal curves and the like).
    OnModel {
        model: PotentialModel,
        t_of_rho: ScalarFn,
    },
    /// Pure barotropic closure p(rho), optionally with derivatives.
    Barotropic {
        p: ScalarFn,
        dp: Option<ScalarFn>,
        d2p: Option<ScalarFn>,
    },
    /// A(rho) = a0 * rho^m prescribed directly; p recovered by integration.
    SoundPowerLaw { a0: f64, m: f64 },
}

/// An immutable process curve over a positive density interval.
#[derive(Clone)]
pub struct ProcessCurve {
    domain: Interval,
    kind: CurveKind,
}

/// Default density domain when a config leaves it unset.
pub const DEFAULT_RHO_DOMAIN: (f64, f64) = (1e-3, 1e3);

impl ProcessCurve {
    /// Adiabatic process s = s0 on `model`.
    ///
    /// Ideal gas: `T = exp(2 s0/(R n)) rho^(2/n)` and
    /// `p = R exp(2 s0/(R n)) rho^(2/n + 1)` in closed form. Any other model
    /// falls back to the numeric path.
    pub fn adiabatic(model: &PotentialModel, s0: f64, domain: Interval) -> Result<Self> {
        let domain = Interval::positive(domain.lo, domain.hi)?;
        if let (true, Some(n)) = (model.is_ideal(), model.dof()) {
            let r = model.gas_constant();
            let es = (2.0 * s0 / (r * n)).exp();
            let a0 = (r * (1.0 + 2.0 / n) * es).sqrt();
            Ok(ProcessCurve {
                domain,
                kind: CurveKind::AdiabaticIdeal {
                    model: model.clone(),
                    t_coeff: es,
                    t_exp: 2.0 / n,
                    p_coeff: r * es,
                    p_exp: 2.0 / n + 1.0,
                    a0,
                    m: 1.0 / n - 1.0,
                },
            })
        } else {
            Self::adiabatic_numeric(model, s0, domain)
        }
    }

    /// Adiabatic process with the temperature always obtained by bracketed
    /// root solving, regardless of the model. Exercised directly by the
    /// cross-check against the ideal-gas closed form.
    pub fn adiabatic_numeric(model: &PotentialModel, s0: f64, domain: Interval) -> Result<Self> {
        let domain = Interval::positive(domain.lo, domain.hi)?;
        let curve = ProcessCurve {
            domain,
            kind: CurveKind::AdiabaticNumeric {
                model: model.clone(),
                s0,
            },
        };
        // Fail fast if the inversion is ill-posed anywhere obvious.
        curve.temperature(domain.geometric_mean())?;
        Ok(curve)
    }

    /// Process given by a temperature profile T(rho) on a model.
    pub fn on_model(
        model: &PotentialModel,
        t_of_rho: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: Interval,
    ) -> Result<Self> {
        let domain = Interval::positive(domain.lo, domain.hi)?;
        Ok(ProcessCurve {
            domain,
            kind: CurveKind::OnModel {
                model: model.clone(),
                t_of_rho: Arc::new(t_of_rho),
            },
        })
    }

    /// Barotropic closure p(rho); derivatives by 5-point central differences
    /// with step h = rho * 1e-5.
    pub fn barotropic(p: impl Fn(f64) -> f64 + Send + Sync + 'static, domain: Interval) -> Result<Self> {
        let domain = Interval::positive(domain.lo, domain.hi)?;
        Ok(ProcessCurve {
            domain,
            kind: CurveKind::Barotropic {
                p: Arc::new(p),
                dp: None,
                d2p: None,
            },
        })
    }

    /// Barotropic closure with exact derivatives.
    pub fn barotropic_with_derivatives(
        p: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dp: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2p: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: Interval,
    ) -> Result<Self> {
        let domain = Interval::positive(domain.lo, domain.hi)?;
        Ok(ProcessCurve {
            domain,
            kind: CurveKind::Barotropic {
                p: Arc::new(p),
                dp: Some(Arc::new(dp)),
                d2p: Some(Arc::new(d2p)),
            },
        })
    }

    /// Tabulated (rho, p) pairs, interpolated by a natural cubic spline.
    /// Knots must be strictly increasing in rho with all rho > 0.
    pub fn from_table(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::domain(
                "pressure table needs at least 4 points".to_string(),
            ));
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        let spline = CubicSpline::natural(xs, ys)?;
        let domain = Interval::positive(spline.xs[0], *spline.xs.last().unwrap())?;
        let s1 = spline.clone();
        let s2 = spline.clone();
        let s3 = spline;
        Ok(ProcessCurve {
            domain,
            kind: CurveKind::Barotropic {
                p: Arc::new(move |r| s1.eval(r)),
                dp: Some(Arc::new(move |r| s2.deriv(r))),
                d2p: Some(Arc::new(move |r| s3.deriv2(r))),
            },
        })
    }

    /// Prescribe A(rho) = a0 rho^m directly. The pressure is the matching
    /// antiderivative p(rho) = a0^2 * int rho^(2m+2) drho, which keeps the
    /// logarithmic exponent cases usable.
    pub fn sound_power_law(a0: f64, m: f64, domain: Interval) -> Result<Self> {
        if !(a0 > 0.0) {
            return Err(Error::domain("a0 must be positive".to_string()));
        }
        let domain = Interval::positive(domain.lo, domain.hi)?;
        Ok(ProcessCurve {
            domain,
            kind: CurveKind::SoundPowerLaw { a0, m },
        })
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// The thermodynamic model behind this curve, when there is one.
    pub fn model(&self) -> Option<&PotentialModel> {
        match &self.kind {
            CurveKind::AdiabaticIdeal { model, .. }
            | CurveKind::AdiabaticNumeric { model, .. }
            | CurveKind::OnModel { model, .. } => Some(model),
            _ => None,
        }
    }

    /// `(A0, m)` when A(rho) = A0 rho^m holds exactly.
    pub fn power_law(&self) -> Option<(f64, f64)> {
        match &self.kind {
            CurveKind::AdiabaticIdeal { a0, m, .. } => Some((*a0, *m)),
            CurveKind::SoundPowerLaw { a0, m } => Some((*a0, *m)),
            _ => None,
        }
    }

    fn check_rho(&self, rho: f64) -> Result<()> {
        if !rho.is_finite() || !self.domain.contains(rho) {
            return Err(Error::domain(format!(
                "rho = {rho} outside process domain [{}, {}]",
                self.domain.lo, self.domain.hi
            )));
        }
        Ok(())
    }

    /// Temperature along the curve. Errors for pure barotropic closures.
    pub fn temperature(&self, rho: f64) -> Result<f64> {
        self.check_rho(rho)?;
        match &self.kind {
            CurveKind::AdiabaticIdeal {
                t_coeff, t_exp, ..
            } => Ok(t_coeff * rho.powf(*t_exp)),
            CurveKind::AdiabaticNumeric { model, s0 } => solve_adiabat_temperature(model, *s0, rho),
            CurveKind::OnModel { t_of_rho, .. } => Ok(t_of_rho(rho)),
            _ => Err(Error::NoThermalModel),
        }
    }

    /// Full state along the curve. Errors for pure barotropic closures.
    pub fn state(&self, rho: f64) -> Result<StatePoint> {
        let t = self.temperature(rho)?;
        let model = self.model().ok_or(Error::NoThermalModel)?;
        model.eval_state(1.0 / rho, t)
    }

    pub fn pressure(&self, rho: f64) -> Result<f64> {
        self.check_rho(rho)?;
        match &self.kind {
            CurveKind::AdiabaticIdeal {
                p_coeff, p_exp, ..
            } => Ok(p_coeff * rho.powf(*p_exp)),
            CurveKind::AdiabaticNumeric { .. } | CurveKind::OnModel { .. } => {
                Ok(self.state(rho)?.pressure)
            }
            CurveKind::Barotropic { p, .. } => Ok(p(rho)),
            CurveKind::SoundPowerLaw { a0, m } => {
                Ok(a0 * a0 * power_antiderivative(rho, 2.0 * m + 2.0))
            }
        }
    }

    /// dp/drho along the curve.
    ///
    /// Model-backed curves use the chain rule through the potential partials
    /// (with dT/drho from the entropy constraint for adiabats); plain
    /// closures fall back to 5-point central differences.
    pub fn dp_drho(&self, rho: f64) -> Result<f64> {
        self.check_rho(rho)?;
        match &self.kind {
            CurveKind::AdiabaticIdeal {
                p_coeff, p_exp, ..
            } => Ok(p_coeff * p_exp * rho.powf(p_exp - 1.0)),
            CurveKind::AdiabaticNumeric { model, .. } => {
                let t = self.temperature(rho)?;
                let v = 1.0 / rho;
                // Along s = const: dT/dv = -s_v / s_T, s_v = dp/dT (Maxwell).
                let p_v = model.gas_constant() * t * model.phi_vv(v, t);
                let p_t = model.dp_dt(v, t)?;
                let s_t = model.ds_dt(v, t)?;
                Ok(-v * v * p_v + v * v * p_t * p_t / s_t)
            }
            CurveKind::OnModel { model, t_of_rho } => {
                let t = t_of_rho(rho);
                let v = 1.0 / rho;
                let p_v = model.gas_constant() * t * model.phi_vv(v, t);
                let p_t = model.dp_dt(v, t)?;
                let h = rho * 1e-5;
                let dt_drho = (t_of_rho(rho + h) - t_of_rho(rho - h)) / (2.0 * h);
                Ok(-v * v * p_v + p_t * dt_drho)
            }
            CurveKind::Barotropic { p, dp, .. } => match dp {
                Some(dp) => Ok(dp(rho)),
                None => Ok(five_point_derivative(|r| p(r), rho)),
            },
            CurveKind::SoundPowerLaw { a0, m } => Ok(a0 * a0 * rho.powf(2.0 * m + 2.0)),
        }
    }

    /// d2p/drho2 along the curve; finite differences of `dp_drho` except for
    /// the closed-form kinds.
    pub fn d2p_drho2(&self, rho: f64) -> Result<f64> {
        self.check_rho(rho)?;
        match &self.kind {
            CurveKind::AdiabaticIdeal {
                p_coeff, p_exp, ..
            } => Ok(p_coeff * p_exp * (p_exp - 1.0) * rho.powf(p_exp - 2.0)),
            CurveKind::SoundPowerLaw { a0, m } => {
                Ok(a0 * a0 * (2.0 * m + 2.0) * rho.powf(2.0 * m + 1.0))
            }
            CurveKind::Barotropic { d2p: Some(d2p), .. } => Ok(d2p(rho)),
            _ => {
                let failure = std::cell::RefCell::new(None);
                let d = five_point_derivative(
                    |r| match self.dp_drho(r) {
                        Ok(v) => v,
                        Err(e) => {
                            failure.borrow_mut().get_or_insert(e);
                            f64::NAN
                        }
                    },
                    rho,
                );
                if let Some(e) = failure.into_inner() {
                    return Err(e);
                }
                Ok(d)
            }
        }
    }

    /// Sound speed sqrt(p'(rho)); errors where the curve is not hyperbolic.
    pub fn sound_speed(&self, rho: f64) -> Result<f64> {
        let dp = self.dp_drho(rho)?;
        if dp <= 0.0 {
            return Err(Error::singular(format!(
                "sound speed undefined: dp/drho = {dp} <= 0 at rho = {rho}"
            )));
        }
        Ok(dp.sqrt())
    }

    /// Characteristic coefficient A(rho) = sqrt(p'(rho)) / rho.
    pub fn a_coeff(&self, rho: f64) -> Result<f64> {
        match &self.kind {
            CurveKind::AdiabaticIdeal { a0, m, .. } | CurveKind::SoundPowerLaw { a0, m } => {
                self.check_rho(rho)?;
                Ok(a0 * rho.powf(*m))
            }
            _ => Ok(self.sound_speed(rho)? / rho),
        }
    }

    /// A'(rho).
    pub fn a_prime(&self, rho: f64) -> Result<f64> {
        match &self.kind {
            CurveKind::AdiabaticIdeal { a0, m, .. } | CurveKind::SoundPowerLaw { a0, m } => {
                self.check_rho(rho)?;
                Ok(a0 * m * rho.powf(m - 1.0))
            }
            _ => {
                let c = self.sound_speed(rho)?;
                let d2p = self.d2p_drho2(rho)?;
                Ok(-c / (rho * rho) + d2p / (2.0 * c * rho))
            }
        }
    }

    /// Pairing matrix and hyperbolicity verdict at `rho`.
    pub fn classify_at(&self, rho: f64) -> Result<HyperbolicityReport> {
        let dp = self.dp_drho(rho)?;
        let det = -4.0 * dp;
        let classification = if dp > 0.0 {
            Classification::Hyperbolic
        } else if dp < 0.0 {
            Classification::Elliptic
        } else {
            Classification::Parabolic
        };
        Ok(HyperbolicityReport {
            p_matrix: [[2.0 * rho, 0.0], [0.0, -2.0 * dp / rho]],
            det,
            classification,
        })
    }

    /// True iff p(rho) = c0 rho^3 + c1 on the domain, which is exactly the
    /// condition for the two characteristic distributions to be integrable.
    ///
    /// c0, c1 are fitted at two interior points; the residual is then checked
    /// on a sample grid against `tol` relative to |p|.
    pub fn is_characteristically_integrable(&self, tol: f64) -> Result<bool> {
        let grid = self.domain.scan_grid(64);
        let mut p_scale: f64 = 0.0;
        for &r in &grid {
            let dp = self.dp_drho(r)?;
            if dp <= 0.0 {
                return Err(Error::singular(format!(
                    "integrability test requires a hyperbolic curve; dp/drho = {dp} at rho = {r}"
                )));
            }
            p_scale = p_scale.max(self.pressure(r)?.abs());
        }
        let ra = grid[grid.len() / 3];
        let rb = grid[2 * grid.len() / 3];
        let pa = self.pressure(ra)?;
        let pb = self.pressure(rb)?;
        let c0 = (pa - pb) / (ra.powi(3) - rb.powi(3));
        let c1 = pa - c0 * ra.powi(3);
        for &r in &grid {
            let p = self.pressure(r)?;
            let scale = if p.abs() > 0.0 { p.abs() } else { p_scale };
            if (p - (c0 * r.powi(3) + c1)).abs() > tol * scale {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Solve s(1/rho, T) = s0 for T by bracketed bisection with Newton polish.
fn solve_adiabat_temperature(model: &PotentialModel, s0: f64, rho: f64) -> Result<f64> {
    let v = 1.0 / rho;
    let entropy_gap = |t: f64| match model.eval_state(v, t) {
        Ok(s) => s.entropy - s0,
        Err(_) => f64::NAN,
    };
    let (lo, hi) = roots::expand_bracket_monotone(entropy_gap, 1.0, 80).map_err(|_| {
        Error::domain(format!(
            "no temperature with s = {s0} found for rho = {rho} (bracket expansion failed)"
        ))
    })?;
    // The inversion only makes sense while s is strictly increasing in T.
    for &t in &[lo, 0.5 * (lo + hi), hi] {
        let ds = model.ds_dt(v, t)?;
        if !(ds > 0.0) {
            return Err(Error::Ambiguous(format!(
                "entropy not strictly increasing in T at (v={v}, T={t}); adiabat inversion is ambiguous"
            )));
        }
    }
    let ds_dt = |t: f64| model.ds_dt(v, t).unwrap_or(f64::NAN);
    roots::bisect_polish(entropy_gap, Some(ds_dt), lo, hi, 1e-12, 200)
}

/// 5-point central first derivative with step h = x * 1e-5.
fn five_point_derivative<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = x * 1e-5;
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Natural cubic spline on strictly increasing knots.
#[derive(Clone)]
struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots.
    y2: Vec<f64>,
}

impl CubicSpline {
    fn natural(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n != ys.len() || n < 3 {
            return Err(Error::domain("spline needs >= 3 matched knots".to_string()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain(
                "spline knots must be strictly increasing".to_string(),
            ));
        }
        let mut y2 = vec![0.0; n];
        let mut u = vec![0.0; n];
        for i in 1..n - 1 {
            let sig = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
            let p = sig * y2[i - 1] + 2.0;
            y2[i] = (sig - 1.0) / p;
            let slope_hi = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
            let slope_lo = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
            u[i] = (6.0 * (slope_hi - slope_lo) / (xs[i + 1] - xs[i - 1]) - sig * u[i - 1]) / p;
        }
        for i in (0..n - 1).rev() {
            y2[i] = y2[i] * y2[i + 1] + u[i];
        }
        Ok(CubicSpline { xs, ys, y2 })
    }

    fn segment(&self, x: f64) -> usize {
        match self
            .xs
            .binary_search_by(|probe| probe.partial_cmp(&x).unwrap())
        {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let k = self.segment(x);
        let h = self.xs[k + 1] - self.xs[k];
        let a = (self.xs[k + 1] - x) / h;
        let b = (x - self.xs[k]) / h;
        a * self.ys[k]
            + b * self.ys[k + 1]
            + ((a * a * a - a) * self.y2[k] + (b * b * b - b) * self.y2[k + 1]) * h * h / 6.0
    }

    fn deriv(&self, x: f64) -> f64 {
        let k = self.segment(x);
        let h = self.xs[k + 1] - self.xs[k];
        let a = (self.xs[k + 1] - x) / h;
        let b = (x - self.xs[k]) / h;
        (self.ys[k + 1] - self.ys[k]) / h
            - (3.0 * a * a - 1.0) / 6.0 * h * self.y2[k]
            + (3.0 * b * b - 1.0) / 6.0 * h * self.y2[k + 1]
    }

    fn deriv2(&self, x: f64) -> f64 {
        let k = self.segment(x);
        let h = self.xs[k + 1] - self.xs[k];
        let a = (self.xs[k + 1] - x) / h;
        let b = (x - self.xs[k]) / h;
        a * self.y2[k] + b * self.y2[k + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::PotentialFn;

    fn ideal_adiabat() -> ProcessCurve {
        let model = PotentialModel::ideal_gas(3.0, 1.0).unwrap();
        ProcessCurve::adiabatic(&model, 0.0, Interval::new(1e-3, 1e3).unwrap()).unwrap()
    }

    #[test]
    fn ideal_gas_closed_forms() {
        let c = ideal_adiabat();
        for &rho in &[0.3, 1.0, 2.5] {
            assert!((c.temperature(rho).unwrap() - rho.powf(2.0 / 3.0)).abs() < 1e-14);
            assert!((c.pressure(rho).unwrap() - rho.powf(5.0 / 3.0)).abs() < 1e-14);
            let a_exact = (5.0_f64 / 3.0).sqrt() * rho.powf(-2.0 / 3.0);
            assert!((c.a_coeff(rho).unwrap() - a_exact).abs() < 1e-13 * a_exact);
        }
        let (a0, m) = c.power_law().unwrap();
        assert!((a0 - (5.0_f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((m + 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn power_law_form_holds_at_sample_points() {
        // A(rho) = A0 rho^m with A0 = sqrt(R(1+2/n) e^(2 s0/(R n))), m = 1/n - 1.
        let model = PotentialModel::ideal_gas(5.0, 2.0).unwrap();
        let s0 = 0.7;
        let c = ProcessCurve::adiabatic(&model, s0, Interval::new(1e-2, 1e2).unwrap()).unwrap();
        let a0 = (2.0 * (1.0 + 2.0 / 5.0) * (2.0 * s0 / (2.0 * 5.0)).exp()).sqrt();
        let m = 1.0 / 5.0 - 1.0;
        for &rho in &c.domain().logspace(10) {
            let a = c.a_coeff(rho).unwrap();
            assert!((a - a0 * rho.powf(m)).abs() < 1e-12 * a.abs());
        }
    }

    #[test]
    fn curve_state_is_consistent_with_model() {
        let model = PotentialModel::ideal_gas(3.0, 1.0).unwrap();
        let c = ideal_adiabat();
        for &rho in &[0.2, 1.0, 7.0] {
            let t = c.temperature(rho).unwrap();
            let via_model = model.eval_state(1.0 / rho, t).unwrap().pressure;
            assert!((c.pressure(rho).unwrap() - via_model).abs() < 1e-13 * via_model.abs());
            // entropy stays pinned at s0 = 0
            assert!(c.state(rho).unwrap().entropy.abs() < 1e-12);
        }
    }

    #[test]
    fn sound_coeff_squares_to_pressure_slope() {
        let c = ideal_adiabat();
        for &rho in &c.domain().logspace(12) {
            let a = c.a_coeff(rho).unwrap();
            let dp = c.dp_drho(rho).unwrap();
            assert!((a * a * rho * rho - dp).abs() < 1e-10 * dp.abs());
        }
    }

    struct IdealAsCustom {
        n: f64,
    }
    impl PotentialFn for IdealAsCustom {
        fn phi(&self, v: f64, t: f64) -> f64 {
            (v * t.powf(self.n / 2.0)).ln() - self.n / 2.0
        }
        fn phi_v(&self, v: f64, _: f64) -> f64 {
            1.0 / v
        }
        fn phi_t(&self, _: f64, t: f64) -> f64 {
            0.5 * self.n / t
        }
        fn phi_vv(&self, v: f64, _: f64) -> f64 {
            -1.0 / (v * v)
        }
        fn phi_tt(&self, _: f64, t: f64) -> f64 {
            -0.5 * self.n / (t * t)
        }
        fn phi_vt(&self, _: f64, _: f64) -> f64 {
            0.0
        }
    }

    #[test]
    fn numeric_adiabat_matches_closed_form() {
        // The ideal gas fed through the custom-model path must reproduce the
        // closed-form adiabat.
        let custom = PotentialModel::custom(Arc::new(IdealAsCustom { n: 3.0 }), 1.0).unwrap();
        let numeric =
            ProcessCurve::adiabatic(&custom, 0.0, Interval::new(0.1, 10.0).unwrap()).unwrap();
        for &rho in &[0.5f64, 1.0, 2.0] {
            let t_exact = rho.powf(2.0 / 3.0);
            let p_exact = rho.powf(5.0 / 3.0);
            assert!((numeric.temperature(rho).unwrap() - t_exact).abs() < 1e-10 * t_exact);
            assert!((numeric.pressure(rho).unwrap() - p_exact).abs() < 1e-10 * p_exact);
            let dp_exact = 5.0 / 3.0 * rho.powf(2.0 / 3.0);
            assert!((numeric.dp_drho(rho).unwrap() - dp_exact).abs() < 1e-9 * dp_exact);
        }
    }

    #[test]
    fn ambiguous_entropy_is_reported() {
        // phi_T decreasing in a way that makes s decrease in T.
        struct Decreasing;
        impl PotentialFn for Decreasing {
            fn phi(&self, v: f64, t: f64) -> f64 {
                v.ln() - t * t
            }
            fn phi_v(&self, v: f64, _: f64) -> f64 {
                1.0 / v
            }
            fn phi_t(&self, _: f64, t: f64) -> f64 {
                -2.0 * t
            }
            fn phi_vv(&self, v: f64, _: f64) -> f64 {
                -1.0 / (v * v)
            }
            fn phi_tt(&self, _: f64, _: f64) -> f64 {
                -2.0
            }
            fn phi_vt(&self, _: f64, _: f64) -> f64 {
                0.0
            }
        }
        let model = PotentialModel::custom(Arc::new(Decreasing), 1.0).unwrap();
        let result = ProcessCurve::adiabatic(&model, 0.0, Interval::new(0.5, 2.0).unwrap());
        assert!(matches!(
            result,
            Err(Error::Ambiguous(_)) | Err(Error::Domain(_))
        ));
    }

    #[test]
    fn classification_follows_pressure_slope() {
        // p'(2) = 3 with p = 0.75 rho^2.
        let c = ProcessCurve::barotropic_with_derivatives(
            |r| 0.75 * r * r,
            |r| 1.5 * r,
            |_| 1.5,
            Interval::new(0.1, 10.0).unwrap(),
        )
        .unwrap();
        let rep = c.classify_at(2.0).unwrap();
        assert_eq!(rep.classification, Classification::Hyperbolic);
        assert!((rep.p_matrix[0][0] - 4.0).abs() < 1e-14);
        assert!((rep.p_matrix[1][1] + 3.0).abs() < 1e-14);
        assert!((rep.det + 12.0).abs() < 1e-14);

        let flat = ProcessCurve::barotropic_with_derivatives(
            |_| 1.0,
            |_| 0.0,
            |_| 0.0,
            Interval::new(0.1, 10.0).unwrap(),
        )
        .unwrap();
        assert_eq!(
            flat.classify_at(1.0).unwrap().classification,
            Classification::Parabolic
        );

        for &rho in &[0.01, 1.0, 100.0] {
            assert_eq!(
                ideal_adiabat().classify_at(rho).unwrap().classification,
                Classification::Hyperbolic
            );
        }
    }

    #[test]
    fn rho_outside_domain_is_rejected() {
        let c = ideal_adiabat();
        assert!(c.classify_at(1e4).is_err());
        assert!(c.pressure(0.0).is_err());
    }

    #[test]
    fn cubic_pressure_is_integrable() {
        let dom = Interval::new(0.2, 5.0).unwrap();
        let cubic = ProcessCurve::barotropic_with_derivatives(
            |r| 2.0 * r * r * r + 5.0,
            |r| 6.0 * r * r,
            |r| 12.0 * r,
            dom,
        )
        .unwrap();
        assert!(cubic.is_characteristically_integrable(1e-10).unwrap());

        let pure = ProcessCurve::barotropic_with_derivatives(
            |r| r * r * r,
            |r| 3.0 * r * r,
            |r| 6.0 * r,
            dom,
        )
        .unwrap();
        assert!(pure.is_characteristically_integrable(1e-10).unwrap());

        assert!(!ideal_adiabat().is_characteristically_integrable(1e-8).unwrap());
    }

    #[test]
    fn classification_agrees_with_kappa_on_curve_states() {
        // Hyperbolic exactly where the underlying state is applicable:
        // an isothermal van der Waals curve crossing an elliptic region
        // exercises both verdicts.
        let model = PotentialModel::van_der_waals(3.0, 1.0, 2.0, 5e-3).unwrap();
        let curve = ProcessCurve::on_model(&model, |_| 1.0, Interval::new(0.2, 5.0).unwrap())
            .unwrap();
        let mut hyper = 0;
        let mut nonhyper = 0;
        for &rho in &curve.domain().linspace(60) {
            let class = curve.classify_at(rho).unwrap().classification;
            let kappa = model.kappa_at(1.0 / rho, 1.0).unwrap();
            assert_eq!(
                class == Classification::Hyperbolic,
                kappa.applicable,
                "mismatch at rho = {rho}"
            );
            if kappa.applicable {
                hyper += 1;
            } else {
                nonhyper += 1;
            }
        }
        assert!(hyper > 0 && nonhyper > 0, "curve must cross both regions");

        let ideal = ideal_adiabat();
        let imodel = ideal.model().unwrap().clone();
        for &rho in &[0.01, 0.5, 3.0, 50.0] {
            let class = ideal.classify_at(rho).unwrap().classification;
            let t = ideal.temperature(rho).unwrap();
            let kappa = imodel.kappa_at(1.0 / rho, t).unwrap();
            assert!(class == Classification::Hyperbolic && kappa.applicable);
        }
    }

    #[test]
    fn table_curve_interpolates_pressure() {
        let knots: Vec<(f64, f64)> = (0..40)
            .map(|i| {
                let r = 0.5 + 2.5 * i as f64 / 39.0;
                (r, r.powf(5.0 / 3.0))
            })
            .collect();
        let c = ProcessCurve::from_table(&knots).unwrap();
        for &rho in &[0.8, 1.5, 2.6] {
            let p = c.pressure(rho).unwrap();
            assert!((p - rho.powf(5.0 / 3.0)).abs() < 2e-5 * p.abs());
            let dp = c.dp_drho(rho).unwrap();
            let dp_exact = 5.0 / 3.0 * rho.powf(2.0 / 3.0);
            assert!((dp - dp_exact).abs() < 2e-3 * dp_exact);
        }
    }

    #[test]
    fn sound_power_law_handles_log_exponents() {
        // m = -3/2 puts the pressure antiderivative on its log branch.
        let c = ProcessCurve::sound_power_law(2.0, -1.5, Interval::new(0.5, 2.0).unwrap()).unwrap();
        let p1 = c.pressure(1.0).unwrap();
        assert!(p1.abs() < 1e-14); // 4 ln(1) = 0
        let dp = c.dp_drho(1.3).unwrap();
        assert!((dp - 4.0 / 1.3).abs() < 1e-12);
        assert!((c.a_coeff(1.3).unwrap() - 2.0 * 1.3_f64.powf(-1.5)).abs() < 1e-12);
    }
}
