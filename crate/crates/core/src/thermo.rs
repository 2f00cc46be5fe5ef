//! Thermodynamic states through Massieu-Planck potentials.
//!
//! A gas model is a single dimensionless potential phi(v, T) on v > 0, T > 0
//! together with a gas constant R. State variables follow from the potential:
//!
//! ```text
//! p = R T phi_v,   e = R T^2 phi_T,   s = R (phi + T phi_T)
//! ```
//!
//! The quadratic form kappa restricted to the state manifold decides where a
//! model is usable for gas dynamics: both coefficients negative means
//! p_rho > 0 and e_T > 0 hold, and the flow system built on any process
//! through that state is hyperbolic.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Closed-form potential supplied by a user model.
///
/// Partials are expected to be exact; downstream formulas differentiate them
/// again, so finite-difference implementations would inject noise into A(rho)
/// and everything built on it. The mixed partial has a finite-difference
/// default for models that cannot provide it.
pub trait PotentialFn: Send + Sync {
    fn phi(&self, v: f64, t: f64) -> f64;
    fn phi_v(&self, v: f64, t: f64) -> f64;
    fn phi_t(&self, v: f64, t: f64) -> f64;
    fn phi_vv(&self, v: f64, t: f64) -> f64;
    fn phi_tt(&self, v: f64, t: f64) -> f64;

    /// Mixed partial d^2 phi / dv dT; default is a central difference of
    /// `phi_v` in T.
    fn phi_vt(&self, v: f64, t: f64) -> f64 {
        let h = t * 1e-6;
        (self.phi_v(v, t + h) - self.phi_v(v, t - h)) / (2.0 * h)
    }

    /// Smallest admissible specific volume (exclusive); 0 unless the model
    /// has a covolume.
    fn v_floor(&self) -> f64 {
        0.0
    }
}

#[derive(Clone)]
enum Form {
    IdealGas { dof: f64 },
    VanDerWaals { dof: f64, attraction: f64, covolume: f64 },
    Custom(Arc<dyn PotentialFn>),
}

/// A thermodynamic model: Massieu-Planck potential plus gas constant.
///
/// Immutable after construction; evaluations are pure and safe to share
/// across threads.
#[derive(Clone)]
pub struct PotentialModel {
    gas_constant: f64,
    form: Form,
}

impl fmt::Debug for PotentialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.form {
            Form::IdealGas { dof } => write!(
                f,
                "PotentialModel::ideal_gas(n={dof}, R={})",
                self.gas_constant
            ),
            Form::VanDerWaals {
                dof,
                attraction,
                covolume,
            } => write!(
                f,
                "PotentialModel::van_der_waals(n={dof}, R={}, a={attraction}, b={covolume})",
                self.gas_constant
            ),
            Form::Custom(_) => write!(f, "PotentialModel::custom(R={})", self.gas_constant),
        }
    }
}

/// State variables at one point of the model manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatePoint {
    pub v: f64,
    #[serde(rename = "T")]
    pub temperature: f64,
    #[serde(rename = "p")]
    pub pressure: f64,
    #[serde(rename = "e")]
    pub energy: f64,
    #[serde(rename = "s")]
    pub entropy: f64,
}

/// Signature of the quadratic form kappa restricted to the state manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaSignature {
    /// Coefficient of dT.dT: -R (phi_TT + 2 phi_T / T).
    pub coeff_tt: f64,
    /// Coefficient of dv.dv: R phi_vv.
    pub coeff_vv: f64,
    /// Negative-definite kappa, equivalently p_rho > 0 and e_T > 0.
    pub applicable: bool,
}

impl PotentialModel {
    /// Ideal gas with `dof >= 3` degrees of freedom.
    ///
    /// The stored potential is `phi = ln(v T^(n/2)) - n/2`; the shift by n/2
    /// makes the entropy come out as `R ln(T^(n/2) v)` with no additive
    /// constant.
    pub fn ideal_gas(dof: f64, gas_constant: f64) -> Result<Self> {
        if !(dof >= 3.0) {
            return Err(Error::domain(format!(
                "ideal gas needs n >= 3 degrees of freedom, got {dof}"
            )));
        }
        if !(gas_constant > 0.0) {
            return Err(Error::domain(format!(
                "gas constant must be positive, got {gas_constant}"
            )));
        }
        Ok(PotentialModel {
            gas_constant,
            form: Form::IdealGas { dof },
        })
    }

    /// Van der Waals gas: attraction `a >= 0`, covolume `b >= 0`.
    ///
    /// `phi = ln(v - b) + (n/2) ln T + a/(R T v) - n/2`, so that
    /// `p = RT/(v-b) - a/v^2` and `e = nRT/2 - a/v`. Unlike the ideal gas this
    /// model has states where `phi_vv > 0`, i.e. non-applicable regions.
    pub fn van_der_waals(dof: f64, gas_constant: f64, attraction: f64, covolume: f64) -> Result<Self> {
        if !(dof >= 3.0) {
            return Err(Error::domain(format!(
                "van der Waals gas needs n >= 3 degrees of freedom, got {dof}"
            )));
        }
        if !(gas_constant > 0.0) {
            return Err(Error::domain("gas constant must be positive".to_string()));
        }
        if attraction < 0.0 || covolume < 0.0 {
            return Err(Error::domain(
                "van der Waals parameters a, b must be non-negative".to_string(),
            ));
        }
        Ok(PotentialModel {
            gas_constant,
            form: Form::VanDerWaals {
                dof,
                attraction,
                covolume,
            },
        })
    }

    /// Wrap a user-supplied potential.
    pub fn custom(potential: Arc<dyn PotentialFn>, gas_constant: f64) -> Result<Self> {
        if !(gas_constant > 0.0) {
            return Err(Error::domain("gas constant must be positive".to_string()));
        }
        Ok(PotentialModel {
            gas_constant,
            form: Form::Custom(potential),
        })
    }

    pub fn gas_constant(&self) -> f64 {
        self.gas_constant
    }

    /// Degrees of freedom for the built-in gases, if this is one.
    pub fn dof(&self) -> Option<f64> {
        match self.form {
            Form::IdealGas { dof } | Form::VanDerWaals { dof, .. } => Some(dof),
            Form::Custom(_) => None,
        }
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self.form, Form::IdealGas { .. })
    }

    fn check_domain(&self, v: f64, t: f64) -> Result<()> {
        if !(v > 0.0 && t > 0.0) || !v.is_finite() || !t.is_finite() {
            return Err(Error::domain(format!(
                "state requires v > 0 and T > 0, got v={v}, T={t}"
            )));
        }
        let floor = self.v_floor();
        if v <= floor {
            return Err(Error::domain(format!(
                "specific volume {v} at or below model covolume {floor}"
            )));
        }
        Ok(())
    }

    fn v_floor(&self) -> f64 {
        match &self.form {
            Form::IdealGas { .. } => 0.0,
            Form::VanDerWaals { covolume, .. } => *covolume,
            Form::Custom(p) => p.v_floor(),
        }
    }

    pub fn phi(&self, v: f64, t: f64) -> f64 {
        match &self.form {
            Form::IdealGas { dof } => (v * t.powf(dof / 2.0)).ln() - dof / 2.0,
            Form::VanDerWaals {
                dof,
                attraction,
                covolume,
            } => {
                (v - covolume).ln() + 0.5 * dof * t.ln() + attraction / (self.gas_constant * t * v)
                    - dof / 2.0
            }
            Form::Custom(p) => p.phi(v, t),
        }
    }

    pub fn phi_v(&self, v: f64, t: f64) -> f64 {
        match &self.form {
            Form::IdealGas { .. } => 1.0 / v,
            Form::VanDerWaals {
                attraction,
                covolume,
                ..
            } => 1.0 / (v - covolume) - attraction / (self.gas_constant * t * v * v),
            Form::Custom(p) => p.phi_v(v, t),
        }
    }

    pub fn phi_t(&self, v: f64, t: f64) -> f64 {
        match &self.form {
            Form::IdealGas { dof } => 0.5 * dof / t,
            Form::VanDerWaals {
                dof, attraction, ..
            } => 0.5 * dof / t - attraction / (self.gas_constant * t * t * v),
            Form::Custom(p) => p.phi_t(v, t),
        }
    }

    pub fn phi_vv(&self, v: f64, t: f64) -> f64 {
        match &self.form {
            Form::IdealGas { .. } => -1.0 / (v * v),
            Form::VanDerWaals {
                attraction,
                covolume,
                ..
            } => {
                -1.0 / ((v - covolume) * (v - covolume))
                    + 2.0 * attraction / (self.gas_constant * t * v * v * v)
            }
            Form::Custom(p) => p.phi_vv(v, t),
        }
    }

    pub fn phi_tt(&self, v: f64, t: f64) -> f64 {
        match &self.form {
            Form::IdealGas { dof } => -0.5 * dof / (t * t),
            Form::VanDerWaals {
                dof, attraction, ..
            } => -0.5 * dof / (t * t) + 2.0 * attraction / (self.gas_constant * t * t * t * v),
            Form::Custom(p) => p.phi_tt(v, t),
        }
    }

    pub fn phi_vt(&self, v: f64, t: f64) -> f64 {
        match &self.form {
            Form::IdealGas { .. } => 0.0,
            Form::VanDerWaals { attraction, .. } => {
                attraction / (self.gas_constant * t * t * v * v)
            }
            Form::Custom(p) => p.phi_vt(v, t),
        }
    }

    /// Evaluate p, e, s at (v, T).
    pub fn eval_state(&self, v: f64, t: f64) -> Result<StatePoint> {
        self.check_domain(v, t)?;
        let r = self.gas_constant;
        let phi = self.phi(v, t);
        let phi_v = self.phi_v(v, t);
        let phi_t = self.phi_t(v, t);
        Ok(StatePoint {
            v,
            temperature: t,
            pressure: r * t * phi_v,
            energy: r * t * t * phi_t,
            entropy: r * (phi + t * phi_t),
        })
    }

    /// Coefficients of the restricted quadratic form kappa at (v, T).
    pub fn kappa_at(&self, v: f64, t: f64) -> Result<KappaSignature> {
        self.check_domain(v, t)?;
        let r = self.gas_constant;
        let coeff_tt = -r * (self.phi_tt(v, t) + 2.0 * self.phi_t(v, t) / t);
        let coeff_vv = r * self.phi_vv(v, t);
        Ok(KappaSignature {
            coeff_tt,
            coeff_vv,
            applicable: coeff_tt < 0.0 && coeff_vv < 0.0,
        })
    }

    /// Isothermal compressibility derivative dp/drho at fixed T, with
    /// rho = 1/v. Positive exactly where `coeff_vv < 0`.
    pub fn dp_drho_isothermal(&self, v: f64, t: f64) -> Result<f64> {
        self.check_domain(v, t)?;
        Ok(-v * v * self.gas_constant * t * self.phi_vv(v, t))
    }

    /// dp/dT at fixed v. Equals ds/dv by the Maxwell relation on the
    /// potential.
    pub fn dp_dt(&self, v: f64, t: f64) -> Result<f64> {
        self.check_domain(v, t)?;
        Ok(self.gas_constant * (self.phi_v(v, t) + t * self.phi_vt(v, t)))
    }

    /// de/dT at fixed v (heat capacity at constant volume).
    pub fn de_dt(&self, v: f64, t: f64) -> Result<f64> {
        self.check_domain(v, t)?;
        let r = self.gas_constant;
        Ok(r * t * t * (self.phi_tt(v, t) + 2.0 * self.phi_t(v, t) / t))
    }

    /// ds/dT at fixed v; equals de/dT / T.
    pub fn ds_dt(&self, v: f64, t: f64) -> Result<f64> {
        Ok(self.de_dt(v, t)? / t)
    }
}
