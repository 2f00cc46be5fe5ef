//! The closed-form family of multivalued flow solutions.
//!
//! For a process curve with coefficient A(rho) and constants
//! (alpha0, alpha1, alpha2, alpha3), the flow surface is parametrized by
//! (rho, t):
//!
//! ```text
//! x = g(rho, t) = -I(rho)/a2
//!     + [a2^2 t^2 rho (rho + 2 a3) + 2 t a2 (a3 (a0 + 2 a1 rho) + a1 rho^2)
//!        - (a0 - a1 a3)^2] / (2 a2 (rho + a3)^2)
//! u = U(rho, t) = (a2 rho t + a1 rho + a0) / (rho + a3)
//! ```
//!
//! with I the antiderivative of A^2(rho) (rho + a3). The projection to the
//! (t, x) plane is generally multivalued; `branches` recovers every density
//! root at a query point and `profile_section` renders the folded graph
//! directly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::process::ProcessCurve;
use crate::quad::{integrate, power_antiderivative};
use crate::roots;

/// Number of scan points per window used by the branch solver.
pub const BRANCH_SCAN_POINTS: usize = 2048;

/// |g_rho| below this marks a root as sitting near the caustic.
pub const NEAR_CAUSTIC_GRADIENT: f64 = 1e-3;

#[derive(Clone)]
enum Antideriv {
    /// A = a0 rho^m: I and J are explicit power antiderivatives (with log
    /// branches at the degenerate exponents).
    PowerLaw { a0_sq: f64, m: f64 },
    /// Adaptive quadrature from an anchor density. The anchor value equals
    /// the closed form when one exists so the two paths stay comparable;
    /// otherwise it pins I(anchor) = J(anchor) = 0.
    Quadrature {
        anchor: f64,
        i_anchor: f64,
        j_anchor: f64,
    },
}

/// One point of a sampled profile section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub x: f64,
    pub rho: f64,
    pub u: f64,
}

/// A density root of g(., t) = x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchRoot {
    pub rho: f64,
    /// |g_rho| at the root below `NEAR_CAUSTIC_GRADIENT`.
    pub near_caustic: bool,
}

/// All density branches over one (t, x) query point.
#[derive(Debug, Clone, Serialize)]
pub struct BranchSet {
    pub t: f64,
    pub x: f64,
    /// Roots sorted by increasing rho.
    pub roots: Vec<BranchRoot>,
    /// Some root sits within one scan cell of the window edge, so the window
    /// may be clipping part of the profile.
    pub edge_warning: bool,
}

impl BranchSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// The solution family: four constants plus a process curve.
///
/// Immutable; all evaluations are pure.
#[derive(Clone)]
pub struct SolutionFamily {
    alpha: [f64; 4],
    curve: ProcessCurve,
    antideriv: Antideriv,
}

impl SolutionFamily {
    /// Build the family; antiderivatives use the closed power-law form when
    /// the curve provides one and adaptive quadrature otherwise.
    pub fn new(alpha: [f64; 4], curve: ProcessCurve) -> Result<Self> {
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::domain("alpha parameters must be finite".to_string()));
        }
        let antideriv = match curve.power_law() {
            Some((a0, m)) => Antideriv::PowerLaw { a0_sq: a0 * a0, m },
            None => Antideriv::Quadrature {
                anchor: curve.domain().geometric_mean(),
                i_anchor: 0.0,
                j_anchor: 0.0,
            },
        };
        Ok(SolutionFamily {
            alpha,
            curve,
            antideriv,
        })
    }

    /// Build the family forcing the quadrature antiderivative path, anchored
    /// at the closed-form value when available. Used to cross-check the two
    /// evaluation routes against each other.
    pub fn with_quadrature_antiderivatives(alpha: [f64; 4], curve: ProcessCurve) -> Result<Self> {
        let base = Self::new(alpha, curve)?;
        let anchor = base.curve.domain().geometric_mean();
        let (i_anchor, j_anchor) = match base.antideriv {
            Antideriv::PowerLaw { .. } => {
                (base.antideriv_i(anchor)?, base.antideriv_j(anchor)?)
            }
            Antideriv::Quadrature { .. } => (0.0, 0.0),
        };
        Ok(SolutionFamily {
            antideriv: Antideriv::Quadrature {
                anchor,
                i_anchor,
                j_anchor,
            },
            ..base
        })
    }

    pub fn alpha(&self) -> [f64; 4] {
        self.alpha
    }

    pub fn curve(&self) -> &ProcessCurve {
        &self.curve
    }

    /// alpha2, or the degeneracy error: every term of the implicit solution
    /// divides by it.
    pub fn require_alpha2(&self) -> Result<f64> {
        if self.alpha[2] == 0.0 {
            return Err(Error::singular(
                "alpha2 = 0 degenerates the implicit solution; only the velocity field exists"
                    .to_string(),
            ));
        }
        Ok(self.alpha[2])
    }

    fn check_rho(&self, rho: f64) -> Result<()> {
        if !rho.is_finite() || !self.curve.domain().contains(rho) {
            return Err(Error::domain(format!(
                "rho = {rho} outside the process domain"
            )));
        }
        let a3 = self.alpha[3];
        if (rho + a3).abs() <= 1e-12 * rho.abs().max(a3.abs()).max(1.0) {
            return Err(Error::singular(format!(
                "rho + alpha3 = 0 at rho = {rho}: solution formulas are singular there"
            )));
        }
        Ok(())
    }

    /// Antiderivative I(rho) of A^2(rho) (rho + alpha3).
    pub fn antideriv_i(&self, rho: f64) -> Result<f64> {
        let a3 = self.alpha[3];
        match &self.antideriv {
            Antideriv::PowerLaw { a0_sq, m } => Ok(a0_sq
                * (power_antiderivative(rho, 2.0 * m + 1.0)
                    + a3 * power_antiderivative(rho, 2.0 * m))),
            Antideriv::Quadrature {
                anchor, i_anchor, ..
            } => {
                let failure = std::cell::RefCell::new(None);
                let integrand = |s: f64| match self.curve.dp_drho(s) {
                    Ok(dp) => dp / (s * s) * (s + a3),
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(format!("{e}"));
                        f64::NAN
                    }
                };
                let value = integrate(integrand, *anchor, rho, 1e-12);
                match (value, failure.into_inner()) {
                    (Ok(v), None) => Ok(i_anchor + v),
                    (_, Some(msg)) => Err(Error::numeric(msg)),
                    (Err(e), None) => Err(e),
                }
            }
        }
    }

    /// Antiderivative J(rho) of rho (rho + alpha3) A^2(rho).
    pub fn antideriv_j(&self, rho: f64) -> Result<f64> {
        let a3 = self.alpha[3];
        match &self.antideriv {
            Antideriv::PowerLaw { a0_sq, m } => Ok(a0_sq
                * (power_antiderivative(rho, 2.0 * m + 2.0)
                    + a3 * power_antiderivative(rho, 2.0 * m + 1.0))),
            Antideriv::Quadrature {
                anchor, j_anchor, ..
            } => {
                let failure = std::cell::RefCell::new(None);
                let integrand = |s: f64| match self.curve.dp_drho(s) {
                    Ok(dp) => dp / s * (s + a3),
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(format!("{e}"));
                        f64::NAN
                    }
                };
                let value = integrate(integrand, *anchor, rho, 1e-12);
                match (value, failure.into_inner()) {
                    (Ok(v), None) => Ok(j_anchor + v),
                    (_, Some(msg)) => Err(Error::numeric(msg)),
                    (Err(e), None) => Err(e),
                }
            }
        }
    }

    /// x = g(rho, t).
    pub fn g(&self, rho: f64, t: f64) -> Result<f64> {
        let a2 = self.require_alpha2()?;
        self.check_rho(rho)?;
        let [a0, a1, _, a3] = self.alpha;
        let i = self.antideriv_i(rho)?;
        let w = rho + a3;
        let n = a2 * a2 * t * t * rho * (rho + 2.0 * a3)
            + 2.0 * t * a2 * (a3 * (a0 + 2.0 * a1 * rho) + a1 * rho * rho)
            - (a0 - a1 * a3) * (a0 - a1 * a3);
        Ok(-i / a2 + n / (2.0 * a2 * w * w))
    }

    /// u = U(rho, t). Defined for every family, including alpha2 = 0.
    pub fn velocity(&self, rho: f64, t: f64) -> Result<f64> {
        self.check_rho(rho)?;
        let [a0, a1, a2, a3] = self.alpha;
        Ok((a2 * rho * t + a1 * rho + a0) / (rho + a3))
    }

    /// The recurring combination D(t) = a2 a3 t + a1 a3 - a0.
    ///
    /// dg/dt - U = rho D / (rho + a3)^2 and dg/drho collapses to
    /// (D^2 - A^2 (rho + a3)^4) / (a2 (rho + a3)^3), which is what makes the
    /// caustic equations closed-form.
    pub fn d_of_t(&self, t: f64) -> f64 {
        let [a0, a1, a2, a3] = self.alpha;
        a2 * a3 * t + a1 * a3 - a0
    }

    /// dg/drho.
    pub fn g_rho(&self, rho: f64, t: f64) -> Result<f64> {
        let a2 = self.require_alpha2()?;
        self.check_rho(rho)?;
        let a3 = self.alpha[3];
        let a = self.curve.a_coeff(rho)?;
        let w = rho + a3;
        let d = self.d_of_t(t);
        Ok((d * d - a * a * w.powi(4)) / (a2 * w.powi(3)))
    }

    /// dg/dt.
    pub fn g_t(&self, rho: f64, t: f64) -> Result<f64> {
        let a2 = self.require_alpha2()?;
        self.check_rho(rho)?;
        let [a0, a1, _, a3] = self.alpha;
        let w = rho + a3;
        Ok((a2 * t * rho * (rho + 2.0 * a3) + a3 * (a0 + 2.0 * a1 * rho) + a1 * rho * rho)
            / (w * w))
    }

    /// dU/dt.
    pub fn velocity_t(&self, rho: f64, t: f64) -> Result<f64> {
        self.check_rho(rho)?;
        let _ = t;
        let [_, _, a2, a3] = self.alpha;
        Ok(a2 * rho / (rho + a3))
    }

    /// dU/drho.
    pub fn velocity_rho(&self, rho: f64, t: f64) -> Result<f64> {
        self.check_rho(rho)?;
        let a3 = self.alpha[3];
        let w = rho + a3;
        Ok(self.d_of_t(t) / (w * w))
    }

    /// The defining ansatz f(u, rho, t) = a0 + a1 rho + a2 rho t
    /// - u (rho + a3); U is exactly its zero locus in u.
    pub fn ansatz_f(&self, u: f64, rho: f64, t: f64) -> f64 {
        let [a0, a1, a2, a3] = self.alpha;
        a0 + a1 * rho + a2 * rho * t - u * (rho + a3)
    }

    /// All density roots of g(., t) = x inside `window`, with the default
    /// scan resolution.
    ///
    /// A window with `lo >= hi` is treated as empty and yields an empty
    /// branch set.
    pub fn branches(&self, t: f64, x: f64, window: (f64, f64)) -> Result<BranchSet> {
        self.branches_with(t, x, window, BRANCH_SCAN_POINTS)
    }

    /// `branches` with an explicit scan resolution.
    pub fn branches_with(
        &self,
        t: f64,
        x: f64,
        window: (f64, f64),
        scan_points: usize,
    ) -> Result<BranchSet> {
        let a2 = self.require_alpha2()?;
        let _ = a2;
        let (lo, hi) = window;
        if lo >= hi {
            return Ok(BranchSet {
                t,
                x,
                roots: Vec::new(),
                edge_warning: false,
            });
        }
        let dom = self.curve.domain();
        if lo < dom.lo || hi > dom.hi {
            return Err(Error::domain(format!(
                "window [{lo}, {hi}] not contained in process domain [{}, {}]",
                dom.lo, dom.hi
            )));
        }
        let a3 = self.alpha[3];
        if -a3 >= lo && -a3 <= hi {
            return Err(Error::singular(format!(
                "window [{lo}, {hi}] contains the pole rho = {}",
                -a3
            )));
        }
        self.check_rho(lo)?;
        self.check_rho(hi)?;

        let iv = Interval::new(lo, hi)?;
        let grid = iv.scan_grid(scan_points.max(8));
        let failure = std::cell::RefCell::new(None);
        let h = |rho: f64| match self.g(rho, t) {
            Ok(gv) => gv - x,
            Err(e) => {
                failure.borrow_mut().get_or_insert(format!("{e}"));
                f64::NAN
            }
        };
        let dh = |rho: f64| self.g_rho(rho, t).unwrap_or(f64::NAN);
        let scale = hi.abs().max(1.0);
        let mut found = roots::scan_roots(h, Some(dh), &grid, 1e-12, 8);

        // Grazing roots: where the profile only touches the query level (at
        // or next to the caustic) there is no sign change to bracket. Chase
        // local minima of |g - x| down; a dip through zero yields a close
        // root pair, a dip to ~zero a tangency.
        let x_scale = x.abs().max(1.0);
        let values: Vec<f64> = grid.iter().map(|&r| h(r)).collect();
        for i in 1..grid.len() - 1 {
            let (va, vb, vc) = (values[i - 1], values[i], values[i + 1]);
            if vb == 0.0 || va.signum() != vb.signum() || vb.signum() != vc.signum() {
                continue; // handled by the sign-change scan
            }
            if !(vb.abs() < va.abs() && vb.abs() < vc.abs()) {
                continue;
            }
            let sign = vb.signum();
            let rho_m = roots::golden_min(|r| sign * h(r), grid[i - 1], grid[i + 1], 1e-13, 200);
            let h_m = h(rho_m);
            if sign * h_m < 0.0 {
                // the dip crosses zero: polish both emerging roots
                for (a, b) in [(grid[i - 1], rho_m), (rho_m, grid[i + 1])] {
                    if let Ok(r) = roots::bisect_polish(h, Some(dh), a, b, 1e-12, 128) {
                        found.push(r);
                    }
                }
            } else if h_m.abs() <= 1e-9 * x_scale {
                found.push(rho_m);
            }
        }
        if let Some(msg) = failure.into_inner() {
            return Err(Error::numeric(msg));
        }

        found.sort_by(|a, b| a.partial_cmp(b).unwrap());
        found.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * scale);

        let cell = iv.width() / (grid.len() - 1) as f64;
        let edge_warning = found
            .iter()
            .any(|&r| (r - lo).abs() < cell || (hi - r).abs() < cell);
        let roots = found
            .into_iter()
            .map(|rho| {
                let slope = self.g_rho(rho, t).unwrap_or(0.0);
                BranchRoot {
                    rho,
                    near_caustic: slope.abs() < NEAR_CAUSTIC_GRADIENT,
                }
            })
            .collect();
        Ok(BranchSet {
            t,
            x,
            roots,
            edge_warning,
        })
    }

    /// Parametric profile (g(rho, t), rho, U(rho, t)) over a density grid:
    /// the multivalued graph without any root solving.
    pub fn profile_section(&self, t: f64, rho_grid: &[f64]) -> Result<Vec<ProfilePoint>> {
        rho_grid
            .iter()
            .map(|&rho| {
                Ok(ProfilePoint {
                    x: self.g(rho, t)?,
                    rho,
                    u: self.velocity(rho, t)?,
                })
            })
            .collect()
    }
}
