//! Exact multivalued solutions of non-stationary 1D gas flows.
//!
//! The crate builds, for any thermodynamic model given by a Massieu-Planck
//! potential and any process curve through it, the closed-form family of
//! multivalued flow solutions, locates their caustics and the cusp where a
//! shock is born, constructs the shock front from the conservation-law
//! potential, verifies the underlying geometric identities numerically, and
//! cross-checks everything against an independent finite-volume solver.
//!
//! Modules mirror that pipeline:
//!
//! * [`thermo`] - Massieu-Planck potentials and the applicability form kappa.
//! * [`process`] - process curves rho -> (T, p, e, s), hyperbolicity, the
//!   cubic-pressure integrability test.
//! * [`exact`] - the solution family x = g(rho, t), u = U(rho, t) and branch
//!   extraction.
//! * [`singularity`] - caustics, the cusp, the potential H and the shock
//!   front.
//! * [`geometry`] - pointwise verification of the 2-form calculus behind the
//!   construction.
//! * [`fvm`] - a Rusanov finite-volume scheme for the same barotropic system.
//! * [`verify`] - the aggregated verification report used by the CLI.
//! * [`config`]/[`cli`] - run configuration and the command-line interface.

// Negated comparisons like `!(x > 0.0)` are used on purpose: they reject NaN
// along with the out-of-range values. Indexed loops stay where several
// arrays are walked in lockstep in the small fixed-size linear algebra.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod config;
pub mod error;
pub mod exact;
pub mod fvm;
pub mod geometry;
pub mod interval;
pub mod output;
pub mod process;
pub mod quad;
pub mod roots;
pub mod singularity;
pub mod thermo;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{BranchSet, ProfilePoint, SolutionFamily};
pub use interval::Interval;
pub use process::{Classification, HyperbolicityReport, ProcessCurve};
pub use singularity::{CausticCurve, CuspPoint, FrontCurve};
pub use thermo::{KappaSignature, PotentialModel, StatePoint};

#[cfg(test)]
mod concurrency {
    // Models, curves and families are immutable after construction and all
    // evaluations are pure, so they must stay shareable across threads.
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn core_types_are_send_and_sync() {
        assert_send_sync::<crate::PotentialModel>();
        assert_send_sync::<crate::ProcessCurve>();
        assert_send_sync::<crate::SolutionFamily>();
        assert_send_sync::<crate::fvm::GridState>();
    }
}
