//! The aggregated verification suite.
//!
//! Runs every structural check the construction rests on - form algebra,
//! operator identities, distribution integrability, the ansatz PDE, surface
//! pullbacks, flow residuals, potential gradients, caustic and front
//! consistency - at seeded sample points, and collects one pass/fail row per
//! check. The CLI `verify` subcommand renders the table and fails the
//! process if any row fails.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::exact::SolutionFamily;
use crate::geometry;
use crate::interval::Interval;
use crate::process::ProcessCurve;
use crate::singularity;

/// Direction of a residual comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// Pass when residual < threshold (an identity).
    Below,
    /// Pass when residual > threshold (a negative control).
    Above,
}

/// One row of the verification table.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub residual: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl CheckResult {
    fn below(name: &'static str, residual: f64, threshold: f64) -> Self {
        CheckResult {
            name,
            residual,
            threshold,
            comparison: Comparison::Below,
            passed: residual < threshold,
        }
    }

    fn above(name: &'static str, residual: f64, threshold: f64) -> Self {
        CheckResult {
            name,
            residual,
            threshold,
            comparison: Comparison::Above,
            passed: residual > threshold,
        }
    }
}

/// The full verification report.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<28} {:>12}    {:>12}  verdict",
            "check", "residual", "threshold"
        );
        for c in &self.checks {
            let rel = match c.comparison {
                Comparison::Below => "<",
                Comparison::Above => ">",
            };
            let _ = writeln!(
                out,
                "{:<28} {:>12.3e}  {} {:>12.3e}  {}",
                c.name,
                c.residual,
                rel,
                c.threshold,
                if c.passed { "PASS" } else { "FAIL" }
            );
        }
        out
    }
}

/// Run the whole suite on a family with a seeded sampler.
pub fn run_verification(
    family: &SolutionFamily,
    seed: u64,
    samples: usize,
) -> Result<VerifyReport> {
    let curve = family.curve();
    let points = geometry::sample_points(curve, seed, samples)?;
    let surface = geometry::sample_surface(curve, seed.wrapping_add(1), samples)?;
    let mut checks = Vec::new();

    // form algebra at hyperbolic points
    let mut wedge_cross = 0.0_f64;
    let mut wedge_norm = 0.0_f64;
    let mut det_resid = 0.0_f64;
    let mut involution = 0.0_f64;
    let mut contraction = 0.0_f64;
    let mut eigen = 0.0_f64;
    let mut projector = 0.0_f64;
    for p in &points {
        let (w1, w2) = geometry::normalized_forms(curve, p)?;
        let scale = w1.max_abs().max(w2.max_abs()).powi(2).max(1.0);
        wedge_cross = wedge_cross.max(w1.wedge_pairing(&w2).abs() / scale);
        wedge_norm =
            wedge_norm.max((w1.wedge_pairing(&w1) + w2.wedge_pairing(&w2)).abs() / scale);

        let (r1, r2) = geometry::raw_forms(curve, p)?;
        let p11 = r1.wedge_pairing(&r1);
        let p12 = r1.wedge_pairing(&r2);
        let p22 = r2.wedge_pairing(&r2);
        let dp = curve.dp_drho(p.rho)?;
        let det = p11 * p22 - p12 * p12;
        det_resid = det_resid.max((det + 4.0 * dp).abs() / (4.0 * dp).abs());

        let w = geometry::operator_w(curve, p)?;
        involution =
            involution.max(geometry::mat_max_abs_diff(&w.squared(), &geometry::mat_identity()));
        let wc = geometry::operator_w_from_contraction(curve, p)?;
        let mscale = w
            .matrix_canonical()
            .iter()
            .flatten()
            .fold(1.0_f64, |m, c| m.max(c.abs()));
        contraction = contraction.max(
            geometry::mat_max_abs_diff(&w.matrix_canonical(), &wc.matrix_canonical()) / mscale,
        );

        let fields = geometry::char_fields(curve, p)?;
        for (v, sign) in [
            (fields.x_plus, 1.0),
            (fields.y_plus, 1.0),
            (fields.x_minus, -1.0),
            (fields.y_minus, -1.0),
        ] {
            let wv = w.apply(&v);
            let vnorm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            for i in 0..4 {
                eigen = eigen.max((wv[i] - sign * v[i]).abs() / vnorm);
            }
        }
        for (sign, bx, by) in [
            (1.0, fields.x_plus, fields.y_plus),
            (-1.0, fields.x_minus, fields.y_minus),
        ] {
            let m = w.matrix_canonical();
            for col in 0..4 {
                let mut v = [0.0; 4];
                for i in 0..4 {
                    let id = if i == col { 1.0 } else { 0.0 };
                    v[i] = 0.5 * (id + sign * m[i][col]);
                }
                if v.iter().map(|c| c * c).sum::<f64>().sqrt() > 1e-8 {
                    projector = projector.max(geometry::span_residual(&v, &bx, &by));
                }
            }
        }
    }
    checks.push(CheckResult::below(
        "wedge_cross_vanishes",
        wedge_cross,
        1e-12,
    ));
    checks.push(CheckResult::below("wedge_normalization", wedge_norm, 1e-12));
    checks.push(CheckResult::below("pairing_determinant", det_resid, 1e-12));
    checks.push(CheckResult::below("operator_involution", involution, 1e-12));
    checks.push(CheckResult::below(
        "operator_contraction",
        contraction,
        1e-12,
    ));
    checks.push(CheckResult::below("eigenvector_residual", eigen, 1e-12));
    checks.push(CheckResult::below("eigenprojector_span", projector, 1e-8));

    // integrability: bracket test against the cubic-pressure fit, on the
    // family's curve and on reference curves of both kinds
    let mut integrability_disagreements = 0.0;
    let cases: Vec<ProcessCurve> = vec![
        curve.clone(),
        ProcessCurve::barotropic_with_derivatives(
            |r| 2.0 * r * r * r + 5.0,
            |r| 6.0 * r * r,
            |r| 12.0 * r,
            Interval::new(0.2, 5.0)?,
        )?,
        ProcessCurve::barotropic_with_derivatives(
            |r| r * r * r,
            |r| 3.0 * r * r,
            |r| 6.0 * r,
            Interval::new(0.2, 5.0)?,
        )?,
    ];
    for case in &cases {
        let pts = geometry::sample_points(case, seed.wrapping_add(2), samples.min(40))?;
        let by_bracket = geometry::distributions_integrable(case, &pts)?;
        let by_fit = case.is_characteristically_integrable(1e-8)?;
        if by_bracket != by_fit {
            integrability_disagreements += 1.0;
        }
    }
    checks.push(CheckResult::below(
        "integrability_consistency",
        integrability_disagreements,
        0.5,
    ));

    // ansatz PDE and its negative control
    checks.push(CheckResult::below(
        "ansatz_pde",
        geometry::ansatz_pde_max_residual(family, &points)?,
        1e-9,
    ));
    checks.push(CheckResult::above(
        "ansatz_pde_mutation",
        geometry::ansatz_pde_mutated_residual(family, &points)?,
        1e-3,
    ));

    // the velocity field is the zero locus of the ansatz
    let mut locus = 0.0_f64;
    for &(rho, t) in &surface {
        let u = family.velocity(rho, t)?;
        let scale = 1.0 + (rho * t).abs();
        locus = locus.max(family.ansatz_f(u, rho, t).abs() / scale);
    }
    checks.push(CheckResult::below("ansatz_zero_locus", locus, 1e-12));

    // pullbacks on the solution surface
    checks.push(CheckResult::below(
        "pullback_vanishes",
        geometry::pullback_max_residual(family, &surface, 1e-3)?,
        1e-8,
    ));
    checks.push(CheckResult::above(
        "pullback_mutation",
        geometry::pullback_mutated_residual(family, &surface, 1e-3, 0.01)?,
        1e-4,
    ));

    // characteristic fields of the solved hypersurface
    let mut tangency = 0.0_f64;
    let mut z_projection = 0.0_f64;
    for p in &points {
        for plus in [true, false] {
            let v = geometry::v_field(family, p, plus)?;
            let vnorm = v.iter().map(|c| c * c).sum::<f64>().sqrt().max(1.0);
            let scale = vnorm * (1.0 + p.rho + p.u.abs());
            tangency = tangency.max(geometry::v_applied_to_f(family, p, &v).abs() / scale);
        }
    }
    for &(rho, t) in surface.iter().take(20) {
        let u = family.velocity(rho, t)?;
        let on_surface = geometry::Point {
            t,
            x: family.g(rho, t)?,
            u,
            rho,
        };
        for plus in [true, false] {
            let v = geometry::v_field(family, &on_surface, plus)?;
            let z = geometry::z_field(family, rho, t, plus)?;
            let v3 = [v[0], v[1], v[3]];
            let vmax = v3.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
            let zmax = z.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
            for i in 0..3 {
                for j in (i + 1)..3 {
                    let cross = v3[i] * z[j] - v3[j] * z[i];
                    z_projection = z_projection.max(cross.abs() / (vmax * zmax));
                }
            }
        }
    }
    checks.push(CheckResult::below("v_field_tangency", tangency, 1e-12));
    checks.push(CheckResult::below("z_field_projection", z_projection, 1e-10));

    // flow-system residuals on single-valued branches (implicit
    // differentiation), away from the caustic
    let mut euler = 0.0_f64;
    for &(rho, t) in &surface {
        let g_rho = family.g_rho(rho, t)?;
        if g_rho.abs() <= 1e-3 {
            continue;
        }
        let u = family.velocity(rho, t)?;
        let rho_x = 1.0 / g_rho;
        let rho_t = -family.g_t(rho, t)? / g_rho;
        let u_x = family.velocity_rho(rho, t)? * rho_x;
        let u_t = family.velocity_t(rho, t)? + family.velocity_rho(rho, t)? * rho_t;
        let mass = rho_t + u * rho_x + rho * u_x;
        let momentum = u_t + u * u_x + curve.dp_drho(rho)? / rho * rho_x;
        euler = euler.max(mass.abs().max(momentum.abs()));
    }
    checks.push(CheckResult::below("euler_residuals", euler, 1e-7));

    // potential gradients and closedness of the mass-flux form
    let mut h_grad = 0.0_f64;
    let mut mixed = 0.0_f64;
    for &(rho, t) in surface.iter().take(50) {
        let h = 1e-6 * rho.max(1.0);
        let dh_rho = (singularity::potential_h(family, rho + h, t)?
            - singularity::potential_h(family, rho - h, t)?)
            / (2.0 * h);
        let ht = 1e-6 * t.abs().max(1.0);
        let dh_t = (singularity::potential_h(family, rho, t + ht)?
            - singularity::potential_h(family, rho, t - ht)?)
            / (2.0 * ht);
        let expect_rho = rho * family.g_rho(rho, t)?;
        let expect_t = rho * (family.g_t(rho, t)? - family.velocity(rho, t)?);
        let scale = expect_rho.abs().max(expect_t.abs()).max(1e2);
        h_grad = h_grad.max(((dh_rho - expect_rho).abs().max((dh_t - expect_t).abs())) / scale);

        let cross_a =
            rho * (family.g_rho(rho, t + ht)? - family.g_rho(rho, t - ht)?) / (2.0 * ht);
        let f = |r: f64| -> Result<f64> { Ok(r * (family.g_t(r, t)? - family.velocity(r, t)?)) };
        let cross_b = (f(rho + h)? - f(rho - h)?) / (2.0 * h);
        mixed = mixed.max((cross_a - cross_b).abs() / cross_a.abs().max(1.0));
    }
    checks.push(CheckResult::below("potential_gradients", h_grad, 1e-8));
    checks.push(CheckResult::below("mixed_partials", mixed, 1e-6));

    // caustic, cusp and front checks when the family has a forward cusp
    if let Ok(cusp_pt) = singularity::cusp(family, singularity::forward_branch(family)) {
        let branch = singularity::forward_branch(family);
        let dom = family.curve().domain();
        let grid = Interval::new(dom.lo.max(0.1), dom.hi.min(5.0))?.logspace(40);
        let mut caustic_resid = 0.0_f64;
        if let Ok(curve_samples) = singularity::caustic(family, branch, &grid) {
            for s in &curve_samples.samples {
                // fold condition, normalized by the defining term magnitudes
                let a = family.curve().a_coeff(s.rho)?;
                let w = s.rho + family.alpha()[3];
                let d = family.d_of_t(s.t);
                let scale = ((d * d).abs() + (a * a * w.powi(4)).abs())
                    / (family.alpha()[2] * w.powi(3)).abs();
                caustic_resid =
                    caustic_resid.max(family.g_rho(s.rho, s.t)?.abs() / scale.max(1e-300));
            }
        }
        checks.push(CheckResult::below("caustic_residual", caustic_resid, 1e-8));

        let t_star = cusp_pt.t;
        let span = 0.2 * t_star.abs().max(1.0);
        if let Ok(front) = singularity::shock_front_from(
            family,
            &cusp_pt,
            (t_star + 0.05 * span, t_star + span),
            12,
        ) {
            let h_scale = singularity::potential_h(family, cusp_pt.rho, cusp_pt.t)?
                .abs()
                .max(1.0);
            let mut loop_resid = 0.0_f64;
            for s in &front.samples {
                let li = singularity::theta_loop_integral(family, s.rho_left, s.rho_right, s.t)?;
                loop_resid = loop_resid.max(li.abs() / h_scale);
            }
            checks.push(CheckResult::below("equal_area_loop", loop_resid, 1e-8));

            let mut rh = 0.0_f64;
            for i in 1..front.samples.len() - 1 {
                let (a, b, c) = (
                    front.samples[i - 1],
                    front.samples[i],
                    front.samples[i + 1],
                );
                let slope = (c.x - a.x) / (c.t - a.t);
                let expect = singularity::rankine_hugoniot_speed(family, &b)?;
                rh = rh.max((slope - expect).abs() / expect.abs().max(1.0));
            }
            checks.push(CheckResult::below("front_rankine_hugoniot", rh, 1e-3));
        }
    }

    // antiderivative self-check: the reported slopes must reproduce the
    // integrands they claim to integrate
    let mut anti = 0.0_f64;
    let dom = family.curve().domain();
    for &rho in &Interval::new(dom.lo.max(0.2), dom.hi.min(5.0))?.logspace(9) {
        let h = rho * 1e-6;
        let a3 = family.alpha()[3];
        let di = (family.antideriv_i(rho + h)? - family.antideriv_i(rho - h)?) / (2.0 * h);
        let dj = (family.antideriv_j(rho + h)? - family.antideriv_j(rho - h)?) / (2.0 * h);
        let a_sq = family.curve().dp_drho(rho)? / (rho * rho);
        let i_exact = a_sq * (rho + a3);
        let j_exact = rho * (rho + a3) * a_sq;
        anti = anti.max((di - i_exact).abs() / i_exact.abs().max(1.0));
        anti = anti.max((dj - j_exact).abs() / j_exact.abs().max(1.0));
    }
    checks.push(CheckResult::below("antiderivative_slopes", anti, 1e-8));

    Ok(VerifyReport {
        seed,
        samples,
        checks,
    })
}
