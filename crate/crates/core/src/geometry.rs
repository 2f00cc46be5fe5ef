//! Pointwise verification of the 2-form calculus behind the solution family.
//!
//! The flow system lives on the zero-jet space with coordinates
//! (t, x, u, rho). The module represents 2-forms by their antisymmetric
//! coefficient matrices in that coordinate order, pairs them against the
//! volume form q = dt^dx^du^drho, builds the operator relating the two
//! defining forms, and checks every structural identity numerically at
//! seeded random hyperbolic points: the normalization relations, the
//! involution property and eigenstructure of the operator, integrability of
//! the characteristic distributions, the defining second-order PDE of the
//! ansatz, tangency of the characteristic fields, and the vanishing of the
//! form pullbacks on the solution surface.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::SolutionFamily;
use crate::process::ProcessCurve;

/// Coordinate order used for vectors and form indices: (t, x, u, rho).
pub const COORDS: [&str; 4] = ["t", "x", "u", "rho"];

pub type Vec4 = [f64; 4];
pub type Mat4 = [[f64; 4]; 4];

/// A point of the zero-jet space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub t: f64,
    pub x: f64,
    pub u: f64,
    pub rho: f64,
}

/// A 2-form at a point, stored as its antisymmetric coefficient matrix in
/// the (t, x, u, rho) coordinate basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoForm {
    coeffs: Mat4,
}

impl TwoForm {
    pub fn zero() -> Self {
        TwoForm {
            coeffs: [[0.0; 4]; 4],
        }
    }

    /// Set the coefficient of dx_i ^ dx_j (i != j), keeping antisymmetry.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.coeffs[i][j] = value;
        self.coeffs[j][i] = -value;
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.coeffs[i][j]
    }

    pub fn matrix(&self) -> Mat4 {
        self.coeffs
    }

    /// Evaluate omega(a, b).
    pub fn eval(&self, a: &Vec4, b: &Vec4) -> f64 {
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                acc += self.coeffs[i][j] * a[i] * b[j];
            }
        }
        acc
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .flatten()
            .fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// The scalar P with alpha ^ beta = P q, q = dt^dx^du^drho.
    pub fn wedge_pairing(&self, other: &TwoForm) -> f64 {
        let a = &self.coeffs;
        let b = &other.coeffs;
        a[0][1] * b[2][3] - a[0][2] * b[1][3] + a[0][3] * b[1][2] + a[1][2] * b[0][3]
            - a[1][3] * b[0][2]
            + a[2][3] * b[0][1]
    }
}

fn hyperbolic_a(curve: &ProcessCurve, rho: f64) -> Result<f64> {
    curve.a_coeff(rho).map_err(|_| {
        Error::singular(format!(
            "point with rho = {rho} is not hyperbolic: A(rho) undefined"
        ))
    })
}

/// The two raw 2-forms encoding the flow system (before normalization):
/// omega1 = rho dt^du + u dt^drho - dx^drho,
/// omega2 = u dt^du + (p'/rho) dt^drho - dx^du.
pub fn raw_forms(curve: &ProcessCurve, p: &Point) -> Result<(TwoForm, TwoForm)> {
    let dp = curve.dp_drho(p.rho)?;
    let mut w1 = TwoForm::zero();
    w1.set(0, 2, p.rho);
    w1.set(0, 3, p.u);
    w1.set(1, 3, -1.0);
    let mut w2 = TwoForm::zero();
    w2.set(0, 2, p.u);
    w2.set(0, 3, dp / p.rho);
    w2.set(1, 2, -1.0);
    Ok((w1, w2))
}

/// The normalized pair, defined at hyperbolic points:
/// omega1 = A (rho dt^du + u dt^drho - dx^drho),
/// omega2 = u dt^du + rho A^2 dt^drho - dx^du.
///
/// They satisfy omega1^omega2 = 0 and omega1^omega1 = -omega2^omega2.
pub fn normalized_forms(curve: &ProcessCurve, p: &Point) -> Result<(TwoForm, TwoForm)> {
    let a = hyperbolic_a(curve, p.rho)?;
    let mut w1 = TwoForm::zero();
    w1.set(0, 2, a * p.rho);
    w1.set(0, 3, a * p.u);
    w1.set(1, 3, -a);
    let mut w2 = TwoForm::zero();
    w2.set(0, 2, p.u);
    w2.set(0, 3, p.rho * a * a);
    w2.set(1, 2, -1.0);
    Ok((w1, w2))
}

/// The operator relating the two normalized forms through
/// X . omega2 = A(X) . omega1 (interior products).
///
/// Stored in the (t, x, u, rho) basis; `matrix()` returns it in the
/// (t, x, rho, u) basis.
#[derive(Debug, Clone, Copy)]
pub struct OperatorW {
    canonical: Mat4,
}

impl OperatorW {
    /// Matrix in the basis (d/dt, d/dx, d/drho, d/du).
    pub fn matrix(&self) -> Mat4 {
        let m = [0usize, 1, 3, 2];
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = self.canonical[m[i]][m[j]];
            }
        }
        out
    }

    /// Matrix in the (t, x, u, rho) coordinate order.
    pub fn matrix_canonical(&self) -> Mat4 {
        self.canonical
    }

    pub fn apply(&self, v: &Vec4) -> Vec4 {
        let mut out = [0.0; 4];
        for (i, row) in self.canonical.iter().enumerate() {
            out[i] = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn squared(&self) -> Mat4 {
        mat_mul(&self.canonical, &self.canonical)
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.canonical[i][i]).sum()
    }
}

/// Closed form of the operator at a hyperbolic point.
pub fn operator_w(curve: &ProcessCurve, p: &Point) -> Result<OperatorW> {
    let a = hyperbolic_a(curve, p.rho)?;
    let ra = p.rho * a;
    if ra == 0.0 {
        return Err(Error::singular("rho A = 0: operator undefined".to_string()));
    }
    let (u, rho) = (p.u, p.rho);
    // (t, x, u, rho) basis; block structure mixes (t, x) and (u, rho).
    let canonical = [
        [u / ra, -1.0 / ra, 0.0, 0.0],
        [(u * u - rho * rho * a * a) / ra, -u / ra, 0.0, 0.0],
        [0.0, 0.0, 0.0, rho * a * a / ra],
        [0.0, 0.0, rho / ra, 0.0],
    ];
    Ok(OperatorW { canonical })
}

/// The operator reconstructed from the defining interior-product relation:
/// solve C1^T W = C2^T where C1, C2 are the form coefficient matrices.
pub fn operator_w_from_contraction(curve: &ProcessCurve, p: &Point) -> Result<OperatorW> {
    let (w1, w2) = normalized_forms(curve, p)?;
    let c1t = mat_transpose(&w1.matrix());
    let c2t = mat_transpose(&w2.matrix());
    let canonical = solve4(&c1t, &c2t).ok_or_else(|| {
        Error::singular("form omega1 is degenerate: contraction has no solution".to_string())
    })?;
    Ok(OperatorW { canonical })
}

/// Generators of the two characteristic distributions at a point, in the
/// (t, x, u, rho) coordinate order:
/// X+- = +-A d/du + d/drho, Y+- = (u -+ rho A)^-1 d/dt + d/dx.
#[derive(Debug, Clone, Copy)]
pub struct CharFields {
    pub x_plus: Vec4,
    pub x_minus: Vec4,
    pub y_plus: Vec4,
    pub y_minus: Vec4,
}

pub fn char_fields(curve: &ProcessCurve, p: &Point) -> Result<CharFields> {
    let a = hyperbolic_a(curve, p.rho)?;
    let ra = p.rho * a;
    let denom_plus = p.u - ra;
    let denom_minus = p.u + ra;
    if denom_plus == 0.0 || denom_minus == 0.0 {
        return Err(Error::singular(
            "u = +-rho A: characteristic field Y degenerates".to_string(),
        ));
    }
    Ok(CharFields {
        x_plus: [0.0, 0.0, a, 1.0],
        x_minus: [0.0, 0.0, -a, 1.0],
        y_plus: [1.0 / denom_plus, 1.0, 0.0, 0.0],
        y_minus: [1.0 / denom_minus, 1.0, 0.0, 0.0],
    })
}

/// Commutator [X+-, Y+-], which has only a d/dt component:
/// +- rho A'(rho) (u -+ rho A)^-2.
pub fn char_bracket(curve: &ProcessCurve, p: &Point, plus: bool) -> Result<Vec4> {
    let a = hyperbolic_a(curve, p.rho)?;
    let ap = curve.a_prime(p.rho)?;
    let sign = if plus { 1.0 } else { -1.0 };
    let denom = p.u - sign * p.rho * a;
    if denom == 0.0 {
        return Err(Error::singular("u = +-rho A on a bracket sample".to_string()));
    }
    Ok([sign * p.rho * ap / (denom * denom), 0.0, 0.0, 0.0])
}

/// Least-squares residual of `v` against span{b1, b2}, relative to |v| (or
/// absolute when |v| is tiny).
pub fn span_residual(v: &Vec4, b1: &Vec4, b2: &Vec4) -> f64 {
    let dot = |a: &Vec4, b: &Vec4| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let g11 = dot(b1, b1);
    let g12 = dot(b1, b2);
    let g22 = dot(b2, b2);
    let r1 = dot(b1, v);
    let r2 = dot(b2, v);
    let det = g11 * g22 - g12 * g12;
    if det.abs() < 1e-300 {
        return f64::INFINITY;
    }
    let c1 = (r1 * g22 - r2 * g12) / det;
    let c2 = (g11 * r2 - g12 * r1) / det;
    let mut norm2 = 0.0;
    let mut vnorm2 = 0.0;
    for i in 0..4 {
        let resid = v[i] - c1 * b1[i] - c2 * b2[i];
        norm2 += resid * resid;
        vnorm2 += v[i] * v[i];
    }
    (norm2 / vnorm2.max(1.0)).sqrt()
}

/// True when both characteristic distributions close under the Lie bracket
/// at every sample point (tolerance 1e-8 on the span residual).
pub fn distributions_integrable(curve: &ProcessCurve, points: &[Point]) -> Result<bool> {
    for p in points {
        let fields = char_fields(curve, p)?;
        for plus in [true, false] {
            let bracket = char_bracket(curve, p, plus)?;
            let (bx, by) = if plus {
                (fields.x_plus, fields.y_plus)
            } else {
                (fields.x_minus, fields.y_minus)
            };
            if span_residual(&bracket, &bx, &by) > 1e-8 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Characteristic field of the hypersurface {f = 0} inside the +- family
/// distribution, tangent to the hypersurface by construction, in the
/// (t, x, u, rho) coordinate order.
pub fn v_field(family: &SolutionFamily, p: &Point, plus: bool) -> Result<Vec4> {
    let a = hyperbolic_a(family.curve(), p.rho)?;
    let [a0, a1, a2, a3] = family.alpha();
    let _ = a0;
    let sign = if plus { 1.0 } else { -1.0 };
    // partials of f(t, u, rho) = a0 + a1 rho + a2 rho t - u (rho + a3)
    let f_t = a2 * p.rho;
    let f_x = 0.0;
    let f_u = -(p.rho + a3);
    let f_rho = a1 + a2 * p.t - p.u;
    let v_t = f_u * a + sign * f_rho;
    let v_x = (p.u * f_u - p.rho * f_rho) * a + sign * (p.u * f_rho - p.rho * a * a * f_u);
    let v_u = -a * (f_t + p.u * f_x - sign * p.rho * a * f_x);
    let v_rho = p.rho * a * f_x - sign * (f_t + p.u * f_x);
    Ok([v_t, v_x, v_u, v_rho])
}

/// Directional derivative of the defining function f along a vector (the
/// tangency residual of a would-be characteristic field).
pub fn v_applied_to_f(family: &SolutionFamily, p: &Point, v: &Vec4) -> f64 {
    let [_, a1, a2, a3] = family.alpha();
    let f_t = a2 * p.rho;
    let f_x = 0.0;
    let f_u = -(p.rho + a3);
    let f_rho = a1 + a2 * p.t - p.u;
    v[0] * f_t + v[1] * f_x + v[2] * f_u + v[3] * f_rho
}

/// Restrictions of the characteristic fields to the solved hypersurface, in
/// coordinates (t, x, rho).
pub fn z_field(family: &SolutionFamily, rho: f64, t: f64, plus: bool) -> Result<[f64; 3]> {
    let a = hyperbolic_a(family.curve(), rho)?;
    let [a0, a1, a2, a3] = family.alpha();
    let sign = if plus { 1.0 } else { -1.0 };
    let w = rho + a3;
    let z_t = (a * w * w - sign * a3 * (a1 + t * a2) + sign * a0) / (w * w);
    let z_rho = sign * a2 * rho / w;
    let u = family.velocity(rho, t)?;
    let z_x = z_t * (u - sign * rho * a);
    Ok([z_t, z_x, z_rho])
}

/// Result of the ansatz PDE check: largest residual of the second-order PDE
/// that the defining function f must satisfy, over the samples.
pub fn ansatz_pde_max_residual(family: &SolutionFamily, points: &[Point]) -> Result<f64> {
    ansatz_pde_residual_impl(family, points, false)
}

/// Negative control: the same PDE evaluated with f_rho shifted by +1 in a
/// single term. A correct implementation must report a large residual.
pub fn ansatz_pde_mutated_residual(family: &SolutionFamily, points: &[Point]) -> Result<f64> {
    ansatz_pde_residual_impl(family, points, true)
}

fn ansatz_pde_residual_impl(
    family: &SolutionFamily,
    points: &[Point],
    mutate: bool,
) -> Result<f64> {
    let [_, a1, a2, a3] = family.alpha();
    let mut worst = 0.0_f64;
    for p in points {
        let a = hyperbolic_a(family.curve(), p.rho)?;
        let a_sq = a * a;
        let rho = p.rho;
        let f_t = a2 * rho;
        let f_u = -(rho + a3);
        let f_rho = a1 + a2 * p.t - p.u;
        let f_rho_bumped = if mutate { f_rho + 1.0 } else { f_rho };
        let (f_tt, f_uu, f_ut, f_rho_rho) = (0.0, 0.0, 0.0, 0.0);
        let f_rho_t = a2;
        let residual = -2.0 * rho * a_sq * f_u * f_t * f_ut
            - rho * f_rho * f_rho * f_tt
            - rho * f_t * f_t * f_rho_rho
            + rho * a_sq * (f_u * f_u * f_tt + f_t * f_t * f_uu)
            + 2.0 * rho * f_rho_bumped * f_t * f_rho_t
            - 2.0 * f_rho * f_t * f_t;
        worst = worst.max(residual.abs());
    }
    Ok(worst)
}

/// Maximum pullback coefficient of both defining forms on the solution
/// surface (t, g(rho,t), U(rho,t), rho), normalized by the local form and
/// tangent magnitudes. Samples where |dg/drho| falls below `caustic_cut`
/// are skipped (the projected tangent degenerates there).
pub fn pullback_max_residual(
    family: &SolutionFamily,
    samples: &[(f64, f64)],
    caustic_cut: f64,
) -> Result<f64> {
    pullback_residual_impl(family, samples, caustic_cut, 0.0)
}

/// Negative control for the pullback check: evaluates the pullbacks on the
/// mutated surface x = g + bump * rho, which no longer solves the system.
pub fn pullback_mutated_residual(
    family: &SolutionFamily,
    samples: &[(f64, f64)],
    caustic_cut: f64,
    bump: f64,
) -> Result<f64> {
    pullback_residual_impl(family, samples, caustic_cut, bump)
}

fn pullback_residual_impl(
    family: &SolutionFamily,
    samples: &[(f64, f64)],
    caustic_cut: f64,
    bump: f64,
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &(rho, t) in samples {
        let g_rho = family.g_rho(rho, t)?;
        if g_rho.abs() < caustic_cut {
            continue;
        }
        let point = Point {
            t,
            x: family.g(rho, t)? + bump * rho,
            u: family.velocity(rho, t)?,
            rho,
        };
        let (w1, w2) = normalized_forms(family.curve(), &point)?;
        let tangent_t = [
            1.0,
            family.g_t(rho, t)?,
            family.velocity_t(rho, t)?,
            0.0,
        ];
        let tangent_rho = [0.0, g_rho + bump, family.velocity_rho(rho, t)?, 1.0];
        let scale = (1.0 + w1.max_abs().max(w2.max_abs()))
            * (1.0 + norm4(&tangent_t).max(norm4(&tangent_rho)));
        let r1 = w1.eval(&tangent_t, &tangent_rho).abs();
        let r2 = w2.eval(&tangent_t, &tangent_rho).abs();
        worst = worst.max(r1.max(r2) / scale);
    }
    Ok(worst)
}

fn norm4(v: &Vec4) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Deterministic sample points: t, x in [-5, 5], u in [-3, 3],
/// rho in [0.2, 5] intersected with the curve domain, rejecting
/// non-hyperbolic draws and degenerate characteristic denominators.
pub fn sample_points(curve: &ProcessCurve, seed: u64, count: usize) -> Result<Vec<Point>> {
    let dom = curve.domain();
    let rho_lo = dom.lo.max(0.2);
    let rho_hi = dom.hi.min(5.0);
    if !(rho_lo < rho_hi) {
        return Err(Error::domain(
            "curve domain does not meet the sampling range rho in [0.2, 5]".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while points.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::numeric(
                "failed to sample enough hyperbolic points".to_string(),
            ));
        }
        let p = Point {
            t: rng.gen_range(-5.0..5.0),
            x: rng.gen_range(-5.0..5.0),
            u: rng.gen_range(-3.0..3.0),
            rho: rng.gen_range(rho_lo..rho_hi),
        };
        let a = match curve.a_coeff(p.rho) {
            Ok(a) => a,
            Err(_) => continue,
        };
        // keep Y+- well-conditioned
        if (p.u - p.rho * a).abs() < 0.05 || (p.u + p.rho * a).abs() < 0.05 {
            continue;
        }
        points.push(p);
    }
    Ok(points)
}

/// Surface samples (rho, t) for the pullback checks, drawn from the same
/// deterministic generator.
pub fn sample_surface(curve: &ProcessCurve, seed: u64, count: usize) -> Result<Vec<(f64, f64)>> {
    let points = sample_points(curve, seed, count)?;
    Ok(points.into_iter().map(|p| (p.rho, p.t)).collect())
}

// 4x4 helpers

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat_transpose(a: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn mat_identity() -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    out
}

pub fn mat_max_abs_diff(a: &Mat4, b: &Mat4) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((a[i][j] - b[i][j]).abs());
        }
    }
    worst
}

/// Solve A X = B by Gaussian elimination with partial pivoting.
pub fn solve4(a: &Mat4, b: &Mat4) -> Option<Mat4> {
    let mut aug = [[0.0; 8]; 4];
    for i in 0..4 {
        aug[i][..4].copy_from_slice(&a[i]);
        aug[i][4..].copy_from_slice(&b[i]);
    }
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| {
            aug[i][col]
                .abs()
                .partial_cmp(&aug[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if aug[pivot][col].abs() < 1e-300 {
            return None;
        }
        aug.swap(col, pivot);
        let inv = 1.0 / aug[col][col];
        for j in col..8 {
            aug[col][j] *= inv;
        }
        for row in 0..4 {
            if row != col {
                let factor = aug[row][col];
                for j in col..8 {
                    aug[row][j] -= factor * aug[col][j];
                }
            }
        }
    }
    let mut x = [[0.0; 4]; 4];
    for i in 0..4 {
        x[i].copy_from_slice(&aug[i][4..]);
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use crate::thermo::PotentialModel;

    fn ideal_curve() -> ProcessCurve {
        let model = PotentialModel::ideal_gas(3.0, 0.6).unwrap();
        ProcessCurve::adiabatic(&model, 0.0, Interval::new(1e-3, 1e3).unwrap()).unwrap()
    }

    fn reference_family() -> SolutionFamily {
        SolutionFamily::new([0.0, 0.0, 1.0, 1.0], ideal_curve()).unwrap()
    }

    fn cubic_curve() -> ProcessCurve {
        ProcessCurve::barotropic_with_derivatives(
            |r| 2.0 * r * r * r + 5.0,
            |r| 6.0 * r * r,
            |r| 12.0 * r,
            Interval::new(0.2, 5.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn sampling_is_deterministic() {
        let curve = ideal_curve();
        let a = sample_points(&curve, 7, 25).unwrap();
        let b = sample_points(&curve, 7, 25).unwrap();
        assert_eq!(a, b);
        let c = sample_points(&curve, 8, 25).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn normalization_relations_hold() {
        let curve = ideal_curve();
        for p in sample_points(&curve, 1, 100).unwrap() {
            let (w1, w2) = normalized_forms(&curve, &p).unwrap();
            let scale = w1.max_abs().max(w2.max_abs()).powi(2).max(1.0);
            assert!(w1.wedge_pairing(&w2).abs() < 1e-12 * scale);
            assert!((w1.wedge_pairing(&w1) + w2.wedge_pairing(&w2)).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn raw_pairing_matrix_is_diagonal() {
        let curve = ideal_curve();
        for p in sample_points(&curve, 2, 50).unwrap() {
            let (w1, w2) = raw_forms(&curve, &p).unwrap();
            let dp = curve.dp_drho(p.rho).unwrap();
            let p11 = w1.wedge_pairing(&w1);
            let p12 = w1.wedge_pairing(&w2);
            let p22 = w2.wedge_pairing(&w2);
            assert!((p11 - 2.0 * p.rho).abs() < 1e-13 * p.rho);
            assert!(p12.abs() < 1e-13 * (1.0 + p.u.abs()));
            assert!((p22 + 2.0 * dp / p.rho).abs() < 1e-12 * (dp / p.rho).abs());
            // det P = -4 p'
            let det = p11 * p22 - p12 * p12;
            assert!((det + 4.0 * dp).abs() < 1e-12 * (4.0 * dp).abs());
        }
    }

    #[test]
    fn second_form_drops_a_term_at_rest() {
        let curve = ideal_curve();
        let p = Point {
            t: 0.3,
            x: -1.0,
            u: 0.0,
            rho: 1.7,
        };
        let (_, w2) = normalized_forms(&curve, &p).unwrap();
        assert_eq!(w2.coeff(0, 2), 0.0); // u dt^du term gone
        assert!(w2.coeff(0, 3) > 0.0);
        assert_eq!(w2.coeff(1, 2), -1.0);
    }

    #[test]
    fn operator_is_an_involution_with_zero_trace() {
        let curve = ideal_curve();
        for p in sample_points(&curve, 3, 100).unwrap() {
            let w = operator_w(&curve, &p).unwrap();
            assert!(mat_max_abs_diff(&w.squared(), &mat_identity()) < 1e-12);
            assert!(w.trace().abs() < 1e-13);
        }
    }

    #[test]
    fn closed_form_matches_contraction_definition() {
        let curve = ideal_curve();
        for p in sample_points(&curve, 4, 100).unwrap() {
            let closed = operator_w(&curve, &p).unwrap();
            let contracted = operator_w_from_contraction(&curve, &p).unwrap();
            let scale = closed
                .matrix_canonical()
                .iter()
                .flatten()
                .fold(0.0_f64, |m, c| m.max(c.abs()));
            assert!(
                mat_max_abs_diff(&closed.matrix_canonical(), &contracted.matrix_canonical())
                    < 1e-12 * scale.max(1.0)
            );
        }
    }

    #[test]
    fn characteristic_fields_are_eigenvectors() {
        let curve = ideal_curve();
        for p in sample_points(&curve, 5, 100).unwrap() {
            let w = operator_w(&curve, &p).unwrap();
            let f = char_fields(&curve, &p).unwrap();
            for (v, sign) in [
                (f.x_plus, 1.0),
                (f.y_plus, 1.0),
                (f.x_minus, -1.0),
                (f.y_minus, -1.0),
            ] {
                let wv = w.apply(&v);
                for i in 0..4 {
                    assert!(
                        (wv[i] - sign * v[i]).abs() < 1e-12 * norm4(&v),
                        "eigen residual at {p:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn eigenprojectors_span_the_characteristic_distributions() {
        // W^2 = id makes (id +- W)/2 the eigenprojectors; their ranges must
        // coincide with span{X+-, Y+-}. Verified through projection
        // residuals of the projector columns.
        let curve = ideal_curve();
        for p in sample_points(&curve, 6, 50).unwrap() {
            let w = operator_w(&curve, &p).unwrap();
            let f = char_fields(&curve, &p).unwrap();
            for (sign, bx, by) in [(1.0, f.x_plus, f.y_plus), (-1.0, f.x_minus, f.y_minus)] {
                let m = w.matrix_canonical();
                let mut rank_cols = 0;
                for col in 0..4 {
                    let mut v = [0.0; 4];
                    for i in 0..4 {
                        v[i] = 0.5 * (mat_identity()[i][col] + sign * m[i][col]);
                    }
                    let n = norm4(&v);
                    if n > 1e-8 {
                        rank_cols += 1;
                        assert!(
                            span_residual(&v, &bx, &by) < 1e-10,
                            "projector column outside the distribution"
                        );
                    }
                }
                assert!(rank_cols >= 2, "eigenvalue must have multiplicity 2");
            }
        }
    }

    #[test]
    fn generators_are_independent() {
        let curve = ideal_curve();
        for p in sample_points(&curve, 7, 30).unwrap() {
            let f = char_fields(&curve, &p).unwrap();
            let dot = |a: &Vec4, b: &Vec4| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
            let gram = dot(&f.x_plus, &f.x_plus) * dot(&f.y_plus, &f.y_plus)
                - dot(&f.x_plus, &f.y_plus).powi(2);
            assert!(gram > 1e-12);
        }
    }

    #[test]
    fn bracket_test_matches_cubic_pressure_criterion() {
        let cubic = cubic_curve();
        let pts = sample_points(&cubic, 11, 40).unwrap();
        assert!(distributions_integrable(&cubic, &pts).unwrap());
        assert!(cubic.is_characteristically_integrable(1e-10).unwrap());

        let ideal = ideal_curve();
        let pts = sample_points(&ideal, 11, 40).unwrap();
        assert!(!distributions_integrable(&ideal, &pts).unwrap());
        assert!(!ideal.is_characteristically_integrable(1e-8).unwrap());
    }

    #[test]
    fn ansatz_solves_the_pde() {
        let fam = reference_family();
        let pts = sample_points(fam.curve(), 12, 100).unwrap();
        let resid = ansatz_pde_max_residual(&fam, &pts).unwrap();
        assert!(resid < 1e-9, "max residual {resid}");
        // mutation must break the cancellation
        let mutated = ansatz_pde_mutated_residual(&fam, &pts).unwrap();
        assert!(mutated > 1e-3, "mutated residual {mutated}");
    }

    #[test]
    fn time_independent_ansatz_residual_is_exactly_zero() {
        // alpha1 = alpha2 = 0 makes f_t = 0 and every PDE term vanish.
        let fam = SolutionFamily::new([0.7, 0.0, 0.0, 1.0], ideal_curve()).unwrap();
        let pts = sample_points(fam.curve(), 13, 20).unwrap();
        assert_eq!(ansatz_pde_max_residual(&fam, &pts).unwrap(), 0.0);
    }

    #[test]
    fn solution_annihilates_both_forms() {
        let fam = reference_family();
        let samples = sample_surface(fam.curve(), 14, 100).unwrap();
        let resid = pullback_max_residual(&fam, &samples, 1e-3).unwrap();
        assert!(resid < 1e-8, "pullback residual {resid}");
        let broken = pullback_mutated_residual(&fam, &samples, 1e-3, 0.01).unwrap();
        assert!(broken > 1e-4, "mutated pullback {broken}");
    }

    #[test]
    fn constant_graph_annihilates_both_forms() {
        // The graph (t, x) -> (u0, rho0) has tangents d/dt, d/dx; neither
        // form has a dt^dx component, so the pullbacks vanish identically.
        let curve = ideal_curve();
        let p = Point {
            t: 0.0,
            x: 0.0,
            u: 0.4,
            rho: 1.3,
        };
        let (w1, w2) = normalized_forms(&curve, &p).unwrap();
        let tangent_t = [1.0, 0.0, 0.0, 0.0];
        let tangent_x = [0.0, 1.0, 0.0, 0.0];
        assert_eq!(w1.eval(&tangent_t, &tangent_x), 0.0);
        assert_eq!(w2.eval(&tangent_t, &tangent_x), 0.0);
    }

    #[test]
    fn v_fields_are_tangent_and_characteristic() {
        let fam = reference_family();
        for p in sample_points(fam.curve(), 15, 60).unwrap() {
            let f = char_fields(fam.curve(), &p).unwrap();
            for plus in [true, false] {
                let v = v_field(&fam, &p, plus).unwrap();
                let tangency = v_applied_to_f(&fam, &p, &v);
                let scale = norm4(&v).max(1.0) * (1.0 + p.rho + p.u.abs());
                assert!(
                    tangency.abs() < 1e-12 * scale,
                    "V(f) = {tangency} at {p:?}"
                );
                let (bx, by) = if plus {
                    (f.x_plus, f.y_plus)
                } else {
                    (f.x_minus, f.y_minus)
                };
                assert!(span_residual(&v, &bx, &by) < 1e-10);
            }
        }
    }

    #[test]
    fn z_fields_are_projected_v_fields() {
        // On the surface u = U(rho, t) the restriction Z+- must be
        // proportional to the (t, x, rho) components of V+-.
        let fam = reference_family();
        for &(rho, t) in &[(0.4, 0.5), (1.1, 2.0), (2.7, -1.2)] {
            let u = fam.velocity(rho, t).unwrap();
            let p = Point {
                t,
                x: fam.g(rho, t).unwrap(),
                u,
                rho,
            };
            for plus in [true, false] {
                let v = v_field(&fam, &p, plus).unwrap();
                let z = z_field(&fam, rho, t, plus).unwrap();
                let v3 = [v[0], v[1], v[3]]; // (t, x, rho) components
                                             // cross products vanish iff proportional
                for i in 0..3 {
                    for j in (i + 1)..3 {
                        let cross = v3[i] * z[j] - v3[j] * z[i];
                        let scale = norm4(&v).max(1.0) * (1.0 + z.iter().fold(0.0_f64, |m, c| m.max(c.abs())));
                        assert!(
                            cross.abs() < 1e-11 * scale,
                            "Z not parallel to projected V at rho={rho}, t={t}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn non_hyperbolic_points_are_rejected() {
        let curve = ProcessCurve::barotropic_with_derivatives(
            |r| -r,
            |_| -1.0,
            |_| 0.0,
            Interval::new(0.2, 5.0).unwrap(),
        )
        .unwrap();
        let p = Point {
            t: 0.0,
            x: 0.0,
            u: 1.0,
            rho: 1.0,
        };
        assert!(normalized_forms(&curve, &p).is_err());
        assert!(operator_w(&curve, &p).is_err());
    }
}
