//! Adaptive Simpson quadrature.
//!
//! Used for the antiderivatives I and J of the solution family whenever the
//! characteristic coefficient A(rho) is not a plain power law, and for the
//! equal-area loop integral in the singularity module.

use crate::error::{Error, Result};

/// Antiderivative of `x^k` without integration constant:
/// `x^(k+1)/(k+1)`, or `ln x` on the logarithmic branch `k = -1`.
pub fn power_antiderivative(x: f64, k: f64) -> f64 {
    if (k + 1.0).abs() < 1e-12 {
        x.ln()
    } else {
        x.powf(k + 1.0) / (k + 1.0)
    }
}

/// Integrate `f` over `[a, b]` with adaptive Simpson subdivision.
///
/// `rel_tol` is measured against the accumulated integral magnitude (with a
/// floor of 1e-300 so an integral that is genuinely zero still converges).
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let fa = f(lo);
    let fm = f(0.5 * (lo + hi));
    let fb = f(hi);
    if !(fa.is_finite() && fm.is_finite() && fb.is_finite()) {
        return Err(Error::numeric(format!(
            "integrand not finite on [{lo}, {hi}]"
        )));
    }
    let whole = simpson(lo, hi, fa, fm, fb);
    let abs_tol = rel_tol * whole.abs().max(1e-300);
    let value = adapt(&f, lo, hi, fa, fm, fb, whole, abs_tol, 60)?;
    Ok(sign * value)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    depth: usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    if !(flm.is_finite() && frm.is_finite()) {
        return Err(Error::numeric(format!(
            "integrand not finite near [{a}, {b}]"
        )));
    }
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * abs_tol || b - a < 1e-15 * (a.abs() + b.abs()).max(1.0) {
        // Richardson correction of the composite estimate.
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(Error::numeric(
            "adaptive quadrature failed to converge (recursion limit)".to_string(),
        ));
    }
    let l = adapt(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, depth - 1)?;
    let r = adapt(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, depth - 1)?;
    Ok(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_antiderivative_log_branch() {
        assert!((power_antiderivative(2.0, -1.0) - 2.0_f64.ln()).abs() < 1e-15);
        assert!((power_antiderivative(2.0, 1.0) - 2.0).abs() < 1e-15);
        // within float tolerance of the log branch
        assert!((power_antiderivative(3.0, -1.0 + 1e-14) - 3.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn integrates_polynomial_exactly() {
        // Simpson is exact on cubics.
        let v = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 0.0).abs() < 1e-13);
    }

    #[test]
    fn integrates_steep_power() {
        // rho^(-4/3) on [1e-3, 1]: exact value 3 (1e-3^(-1/3) - 1) = 27.0
        let v = integrate(|x: f64| x.powf(-4.0 / 3.0), 1e-3, 1.0, 1e-12).unwrap();
        let exact = 3.0 * (1e-3_f64.powf(-1.0 / 3.0) - 1.0);
        assert!((v - exact).abs() < 1e-9 * exact.abs());
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let forward = integrate(|x: f64| x.sin(), 0.0, 1.0, 1e-12).unwrap();
        let backward = integrate(|x: f64| x.sin(), 1.0, 0.0, 1e-12).unwrap();
        assert!((forward + backward).abs() < 1e-14);
    }
}
