//! Scalar root finding and 1-D minimization helpers.
//!
//! Everything here is bracket-based: callers supply an interval with a sign
//! change (or a scan grid that locates one) and get back a polished root.

use crate::error::{Error, Result};

/// Bisect `f` on a sign-change bracket `[a, b]` down to a relative width of
/// `tol`, then polish with Newton steps using `df` when provided.
///
/// The Newton iterate is rejected whenever it leaves the current bracket, so
/// the result can never escape `[a, b]`.
pub fn bisect_polish<F, D>(
    f: F,
    df: Option<D>,
    a: f64,
    b: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (a, b);
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::numeric(format!(
            "no sign change on bracket [{lo}, {hi}]"
        )));
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..max_iter {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }

        // Prefer a Newton step once the bracket is reasonably tight.
        let mut next = 0.5 * (lo + hi);
        if let Some(ref d) = df {
            let slope = d(x);
            if slope != 0.0 {
                let newton = x - fx / slope;
                if newton > lo && newton < hi {
                    next = newton;
                }
            }
        }

        let scale = x.abs().max(1.0);
        if (next - x).abs() < tol * scale || hi - lo < tol * scale {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Scan `grid` for sign changes of `f` and polish each bracketed root.
///
/// `refine` subdivides every sign-change cell once before polishing, which
/// catches pairs of close roots that straddle a single grid cell.
pub fn scan_roots<F, D>(f: F, df: Option<D>, grid: &[f64], tol: f64, refine: usize) -> Vec<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64 + Copy,
{
    let mut roots = Vec::new();
    if grid.len() < 2 {
        return roots;
    }
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    // Exact zeros at grid nodes count once, here. Note signum(+0.0) = 1.0,
    // so zeros must be kept out of the sign-change logic below.
    for i in 0..grid.len() {
        if values[i] == 0.0 {
            roots.push(grid[i]);
        }
    }
    for i in 0..grid.len() - 1 {
        let (a, b) = (grid[i], grid[i + 1]);
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 || fb == 0.0 {
            continue;
        }
        if fa.signum() * fb.signum() < 0.0 {
            // One refinement pass over the sign-change cell.
            let n = refine.max(1);
            let mut xs = a;
            let mut fs = fa;
            for k in 1..=n {
                let xe = if k == n {
                    b
                } else {
                    a + (b - a) * k as f64 / n as f64
                };
                let fe = if k == n { fb } else { f(xe) };
                if fe == 0.0 {
                    roots.push(xe);
                } else if fs != 0.0 && fs.signum() * fe.signum() < 0.0 {
                    if let Ok(r) = bisect_polish(&f, df, xs, xe, tol, 128) {
                        roots.push(r);
                    }
                }
                xs = xe;
                fs = fe;
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

/// Golden-section minimization of `f` on `[a, b]`.
///
/// Returns the abscissa of the minimum; accuracy `tol` relative to the
/// magnitude of the abscissa.
pub fn golden_min<F>(f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        if hi - lo < tol * lo.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Expand a bracket `[x / factor^k, x * factor^k]` until `f` changes sign,
/// for monotone increasing `f` on positive arguments.
pub fn expand_bracket_monotone<F>(f: F, start: f64, max_expansions: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let mut lo = start;
    let mut hi = start;
    let mut f_lo = f(lo);
    let mut f_hi = f_lo;
    for _ in 0..max_expansions {
        if f_lo <= 0.0 && f_hi >= 0.0 {
            return Ok((lo, hi));
        }
        if f_lo > 0.0 {
            lo *= 0.25;
            f_lo = f(lo);
        }
        if f_hi < 0.0 {
            hi *= 4.0;
            f_hi = f(hi);
        }
    }
    Err(Error::numeric(
        "failed to bracket a root by geometric expansion".to_string(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_polish_finds_sqrt2() {
        let r = bisect_polish(
            |x| x * x - 2.0,
            Some(|x: f64| 2.0 * x),
            0.0,
            2.0,
            1e-14,
            100,
        )
        .unwrap();
        assert!((r - 2.0_f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn scan_finds_all_three_cubic_roots() {
        // x^3 - x = x (x-1)(x+1)
        let grid: Vec<f64> = (0..200).map(|i| -2.0 + 4.0 * i as f64 / 199.0).collect();
        let roots = scan_roots(
            |x| x * x * x - x,
            Some(|x: f64| 3.0 * x * x - 1.0),
            &grid,
            1e-13,
            8,
        );
        assert_eq!(roots.len(), 3);
        assert!((roots[0] + 1.0).abs() < 1e-12);
        assert!(roots[1].abs() < 1e-12);
        assert!((roots[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_min_parabola() {
        let x = golden_min(|x| (x - 1.3) * (x - 1.3), 0.0, 4.0, 1e-12, 200);
        assert!((x - 1.3).abs() < 1e-9);
    }

    #[test]
    fn bracket_expansion_covers_root() {
        let (lo, hi) = expand_bracket_monotone(|x| x.ln(), 8.0, 60).unwrap();
        assert!(lo <= 1.0 && 1.0 <= hi);
    }
}
