//! Adaptive quadrature.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature did not converge on [{a}, {b}] (requested tol {tol})")]
    NonConvergence { a: f64, b: f64, tol: f64 },
    #[error("integrand returned a non-finite value near x = {x}")]
    NonFinite { x: f64 },
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64, QuadError> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    for (x, v) in [(a, fa), (m, fm), (b, fb)] {
        if !v.is_finite() {
            return Err(QuadError::NonFinite { x });
        }
    }
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60).ok_or(QuadError::NonConvergence { a, b, tol })
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    if !flm.is_finite() || !frm.is_finite() {
        return None;
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 {
        return None;
    }
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    let l = simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Some(l + r)
}

/// Integral of `f` over `[a, b]` splitting into `chunks` panels first; keeps
/// the adaptive recursion shallow for oscillatory or peaked integrands.
pub fn panel_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    chunks: usize,
    tol: f64,
) -> Result<f64, QuadError> {
    let h = (b - a) / chunks as f64;
    let mut total = 0.0;
    for i in 0..chunks {
        let x0 = a + i as f64 * h;
        total += adaptive_simpson(f, x0, x0 + h, tol / chunks as f64)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn integrates_polynomial_exactly() {
        let v = adaptive_simpson(&|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 1e-12).unwrap();
        // antiderivative x^4/4 - x^2 + x
        assert_abs_diff_eq!(v, 15.0 / 4.0 - 3.0 + 3.0, epsilon = 1e-10);
    }

    #[test]
    fn integrates_gaussian() {
        let v = adaptive_simpson(&|x: f64| (-x * x).exp(), -8.0, 8.0, 1e-12).unwrap();
        assert_abs_diff_eq!(v, std::f64::consts::PI.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn oscillatory_with_panels() {
        let v = panel_simpson(&|x: f64| (10.0 * x).cos(), 0.0, 3.0, 16, 1e-12).unwrap();
        assert_abs_diff_eq!(v, (30.0f64).sin() / 10.0, epsilon = 1e-9);
    }

    #[test]
    fn rejects_non_finite() {
        let r = adaptive_simpson(&|x: f64| 1.0 / x, -1.0, 1.0, 1e-10);
        assert!(r.is_err());
    }
}
