//! Bracketing scalar root finder (Brent's method).

use crate::error::NumericsError;

pub const DEFAULT_ROOT_TOL: f64 = 1e-9;

/// Finds x in [lo, hi] with |f(x)| <= tol or bracket width <= tol.
/// Requires a sign change over the bracket (either endpoint root accepted).
pub fn find_root_bounded<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, NumericsError> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(NumericsError::NoBracket {
            lo,
            hi,
            flo: fa,
            fhi: fb,
        });
    }
    // Brent: b tracks the best iterate, a the previous one, c the counterpoint.
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = b - a;
    for _ in 0..200 {
        if fb.abs() > fc.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 || fb.abs() <= tol {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic / secant step
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 {
            d
        } else {
            tol1.copysign(xm)
        };
        fb = f(b);
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_root() {
        let x = find_root_bounded(|x| x - 2.0, 0.0, 5.0, 1e-9).unwrap();
        assert_abs_diff_eq!(x, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn sqrt_two() {
        let x = find_root_bounded(|x| x * x - 2.0, 0.0, 2.0, 1e-9).unwrap();
        assert_abs_diff_eq!(x, std::f64::consts::SQRT_2, epsilon = 1e-8);
    }

    #[test]
    fn cosine_root() {
        let x = find_root_bounded(f64::cos, 0.0, 2.0, 1e-9).unwrap();
        assert_abs_diff_eq!(x, std::f64::consts::FRAC_PI_2, epsilon = 1e-8);
    }

    #[test]
    fn missing_bracket_is_reported() {
        assert!(find_root_bounded(|x| x * x + 1.0, -1.0, 1.0, 1e-9).is_err());
    }
}
