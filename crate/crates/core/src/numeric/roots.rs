use crate::error::{Error, Result};

/// Brent's method on a bracketing interval `[a, b]`.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::numerical("root not bracketed", fa.abs().min(fb.abs())));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
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
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b);
    }
    Err(Error::numerical("brent did not converge", fb.abs()))
}

/// Find `x >= lo` with `f(x) = target` for increasing `f`, expanding the
/// upper bracket geometrically. Returns `None` when `f(lo) > target`.
pub fn solve_increasing<F: FnMut(f64) -> f64>(
    mut f: F,
    target: f64,
    lo: f64,
    initial_hi: f64,
    tol: f64,
) -> Result<Option<f64>> {
    let f_lo = f(lo) - target;
    if f_lo > 0.0 {
        return Ok(None);
    }
    if f_lo == 0.0 {
        return Ok(Some(lo));
    }
    let mut hi = initial_hi.max(lo + 1e-6);
    let mut tries = 0;
    while f(hi) - target < 0.0 {
        hi = lo + 2.0 * (hi - lo);
        tries += 1;
        if tries > 200 {
            return Err(Error::numerical("could not bracket level", hi));
        }
    }
    brent(|x| f(x) - target, lo, hi, tol).map(Some)
}
