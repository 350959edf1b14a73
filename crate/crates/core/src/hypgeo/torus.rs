//! One-holed torus identities and the once-intersecting pair integral.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{brent, integrate, QuadConfig};

/// Fenchel–Nielsen data of a one-holed torus: boundary `x`, cut curve
/// length `l`, twist `theta`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TorusModel {
    pub x: f64,
    pub l: f64,
    pub theta: f64,
}

impl TorusModel {
    pub fn new(x: f64, l: f64, theta: f64) -> Result<Self> {
        if !(x > 0.0 && l > 0.0 && theta.is_finite()) {
            return Err(Error::domain("torus needs x, l > 0 and a finite twist"));
        }
        Ok(TorusModel { x, l, theta })
    }

    pub fn identities(&self) -> Result<(f64, f64)> {
        torus_identities(self.x, self.l, self.theta)
    }
}

/// Orthogeodesic `p` between the two copies of the cut curve and length `r`
/// of the dual curve:
/// `cosh p = (cosh(x/2) + cosh^2(l/2)) / sinh^2(l/2)`,
/// `cosh(r/2) = cosh(theta/2) cosh(p/2)`.
pub fn torus_identities(x: f64, l: f64, theta: f64) -> Result<(f64, f64)> {
    if !(l > 0.0) || !(x >= 0.0) {
        return Err(Error::domain("torus identities need x >= 0 and l > 0"));
    }
    let s2 = (0.5 * l).sinh().powi(2);
    let cosh_p = ((0.5 * x).cosh() + (0.5 * l).cosh().powi(2)) / s2;
    if !(cosh_p >= 1.0) {
        return Err(Error::Geometry(format!("cosh p = {cosh_p} below 1")));
    }
    let p = cosh_p.acosh();
    let r = 2.0 * ((0.5 * theta).cosh() * (0.5 * p).cosh()).acosh();
    Ok((p, r))
}

/// Inverts the identities: `(x, |theta|)` from `(l, p, r)`.
pub fn torus_from_lengths(l: f64, p: f64, r: f64) -> Result<(f64, f64)> {
    let cosh_x2 = p.cosh() * (0.5 * l).sinh().powi(2) - (0.5 * l).cosh().powi(2);
    let cosh_t2 = (0.5 * r).cosh() / (0.5 * p).cosh();
    if !(cosh_x2 >= 1.0 && cosh_t2 >= 1.0) {
        return Err(Error::Geometry("lengths outside the torus chart".into()));
    }
    Ok((2.0 * cosh_x2.acosh(), 2.0 * cosh_t2.acosh()))
}

#[derive(Debug, Clone, Serialize)]
pub struct JKappa {
    pub l: f64,
    pub kappa: f64,
    pub closed_form: f64,
    pub direct: f64,
    pub direct_error: f64,
    pub evals: usize,
}

impl JKappa {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.closed_form.abs().max(self.direct.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.closed_form - self.direct).abs() / scale
        }
    }
}

/// `int_{P0}^{K} sqrt(R^2 - P0^2) dR` with `P0 = coth(l/2)`, `K = cosh(kappa/2)`.
fn area(p0: f64, k: f64) -> f64 {
    if k <= p0 {
        return 0.0;
    }
    let s = ((k - p0) * (k + p0)).sqrt();
    0.5 * k * s - 0.5 * p0 * p0 * (k / p0).acosh()
}

fn coth_half(l: f64) -> f64 {
    // 1 + 2 / (e^l - 1), exact near the limit
    1.0 + 2.0 / l.exp_m1()
}

/// `J_kappa(l) = int_0^inf int_R sinh(x/2) 1[r(x, l, theta) <= kappa] dtheta dx`
/// in closed form. With `R = cosh(r/2)`, `P = cosh(p/2)` the measure becomes
/// `16 sinh^2(l/2) dR dP / sqrt((R/P)^2 - 1)` on `theta >= 0`; the twist is
/// integrated over both signs, hence the factor 32.
pub fn j_kappa_closed(l: f64, kappa: f64) -> Result<f64> {
    check(l, kappa)?;
    let k = (0.5 * kappa).cosh();
    Ok(32.0 * (0.5 * l).sinh().powi(2) * area(coth_half(l), k))
}

/// `lim_{l -> inf} J_kappa(l) / (16 sinh^2(l/2))`.
pub fn j_kappa_normalized_limit(kappa: f64) -> f64 {
    2.0 * area(1.0, (0.5 * kappa).cosh())
}

/// `J_kappa(l) / (16 sinh^2(l/2)) - limit`, without forming the large product.
pub fn j_kappa_normalized_gap(l: f64, kappa: f64) -> Result<f64> {
    check(l, kappa)?;
    let k = (0.5 * kappa).cosh();
    // area(P0) - area(1) = -int_1^{P0} P arccosh(K/P) dP, P0 = 1 + eps
    let p0 = coth_half(l);
    if p0 >= k {
        return Ok(-j_kappa_normalized_limit(kappa));
    }
    let cfg = QuadConfig::with_tol(1e-300, 1e-13);
    let d = integrate(|p| p * (k / p).acosh(), 1.0, p0, &cfg)?;
    Ok(-2.0 * d.value)
}

fn check(l: f64, kappa: f64) -> Result<()> {
    if !(l > 0.0 && kappa > 0.0) || !l.is_finite() || !kappa.is_finite() {
        return Err(Error::domain("J_kappa needs l > 0 and kappa > 0"));
    }
    Ok(())
}

/// The same integral by nested quadrature in `(x, theta)`, locating the
/// boundary of `{r <= kappa}` by root finding on the forward identities.
pub fn j_kappa_direct(l: f64, kappa: f64, cfg: &QuadConfig) -> Result<(f64, f64, usize)> {
    check(l, kappa)?;
    let r_of = |x: f64, theta: f64| -> f64 {
        torus_identities(x, l, theta).map(|(_, r)| r).unwrap_or(f64::INFINITY)
    };
    // untwisted length increases with x; nothing qualifies when even x = 0 fails
    if r_of(0.0, 0.0) > kappa {
        return Ok((0.0, 0.0, 0));
    }
    let mut hi = 1.0;
    while r_of(hi, 0.0) <= kappa {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::numerical("x range of the indicator did not close", hi));
        }
    }
    let x_max = brent(|x| r_of(x, 0.0) - kappa, 0.0, hi, 1e-15)?;
    // the twist window at fixed x is symmetric; its half-width solves r = kappa
    let half_width = |x: f64| -> f64 {
        if r_of(x, 0.0) >= kappa {
            return 0.0;
        }
        let mut t = 1.0;
        while r_of(x, t) <= kappa {
            t *= 2.0;
        }
        brent(|th| r_of(x, th) - kappa, 0.0, t, 1e-15).unwrap_or(0.0)
    };
    let res = integrate(|x| (0.5 * x).sinh() * 2.0 * half_width(x), 0.0, x_max, cfg)?;
    Ok((res.value, res.error, res.evals))
}

/// Both representations side by side.
pub fn j_kappa(l: f64, kappa: f64) -> Result<JKappa> {
    let closed_form = j_kappa_closed(l, kappa)?;
    let cfg = QuadConfig::with_tol(1e-300, 1e-10);
    let (direct, direct_error, evals) = j_kappa_direct(l, kappa, &cfg)?;
    Ok(JKappa {
        l,
        kappa,
        closed_form,
        direct,
        direct_error,
        evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_twist_gives_r_equal_p() {
        let (p, r) = torus_identities(1.3, 2.0, 0.0).unwrap();
        assert!((p - r).abs() < 1e-12);
    }

    #[test]
    fn r_grows_with_twist() {
        let mut last = 0.0;
        for i in 0..10 {
            let (_, r) = torus_identities(1.0, 1.5, i as f64 * 0.3).unwrap();
            assert!(r > last);
            last = r;
        }
    }

    #[test]
    fn identities_round_trip() {
        let (x, l, th) = (2.3, 1.7, 0.9);
        let (p, r) = torus_identities(x, l, th).unwrap();
        let (x2, th2) = torus_from_lengths(l, p, r).unwrap();
        assert!((x - x2).abs() < 1e-10 && (th - th2).abs() < 1e-10);
    }

    #[test]
    fn empty_domain() {
        assert_eq!(j_kappa_closed(1.0, 0.1).unwrap(), 0.0);
        assert_eq!(j_kappa_direct(1.0, 0.1, &QuadConfig::default()).unwrap().0, 0.0);
    }

    #[test]
    fn closed_form_matches_direct() {
        let j = j_kappa(8.0, 0.5).unwrap();
        assert!(j.closed_form > 0.0);
        assert!(j.relative_gap() < 1e-6, "{j:?}");
    }

    #[test]
    fn gap_matches_difference() {
        let l = 6.0;
        let k = 1.0;
        let direct = j_kappa_closed(l, k).unwrap() / (16.0 * (0.5 * l).sinh().powi(2))
            - j_kappa_normalized_limit(k);
        let gap = j_kappa_normalized_gap(l, k).unwrap();
        assert!((direct - gap).abs() < 1e-12);
    }
}
