//! Fourier transforms on `R ∪ i[-1/2, 1/2]` and the cancellation identities.

use num_complex::Complex64;
use serde::Serialize;

use super::bump::{d_power_h_l, h0, h_l, MAX_DERIVATIVE};
use crate::error::{Error, Result};
use crate::numeric::{integrate, QuadConfig};

fn quad() -> QuadConfig {
    QuadConfig::with_tol(1e-16, 1e-13)
}

/// `int_a^b f(x) e^{irx} dx` for any complex `r`, real and imaginary parts
/// integrated separately.
pub fn fourier<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, r: Complex64, cfg: &QuadConfig) -> Result<Complex64> {
    // e^{i(p + iq)x} = e^{-qx} (cos px + i sin px)
    let (p, q) = (r.re, r.im);
    let re = integrate(|x| f(x) * (-q * x).exp() * (p * x).cos(), a, b, cfg)?.value;
    let im = if p == 0.0 {
        0.0
    } else {
        integrate(|x| f(x) * (-q * x).exp() * (p * x).sin(), a, b, cfg)?.value
    };
    Ok(Complex64::new(re, im))
}

/// Rejects spectral parameters off `R ∪ i[-1/2, 1/2]`.
pub fn check_spectral(r: Complex64) -> Result<()> {
    let real = r.im == 0.0;
    let imaginary = r.re == 0.0 && r.im.abs() <= 0.5;
    if !(r.re.is_finite() && r.im.is_finite()) || !(real || imaginary) {
        return Err(Error::domain(format!("spectral parameter {r} is not in R ∪ i[-1/2, 1/2]")));
    }
    Ok(())
}

/// `hat h0(r) = 2 int_0^{1/2} h0(x) cos(rx) dx`; real whenever `r` is real
/// or purely imaginary.
pub fn h0_hat(r: Complex64) -> Result<Complex64> {
    let (p, q) = (r.re, r.im);
    let cfg = quad();
    // cos((p + iq)x) = cos(px) cosh(qx) - i sin(px) sinh(qx)
    let re = integrate(|x| h0(x) * (p * x).cos() * (q * x).cosh(), 0.0, 0.5, &cfg)?.value;
    let im = if p == 0.0 || q == 0.0 {
        0.0
    } else {
        -integrate(|x| h0(x) * (p * x).sin() * (q * x).sinh(), 0.0, 0.5, &cfg)?.value
    };
    Ok(2.0 * Complex64::new(re, im))
}

/// `hat h = (hat h0)^2`.
pub fn h_hat(r: Complex64) -> Result<Complex64> {
    let v = h0_hat(r)?;
    Ok(v * v)
}

/// `hat h_L(r) = L hat h(L r)`.
pub fn h_l_hat(r: Complex64, l: f64) -> Result<Complex64> {
    check_length(l)?;
    Ok(l * h_hat(l * r)?)
}

/// `hat h_L(r)` by transforming the sampled `h_L` directly.
pub fn h_l_hat_direct(r: Complex64, l: f64) -> Result<Complex64> {
    check_length(l)?;
    fourier(|x| h_l(x, l), -l, l, r, &quad())
}

/// `(1/4 + r^2)^m hat h_L(r)`, real on the admissible set.
#[allow(non_snake_case)]
pub fn H_hat(r: Complex64, l: f64, m: u32) -> Result<f64> {
    check_spectral(r)?;
    let factor = (Complex64::new(0.25, 0.0) + r * r).powu(m);
    Ok((factor * h_l_hat(r, l)?).re)
}

/// Transform of `D^m h_L` built from the symbolic derivatives of the bump.
#[allow(non_snake_case)]
pub fn H_hat_direct(r: Complex64, l: f64, m: u32) -> Result<f64> {
    check_spectral(r)?;
    check_length(l)?;
    check_power(m)?;
    let f = |x: f64| d_power_h_l(x, l, m as usize);
    // the transform is bounded by the L1 norm on the real line; on the strip
    // the weight e^{|t| x} adds at most e^{L/2}
    let l1 = integrate(|x| f(x).abs(), -l, l, &QuadConfig::with_tol(0.0, 1e-6))?.value;
    let floor = 1e-15 * l1 * (r.im.abs() * l).exp();
    Ok(fourier(f, -l, l, r, &QuadConfig::with_tol(floor, 1e-13))?.re)
}

fn check_length(l: f64) -> Result<()> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::domain("length scale L must be positive"));
    }
    Ok(())
}

fn check_power(m: u32) -> Result<()> {
    if 2 * m as usize > MAX_DERIVATIVE {
        return Err(Error::domain(format!("operator power m = {m} exceeds {}", MAX_DERIVATIVE / 2)));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct HatCrossCheck {
    pub r_re: f64,
    pub r_im: f64,
    pub l: f64,
    pub m: u32,
    pub closed: f64,
    pub direct: f64,
    pub relative_gap: f64,
}

pub fn hat_cross_check(r: Complex64, l: f64, m: u32) -> Result<HatCrossCheck> {
    let closed = H_hat(r, l, m)?;
    let direct = H_hat_direct(r, l, m)?;
    let scale = closed.abs().max(direct.abs());
    let relative_gap = if scale == 0.0 { 0.0 } else { (closed - direct).abs() / scale };
    Ok(HatCrossCheck { r_re: r.re, r_im: r.im, l, m, closed, direct, relative_gap })
}

/// `|hat h_L(r) - L hat h(L r)|` relative to `hat h_L(0) = L hat h(0)`, the
/// maximum of the transform on the real line; the left side is the direct
/// transform of the sampled `h_L`.
pub fn dilation_gap(r: f64, l: f64) -> Result<f64> {
    let direct = h_l_hat_direct(Complex64::new(r, 0.0), l)?.re;
    let scaled = h_l_hat(Complex64::new(r, 0.0), l)?.re;
    let peak = h_l_hat(Complex64::new(0.0, 0.0), l)?.re;
    Ok((direct - scaled).abs() / peak)
}

#[derive(Debug, Clone, Serialize)]
pub struct CancellationReport {
    pub k: u32,
    pub m: u32,
    pub l: f64,
    /// `int (D^m h_L)(x) x^k e^{x/2} dx`.
    pub value: f64,
    /// `int h_L(x) x^k e^{x/2} dx`.
    pub unregularized: f64,
    /// `1e-8 e^{L/2}`.
    pub tolerance: f64,
    /// `k < m`, where the integral vanishes identically.
    pub annihilated: bool,
}

impl CancellationReport {
    pub fn passed(&self) -> bool {
        !self.annihilated || self.value.abs() <= self.tolerance
    }

    pub fn ratio(&self) -> f64 {
        (self.value / self.unregularized).abs()
    }
}

/// `(1/4 - d^2)[x^k e^{x/2}] = -(k(k-1) x^{k-2} + k x^{k-1}) e^{x/2}` lowers
/// the polynomial degree by one, so `m > k` applications kill it.
pub fn cancellation_check(k: u32, m: u32, l: f64) -> Result<CancellationReport> {
    check_length(l)?;
    check_power(m)?;
    let weight = |x: f64| x.powi(k as i32) * (0.5 * x).exp();
    let tolerance = 1e-8 * (0.5 * l).exp();
    let cfg = QuadConfig::with_tol(1e-3 * tolerance, 1e-13);
    let value = integrate(|x| d_power_h_l(x, l, m as usize) * weight(x), -l, l, &cfg)?.value;
    let unregularized = integrate(|x| h_l(x, l) * weight(x), -l, l, &cfg)?.value;
    Ok(CancellationReport { k, m, l, value, unregularized, tolerance, annihilated: k < m })
}
