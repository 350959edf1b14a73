use num_complex::Complex64;
use serde::Serialize;

use super::transform::h_l_hat;
use crate::error::{Error, Result};
use crate::numeric::least_squares;

pub const ALPHA: f64 = 1.0 / 6.0;

#[derive(Debug, Clone, Serialize)]
pub struct SpectralRow {
    pub l: f64,
    /// `hat h_L(i s)`.
    pub value: f64,
    pub log_over_l: f64,
    /// `hat h_L(i s) e^{-(alpha + eps) L}`.
    pub scaled: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralBound {
    pub lambda1: f64,
    pub epsilon: f64,
    /// `s = sqrt(1/4 - lambda1)`, so that `r1 = i s`.
    pub s: f64,
    pub rate_target: f64,
    pub rows: Vec<SpectralRow>,
    /// Slope of `log hat h_L(i s)` between the two largest `L`.
    pub two_point_slope: f64,
    /// Rate from `log hat h_L(is) = a + rate L + b sqrt(L) + c log L`; the
    /// correction series is only asymptotic, so this is good to about 1e-2.
    pub fitted_rate: f64,
    /// Empirical `C_eps = min_L hat h_L(is) e^{-(alpha + eps) L}` over the scan.
    pub c_eps: f64,
}

impl SpectralBound {
    /// The fitted rate matches `s`, and growth between the two largest
    /// scales already beats `e^{(alpha + eps) L}`.
    pub fn growth_ok(&self) -> bool {
        (self.fitted_rate - self.s).abs() < 1e-2 && self.two_point_slope >= self.rate_target && self.s >= self.rate_target
    }
}

/// `hat h_L(i s)` over a scan of `L` for `r1 = i s`. The transform behaves
/// like `e^{sL - 2 sqrt(sL)}` times a power, so the rate is fitted with those
/// corrections rather than read off a single ratio.
pub fn spectral_lower_bound(lambda1: f64, epsilon: f64, ls: &[f64]) -> Result<SpectralBound> {
    if !(epsilon > 0.0) || !(0.0..=2.0 / 9.0 - epsilon).contains(&lambda1) {
        return Err(Error::domain(format!(
            "need eps > 0 and 0 <= lambda1 <= 2/9 - eps, got lambda1 = {lambda1}, eps = {epsilon}"
        )));
    }
    if ls.len() < 5 || ls.windows(2).any(|w| !(w[1] > w[0])) || !(ls[0] > 0.0) {
        return Err(Error::domain("need at least five increasing positive length scales"));
    }
    let s = (0.25 - lambda1).sqrt();
    let rate_target = ALPHA + epsilon;
    let rows: Vec<SpectralRow> = ls
        .iter()
        .map(|&l| {
            let value = h_l_hat(Complex64::new(0.0, s), l)?.re;
            if !(value > 0.0) {
                return Err(Error::numerical("transform on the imaginary axis is not positive", value));
            }
            Ok(SpectralRow { l, value, log_over_l: value.ln() / l, scaled: value * (-rate_target * l).exp() })
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    let (a, b) = (&rows[n - 2], &rows[n - 1]);
    let two_point_slope = (b.value.ln() - a.value.ln()) / (b.l - a.l);
    let design: Vec<Vec<f64>> = rows.iter().map(|r| vec![1.0, r.l, r.l.sqrt(), r.l.ln()]).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.value.ln()).collect();
    let fitted_rate = least_squares(&design, &y, 1e12)?.coefficients[1];
    let c_eps = rows.iter().map(|r| r.scaled).fold(f64::INFINITY, f64::min);
    Ok(SpectralBound { lambda1, epsilon, s, rate_target, rows, two_point_slope, fitted_rate, c_eps })
}

/// Geometric scan of `n` length scales from `lo` to `hi`.
pub fn length_scan(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_at_the_threshold() {
        let eps = 0.05;
        let b = spectral_lower_bound(2.0 / 9.0 - eps, eps, &length_scan(20.0, 400.0, 9)).unwrap();
        assert!(b.s >= 1.0 / 6.0 + eps);
        assert!(b.growth_ok(), "{b:?}");
        assert!(b.c_eps > 0.0);
    }

    #[test]
    fn zero_eigenvalue_grows_fastest() {
        let ls = length_scan(10.0, 80.0, 5);
        let fast = spectral_lower_bound(0.0, 0.05, &ls).unwrap();
        let slow = spectral_lower_bound(2.0 / 9.0 - 0.05, 0.05, &ls).unwrap();
        assert_eq!(fast.s, 0.5);
        assert!(fast.rows.iter().zip(&slow.rows).all(|(f, s)| f.value > s.value));
    }

    #[test]
    fn out_of_range_eigenvalue() {
        let ls = length_scan(10.0, 80.0, 5);
        assert!(spectral_lower_bound(0.2, 0.05, &ls).is_err());
        assert!(spectral_lower_bound(-0.1, 0.05, &ls).is_err());
    }
}
