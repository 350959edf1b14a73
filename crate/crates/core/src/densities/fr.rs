//! Polynomial-plus-decay decomposition of sampled densities.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{least_squares, line_fit, polyval};

/// `f1(x) = 2 sinh(x/2)`.
pub fn f1(x: f64) -> f64 {
    2.0 * (0.5 * x).sinh()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalizer {
    /// Divide by `sinh(l/2)`.
    SinhHalf,
    /// Divide by `e^{sigma l}`.
    Exp { sigma: f64 },
}

impl Normalizer {
    pub fn apply(&self, l: f64, v: f64) -> f64 {
        match *self {
            Normalizer::SinhHalf => v / (0.5 * l).sinh(),
            Normalizer::Exp { sigma } => v * (-sigma * l).exp(),
        }
    }
}

/// `f / normalizer = p + residual` with the residual measured against
/// `(l + 1)^c e^{-l/2}`. The statistic is a surrogate for the class norm.
#[derive(Debug, Clone, Serialize)]
pub struct FRDecomposition {
    pub normalizer: Normalizer,
    /// Coefficients of `p` in increasing degree.
    pub coefficients: Vec<f64>,
    pub c: f64,
    pub window: (f64, f64),
    /// `sup |f / norm - p| e^{l/2} (l + 1)^{-c}` over the window.
    pub statistic: f64,
    /// Slope of `log(|f / norm - p| (l + 1)^{-c})` against `l`.
    pub decay_slope: Option<f64>,
    /// The residual is at noise level on the upper half of the window.
    pub vanishes: bool,
}

impl FRDecomposition {
    /// Residual decays at least like `e^{threshold l}`.
    pub fn decays(&self, threshold: f64) -> bool {
        self.vanishes || self.decay_slope.is_some_and(|s| s <= threshold)
    }

    pub fn p(&self, l: f64) -> f64 {
        polyval(&self.coefficients, l)
    }
}

/// Fits `p` of degree at most `max_degree` on the upper half of the window,
/// weighting each sample by `e^{l/2} (l+1)^{-c}` so that the fit controls the
/// same quantity the statistic measures.
pub fn fr_decompose(
    ls: &[f64],
    values: &[f64],
    normalizer: Normalizer,
    max_degree: usize,
    c: f64,
) -> Result<FRDecomposition> {
    if ls.len() != values.len() || ls.len() < 2 * (max_degree + 2) {
        return Err(Error::domain("window too small for the requested degree"));
    }
    if ls.windows(2).any(|w| !(w[1] > w[0])) || ls[0] < 0.0 {
        return Err(Error::domain("grid must be increasing and non-negative"));
    }
    let (lo, hi) = (ls[0], ls[ls.len() - 1]);
    if hi < 4.0 * max_degree.max(1) as f64 {
        return Err(Error::domain("window does not reach far enough for the degree"));
    }
    let scale = |l: f64| (0.5 * l).exp() * (l + 1.0).powf(-c);
    let normalized: Vec<f64> = ls.iter().zip(values).map(|(&l, &v)| normalizer.apply(l, v)).collect();
    if normalized.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("normalized samples are not finite"));
    }
    let mid = 0.5 * (lo + hi);
    let upper: Vec<usize> = (0..ls.len()).filter(|&i| ls[i] >= mid).collect();
    // powers of a centred variable keep the design matrix tame
    let centre = 0.5 * (mid + hi);
    let width = (0.5 * (hi - mid)).max(1e-12);
    let rows: Vec<Vec<f64>> = upper
        .iter()
        .map(|&i| {
            let t = (ls[i] - centre) / width;
            let w = scale(ls[i]);
            (0..=max_degree).map(|k| w * t.powi(k as i32)).collect()
        })
        .collect();
    let rhs: Vec<f64> = upper.iter().map(|&i| scale(ls[i]) * normalized[i]).collect();
    let fit = least_squares(&rows, &rhs, 1e14)?;
    // convert back to powers of l
    let mut coefficients = vec![0.0; max_degree + 1];
    for (k, &a) in fit.coefficients.iter().enumerate() {
        // a * ((l - centre) / width)^k
        let mut binom = 1.0;
        for i in 0..=k {
            let term = a * binom * (-centre).powi((k - i) as i32) / width.powi(k as i32);
            coefficients[i] += term;
            binom = binom * (k - i) as f64 / (i + 1) as f64;
        }
    }
    let p = |l: f64| {
        let t = (l - centre) / width;
        fit.coefficients.iter().rev().fold(0.0, |acc, &a| acc * t + a)
    };
    let residuals: Vec<f64> = ls.iter().zip(&normalized).map(|(&l, &v)| (v - p(l)).abs()).collect();
    let statistic = ls.iter().zip(&residuals).map(|(&l, &r)| r * scale(l)).fold(0.0, f64::max);
    let magnitude = normalized.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-11 * magnitude;
    let live: Vec<usize> = (0..ls.len()).filter(|&i| residuals[i] > floor).collect();
    let vanishes = !live.iter().any(|&i| ls[i] >= mid);
    let decay_slope = if live.len() >= 3 && !vanishes {
        let x: Vec<f64> = live.iter().map(|&i| ls[i]).collect();
        let y: Vec<f64> = live.iter().map(|&i| (residuals[i] * (ls[i] + 1.0).powf(-c)).ln()).collect();
        Some(line_fit(&x, &y)?.1)
    } else {
        None
    };
    Ok(FRDecomposition { normalizer, coefficients, c, window: (lo, hi), statistic, decay_slope, vanishes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn f1_values() {
        assert_eq!(f1(0.0), 0.0);
        assert!((f1(2.0) - 2.0 * 1f64.sinh()).abs() < 1e-15);
    }

    #[test]
    fn f1_has_constant_two() {
        let ls = grid(0.5, 30.0, 60);
        let v: Vec<f64> = ls.iter().map(|&l| f1(l)).collect();
        let d = fr_decompose(&ls, &v, Normalizer::SinhHalf, 2, 0.0).unwrap();
        assert!((d.coefficients[0] - 2.0).abs() < 1e-9);
        assert!(d.coefficients[1..].iter().all(|c| c.abs() < 1e-9));
        assert!(d.vanishes && d.statistic < 1e-3);
    }

    #[test]
    fn indicator_kills_the_polynomial() {
        let kappa = 0.5;
        let ls = grid(0.1, 30.0, 60);
        let v: Vec<f64> = ls.iter().map(|&l| if l <= kappa { f1(l) } else { 0.0 }).collect();
        let d = fr_decompose(&ls, &v, Normalizer::SinhHalf, 1, 0.0).unwrap();
        assert!(d.coefficients.iter().all(|c| c.abs() < 1e-12));
        assert!(d.decays(-0.4));
    }

    #[test]
    fn cosh_and_power_bases() {
        let ls = grid(1.0, 40.0, 80);
        for k in 0..3 {
            let cosh: Vec<f64> = ls.iter().map(|&l| l.powi(k) * (0.5 * l).cosh()).collect();
            let d = fr_decompose(&ls, &cosh, Normalizer::SinhHalf, 3, k as f64).unwrap();
            assert!((d.coefficients[k as usize] - 1.0).abs() < 1e-6, "{:?}", d.coefficients);
            assert!(d.decays(-0.4), "cosh k={k}: {:?}", d.decay_slope);
            let pow: Vec<f64> = ls.iter().map(|&l| l.powi(k)).collect();
            let d = fr_decompose(&ls, &pow, Normalizer::SinhHalf, 3, k as f64).unwrap();
            // l^k / sinh(l/2) is pure remainder, falling like e^{-l/2}
            let slope = d.decay_slope.unwrap();
            assert!((-0.65..=-0.45).contains(&slope), "power k={k}: {slope}");
        }
    }

    #[test]
    fn degenerate_window() {
        assert!(fr_decompose(&[1.0, 2.0], &[1.0, 2.0], Normalizer::SinhHalf, 1, 0.0).is_err());
    }
}
