//! Linear least squares with conditioning diagnostics.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct LinearFit {
    pub coefficients: Vec<f64>,
    pub condition_number: f64,
    /// Root-mean-square of the residual vector.
    pub rms_residual: f64,
    pub max_abs_residual: f64,
}

/// Solve `min ||A c - y||` for a design matrix given row by row.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64], max_condition: f64) -> Result<LinearFit> {
    let m = rows.len();
    if m == 0 || m != y.len() {
        return Err(Error::domain("least squares needs matching nonempty data"));
    }
    let n = rows[0].len();
    if m < n {
        return Err(Error::domain(format!(
            "underdetermined fit: {m} samples for {n} unknowns"
        )));
    }
    let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(cond <= max_condition) {
        return Err(Error::numerical(
            format!("ill-conditioned basis (condition number {cond:.3e})"),
            cond,
        ));
    }
    let c = svd
        .solve(&b, smax * 1e-15)
        .map_err(|e| Error::numerical(e.to_string(), cond))?;
    let r = &a * &c - &b;
    let rms = (r.norm_squared() / m as f64).sqrt();
    let max_abs = r.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(LinearFit {
        coefficients: c.iter().copied().collect(),
        condition_number: cond,
        rms_residual: rms,
        max_abs_residual: max_abs,
    })
}

/// Ordinary least-squares line `y = intercept + slope * x`.
pub fn line_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::domain("line fit needs at least two points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("degenerate abscissae in line fit"));
    }
    let slope = sxy / sxx;
    Ok((my - slope * mx, slope))
}

/// Fit a polynomial of the given degree; coefficients in increasing degree.
pub fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Result<LinearFit> {
    // center and scale for conditioning, then map coefficients back
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mid = 0.5 * (lo + hi);
    let half = (0.5 * (hi - lo)).max(1e-300);
    let rows: Vec<Vec<f64>> = x
        .iter()
        .map(|&v| {
            let t = (v - mid) / half;
            (0..=degree).map(|k| t.powi(k as i32)).collect()
        })
        .collect();
    let fit = least_squares(&rows, y, 1e12)?;
    // expand sum c_k ((x - mid)/half)^k into monomials in x
    let mut coeffs = vec![0.0; degree + 1];
    for (k, &ck) in fit.coefficients.iter().enumerate() {
        let scale = ck / half.powi(k as i32);
        for i in 0..=k {
            let binom = binomial_f64(k, i);
            coeffs[i] += scale * binom * (-mid).powi((k - i) as i32);
        }
    }
    Ok(LinearFit {
        coefficients: coeffs,
        ..fit
    })
}

pub fn polyval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_polynomial() {
        let x: Vec<f64> = (0..20).map(|i| 3.0 + i as f64 * 0.5).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - v + 0.25 * v * v).collect();
        let fit = polyfit(&x, &y, 2).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-9);
        assert!((fit.coefficients[1] + 1.0).abs() < 1e-9);
        assert!((fit.coefficients[2] - 0.25).abs() < 1e-10);
    }

    #[test]
    fn line_slope() {
        let x = [1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0];
        let (c, s) = line_fit(&x, &y).unwrap();
        assert!((s - 2.0).abs() < 1e-15 && (c + 1.0).abs() < 1e-15);
    }

    #[test]
    fn collinear_columns_rejected() {
        let rows = vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]];
        assert!(least_squares(&rows, &[1.0, 2.0, 3.0], 1e10).is_err());
    }
}
