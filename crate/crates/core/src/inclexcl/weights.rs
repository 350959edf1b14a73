use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// `mu_kappa^j`, indicators of short loops.
    ShortLoopProduct,
    /// `mu_R^k`, indicators of tangle boundaries.
    TangleBoundary,
    Unit,
}

/// `(-1)^j / j! * prod 1[0 <= x_i <= cutoff]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightFunction {
    pub kind: WeightKind,
    pub arity: u32,
    /// Symbolic cutoff name, `kappa` or `R`.
    pub cutoff: &'static str,
}

impl WeightFunction {
    pub const fn short(arity: u32) -> Self {
        WeightFunction { kind: WeightKind::ShortLoopProduct, arity, cutoff: "kappa" }
    }

    pub const fn tangle(arity: u32) -> Self {
        WeightFunction { kind: WeightKind::TangleBoundary, arity, cutoff: "R" }
    }

    pub fn sign(&self) -> i32 {
        if self.arity % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn normalization(&self) -> f64 {
        1.0 / (1..=self.arity).map(f64::from).product::<f64>()
    }

    pub fn evaluate(&self, x: &[f64], cutoff: f64) -> Result<f64> {
        if x.len() != self.arity as usize {
            return Err(Error::domain(format!("weight of arity {} given {} lengths", self.arity, x.len())));
        }
        if self.kind == WeightKind::Unit {
            return Ok(1.0);
        }
        let inside = x.iter().all(|&v| (0.0..=cutoff).contains(&v));
        Ok(if inside { f64::from(self.sign()) * self.normalization() } else { 0.0 })
    }
}

/// `I_kappa = int_0^kappa l e^{l/2} dl = 4 + 2 (kappa - 2) e^{kappa/2}`.
pub fn i_kappa_weight(kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::domain("I_kappa needs kappa > 0"));
    }
    if kappa > 0.5 {
        return Ok(4.0 + 2.0 * (kappa - 2.0) * (kappa / 2.0).exp());
    }
    // the closed form cancels badly near 0; expand l e^{l/2} instead:
    // sum_k kappa^{k+2} / (2^k k! (k+2))
    let mut total = 0.0;
    let mut pow = kappa * kappa;
    let mut fact = 1.0;
    for k in 0..40 {
        let term = pow / (fact * (k as f64 + 2.0));
        total += term;
        if term < 1e-18 * total {
            break;
        }
        pow *= kappa / 2.0;
        fact *= k as f64 + 1.0;
    }
    Ok(total)
}

/// `I(kappa) = int_0^kappa 4 sinh^2(x/2) dx / x = sum_{k>=1} 2 kappa^{2k} / (2k (2k)!)`.
pub fn i_small(kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::domain("I(kappa) needs kappa > 0"));
    }
    let mut total = 0.0;
    let mut term_core = 1.0; // kappa^{2k} / (2k)!
    for k in 1..400 {
        let kk = 2.0 * k as f64;
        term_core *= kappa * kappa / ((kk - 1.0) * kk);
        let term = 2.0 * term_core / kk;
        total += term;
        // later terms shrink by at least kappa^2 / ((2k+1)(2k+2)) each
        let ratio = kappa * kappa / ((kk + 1.0) * (kk + 2.0));
        if ratio < 0.5 && term * ratio / (1.0 - ratio) < 1e-14 * total {
            return Ok(total);
        }
    }
    Err(Error::numerical("I(kappa) series did not settle", total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{integrate, QuadConfig};

    #[test]
    fn weight_evaluation() {
        let w = WeightFunction::short(2);
        assert_eq!(w.evaluate(&[0.1, 0.2], 0.5).unwrap(), 0.5);
        assert_eq!(w.evaluate(&[0.1, 0.7], 0.5).unwrap(), 0.0);
        assert_eq!(WeightFunction::tangle(3).evaluate(&[1.0; 3], 2.0).unwrap(), -1.0 / 6.0);
        assert!(w.evaluate(&[0.1], 0.5).is_err());
    }

    #[test]
    fn i_kappa_against_quadrature() {
        let cfg = QuadConfig::with_tol(1e-15, 1e-14);
        for kappa in [1e-3, 0.1, 0.3, 0.5, 0.7, 1.0, 2.0] {
            let q = integrate(|l: f64| l * (l / 2.0).exp(), 0.0, kappa, &cfg).unwrap().value;
            let c = i_kappa_weight(kappa).unwrap();
            assert!((q - c).abs() <= 1e-12 * q.max(1e-300), "kappa {kappa}: {q} vs {c}");
        }
        let one = 4.0 - 2.0 * 0.5f64.exp();
        assert!((i_kappa_weight(1.0).unwrap() - one).abs() < 1e-15);
    }

    #[test]
    fn i_small_against_quadrature() {
        let cfg = QuadConfig::with_tol(1e-16, 1e-14);
        for kappa in [1e-3, 0.1, 0.5, 1.0, 3.0] {
            let q = integrate(
                |x: f64| if x == 0.0 { 0.0 } else { 4.0 * (x / 2.0).sinh().powi(2) / x },
                0.0,
                kappa,
                &cfg,
            )
            .unwrap()
            .value;
            let s = i_small(kappa).unwrap();
            assert!((q - s).abs() <= 1e-12 * q, "kappa {kappa}: {q} vs {s}");
        }
        assert!(i_small(1.0).unwrap() <= 1.0);
        let k = 1e-4;
        assert!((i_small(k).unwrap() / (k * k / 2.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn i_kappa_increasing() {
        let mut last = 0.0;
        for i in 1..200 {
            let v = i_kappa_weight(i as f64 * 0.01).unwrap();
            assert!(v > last);
            last = v;
        }
    }
}
