use std::collections::HashMap;

use super::recursion::Engine;
use super::Signature;
use crate::error::Result;

/// Limit on `3g - 3 + n` for the floating-point tables.
pub const DEFAULT_NUMERIC_LIMIT: u32 = 36;

/// Floating-point volume tables for scans beyond the exact cap.
///
/// All coefficients are positive, so the recursion accumulates no
/// cancellation; closed-surface volumes go through an alternating sum and are
/// accurate to roughly `1e-12` relative in the tested range.
pub struct NumericVolumes {
    engine: Engine<f64>,
}

impl Default for NumericVolumes {
    fn default() -> Self {
        Self::new(DEFAULT_NUMERIC_LIMIT)
    }
}

impl NumericVolumes {
    pub fn new(limit: u32) -> Self {
        NumericVolumes {
            engine: Engine::new(limit),
        }
    }

    pub fn limit(&self) -> u32 {
        self.engine.limit() as u32
    }

    /// Full coefficients `c_{g,n}(alpha)` keyed by non-increasing alpha.
    pub fn coefficients(&self, sig: Signature) -> Result<HashMap<Vec<u8>, f64>> {
        let t = self.engine.table(sig.g, sig.n)?;
        let scale = if (sig.g, sig.n) == (1, 1) { 2.0 } else { 1.0 };
        Ok(t.keys
            .iter()
            .zip(&t.values)
            .map(|(k, v)| {
                let mut c = scale * v;
                for &a in k {
                    c /= 4f64.powi(a as i32) * factorial_f64(2 * a as u32 + 1);
                }
                (k.clone(), c)
            })
            .collect())
    }

    pub fn volume(&self, sig: Signature) -> Result<f64> {
        let t = self.engine.table(sig.g, sig.n)?;
        let key = vec![0u8; sig.n as usize];
        let v = *t.get(&key).expect("constant term present");
        Ok(if (sig.g, sig.n) == (1, 1) { 2.0 * v } else { v })
    }

    pub fn volume_gn(&self, g: u32, n: u32) -> Result<f64> {
        self.volume(Signature::new(g, n)?)
    }

    /// One-holed coefficients `c_k` of `x^{2k}` for `V_{g,1}`.
    pub fn one_holed(&self, g: u32) -> Result<Vec<f64>> {
        let sig = Signature::new(g, 1)?;
        let c = self.coefficients(sig)?;
        Ok((0..=sig.dim() as u8).map(|k| c[&vec![k]]).collect())
    }

    pub fn evaluate(&self, sig: Signature, x: &[f64]) -> Result<f64> {
        if x.len() != sig.n as usize {
            return Err(crate::error::Error::domain(format!(
                "expected {} boundary lengths for {sig}, got {}",
                sig.n,
                x.len()
            )));
        }
        let c = self.coefficients(sig)?;
        let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
        let mut total = 0.0;
        for (key, coeff) in &c {
            let alpha: Vec<u32> = key.iter().map(|&a| a as u32).collect();
            for perm in super::distinct_permutations(&alpha) {
                let mut term = *coeff;
                for (s, &a) in sq.iter().zip(&perm) {
                    term *= s.powi(a as i32);
                }
                total += term;
            }
        }
        Ok(total)
    }
}

pub(crate) fn factorial_f64(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

