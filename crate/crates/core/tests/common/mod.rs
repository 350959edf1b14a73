//! Shared helpers for integration tests.
#![allow(dead_code)]

pub mod oracle;

use num_rational::BigRational;
use num_traits::{One, Zero};
use tanglefree::{Signature, VolumeCache};

use oracle::Oracle;

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}

/// Compares every coefficient of every signature with `3g - 3 + n <= max_dim`
/// against the integral-form oracle; returns the mismatch count.
pub fn oracle_mismatches(cache: &VolumeCache, max_dim: u32) -> usize {
    let mut oracle = Oracle::new();
    let mut bad = 0;
    for g in 0..=4u32 {
        for n in 0..=12u32 {
            let Ok(sig) = Signature::new(g, n) else { continue };
            if sig.dim() > max_dim {
                continue;
            }
            let poly = cache.compute_volume(sig).unwrap();
            let want = oracle.volume(g, n);
            // the public one-holed torus is twice the recursion's orbifold value
            let scale = if (g, n) == (1, 1) { BigRational::from_integer(2.into()) } else { BigRational::one() };
            let mut seen = 0usize;
            for ((e, pi2), c) in &want {
                let alpha: Vec<u32> = e.iter().map(|&v| v as u32 / 2).collect();
                let q = poly.rational_coefficient(&alpha).unwrap();
                if q != c * &scale || poly.pi_power(&alpha) != *pi2 as u32 || e.iter().any(|v| v % 2 == 1) {
                    bad += 1;
                }
                seen += 1;
            }
            let total: usize = poly
                .canonical_terms()
                .filter(|(_, q)| !q.is_zero())
                .map(|(k, _)| orderings(k))
                .sum();
            if total != seen {
                bad += 1;
            }
        }
    }
    bad
}

/// Distinct orderings of a sorted exponent vector.
fn orderings(k: &[u32]) -> usize {
    let n = k.len();
    let mut f = (1..=n).product::<usize>();
    let mut i = 0;
    while i < n {
        let m = k.iter().filter(|&&v| v == k[i]).count();
        f /= (1..=m).product::<usize>();
        i += m;
    }
    f
}
