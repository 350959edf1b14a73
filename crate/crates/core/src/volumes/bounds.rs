use serde::Serialize;

use super::{NumericVolumes, Signature, VolumeCache};
use crate::error::{Error, Result};

/// Anything that can hand out numeric volumes.
pub trait VolumeSource: Sync {
    fn volume_of(&self, sig: Signature) -> Result<f64>;
}

impl VolumeSource for VolumeCache {
    fn volume_of(&self, sig: Signature) -> Result<f64> {
        Ok(self.compute_volume(sig)?.volume())
    }
}

impl VolumeSource for NumericVolumes {
    fn volume_of(&self, sig: Signature) -> Result<f64> {
        self.volume(sig)
    }
}

/// `c_{g,n}(alpha) / V_{g,n}`, formed exactly before conversion.
pub fn coefficient_ratio(cache: &VolumeCache, sig: Signature, alpha: &[u32]) -> Result<f64> {
    let p = cache.compute_volume(sig)?;
    let q = p.rational_coefficient(alpha)?;
    let ratio = q / p.constant_term();
    let s = alpha.iter().sum::<u32>() as i32;
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    Ok(super::recursion::ratio_to_f64(&ratio) / pi2.powi(s))
}

/// `V_a / V_b`, formed exactly before conversion.
pub fn volume_ratio(cache: &VolumeCache, a: Signature, b: Signature) -> Result<f64> {
    let pa = cache.compute_volume(a)?;
    let pb = cache.compute_volume(b)?;
    let ratio = pa.constant_term() / pb.constant_term();
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    Ok(super::recursion::ratio_to_f64(&ratio) * pi2.powi(a.dim() as i32 - b.dim() as i32))
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionSumBound {
    pub n: u32,
    pub parts: Vec<u32>,
    /// `(g, lhs, V_{g,n}, lhs / V_{g,n})` over the scanned range.
    pub scan: Vec<(u32, f64, f64, f64)>,
    /// Only the product `C * D^{q-1}` is identifiable; `C` is pinned to 1 when `q > 1`.
    pub c: f64,
    pub d: f64,
}

impl PartitionSumBound {
    pub fn lhs_at(&self, g: u32) -> Option<f64> {
        self.scan.iter().find(|r| r.0 == g).map(|r| r.1)
    }
}

/// Sum over ordered genus vectors of `prod V_{g_i, n_i}` with `sum (2 g_i - 2 + n_i) = 2g - 2 + n`.
pub fn partition_sum<V: VolumeSource>(vols: &V, g: u32, n: u32, parts: &[u32]) -> Result<f64> {
    if parts.is_empty() {
        return Err(Error::domain("at least one part is needed"));
    }
    let target = 2 * g as i64 - 2 + n as i64;
    let legs: i64 = parts.iter().map(|&v| v as i64).sum();
    let twice = target + 2 * parts.len() as i64 - legs;
    if twice < 0 || twice % 2 != 0 {
        return Ok(0.0);
    }
    let total_genus = (twice / 2) as u32;
    let mut acc = 0.0;
    let mut genera = vec![0u32; parts.len()];
    fn rec<V: VolumeSource>(
        vols: &V,
        parts: &[u32],
        pos: usize,
        left: u32,
        genera: &mut Vec<u32>,
        acc: &mut f64,
    ) -> Result<()> {
        if pos + 1 == parts.len() {
            genera[pos] = left;
            let mut prod = 1.0;
            for (&gi, &ni) in genera.iter().zip(parts) {
                match Signature::new(gi, ni) {
                    Ok(s) => prod *= vols.volume_of(s)?,
                    Err(_) => return Ok(()),
                }
            }
            *acc += prod;
            return Ok(());
        }
        for gi in 0..=left {
            genera[pos] = gi;
            rec(vols, parts, pos + 1, left - gi, genera, acc)?;
        }
        Ok(())
    }
    rec(vols, parts, 0, total_genus, &mut genera, &mut acc)?;
    Ok(acc)
}

/// Scans `g` over `genera` and fits the smallest constant in
/// `lhs <= C (D / (2g - 2 + n))^{q-1} V_{g,n}`.
pub fn partition_sum_bound<V: VolumeSource>(
    vols: &V,
    n: u32,
    parts: &[u32],
    genera: impl IntoIterator<Item = u32>,
) -> Result<PartitionSumBound> {
    let q = parts.len() as i32;
    let mut scan = Vec::new();
    for g in genera {
        let sig = Signature::new(g, n)?;
        let lhs = partition_sum(vols, g, n, parts)?;
        let v = vols.volume_of(sig)?;
        scan.push((g, lhs, v, lhs / v));
    }
    if scan.is_empty() {
        return Err(Error::domain("empty genus range"));
    }
    let (c, d) = if q == 1 {
        (scan.iter().map(|r| r.3).fold(0.0, f64::max), 1.0)
    } else {
        let d = scan
            .iter()
            .map(|&(g, _, _, r)| {
                let chi = (2 * g + n) as f64 - 2.0;
                (r * chi.powi(q - 1)).powf(1.0 / (q - 1) as f64)
            })
            .fold(0.0, f64::max);
        (1.0, d)
    };
    Ok(PartitionSumBound {
        n,
        parts: parts.to_vec(),
        scan,
        c,
        d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_part_is_the_volume() {
        let c = VolumeCache::new(8);
        let b = partition_sum_bound(&c, 1, &[1], 1..=3).unwrap();
        for row in &b.scan {
            assert!((row.3 - 1.0).abs() < 1e-14);
        }
        assert!((b.c - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_one_holed_parts_in_genus_three() {
        let c = VolumeCache::new(8);
        let lhs = partition_sum(&c, 3, 0, &[1, 1]).unwrap();
        let v11 = c.volume(1, 1).unwrap().volume();
        let v21 = c.volume(2, 1).unwrap().volume();
        assert!((lhs - 2.0 * v11 * v21).abs() < 1e-12 * lhs);
    }
}
