//! Adaptive Gauss-Kronrod (7/15) quadrature with global error control.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Hard cap on integrand evaluations for a single integral.
pub const DEFAULT_MAX_EVALS: usize = 10_000_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-9,
            rel_tol: 0.0,
            max_evals: DEFAULT_MAX_EVALS,
        }
    }
}

impl QuadConfig {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadConfig {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let s = f(center - x) + f(center + x);
        res_k += WGK[j] * s;
        if j % 2 == 1 {
            res_g += WG[j / 2] * s;
        }
    }
    let value = res_k * half;
    let error = ((res_k - res_g) * half).abs();
    (value, error)
}

/// Integrate `f` over `[a, b]` to `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evals: 0,
        });
    }
    if b < a {
        let r = integrate(f, b, a, cfg)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }
    let (v, e) = kronrod(&mut f, a, b);
    let mut evals = 15;
    let mut total = v;
    let mut total_err = e;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v,
        error: e,
    });
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if !total.is_finite() {
            return Err(Error::numerical("non-finite integrand", f64::NAN));
        }
        if evals + 30 > cfg.max_evals {
            return Err(Error::numerical(
                "quadrature evaluation budget exhausted",
                total_err,
            ));
        }
        let seg = heap.pop().expect("heap never empties");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval at machine resolution; accept what we have
            heap.push(seg);
            if total_err <= 1e3 * tol {
                break;
            }
            return Err(Error::numerical(
                "quadrature interval collapsed before tolerance was met",
                total_err,
            ));
        }
        let (v1, e1) = kronrod(&mut f, seg.a, mid);
        let (v2, e2) = kronrod(&mut f, mid, seg.b);
        evals += 30;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
        // periodically resum to keep drift out of the running totals
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    Ok(QuadResult {
        value,
        error,
        evals,
    })
}

/// Integrate over `[a, b]` split at the given interior breakpoints.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let mut out = QuadResult {
        value: 0.0,
        error: 0.0,
        evals: 0,
    };
    let n = points.len().saturating_sub(1).max(1) as f64;
    let piece_cfg = QuadConfig {
        abs_tol: cfg.abs_tol / n,
        ..*cfg
    };
    for w in points.windows(2) {
        let r = integrate(&mut f, w[0], w[1], &piece_cfg)?;
        out.value += r.value;
        out.error += r.error;
        out.evals += r.evals;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, &QuadConfig::default()).unwrap();
        assert!((r.value - 0.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_endpoint_singularity() {
        let cfg = QuadConfig::with_tol(1e-12, 0.0);
        let r = integrate(|x: f64| (1.0 - x).max(0.0).sqrt(), 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn reversed_limits_negate() {
        let cfg = QuadConfig::default();
        let a = integrate(f64::exp, 0.0, 1.0, &cfg).unwrap().value;
        let b = integrate(f64::exp, 1.0, 0.0, &cfg).unwrap().value;
        assert_eq!(a, -b);
    }

    #[test]
    fn budget_is_enforced() {
        let cfg = QuadConfig {
            abs_tol: 1e-300,
            rel_tol: 0.0,
            max_evals: 200,
        };
        let err = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &cfg).unwrap_err();
        assert_eq!(err.kind(), "numerical");
    }
}
