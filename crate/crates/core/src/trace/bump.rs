//! The admissible bump `h = h0 * h0` and its even derivatives.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;

/// Grid step of the precomputed convolution.
pub const GRID_STEP: f64 = 1e-4;
/// Highest derivative kept on the grid; enough for `D^4`.
pub const MAX_DERIVATIVE: usize = 8;

const HALF_POINTS: usize = 5_000;

/// `h0^(k)(x) = sum c_{a,b} x^a u^b e^{-u}` with `u = 1 / (1 - 4x^2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BumpDerivative {
    pub order: usize,
    pub terms: BTreeMap<(u32, u32), i128>,
}

impl BumpDerivative {
    pub fn base() -> Self {
        BumpDerivative { order: 0, terms: BTreeMap::from([((0, 0), 1)]) }
    }

    /// Uses `u' = 8 x u^2`.
    pub fn differentiate(&self) -> Self {
        let mut out: BTreeMap<(u32, u32), i128> = BTreeMap::new();
        let mut add = |k: (u32, u32), v: i128| {
            if v != 0 {
                *out.entry(k).or_default() += v;
            }
        };
        for (&(a, b), &c) in &self.terms {
            if a > 0 {
                add((a - 1, b), c * a as i128);
            }
            add((a + 1, b + 1), 8 * b as i128 * c);
            add((a + 1, b + 2), -8 * c);
        }
        out.retain(|_, v| *v != 0);
        BumpDerivative { order: self.order + 1, terms: out }
    }

    pub fn nth(k: usize) -> Self {
        (0..k).fold(Self::base(), |d, _| d.differentiate())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let q = 1.0 - 4.0 * x * x;
        if !(q > 0.0) {
            return 0.0;
        }
        let u = 1.0 / q;
        let lu = u.ln();
        // each monomial carries its own e^{-u} so huge u never overflows
        self.terms
            .iter()
            .map(|(&(a, b), &c)| c as f64 * x.powi(a as i32) * (b as f64 * lu - u).exp())
            .sum()
    }
}

/// `exp(-1 / (1 - 4x^2))` on `(-1/2, 1/2)`.
pub fn h0(x: f64) -> f64 {
    let q = 1.0 - 4.0 * x * x;
    if q > 0.0 {
        (-1.0 / q).exp()
    } else {
        0.0
    }
}

/// `h^(2k)` sampled at `x = i * GRID_STEP`, `i = 0..=2 * HALF_POINTS`.
pub struct BumpGrid {
    derivatives: Vec<Vec<f64>>,
}

impl BumpGrid {
    fn build() -> Self {
        let n = 2 * HALF_POINTS;
        let dx = GRID_STEP;
        let ys: Vec<f64> = (0..=n).map(|i| -0.5 + i as f64 * dx).collect();
        let derivatives = (0..=MAX_DERIVATIVE / 2)
            .map(|k| {
                let d = BumpDerivative::nth(k);
                let a: Vec<f64> = ys.iter().map(|&y| d.eval(y)).collect();
                // h^(2k) = h0^(k) * h0^(k): splitting the derivatives keeps both
                // factors moderate. Both vanish to all orders at the ends, so
                // the plain trapezoid sum is already endpoint-corrected.
                (0..=n)
                    .into_par_iter()
                    // x = m dx and y_i = -1/2 + i dx give x - y_i = y_{m + n - i}
                    .map(|m| (m..=n).map(|i| a[m + n - i] * a[i]).sum::<f64>() * dx)
                    .collect()
            })
            .collect();
        BumpGrid { derivatives }
    }

    pub fn get() -> &'static BumpGrid {
        static GRID: OnceLock<BumpGrid> = OnceLock::new();
        GRID.get_or_init(BumpGrid::build)
    }

    /// `h^(2k)(x)` by 8-point Lagrange interpolation, using evenness.
    pub fn even_derivative(&self, k: usize, x: f64) -> f64 {
        let t = x.abs() / GRID_STEP;
        let last = 2 * HALF_POINTS;
        if t >= last as f64 {
            return 0.0;
        }
        let arr = &self.derivatives[k];
        let at = |i: isize| -> f64 {
            let i = i.unsigned_abs();
            if i > last {
                0.0
            } else {
                arr[i]
            }
        };
        let base = t.floor() as isize;
        let frac = t - base as f64;
        if frac == 0.0 {
            return at(base);
        }
        let nodes: Vec<isize> = (base - 3..=base + 4).collect();
        let mut sum = 0.0;
        for (p, &i) in nodes.iter().enumerate() {
            let xi = (i - base) as f64;
            let mut w = 1.0;
            for (q, &j) in nodes.iter().enumerate() {
                if p != q {
                    let xj = (j - base) as f64;
                    w *= (frac - xj) / (xi - xj);
                }
            }
            sum += w * at(i);
        }
        sum
    }
}

/// `h(x) = (h0 * h0)(x)`.
pub fn h(x: f64) -> f64 {
    BumpGrid::get().even_derivative(0, x)
}

/// `h_L(x) = h(x / L)`.
pub fn h_l(x: f64, l: f64) -> f64 {
    h(x / l)
}

/// `(D^m h_L)(x)` with `D = 1/4 - d^2`, expanded binomially:
/// `sum_k C(m,k) (1/4)^{m-k} (-1)^k L^{-2k} h^(2k)(x / L)`.
pub fn d_power_h_l(x: f64, l: f64, m: usize) -> f64 {
    assert!(2 * m <= MAX_DERIVATIVE, "D^m needs h^(2m) on the grid");
    let grid = BumpGrid::get();
    let y = x / l;
    let mut binom = 1.0;
    let mut total = 0.0;
    for k in 0..=m {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        total += binom * 0.25f64.powi((m - k) as i32) * sign * l.powi(-2 * k as i32) * grid.even_derivative(k, y);
        binom = binom * (m - k) as f64 / (k + 1) as f64;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{integrate, QuadConfig};

    #[test]
    fn symbolic_derivatives_match_differences() {
        let step = 1e-5;
        for k in 0..6 {
            let d = BumpDerivative::nth(k);
            let next = d.differentiate();
            for &x in &[-0.3, 0.0, 0.1, 0.37, 0.45] {
                let fd = (d.eval(x + step) - d.eval(x - step)) / (2.0 * step);
                let exact = next.eval(x);
                assert!((fd - exact).abs() < 1e-5 * (1.0 + exact.abs()), "k={k} x={x}: {fd} vs {exact}");
            }
        }
        assert_eq!(BumpDerivative::nth(0).eval(0.2), h0(0.2));
    }

    #[test]
    fn grid_matches_direct_convolution() {
        let cfg = QuadConfig::with_tol(1e-15, 1e-13);
        for &x in &[0.0, 0.23456, 0.5, 0.8, 0.99] {
            let direct = integrate(|y| h0(y) * h0(x - y), x - 0.5, 0.5, &cfg).unwrap().value;
            assert!((h(x) - direct).abs() < 1e-13, "x={x}: {} vs {direct}", h(x));
        }
        let d2 = BumpDerivative::nth(2);
        let x = 0.3141;
        let direct = integrate(|y| d2.eval(x - y) * h0(y), x - 0.5, 0.5, &cfg).unwrap().value;
        let got = BumpGrid::get().even_derivative(1, x);
        assert!((got - direct).abs() < 1e-10 * (1.0 + direct.abs()), "{got} vs {direct}");
    }

    #[test]
    fn support_symmetry_and_scaling() {
        assert_eq!(h(1.0), 0.0);
        assert_eq!(h(-1.2), 0.0);
        assert!(h(0.0) > 0.0);
        assert_eq!(h(0.4), h(-0.4));
        assert_eq!(h_l(0.0, 7.0), h(0.0));
        assert_eq!(h_l(7.5, 7.0), 0.0);
        let cfg = QuadConfig::with_tol(1e-14, 1e-12);
        let one = integrate(h, -1.0, 1.0, &cfg).unwrap().value;
        let seven = integrate(|x| h_l(x, 7.0), -7.0, 7.0, &cfg).unwrap().value;
        assert!((seven - 7.0 * one).abs() < 1e-11 * seven);
    }

    #[test]
    fn nonnegative_on_the_grid() {
        assert!(BumpGrid::get().derivatives[0].iter().all(|&v| v >= 0.0));
    }
}
