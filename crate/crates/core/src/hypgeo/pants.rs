//! Two-generator Fuchsian model of a pair of pants.

use nalgebra::Matrix2;
use serde::Serialize;

use super::words::FreeWord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct PantsModel {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    #[serde(skip)]
    pub a1: Matrix2<f64>,
    #[serde(skip)]
    pub a2: Matrix2<f64>,
}

impl PantsModel {
    /// `A1 = [[x, -1], [1, 0]]`, `A2 = [[0, c], [-1/c, y]]` with
    /// `x = -2 cosh(b1/2)`, `y = -2 cosh(b2/2)` and `c + 1/c = -2 cosh(b3/2)`,
    /// `c < -1`; then `tr(A1 A2) = c + 1/c` regardless of `x, y`.
    pub fn from_lengths(b1: f64, b2: f64, b3: f64) -> Result<Self> {
        if !(b1 > 0.0 && b2 > 0.0 && b3 > 0.0) || !(b1 + b2 + b3).is_finite() {
            return Err(Error::domain("boundary lengths must be positive and finite"));
        }
        let x = -2.0 * (0.5 * b1).cosh();
        let y = -2.0 * (0.5 * b2).cosh();
        let c = -(0.5 * b3).exp();
        Ok(PantsModel {
            b1,
            b2,
            b3,
            a1: Matrix2::new(x, -1.0, 1.0, 0.0),
            a2: Matrix2::new(0.0, c, -1.0 / c, y),
        })
    }

    fn letter(&self, l: i8) -> Matrix2<f64> {
        let m = if l.abs() == 1 { self.a1 } else { self.a2 };
        if l > 0 {
            m
        } else {
            // inverse of a determinant-one matrix
            Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)])
        }
    }

    pub fn word_matrix(&self, w: &FreeWord) -> Matrix2<f64> {
        w.0.iter().fold(Matrix2::identity(), |acc, &l| acc * self.letter(l))
    }

    pub fn trace(&self, w: &FreeWord) -> f64 {
        self.word_matrix(w).trace()
    }

    /// Largest relative deviation of the three boundary traces.
    pub fn trace_identity_error(&self) -> f64 {
        let want = |b: f64| 2.0 * (0.5 * b).cosh();
        let got = [
            self.a1.trace().abs(),
            self.a2.trace().abs(),
            (self.a1 * self.a2).trace().abs(),
        ];
        [self.b1, self.b2, self.b3]
            .iter()
            .zip(got)
            .map(|(&b, t)| (t - want(b)).abs() / want(b))
            .fold(0.0, f64::max)
    }

    /// `2 arccosh(|tr|/2)` for a nonempty cyclically reduced word.
    pub fn geodesic_length(&self, w: &FreeWord) -> Result<f64> {
        if w.is_empty() || !w.is_cyclically_reduced() {
            return Err(Error::domain("word must be nonempty and cyclically reduced"));
        }
        length_from_trace(self.trace(w))
    }

    /// Length of a cyclically reduced word together with its partial
    /// derivatives in `(b1, b2, b3)`, by the product rule along the word.
    pub fn length_gradient(&self, w: &FreeWord) -> Result<(f64, [f64; 3])> {
        if w.is_empty() || !w.is_cyclically_reduced() {
            return Err(Error::domain("word must be nonempty and cyclically reduced"));
        }
        let zero = Matrix2::zeros();
        let dx = -(0.5 * self.b1).sinh();
        let dy = -(0.5 * self.b2).sinh();
        let c = self.a2[(0, 1)];
        // c = -e^{b3/2}
        let d1 = Matrix2::new(dx, 0.0, 0.0, 0.0);
        let d2 = Matrix2::new(0.0, 0.0, 0.0, dy);
        let d3 = Matrix2::new(0.0, 0.5 * c, 0.5 / c, 0.0);
        let inv = |m: Matrix2<f64>| Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]);
        let mut m = Matrix2::identity();
        let mut dm = [zero; 3];
        for &l in &w.0 {
            let (base, parts) = if l.abs() == 1 { (self.a1, [d1, zero, zero]) } else { (self.a2, [zero, d2, d3]) };
            let (letter, dl) = if l > 0 { (base, parts) } else { (inv(base), parts.map(inv)) };
            for i in 0..3 {
                dm[i] = dm[i] * letter + m * dl[i];
            }
            m *= letter;
        }
        let t = m.trace();
        let len = length_from_trace(t)?;
        let u = 0.5 * t.abs();
        let denom = ((u - 1.0) * (u + 1.0)).sqrt();
        let grad = dm.map(|d| t.signum() * d.trace() / denom);
        Ok((len, grad))
    }

    /// Lengths `(t1, t2)` of the two arcs into which the simple
    /// orthogeodesic from `b3` to itself cuts `b3`, and the orthogeodesic
    /// length, from the right-angled pentagons
    /// `cosh(b_i/2) = sinh(t_i/2) sinh(alpha/2)`.
    pub fn orthogeodesic_split(&self) -> Result<(f64, f64, f64)> {
        let c1 = (0.5 * self.b1).cosh();
        let c2 = (0.5 * self.b2).cosh();
        let b3 = self.b3;
        let f = |t1: f64| c1 * (0.5 * (b3 - t1)).sinh() - c2 * (0.5 * t1).sinh();
        let t1 = crate::numeric::brent(f, 0.0, b3, 1e-15)?;
        let t2 = b3 - t1;
        let alpha = 2.0 * (c1 / (0.5 * t1).sinh()).asinh();
        Ok((t1, t2, alpha))
    }
}

pub fn length_from_trace(tr: f64) -> Result<f64> {
    let t = tr.abs();
    if !(t > 2.0) {
        return Err(Error::Geometry(format!(
            "non-hyperbolic word: |trace| = {t} is not above 2"
        )));
    }
    Ok(2.0 * (0.5 * t).acosh())
}

/// Not conjugate to a power of `a1`, `a2` or `a1 a2`.
pub fn is_filling(w: &FreeWord) -> Result<bool> {
    let c = w.cyclically_reduced();
    if c.is_empty() {
        return Err(Error::domain("empty word"));
    }
    let letters = &c.0;
    let single = letters.iter().all(|&l| l == letters[0]);
    if single {
        return Ok(false);
    }
    // cyclic rotations of (a1 a2)^k or (a2^-1 a1^-1)^k
    let n = letters.len();
    let third = n % 2 == 0
        && (0..n).all(|i| {
            let (a, b) = (letters[i], letters[(i + 1) % n]);
            (a == 1 && b == 2) || (a == 2 && b == 1) || (a == -1 && b == -2) || (a == -2 && b == -1)
        })
        && (letters.iter().all(|&l| l > 0) || letters.iter().all(|&l| l < 0));
    Ok(!third)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i8]) -> FreeWord {
        FreeWord(v.to_vec())
    }

    #[test]
    fn traces_match_boundaries() {
        let p = PantsModel::from_lengths(1.0, 1.0, 1.0).unwrap();
        assert!(p.trace_identity_error() < 1e-12);
        assert!((p.geodesic_length(&w(&[1])).unwrap() - 1.0).abs() < 1e-12);
        assert!((p.geodesic_length(&w(&[1, 2])).unwrap() - 1.0).abs() < 1e-12);
        assert!((p.geodesic_length(&w(&[1, 1])).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn figure_eight_identity() {
        let (b1, b2, b3) = (0.7, 1.3, 2.1);
        let p = PantsModel::from_lengths(b1, b2, b3).unwrap();
        let l = p.geodesic_length(&w(&[1, -2])).unwrap();
        let want = 2.0 * (0.5 * b1).cosh() * (0.5 * b2).cosh() + (0.5 * b3).cosh();
        assert!(((0.5 * l).cosh() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn filling_classification() {
        assert!(!is_filling(&w(&[1, 1, 1, 1, 1])).unwrap());
        assert!(!is_filling(&w(&[1, 2, 1, 2, 1, 2])).unwrap());
        assert!(!is_filling(&w(&[-2, -1, -2, -1])).unwrap());
        assert!(!is_filling(&w(&[2, 1])).unwrap());
        assert!(is_filling(&w(&[1, 2, -1, 2])).unwrap());
        assert!(is_filling(&w(&[1, -2])).unwrap());
        assert!(is_filling(&w(&[1, 1, 2])).unwrap());
        assert!(is_filling(&w(&[])).is_err());
    }

    #[test]
    fn gradient_matches_differences() {
        let word = w(&[1, 1, -2, 1, 2, 2]);
        let b = [0.8, 1.4, 2.2];
        let p = PantsModel::from_lengths(b[0], b[1], b[2]).unwrap();
        let (len, grad) = p.length_gradient(&word).unwrap();
        assert!((len - p.geodesic_length(&word).unwrap()).abs() < 1e-13);
        for i in 0..3 {
            let step = 1e-6;
            let mut up = b;
            let mut down = b;
            up[i] += step;
            down[i] -= step;
            let at = |x: [f64; 3]| PantsModel::from_lengths(x[0], x[1], x[2]).unwrap().geodesic_length(&word).unwrap();
            let fd = (at(up) - at(down)) / (2.0 * step);
            assert!((fd - grad[i]).abs() < 1e-7 * (1.0 + fd.abs()), "{i}: {fd} vs {}", grad[i]);
        }
    }

    #[test]
    fn figure_eight_gradient_near_zero() {
        // cosh(l/2) = 2 cosh(b1/2) cosh(b2/2) + cosh(b3/2)
        let (b1, b2, b3) = (0.3, 0.4, 1e-7);
        let p = PantsModel::from_lengths(b1, b2, b3).unwrap();
        let (l, g) = p.length_gradient(&w(&[1, -2])).unwrap();
        let want = (0.5 * b3).sinh() / (0.5 * l).sinh();
        assert!((g[2] - want).abs() < 1e-6 * want, "{} vs {want}", g[2]);
    }

    #[test]
    fn orthogeodesic_split_sums_to_b3() {
        let p = PantsModel::from_lengths(0.6, 0.9, 3.0).unwrap();
        let (t1, t2, alpha) = p.orthogeodesic_split().unwrap();
        assert!((t1 + t2 - 3.0).abs() < 1e-14);
        assert!(t1 < t2);
        let lhs = (0.45f64).cosh();
        assert!((lhs - (0.5 * t2).sinh() * (0.5 * alpha).sinh()).abs() < 1e-12);
    }
}
