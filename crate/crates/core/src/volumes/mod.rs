//! Weil–Petersson volume polynomials.
//!
//! Public polynomials use the convention `V_{1,1}(x) = (x^2 + 4 pi^2) / 24`.
//! The recursion itself runs with half of that (the orbifold factor), which is
//! what makes `V_{2,0} = 43 pi^6 / 2160` come out; only the `(1,1)` polynomial
//! is rescaled on the way out.

mod bounds;
mod cache;
mod numeric;
pub(crate) mod recursion;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bounds::{
    coefficient_ratio, partition_sum, partition_sum_bound, volume_ratio, PartitionSumBound, VolumeSource,
};
pub use cache::{VolumeCache, CACHE_FORMAT_VERSION, DEFAULT_DIMENSION_CAP};
pub use numeric::{NumericVolumes, DEFAULT_NUMERIC_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub g: u32,
    pub n: u32,
}

impl Signature {
    pub fn new(g: u32, n: u32) -> Result<Self> {
        if !recursion::stable(g, n) {
            return Err(Error::domain(format!(
                "signature ({g},{n}) is not hyperbolic: 2g-2+n must be positive"
            )));
        }
        Ok(Signature { g, n })
    }

    /// Complex dimension `3g - 3 + n`.
    pub fn dim(&self) -> u32 {
        3 * self.g + self.n - 3
    }

    /// `2g - 2 + n`.
    pub fn abs_euler(&self) -> u32 {
        2 * self.g + self.n - 2
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.g, self.n)
    }
}

/// Even symmetric polynomial `sum_alpha q_alpha pi^{2(D-|alpha|)} prod x_i^{2 alpha_i}`.
///
/// Coefficients are stored once per orbit under permutation, keyed by the
/// non-increasing representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VolumePolynomial {
    pub sig: Signature,
    coeffs: BTreeMap<Vec<u32>, BigRational>,
}

impl VolumePolynomial {
    pub(crate) fn from_parts(sig: Signature, coeffs: BTreeMap<Vec<u32>, BigRational>) -> Self {
        VolumePolynomial { sig, coeffs }
    }

    /// Builds the public polynomial from intersection-form numbers.
    pub(crate) fn from_tau(sig: Signature, keys: &[Vec<u8>], values: &[BigRational]) -> Self {
        let mut coeffs = BTreeMap::new();
        let double = sig == Signature { g: 1, n: 1 };
        for (k, v) in keys.iter().zip(values) {
            let mut denom = BigInt::one();
            for &a in k {
                denom *= BigInt::from(4).pow(a as u32) * recursion::factorial(2 * a as u32 + 1);
            }
            let mut q = v / BigRational::from_integer(denom);
            if double {
                q *= BigRational::from_integer(BigInt::from(2));
            }
            coeffs.insert(k.iter().map(|&a| a as u32).collect(), q);
        }
        VolumePolynomial { sig, coeffs }
    }

    pub fn dim(&self) -> u32 {
        self.sig.dim()
    }

    /// Canonical (non-increasing) multi-indices with their rational parts.
    pub fn canonical_terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.coeffs.iter()
    }

    /// Rational part `q_alpha`; the full coefficient carries `pi^{2 * pi_power(alpha)}`.
    pub fn rational_coefficient(&self, alpha: &[u32]) -> Result<BigRational> {
        self.check_alpha(alpha)?;
        let mut key = alpha.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        Ok(self.coeffs.get(&key).cloned().unwrap_or_else(BigRational::zero))
    }

    pub fn pi_power(&self, alpha: &[u32]) -> u32 {
        self.dim() - alpha.iter().sum::<u32>()
    }

    /// `c_{g,n}(alpha)` as a float.
    pub fn coefficient(&self, alpha: &[u32]) -> Result<f64> {
        let q = self.rational_coefficient(alpha)?;
        Ok(recursion::ratio_to_f64(&q) * pi2().powi(self.pi_power(alpha) as i32))
    }

    fn check_alpha(&self, alpha: &[u32]) -> Result<()> {
        if alpha.len() != self.sig.n as usize {
            return Err(Error::domain(format!(
                "multi-index has {} entries, signature {} needs {}",
                alpha.len(),
                self.sig,
                self.sig.n
            )));
        }
        if alpha.iter().sum::<u32>() > self.dim() {
            return Err(Error::domain(format!(
                "multi-index {alpha:?} exceeds dimension {}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// The volume `V_{g,n} = c_{g,n}(0)`, as a rational multiple of `pi^{2D}`.
    pub fn constant_term(&self) -> BigRational {
        self.coeffs
            .get(&vec![0; self.sig.n as usize])
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn volume(&self) -> f64 {
        recursion::ratio_to_f64(&self.constant_term()) * pi2().powi(self.dim() as i32)
    }

    /// Numeric evaluation at boundary lengths `x`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.arity(x.len())?;
        if x.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::domain("boundary lengths must be nonnegative"));
        }
        let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
        let d = self.dim();
        let table: Vec<(Vec<u32>, f64)> = self
            .coeffs
            .iter()
            .map(|(k, q)| {
                let p = d - k.iter().sum::<u32>();
                (k.clone(), recursion::ratio_to_f64(q) * pi2().powi(p as i32))
            })
            .collect();
        let lookup: BTreeMap<Vec<u32>, f64> = table.into_iter().collect();
        let mut total = 0.0;
        let mut alpha = vec![0u32; x.len()];
        sum_monomials(&sq, d, 0, 1.0, &mut alpha, &mut |a, mono| {
            let mut key = a.to_vec();
            key.sort_unstable_by(|p, q| q.cmp(p));
            if let Some(c) = lookup.get(&key) {
                total += c * mono;
            }
        });
        Ok(total)
    }

    /// Exact evaluation at `x_i = r_i * pi`; the result multiplies `pi^{2D}`.
    pub fn evaluate_pi_multiples(&self, r: &[BigRational]) -> Result<BigRational> {
        self.arity(r.len())?;
        let sq: Vec<BigRational> = r.iter().map(|v| v * v).collect();
        let mut total = BigRational::zero();
        for (key, q) in &self.coeffs {
            for perm in distinct_permutations(key) {
                let mut term = q.clone();
                for (s, &a) in sq.iter().zip(&perm) {
                    term *= num_traits::pow(s.clone(), a as usize);
                }
                total += term;
            }
        }
        Ok(total)
    }

    fn arity(&self, len: usize) -> Result<()> {
        if len != self.sig.n as usize {
            return Err(Error::domain(format!(
                "expected {} boundary lengths for {}, got {len}",
                self.sig.n, self.sig
            )));
        }
        Ok(())
    }

    /// Every coefficient positive and bounded by the constant term.
    pub fn monotonicity_violations(&self) -> Vec<Vec<u32>> {
        let c0 = self.constant_term();
        self.coeffs
            .iter()
            .filter(|(k, q)| {
                // c(alpha) <= c(0) iff q_alpha <= q_0 pi^{2|alpha|}
                let s = k.iter().sum::<u32>();
                !q.is_positive() || !le_times_pi_power(q, &c0, s)
            })
            .map(|(k, _)| k.clone())
            .collect()
    }
}

fn pi2() -> f64 {
    std::f64::consts::PI * std::f64::consts::PI
}

/// Decides `q <= c0 * pi^{2s}` exactly using rational enclosures of `pi^2`.
pub(crate) fn le_times_pi_power(q: &BigRational, c0: &BigRational, s: u32) -> bool {
    let (lo, hi) = pi_squared_bounds();
    let lo_s = num_traits::pow(lo, s as usize);
    let hi_s = num_traits::pow(hi, s as usize);
    if *q <= c0 * &lo_s {
        return true;
    }
    if *q > c0 * &hi_s {
        return false;
    }
    // undecided at this precision: report it rather than guess
    false
}

/// Rational bounds `lo < pi^2 < hi` from 40-digit truncations of pi.
pub(crate) fn pi_squared_bounds() -> (BigRational, BigRational) {
    let digits: BigInt = "31415926535897932384626433832795028841971".parse().expect("digits");
    let scale = BigInt::from(10).pow(40);
    let lo = BigRational::new(digits.clone(), scale.clone());
    let hi = BigRational::new(digits + BigInt::one(), scale);
    (&lo * &lo, &hi * &hi)
}

fn sum_monomials<F: FnMut(&[u32], f64)>(
    sq: &[f64],
    left: u32,
    pos: usize,
    acc: f64,
    alpha: &mut Vec<u32>,
    f: &mut F,
) {
    if pos == sq.len() {
        f(alpha, acc);
        return;
    }
    let mut p = acc;
    for a in 0..=left {
        alpha[pos] = a;
        sum_monomials(sq, left - a, pos + 1, p, alpha, f);
        p *= sq[pos];
    }
    alpha[pos] = 0;
}

/// Distinct rearrangements of a multiset, in lexicographic order.
pub(crate) fn distinct_permutations(key: &[u32]) -> Vec<Vec<u32>> {
    let mut cur = key.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    loop {
        let n = cur.len();
        if n < 2 {
            return out;
        }
        let mut i = n - 1;
        while i > 0 && cur[i - 1] >= cur[i] {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        let mut j = n - 1;
        while cur[j] <= cur[i - 1] {
            j -= 1;
        }
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}
