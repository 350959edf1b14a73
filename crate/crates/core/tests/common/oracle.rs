//! Volume polynomials from the integral form of the recursion,
//! `d/dL1 (L1 V) = A_con + A_dcon + B`, acting on full (non-symmetrized)
//! polynomials in the boundary lengths.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

/// `coefficient * pi^(2 * pi2) * prod L_i^e_i`, keyed by `(e, pi2)`.
pub type Poly = HashMap<(Vec<u8>, u8), BigRational>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn fact(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

fn binom(n: u32, k: u32) -> BigInt {
    fact(n) / (fact(k) * fact(n - k))
}

/// Rational part of zeta(2i), with zeta(0) = -1/2.
fn zeta_even(count: usize) -> Vec<BigRational> {
    // Bernoulli numbers by the Akiyama–Tanigawa algorithm
    let m = 2 * count + 1;
    let mut bern = Vec::new();
    let mut a: Vec<BigRational> = Vec::new();
    for k in 0..=m {
        a.push(rat(1, k as i64 + 1));
        for j in (1..=k).rev() {
            let t = (&a[j - 1] - &a[j]) * BigRational::from_integer(BigInt::from(j));
            a[j - 1] = t;
        }
        bern.push(a[0].clone());
    }
    (0..=count)
        .map(|i| {
            if i == 0 {
                return rat(-1, 2);
            }
            let b = bern[2 * i].abs();
            b * BigRational::from_integer(BigInt::from(2).pow(2 * i as u32 - 1))
                / BigRational::from_integer(fact(2 * i as u32))
        })
        .collect()
}

pub struct Oracle {
    zeta: Vec<BigRational>,
    memo: HashMap<(u32, u32), Poly>,
}

impl Oracle {
    pub fn new() -> Self {
        Oracle {
            zeta: zeta_even(48),
            memo: HashMap::new(),
        }
    }

    /// `F_{2k+1}(t) = int_0^inf x^{2k+1} H(x, t) dx` as `[(power of t, coefficient, pi2)]`.
    fn kernel(&self, k: u32) -> Vec<(u32, BigRational, u8)> {
        (0..=k + 1)
            .map(|i| {
                let c = &self.zeta[i as usize]
                    * BigRational::from_integer(BigInt::from(2).pow(2 * i + 1) - BigInt::from(4))
                    * BigRational::from_integer(fact(2 * k + 1))
                    / BigRational::from_integer(fact(2 * k + 2 - 2 * i));
                (2 * k + 2 - 2 * i, c, i as u8)
            })
            .collect()
    }

    pub fn volume(&mut self, g: u32, n: u32) -> Poly {
        if let Some(p) = self.memo.get(&(g, n)) {
            return p.clone();
        }
        let p = self.compute(g, n);
        let d = 3 * g as i64 - 3 + n as i64;
        for (e, pi2) in p.keys() {
            let deg: i64 = e.iter().map(|&v| v as i64).sum();
            assert_eq!(deg + 2 * *pi2 as i64, 2 * d, "inhomogeneous term in ({g},{n})");
        }
        self.memo.insert((g, n), p.clone());
        p
    }

    fn compute(&mut self, g: u32, n: u32) -> Poly {
        let mut out = Poly::new();
        if (g, n) == (0, 3) {
            out.insert((vec![0, 0, 0], 0), BigRational::one());
            return out;
        }
        if (g, n) == (1, 1) {
            out.insert((vec![2], 0), rat(1, 48));
            out.insert((vec![0], 1), rat(1, 12));
            return out;
        }
        if n == 0 {
            return self.closed(g);
        }
        // derivative of L1 V, as a polynomial in (L1, ..., Ln)
        let mut deriv = Poly::new();
        let stable = |g: u32, n: u32| 2 * g as i64 - 2 + n as i64 > 0;

        // both new boundaries on one piece
        if g >= 1 && stable(g - 1, n + 1) {
            let lower = self.volume(g - 1, n + 1);
            // variables of lower: (x, y, L2..Ln)
            for ((e, pi2), c) in &lower {
                let (a2, b2) = (e[0] as u32, e[1] as u32);
                let w = BigRational::from_integer(fact(a2 + 1) * fact(b2 + 1))
                    / BigRational::from_integer(fact(a2 + b2 + 3));
                let k = (a2 + b2 + 2) / 2;
                for (tp, kc, kp) in self.kernel(k) {
                    let mut key = vec![tp as u8];
                    key.extend_from_slice(&e[2..]);
                    if !tail_sorted(&key) {
                        continue;
                    }
                    let coef = c * &w * kc * rat(1, 2);
                    *deriv.entry((key, pi2 + kp)).or_insert_with(BigRational::zero) += coef;
                }
            }
        }

        // separating: ordered pieces (g1, I) carrying x and (g2, J) carrying y
        let others: Vec<usize> = (1..n as usize).collect();
        let mut pieces = Vec::new();
        for mask in 0u32..(1 << others.len()) {
            let i_set: Vec<usize> = others.iter().copied().filter(|&v| mask >> (v - 1) & 1 == 1).collect();
            let j_set: Vec<usize> = others.iter().copied().filter(|&v| mask >> (v - 1) & 1 == 0).collect();
            for g1 in 0..=g {
                let g2 = g - g1;
                if stable(g1, i_set.len() as u32 + 1) && stable(g2, j_set.len() as u32 + 1) {
                    pieces.push((g1, g2, i_set.clone(), j_set.clone()));
                }
            }
        }
        let mut needed: Vec<(u32, u32)> = pieces
            .iter()
            .flat_map(|(g1, g2, i, j)| [(*g1, i.len() as u32 + 1), (*g2, j.len() as u32 + 1)])
            .collect();
        needed.sort();
        needed.dedup();
        for &(gg, nn) in &needed {
            self.volume(gg, nn);
        }
        let memo = &self.memo;
        let kernels: Vec<Vec<(u32, BigRational, u8)>> = (0..=24).map(|k| self.kernel(k)).collect();
        let partial: Vec<Poly> = pieces
            .par_iter()
            .map(|(g1, g2, i_set, j_set)| {
                let p1 = by_first(&memo[&(*g1, i_set.len() as u32 + 1)]);
                let p2 = by_first(&memo[&(*g2, j_set.len() as u32 + 1)]);
                let mut acc = Poly::new();
                for (a2, rest1) in &p1 {
                    for (b2, rest2) in &p2 {
                        let w = BigRational::from_integer(fact(a2 + 1) * fact(b2 + 1))
                            / BigRational::from_integer(fact(a2 + b2 + 3));
                        let k = ((a2 + b2 + 2) / 2) as usize;
                        for ((e1, p1pi), c1) in rest1 {
                            for ((e2, p2pi), c2) in rest2 {
                                let mut key = vec![0u8; n as usize];
                                for (slot, &v) in i_set.iter().zip(e1.iter()) {
                                    key[*slot] = v;
                                }
                                for (slot, &v) in j_set.iter().zip(e2.iter()) {
                                    key[*slot] = v;
                                }
                                if !tail_sorted(&key) {
                                    continue;
                                }
                                let base = c1 * c2 * &w * rat(1, 2);
                                for (tp, kc, kp) in &kernels[k] {
                                    key[0] = *tp as u8;
                                    *acc.entry((key.clone(), p1pi + p2pi + kp))
                                        .or_insert_with(BigRational::zero) += &base * kc;
                                }
                            }
                        }
                    }
                }
                acc
            })
            .collect();
        for p in partial {
            add_into(&mut deriv, p);
        }

        // one new boundary glued next to L_j
        if n >= 2 && stable(g, n - 1) {
            let lower = self.volume(g, n - 1);
            for j in 1..n as usize {
                for ((e, pi2), c) in &lower {
                    // lower variables: (x, L2..Ln without Lj)
                    let a = e[0] as u32;
                    if a % 2 != 0 {
                        continue;
                    }
                    let k = a / 2;
                    let rest: Vec<u8> = e[1..].to_vec();
                    for (tp, kc, kp) in self.kernel(k) {
                        // (L1 + Lj)^tp + (L1 - Lj)^tp, even powers of Lj survive twice
                        for r in (0..=tp).step_by(2) {
                            let mut key = vec![0u8; n as usize];
                            key[0] = (tp - r) as u8;
                            key[j] = r as u8;
                            let mut it = rest.iter();
                            for (slot, v) in key.iter_mut().enumerate().skip(1) {
                                if slot != j {
                                    *v = *it.next().unwrap();
                                }
                            }
                            if !tail_sorted(&key) {
                                continue;
                            }
                            let coef = c * &kc * BigRational::from_integer(binom(tp, r) * BigInt::from(2)) * rat(1, 2);
                            *deriv.entry((key, pi2 + kp)).or_insert_with(BigRational::zero) += coef;
                        }
                    }
                }
            }
        }

        // integrate in L1, divide by L1, and restore the symmetric tail
        for ((e, pi2), c) in deriv {
            if c.is_zero() {
                continue;
            }
            assert!(e[0] % 2 == 0, "odd power of L1 in derivative");
            let v = c * rat(1, e[0] as i64 + 1);
            for tail in tail_permutations(&e[1..]) {
                let mut key = vec![e[0]];
                key.extend(tail);
                *out.entry((key, pi2)).or_insert_with(BigRational::zero) += v.clone();
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Closed surfaces from `V'_{g,1}(2 pi i) = 2 pi i (2g - 2) V_g`.
    fn closed(&mut self, g: u32) -> Poly {
        let one = self.volume(g, 1);
        let mut total = BigRational::zero();
        let d = 3 * g - 3;
        for ((e, _), c) in &one {
            let p = e[0] as u32;
            if p == 0 {
                continue;
            }
            // c * p * (2 pi i)^{p-2}, p even
            let s = (p - 2) / 2;
            let sign = if s % 2 == 0 { 1 } else { -1 };
            total += c
                * BigRational::from_integer(BigInt::from(p) * BigInt::from(sign) * BigInt::from(4).pow(s))
                / BigRational::from_integer(BigInt::from(2 * g - 2));
        }
        let mut out = Poly::new();
        out.insert((vec![], d as u8), total);
        out
    }
}

fn by_first(p: &Poly) -> HashMap<u32, Vec<((Vec<u8>, u8), BigRational)>> {
    let mut out: HashMap<u32, Vec<_>> = HashMap::new();
    for ((e, pi2), c) in p {
        out.entry(e[0] as u32)
            .or_default()
            .push(((e[1..].to_vec(), *pi2), c.clone()));
    }
    out
}

fn add_into(dst: &mut Poly, src: Poly) {
    for (k, v) in src {
        *dst.entry(k).or_insert_with(BigRational::zero) += v;
    }
}

/// Only coefficients with non-increasing exponents in `L2..Ln` are produced
/// directly; the rest follow from symmetry in those variables.
fn tail_sorted(key: &[u8]) -> bool {
    key[1..].windows(2).all(|w| w[0] >= w[1])
}

fn tail_permutations(tail: &[u8]) -> Vec<Vec<u8>> {
    let mut cur = tail.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    let n = cur.len();
    if n < 2 {
        return out;
    }
    loop {
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
