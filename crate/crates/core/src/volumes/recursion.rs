//! Intersection-number form of the volume recursion.
//!
//! Tables hold `[tau_d]_{g,n}` with `V_{g,n}(2L) = sum_d [tau_d] prod L_i^{2 d_i} / (2 d_i + 1)!`.
//! Each value is a rational multiple of `pi^{2(D - |d|)}`; the exact scalar keeps
//! only the rational part and the float scalar carries the power of pi.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub(crate) trait Scalar: Clone + Send + Sync + 'static {
    fn nil() -> Self;
    /// `r * pi^(2 * pi2)`; exact scalars drop the pi factor.
    fn graded(r: &BigRational, pi2: u32) -> Self;
    fn int(v: i64) -> Self;
    fn add_assign(&mut self, o: &Self);
    fn mul(&self, o: &Self) -> Self;
}

impl Scalar for BigRational {
    fn nil() -> Self {
        Zero::zero()
    }
    fn graded(r: &BigRational, _pi2: u32) -> Self {
        r.clone()
    }
    fn int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Scalar for f64 {
    fn nil() -> Self {
        0.0
    }
    fn graded(r: &BigRational, pi2: u32) -> Self {
        ratio_to_f64(r) * (std::f64::consts::PI * std::f64::consts::PI).powi(pi2 as i32)
    }
    fn int(v: i64) -> Self {
        v as f64
    }
    fn add_assign(&mut self, o: &Self) {
        *self += *o;
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back on scaled integer division for extreme magnitudes
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub(crate) fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Even Bernoulli numbers `B_0, B_2, ..., B_{2 m}`.
pub(crate) fn even_bernoulli(m: usize) -> Vec<BigRational> {
    let top = 2 * m;
    let mut b: Vec<BigRational> = Vec::with_capacity(top + 1);
    b.push(BigRational::one());
    for k in 1..=top as u32 {
        let mut s = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            s += BigRational::from_integer(binomial(k + 1, j as u32)) * bj;
        }
        b.push(-s / BigRational::from_integer(BigInt::from(k + 1)));
    }
    (0..=m).map(|i| b[2 * i].clone()).collect()
}

/// Rational parts of `zeta(2L) (1 - 2^{1-2L})`, the pi power being `2L`.
pub(crate) fn eta_coefficients(count: usize) -> Vec<BigRational> {
    let bern = even_bernoulli(count);
    (0..=count)
        .map(|l| {
            if l == 0 {
                return BigRational::new(BigInt::one(), BigInt::from(2));
            }
            let two_l = 2 * l as u32;
            let zeta = bern[l].abs() * BigRational::from_integer(BigInt::from(2).pow(two_l))
                / BigRational::from_integer(BigInt::from(2) * factorial(two_l));
            let damp = BigRational::one()
                - BigRational::new(BigInt::one(), BigInt::from(2).pow(two_l - 1));
            zeta * damp
        })
        .collect()
}

pub(crate) fn dim(g: u32, n: u32) -> i64 {
    3 * g as i64 - 3 + n as i64
}

pub(crate) fn stable(g: u32, n: u32) -> bool {
    2 * g as i64 - 2 + n as i64 > 0
}

/// Non-increasing sequences of length `n` with sum at most `max_sum`.
pub(crate) fn sorted_indices(n: usize, max_sum: usize) -> Vec<Vec<u8>> {
    fn rec(n: usize, cap: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..=cap.min(left) {
            cur.push(v as u8);
            rec(n, v, left - v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, max_sum, max_sum, &mut Vec::with_capacity(n), &mut out);
    out
}

fn insert_sorted(base: &[u8], v: u8, buf: &mut Vec<u8>) {
    buf.clear();
    let mut placed = false;
    for &b in base {
        if !placed && v >= b {
            buf.push(v);
            placed = true;
        }
        buf.push(b);
    }
    if !placed {
        buf.push(v);
    }
}

pub(crate) struct Table<S> {
    pub g: u32,
    pub n: u32,
    pub dim: i64,
    pub keys: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    pub values: Vec<S>,
    /// `Z_J(s) = sum_k a_{s+k} [tau_k tau_J]`, stored for `s >= -dim`.
    half: HashMap<Vec<u8>, Vec<S>>,
}

impl<S: Scalar> Table<S> {
    pub fn get(&self, sorted: &[u8]) -> Option<&S> {
        self.index.get(sorted).map(|&i| &self.values[i])
    }

    fn half_at(&self, j: &[u8], s: i64) -> Option<&S> {
        let row = self.half.get(j)?;
        let off = s + self.dim;
        if off < 0 {
            return None;
        }
        row.get(off as usize)
    }
}

pub(crate) struct Engine<S> {
    limit: i64,
    eta: Vec<S>,
    tables: RwLock<HashMap<(u32, u32), Arc<Table<S>>>>,
    writer: Mutex<()>,
}

impl<S: Scalar> Engine<S> {
    /// Engine able to build tables up to dimension `limit`.
    pub fn new(limit: u32) -> Self {
        let limit = limit as i64;
        let count = (2 * limit + 6) as usize;
        let eta = eta_coefficients(count)
            .iter()
            .enumerate()
            .map(|(l, r)| S::graded(r, l as u32))
            .collect();
        Engine {
            limit,
            eta,
            tables: RwLock::new(HashMap::new()),
            writer: Mutex::new(()),
        }
    }

    pub fn limit(&self) -> i64 {
        self.limit
    }

    pub fn table(&self, g: u32, n: u32) -> Result<Arc<Table<S>>> {
        if let Some(t) = self.tables.read().expect("volume table lock").get(&(g, n)) {
            return Ok(t.clone());
        }
        self.ensure(g, n)?;
        Ok(self.tables.read().expect("volume table lock")[&(g, n)].clone())
    }

    fn ensure(&self, g: u32, n: u32) -> Result<()> {
        if !stable(g, n) {
            return Err(Error::domain(format!("unstable signature ({g},{n})")));
        }
        let _w = self.writer.lock().expect("volume writer lock");
        if self.tables.read().expect("volume table lock").contains_key(&(g, n)) {
            return Ok(());
        }
        if n == 0 {
            if dim(g, 1) > self.limit {
                return Err(Error::resource(format!(
                    "signature ({g},0) needs dimension {} beyond limit {}",
                    dim(g, 1),
                    self.limit
                )));
            }
            self.build_closure(g, 1)?;
            let t = self.closed_surface(g);
            self.publish(t);
            return Ok(());
        }
        if dim(g, n) > self.limit {
            return Err(Error::resource(format!(
                "signature ({g},{n}) has dimension {} beyond limit {}",
                dim(g, n),
                self.limit
            )));
        }
        self.build_closure(g, n)
    }

    fn publish(&self, t: Table<S>) {
        self.tables
            .write()
            .expect("volume table lock")
            .insert((t.g, t.n), Arc::new(t));
    }

    fn build_closure(&self, g: u32, n: u32) -> Result<()> {
        let mut todo = Vec::new();
        for gg in 0..=g {
            for nn in 1..=(g + n - gg) {
                if stable(gg, nn) && 2 * gg + nn <= 2 * g + n {
                    todo.push((gg, nn));
                }
            }
        }
        todo.sort_by_key(|&(gg, nn)| (2 * gg + nn, gg));
        for (gg, nn) in todo {
            let have = self.tables.read().expect("volume table lock").contains_key(&(gg, nn));
            if !have {
                let t = self.build(gg, nn);
                self.publish(t);
            }
        }
        Ok(())
    }

    fn snapshot(&self) -> HashMap<(u32, u32), Arc<Table<S>>> {
        self.tables.read().expect("volume table lock").clone()
    }

    fn build(&self, g: u32, n: u32) -> Table<S> {
        let d = dim(g, n);
        let keys = sorted_indices(n as usize, d as usize);
        let lower = self.snapshot();
        let values: Vec<S> = keys
            .par_iter()
            .map(|k| self.entry(g, n, k, &lower))
            .collect();
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let mut t = Table {
            g,
            n,
            dim: d,
            keys,
            index,
            values,
            half: HashMap::new(),
        };
        t.half = self.half_contractions(&t);
        t
    }

    fn half_contractions(&self, t: &Table<S>) -> HashMap<Vec<u8>, Vec<S>> {
        let d = t.dim;
        let s_hi = self.limit + 2;
        let js = sorted_indices(t.n as usize - 1, d as usize);
        js.into_par_iter()
            .map(|j| {
                let js: i64 = j.iter().map(|&v| v as i64).sum();
                let mut buf = Vec::with_capacity(j.len() + 1);
                let row: Vec<S> = (-d..=s_hi)
                    .map(|s| {
                        let mut acc = S::nil();
                        for k in 0..=(d - js) {
                            let l = s + k;
                            if l < 0 {
                                continue;
                            }
                            insert_sorted(&j, k as u8, &mut buf);
                            if let Some(v) = t.get(&buf) {
                                acc.add_assign(&self.eta[l as usize].mul(v));
                            }
                        }
                        acc
                    })
                    .collect();
                (j, row)
            })
            .collect()
    }

    fn entry(
        &self,
        g: u32,
        n: u32,
        key: &[u8],
        lower: &HashMap<(u32, u32), Arc<Table<S>>>,
    ) -> S {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        if (g, n) == (0, 3) {
            return S::int(1);
        }
        if (g, n) == (1, 1) {
            return if key[0] == 1 {
                S::graded(&half, 0)
            } else {
                S::graded(&BigRational::new(BigInt::one(), BigInt::from(12)), 1)
            };
        }
        let d1 = key[0] as i64;
        let rest = &key[1..];
        let mut buf = Vec::with_capacity(n as usize + 1);
        let mut total = S::nil();

        // removal of a boundary adjacent to the distinguished one
        if n >= 2 && stable(g, n - 1) {
            let t = &lower[&(g, n - 1)];
            let mut acc = S::nil();
            let mut i = 0;
            while i < rest.len() {
                let dj = rest[i];
                let mult = rest.iter().filter(|&&v| v == dj).count();
                let mut others: Vec<u8> = rest.to_vec();
                others.remove(i);
                let os: i64 = others.iter().map(|&v| v as i64).sum();
                let mut inner = S::nil();
                for l in 0..self.eta.len() as i64 {
                    let k = d1 + dj as i64 + l - 1;
                    if k < 0 {
                        continue;
                    }
                    if k + os > t.dim {
                        break;
                    }
                    insert_sorted(&others, k as u8, &mut buf);
                    if let Some(v) = t.get(&buf) {
                        inner.add_assign(&self.eta[l as usize].mul(v));
                    }
                }
                acc.add_assign(&inner.mul(&S::int(8 * (2 * dj as i64 + 1) * mult as i64)));
                i += mult;
            }
            total.add_assign(&acc);
        }

        // non-separating cut
        if g >= 1 && stable(g - 1, n + 1) {
            let t = &lower[&(g - 1, n + 1)];
            let rs: i64 = rest.iter().map(|&v| v as i64).sum();
            let mut acc = S::nil();
            for k1 in 0..=(t.dim - rs).max(-1) {
                insert_sorted(rest, k1 as u8, &mut buf);
                if let Some(z) = t.half_at(&buf, k1 + 2 - d1) {
                    acc.add_assign(z);
                }
            }
            total.add_assign(&acc.mul(&S::int(16)));
        }

        // separating cut, summed over sub-multisets of the remaining indices
        let mut groups: Vec<(u8, usize)> = Vec::new();
        for &v in rest {
            match groups.last_mut() {
                Some((val, m)) if *val == v => *m += 1,
                _ => groups.push((v, 1)),
            }
        }
        let mut choice = vec![0usize; groups.len()];
        let mut acc = S::nil();
        loop {
            let mut part_i = Vec::new();
            let mut part_j = Vec::new();
            let mut weight = BigInt::one();
            for ((val, m), &c) in groups.iter().zip(&choice) {
                part_i.extend(std::iter::repeat_n(*val, c));
                part_j.extend(std::iter::repeat_n(*val, m - c));
                weight *= binomial(*m as u32, c as u32);
            }
            let ni = part_i.len() as u32 + 1;
            let nj = part_j.len() as u32 + 1;
            let is: i64 = part_i.iter().map(|&v| v as i64).sum();
            let w = S::int(weight.to_i64().expect("small binomial"));
            for g1 in 0..=g {
                let g2 = g - g1;
                if !stable(g1, ni) || !stable(g2, nj) {
                    continue;
                }
                let t1 = &lower[&(g1, ni)];
                let t2 = &lower[&(g2, nj)];
                let mut inner = S::nil();
                for k1 in 0..=(t1.dim - is).max(-1) {
                    insert_sorted(&part_i, k1 as u8, &mut buf);
                    let Some(x) = t1.get(&buf) else { continue };
                    if let Some(z) = t2.half_at(&part_j, k1 + 2 - d1) {
                        inner.add_assign(&x.mul(z));
                    }
                }
                acc.add_assign(&inner.mul(&w));
            }
            // next sub-multiset
            let mut pos = 0;
            loop {
                if pos == groups.len() {
                    total.add_assign(&acc.mul(&S::int(16)));
                    return total;
                }
                if choice[pos] < groups[pos].1 {
                    choice[pos] += 1;
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
        }
    }

    /// `V_{g,0}` from the derivative of `V_{g,1}` at `2 pi i`.
    fn closed_surface(&self, g: u32) -> Table<S> {
        let t = self.tables.read().expect("volume table lock")[&(g, 1)].clone();
        let mut acc = S::nil();
        for k in 1..=t.dim {
            let tau = t.get(&[k as u8]).expect("coefficient present");
            let mut r = BigRational::from_integer(BigInt::from(2 * k) * BigInt::from(-4).pow(k as u32 - 1));
            r /= BigRational::from_integer(
                BigInt::from(4).pow(k as u32) * factorial(2 * k as u32 + 1) * BigInt::from(2 * g as i64 - 2),
            );
            acc.add_assign(&tau.mul(&S::graded(&r, k as u32 - 1)));
        }
        let keys = vec![Vec::new()];
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Table {
            g,
            n: 0,
            dim: dim(g, 0),
            keys,
            index,
            values: vec![acc],
            half: HashMap::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn eta_values() {
        let a = eta_coefficients(3);
        assert_eq!(a[0], q(1, 2));
        assert_eq!(a[1], q(1, 12));
        assert_eq!(a[2], q(7, 720));
        assert_eq!(a[3], q(31, 30240));
    }

    #[test]
    fn four_holed_sphere_numbers() {
        let e: Engine<BigRational> = Engine::new(6);
        let t = e.table(0, 4).unwrap();
        assert_eq!(t.get(&[1, 0, 0, 0]).unwrap(), &q(12, 1));
        assert_eq!(t.get(&[0, 0, 0, 0]).unwrap(), &q(2, 1));
    }

    #[test]
    fn float_matches_exact() {
        let e: Engine<BigRational> = Engine::new(8);
        let f: Engine<f64> = Engine::new(8);
        let te = e.table(2, 2).unwrap();
        let tf = f.table(2, 2).unwrap();
        for (k, v) in te.keys.iter().zip(&te.values) {
            let pi2 = (te.dim - k.iter().map(|&x| x as i64).sum::<i64>()) as u32;
            let want = <f64 as Scalar>::graded(v, pi2);
            let got = *tf.get(k).unwrap();
            assert!((got - want).abs() <= 1e-12 * want.abs(), "{k:?}");
        }
    }

    #[test]
    fn limit_is_enforced() {
        // (2,0) has dimension 3 but is reached through (2,1), dimension 4
        let e: Engine<BigRational> = Engine::new(3);
        assert!(matches!(e.table(2, 0), Err(Error::Resource(_))));
        assert!(Engine::<BigRational>::new(4).table(2, 0).is_ok());
        assert!(matches!(e.table(0, 2), Err(Error::Domain(_))));
    }
}
