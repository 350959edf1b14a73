//! Words in the free group on `a1, a2`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Letters are `1, -1, 2, -2` for `a1, a1^-1, a2, a2^-1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreeWord(pub Vec<i8>);

impl Serialize for FreeWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let s = self.syllables_linear();
        let parts: Vec<String> = s
            .iter()
            .map(|&(gen, m)| if m == 1 { format!("a{gen}") } else { format!("a{gen}^{m}") })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FreeWord {
    pub fn new(letters: Vec<i8>) -> Result<Self> {
        if letters.iter().any(|&l| !matches!(l, 1 | -1 | 2 | -2)) {
            return Err(Error::domain("letters must be ±1 or ±2"));
        }
        Ok(FreeWord(letters))
    }

    /// `a1^{m1} a2^{m2} ...`, alternating generators starting with `a1`.
    pub fn from_exponents(m: &[i32]) -> Self {
        let mut out = Vec::new();
        for (i, &e) in m.iter().enumerate() {
            let gen = if i % 2 == 0 { 1 } else { 2 };
            let l = if e > 0 { gen } else { -gen };
            out.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
        }
        FreeWord(out)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        FreeWord(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn concat(&self, other: &FreeWord) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        FreeWord(v).reduced()
    }

    pub fn pow(&self, k: usize) -> Self {
        FreeWord(self.0.repeat(k)).reduced()
    }

    /// Free reduction.
    pub fn reduced(&self) -> Self {
        let mut out: Vec<i8> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord(out)
    }

    /// Free and cyclic reduction.
    pub fn cyclically_reduced(&self) -> Self {
        let mut w = self.reduced().0;
        while w.len() >= 2 && w[0] == -w[w.len() - 1] {
            w.pop();
            w.remove(0);
        }
        FreeWord(w)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        let w = &self.0;
        w.windows(2).all(|p| p[0] != -p[1]) && (w.len() < 2 || w[0] != -w[w.len() - 1])
    }

    /// Representative of the class under rotation and inversion.
    pub fn canonical(&self) -> Self {
        let w = self.cyclically_reduced();
        let inv = w.inverse();
        let best_rot = |v: &[i8]| -> Vec<i8> {
            let n = v.len();
            (0..n.max(1))
                .map(|s| (0..n).map(|i| v[(s + i) % n]).collect::<Vec<i8>>())
                .min()
                .unwrap_or_default()
        };
        FreeWord(best_rot(&w.0).min(best_rot(&inv.0)))
    }

    /// True when the word is not a proper power (up to rotation).
    pub fn is_primitive(&self) -> bool {
        let w = &self.0;
        let n = w.len();
        (1..n).filter(|d| n % d == 0).all(|d| (0..n).any(|i| w[i] != w[(i + d) % n]))
    }

    /// Runs of a single generator, read linearly: `(generator, signed exponent)`.
    fn syllables_linear(&self) -> Vec<(i8, i32)> {
        let mut out: Vec<(i8, i32)> = Vec::new();
        for &l in &self.0 {
            let gen = l.abs();
            let step = if l > 0 { 1 } else { -1 };
            match out.last_mut() {
                Some((g, m)) if *g == gen && (*m > 0) == (step > 0) => *m += step,
                _ => out.push((gen, step)),
            }
        }
        out
    }

    /// Cyclic syllable decomposition `(m_1, ..., m_{2k})` starting on an `a1`
    /// run. `None` when only one generator occurs or a run changes sign
    /// (impossible in a cyclically reduced word).
    pub fn cyclic_exponents(&self) -> Option<Vec<i32>> {
        let w = self.cyclically_reduced();
        let n = w.len();
        if n == 0 || w.0.iter().all(|l| l.abs() == w.0[0].abs()) {
            return None;
        }
        // start where an a1 letter follows an a2 letter
        let start = (0..n).find(|&i| w.0[i].abs() == 1 && w.0[(i + n - 1) % n].abs() == 2)?;
        let rotated = FreeWord((0..n).map(|i| w.0[(start + i) % n]).collect());
        let syl = rotated.syllables_linear();
        if syl.len() % 2 != 0 {
            return None;
        }
        Some(syl.into_iter().map(|(_, m)| m).collect())
    }
}

/// Calls `f` on every cyclically reduced word of length `len` whose first
/// letter is `first`.
pub fn for_each_cyclic_word<F: FnMut(&FreeWord)>(len: usize, first: i8, f: &mut F) {
    fn rec<F: FnMut(&FreeWord)>(len: usize, cur: &mut Vec<i8>, f: &mut F) {
        if cur.len() == len {
            if len < 2 || cur[0] != -cur[len - 1] {
                f(&FreeWord(cur.clone()));
            }
            return;
        }
        let last = *cur.last().expect("nonempty prefix");
        for l in [1i8, -1, 2, -2] {
            if l != -last {
                cur.push(l);
                rec(len, cur, f);
                cur.pop();
            }
        }
    }
    if len == 0 {
        return;
    }
    let mut cur = vec![first];
    rec(len, &mut cur, f);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i8]) -> FreeWord {
        FreeWord(v.to_vec())
    }

    #[test]
    fn reduction() {
        assert_eq!(w(&[1, 2, -2, -1, 2]).reduced(), w(&[2]));
        assert_eq!(w(&[-1, 2, 1]).cyclically_reduced(), w(&[2]));
    }

    #[test]
    fn canonical_is_class_invariant() {
        let a = w(&[1, 2, 2, -1, 2]);
        let rot = w(&[2, -1, 2, 1, 2]);
        assert_eq!(a.canonical(), rot.canonical());
        assert_eq!(a.canonical(), a.inverse().canonical());
        assert_eq!(a.canonical().canonical(), a.canonical());
    }

    #[test]
    fn exponent_form() {
        let a = FreeWord::from_exponents(&[2, -1, 1, 3]);
        assert_eq!(a.0, vec![1, 1, -2, 1, 2, 2, 2]);
        assert_eq!(a.cyclic_exponents(), Some(vec![2, -1, 1, 3]));
        let rot = w(&[-2, 1, 2, 2, 2, 1, 1]);
        assert_eq!(rot.cyclic_exponents().unwrap().len(), 4);
        assert_eq!(w(&[1, 1, 1]).cyclic_exponents(), None);
    }

    #[test]
    fn primitivity() {
        assert!(w(&[1, 2, -1, 2]).is_primitive());
        assert!(!w(&[1, 2, 1, 2]).is_primitive());
        assert!(!w(&[1, 1]).is_primitive());
    }

    #[test]
    fn word_counts() {
        // enumeration agrees with filtering all words
        for len in 1..=6 {
            let mut count = 0;
            for first in [1i8, -1, 2, -2] {
                for_each_cyclic_word(len, first, &mut |_| count += 1);
            }
            let mut brute = 0;
            for code in 0..4usize.pow(len as u32) {
                let mut c = code;
                let v: Vec<i8> = (0..len)
                    .map(|_| {
                        let l = [1i8, -1, 2, -2][c % 4];
                        c /= 4;
                        l
                    })
                    .collect();
                if FreeWord(v).is_cyclically_reduced() {
                    brute += 1;
                }
            }
            assert_eq!(count, brute);
        }
    }
}
