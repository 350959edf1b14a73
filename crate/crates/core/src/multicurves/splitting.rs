use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use super::graph::{compositions, connected, ordered, permutations, vertex_pairs};
use crate::error::{Error, Result};

/// Default ceiling on raw candidate graphs examined by one enumeration.
pub const DEFAULT_SPLITTING_CAP: usize = 5_000_000;

/// A complementary piece: its genus and how many boundary legs of the
/// ambient surface it carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Part {
    pub genus: u32,
    pub legs: u32,
}

/// Cut multigraph of a multicurve: vertices are pieces, edges are curves.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SplittingType {
    pub g: u32,
    pub n: u32,
    pub parts: Vec<Part>,
    pub edges: Vec<(usize, usize)>,
}

impl SplittingType {
    pub fn j(&self) -> usize {
        self.edges.len()
    }

    pub fn q(&self) -> usize {
        self.parts.len()
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0; self.parts.len()];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    /// `(g_i, n_i)` with `n_i` counting legs and curve sides.
    pub fn signatures(&self) -> Vec<(u32, u32)> {
        self.parts.iter().zip(self.degrees()).map(|(p, d)| (p.genus, p.legs + d)).collect()
    }

    /// Sorted `(g_i, n_i)`, the data a gluing sequence starts from.
    pub fn part_data(&self) -> Vec<(u32, u32)> {
        let mut s = self.signatures();
        s.sort_unstable();
        s
    }

    pub fn is_connected(&self) -> bool {
        connected(self.parts.len(), self.edges.iter().copied())
    }

    /// `sum (2 g_i - 2 + n_i) = 2g - 2 + n` and every piece stable.
    pub fn euler_consistent(&self) -> bool {
        let sig = self.signatures();
        let total: i64 = sig.iter().map(|&(g, n)| 2 * g as i64 - 2 + n as i64).sum();
        total == 2 * self.g as i64 - 2 + self.n as i64 && sig.iter().all(|&(g, n)| 2 * g + n > 2)
    }

    /// Lexicographically least relabeling over all vertex permutations.
    pub fn canonical(&self) -> SplittingType {
        let q = self.parts.len();
        let mut best: Option<(Vec<Part>, Vec<(usize, usize)>)> = None;
        for perm in permutations(q) {
            // perm[i] is the new index of old vertex i
            let mut parts = vec![self.parts[0]; q];
            for (old, &new) in perm.iter().enumerate() {
                parts[new] = self.parts[old];
            }
            if let Some((bp, _)) = &best {
                if parts > *bp {
                    continue;
                }
            }
            let mut edges: Vec<_> = self.edges.iter().map(|&(a, b)| ordered(perm[a], perm[b])).collect();
            edges.sort_unstable();
            let cand = (parts, edges);
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
        let (parts, edges) = best.unwrap_or_default();
        SplittingType { g: self.g, n: self.n, parts, edges }
    }
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.signatures().iter().map(|(g, n)| format!("({g},{n})")).collect();
        let edges: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "{} | {}", parts.join(" "), edges.join(" "))
    }
}

fn multisets(items: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for i in start..items {
        cur.push(i);
        multisets(items, k, i, cur, f);
        cur.pop();
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product()
}

/// Isomorphism classes of connected cut multigraphs of `j` curves on
/// `S_{g,n}` with at most `max_parts` pieces.
pub fn enumerate_splittings(g: u32, n: u32, j: usize, max_parts: usize) -> Result<Vec<SplittingType>> {
    enumerate_splittings_capped(g, n, j, max_parts, DEFAULT_SPLITTING_CAP)
}

pub fn enumerate_splittings_capped(
    g: u32,
    n: u32,
    j: usize,
    max_parts: usize,
    cap: usize,
) -> Result<Vec<SplittingType>> {
    if 2 * g + n <= 2 {
        return Err(Error::domain(format!("S_{{{g},{n}}} is not hyperbolic")));
    }
    if max_parts == 0 {
        return Err(Error::domain("need at least one piece"));
    }
    // each piece has |chi| >= 1, so there are at most 2g - 2 + n of them
    let q_max = max_parts.min((2 * g + n - 2) as usize);
    let estimate: f64 = (1..=q_max)
        .map(|q| {
            let pairs = q * (q + 1) / 2;
            binomial(pairs + j - 1, j) * binomial(n as usize + q - 1, q - 1) * binomial(g as usize + q - 1, q - 1)
        })
        .sum();
    if estimate > cap as f64 {
        return Err(Error::resource(format!(
            "splitting enumeration for ({g},{n}), j={j}, Q={max_parts} needs ~{estimate:.3e} candidates, cap {cap}"
        )));
    }
    let per_q: Vec<BTreeSet<SplittingType>> = (1..=q_max)
        .into_par_iter()
        .map(|q| {
            let pairs = vertex_pairs(q);
            let mut found = BTreeSet::new();
            let leg_splits = compositions(n, q);
            multisets(pairs.len(), j, 0, &mut Vec::new(), &mut |choice| {
                let edges: Vec<(usize, usize)> = choice.iter().map(|&i| pairs[i]).collect();
                if !connected(q, edges.iter().copied()) {
                    return;
                }
                // genus of the graph's cycles
                let b1 = j + 1 - q;
                if b1 as u32 > g {
                    return;
                }
                let mut deg = vec![0u32; q];
                for &(a, b) in &edges {
                    deg[a] += 1;
                    deg[b] += 1;
                }
                for legs in &leg_splits {
                    for genera in compositions(g - b1 as u32, q) {
                        if (0..q).any(|i| 2 * genera[i] + legs[i] + deg[i] <= 2) {
                            continue;
                        }
                        let parts = (0..q).map(|i| Part { genus: genera[i], legs: legs[i] }).collect();
                        let t = SplittingType { g, n, parts, edges: edges.clone() };
                        found.insert(t.canonical());
                    }
                }
            });
            found
        })
        .collect();
    Ok(per_q.into_iter().flatten().collect())
}

/// `q^{2j}`, the orbit count bound.
pub fn orbit_upper(j: u32, q: u32) -> BigUint {
    BigUint::from(q).pow(2 * j)
}

/// Classes grouped by their sorted piece data `(g_i, n_i)`.
pub fn classes_by_part_data(classes: &[SplittingType]) -> BTreeMap<Vec<(u32, u32)>, Vec<SplittingType>> {
    let mut out: BTreeMap<_, Vec<_>> = BTreeMap::new();
    for c in classes {
        out.entry(c.part_data()).or_default().push(c.clone());
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct GluingReport {
    pub g: u32,
    pub n: u32,
    pub j: usize,
    pub parts: Vec<(u32, u32)>,
    pub sequences: u64,
    pub feasible: u64,
    pub valid: u64,
    pub expected: usize,
    pub hit: usize,
    /// Classes no gluing sequence produced.
    pub missing: Vec<SplittingType>,
}

impl GluingReport {
    pub fn surjective(&self) -> bool {
        self.missing.is_empty()
    }
}

/// Runs every sequence in `[q]^{2j}`, glues curve `k` between pieces
/// `i_k` and `i'_k`, and checks every class with these pieces is produced.
pub fn gluing_surjection_check(g: u32, n: u32, j: usize, parts: &[(u32, u32)]) -> Result<GluingReport> {
    let q = parts.len();
    if q == 0 {
        return Err(Error::domain("no pieces given"));
    }
    let total = (q as f64).powi(2 * j as i32);
    if total > 5e7 {
        return Err(Error::resource(format!("{total:.3e} gluing sequences is beyond exhaustion")));
    }
    let mut sorted = parts.to_vec();
    sorted.sort_unstable();
    let expected: Vec<SplittingType> = enumerate_splittings(g, n, j, q)?
        .into_iter()
        .filter(|c| c.q() == q && c.part_data() == sorted)
        .collect();
    let mut hits = BTreeSet::new();
    let (mut feasible, mut valid) = (0u64, 0u64);
    let mut seq = vec![0usize; 2 * j];
    let sequences = total as u64;
    for _ in 0..sequences {
        let mut deg = vec![0u32; q];
        for &i in &seq {
            deg[i] += 1;
        }
        if deg.iter().zip(parts).all(|(&d, &(_, ni))| d <= ni) {
            feasible += 1;
            let edges: Vec<(usize, usize)> = seq.chunks(2).map(|c| ordered(c[0], c[1])).collect();
            let legs: u32 = parts.iter().zip(&deg).map(|(&(_, ni), &d)| ni - d).sum();
            let genus: i64 = parts.iter().map(|&(gi, _)| gi as i64).sum::<i64>() + j as i64 - q as i64 + 1;
            if legs == n && genus == g as i64 && connected(q, edges.iter().copied()) {
                valid += 1;
                let t = SplittingType {
                    g,
                    n,
                    parts: parts
                        .iter()
                        .zip(&deg)
                        .map(|(&(gi, ni), &d)| Part { genus: gi, legs: ni - d })
                        .collect(),
                    edges,
                };
                hits.insert(t.canonical());
            }
        }
        // odometer step
        for slot in seq.iter_mut() {
            *slot += 1;
            if *slot < q {
                break;
            }
            *slot = 0;
        }
    }
    let missing: Vec<SplittingType> = expected.iter().filter(|c| !hits.contains(*c)).cloned().collect();
    Ok(GluingReport {
        g,
        n,
        j,
        parts: parts.to_vec(),
        sequences,
        feasible,
        valid,
        expected: expected.len(),
        hit: expected.len() - missing.len(),
        missing,
    })
}
