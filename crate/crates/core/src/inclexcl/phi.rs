//! Realization sums over complement skeletons of a filling type and `j`
//! extra cylinders in a closed surface of genus `g`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multicurves::{compositions, connected, ordered, permutations, vertex_pairs};
use crate::numeric::line_fit;
use crate::volumes::{NumericVolumes, Signature};

/// Default truncation of the cylinder count.
pub const DEFAULT_J_MAX: usize = 12;
/// Default ceiling on raw skeleton candidates.
pub const DEFAULT_SKELETON_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FillingType {
    /// A simple closed curve; cutting along it leaves two sides of length `x`.
    Cylinder,
    /// A pair of pants with boundaries `x1, x2, x3`.
    Pants,
}

impl FillingType {
    pub fn euler(&self) -> u32 {
        match self {
            FillingType::Cylinder => 0,
            FillingType::Pants => 1,
        }
    }

    /// Boundary components of the filled surface.
    pub fn n_s(&self) -> u32 {
        match self {
            FillingType::Cylinder => 2,
            FillingType::Pants => 3,
        }
    }

    /// Number of length arguments `x`.
    pub fn arity(&self) -> usize {
        match self {
            FillingType::Cylinder => 1,
            FillingType::Pants => 3,
        }
    }
}

/// Complement pieces with their genera; `s_ends` are the pieces touched by
/// the filling type (both sides of the curve, or the three pants cuffs) and
/// `y_edges[k]` the two sides of cylinder `k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Skeleton {
    pub filling: FillingType,
    pub genera: Vec<u32>,
    pub s_ends: Vec<usize>,
    pub y_edges: Vec<(usize, usize)>,
}

/// Length label on one side of a cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    X(usize),
    Y(usize),
}

impl Skeleton {
    pub fn q(&self) -> usize {
        self.genera.len()
    }

    fn sides(&self) -> Vec<Vec<Side>> {
        let mut s = vec![Vec::new(); self.q()];
        match self.filling {
            FillingType::Cylinder => {
                s[self.s_ends[0]].push(Side::X(0));
                s[self.s_ends[1]].push(Side::X(0));
            }
            FillingType::Pants => {
                for (i, &v) in self.s_ends.iter().enumerate() {
                    s[v].push(Side::X(i));
                }
            }
        }
        for (k, &(a, b)) in self.y_edges.iter().enumerate() {
            s[a].push(Side::Y(k));
            s[b].push(Side::Y(k));
        }
        s
    }

    /// `(g_i, n_i)` of the complement pieces.
    pub fn signatures(&self) -> Vec<(u32, u32)> {
        self.genera.iter().zip(self.sides()).map(|(&g, s)| (g, s.len() as u32)).collect()
    }

    pub fn canonical(&self) -> Skeleton {
        let mut best: Option<Skeleton> = None;
        for perm in permutations(self.q()) {
            let mut genera = vec![0; self.q()];
            for (old, &new) in perm.iter().enumerate() {
                genera[new] = self.genera[old];
            }
            let mut s_ends: Vec<usize> = self.s_ends.iter().map(|&v| perm[v]).collect();
            if self.filling == FillingType::Cylinder {
                s_ends.sort_unstable();
            }
            let y_edges = self.y_edges.iter().map(|&(a, b)| ordered(perm[a], perm[b])).collect();
            let cand = Skeleton { filling: self.filling, genera, s_ends, y_edges };
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
        best.expect("at least one permutation")
    }

    /// `prod V_{g_i,n_i}` at the induced boundary lengths.
    pub fn volume_product(&self, vols: &NumericVolumes, x: &[f64], y: &[f64]) -> Result<f64> {
        let mut prod = 1.0;
        for (&g, sides) in self.genera.iter().zip(self.sides()) {
            let lengths: Vec<f64> = sides
                .iter()
                .map(|s| match *s {
                    Side::X(i) => x[i],
                    Side::Y(k) => y[k],
                })
                .collect();
            prod *= vols.evaluate(Signature::new(g, lengths.len() as u32)?, &lengths)?;
        }
        Ok(prod)
    }

    /// `prod V_{g_i,n_i}` of the constant terms.
    pub fn volume_constant(&self, vols: &NumericVolumes) -> Result<f64> {
        self.signatures().iter().map(|&(g, n)| vols.volume_gn(g, n)).product()
    }
}

fn cartesian(choices: usize, len: usize, f: &mut dyn FnMut(&[usize])) {
    let mut idx = vec![0usize; len];
    loop {
        f(&idx);
        let mut pos = 0;
        while pos < len {
            idx[pos] += 1;
            if idx[pos] < choices {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == len {
            return;
        }
    }
}

/// Skeletons of the filling type plus `j` cylinders in `S_g` whose
/// complement has at most `q_max` components, one per isomorphism class.
pub fn skeletons(filling: FillingType, j: usize, q_max: usize, g: u32, cap: usize) -> Result<Vec<Skeleton>> {
    if g < 2 || q_max == 0 {
        return Err(Error::domain("skeletons need g >= 2 and Q >= 1"));
    }
    // every piece has |chi| >= 1 and they add up to 2g - 2 - chi(S)
    let q_top = q_max.min((2 * g - 2 - filling.euler()) as usize);
    let mut estimate = 0.0;
    for q in 1..=q_top {
        let pairs = (q * (q + 1) / 2) as f64;
        let s_choices = match filling {
            FillingType::Cylinder => pairs,
            FillingType::Pants => (q as f64).powi(3),
        };
        estimate += s_choices * pairs.powi(j as i32) * compositions(g, q).len() as f64;
    }
    if estimate > cap as f64 {
        return Err(Error::resource(format!(
            "skeleton enumeration at g={g}, j={j}, Q={q_max} needs ~{estimate:.3e} candidates, cap {cap}"
        )));
    }
    let found: Vec<BTreeSet<Skeleton>> = (1..=q_top)
        .into_par_iter()
        .map(|q| {
            let pairs = vertex_pairs(q);
            let mut out = BTreeSet::new();
            let s_options: Vec<Vec<usize>> = match filling {
                FillingType::Cylinder => pairs.iter().map(|&(a, b)| vec![a, b]).collect(),
                FillingType::Pants => {
                    let mut v = Vec::new();
                    cartesian(q, 3, &mut |c| v.push(c.to_vec()));
                    v
                }
            };
            // edges minus vertices plus one, with the pants hub as an extra vertex
            let (edges, vertices) = match filling {
                FillingType::Cylinder => (j + 1, q),
                FillingType::Pants => (j + 3, q + 1),
            };
            let cycles = (edges + 1).saturating_sub(vertices) as u32;
            if cycles > g {
                return out;
            }
            let genera_options = compositions(g - cycles, q);
            for s_ends in &s_options {
                cartesian(pairs.len(), j, &mut |yc| {
                    let y_edges: Vec<(usize, usize)> = yc.iter().map(|&i| pairs[i]).collect();
                    let links: Vec<(usize, usize)> = match filling {
                        FillingType::Cylinder => {
                            std::iter::once((s_ends[0], s_ends[1])).chain(y_edges.iter().copied()).collect()
                        }
                        FillingType::Pants => {
                            s_ends.iter().map(|&v| (v, q)).chain(y_edges.iter().copied()).collect()
                        }
                    };
                    if !connected(vertices, links) {
                        return;
                    }
                    let mut deg = vec![0u32; q];
                    match filling {
                        FillingType::Cylinder => {
                            deg[s_ends[0]] += 1;
                            deg[s_ends[1]] += 1;
                        }
                        FillingType::Pants => s_ends.iter().for_each(|&v| deg[v] += 1),
                    }
                    for &(a, b) in &y_edges {
                        deg[a] += 1;
                        deg[b] += 1;
                    }
                    for genera in &genera_options {
                        if (0..q).all(|i| 2 * genera[i] + deg[i] > 2) {
                            let sk = Skeleton { filling, genera: genera.clone(), s_ends: s_ends.clone(), y_edges: y_edges.clone() };
                            out.insert(sk.canonical());
                        }
                    }
                });
            }
            out
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiEvaluation {
    pub filling: FillingType,
    pub j: usize,
    pub q_max: usize,
    pub g: u32,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub skeletons: usize,
    /// `phi_{g,Q}`, reported up to the factor `1 / n(T)`.
    pub value: f64,
    pub n_t: u32,
}

/// `x_1 ... x_{n_S} y_1 ... y_j / V_g * sum_skeletons V(x, y, y)`.
pub fn phi_evaluate(
    vols: &NumericVolumes,
    filling: FillingType,
    j: usize,
    q_max: usize,
    g: u32,
    x: &[f64],
    y: &[f64],
) -> Result<PhiEvaluation> {
    if j > DEFAULT_J_MAX {
        return Err(Error::domain(format!("j = {j} exceeds j_max = {DEFAULT_J_MAX}")));
    }
    if x.len() != filling.arity() || y.len() != j {
        return Err(Error::domain("phi needs one x per filling boundary argument and one y per cylinder"));
    }
    if x.iter().chain(y).any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::domain("boundary lengths must be finite and non-negative"));
    }
    let list = skeletons(filling, j, q_max, g, DEFAULT_SKELETON_CAP)?;
    let vg = vols.volume_gn(g, 0)?;
    let terms: Vec<f64> = list.par_iter().map(|s| s.volume_product(vols, x, y)).collect::<Result<_>>()?;
    let prefactor: f64 = x.iter().chain(y).product();
    Ok(PhiEvaluation {
        filling,
        j,
        q_max,
        g,
        x: x.to_vec(),
        y: y.to_vec(),
        skeletons: list.len(),
        value: prefactor * terms.iter().sum::<f64>() / vg,
        n_t: 1,
    })
}

/// A skeleton with its largest piece left free: as `g` grows only that
/// piece's genus moves.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SkeletonFamily {
    /// The skeleton with the free piece at genus 0.
    pub base: Skeleton,
    pub free_piece: usize,
    /// Genus at which the free piece has genus 0.
    pub offset: u32,
}

impl SkeletonFamily {
    fn of(s: &Skeleton, g: u32) -> SkeletonFamily {
        let top = *s.genera.iter().max().expect("non-empty skeleton");
        let mut best: Option<SkeletonFamily> = None;
        for (i, &gi) in s.genera.iter().enumerate() {
            if gi != top {
                continue;
            }
            // mark the free piece with an out-of-range genus so that it stays
            // distinguishable under canonical relabeling
            let mut marked = s.clone();
            marked.genera[i] = u32::MAX;
            let c = marked.canonical();
            let free_piece = c.genera.iter().position(|&v| v == u32::MAX).expect("marker kept");
            let mut base = c;
            base.genera[free_piece] = 0;
            let cand = SkeletonFamily { base, free_piece, offset: g - top };
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
        best.expect("some piece attains the maximum")
    }

    pub fn at(&self, g: u32) -> Option<Skeleton> {
        let free = g.checked_sub(self.offset)?;
        let mut s = self.base.clone();
        s.genera[self.free_piece] = free;
        let sig = s.signatures()[self.free_piece];
        (2 * sig.0 + sig.1 > 2).then_some(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyRank {
    pub family: SkeletonFamily,
    pub points: usize,
    /// Minus the fitted slope of `log term` against `log g`.
    pub rank: Option<f64>,
    pub one_piece: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankRow {
    pub g: u32,
    pub terms: usize,
    pub total: f64,
    /// Sum over terms whose family rank reaches `N` (or could not be fitted).
    pub truncated: f64,
    pub rhs: f64,
    pub max_term_scaled: f64,
    pub per_term_rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankReport {
    pub filling: FillingType,
    pub j: usize,
    pub q_max: usize,
    pub n: u32,
    pub genera: Vec<u32>,
    pub families: Vec<FamilyRank>,
    /// Smallest `D` with every term `<= D^{Q+n_S} / g^{chi(S)}`.
    pub d: f64,
    pub rows: Vec<RankRow>,
    pub tolerance: f64,
}

impl RankReport {
    pub fn min_rank(&self) -> Option<f64> {
        self.families.iter().filter_map(|f| f.rank).reduce(f64::min)
    }

    pub fn ranks_ok(&self) -> bool {
        let chi = self.filling.euler() as f64;
        self.families.iter().filter_map(|f| f.rank).all(|r| r >= chi - self.tolerance)
    }

    pub fn truncation_ok(&self) -> bool {
        self.rows.iter().all(|r| r.truncated <= r.rhs && r.max_term_scaled <= r.per_term_rhs * (1.0 + 1e-12))
    }

    pub fn passed(&self) -> bool {
        self.ranks_ok() && self.truncation_ok()
    }
}

/// Fits the rank of every skeleton family seen over `genera` and checks
/// the truncated sums against `2^{(n_S+2j)(Q+n_S)} D^{Q+n_S} / g^N`.
pub fn rank_truncation_check(
    vols: &NumericVolumes,
    filling: FillingType,
    j: usize,
    q_max: usize,
    n: u32,
    genera: &[u32],
) -> Result<RankReport> {
    const MIN_POINTS: usize = 5;
    const TOLERANCE: f64 = 0.25;
    if genera.len() < MIN_POINTS {
        return Err(Error::domain(format!("rank fit needs at least {MIN_POINTS} genera")));
    }
    if n < filling.euler() {
        return Err(Error::domain("N must be at least chi(S)"));
    }
    // the realization volume of S itself is 1 for both cylinder and pants
    let mut per_g: Vec<(u32, Vec<(SkeletonFamily, f64)>)> = Vec::new();
    let mut families: BTreeSet<SkeletonFamily> = BTreeSet::new();
    for &g in genera {
        let vg = vols.volume_gn(g, 0)?;
        let list = skeletons(filling, j, q_max, g, DEFAULT_SKELETON_CAP)?;
        let mut terms = Vec::with_capacity(list.len());
        for s in &list {
            let fam = SkeletonFamily::of(s, g);
            families.insert(fam.clone());
            terms.push((fam, s.volume_constant(vols)? / vg));
        }
        per_g.push((g, terms));
    }
    let mut ranks: BTreeMap<SkeletonFamily, FamilyRank> = BTreeMap::new();
    for fam in families {
        let mut lx = Vec::new();
        let mut ly = Vec::new();
        for &g in genera {
            if let Some(s) = fam.at(g) {
                let t = s.volume_constant(vols)? / vols.volume_gn(g, 0)?;
                lx.push((g as f64).ln());
                ly.push(t.ln());
            }
        }
        let rank = if lx.len() >= MIN_POINTS { Some(-line_fit(&lx, &ly)?.1) } else { None };
        let one_piece = fam.base.q() == 1;
        ranks.insert(fam.clone(), FamilyRank { family: fam, points: lx.len(), rank, one_piece });
    }
    let chi = filling.euler() as i32;
    let k = (q_max as u32 + filling.n_s()) as i32;
    let d = per_g
        .iter()
        .flat_map(|(g, t)| t.iter().map(move |(_, v)| (v * (*g as f64).powi(chi)).powf(1.0 / k as f64)))
        .fold(0.0, f64::max);
    let partitions = 2f64.powi(((filling.n_s() as usize + 2 * j) * (q_max + filling.n_s() as usize)) as i32);
    let rows = per_g
        .iter()
        .map(|(g, terms)| {
            let gf = *g as f64;
            let truncated = terms
                .iter()
                .filter(|(f, _)| ranks[f].rank.map_or(true, |r| r >= n as f64 - TOLERANCE))
                .map(|(_, v)| v)
                .sum();
            RankRow {
                g: *g,
                terms: terms.len(),
                total: terms.iter().map(|(_, v)| v).sum(),
                truncated,
                rhs: partitions * d.powi(k) / gf.powi(n as i32),
                max_term_scaled: terms.iter().map(|(_, v)| *v).fold(0.0, f64::max),
                per_term_rhs: d.powi(k) / gf.powi(chi),
            }
        })
        .collect();
    Ok(RankReport {
        filling,
        j,
        q_max,
        n,
        genera: genera.to_vec(),
        families: ranks.into_values().collect(),
        d,
        rows,
        tolerance: TOLERANCE,
    })
}
