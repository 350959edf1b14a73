//! Local types of short filling geodesics on tangle-free pants.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::pants::{is_filling, PantsModel};
use super::words::{for_each_cyclic_word, FreeWord};
use crate::error::{Error, Result};

/// Words `a1^{m1} a2^{m2} ... a2^{m_{2k}}` with `1 <= k <= k_max`, `0 < |m_i| <= M`.
#[derive(Debug, Clone, Serialize)]
pub struct CensusShape {
    pub kappa: f64,
    pub log_factor: f64,
    pub g: f64,
    /// `L = A log g`.
    pub l: f64,
    /// `R = kappa log g`.
    pub r: f64,
    /// `M = 1 + ceil(L / kappa)`.
    pub m: u64,
    /// `ceil(A / kappa)`.
    pub k_max: u64,
}

impl CensusShape {
    pub fn new(kappa: f64, log_factor: f64, g: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::domain("kappa must lie in (0, 1)"));
        }
        if !(log_factor >= 1.0) || !(g >= 2.0) {
            return Err(Error::domain("census needs A >= 1 and g >= 2"));
        }
        Self::unchecked(kappa, log_factor, g)
    }

    /// Same derivation without the `kappa < 1` and `g >= 2` guards, for
    /// boundary cases such as `kappa = 1, g = e`.
    pub fn unchecked(kappa: f64, log_factor: f64, g: f64) -> Result<Self> {
        if !(kappa > 0.0 && log_factor > 0.0 && g > 1.0) {
            return Err(Error::domain("census needs kappa, A > 0 and g > 1"));
        }
        let l = log_factor * g.ln();
        let r = kappa * g.ln();
        // ceil with a small guard so that exact ratios are not bumped by rounding
        let ceil = |v: f64| (v - 1e-12).ceil().max(0.0) as u64;
        Ok(CensusShape {
            kappa,
            log_factor,
            g,
            l,
            r,
            m: 1 + ceil(l / kappa),
            k_max: ceil(log_factor / kappa),
        })
    }

    /// Words before deduplication, `sum_k (2M)^{2k}`.
    pub fn raw_count(&self) -> f64 {
        (1..=self.k_max)
            .map(|k| (2.0 * self.m as f64).powi(2 * k as i32))
            .sum()
    }

    /// `(2M + 1)^{2 k_max}`.
    pub fn cardinality_bound(&self) -> f64 {
        (2.0 * self.m as f64 + 1.0).powi(2 * self.k_max as i32)
    }

    /// Membership up to rotation and inversion, read off the syllables.
    pub fn contains(&self, w: &FreeWord) -> bool {
        match w.cyclic_exponents() {
            Some(m) => {
                let k = m.len() as u64 / 2;
                k >= 1 && k <= self.k_max && m.iter().all(|&e| e != 0 && e.unsigned_abs() as u64 <= self.m)
            }
            None => false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Census {
    pub shape: CensusShape,
    pub raw_count: usize,
    /// Canonical representatives in lexicographic order.
    pub words: Vec<FreeWord>,
}

impl Census {
    pub fn contains(&self, w: &FreeWord) -> bool {
        self.words.binary_search(&w.canonical()).is_ok()
    }
}

/// Enumerates the census explicitly; fails when it would exceed `max_words`.
pub fn census_loc_types(shape: &CensusShape, max_words: usize) -> Result<Census> {
    if shape.raw_count() > max_words as f64 {
        return Err(Error::resource(format!(
            "census would list {:.3e} words, above the cap {max_words}",
            shape.raw_count()
        )));
    }
    let m = shape.m as i32;
    let values: Vec<i32> = (-m..=m).filter(|&v| v != 0).collect();
    let mut set = BTreeSet::new();
    let mut raw = 0usize;
    for k in 1..=shape.k_max as usize {
        let mut idx = vec![0usize; 2 * k];
        loop {
            let exps: Vec<i32> = idx.iter().map(|&i| values[i]).collect();
            set.insert(FreeWord::from_exponents(&exps).canonical());
            raw += 1;
            let mut pos = 0;
            while pos < idx.len() {
                idx[pos] += 1;
                if idx[pos] < values.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == idx.len() {
                break;
            }
        }
    }
    Ok(Census {
        shape: shape.clone(),
        raw_count: raw,
        words: set.into_iter().collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FoundGeodesic {
    pub word: FreeWord,
    pub length: f64,
    pub exponents: Vec<i32>,
    pub k: usize,
    pub in_census: bool,
    /// `l >= k (t1 + t2)`.
    pub crossing_bound: bool,
    /// `l >= sum (|m_i| - 1) kappa`.
    pub winding_bound: bool,
    /// `l >= sum_i max(t_i, (|m_i| - 1) b_i)`, the segment-wise combination.
    pub segment_bound: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub shape: CensusShape,
    pub b: [f64; 3],
    pub t1: f64,
    pub t2: f64,
    pub orthogeodesic: f64,
    pub word_cap: usize,
    pub words_examined: usize,
    pub found: Vec<FoundGeodesic>,
    pub escapes: Vec<FreeWord>,
    pub inequality_failures: Vec<FreeWord>,
    pub boundary_powers_listed: usize,
    /// `L / R`, the bound on the crossing count.
    pub k_bound: f64,
    pub max_k: usize,
}

impl CensusReport {
    pub fn passed(&self) -> bool {
        self.escapes.is_empty()
            && self.inequality_failures.is_empty()
            && self.boundary_powers_listed == 0
            && self.max_k as f64 <= self.k_bound + 1e-9
    }
}

/// Searches all cyclically reduced words up to `word_cap` letters for
/// primitive filling geodesics of length at most `L` and checks each against
/// the census and the length inequalities.
pub fn verify_census(model: &PantsModel, shape: &CensusShape, word_cap: usize) -> Result<CensusReport> {
    if model.b1 < shape.kappa || model.b2 < shape.kappa || model.b3 < shape.r - 1e-12 {
        return Err(Error::domain(format!(
            "pants ({}, {}, {}) violate the tangle-free hypotheses b1, b2 >= {} and b3 >= {}",
            model.b1, model.b2, model.b3, shape.kappa, shape.r
        )));
    }
    let (t1, t2, alpha) = model.orthogeodesic_split()?;
    let tasks: Vec<(usize, i8)> = (1..=word_cap)
        .flat_map(|len| [1i8, -1, 2, -2].into_iter().map(move |f| (len, f)))
        .collect();
    let per_task: Vec<(usize, Vec<FoundGeodesic>, usize)> = tasks
        .par_iter()
        .map(|&(len, first)| {
            let mut found = Vec::new();
            let mut examined = 0usize;
            let mut powers = 0usize;
            let mut failure: Option<Error> = None;
            for_each_cyclic_word(len, first, &mut |w| {
                // one representative per class under rotation and inversion
                if failure.is_some() || w.canonical() != *w {
                    return;
                }
                examined += 1;
                if !w.is_primitive() {
                    return;
                }
                let filling = match is_filling(w) {
                    Ok(f) => f,
                    Err(e) => {
                        failure = Some(e);
                        return;
                    }
                };
                if !filling {
                    return;
                }
                let length = match model.geodesic_length(w) {
                    Ok(v) => v,
                    Err(e) => {
                        failure = Some(e);
                        return;
                    }
                };
                if length > shape.l {
                    return;
                }
                let exponents = w.cyclic_exponents().unwrap_or_default();
                if exponents.is_empty() {
                    powers += 1;
                }
                let k = exponents.len() / 2;
                let slack = 1e-9 * (1.0 + length);
                let winding: f64 = exponents.iter().map(|m| (m.unsigned_abs() as f64 - 1.0) * shape.kappa).sum();
                let segments: f64 = exponents
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        let (t, b) = if i % 2 == 0 { (t1, model.b1) } else { (t2, model.b2) };
                        t.max((m.unsigned_abs() as f64 - 1.0) * b)
                    })
                    .sum();
                found.push(FoundGeodesic {
                    word: w.clone(),
                    length,
                    in_census: shape.contains(w),
                    crossing_bound: length + slack >= k as f64 * (t1 + t2),
                    winding_bound: length + slack >= winding,
                    segment_bound: length + slack >= segments,
                    exponents,
                    k,
                });
            });
            match failure {
                Some(e) => Err(e),
                None => Ok((examined, found, powers)),
            }
        })
        .collect::<Result<_>>()?;
    let mut found = Vec::new();
    let mut examined = 0;
    let mut powers = 0;
    for (e, f, p) in per_task {
        examined += e;
        powers += p;
        found.extend(f);
    }
    found.sort_by(|a, b| a.word.cmp(&b.word));
    let escapes = found.iter().filter(|f| !f.in_census).map(|f| f.word.clone()).collect();
    let inequality_failures = found
        .iter()
        .filter(|f| !(f.crossing_bound && f.winding_bound && f.segment_bound))
        .map(|f| f.word.clone())
        .collect();
    let max_k = found.iter().map(|f| f.k).max().unwrap_or(0);
    Ok(CensusReport {
        shape: shape.clone(),
        b: [model.b1, model.b2, model.b3],
        t1,
        t2,
        orthogeodesic: alpha,
        word_cap,
        words_examined: examined,
        found,
        escapes,
        inequality_failures,
        boundary_powers_listed: powers,
        k_bound: shape.l / shape.r,
        max_k,
    })
}
