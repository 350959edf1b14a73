//! The Y series, its moment bounds, the B probability bound and the tail.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inclexcl::i_kappa_weight;

/// A positive series summed until a ratio-test remainder certificate holds.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CertifiedSum {
    pub value: f64,
    pub first_index: u32,
    pub terms: u32,
    /// Upper bound on everything left out.
    pub remainder_bound: f64,
    /// Ratio of consecutive terms where summation stopped.
    pub last_ratio: f64,
}

/// `sum_{j >= start} (2j)^Q c^j / j!` with remainder below `rel * value`.
///
/// Consecutive ratios `c ((j+1)/j)^Q / (j+1)` decrease in `j`, so once one
/// drops under 1/2 the rest is dominated by a geometric series.
pub fn moment_series(c: f64, q: u32, start: u32, rel: f64) -> Result<CertifiedSum> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::domain("series parameter must be positive"));
    }
    let start = start.max(1);
    let ln_c = c.ln();
    let mut ln_fact: f64 = (1..=start).map(|k| (k as f64).ln()).sum();
    let mut value = 0.0;
    let mut terms = 0;
    let mut j = start;
    loop {
        let ln_term = q as f64 * (2.0 * j as f64).ln() + j as f64 * ln_c - ln_fact;
        if ln_term > 700.0 {
            return Err(Error::numerical("series term overflows f64", ln_term));
        }
        let term = ln_term.exp();
        value += term;
        terms += 1;
        let ratio = c * ((j as f64 + 1.0) / j as f64).powi(q as i32) / (j as f64 + 1.0);
        if ratio < 0.5 {
            let remainder = term * ratio / (1.0 - ratio);
            if remainder <= rel * value || remainder < f64::MIN_POSITIVE {
                return Ok(CertifiedSum {
                    value,
                    first_index: start,
                    terms,
                    remainder_bound: remainder,
                    last_ratio: ratio,
                });
            }
        }
        if terms > 100_000 {
            return Err(Error::numerical("series did not reach its certificate", value));
        }
        j += 1;
        ln_fact += (j as f64).ln();
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeriesParams {
    pub kappa: f64,
    pub q: u32,
    pub beta: f64,
}

impl SeriesParams {
    pub fn new(kappa: f64, q: u32, beta: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 1.0) || q == 0 || !(beta > 0.0) {
            return Err(Error::domain("series needs kappa in (0,1), Q >= 1 and beta > 0"));
        }
        Ok(SeriesParams { kappa, q, beta })
    }
}

/// `sum_{j>=1} beta^j / j! Q^{2j+1} (2j)^Q I_kappa^j`, universal constant set to 1.
pub fn y_moment_bound(p: &SeriesParams) -> Result<CertifiedSum> {
    let i = i_kappa_weight(p.kappa)?;
    let q = p.q as f64;
    let mut s = moment_series(p.beta * q * q * i, p.q, 1, 1e-12)?;
    s.value *= q;
    s.remainder_bound *= q;
    Ok(s)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SecondMoment {
    pub y_beta: f64,
    pub y_beta_squared: f64,
    pub y_four_beta: f64,
    pub holds: bool,
}

/// Compares `Y_beta^2` with `Y_{4 beta}` at the level of the evaluated bounds.
pub fn second_moment_check(p: &SeriesParams) -> Result<SecondMoment> {
    let y = y_moment_bound(p)?.value;
    let y4 = y_moment_bound(&SeriesParams { beta: 4.0 * p.beta, ..*p })?.value;
    Ok(SecondMoment { y_beta: y, y_beta_squared: y * y, y_four_beta: y4, holds: y * y <= y4 })
}

/// `D^Q / g^{Q-1} sum_{j>=1} Q^{2j} (2j)^Q I_kappa^j / j!`.
pub fn prob_b_bound(g: f64, kappa: f64, q: u32, d: f64) -> Result<f64> {
    if !(g >= 2.0) || q == 0 {
        return Err(Error::domain("B bound needs g >= 2 and Q >= 1"));
    }
    let i = i_kappa_weight(kappa)?;
    let qf = q as f64;
    let s = moment_series(qf * qf * i, q, 1, 1e-14)?;
    Ok(d.powi(q as i32) / g.powi(q as i32 - 1) * s.value)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailBound {
    pub g: f64,
    pub first_index: u32,
    pub value: f64,
    pub remainder_bound: f64,
    /// `g^{-N}`.
    pub target: f64,
    pub below_target: bool,
}

/// `sum_{j > log g} (2j)^Q (Q^2 I_kappa)^j / j!` against `g^{-N}`.
pub fn tail_bound(g: f64, kappa: f64, q: u32, n: u32) -> Result<TailBound> {
    if !(g >= 3.0) {
        return Err(Error::domain("tail bound needs g >= 3"));
    }
    let i = i_kappa_weight(kappa)?;
    let qf = q as f64;
    let start = g.ln().floor() as u32 + 1;
    let s = moment_series(qf * qf * i, q, start, 1e-12)?;
    let target = g.powi(-(n as i32));
    Ok(TailBound {
        g,
        first_index: start,
        value: s.value,
        remainder_bound: s.remainder_bound,
        target,
        below_target: s.value + s.remainder_bound < target,
    })
}

/// Smallest `g` from which the tail stays below `g^{-N}`, searching
/// `log g` up to `max_log`.
///
/// The tail only changes when `floor(log g)` does, while the target keeps
/// shrinking, so the condition is checked at the right end of every step.
pub fn tail_crossover(kappa: f64, q: u32, n: u32, max_log: u32) -> Result<Option<f64>> {
    if max_log == 0 {
        return Err(Error::domain("max_log must be positive"));
    }
    let i = i_kappa_weight(kappa)?;
    let qf = q as f64;
    let mut tails = Vec::new();
    for k in 1..=max_log {
        tails.push(moment_series(qf * qf * i, q, k + 1, 1e-12)?.value);
    }
    // last step that fails at its right end
    let failing = (1..=max_log).rev().find(|&k| tails[k as usize - 1] >= (-(n as f64) * (k + 1) as f64).exp());
    Ok(match failing {
        None => Some(3f64.max(1f64.exp())),
        Some(k) if k == max_log => None,
        // later steps pass at their right ends, hence everywhere
        Some(k) => Some(((k + 1) as f64).exp()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_against_direct_sum() {
        let s = moment_series(0.7, 3, 1, 1e-14).unwrap();
        let mut direct = 0.0;
        let mut fact = 1.0;
        for j in 1..60 {
            fact *= j as f64;
            direct += (2.0 * j as f64).powi(3) * 0.7f64.powi(j) / fact;
        }
        assert!((s.value - direct).abs() < 1e-12 * direct);
        assert!(s.last_ratio < 0.5);
    }

    #[test]
    fn y_grows_with_beta_and_vanishes_with_kappa() {
        let p = SeriesParams::new(0.5, 2, 1.0).unwrap();
        let a = y_moment_bound(&p).unwrap().value;
        let b = y_moment_bound(&SeriesParams { beta: 2.0, ..p }).unwrap().value;
        assert!(a.is_finite() && b > a);
        let tiny = y_moment_bound(&SeriesParams::new(1e-6, 2, 1.0).unwrap()).unwrap().value;
        assert!(tiny < 1e-10);
    }

    #[test]
    fn b_bound_scaling() {
        for q in [2u32, 3, 5] {
            let r = prob_b_bound(200.0, 0.1, q, 1.0).unwrap() / prob_b_bound(100.0, 0.1, q, 1.0).unwrap();
            assert!((r / 0.5f64.powi(q as i32 - 1) - 1.0).abs() < 1e-12);
        }
        let flat = prob_b_bound(200.0, 0.1, 1, 1.0).unwrap() / prob_b_bound(100.0, 0.1, 1, 1.0).unwrap();
        assert!((flat - 1.0).abs() < 1e-12);
        assert!(prob_b_bound(100.0, 0.2, 3, 1.0).unwrap() > prob_b_bound(100.0, 0.1, 3, 1.0).unwrap());
    }

    #[test]
    fn crossover_is_permanent() {
        let c = tail_crossover(0.1, 5, 3, 60).unwrap().unwrap();
        for f in [1.0, 1.5, 3.0, 10.0, 1e3] {
            assert!(tail_bound(c * f, 0.1, 5, 3).unwrap().below_target);
        }
        assert!(!tail_bound(c * 0.9, 0.1, 5, 3).unwrap().below_target);
    }

    #[test]
    fn tail_decreases_and_sits_under_full_series() {
        let full = moment_series(25.0 * i_kappa_weight(0.1).unwrap(), 5, 1, 1e-14).unwrap().value;
        let mut last = f64::INFINITY;
        for g in [10.0, 30.0, 100.0, 1000.0, 1e5] {
            let t = tail_bound(g, 0.1, 5, 3).unwrap();
            assert!(t.value <= last && t.value <= full);
            last = t.value;
        }
    }
}
