//! Density functions of pants-filling and once-intersecting torus types.

use rayon::prelude::*;
use serde::Serialize;

use super::fr::f1;
use crate::error::{Error, Result};
use crate::hypgeo::{j_kappa_closed, FreeWord, PantsModel};
use crate::inclexcl::i_small;
use crate::numeric::{integrate, solve_increasing, QuadConfig};
use crate::volumes::NumericVolumes;

const EDGE: f64 = 1e-12;

/// `sum_j (-1)^j I(kappa)^j / j! * V_{g-a-j, b+2j} / V_g` for `j <= j_max`.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesFactor {
    pub terms: Vec<f64>,
    pub value: f64,
    /// Bound on the omitted terms; zero once the series ran out of genus.
    pub truncation_error: f64,
    pub exhausted: bool,
}

fn series_factor(vols: &NumericVolumes, g: u32, a: u32, b: u32, kappa: f64, j_max: usize) -> Result<SeriesFactor> {
    let i = i_small(kappa)?;
    let vg = vols.volume_gn(g, 0)?;
    let last = (g - a) as usize;
    let term = |j: usize| -> Result<f64> {
        let fact: f64 = (1..=j).map(|k| k as f64).product();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        Ok(sign * i.powi(j as i32) / fact * vols.volume_gn(g - a - j as u32, b + 2 * j as u32)? / vg)
    };
    let top = j_max.min(last);
    let terms: Vec<f64> = (0..=top).map(term).collect::<Result<_>>()?;
    let value = terms.iter().sum();
    let exhausted = top == last;
    // alternating with shrinking terms: the first omitted term bounds the rest
    let truncation_error = if exhausted {
        0.0
    } else {
        let next: Vec<f64> = (top + 1..=(top + 3).min(last)).map(term).collect::<Result<_>>()?;
        if next.windows(2).any(|w| w[1].abs() > w[0].abs()) {
            return Err(Error::numerical("series terms stopped shrinking past j_max", next[0]));
        }
        next[0].abs()
    };
    Ok(SeriesFactor { terms, value, truncation_error, exhausted })
}

fn length_fn(word: &FreeWord) -> impl Fn(f64, f64, f64) -> f64 + '_ {
    move |a, b, c| {
        PantsModel::from_lengths(a, b, c)
            .and_then(|m| m.geodesic_length(word))
            .unwrap_or(f64::NAN)
    }
}

/// `d h / d l_3`, exact up to rounding.
fn slope_in_third(word: &FreeWord, a: f64, b: f64, c: f64) -> f64 {
    PantsModel::from_lengths(a, b, c)
        .and_then(|m| m.length_gradient(word))
        .map_or(f64::NAN, |(_, g)| g[2])
}

/// `int_{h = l} prod f_i(l_i) dl_1 dl_2 dl_3 / dl`, each factor optionally
/// cut off at `cutoffs[i]`. Also counts points where `h` failed to increase.
pub fn level_set_integral(word: &FreeWord, l: f64, cutoffs: [Option<f64>; 3], tol: f64) -> Result<(f64, usize)> {
    let h = length_fn(word);
    let cap = |i: usize, v: f64| cutoffs[i].map_or(v, |c| v.min(c));
    let root = |f: &dyn Fn(f64) -> f64| solve_increasing(f, l, EDGE, 1.0, 1e-13).ok().flatten();
    let Some(u1) = root(&|a| h(a, EDGE, EDGE)) else {
        return Ok((0.0, 0));
    };
    let u1 = cap(0, u1);
    // where a cap on the second or third boundary starts to bind
    let low = |k: Option<f64>| k.unwrap_or(EDGE);
    let mut breaks = vec![EDGE];
    for (x, y) in [(None, cutoffs[2]), (cutoffs[1], None), (cutoffs[1], cutoffs[2])] {
        if x.is_none() && y.is_none() {
            continue;
        }
        let (bx, cy) = (low(x), low(y));
        if let Some(a) = root(&|a| h(a, bx, cy)) {
            if a > EDGE && a < u1 {
                breaks.push(a);
            }
        }
    }
    breaks.push(u1);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let failures = std::sync::atomic::AtomicUsize::new(0);
    // inner range in the second length at fixed first length
    let span = |a: f64| -> Option<(f64, f64)> {
        let u2 = cap(1, root(&|b| h(a, b, EDGE))?);
        // the third length falls as the second grows, so its cap is a lower limit
        let b0 = match cutoffs[2] {
            Some(k) => root(&|b| h(a, b, k)).unwrap_or(EDGE),
            None => EDGE,
        };
        (b0 < u2).then_some((b0, u2))
    };
    let point = |a: f64, b: f64| -> f64 {
        let Some(c) = root(&|c| h(a, b, c)) else {
            return 0.0;
        };
        let dh = slope_in_third(word, a, b, c);
        if !(dh > 0.0) {
            failures.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            return 0.0;
        }
        f1(a) * f1(b) * f1(c) / dh
    };
    let run = |inner_cfg: &QuadConfig, outer_cfg: &QuadConfig| -> Result<f64> {
        let outer = |a: f64| -> f64 {
            let Some((b0, u2)) = span(a) else {
                return 0.0;
            };
            integrate(|b| point(a, b), b0, u2, inner_cfg).map_or(f64::NAN, |r| r.value)
        };
        let mut total = 0.0;
        for w in breaks.windows(2) {
            total += integrate(outer, w[0], w[1], outer_cfg)?.value;
        }
        Ok(total)
    };
    // coarse magnitude so that both passes have an absolute floor
    let width = u1 - EDGE;
    let mut crude = 0.0f64;
    for i in 1..8 {
        let a = EDGE + width * i as f64 / 8.0;
        if let Some((b0, u2)) = span(a) {
            for k in 1..8 {
                let b = b0 + (u2 - b0) * k as f64 / 8.0;
                crude = crude.max(point(a, b).abs() * (u2 - b0) * width);
            }
        }
    }
    let floor = if crude > 0.0 { crude } else { f64::MIN_POSITIVE };
    let loose = QuadConfig { max_evals: 50_000, ..QuadConfig::with_tol(1e-7 * floor / width, 1e-4) };
    let scale = run(&loose, &QuadConfig::with_tol(1e-7 * floor, 1e-4))?.abs();
    if !scale.is_finite() {
        return Err(Error::numerical("level-set integral is not finite", scale));
    }
    if scale == 0.0 {
        return Ok((0.0, failures.into_inner()));
    }
    failures.store(0, std::sync::atomic::Ordering::Relaxed);
    let inner_cfg = QuadConfig { max_evals: 200_000, ..QuadConfig::with_tol(0.1 * tol * scale / width, 0.1 * tol) };
    let value = run(&inner_cfg, &QuadConfig::with_tol(tol * scale, tol))?;
    if !value.is_finite() {
        return Err(Error::numerical("level-set integral is not finite", value));
    }
    Ok((value, failures.into_inner()))
}

/// `int_{h = l} f1(l_i) l_j delta(l_j - l_k) dl / dl`: one boundary free,
/// the other two equal.
pub fn dirac_integral(word: &FreeWord, l: f64, free: usize, tol: f64) -> Result<f64> {
    if free > 2 {
        return Err(Error::domain("free index must be 0, 1 or 2"));
    }
    let h = length_fn(word);
    let place = move |s: f64, t: f64| -> f64 {
        match free {
            0 => h(s, t, t),
            1 => h(t, s, t),
            _ => h(t, t, s),
        }
    };
    let Some(u) = solve_increasing(|s| place(s, EDGE), l, EDGE, 1.0, 1e-12)? else {
        return Ok(0.0);
    };
    let integrand = |s: f64| -> f64 {
        let Ok(Some(t)) = solve_increasing(|t| place(s, t), l, EDGE, 1.0, 1e-13) else {
            return 0.0;
        };
        let mut x = [t; 3];
        x[free] = s;
        // the two tied lengths move together
        let dh = PantsModel::from_lengths(x[0], x[1], x[2])
            .and_then(|m| m.length_gradient(word))
            .map_or(f64::NAN, |(_, g)| g.iter().sum::<f64>() - g[free]);
        if dh > 0.0 {
            f1(s) * t / dh
        } else {
            0.0
        }
    };
    Ok(integrate(integrand, EDGE, u, &QuadConfig::with_tol(1e-300, tol))?.value)
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityPoint {
    pub l: f64,
    pub value: f64,
    /// Level-set integral of `f1 f1 f1`.
    pub connected: f64,
    /// Level-set integrals with `1[0, kappa]` on the listed boundaries.
    pub indicator_terms: Vec<(Vec<usize>, f64)>,
    /// Dirac-type integrals with free boundary 1, 2, 3.
    pub dirac_terms: Vec<f64>,
    pub j_truncation_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityAssembly {
    pub tag: String,
    pub g: u32,
    pub kappa: f64,
    pub j_max: usize,
    pub series: SeriesFactor,
    pub points: Vec<DensityPoint>,
    pub monotonicity_failures: usize,
    /// Reported values are times `1 / n(T)`.
    pub n_t: u32,
}

/// Connected density `series * int_{h = l} f1 f1 f1` of a pants-filling word,
/// with the correction integrals evaluated alongside when requested.
pub fn assemble_density_pants(
    vols: &NumericVolumes,
    word: &FreeWord,
    g: u32,
    kappa: f64,
    grid: &[f64],
    j_max: usize,
    corrections: bool,
) -> Result<DensityAssembly> {
    if g < 3 {
        return Err(Error::domain("pants densities need g >= 3"));
    }
    if !crate::hypgeo::is_filling(word)? {
        return Err(Error::domain(format!("{word} does not fill the pair of pants")));
    }
    let series = series_factor(vols, g, 2, 3, kappa, j_max)?;
    const TOL: f64 = 1e-8;
    let rows: Vec<(DensityPoint, usize)> = grid
        .par_iter()
        .map(|&l| -> Result<(DensityPoint, usize)> {
            let (connected, mut fails) = level_set_integral(word, l, [None; 3], TOL)?;
            let mut indicator_terms = Vec::new();
            let mut dirac_terms = Vec::new();
            if corrections {
                for mask in 1u8..8 {
                    let set: Vec<usize> = (0..3).filter(|i| mask >> i & 1 == 1).collect();
                    let cut = |i: usize| (mask >> i & 1 == 1).then_some(kappa);
                    let (v, f) = level_set_integral(word, l, [cut(0), cut(1), cut(2)], 1e-6)?;
                    fails += f;
                    indicator_terms.push((set, v));
                }
                for free in 0..3 {
                    dirac_terms.push(dirac_integral(word, l, free, 1e-8)?);
                }
            }
            Ok((
                DensityPoint {
                    l,
                    value: series.value * connected,
                    connected,
                    indicator_terms,
                    dirac_terms,
                    j_truncation_error: series.truncation_error * connected,
                },
                fails,
            ))
        })
        .collect::<Result<_>>()?;
    let monotonicity_failures = rows.iter().map(|r| r.1).sum();
    Ok(DensityAssembly {
        tag: word.to_string(),
        g,
        kappa,
        j_max,
        series,
        points: rows.into_iter().map(|r| r.0).collect(),
        monotonicity_failures,
        n_t: 1,
    })
}

/// `sum_j (-1)^j I(kappa)^j / j! V_{g-1-j, 1+2j} / V_g * J_kappa(l)`.
pub fn torus_once_intersecting_density(
    vols: &NumericVolumes,
    g: u32,
    kappa: f64,
    grid: &[f64],
    j_max: usize,
) -> Result<DensityAssembly> {
    if g < 2 {
        return Err(Error::domain("torus densities need g >= 2"));
    }
    let series = series_factor(vols, g, 1, 1, kappa, j_max)?;
    let points = grid
        .iter()
        .map(|&l| {
            let j = j_kappa_closed(l, kappa)?;
            Ok(DensityPoint {
                l,
                value: series.value * j,
                connected: j,
                indicator_terms: vec![],
                dirac_terms: vec![],
                j_truncation_error: series.truncation_error * j,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DensityAssembly {
        tag: "torus-once-intersecting".into(),
        g,
        kappa,
        j_max,
        series,
        points,
        monotonicity_failures: 0,
        n_t: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{fr_decompose, Normalizer};

    fn figure_eight() -> FreeWord {
        FreeWord::new(vec![1, -2]).unwrap()
    }

    #[test]
    fn empty_below_the_cusped_length() {
        // on the thrice-punctured sphere the figure-eight has length 2 arccosh 3
        let floor = 2.0 * 3f64.acosh();
        let (v, _) = level_set_integral(&figure_eight(), floor - 0.05, [None; 3], 1e-8).unwrap();
        assert_eq!(v, 0.0);
        let (v, f) = level_set_integral(&figure_eight(), floor + 1.0, [None; 3], 1e-8).unwrap();
        assert!(v > 0.0 && f == 0);
    }

    /// With `u = cosh(a/2)`, `v = cosh(b/2)` the figure-eight level set is
    /// `2uv + cosh(c/2) = cosh(l/2)` and `f1(c) / h_c = 2 sinh(l/2)`, so the
    /// integral is `32 sinh(l/2)` times the area of `{u, v >= 1, 2uv in [lo, hi]}`
    /// with `u <= u_max`.
    fn figure_eight_closed(l: f64, cut_a: Option<f64>, cut_c: Option<f64>) -> f64 {
        let big = (0.5 * l).cosh();
        let hi = 0.5 * (big - 1.0);
        let lo = cut_c.map_or(0.0, |k| 0.5 * (big - (0.5 * k).cosh()));
        let u_max = cut_a.map_or(hi, |k| (0.5 * k).cosh().min(hi));
        // int_1^{u_max} (hi/u - max(1, lo/u))^+ du
        let part = |m: f64, from: f64, to: f64| if to > from { m * (to / from).ln() } else { 0.0 };
        let knee = lo.clamp(1.0, u_max);
        let upper = part(hi, 1.0, u_max) - (u_max - knee).max(0.0);
        let lower = part(lo, 1.0, knee);
        32.0 * (0.5 * l).sinh() * (upper - lower)
    }

    #[test]
    fn figure_eight_matches_closed_form() {
        let w = figure_eight();
        let floor = 2.0 * 3f64.acosh();
        for l in [floor + 1e-6, floor + 0.1, 4.0, 6.0, 10.0, 14.0] {
            let (v, f) = level_set_integral(&w, l, [None; 3], 1e-9).unwrap();
            let want = figure_eight_closed(l, None, None);
            assert_eq!(f, 0);
            assert!((v - want).abs() < 1e-7 * want, "l = {l}: {v} vs {want}");
        }
        for l in [4.0, 7.0, 11.0] {
            let (v, _) = level_set_integral(&w, l, [Some(0.5), None, Some(0.7)], 1e-9).unwrap();
            let want = figure_eight_closed(l, Some(0.5), Some(0.7));
            assert!((v - want).abs() < 1e-6 * want, "cut, l = {l}: {v} vs {want}");
        }
    }

    #[test]
    fn torus_density_factorizes() {
        let vols = NumericVolumes::default();
        let d = torus_once_intersecting_density(&vols, 6, 0.5, &[6.0, 9.0], 12).unwrap();
        let r: Vec<f64> = d.points.iter().map(|p| p.value / j_kappa_closed(p.l, 0.5).unwrap()).collect();
        assert!((r[0] - r[1]).abs() < 1e-14 * r[0].abs());
        let short = torus_once_intersecting_density(&vols, 8, 0.5, &[6.0], 3).unwrap();
        let long = torus_once_intersecting_density(&vols, 8, 0.5, &[6.0], 5).unwrap();
        assert!((short.series.value - long.series.value).abs() <= short.series.truncation_error);
        assert!(long.series.truncation_error < short.series.truncation_error);
        // tiny kappa: J_kappa vanishes at moderate l
        let zero = torus_once_intersecting_density(&vols, 6, 0.05, &[2.0], 12).unwrap();
        assert_eq!(zero.points[0].value, 0.0);
    }

    #[test]
    fn pants_series_alternates() {
        let vols = NumericVolumes::default();
        let s = series_factor(&vols, 10, 2, 3, 0.5, 12).unwrap();
        assert!(s.terms.windows(2).all(|w| w[0] * w[1] < 0.0 && w[1].abs() < w[0].abs()));
    }

    #[test]
    fn assembled_density_is_friedman_ramanujan_like() {
        let vols = NumericVolumes::default();
        let grid: Vec<f64> = (0..24).map(|i| 4.0 + i as f64).collect();
        let d = assemble_density_pants(&vols, &figure_eight(), 6, 0.3, &grid, 12, false).unwrap();
        assert_eq!(d.monotonicity_failures, 0);
        assert!(d.points.iter().all(|p| p.value >= 0.0));
        let ls: Vec<f64> = d.points.iter().map(|p| p.l).collect();
        let lv: Vec<f64> = d.points.iter().map(|p| p.l * p.value).collect();
        let fit = fr_decompose(&ls, &lv, Normalizer::SinhHalf, 3, 3.0).unwrap();
        assert!(fit.statistic.is_finite());
    }
}
