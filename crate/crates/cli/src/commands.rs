use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use tanglefree::densities::{assemble_density_pants, fr_decompose, torus_once_intersecting_density, Normalizer};
use tanglefree::expansion::{fit_next_order, verify_error_shape};
use tanglefree::hypgeo::{j_kappa, j_kappa_normalized_gap, verify_census, CensusShape, FreeWord, PantsModel};
use tanglefree::inclexcl::{phi_evaluate, rank_truncation_check, FillingType};
use tanglefree::multicurves::{
    classes_by_part_data, enumerate_splittings, gluing_surjection_check, orbit_upper, prob_b_bound,
    second_moment_check, tail_bound, y_moment_bound, SeriesParams,
};
use tanglefree::trace::{
    cancellation_check, dilation_gap, h_hat, h_l_hat_direct, hat_cross_check, length_scan, parse_rational, pipeline,
    spectral_lower_bound, BoundConstants, H_hat, BOUNDARY_NOTE,
};
use tanglefree::{NumericVolumes, Signature, VolumeCache};

use crate::cli::*;
use crate::error::CliError;
use crate::output::{num, Artifact, RunOutput};

type Run = Result<RunOutput, CliError>;

fn fail_if(failures: Vec<String>) -> Option<String> {
    if failures.is_empty() {
        None
    } else {
        Some(failures.join("; "))
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if n < 2 || !(b > a) {
        return Err(CliError::validation("need at least two points on an increasing range"));
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

/// Repeats a single value or checks the arity of a list.
fn spread(v: &[f64], n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    match v.len() {
        1 => Ok(vec![v[0]; n]),
        k if k == n => Ok(v.to_vec()),
        k => Err(CliError::validation(format!("{what} needs 1 or {n} values, got {k}"))),
    }
}

pub fn volumes(a: &VolumesArgs, cache: Option<VolumeCache>) -> Run {
    let backed = cache.is_some();
    let cache = cache.unwrap_or_else(|| VolumeCache::new(a.cap));
    let mut sigs = Vec::new();
    let mut skipped = Vec::new();
    for g in 0..=a.gmax {
        for n in 0..=a.nmax {
            let Ok(sig) = Signature::new(g, n) else { continue };
            if sig.dim() > cache.cap() {
                skipped.push(sig.to_string());
            } else {
                sigs.push(sig);
            }
        }
    }
    let mut table = Vec::new();
    cache.write_csv(&sigs, &mut table)?;
    let mut csv = format!("# kind=volume_coefficients schema_version={}\n", crate::output::SCHEMA_VERSION).into_bytes();
    csv.extend(table);
    #[derive(Serialize)]
    struct Row {
        signature: String,
        dimension: u32,
        volume: f64,
        coefficients: usize,
        monotonicity_violations: Vec<Vec<u32>>,
    }
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &sig in &sigs {
        let p = cache.compute_volume(sig)?;
        let v = p.monotonicity_violations();
        if !v.is_empty() {
            failures.push(format!("{sig}: {} coefficients exceed the constant term", v.len()));
        }
        rows.push(Row {
            signature: sig.to_string(),
            dimension: sig.dim(),
            volume: p.volume(),
            coefficients: p.canonical_terms().count(),
            monotonicity_violations: v,
        });
    }
    if backed {
        cache.save()?;
    }
    Ok(RunOutput {
        parameters: json!({ "gmax": a.gmax, "nmax": a.nmax, "cap": cache.cap() }),
        artifacts: vec![
            Artifact { name: "volumes.csv".into(), bytes: csv },
            Artifact::json("volumes.json", "volumes", &json!({ "signatures": rows, "skipped_above_cap": skipped }))?,
        ],
        failure: fail_if(failures),
    })
}

pub fn expansion(a: &ExpansionArgs) -> Run {
    if a.gmax < a.gmin + 3 {
        return Err(CliError::validation("need at least four genera"));
    }
    let vols = NumericVolumes::default();
    let genera: Vec<u32> = (a.gmin..=a.gmax).collect();
    let grid: Vec<Vec<f64>> = a.x.iter().map(|&x| vec![x; a.n as usize]).collect();
    let shape = verify_error_shape(&vols, a.n, &grid, &genera)?;
    // the order-one fit needs a spread of lengths: a geometric grid on [1/4, 4]
    let fit_grid: Vec<Vec<f64>> = (0..12).map(|i| vec![0.25 * 16f64.powf(i as f64 / 11.0); a.n as usize]).collect();
    let next = fit_next_order(&vols, a.n, &fit_grid, &genera)?;
    let mut failures = Vec::new();
    for (x, e) in a.x.iter().zip(&shape.exponents) {
        if let Some(e) = e {
            if (e + 1.0).abs() > 0.25 {
                failures.push(format!("residual decay exponent {e:.3} at x = {x} is outside -1 +- 0.25"));
            }
        }
    }
    if next.post_fit_exponent > -1.5 {
        failures.push(format!("post-fit exponent {:.3} above -1.5", next.post_fit_exponent));
    }
    let rows: Vec<Vec<String>> = shape
        .rows
        .iter()
        .map(|r| vec![r.g.to_string(), num(r.x[0]), num(r.residual), num(r.bound_rhs)])
        .collect();
    Ok(RunOutput {
        parameters: json!({ "n": a.n, "gmin": a.gmin, "gmax": a.gmax, "x": a.x }),
        artifacts: vec![
            Artifact::csv("expansion.csv", "expansion_residuals", &["g", "x", "residual", "bound_rhs"], &rows)?,
            Artifact::json(
                "expansion.json",
                "expansion",
                &json!({
                    "exponents": shape.exponents,
                    "constant": shape.constant,
                    "exact_zero": shape.exact_zero,
                    "next_order": next,
                }),
            )?,
        ],
        failure: fail_if(failures),
    })
}

pub fn census(a: &CensusArgs) -> Run {
    let model = PantsModel::from_lengths(a.b1, a.b2, a.b3)?;
    let shape = CensusShape::new(a.kappa, a.log_factor, a.g)?;
    let report = verify_census(&model, &shape, a.word_cap)?;
    let rows: Vec<Vec<String>> = report
        .found
        .iter()
        .map(|f| {
            vec![
                f.word.to_string(),
                num(f.length),
                f.k.to_string(),
                f.in_census.to_string(),
                f.crossing_bound.to_string(),
                f.winding_bound.to_string(),
            ]
        })
        .collect();
    let mut failures = Vec::new();
    if !report.escapes.is_empty() {
        failures.push(format!("{} filling geodesics escape the census", report.escapes.len()));
    }
    if !report.inequality_failures.is_empty() {
        failures.push(format!("{} geodesics violate the length inequalities", report.inequality_failures.len()));
    }
    if failures.is_empty() && !report.passed() {
        failures.push("census verification failed".into());
    }
    Ok(RunOutput {
        parameters: json!({
            "b": [a.b1, a.b2, a.b3], "kappa": a.kappa, "log_factor": a.log_factor, "g": a.g, "word_cap": a.word_cap,
        }),
        artifacts: vec![
            Artifact::csv(
                "census.csv",
                "census_geodesics",
                &["word", "length", "k", "in_census", "crossing_bound", "winding_bound"],
                &rows,
            )?,
            Artifact::json("census.json", "census", &report)?,
        ],
        failure: fail_if(failures),
    })
}

pub fn orbits(a: &OrbitsArgs) -> Run {
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for g in 0..=a.gmax {
        for n in 0..=a.nmax {
            if Signature::new(g, n).is_err() {
                continue;
            }
            for j in 0..=a.jmax {
                let classes = enumerate_splittings(g, n, j, a.q_components)?;
                for (data, group) in classes_by_part_data(&classes) {
                    let bound = orbit_upper(j as u32, data.len() as u32);
                    let gluing = gluing_surjection_check(g, n, j, &data)?;
                    let pieces = data.iter().map(|(gi, ni)| format!("{gi}:{ni}")).collect::<Vec<_>>().join(" ");
                    if num_bigint::BigUint::from(group.len()) > bound {
                        failures.push(format!("({g},{n}) j={j} pieces [{pieces}]: {} classes above {bound}", group.len()));
                    }
                    if !gluing.surjective() {
                        failures.push(format!("({g},{n}) j={j} pieces [{pieces}]: gluing misses {} classes", gluing.missing.len()));
                    }
                    rows.push(vec![
                        g.to_string(),
                        n.to_string(),
                        j.to_string(),
                        pieces,
                        group.len().to_string(),
                        bound.to_string(),
                        gluing.valid.to_string(),
                        gluing.surjective().to_string(),
                    ]);
                }
            }
        }
    }
    Ok(RunOutput {
        parameters: json!({ "gmax": a.gmax, "nmax": a.nmax, "jmax": a.jmax, "q_components": a.q_components }),
        artifacts: vec![Artifact::csv(
            "orbits.csv",
            "orbit_counts",
            &["g", "n", "j", "pieces", "classes", "bound", "valid_gluings", "surjective"],
            &rows,
        )?],
        failure: fail_if(failures),
    })
}

pub fn series(a: &SeriesArgs) -> Run {
    let params = SeriesParams::new(a.kappa, a.q_components, a.beta)?;
    let y = y_moment_bound(&params)?;
    let second = second_moment_check(&params)?;
    let tail = tail_bound(a.g, a.kappa, a.q_components, a.power)?;
    let b_g = prob_b_bound(a.g, a.kappa, a.q_components, a.d)?;
    let b_2g = prob_b_bound(2.0 * a.g, a.kappa, a.q_components, a.d)?;
    let ratio = b_2g / b_g;
    let target = 2f64.powi(1 - a.q_components as i32);
    let mut failures = Vec::new();
    if !second.holds {
        failures.push(format!("Y^2 = {:e} exceeds Y_4beta = {:e}", second.y_beta_squared, second.y_four_beta));
    }
    if !tail.below_target {
        failures.push(format!("tail {:e} is not below g^-{} = {:e}", tail.value, a.power, tail.target));
    }
    if (ratio / target - 1.0).abs() > 0.05 {
        failures.push(format!("B ratio {ratio:e} is not within 5% of {target:e}"));
    }
    Ok(RunOutput {
        parameters: json!({
            "kappa": a.kappa, "q_components": a.q_components, "beta": a.beta, "g": a.g, "power": a.power, "d": a.d,
        }),
        artifacts: vec![Artifact::json(
            "series.json",
            "series",
            &json!({
                "y_moment": y,
                "second_moment": second,
                "tail": tail,
                "prob_b": { "at_g": b_g, "at_2g": b_2g, "ratio": ratio, "target_ratio": target },
            }),
        )?],
        failure: fail_if(failures),
    })
}

pub fn phi(a: &PhiArgs) -> Run {
    if a.gmax < a.gmin + 4 {
        return Err(CliError::validation("the rank fit needs at least five genera"));
    }
    let filling = match a.filling {
        Filling::Cylinder => FillingType::Cylinder,
        Filling::Pants => FillingType::Pants,
    };
    let x = spread(&a.x, filling.arity(), "--x")?;
    let y = if a.j == 0 { Vec::new() } else { spread(&a.y, a.j, "--y")? };
    let vols = NumericVolumes::default();
    let genera: Vec<u32> = (a.gmin..=a.gmax).collect();
    let mut rows = Vec::new();
    for &g in &genera {
        let e = phi_evaluate(&vols, filling, a.j, a.q_components, g, &x, &y)?;
        rows.push(vec![g.to_string(), e.skeletons.to_string(), num(e.value)]);
    }
    let report = rank_truncation_check(&vols, filling, a.j, a.q_components, filling.euler() + 1, &genera)?;
    let mut failures = Vec::new();
    if !report.ranks_ok() {
        failures.push(format!(
            "measured rank {:.3} below chi(S) - {}",
            report.min_rank().unwrap_or(f64::NAN),
            report.tolerance
        ));
    }
    if !report.truncation_ok() {
        failures.push("truncated sums exceed the bound".into());
    }
    Ok(RunOutput {
        parameters: json!({
            "filling": format!("{filling:?}").to_lowercase(), "j": a.j, "q_components": a.q_components,
            "gmin": a.gmin, "gmax": a.gmax, "x": x, "y": y,
        }),
        artifacts: vec![
            Artifact::csv("phi.csv", "phi_values", &["g", "skeletons", "phi_times_n_t"], &rows)?,
            Artifact::json("phi.json", "rank_truncation", &report)?,
        ],
        failure: fail_if(failures),
    })
}

pub fn density(a: &DensityArgs) -> Run {
    let vols = NumericVolumes::default();
    let grid = linspace(a.lmin, a.lmax, a.points)?;
    let assembly = if a.torus {
        torus_once_intersecting_density(&vols, a.g, a.kappa, &grid, a.j_max)?
    } else {
        let word = FreeWord::new(a.word.clone())?;
        assemble_density_pants(&vols, &word, a.g, a.kappa, &grid, a.j_max, a.corrections)?
    };
    let ls: Vec<f64> = assembly.points.iter().map(|p| p.l).collect();
    let lv: Vec<f64> = assembly.points.iter().map(|p| p.l * p.value).collect();
    let fit = fr_decompose(&ls, &lv, Normalizer::SinhHalf, a.degree, 3.0)?;
    let rows: Vec<Vec<String>> = assembly
        .points
        .iter()
        .map(|p| vec![num(p.l), num(p.value), num(p.connected), num(p.j_truncation_error)])
        .collect();
    let mut failures = Vec::new();
    if assembly.monotonicity_failures > 0 {
        failures.push(format!("{} volume-ratio monotonicity failures", assembly.monotonicity_failures));
    }
    let negative = assembly.points.iter().filter(|p| p.value < 0.0).count();
    if negative > 0 && !a.corrections {
        failures.push(format!("{negative} negative density values"));
    }
    Ok(RunOutput {
        parameters: json!({
            "word": if a.torus { None } else { Some(&a.word) }, "torus": a.torus, "g": a.g, "kappa": a.kappa,
            "lmin": a.lmin, "lmax": a.lmax, "points": a.points, "j_max": a.j_max, "corrections": a.corrections,
            "degree": a.degree,
        }),
        artifacts: vec![
            Artifact::csv("density.csv", "density", &["l", "value", "connected", "j_truncation_error"], &rows)?,
            Artifact::json("density.json", "density", &json!({ "assembly": assembly, "fr_fit": fit }))?,
        ],
        failure: fail_if(failures),
    })
}

pub fn jkappa(a: &JkappaArgs) -> Run {
    let ls = linspace(a.lmin, a.lmax, a.points)?;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &l in &ls {
        let j = j_kappa(l, a.kappa)?;
        let gap = j_kappa_normalized_gap(l, a.kappa)?;
        worst = worst.max(j.relative_gap());
        rows.push(vec![num(l), num(j.closed_form), num(j.direct), num(j.relative_gap()), num(gap)]);
    }
    let failure = (worst > 1e-6).then(|| format!("closed form and quadrature differ by {worst:e} relative"));
    Ok(RunOutput {
        parameters: json!({ "kappa": a.kappa, "lmin": a.lmin, "lmax": a.lmax, "points": a.points }),
        artifacts: vec![Artifact::csv(
            "jkappa.csv",
            "j_kappa",
            &["l", "closed_form", "direct", "relative_gap", "normalized_gap"],
            &rows,
        )?],
        failure,
    })
}

pub fn trace(a: &TraceArgs) -> Run {
    if a.samples < 2 || !(a.rmax > 0.0) {
        return Err(CliError::validation("need at least two samples and rmax > 0"));
    }
    let mut rows = Vec::new();
    let mut min_hat = f64::INFINITY;
    for i in 0..a.samples {
        let r = -a.rmax + 2.0 * a.rmax * i as f64 / (a.samples - 1) as f64;
        let z = Complex64::new(r, 0.0);
        let direct = h_l_hat_direct(z, 1.0)?.re;
        min_hat = min_hat.min(direct);
        rows.push(vec![num(r), "0".into(), num(direct), num(h_hat(z)?.re), num(H_hat(z, a.l, a.m)?)]);
    }
    for i in 0..=20 {
        let t = -0.5 + i as f64 / 20.0;
        let z = Complex64::new(0.0, t);
        let direct = h_l_hat_direct(z, 1.0)?.re;
        min_hat = min_hat.min(direct);
        rows.push(vec!["0".into(), num(t), num(direct), num(h_hat(z)?.re), num(H_hat(z, a.l, a.m)?)]);
    }
    let mut dilation: f64 = 0.0;
    for i in 0..=40 {
        dilation = dilation.max(dilation_gap(-10.0 + 0.5 * i as f64, a.l)?);
    }
    let mut annihilation = Vec::new();
    for m in 1..=a.m {
        for k in 0..=m {
            annihilation.push(cancellation_check(k, m, a.l)?);
        }
    }
    let mut cross = Vec::new();
    for z in [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.25)] {
        cross.push(hat_cross_check(z, a.l, a.m)?);
    }
    let spectral = spectral_lower_bound(2.0 / 9.0 - a.epsilon, a.epsilon, &length_scan(20.0, 400.0, 9))?;
    let mut failures = Vec::new();
    if min_hat < -1e-12 {
        failures.push(format!("hat h reaches {min_hat:e}"));
    }
    if dilation > 1e-10 {
        failures.push(format!("dilation identity off by {dilation:e}"));
    }
    if let Some(c) = annihilation.iter().find(|c| !c.passed()) {
        failures.push(format!("annihilation fails at k = {}, m = {}: {:e}", c.k, c.m, c.value));
    }
    if let Some(c) = cross.iter().find(|c| c.relative_gap > 1e-6) {
        failures.push(format!("dual paths differ by {:e} at m = {}", c.relative_gap, c.m));
    }
    if !spectral.growth_ok() {
        failures.push("spectral growth below e^{(alpha + eps) L}".into());
    }
    Ok(RunOutput {
        parameters: json!({ "l": a.l, "m": a.m, "samples": a.samples, "rmax": a.rmax, "epsilon": a.epsilon }),
        artifacts: vec![
            Artifact::csv("trace_hat.csv", "hat_h_samples", &["re_r", "im_r", "hat_h_direct", "hat_h", "H_hat_L_m"], &rows)?,
            Artifact::json(
                "trace.json",
                "trace_checks",
                &json!({
                    "min_hat_h": min_hat,
                    "dilation_gap": dilation,
                    "annihilation": annihilation,
                    "dual_path": cross,
                    "spectral": spectral,
                    "boundary": BOUNDARY_NOTE,
                }),
            )?,
        ],
        failure: fail_if(failures),
    })
}

pub fn pipeline_cmd(a: &PipelineArgs) -> Run {
    let eps = parse_rational(&a.epsilon)?;
    let kappa = parse_rational(&a.kappa)?;
    let report = pipeline(&BoundConstants::new(eps, kappa, a.m))?;
    let failure = (!report.certified).then(|| format!("bound not certified: main term g^({})", report.main_term_value));
    Ok(RunOutput {
        parameters: json!({ "epsilon": a.epsilon, "kappa": a.kappa, "m": a.m }),
        artifacts: vec![Artifact::json("pipeline.json", "pipeline", &report)?],
        failure,
    })
}
