#[path = "../../core/tests/common/oracle.rs"]
#[allow(dead_code)]
mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::{Command, Output};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value;
use sha2::{Digest, Sha256};

fn tanglefree(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tanglefree"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("TANGLEFREE_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn read_csv(path: &Path) -> (String, Vec<BTreeMap<String, String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let first = text.lines().next().unwrap().to_string();
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| header.iter().cloned().zip(rec.unwrap().iter().map(String::from)).collect())
        .collect();
    (first, rows)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn error_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is one JSON object")
}

#[test]
fn volume_table_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = tanglefree(dir.path(), &["volumes", "--gmax", "2", "--nmax", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (first, rows) = read_csv(&dir.path().join("volumes.csv"));
    assert!(first.contains("schema_version=1"));
    let mut table: BTreeMap<(u32, u32, Vec<u32>), (BigRational, u32)> = BTreeMap::new();
    for r in &rows {
        let mut alpha: Vec<u32> = r["alpha"].split(';').filter(|s| !s.is_empty()).map(|s| s.parse().unwrap()).collect();
        alpha.sort_unstable();
        let q = BigRational::new(r["numerator"].parse::<BigInt>().unwrap(), r["denominator"].parse::<BigInt>().unwrap());
        table.insert((r["g"].parse().unwrap(), r["n"].parse().unwrap(), alpha), (q, r["pi_power"].parse().unwrap()));
    }
    let mut o = oracle::Oracle::new();
    let mut expected = BTreeSet::new();
    for (g, n) in [(0, 3), (1, 1), (1, 2), (1, 3), (2, 0), (2, 1), (2, 2), (2, 3)] {
        for ((e, pi2), c) in o.volume(g, n) {
            let mut alpha: Vec<u32> = e.iter().map(|&v| v as u32 / 2).collect();
            alpha.sort_unstable();
            // the public one-holed torus is twice the recursion's value
            let c = if (g, n) == (1, 1) { c * BigRational::from_integer(2.into()) } else { c };
            let got = table.get(&(g, n, alpha.clone())).unwrap_or_else(|| panic!("missing ({g},{n}) {alpha:?}"));
            // the table records the exponent of pi, the oracle that of pi^2
            assert_eq!(got, &(c, 2 * pi2 as u32), "({g},{n}) {alpha:?}");
            expected.insert((g, n, alpha));
        }
    }
    let listed: BTreeSet<_> = table.keys().filter(|(g, n, _)| !(*g == 0 && *n < 3)).cloned().collect();
    assert_eq!(listed, expected);
}

#[test]
fn j_kappa_columns_agree() {
    let dir = tempfile::tempdir().unwrap();
    let out = tanglefree(dir.path(), &["jkappa", "--kappa", "0.5", "--lmin", "2", "--lmax", "20"]);
    assert!(out.status.success());
    let (_, rows) = read_csv(&dir.path().join("jkappa.csv"));
    assert_eq!(rows.len(), 20);
    let mut positive = 0;
    for r in rows {
        let a: f64 = r["closed_form"].parse().unwrap();
        let b: f64 = r["direct"].parse().unwrap();
        if a > 0.0 {
            positive += 1;
            assert!((a - b).abs() <= 1e-6 * a, "{a} vs {b}");
        } else {
            assert_eq!(b, 0.0);
        }
    }
    assert!(positive >= 10);
}

#[test]
fn pipeline_main_term() {
    let dir = tempfile::tempdir().unwrap();
    let out = tanglefree(dir.path(), &["pipeline", "--epsilon", "0.05", "--kappa", "0.01"]);
    assert!(out.status.success());
    let doc = read_json(&dir.path().join("pipeline.json"));
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["report"]["main_term_value"], "-1/20");
    assert_eq!(doc["report"]["main_term_exponent"], "-eps");
    assert_eq!(doc["report"]["certified"], true);
}

#[test]
fn outputs_are_byte_identical_and_checksummed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        assert!(tanglefree(dir.path(), &["trace", "--samples", "40"]).status.success());
    }
    let manifest = read_json(&a.path().join("manifest.json"));
    assert_eq!(manifest["subcommand"], "trace");
    assert_eq!(manifest["verification"]["passed"], true);
    let mut names = vec!["manifest.json".to_string()];
    for f in manifest["outputs"].as_array().unwrap() {
        let name = f["file"].as_str().unwrap();
        let bytes = std::fs::read(a.path().join(name)).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), hex(&Sha256::digest(&bytes)));
        names.push(name.into());
    }
    for name in names {
        assert_eq!(std::fs::read(a.path().join(&name)).unwrap(), std::fs::read(b.path().join(&name)).unwrap(), "{name}");
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = tanglefree(dir.path(), &["census", "--kappa", "2"]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(error_json(&bad)["error"]["kind"], "domain");

    let big = tanglefree(dir.path(), &["expansion", "--gmax", "40"]);
    assert_eq!(big.status.code(), Some(3));
    assert_eq!(error_json(&big)["error"]["exit_code"], 3);

    // the evaluated moment bounds break the squared inequality at Q = 5
    let fails = tanglefree(dir.path(), &["series", "--q-components", "5", "--beta", "1"]);
    assert_eq!(fails.status.code(), Some(5));
    assert_eq!(error_json(&fails)["error"]["kind"], "verification");
    let manifest = read_json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["verification"]["passed"], false);
    assert!(dir.path().join("series.json").exists());

    let ok = tanglefree(dir.path(), &["series", "--q-components", "3", "--beta", "0.5"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn cache_directory_from_environment() {
    let cache = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_tanglefree"))
            .arg("--out")
            .arg(out.path())
            .args(["volumes", "--gmax", "2", "--nmax", "2"])
            .env("TANGLEFREE_CACHE_DIR", cache.path())
            .output()
            .unwrap()
    };
    assert!(run().status.success());
    let first = std::fs::read(out.path().join("volumes.csv")).unwrap();
    assert!(cache.path().join("volumes.cache").exists());
    assert!(run().status.success());
    assert_eq!(first, std::fs::read(out.path().join("volumes.csv")).unwrap());
}

#[test]
fn remaining_subcommands_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 5] = [
        (&["census", "--g", "20", "--word-cap", "8"], "census.json"),
        (&["orbits", "--gmax", "2", "--jmax", "2"], "orbits.csv"),
        (&["phi", "--filling", "pants", "--j", "1", "--gmax", "8"], "phi.json"),
        (&["density", "--points", "10", "--lmin", "4", "--lmax", "13"], "density.json"),
        (&["expansion", "--gmax", "8", "--x", "0.5,1"], "expansion.json"),
    ];
    for (args, file) in cases {
        let out = tanglefree(dir.path(), args);
        assert!(matches!(out.status.code(), Some(0) | Some(5)), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(dir.path().join(file).exists(), "{args:?}");
        assert_eq!(read_json(&dir.path().join("manifest.json"))["subcommand"], args[0]);
    }
}
