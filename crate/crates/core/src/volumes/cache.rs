use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use sha2::{Digest, Sha256};

use super::recursion::Engine;
use super::{Signature, VolumePolynomial};
use crate::error::{Error, Result};

pub const DEFAULT_DIMENSION_CAP: u32 = 12;
pub const CACHE_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "TFVC";

/// Exact volume polynomials, memoized and optionally persisted.
///
/// File layout: a `TFVC <version>` line, a `sha256 <hex>` line over the body,
/// then one `g,n,a;b;c,numerator,denominator` line per canonical coefficient.
/// A file with a different version is ignored; a checksum mismatch is an error.
pub struct VolumeCache {
    cap: u32,
    engine: Engine<BigRational>,
    polys: RwLock<BTreeMap<Signature, Arc<VolumePolynomial>>>,
    path: Option<PathBuf>,
}

impl Default for VolumeCache {
    fn default() -> Self {
        Self::new(DEFAULT_DIMENSION_CAP)
    }
}

impl VolumeCache {
    pub fn new(cap: u32) -> Self {
        VolumeCache {
            cap,
            // closed surfaces are read off the one-holed table one dimension up
            engine: Engine::new(cap + 1),
            polys: RwLock::new(BTreeMap::new()),
            path: None,
        }
    }

    /// Opens a cache backed by `path`, loading it when present.
    pub fn open(path: impl AsRef<Path>, cap: u32) -> Result<Self> {
        let mut cache = Self::new(cap);
        let path = path.as_ref().to_path_buf();
        if path.exists() {
            let text = std::fs::read_to_string(&path)?;
            if let Some(loaded) = parse(&text)? {
                *cache.polys.write().expect("cache lock") = loaded;
            }
        }
        cache.path = Some(path);
        Ok(cache)
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn compute_volume(&self, sig: Signature) -> Result<Arc<VolumePolynomial>> {
        if sig.dim() > self.cap {
            return Err(Error::resource(format!(
                "signature {sig} has dimension {} above the cap {}",
                sig.dim(),
                self.cap
            )));
        }
        if let Some(p) = self.polys.read().expect("cache lock").get(&sig) {
            return Ok(p.clone());
        }
        let poly = Arc::new(self.recompute(sig)?);
        let mut w = self.polys.write().expect("cache lock");
        Ok(w.entry(sig).or_insert(poly).clone())
    }

    /// Runs the recursion, bypassing stored polynomials.
    pub fn recompute(&self, sig: Signature) -> Result<VolumePolynomial> {
        let t = self.engine.table(sig.g, sig.n)?;
        Ok(VolumePolynomial::from_tau(sig, &t.keys, &t.values))
    }

    pub fn volume(&self, g: u32, n: u32) -> Result<Arc<VolumePolynomial>> {
        self.compute_volume(Signature::new(g, n)?)
    }

    pub fn signatures(&self) -> Vec<Signature> {
        self.polys.read().expect("cache lock").keys().copied().collect()
    }

    pub fn serialize(&self) -> String {
        let polys = self.polys.read().expect("cache lock");
        let mut body = String::new();
        for (sig, p) in polys.iter() {
            for (alpha, q) in p.canonical_terms() {
                body.push_str(&format!(
                    "{},{},{},{},{}\n",
                    sig.g,
                    sig.n,
                    join_alpha(alpha),
                    q.numer(),
                    q.denom()
                ));
            }
        }
        let digest = hex::encode(Sha256::digest(body.as_bytes()));
        format!("{MAGIC} {CACHE_FORMAT_VERSION}\nsha256 {digest}\n{body}")
    }

    pub fn save(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Err(Error::Cache("cache has no backing file".into()));
        };
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.serialize())?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }

    /// Coefficient table with columns `g,n,alpha,numerator,denominator,pi_power`.
    pub fn write_csv<W: Write>(&self, sigs: &[Signature], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["g", "n", "alpha", "numerator", "denominator", "pi_power"])
            .map_err(csv_err)?;
        for &sig in sigs {
            let p = self.compute_volume(sig)?;
            for (alpha, q) in p.canonical_terms() {
                w.write_record([
                    sig.g.to_string(),
                    sig.n.to_string(),
                    join_alpha(alpha),
                    q.numer().to_string(),
                    q.denom().to_string(),
                    (2 * p.pi_power(alpha)).to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Cache(format!("csv: {e}"))
}

fn join_alpha(alpha: &[u32]) -> String {
    alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(";")
}

type Loaded = BTreeMap<Signature, Arc<VolumePolynomial>>;

fn parse(text: &str) -> Result<Option<Loaded>> {
    let mut lines = text.splitn(3, '\n');
    let header = lines.next().unwrap_or_default();
    let mut parts = header.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(Error::Cache("not a volume cache file".into()));
    }
    let version: u32 = parts
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Cache("missing cache version".into()))?;
    if version != CACHE_FORMAT_VERSION {
        return Ok(None);
    }
    let sum_line = lines.next().unwrap_or_default();
    let want = sum_line
        .strip_prefix("sha256 ")
        .ok_or_else(|| Error::Cache("missing checksum line".into()))?;
    let body = lines.next().unwrap_or_default();
    if hex::encode(Sha256::digest(body.as_bytes())) != want {
        return Err(Error::Cache("checksum mismatch".into()));
    }
    let mut raw: BTreeMap<Signature, BTreeMap<Vec<u32>, BigRational>> = BTreeMap::new();
    for line in body.lines() {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(Error::Cache(format!("malformed line: {line}")));
        }
        let bad = || Error::Cache(format!("malformed line: {line}"));
        let g: u32 = f[0].parse().map_err(|_| bad())?;
        let n: u32 = f[1].parse().map_err(|_| bad())?;
        let alpha: Vec<u32> = if f[2].is_empty() {
            Vec::new()
        } else {
            f[2].split(';').map(|a| a.parse().map_err(|_| bad())).collect::<Result<_>>()?
        };
        let num: BigInt = f[3].parse().map_err(|_| bad())?;
        let den: BigInt = f[4].parse().map_err(|_| bad())?;
        let sig = Signature::new(g, n).map_err(|_| bad())?;
        raw.entry(sig).or_default().insert(alpha, BigRational::new(num, den));
    }
    Ok(Some(
        raw.into_iter()
            .map(|(sig, c)| (sig, Arc::new(VolumePolynomial::from_parts(sig, c))))
            .collect(),
    ))
}
