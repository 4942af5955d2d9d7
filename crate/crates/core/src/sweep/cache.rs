//! Per-eccentricity cache of caustic parameters and `κ` tables.
//!
//! One plain-text file per `(e, maxq, threshold)`. Floats are written with 17
//! significant digits so they read back bit-exact, and the last line carries
//! a SHA-256 of everything before it; a file whose checksum or header does not
//! match is ignored and rewritten.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::operator::{KappaEntry, KappaStatus, KappaTable};

const MAGIC: &str = "# ellrig cache v1";
const EXTENSION: &str = "cache";

#[derive(Debug, Clone, PartialEq)]
pub struct CacheEntry {
    pub e: f64,
    pub maxq: u32,
    pub threshold: f64,
    /// `(q, λ_q)`, ordered by `q`.
    pub lambdas: Vec<(u32, f64)>,
    pub kappa: Option<KappaTable>,
}

/// Result of looking up a cache file.
#[derive(Debug)]
pub enum Lookup {
    Hit(CacheEntry),
    Miss,
    /// The file exists but is truncated, tampered with, or for other keys.
    Corrupt(String),
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

fn key_hash(e: f64, maxq: u32, threshold: f64) -> String {
    let key = format!("e={:016x};maxq={maxq};threshold={:016x}", e.to_bits(), threshold.to_bits());
    hex::encode(&Sha256::digest(key.as_bytes())[..8])
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, e: f64, maxq: u32, threshold: f64) -> PathBuf {
        self.dir.join(format!(
            "e{e:.6}-{}.{EXTENSION}",
            key_hash(e, maxq, threshold)
        ))
    }

    pub fn load(&self, e: f64, maxq: u32, threshold: f64) -> Lookup {
        let path = self.path_for(e, maxq, threshold);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(err) if err.kind() == std::io::ErrorKind::NotFound => return Lookup::Miss,
            Err(err) => return Lookup::Corrupt(err.to_string()),
        };
        match decode(&text) {
            Ok(entry)
                if entry.e.to_bits() == e.to_bits()
                    && entry.maxq == maxq
                    && entry.threshold.to_bits() == threshold.to_bits() =>
            {
                Lookup::Hit(entry)
            }
            Ok(_) => Lookup::Corrupt(format!("{}: key mismatch", path.display())),
            Err(msg) => Lookup::Corrupt(format!("{}: {msg}", path.display())),
        }
    }

    /// Writes `entry` through a temporary file and an atomic rename.
    pub fn store(&self, entry: &CacheEntry) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let path = self.path_for(entry.e, entry.maxq, entry.threshold);
        let tmp = path.with_extension(format!(
            "tmp.{}.{}",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        fs::write(&tmp, encode(entry)).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| {
            let _ = fs::remove_file(&tmp);
            Error::io(&path, e)
        })
    }

    /// Removes every cache file in the directory; returns how many.
    pub fn clear(&self) -> Result<usize> {
        let rd = match fs::read_dir(&self.dir) {
            Ok(rd) => rd,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(Error::io(&self.dir, e)),
        };
        let mut removed = 0;
        for item in rd {
            let path = item.map_err(|e| Error::io(&self.dir, e))?.path();
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
            let ours = name.starts_with('e')
                && (name.ends_with(&format!(".{EXTENSION}")) || name.contains(".tmp."));
            if ours && path.is_file() {
                fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
                removed += 1;
            }
        }
        Ok(removed)
    }
}

pub(crate) fn encode(entry: &CacheEntry) -> String {
    let mut body = String::new();
    let _ = writeln!(body, "{MAGIC}");
    let _ = writeln!(body, "e {}", float(entry.e));
    let _ = writeln!(body, "maxq {}", entry.maxq);
    let _ = writeln!(body, "threshold {}", float(entry.threshold));
    let _ = writeln!(body, "lambdas {}", entry.lambdas.len());
    for (q, lambda) in &entry.lambdas {
        let _ = writeln!(body, "{q} {}", float(*lambda));
    }
    match &entry.kappa {
        None => {
            let _ = writeln!(body, "kappa 0");
        }
        Some(table) => {
            let _ = writeln!(body, "kappa {}", table.entries.len());
            for (i, k) in table.entries.iter().enumerate() {
                let _ = writeln!(
                    body,
                    "{} {} {} {}",
                    i + 1,
                    float(k.value),
                    k.q_used,
                    k.status.as_str()
                );
            }
        }
    }
    let sum = hex::encode(Sha256::digest(body.as_bytes()));
    let _ = writeln!(body, "checksum {sum}");
    body
}

pub(crate) fn decode(text: &str) -> std::result::Result<CacheEntry, String> {
    let body_end = text
        .trim_end_matches('\n')
        .rfind('\n')
        .map(|i| i + 1)
        .ok_or("truncated file")?;
    let (body, trailer) = text.split_at(body_end);
    let sum = trailer
        .trim_end()
        .strip_prefix("checksum ")
        .ok_or("missing checksum")?;
    if hex::encode(Sha256::digest(body.as_bytes())) != sum {
        return Err("checksum mismatch".into());
    }

    let mut lines = body.lines();
    let mut next = || lines.next().ok_or_else(|| "unexpected end".to_string());
    if next()? != MAGIC {
        return Err("bad header".into());
    }
    fn field<'a>(line: &'a str, name: &str) -> std::result::Result<&'a str, String> {
        line.strip_prefix(name)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| format!("expected {name}"))
    }
    fn parse<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String> {
        s.parse().map_err(|_| format!("bad number {s:?}"))
    }
    let e: f64 = parse(field(next()?, "e")?)?;
    let maxq: u32 = parse(field(next()?, "maxq")?)?;
    let threshold: f64 = parse(field(next()?, "threshold")?)?;

    let n_lambda: usize = parse(field(next()?, "lambdas")?)?;
    let mut lambdas = Vec::with_capacity(n_lambda);
    for _ in 0..n_lambda {
        let line = next()?;
        let (q, l) = line.split_once(' ').ok_or("bad lambda row")?;
        lambdas.push((parse(q)?, parse(l)?));
    }

    let n_kappa: usize = parse(field(next()?, "kappa")?)?;
    let kappa = if n_kappa == 0 {
        None
    } else {
        let mut entries = Vec::with_capacity(n_kappa);
        for j in 1..=n_kappa {
            let line = next()?;
            let cols: Vec<&str> = line.split(' ').collect();
            let [idx, value, q_used, status] = cols[..] else {
                return Err("bad kappa row".into());
            };
            if parse::<usize>(idx)? != j {
                return Err("kappa rows out of order".into());
            }
            entries.push(KappaEntry {
                value: parse(value)?,
                q_used: parse(q_used)?,
                status: KappaStatus::parse(status).ok_or("bad kappa status")?,
            });
        }
        Some(KappaTable {
            entries,
            threshold,
            maxq,
        })
    };
    if next().is_ok() {
        return Err("trailing data".into());
    }
    Ok(CacheEntry {
        e,
        maxq,
        threshold,
        lambdas,
        kappa,
    })
}
