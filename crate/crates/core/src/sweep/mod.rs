//! Batch driver behind the command line: sweeps over `(e, γ)`, the on-disk
//! cache, result files and plots.

pub mod cache;
pub mod config;
pub mod plot;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::ellipse::Ellipse;
use crate::error::{Error, Result};
use crate::operator::{kappa_table, required_harmonics, rigidity_scan, KappaEntry, KappaTable};
use crate::orbit::{closure_residual, OrbitFamily};

pub use cache::{Cache, CacheEntry, Lookup};
pub use config::SweepConfig;
pub use report::{SweepResult, SweepRow};

/// Orbits and `κ` table for one eccentricity, backed by the cache when one
/// is configured.
#[derive(Debug)]
pub struct Prepared {
    pub family: OrbitFamily,
    pub kappa: KappaTable,
    /// Whether the `κ` table came from disk.
    pub kappa_from_cache: bool,
    /// Reason a cache file was discarded, if one was.
    pub discarded: Option<String>,
}

/// Loads or computes the orbit family and a `κ` table with at least
/// `harmonics` entries, then writes back anything new.
pub fn prepare(
    e: f64,
    maxq: u32,
    threshold: f64,
    harmonics: usize,
    cache: Option<&Cache>,
) -> Result<Prepared> {
    let ellipse = Ellipse::new(e)?;
    let mut family = OrbitFamily::new(ellipse, maxq);
    let mut cached_kappa = None;
    let mut discarded = None;
    let mut known = 0;
    if let Some(cache) = cache {
        match cache.load(e, maxq, threshold) {
            Lookup::Hit(entry) => {
                known = entry.lambdas.len();
                family = family.with_lambdas(entry.lambdas)?;
                cached_kappa = entry.kappa;
            }
            Lookup::Miss => {}
            Lookup::Corrupt(why) => discarded = Some(why),
        }
    }
    let (kappa, kappa_from_cache) = match cached_kappa {
        Some(k) if k.harmonics() >= harmonics => (k, true),
        _ => (kappa_table(&family, harmonics, threshold)?, false),
    };
    if let Some(cache) = cache {
        if !kappa_from_cache || family.known_lambdas().len() != known {
            cache.store(&CacheEntry {
                e,
                maxq,
                threshold,
                lambdas: family.known_lambdas(),
                kappa: Some(kappa.clone()),
            })?;
        }
    }
    Ok(Prepared {
        family,
        kappa,
        kappa_from_cache,
        discarded,
    })
}

/// Runs the rigidity scan for every `(e, γ)` pair of the configuration and
/// writes the requested CSV/JSON files.
///
/// Eccentricities are processed in parallel; rows come out in configuration
/// order regardless of scheduling.
pub fn cmd_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let cache = config.cache_dir.as_ref().map(Cache::new);
    let harmonics = required_harmonics(config.cutoff, config.q_cap);
    let policy = config.stop_policy();

    let per_e: Vec<Vec<SweepRow>> = config
        .e_values
        .par_iter()
        .map(|&e| {
            let prepared = prepare(
                e,
                config.maxq,
                config.kappa_threshold,
                harmonics,
                cache.as_ref(),
            )?;
            let rows = config
                .gamma_values
                .iter()
                .map(|&gamma| {
                    let started = Instant::now();
                    let scan = rigidity_scan(
                        &prepared.family,
                        &prepared.kappa,
                        gamma,
                        config.cutoff,
                        &policy,
                    )?;
                    Ok(SweepRow {
                        eccentricity: e,
                        gamma,
                        max_norm: scan.max_norm,
                        argmax_q: scan.argmax_q,
                        stop_reason: scan.stop_reason,
                        verdict: scan.verdict,
                        wall_time: started.elapsed().as_secs_f64(),
                        kappa_unconverged: scan.kappa_unconverged,
                        terms: scan.terms,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(cache) = cache.as_ref() {
                // the scan may have solved caustics the κ pass never needed
                let lambdas = prepared.family.known_lambdas();
                if let Lookup::Hit(entry) = cache.load(e, config.maxq, config.kappa_threshold) {
                    if entry.lambdas.len() != lambdas.len() {
                        cache.store(&CacheEntry { lambdas, ..entry })?;
                    }
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;

    let result = SweepResult {
        rows: per_e.into_iter().flatten().collect(),
        provenance: report::Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
        },
    };
    if let Some(path) = &config.csv {
        write_file(path, &result.to_csv())?;
    }
    if let Some(path) = &config.json {
        write_file(path, &result.to_json())?;
    }
    Ok(result)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Everything worth printing about one periodic orbit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitReport {
    pub e: f64,
    pub q: u32,
    pub lambda: Option<f64>,
    pub m_lambda: Option<f64>,
    pub amplitudes: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    pub x: Vec<f64>,
    pub theta: Vec<f64>,
    pub closure_residual: f64,
    pub reflection_residual: f64,
    pub winding_number: i64,
    pub length: f64,
}

impl OrbitReport {
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "eccentricity {}  period {}", self.e, self.q);
        match (self.lambda, self.m_lambda) {
            (Some(l), Some(m)) => {
                let _ = writeln!(out, "lambda {l:.17e}  m_lambda {m:.17e}");
            }
            _ => {
                let _ = writeln!(out, "conventional orbit (no caustic)");
            }
        }
        let _ = writeln!(
            out,
            "closure residual {:.3e}  reflection residual {:.3e}  winding {}  length {:.15}",
            self.closure_residual, self.reflection_residual, self.winding_number, self.length
        );
        let _ = writeln!(out, "{:>6} {:>22} {:>22} {:>22} {:>22} {:>22}", "n", "amplitude", "x_pos", "y_pos", "lazutkin_x", "theta");
        for n in 0..self.x.len() {
            let _ = writeln!(
                out,
                "{:>6} {:>22.15e} {:>22.15e} {:>22.15e} {:>22.15e} {:>22.15e}",
                n,
                self.amplitudes[n],
                self.points[n][0],
                self.points[n][1],
                self.x[n],
                self.theta[n]
            );
        }
        out
    }
}

pub fn cmd_orbit(e: f64, q: u32, maxq: u32) -> Result<OrbitReport> {
    if q == 0 {
        return Err(Error::domain("q", 0.0, "q >= 1"));
    }
    if q > maxq {
        return Err(Error::PeriodCap { q, maxq });
    }
    let ellipse = Ellipse::new(e)?;
    let orbit = crate::orbit::build_orbit(&ellipse, q)?;
    Ok(OrbitReport {
        e,
        q,
        lambda: orbit.lambda(),
        m_lambda: orbit.caustic.map(|c| c.m_lambda),
        closure_residual: closure_residual(&ellipse, &orbit),
        reflection_residual: orbit.reflection_residual,
        winding_number: orbit.winding_number(),
        length: orbit.length(),
        amplitudes: orbit.amplitudes,
        points: orbit.points,
        x: orbit.x,
        theta: orbit.theta,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaReport {
    pub e: f64,
    pub entries: Vec<KappaEntry>,
    pub from_cache: bool,
}

impl KappaReport {
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = format!("# e = {}  source = {}\n", self.e, if self.from_cache { "cache" } else { "computed" });
        let _ = writeln!(out, "{:>6} {:>25} {:>6} status", "j", "kappa", "q_used");
        for (i, k) in self.entries.iter().enumerate() {
            let _ = writeln!(out, "{:>6} {:>25.16e} {:>6} {}", i + 1, k.value, k.q_used, k.status.as_str());
        }
        out
    }
}

pub fn cmd_kappa(
    e: f64,
    harmonics: usize,
    threshold: f64,
    maxq: u32,
    cache: Option<&Cache>,
) -> Result<KappaReport> {
    if harmonics == 0 {
        return Err(Error::Config("need at least one harmonic".into()));
    }
    if maxq < 3 {
        return Err(Error::Config("maxq must be at least 3".into()));
    }
    let prepared = prepare(e, maxq, threshold, harmonics, cache)?;
    Ok(KappaReport {
        e,
        entries: prepared.kappa.entries[..harmonics].to_vec(),
        from_cache: prepared.kappa_from_cache,
    })
}

/// Files written by [`cmd_plot`].
#[derive(Debug, Clone, PartialEq)]
pub struct PlotOutput {
    pub svg: PathBuf,
    pub data: PathBuf,
    pub series: Vec<plot::Series>,
}

/// Plots `max_norm` against `e` from one or more result files, one series
/// per `γ`, and writes the SVG plus a `.dat` sidecar next to it.
pub fn cmd_plot(inputs: &[PathBuf], svg_path: &Path, title: &str) -> Result<PlotOutput> {
    if inputs.is_empty() {
        return Err(Error::Config("no result files given".into()));
    }
    let mut points = Vec::new();
    for path in inputs {
        points.extend(report::read_result_points(path)?);
    }
    let series = plot::group_series(&points);
    let data_path = svg_path.with_extension("dat");
    write_file(svg_path, &plot::render_svg(&series, title))?;
    write_file(&data_path, &plot::plot_data(&series))?;
    Ok(PlotOutput {
        svg: svg_path.to_path_buf(),
        data: data_path,
        series,
    })
}
