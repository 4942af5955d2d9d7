use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ellipse_rigidity::operator::{DEFAULT_KAPPA_THRESHOLD, DEFAULT_MAXQ};
use ellipse_rigidity::sweep::config::{parse_list, parse_range, CACHE_DIR_ENV, DEFAULT_CACHE_DIR};
use ellipse_rigidity::sweep::{cmd_kappa, cmd_orbit, cmd_plot, cmd_sweep, Cache, SweepConfig};
use ellipse_rigidity::Error;

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_PARSE: u8 = 5;

#[derive(Parser)]
#[command(name = "ellrig", version, about = "Injectivity test for the isospectral operator of elliptical billiards")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan max norm terms over a grid of eccentricities and gammas
    Sweep(SweepArgs),
    /// Dump one periodic orbit
    Orbit(OrbitArgs),
    /// Print the kappa_j table of one eccentricity
    Kappa(KappaArgs),
    /// Plot max norm against eccentricity from result files
    Plot(PlotArgs),
    /// Manage the on-disk cache
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Args)]
struct CacheArgs {
    /// Cache directory (default: $ELLRIG_CACHE_DIR, then ./.ellrig-cache)
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Do not read or write the cache
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Flat key=value file; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated eccentricities
    #[arg(long)]
    e: Option<String>,
    /// Eccentricity grid as min:max:step
    #[arg(long, conflicts_with = "e")]
    e_range: Option<String>,
    /// Comma-separated gamma values in (3, 4)
    #[arg(long)]
    gamma: Option<String>,
    /// Harmonic cutoff ratio C in J = C*q
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long)]
    kappa_threshold: Option<f64>,
    #[arg(long)]
    maxq: Option<u32>,
    #[arg(long)]
    q_cap: Option<u32>,
    #[arg(long)]
    circle_accord: Option<f64>,
    #[arg(long)]
    below_half: Option<f64>,
    #[arg(long)]
    min_q: Option<u32>,
    /// Write CSV here (stdout when neither --csv nor --json is given)
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[command(flatten)]
    cache: CacheArgs,
}

#[derive(Args)]
struct OrbitArgs {
    #[arg(long)]
    e: f64,
    #[arg(long)]
    q: u32,
    #[arg(long, default_value_t = DEFAULT_MAXQ)]
    maxq: u32,
    /// Print JSON instead of a table
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct KappaArgs {
    #[arg(long)]
    e: f64,
    /// Number of harmonics
    #[arg(long)]
    j: usize,
    #[arg(long, default_value_t = DEFAULT_KAPPA_THRESHOLD)]
    kappa_threshold: f64,
    #[arg(long, default_value_t = DEFAULT_MAXQ)]
    maxq: u32,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    cache: CacheArgs,
}

#[derive(Args)]
struct PlotArgs {
    /// CSV or JSON result files
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Output SVG; plot data goes next to it with a .dat extension
    #[arg(long, short, default_value = "norms.svg")]
    out: PathBuf,
    #[arg(long, default_value = "Norm terms vs eccentricity")]
    title: String,
}

#[derive(Subcommand)]
enum CacheAction {
    /// Delete all cache files
    Clear {
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
}

fn resolve_cache_dir(flag: Option<PathBuf>, configured: Option<PathBuf>) -> PathBuf {
    flag.or(configured)
        .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
}

fn invalid(msg: String) -> Error {
    Error::Config(msg)
}

fn sweep_config(args: SweepArgs) -> Result<SweepConfig, Error> {
    let mut cfg = SweepConfig::default();
    if let Some(path) = &args.config {
        cfg.apply_file(path)?;
    }
    if let Some(e) = &args.e {
        cfg.e_values = parse_list(e).map_err(invalid)?;
    }
    if let Some(r) = &args.e_range {
        cfg.e_values = parse_range(r).map_err(invalid)?;
    }
    if let Some(g) = &args.gamma {
        cfg.gamma_values = parse_list(g).map_err(invalid)?;
    }
    cfg.cutoff = args.cutoff.unwrap_or(cfg.cutoff);
    cfg.kappa_threshold = args.kappa_threshold.unwrap_or(cfg.kappa_threshold);
    cfg.maxq = args.maxq.unwrap_or(cfg.maxq);
    cfg.q_cap = args.q_cap.unwrap_or(cfg.q_cap);
    cfg.circle_accord = args.circle_accord.unwrap_or(cfg.circle_accord);
    cfg.below_half = args.below_half.unwrap_or(cfg.below_half);
    cfg.min_q = args.min_q.unwrap_or(cfg.min_q);
    cfg.csv = args.csv.or(cfg.csv);
    cfg.json = args.json.or(cfg.json);
    cfg.cache_dir = if args.cache.no_cache {
        None
    } else {
        Some(resolve_cache_dir(args.cache.cache_dir, cfg.cache_dir))
    };
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Sweep(args) => {
            let cfg = sweep_config(args)?;
            let result = cmd_sweep(&cfg)?;
            if cfg.csv.is_none() && cfg.json.is_none() {
                print!("{}", result.to_csv());
            }
            for row in result.rows.iter().filter(|r| r.kappa_unconverged > 0) {
                eprintln!(
                    "note: e = {}, gamma = {}: {} kappa entries used without convergence",
                    row.eccentricity, row.gamma, row.kappa_unconverged
                );
            }
        }
        Command::Orbit(args) => {
            let report = cmd_orbit(args.e, args.q, args.maxq)?;
            if args.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                print!("{}", report.to_text());
            }
        }
        Command::Kappa(args) => {
            let cache = (!args.cache.no_cache)
                .then(|| Cache::new(resolve_cache_dir(args.cache.cache_dir, None)));
            let report = cmd_kappa(args.e, args.j, args.kappa_threshold, args.maxq, cache.as_ref())?;
            if args.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                print!("{}", report.to_text());
            }
        }
        Command::Plot(args) => {
            let out = cmd_plot(&args.inputs, &args.out, &args.title)?;
            for s in &out.series {
                match s.first_crossing() {
                    Some(e) => eprintln!("gamma {}: first norm >= 1 at e = {e}", s.gamma),
                    None => eprintln!("gamma {}: norm stays below 1", s.gamma),
                }
            }
            eprintln!("wrote {} and {}", out.svg.display(), out.data.display());
        }
        Command::Cache {
            action: CacheAction::Clear { cache_dir },
        } => {
            let cache = Cache::new(resolve_cache_dir(cache_dir, None));
            let n = cache.clear()?;
            eprintln!("removed {n} cache files from {}", cache.dir().display());
        }
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Domain { .. }
        | Error::Config(_)
        | Error::PeriodCap { .. }
        | Error::KappaTooShort { .. } => EXIT_VALIDATION,
        Error::NonConvergence { .. } | Error::DegenerateOrbit(_) => EXIT_NUMERICAL,
        Error::Io { .. } => EXIT_IO,
        Error::Parse { .. } => EXIT_PARSE,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
