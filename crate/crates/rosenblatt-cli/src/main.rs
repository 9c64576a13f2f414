//! `rosenblatt`: cumulant tables, cross-method verification, Monte-Carlo
//! oracle runs and the truncated characteristic function.
//!
//! Exit codes: 0 success, 1 computation or verification failure, 2 usage error.

mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rosenblatt::cumulants::{characteristic_function, kappa, kappa_from_c, C5Reading};
use rosenblatt::oracle::{mc_ck, mc_region, region, region_catalog, RegionSpec};
use rosenblatt::specfun::EvalConfig;
use rosenblatt::vt::c_k_vt;

use output::{PhiRow, Row};

#[derive(Parser)]
#[command(
    name = "rosenblatt",
    version,
    about = "Cumulants of the Rosenblatt distribution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cumulants κ_k(d) over a grid.
    Table(Common),
    /// Cross-method checks; prints one PASS/FAIL line per check.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Reading of the second c₅(3) term used by the region-sum check.
        #[arg(long, value_enum, default_value_t = ReadingArg::MixedGamma)]
        c5_region3_reading: ReadingArg,
    },
    /// Monte-Carlo estimates of c_k, or of region integrals with --regions.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Comma-separated region labels such as `c4(3),c5(3)`, or `all`.
        #[arg(long)]
        regions: Option<String>,
    },
    /// φ(θ) from the cumulant series truncated at --terms.
    Phi {
        #[command(flatten)]
        common: Common,
        /// Comma-separated θ values.
        #[arg(
            long,
            default_value = "-0.2,-0.1,0,0.1,0.2",
            allow_hyphen_values = true
        )]
        theta_grid: String,
        /// Highest cumulant order kept (2..=5).
        #[arg(long, default_value_t = 5)]
        terms: u32,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Comma-separated d values in [0, 0.5]; an empty string gives an empty grid.
    #[arg(long = "d-grid")]
    d_grid: Option<String>,
    /// Comma-separated orders in 2..=5.
    #[arg(long, default_value = "3,4,5")]
    orders: String,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Monte-Carlo samples per estimate.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative tolerance for series evaluation.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum MethodArg {
    Closed,
    Vt,
    Mc,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReadingArg {
    MixedGamma,
    SquaredGamma,
}

impl From<ReadingArg> for C5Reading {
    fn from(r: ReadingArg) -> Self {
        match r {
            ReadingArg::MixedGamma => C5Reading::MixedGamma,
            ReadingArg::SquaredGamma => C5Reading::SquaredGamma,
        }
    }
}

pub(crate) enum Failure {
    Usage(String),
    Compute(String),
}

impl From<rosenblatt::Error> for Failure {
    fn from(e: rosenblatt::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

/// Validated run configuration shared by all commands.
pub(crate) struct RunConfig {
    pub grid: Vec<f64>,
    pub orders: Vec<u32>,
    pub method: MethodArg,
    pub samples: u64,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub eval: EvalConfig,
}

impl RunConfig {
    fn resolve(c: &Common, default_grid: &[f64], default_method: MethodArg) -> CliResult<Self> {
        let grid = match &c.d_grid {
            Some(s) => parse_list(s, "--d-grid")?,
            None => default_grid.to_vec(),
        };
        if let Some(d) = grid.iter().find(|d| !(0.0..=0.5).contains(*d)) {
            return Err(Failure::Usage(format!("d = {d} is outside [0, 0.5]")));
        }
        let orders: Vec<u32> = parse_list(&c.orders, "--orders")?;
        if let Some(k) = orders.iter().find(|k| !(2..=5).contains(*k)) {
            return Err(Failure::Usage(format!("order {k} is outside 2..=5")));
        }
        let mut eval = EvalConfig::default();
        if let Some(t) = c.tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(Failure::Usage(format!("--tol {t} must lie in (0, 1)")));
            }
            eval = eval.with_rel_tol(t);
        }
        Ok(Self {
            grid,
            orders,
            method: c.method.unwrap_or(default_method),
            samples: c.samples,
            seed: c.seed,
            format: c.format,
            out: c.out.clone(),
            eval,
        })
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, flag: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Failure::Usage(format!("{flag}: cannot parse `{t}`")))
        })
        .collect()
}

fn table_grid() -> Vec<f64> {
    (0..=10).map(|i| f64::from(i) * 0.05).collect()
}

const CHECK_GRID: [f64; 3] = [0.1, 0.25, 0.4];

fn cmd_table(cfg: &RunConfig) -> CliResult<()> {
    let methods: &[MethodArg] = match cfg.method {
        MethodArg::All => &[MethodArg::Closed, MethodArg::Vt, MethodArg::Mc],
        ref m => std::slice::from_ref(m),
    };
    let mut orders = cfg.orders.clone();
    orders.sort_unstable();
    orders.dedup();
    let mut grid = cfg.grid.clone();
    grid.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    for &k in &orders {
        for &d in &grid {
            for &m in methods {
                rows.push(table_row(k, d, m, cfg)?);
            }
        }
    }
    output::write_rows(&rows, cfg)
}

fn table_row(k: u32, d: f64, m: MethodArg, cfg: &RunConfig) -> CliResult<Row> {
    match m {
        MethodArg::Closed | MethodArg::All => Ok(Row::from_report(&kappa(k, d, &cfg.eval)?)),
        // σ(½) = 0 makes every κ_k with k ≥ 3 vanish; the routes below need d < ½
        _ if d >= 0.5 => {
            let mut r = Row::from_report(&kappa(k, d, &cfg.eval)?);
            r.method = if m == MethodArg::Vt {
                "vt-operator"
            } else {
                "mc-oracle"
            }
            .into();
            Ok(r)
        }
        MethodArg::Vt => {
            let e = c_k_vt(1, k - 1, d, &cfg.eval)?;
            let scale = kappa_from_c(k, d, 1.0)?;
            Ok(Row::new(
                k,
                d,
                scale * e.value,
                "vt-operator",
                scale * e.error,
            ))
        }
        MethodArg::Mc => {
            let e = mc_ck(k, d, cfg.samples, cfg.seed)?;
            if let Some(w) = &e.warning {
                eprintln!("warning: {w}");
            }
            let scale = kappa_from_c(k, d, 1.0)?;
            let mut r = Row::new(k, d, scale * e.mean, "mc-oracle", scale * e.std_error);
            r.seed = Some(e.seed);
            r.n_samples = Some(e.n_samples);
            Ok(r)
        }
    }
}

fn parse_regions(s: &str) -> CliResult<Vec<RegionSpec>> {
    if s.trim() == "all" {
        return Ok(region_catalog());
    }
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let bad = || Failure::Usage(format!("--regions: cannot parse `{t}`"));
            let (k, i) = t
                .strip_prefix('c')
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|r| r.split_once('('))
                .ok_or_else(bad)?;
            let (k, i) = (k.parse().map_err(|_| bad())?, i.parse().map_err(|_| bad())?);
            region(k, i).map_err(|e| Failure::Usage(e.to_string()))
        })
        .collect()
}

fn cmd_oracle(cfg: &RunConfig, regions: Option<&str>) -> CliResult<()> {
    let mut rows = Vec::new();
    let mut grid = cfg.grid.clone();
    grid.sort_by(f64::total_cmp);
    if let Some(d) = grid.iter().find(|d| **d >= 0.5) {
        return Err(Failure::Usage(format!("the oracle needs d < 0.5, got {d}")));
    }
    let mut push = |order: u32, d: f64, method: String, e: rosenblatt::oracle::MCEstimate| {
        if let Some(w) = &e.warning {
            eprintln!("warning: {w}");
        }
        let mut r = Row::new(order, d, e.mean, &method, e.std_error);
        r.seed = Some(e.seed);
        r.n_samples = Some(e.n_samples);
        rows.push(r);
    };
    match regions {
        Some(s) => {
            for spec in parse_regions(s)? {
                for &d in &grid {
                    let e = mc_region(&spec, d, cfg.samples, cfg.seed)?;
                    push(spec.k, d, format!("mc-region:{}", spec.name), e);
                }
            }
        }
        None => {
            let mut orders = cfg.orders.clone();
            orders.sort_unstable();
            orders.dedup();
            for &k in &orders {
                for &d in &grid {
                    let e = mc_ck(k, d, cfg.samples, cfg.seed)?;
                    push(k, d, "mc-oracle".into(), e);
                }
            }
        }
    }
    output::write_rows(&rows, cfg)
}

fn cmd_phi(cfg: &RunConfig, thetas: &[f64], terms: u32) -> CliResult<()> {
    if !(2..=5).contains(&terms) {
        return Err(Failure::Usage(format!("--terms {terms} is outside 2..=5")));
    }
    let mut rows = Vec::new();
    for &d in &cfg.grid {
        for &theta in thetas {
            let p = characteristic_function(theta, d, terms, &cfg.eval)?;
            rows.push(PhiRow {
                d,
                theta,
                re: p.value.re,
                im: p.value.im,
                divergent: p.divergent,
            });
        }
    }
    output::write_phi(&rows, cfg)
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Table(c) => {
            let cfg = RunConfig::resolve(&c, &table_grid(), MethodArg::Closed)?;
            cmd_table(&cfg).map(|()| true)
        }
        Command::Verify {
            common,
            c5_region3_reading,
        } => {
            let cfg = RunConfig::resolve(&common, &CHECK_GRID, MethodArg::All)?;
            let checks = verify::run_checks(&cfg, c5_region3_reading.into())?;
            output::write_checks(&checks, &cfg)?;
            Ok(checks.iter().all(|c| c.pass))
        }
        Command::Oracle { common, regions } => {
            let cfg = RunConfig::resolve(&common, &CHECK_GRID, MethodArg::Mc)?;
            cmd_oracle(&cfg, regions.as_deref()).map(|()| true)
        }
        Command::Phi {
            common,
            theta_grid,
            terms,
        } => {
            let cfg = RunConfig::resolve(&common, &[0.25], MethodArg::Closed)?;
            let thetas: Vec<f64> = parse_list(&theta_grid, "--theta-grid")?;
            cmd_phi(&cfg, &thetas, terms).map(|()| true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
