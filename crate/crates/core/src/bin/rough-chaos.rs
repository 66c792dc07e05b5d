//! Command-line front end for the experiments in `rough_chaos::experiments`.
//!
//! Every run writes `<out>/<experiment>.json` (or `.csv`) and a manifest
//! `<out>/<experiment>.manifest.json`. Exit status: 0 when every checked row
//! passes, 1 when a row fails or a computation errors, 2 for invalid
//! configuration.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rough_chaos::experiments::{
    constants, fclt, lift, moment, pvar, rde_demo, simulate, third_order, young_check, Report,
};
use rough_chaos::fbm_sim::SimMethod;
use rough_chaos::young::{ControlledMode, VpMode};
use rough_chaos::Error;

/// Environment variable naming the default output directory.
const OUT_ENV: &str = "ROUGH_CHAOS_OUT";

#[derive(Parser, Debug)]
#[command(
    name = "rough-chaos",
    version,
    about = "Fractional Brownian rough paths and chaos sum experiments"
)]
#[command(args_override_self = true)]
struct Cli {
    /// Output directory [default: $ROUGH_CHAOS_OUT or ./results].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Result format; the other form can always be rebuilt from JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the experiment's default seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// File of `key=value` lines, applied as `--key=value` before the
    /// command-line flags (which take precedence).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Limit constants and their identity.
    Constants(ConstantsArgs),
    /// Simulate one path and write it as CSV.
    Simulate(SimulateArgs),
    /// Lévy-area statistics and algebraic checks of the lift.
    Lift(LiftArgs),
    /// Moments of weighted Lévy-area sums across levels.
    VerifyMoment(MomentArgs),
    /// Limit theorem, covariance table and correlation-sum bound.
    VerifyFclt(FcltArgs),
    /// Scaling of the third-order sums.
    VerifyThirdOrder(ThirdArgs),
    /// Variation functionals of a grid function read from JSON.
    Pvar(PvarArgs),
    /// Seeded suites for the multidimensional Young estimates.
    YoungCheck(YoungArgs),
    /// Self-convergence of a rough differential equation solver.
    RdeDemo(RdeArgs),
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    #[arg(long = "h", alias = "H", value_delimiter = ',', default_values_t = constants::Params::default().hs)]
    hs: Vec<f64>,
    #[arg(long, default_value_t = constants::Params::default().tol)]
    tol: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    Cholesky,
    Circulant,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, alias = "H", default_value_t = 0.4)]
    h: f64,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 10)]
    m: u32,
    #[arg(long, default_value_t = 1)]
    refine: usize,
    #[arg(long, default_value_t = 0)]
    replica: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
}

#[derive(Args, Debug)]
struct LiftArgs {
    #[arg(long, alias = "H", default_value_t = 0.4)]
    h: f64,
    #[arg(long, default_value_t = 10_000)]
    replicas: u64,
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 5.0)]
    k_se: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WeightArg {
    One,
    TanhB1,
}

#[derive(Args, Debug)]
struct MomentArgs {
    #[arg(long, alias = "H", default_value_t = 0.4)]
    h: f64,
    #[arg(long, default_value_t = 4)]
    m_min: u32,
    #[arg(long, default_value_t = 9)]
    m_max: u32,
    #[arg(long, default_value_t = 16)]
    refine: usize,
    #[arg(long, default_value_t = 3000)]
    replicas: u64,
    #[arg(long, alias = "p", value_delimiter = ',', default_values_t = vec![2u32, 4])]
    ps: Vec<u32>,
    /// Level range `a..b` (inclusive); overrides `--m-min` and `--m-max`.
    #[arg(long = "m", value_parser = parse_range)]
    m_range: Option<LevelRange>,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["one", "tanh-b1"])]
    weights: Vec<WeightArg>,
    #[arg(long, default_value_t = 3.0)]
    ratio_cap: f64,
    #[arg(long, default_value_t = 4.0)]
    k_se: f64,
    #[arg(long)]
    holder_theta: Option<f64>,
    #[arg(long, default_value_t = 7)]
    holder_m_max: u32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PartArg {
    Marginal,
    Covariance,
    RhoBound,
}

#[derive(Args, Debug)]
struct FcltArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["marginal", "covariance", "rho-bound"])]
    parts: Vec<PartArg>,
    #[arg(long, alias = "H", default_value_t = 0.4)]
    h: f64,
    #[arg(long, default_value_t = 10)]
    m: u32,
    #[arg(long, default_value_t = 64)]
    refine: usize,
    #[arg(long, default_value_t = 2000)]
    replicas: u64,
    #[arg(long, default_value_t = 1 << 16)]
    max_points: usize,
    #[arg(long, default_value_t = 4.0)]
    k_se: f64,
    #[arg(long, default_value_t = 0.01)]
    ks_alpha: f64,
    #[arg(long, default_value_t = 0.02)]
    c2_rel_tol: f64,
    #[arg(long, default_value_t = 20)]
    cov_cases: usize,
    #[arg(long, default_value_t = 6)]
    cov_m_max: u32,
    #[arg(long, default_value_t = 8)]
    cov_n: usize,
    #[arg(long, default_value_t = 1e-8)]
    cov_rel_tol: f64,
    #[arg(long, default_value_t = 4)]
    rho_p_max: usize,
    #[arg(long, default_value_t = 3)]
    rho_q_max: u32,
    #[arg(long, default_value_t = 6)]
    rho_m_max: u32,
}

#[derive(Args, Debug)]
struct ThirdArgs {
    #[arg(long, alias = "H", default_value_t = 0.4)]
    h: f64,
    #[arg(long, default_value_t = 4)]
    m_min: u32,
    #[arg(long, default_value_t = 9)]
    m_max: u32,
    #[arg(long, default_value_t = 8)]
    fit_m_max: u32,
    #[arg(long, default_value_t = 32)]
    n_quad: usize,
    #[arg(long, default_value_t = 0.1)]
    slope_rel_tol: f64,
    #[arg(long, default_value_t = 1e-3)]
    c_allowance: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VpModeArg {
    Exact,
    Auto,
    LowerBound,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ControlledArg {
    ExactSmall,
    LowerBound,
}

#[derive(Args, Debug)]
struct PvarArgs {
    /// JSON object `{"axes": [[...], ...], "values": [...]}`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, value_enum, default_value_t = VpModeArg::Auto)]
    mode: VpModeArg,
    #[arg(long, value_enum, default_value_t = ControlledArg::ExactSmall)]
    controlled: ControlledArg,
}

#[derive(Args, Debug)]
struct YoungArgs {
    #[arg(long, default_value_t = 100)]
    cases: usize,
    #[arg(long, default_value_t = 1.7)]
    sandwich_p: f64,
    #[arg(long, default_value_t = 4)]
    towghi_points: usize,
    #[arg(long, default_value_t = 1.5)]
    towghi_p: f64,
    #[arg(long, default_value_t = 1.5)]
    towghi_q: f64,
    /// JSON file holding a recorded Towghi corpus value.
    #[arg(long)]
    golden: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-12)]
    golden_rel_tol: f64,
    #[arg(long, default_value_t = 129)]
    iterated_grid: usize,
}

#[derive(Args, Debug)]
struct RdeArgs {
    #[arg(long, alias = "H", default_value_t = 0.4)]
    h: f64,
    #[arg(long, default_value_t = 10)]
    m_min: u32,
    #[arg(long, default_value_t = 4)]
    halvings: u32,
    #[arg(long, default_value_t = 20)]
    replicas: u64,
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    #[arg(long, default_value_t = 1)]
    inner: usize,
    #[arg(long, default_value_t = 1.0)]
    min_order: f64,
    #[arg(long, default_value_t = 10.0)]
    inverse_factor: f64,
    #[arg(long)]
    no_davie: bool,
}

#[derive(Clone, Copy, Debug)]
struct LevelRange(u32, u32);

fn parse_range(s: &str) -> Result<LevelRange, String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected a..b, got {s}"))?;
    let a = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    Ok(LevelRange(a, b))
}

/// Failure classes mapped to exit codes.
enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Domain(_) | Error::Capacity { .. } => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

/// Reads `key=value` lines; blank lines and `#` comments are skipped.
fn config_args(path: &Path) -> Result<Vec<String>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("{}:{}: expected key=value", path.display(), n + 1)))?;
        let key = k.trim().replace('_', "-");
        if key == "config" {
            return Err(Failure::Config("config files cannot include other config files".into()));
        }
        match v.trim() {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            v => out.push(format!("--{key}={v}")),
        }
    }
    Ok(out)
}

fn config_path(argv: &[String]) -> Option<PathBuf> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
    }
    None
}

/// Splices config-file flags right after the subcommand so that explicit
/// flags, which follow, override them.
fn expand_argv(argv: Vec<String>) -> Result<Vec<String>, Failure> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let extra = config_args(&path)?;
    let names = [
        "constants",
        "simulate",
        "lift",
        "verify-moment",
        "verify-fclt",
        "verify-third-order",
        "pvar",
        "young-check",
        "rde-demo",
    ];
    let pos = argv
        .iter()
        .position(|a| names.contains(&a.as_str()))
        .ok_or_else(|| Failure::Config("no subcommand given".into()))?;
    let mut out = argv[..=pos].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[pos + 1..]);
    Ok(out)
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn write_outputs(cli: &Cli, rep: &Report, seed: Option<u64>, argv: &[String]) -> Result<PathBuf, Failure> {
    let dir = out_dir(cli);
    fs::create_dir_all(&dir).map_err(Error::from)?;
    let stem = &rep.experiment;
    let result = match cli.format {
        Format::Json => {
            let p = dir.join(format!("{stem}.json"));
            fs::write(&p, rep.to_json()?).map_err(Error::from)?;
            p
        }
        Format::Csv => {
            let p = dir.join(format!("{stem}.csv"));
            fs::write(&p, rep.to_csv()).map_err(Error::from)?;
            p
        }
    };
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let manifest = json!({
        "config": {
            "experiment": stem,
            "params": rep.params,
            "argv": argv,
            "format": format!("{:?}", cli.format).to_lowercase(),
            "threads": rayon::current_num_threads(),
        },
        "versions": {
            "rough-chaos": env!("CARGO_PKG_VERSION"),
            "report_schema": 1,
        },
        "seed": seed,
        "unix_time": timestamp,
    });
    let mp = dir.join(format!("{stem}.manifest.json"));
    fs::write(&mp, serde_json::to_string_pretty(&manifest).map_err(Error::from)?).map_err(Error::from)?;
    Ok(result)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

/// Runs the selected experiment; returns the report and its effective seed.
fn dispatch(cli: &Cli) -> Result<(Report, Option<u64>), Failure> {
    let seed_or = |d: u64| cli.seed.unwrap_or(d);
    Ok(match &cli.cmd {
        Cmd::Constants(a) => {
            let p = constants::Params {
                hs: a.hs.clone(),
                tol: a.tol,
            };
            (constants::run(&p)?, None)
        }
        Cmd::Simulate(a) => {
            let p = simulate::Params {
                h: a.h,
                d: a.d,
                m: a.m,
                refine: a.refine,
                seed: seed_or(simulate::Params::default().seed),
                replica: a.replica,
                method: match a.method {
                    MethodArg::Auto => SimMethod::Auto,
                    MethodArg::Cholesky => SimMethod::Cholesky,
                    MethodArg::Circulant => SimMethod::Circulant,
                },
            };
            let (rep, path) = simulate::run(&p)?;
            let dir = out_dir(cli);
            fs::create_dir_all(&dir).map_err(Error::from)?;
            let file = fs::File::create(dir.join("simulate.path.csv")).map_err(Error::from)?;
            path.write_csv(std::io::BufWriter::new(file))?;
            (rep, Some(p.seed))
        }
        Cmd::Lift(a) => {
            let p = lift::Params {
                h: a.h,
                replicas: a.replicas,
                n: a.n,
                seed: seed_or(lift::Params::default().seed),
                k_se: a.k_se,
            };
            (lift::run(&p)?, Some(p.seed))
        }
        Cmd::VerifyMoment(a) => {
            let (m_min, m_max) = a.m_range.map_or((a.m_min, a.m_max), |r| (r.0, r.1));
            let p = moment::Params {
                h: a.h,
                m_min,
                m_max,
                refine: a.refine,
                replicas: a.replicas,
                seed: seed_or(moment::Params::default().seed),
                ps: a.ps.clone(),
                weights: a
                    .weights
                    .iter()
                    .map(|w| match w {
                        WeightArg::One => moment::Weight::One,
                        WeightArg::TanhB1 => moment::Weight::TanhB1,
                    })
                    .collect(),
                ratio_cap: a.ratio_cap,
                k_se: a.k_se,
                holder_theta: a.holder_theta,
                holder_m_max: a.holder_m_max,
            };
            (moment::run(&p)?, Some(p.seed))
        }
        Cmd::VerifyFclt(a) => {
            let p = fclt::Params {
                parts: a
                    .parts
                    .iter()
                    .map(|x| match x {
                        PartArg::Marginal => fclt::Part::Marginal,
                        PartArg::Covariance => fclt::Part::Covariance,
                        PartArg::RhoBound => fclt::Part::RhoBound,
                    })
                    .collect(),
                h: a.h,
                m: a.m,
                refine: a.refine,
                replicas: a.replicas,
                seed: seed_or(fclt::Params::default().seed),
                max_points: a.max_points,
                k_se: a.k_se,
                ks_alpha: a.ks_alpha,
                c2_rel_tol: a.c2_rel_tol,
                cov_cases: a.cov_cases,
                cov_m_max: a.cov_m_max,
                cov_n: a.cov_n,
                cov_rel_tol: a.cov_rel_tol,
                rho_p_max: a.rho_p_max,
                rho_q_max: a.rho_q_max,
                rho_m_max: a.rho_m_max,
            };
            (fclt::run(&p)?, Some(p.seed))
        }
        Cmd::VerifyThirdOrder(a) => {
            let p = third_order::Params {
                h: a.h,
                m_min: a.m_min,
                m_max: a.m_max,
                fit_m_max: a.fit_m_max,
                n_quad: a.n_quad,
                slope_rel_tol: a.slope_rel_tol,
                c_allowance: a.c_allowance,
            };
            (third_order::run(&p)?, None)
        }
        Cmd::Pvar(a) => {
            let input: pvar::GridInput = read_json(&a.input)?;
            let f = input.build()?;
            let p = pvar::Params {
                p: a.p,
                mode: match a.mode {
                    VpModeArg::Exact => VpMode::Exact,
                    VpModeArg::Auto => VpMode::Auto,
                    VpModeArg::LowerBound => VpMode::LowerBound,
                },
                controlled: match a.controlled {
                    ControlledArg::ExactSmall => ControlledMode::ExactSmall,
                    ControlledArg::LowerBound => ControlledMode::LowerBound,
                },
            };
            (pvar::run(&f, &p)?, None)
        }
        Cmd::YoungCheck(a) => {
            let golden = a
                .golden
                .as_deref()
                .map(read_json::<young_check::TowghiGolden>)
                .transpose()?;
            let p = young_check::Params {
                seed: seed_or(young_check::Params::default().seed),
                cases: a.cases,
                sandwich_p: a.sandwich_p,
                towghi_points: a.towghi_points,
                towghi_p: a.towghi_p,
                towghi_q: a.towghi_q,
                golden,
                golden_rel_tol: a.golden_rel_tol,
                iterated_grid: a.iterated_grid,
            };
            (young_check::run(&p)?, Some(p.seed))
        }
        Cmd::RdeDemo(a) => {
            let p = rde_demo::Params {
                h: a.h,
                m_min: a.m_min,
                halvings: a.halvings,
                replicas: a.replicas,
                seed: seed_or(rde_demo::Params::default().seed),
                xi: a.xi,
                inner: a.inner,
                min_order: a.min_order,
                inverse_factor: a.inverse_factor,
                with_davie: !a.no_davie,
            };
            (rde_demo::run(&p)?, Some(p.seed))
        }
    })
}

fn run(argv: Vec<String>) -> Result<bool, Failure> {
    let argv = expand_argv(argv)?;
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            e.exit()
        }
        Err(e) => return Err(Failure::Config(e.to_string())),
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let (rep, seed) = dispatch(&cli)?;
    let path = write_outputs(&cli, &rep, seed, &argv)?;
    print!("{}", rep.summary());
    let pass = rep.pass();
    println!(
        "{}: {} -> {}",
        rep.experiment,
        if pass { "PASS" } else { "FAIL" },
        path.display()
    );
    Ok(pass)
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
