//! Command-line surface: measurement reports, tilt and overlap sweeps,
//! optimization, and simulation, with CSV/JSON emission.
//!
//! Exit codes: 0 on success, 1 when `--require-positive` is set and no
//! positive secure key resulted, 2 on argument or computation errors.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::Error;
use crate::gsd::{DiscriminationMetrics, SignalPair, TiltAngle};
use crate::keyrate::{key_rate_report, FiniteKeyParams, KeyRateReport};
use crate::optimizer::{self, RateMode};
use crate::qmath::Op2;
use crate::simulator::{self, SimulationConfig};

/// Environment variable consulted for a default seed when no flag or config
/// entry provides one.
pub const SEED_ENV_VAR: &str = "PHIQKD_SEED";

const SCHEMA_VERSION: &str = "1";

#[derive(Parser, Debug)]
#[command(
    name = "phiqkd",
    version,
    about = "Tilted-measurement two-state QKD: POVM design, key rates, simulation"
)]
struct Cli {
    /// Flat key=value defaults file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Interpret angle arguments (and grid bounds) as degrees.
    #[arg(long, global = true)]
    degrees: bool,

    /// Output format; tabular commands default to csv, the rest to text.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write machine-readable output to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Exit with status 1 unless a positive secure key results.
    #[arg(long, global = true)]
    require_positive: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the tilted POVM, outcome probabilities, and quality metrics.
    Povm {
        #[command(flatten)]
        angles: AngleArgs,
    },
    /// Tabulate probabilities and key rates over a tilt-angle grid.
    Sweep {
        #[command(flatten)]
        angles: AngleArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Tilt grid as start:stop:count; defaults to the whole domain.
        #[arg(long, value_name = "SPEC")]
        grid: Option<String>,
        /// Point count over the whole tilt domain (ignored with --grid).
        #[arg(long)]
        points: Option<usize>,
    },
    /// Find the tilt angle maximizing a key-rate figure.
    Optimize {
        #[command(flatten)]
        angles: AngleArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Which rate to maximize.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Run the seeded protocol simulation, or the dilation histogram.
    Simulate {
        #[command(flatten)]
        angles: AngleArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        seed: Option<u64>,
        /// Shots for histogram mode.
        #[arg(long)]
        shots: Option<u64>,
        /// Sample the two-qubit dilation circuit instead of the protocol.
        #[arg(long)]
        histogram: bool,
        /// Full-scale histogram reproduction (10^8 shots by default).
        #[arg(long)]
        long: bool,
    },
    /// Compare optimized composable rates against the untilted baseline
    /// over a grid of overlap angles.
    CompareB92 {
        #[command(flatten)]
        budget: BudgetArgs,
        /// Overlap grid as start:stop:count (radians unless --degrees).
        #[arg(long, value_name = "SPEC")]
        grid: Option<String>,
        /// Point count over (0.01, pi/2] (ignored with --grid).
        #[arg(long)]
        points: Option<usize>,
        /// Append the refined sweep landmarks to text output.
        #[arg(long)]
        landmarks: bool,
    },
}

#[derive(Args, Debug, Clone)]
struct AngleArgs {
    /// Overlap angle between the signal states.
    #[arg(long)]
    theta: Option<f64>,
    /// Measurement tilt angle.
    #[arg(long)]
    phi: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct BudgetArgs {
    /// Total signals N.
    #[arg(long)]
    n_total: Option<u64>,
    /// Sifted bits n sacrificed for parameter estimation.
    #[arg(long)]
    n_test: Option<u64>,
    /// Parameter-estimation failure probability.
    #[arg(long)]
    eps_pe: Option<f64>,
    /// Secrecy failure probability.
    #[arg(long)]
    eps_sec: Option<f64>,
    /// Correctness failure probability.
    #[arg(long)]
    eps_cor: Option<f64>,
    /// Error-correction efficiency f.
    #[arg(long)]
    ec_eff: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ModeArg {
    Asymptotic,
    Finite,
    Composable,
}

impl From<ModeArg> for RateMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Asymptotic => RateMode::Asymptotic,
            ModeArg::Finite => RateMode::Finite,
            ModeArg::Composable => RateMode::Composable,
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses and runs a full command line, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let require_positive = cli.require_positive;
    match dispatch(cli) {
        Ok(positive) => {
            if require_positive && !positive {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Flat key=value defaults, lowest layer of the precedence chain.
struct FileConfig(HashMap<String, String>);

const KNOWN_KEYS: &[&str] = &[
    "theta", "phi", "n-total", "n-test", "eps-pe", "eps-sec", "eps-cor", "ec-eff", "seed", "shots",
    "points", "grid", "mode", "format", "degrees",
];

impl FileConfig {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        let mut map = HashMap::new();
        let Some(path) = path else {
            return Ok(Self(map));
        };
        let text = std::fs::read_to_string(path)?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected key=value",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "{}:{}: unknown key '{key}'",
                    path.display(),
                    lineno + 1
                )));
            }
            map.insert(key, value.trim().to_string());
        }
        Ok(Self(map))
    }

    fn get<V: FromStr>(&self, key: &str) -> CliResult<Option<V>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<V>().map(Some).map_err(|_| {
                CliError::Usage(format!("config key '{key}' has unparsable value '{raw}'"))
            }),
        }
    }
}

fn resolve<V: FromStr + Copy>(
    flag: Option<V>,
    cfg: &FileConfig,
    key: &str,
    default: V,
) -> CliResult<V> {
    if let Some(v) = flag {
        return Ok(v);
    }
    Ok(cfg.get::<V>(key)?.unwrap_or(default))
}

fn resolve_seed(flag: Option<u64>, cfg: &FileConfig) -> CliResult<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(s) = cfg.get::<u64>("seed")? {
        return Ok(s);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(raw) => raw
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV_VAR}='{raw}' is not a u64"))),
        Err(_) => Ok(0),
    }
}

struct Ctx {
    cfg: FileConfig,
    degrees: bool,
    format: Option<Format>,
    output: Option<PathBuf>,
}

impl Ctx {
    fn angle(&self, flag: Option<f64>, key: &str, default_radians: f64) -> CliResult<f64> {
        match flag
            .map(Ok)
            .or_else(|| self.cfg.get::<f64>(key).transpose())
        {
            Some(v) => {
                let v = v?;
                Ok(if self.degrees { v.to_radians() } else { v })
            }
            None => Ok(default_radians),
        }
    }

    fn budget(&self, args: &BudgetArgs) -> CliResult<FiniteKeyParams> {
        let d = FiniteKeyParams::default();
        let fk = FiniteKeyParams::new(
            resolve(args.n_total, &self.cfg, "n-total", d.n_total)?,
            resolve(args.n_test, &self.cfg, "n-test", d.n_test)?,
            resolve(args.eps_pe, &self.cfg, "eps-pe", d.eps_pe)?,
            resolve(args.eps_sec, &self.cfg, "eps-sec", d.eps_sec)?,
            resolve(args.eps_cor, &self.cfg, "eps-cor", d.eps_cor)?,
            resolve(args.ec_eff, &self.cfg, "ec-eff", d.ec_efficiency)?,
        )?;
        Ok(fk)
    }

    fn format_or(&self, default: Format) -> CliResult<Format> {
        if let Some(f) = self.format {
            return Ok(f);
        }
        match self.cfg.0.get("format") {
            None => Ok(default),
            Some(raw) => Format::from_str(raw, true).map_err(|_| {
                CliError::Usage(format!("config format '{raw}' is not text|csv|json"))
            }),
        }
    }

    /// Emits a finished document to the output file or stdout.
    fn emit(&self, doc: &str) -> CliResult<()> {
        match &self.output {
            Some(path) => {
                std::fs::write(path, doc)?;
                eprintln!("wrote {}", path.display());
            }
            None => print!("{doc}"),
        }
        Ok(())
    }
}

fn dispatch(cli: Cli) -> CliResult<bool> {
    let cfg = FileConfig::load(cli.config.as_deref())?;
    let degrees = cli.degrees || cfg.get::<bool>("degrees")?.unwrap_or(false);
    let ctx = Ctx {
        cfg,
        degrees,
        format: cli.format,
        output: cli.output,
    };
    match cli.command {
        Command::Povm { angles } => cmd_povm(&ctx, &angles),
        Command::Sweep {
            angles,
            budget,
            grid,
            points,
        } => cmd_sweep(&ctx, &angles, &budget, grid.as_deref(), points),
        Command::Optimize {
            angles,
            budget,
            mode,
        } => cmd_optimize(&ctx, &angles, &budget, mode),
        Command::Simulate {
            angles,
            budget,
            seed,
            shots,
            histogram,
            long,
        } => cmd_simulate(&ctx, &angles, &budget, seed, shots, histogram, long),
        Command::CompareB92 {
            budget,
            grid,
            points,
            landmarks,
        } => cmd_compare_b92(&ctx, &budget, grid.as_deref(), points, landmarks),
    }
}

/// Formats with nine significant digits, stable across runs.
fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = 8 - exp;
    if (0..=20).contains(&decimals) {
        format!("{:.*}", decimals as usize, x)
    } else {
        format!("{:.8e}", x)
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

fn parse_grid_spec(spec: &str, degrees: bool) -> CliResult<(f64, f64, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let err = || CliError::Usage(format!("grid spec '{spec}' is not start:stop:count"));
    if parts.len() != 3 {
        return Err(err());
    }
    let mut start: f64 = parts[0].parse().map_err(|_| err())?;
    let mut stop: f64 = parts[1].parse().map_err(|_| err())?;
    let count: usize = parts[2].parse().map_err(|_| err())?;
    if degrees {
        start = start.to_radians();
        stop = stop.to_radians();
    }
    if count == 0 || stop < start {
        return Err(err());
    }
    Ok((start, stop, count))
}

fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    (0..count)
        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
        .collect()
}

fn op2_json(m: &Op2) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..2)
        .map(|r| {
            (0..2)
                .map(|c| [m.entry(r, c).re, m.entry(r, c).im])
                .collect()
        })
        .collect();
    json!(rows)
}

fn op2_text(label: &str, m: &Op2, out: &mut String) {
    for r in 0..2 {
        let prefix = if r == 0 {
            label
        } else {
            &" ".repeat(label.len())
        };
        let _ = writeln!(
            out,
            "{prefix}[ {:+.6}{:+.6}i  {:+.6}{:+.6}i ]",
            m.entry(r, 0).re,
            m.entry(r, 0).im,
            m.entry(r, 1).re,
            m.entry(r, 1).im
        );
    }
}

fn cmd_povm(ctx: &Ctx, angles: &AngleArgs) -> CliResult<bool> {
    let theta = ctx.angle(angles.theta, "theta", std::f64::consts::FRAC_PI_4)?;
    let phi = ctx.angle(angles.phi, "phi", 0.0)?;
    let sp = SignalPair::new(theta)?;
    let tilt = TiltAngle::new(&sp, phi)?;
    let povm = sp.build_povm(tilt)?;
    let closed = sp.probs_closed(tilt);
    let operator = sp.probs_operator(&povm);
    let metrics = DiscriminationMetrics::from_probs(&closed).ok();
    let residual = (povm.pi1 + povm.pi2 + povm.pi0).max_abs_diff(&Op2::identity());

    match ctx.format_or(Format::Text)? {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "povm",
                "theta": theta,
                "phi": phi,
                "pi1": op2_json(&povm.pi1),
                "pi2": op2_json(&povm.pi2),
                "pi0": op2_json(&povm.pi0),
                "probs_closed": closed,
                "probs_operator": operator,
                "metrics": metrics,
                "completeness_residual": residual,
            });
            ctx.emit(&format!(
                "{}\n",
                serde_json::to_string(&doc).expect("serializable")
            ))?;
        }
        _ => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "theta: {} rad   phi: {} rad",
                fmt_sig(theta),
                fmt_sig(phi)
            );
            op2_text("pi1 = ", &povm.pi1, &mut out);
            op2_text("pi2 = ", &povm.pi2, &mut out);
            op2_text("pi0 = ", &povm.pi0, &mut out);
            let _ = writeln!(
                out,
                "closed form:   P_s={} P_e={} P_q={}",
                fmt_sig(closed.p_s),
                fmt_sig(closed.p_e),
                fmt_sig(closed.p_q)
            );
            let _ = writeln!(
                out,
                "operator form: P_s={} P_e={} P_q={}",
                fmt_sig(operator.p_s),
                fmt_sig(operator.p_e),
                fmt_sig(operator.p_q)
            );
            match metrics {
                Some(m) => {
                    let _ = writeln!(
                        out,
                        "accuracy chi = {}%   efficiency zeta = {}%",
                        fmt_sig(m.chi),
                        fmt_sig(m.zeta)
                    );
                }
                None => {
                    let _ = writeln!(out, "accuracy undefined: no conclusive outcomes");
                }
            }
            let _ = writeln!(out, "completeness residual: {:.3e}", residual);
            ctx.emit(&out)?;
        }
    }
    Ok(true)
}

fn sweep_csv(rows: &[KeyRateReport]) -> String {
    let mut out = String::from(
        "phi,p_s,p_e,p_q,eta,qber,delta,q_worst,r_asymptotic,r_finite,key_length,r_secure,positive\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_sig(r.phi),
            fmt_sig(r.probs.p_s),
            fmt_sig(r.probs.p_e),
            fmt_sig(r.probs.p_q),
            fmt_sig(r.eta),
            fmt_sig(r.qber),
            fmt_sig(r.delta),
            fmt_sig(r.q_worst),
            fmt_sig(r.r_asymptotic),
            fmt_sig(r.r_finite),
            fmt_sig(r.key_length),
            fmt_sig(r.r_secure),
            r.positive.secure
        );
    }
    out
}

fn cmd_sweep(
    ctx: &Ctx,
    angles: &AngleArgs,
    budget: &BudgetArgs,
    grid: Option<&str>,
    points: Option<usize>,
) -> CliResult<bool> {
    let theta = ctx.angle(angles.theta, "theta", std::f64::consts::FRAC_PI_4)?;
    let sp = SignalPair::new(theta)?;
    let fk = ctx.budget(budget)?;
    let grid_spec = match grid
        .map(Some)
        .unwrap_or_else(|| ctx.cfg.0.get("grid").map(|s| s.as_str()))
    {
        Some(spec) => Some(parse_grid_spec(spec, ctx.degrees)?),
        None => None,
    };
    let phis = match grid_spec {
        Some((start, stop, count)) => linspace(start, stop, count),
        None => {
            let count = resolve(points, &ctx.cfg, "points", 512usize)?;
            if count == 0 {
                return Err(CliError::Usage("--points must be positive".into()));
            }
            linspace(0.0, sp.phi_med(), count.max(1))
        }
    };
    let rows: Vec<KeyRateReport> = phis
        .iter()
        .map(|&phi| Ok(key_rate_report(&sp, TiltAngle::new(&sp, phi)?, &fk)))
        .collect::<CliResult<_>>()?;
    let positive = rows.iter().any(|r| r.positive.secure);

    match ctx.format_or(Format::Csv)? {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "sweep",
                "theta": theta,
                "fk": fk,
                "rows": rows,
            });
            ctx.emit(&format!(
                "{}\n",
                serde_json::to_string(&doc).expect("serializable")
            ))?;
        }
        _ => ctx.emit(&sweep_csv(&rows))?,
    }
    Ok(positive)
}

fn cmd_optimize(
    ctx: &Ctx,
    angles: &AngleArgs,
    budget: &BudgetArgs,
    mode: Option<ModeArg>,
) -> CliResult<bool> {
    let theta = ctx.angle(angles.theta, "theta", std::f64::consts::FRAC_PI_4)?;
    let sp = SignalPair::new(theta)?;
    let fk = ctx.budget(budget)?;
    let mode: RateMode = match mode {
        Some(m) => m.into(),
        None => match ctx.cfg.0.get("mode").map(|s| s.as_str()) {
            None => RateMode::Composable,
            Some("asymptotic") => RateMode::Asymptotic,
            Some("finite") => RateMode::Finite,
            Some("composable") => RateMode::Composable,
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "config mode '{other}' is not asymptotic|finite|composable"
                )))
            }
        },
    };
    let result = optimizer::optimize_phi(&sp, mode, &fk);
    let positive = result.rate > 0.0;

    match ctx.format_or(Format::Text)? {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "optimize",
                "result": result,
            });
            ctx.emit(&format!(
                "{}\n",
                serde_json::to_string(&doc).expect("serializable")
            ))?;
        }
        _ => {
            let mut out = String::new();
            let _ = writeln!(out, "mode:       {}", result.mode);
            let _ = writeln!(out, "theta:      {} rad", fmt_sig(result.theta));
            let _ = writeln!(out, "phi_opt:    {} rad", fmt_sig(result.phi_opt));
            let _ = writeln!(out, "rate:       {} bits/signal", fmt_sig(result.rate));
            let _ = writeln!(out, "eta:        {}", fmt_sig(result.report.eta));
            let _ = writeln!(out, "qber:       {}", fmt_sig(result.report.qber));
            let _ = writeln!(
                out,
                "key_length: {} bits",
                fmt_sig(result.report.key_length)
            );
            let _ = writeln!(out, "positive:   {positive}");
            ctx.emit(&out)?;
        }
    }
    Ok(positive)
}

fn cmd_simulate(
    ctx: &Ctx,
    angles: &AngleArgs,
    budget: &BudgetArgs,
    seed: Option<u64>,
    shots: Option<u64>,
    histogram: bool,
    long: bool,
) -> CliResult<bool> {
    let theta = ctx.angle(angles.theta, "theta", std::f64::consts::FRAC_PI_4)?;
    let sp = SignalPair::new(theta)?;
    let fk = ctx.budget(budget)?;
    let seed = resolve_seed(seed, &ctx.cfg)?;
    let default_shots: u64 = if long { 100_000_000 } else { 1_000_000 };
    let shots = resolve(shots, &ctx.cfg, "shots", default_shots)?;
    // With no explicit tilt, run at the composable optimum for this pair.
    let phi = match angles.phi {
        Some(_) => ctx.angle(angles.phi, "phi", 0.0)?,
        None => match ctx.cfg.get::<f64>("phi")? {
            Some(v) => {
                if ctx.degrees {
                    v.to_radians()
                } else {
                    v
                }
            }
            None => optimizer::optimize_phi(&sp, RateMode::Composable, &fk).phi_opt,
        },
    };
    let cfg = SimulationConfig {
        theta,
        phi,
        fk,
        seed,
        shots,
    };

    if histogram {
        let h = simulator::dilation_histogram(&cfg)?;
        match ctx.format_or(Format::Text)? {
            Format::Json => {
                let doc = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "simulate-histogram",
                    "config": cfg,
                    "histogram": h,
                });
                ctx.emit(&format!(
                    "{}\n",
                    serde_json::to_string(&doc).expect("serializable")
                ))?;
            }
            _ => {
                let mut out = String::new();
                let _ = writeln!(
                    out,
                    "shots: {}   theta: {} rad   phi: {} rad   seed: {seed}",
                    h.shots,
                    fmt_sig(theta),
                    fmt_sig(phi)
                );
                let labels = [h.map.correct, h.map.incorrect, h.map.inconclusive];
                let names = ["correct", "incorrect", "inconclusive"];
                for i in 0..3 {
                    let _ = writeln!(
                        out,
                        "{} ({:>12}): {:>12}  ({})",
                        labels[i],
                        names[i],
                        h.counts[i],
                        fmt_sig(h.counts[i] as f64 / h.shots as f64)
                    );
                }
                ctx.emit(&out)?;
            }
        }
        return Ok(true);
    }

    let expected_sifted = {
        let tilt = TiltAngle::new(&sp, phi)?;
        sp.probs_closed(tilt).eta() * fk.n_total as f64
    };
    if (fk.n_test as f64) > expected_sifted {
        eprintln!(
            "warning: n_test = {} exceeds the expected sifted count {:.0}",
            fk.n_test, expected_sifted
        );
    }

    match simulator::run_protocol(&cfg) {
        Ok(s) => {
            let positive = s.key_length_hat > 0;
            match ctx.format_or(Format::Text)? {
                Format::Json => {
                    let doc = json!({
                        "schema_version": SCHEMA_VERSION,
                        "command": "simulate",
                        "config": cfg,
                        "summary": s,
                    });
                    ctx.emit(&format!(
                        "{}\n",
                        serde_json::to_string(&doc).expect("serializable")
                    ))?;
                }
                _ => {
                    let mut out = String::new();
                    let _ = writeln!(
                        out,
                        "theta: {} rad   phi: {} rad   seed: {seed}",
                        fmt_sig(theta),
                        fmt_sig(phi)
                    );
                    let _ = writeln!(
                        out,
                        "counts: correct={} incorrect={} inconclusive={}",
                        s.counts.correct, s.counts.incorrect, s.counts.inconclusive
                    );
                    let _ = writeln!(out, "n_sifted:     {}", s.n_sifted);
                    let _ = writeln!(out, "q_hat:        {}", fmt_sig(s.q_hat));
                    let _ = writeln!(out, "delta:        {}", fmt_sig(s.delta));
                    let _ = writeln!(out, "q_worst_hat:  {}", fmt_sig(s.q_worst_hat));
                    let _ = writeln!(out, "key_length:   {} bits", s.key_length_hat);
                    let _ = writeln!(out, "r_secure_hat: {}", fmt_sig(s.r_secure_hat));
                    ctx.emit(&out)?;
                }
            }
            Ok(positive)
        }
        Err(Error::InsufficientSiftedBits { sifted, needed }) => {
            // An explicit no-key outcome rather than an argument error.
            println!("no key: only {sifted} sifted bits, {needed} needed for estimation");
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

fn compare_csv(rows: &[optimizer::ThetaSweepRow]) -> String {
    let mut out =
        String::from("theta,phi_opt,r_phiqkd,r_b92,difference,improvement,phi_bound,coverage\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_sig(r.theta),
            fmt_sig(r.phi_opt),
            fmt_sig(r.r_phiqkd),
            fmt_sig(r.r_b92),
            fmt_sig(r.difference),
            fmt_opt(r.improvement),
            fmt_opt(r.phi_bound),
            fmt_sig(r.coverage)
        );
    }
    out
}

fn cmd_compare_b92(
    ctx: &Ctx,
    budget: &BudgetArgs,
    grid: Option<&str>,
    points: Option<usize>,
    landmarks: bool,
) -> CliResult<bool> {
    let fk = ctx.budget(budget)?;
    let grid_spec = match grid
        .map(Some)
        .unwrap_or_else(|| ctx.cfg.0.get("grid").map(|s| s.as_str()))
    {
        Some(spec) => Some(parse_grid_spec(spec, ctx.degrees)?),
        None => None,
    };
    let thetas = match grid_spec {
        Some((start, stop, count)) => linspace(start, stop, count),
        None => {
            let count = resolve(points, &ctx.cfg, "points", 600usize)?;
            if count == 0 {
                return Err(CliError::Usage("--points must be positive".into()));
            }
            optimizer::default_theta_grid(count)
        }
    };
    let rows = optimizer::theta_sweep(&thetas, &fk)?;
    let positive = rows.iter().any(|r| r.r_phiqkd > 0.0);
    let marks = if landmarks || matches!(ctx.format_or(Format::Csv)?, Format::Json) {
        Some(optimizer::sweep_landmarks(&rows, &fk)?)
    } else {
        None
    };

    match ctx.format_or(Format::Csv)? {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "compare-b92",
                "fk": fk,
                "rows": rows,
                "landmarks": marks,
            });
            ctx.emit(&format!(
                "{}\n",
                serde_json::to_string(&doc).expect("serializable")
            ))?;
        }
        _ => {
            let mut out = compare_csv(&rows);
            if let Some(m) = marks {
                let _ = writeln!(
                    out,
                    "# max_difference: {} at theta {}",
                    fmt_sig(m.max_difference.1),
                    fmt_sig(m.max_difference.0)
                );
                if let Some((t, v)) = m.improvement_peak {
                    let _ = writeln!(
                        out,
                        "# improvement_peak: {}% at theta {}",
                        fmt_sig(v),
                        fmt_sig(t)
                    );
                }
                let _ = writeln!(
                    out,
                    "# max_phi_opt: {} at theta {}",
                    fmt_sig(m.max_phi_opt.1),
                    fmt_sig(m.max_phi_opt.0)
                );
                if let Some(t) = m.coverage_saturation {
                    let _ = writeln!(out, "# coverage_saturation_theta: {}", fmt_sig(t));
                }
            }
            ctx.emit(&out)?;
        }
    }
    Ok(positive)
}
