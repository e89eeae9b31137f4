//! Command-line front end for the particle-intensity channel toolkit.
//!
//! Subcommands build the analytic channel, solve capacities, sweep the
//! arrival probability, and validate against Monte Carlo — emitting
//! machine-readable CSV or JSON. Outputs are deterministic: the same flags,
//! config file, and seed produce byte-identical files.
//!
//! Exit codes: 0 success; 1 numeric, convergence, or validation failure;
//! 2 usage error.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pic_core::io::{
    channels_bit_identical, read_channel_csv_file, write_binary_csv, write_channel_csv,
    write_json, write_pmf_csv, write_sweep_csv, write_validate_csv, BinaryReport, GridMeta,
    ParamsMeta, PmfReport, PointRecord, SweepReport, ValidateReport,
};
use pic_core::{
    binary_capacity, empirical_channel, end_to_end_closed_form, make_context, sweep, BaOptions,
    CapacityPoint, ChannelParams, RhoGrid, SamplingPath, ScaledLevy, SimConfig, SolveMode,
    SolveOptions, BINARY_OPTIMALITY_PRODUCT,
};

const DEFAULT_ALPHA: f64 = 1.0;
const DEFAULT_BETA: f64 = 1.0;
const DEFAULT_LAMBDA: f64 = 1000.0;
const DEFAULT_ETA: f64 = 0.2;
const DEFAULT_C: f64 = 1.0;
const DEFAULT_GRID_N: usize = 200;
const DEFAULT_TOL_BITS: f64 = 1e-10;
const DEFAULT_MAX_ITER: u64 = 100_000;
const DEFAULT_TRIALS: u64 = 100_000;
const DEFAULT_SEED: u64 = 1;
const DEFAULT_TV_BOUND: f64 = 0.01;

#[derive(Parser)]
#[command(
    name = "pic",
    version,
    about = "Capacity toolkit for the particle-intensity channel with imperfect release and detection"
)]
struct Cli {
    /// Worker threads (default: all cores); results do not depend on this
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Flat key=value config file; explicit flags override file entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format (default: json; `channel` is always csv)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Export the end-to-end channel matrix as CSV with metadata headers
    Channel(ChannelCmd),
    /// Solve capacity at one arrival probability
    Capacity(CapacityCmd),
    /// Closed-form capacity of the two-point (0 and m) input restriction
    Binary(BinaryCmd),
    /// Sweep arrival probabilities and report the rate curves
    Sweep(SweepCmd),
    /// Optimal input pmf at the sweep argmax
    Pmf(PmfCmd),
    /// Monte Carlo validation: empirical rows vs the analytic law
    Validate(ValidateCmd),
}

#[derive(Args, Clone)]
struct ChanArgs {
    /// Release success probability, in (0, 1] (default 1)
    #[arg(long)]
    alpha: Option<f64>,
    /// Detection probability, in (0, 1] (default 1)
    #[arg(long)]
    beta: Option<f64>,
    /// Particle generation rate, particles/second (default 1000)
    #[arg(long)]
    lambda: Option<f64>,
    /// Capture probability of the arrival law, in (0, 1] (default 0.2)
    #[arg(long)]
    eta: Option<f64>,
    /// Arrival-law time scale, seconds (default 1)
    #[arg(long)]
    c: Option<f64>,
    /// Transmitter-receiver distance (geometry form; needs --d and --r)
    #[arg(long)]
    l: Option<f64>,
    /// Diffusion coefficient (geometry form)
    #[arg(long)]
    d: Option<f64>,
    /// Capture radius (geometry form)
    #[arg(long)]
    r: Option<f64>,
}

#[derive(Args, Clone)]
struct SolveArgs {
    /// Solver: closed-form binary restriction, full Blahut-Arimoto, or both
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Convergence tolerance on the capacity bracket, bits (default 1e-10)
    #[arg(long)]
    tol_bits: Option<f64>,
    /// Iteration budget for the solver (default 100000)
    #[arg(long)]
    max_iter: Option<u64>,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Number of log-spaced grid points (default 200)
    #[arg(long)]
    grid_n: Option<usize>,
    /// Lowest arrival probability (default 1e-4 * eta)
    #[arg(long)]
    grid_lo: Option<f64>,
    /// Highest arrival probability (default (1 - 1e-4) * eta)
    #[arg(long)]
    grid_hi: Option<f64>,
    /// Explicit comma-separated arrival probabilities (overrides the above)
    #[arg(long)]
    rhos: Option<String>,
    /// Skip golden-section refinement of the argmax
    #[arg(long)]
    no_refine: bool,
}

#[derive(Args, Clone)]
struct ChannelCmd {
    #[command(flatten)]
    chan: ChanArgs,
    /// Arrival probability within the symbol interval, in (0, eta)
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Args, Clone)]
struct CapacityCmd {
    #[command(flatten)]
    chan: ChanArgs,
    #[command(flatten)]
    solve: SolveArgs,
    /// Arrival probability within the symbol interval, in (0, eta)
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Args, Clone)]
struct BinaryCmd {
    #[command(flatten)]
    chan: ChanArgs,
    /// Arrival probability within the symbol interval, in (0, eta)
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Args, Clone)]
struct SweepCmd {
    #[command(flatten)]
    chan: ChanArgs,
    #[command(flatten)]
    solve: SolveArgs,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Clone)]
struct PmfCmd {
    #[command(flatten)]
    chan: ChanArgs,
    #[command(flatten)]
    solve: SolveArgs,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Clone)]
struct ValidateCmd {
    #[command(flatten)]
    chan: ChanArgs,
    /// Arrival probability within the symbol interval, in (0, eta)
    #[arg(long)]
    rho: Option<f64>,
    /// Monte Carlo trials per input symbol (default 100000)
    #[arg(long)]
    trials: Option<u64>,
    /// RNG seed (default 1)
    #[arg(long)]
    seed: Option<u64>,
    /// Arrival sampler (default thinning)
    #[arg(long, value_enum)]
    path: Option<PathArg>,
    /// Per-row total-variation bound that must hold (default 0.01)
    #[arg(long)]
    tv_bound: Option<f64>,
    /// Reload this channel CSV and require bit-exact equality with the
    /// freshly built matrix
    #[arg(long)]
    check: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Binary,
    Ba,
    Both,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PathArg {
    Thinning,
    ArrivalTimes,
}

enum CliErr {
    Usage(String),
    Run(String),
}

impl From<pic_core::Error> for CliErr {
    fn from(e: pic_core::Error) -> Self {
        CliErr::Run(e.to_string())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliErr> {
    Err(CliErr::Usage(msg.into()))
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(CliErr::Usage(m)) => {
            eprintln!("error: {m}");
            std::process::exit(2);
        }
        Err(CliErr::Run(m)) => {
            eprintln!("error: {m}");
            std::process::exit(1);
        }
    }
}

// ---------------------------------------------------------------------------
// config file

/// Flat `key=value` lines; `#` starts a comment. Keys are flag names with
/// `-` or `_` freely interchangeable.
fn load_config(path: &Path) -> Result<HashMap<String, String>, CliErr> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliErr::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return usage(format!(
                "config {} line {}: expected key=value, got {raw:?}",
                path.display(),
                i + 1
            ))?;
        };
        let key = k.trim().to_ascii_lowercase().replace('-', "_");
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn fill<T: std::str::FromStr>(
    slot: &mut Option<T>,
    map: &HashMap<String, String>,
    key: &str,
) -> Result<(), CliErr>
where
    T::Err: std::fmt::Display,
{
    if slot.is_none() {
        if let Some(raw) = map.get(key) {
            match raw.parse() {
                Ok(v) => *slot = Some(v),
                Err(e) => return usage(format!("config key {key}={raw:?}: {e}")),
            }
        }
    }
    Ok(())
}

fn fill_chan(args: &mut ChanArgs, map: &HashMap<String, String>) -> Result<(), CliErr> {
    fill(&mut args.alpha, map, "alpha")?;
    fill(&mut args.beta, map, "beta")?;
    fill(&mut args.lambda, map, "lambda")?;
    fill(&mut args.eta, map, "eta")?;
    fill(&mut args.c, map, "c")?;
    fill(&mut args.l, map, "l")?;
    fill(&mut args.d, map, "d")?;
    fill(&mut args.r, map, "r")?;
    Ok(())
}

fn fill_solve(args: &mut SolveArgs, map: &HashMap<String, String>) -> Result<(), CliErr> {
    if args.mode.is_none() {
        if let Some(raw) = map.get("mode") {
            args.mode = Some(match raw.as_str() {
                "binary" => ModeArg::Binary,
                "ba" => ModeArg::Ba,
                "both" => ModeArg::Both,
                other => return usage(format!("config key mode={other:?}: expected binary|ba|both")),
            });
        }
    }
    fill(&mut args.tol_bits, map, "tol_bits")?;
    fill(&mut args.max_iter, map, "max_iter")?;
    Ok(())
}

fn fill_grid(args: &mut GridArgs, map: &HashMap<String, String>) -> Result<(), CliErr> {
    fill(&mut args.grid_n, map, "grid_n")?;
    fill(&mut args.grid_lo, map, "grid_lo")?;
    fill(&mut args.grid_hi, map, "grid_hi")?;
    fill(&mut args.rhos, map, "rhos")?;
    Ok(())
}

// ---------------------------------------------------------------------------
// shared resolution

fn resolve_channel(args: &ChanArgs) -> Result<(ChannelParams<f64>, ParamsMeta), CliErr> {
    let geometry = [args.l, args.d, args.r];
    let law = if geometry.iter().any(Option::is_some) {
        if args.eta.is_some() || args.c.is_some() {
            return usage("give either --eta/--c or --l/--d/--r, not both");
        }
        let [Some(l), Some(d), Some(r)] = geometry else {
            return usage("the geometry form needs all three of --l, --d, --r");
        };
        ScaledLevy::from_geometry(l, d, r)?
    } else {
        ScaledLevy::new(args.eta.unwrap_or(DEFAULT_ETA), args.c.unwrap_or(DEFAULT_C))?
    };
    let meta = ParamsMeta {
        alpha: args.alpha.unwrap_or(DEFAULT_ALPHA),
        beta: args.beta.unwrap_or(DEFAULT_BETA),
        lambda: args.lambda.unwrap_or(DEFAULT_LAMBDA),
        eta: law.eta(),
        c: law.c(),
    };
    let params = ChannelParams::new(meta.alpha, meta.beta, meta.lambda, Arc::new(law))?;
    Ok((params, meta))
}

fn require_rho(rho: Option<f64>) -> Result<f64, CliErr> {
    rho.map_or_else(|| usage("--rho is required (or set rho= in --config)"), Ok)
}

fn solve_options(args: &SolveArgs, refine: bool) -> SolveOptions<f64> {
    SolveOptions {
        ba: BaOptions {
            tol_bits: args.tol_bits.unwrap_or(DEFAULT_TOL_BITS),
            max_iter: args.max_iter.unwrap_or(DEFAULT_MAX_ITER),
        },
        refine,
        ..SolveOptions::default()
    }
}

fn modes_of(mode: Option<ModeArg>, default: ModeArg) -> Vec<SolveMode> {
    match mode.unwrap_or(default) {
        ModeArg::Binary => vec![SolveMode::BinaryClosedForm],
        ModeArg::Ba => vec![SolveMode::BlahutArimoto],
        ModeArg::Both => vec![SolveMode::BinaryClosedForm, SolveMode::BlahutArimoto],
    }
}

fn resolve_grid(args: &GridArgs, eta: f64) -> Result<(RhoGrid<f64>, GridMeta), CliErr> {
    if let Some(spec) = &args.rhos {
        let mut values = Vec::new();
        for tok in spec.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            values.push(
                tok.parse::<f64>()
                    .map_err(|e| CliErr::Usage(format!("--rhos value {tok:?}: {e}")))?,
            );
        }
        if values.is_empty() {
            return usage("--rhos lists no grid points");
        }
        let meta = GridMeta {
            n: values.len(),
            lo: values[0],
            hi: values[values.len() - 1],
            spacing: "explicit".into(),
        };
        let grid = RhoGrid::explicit(values).map_err(|e| CliErr::Usage(e.to_string()))?;
        return Ok((grid, meta));
    }
    let n = args.grid_n.unwrap_or(DEFAULT_GRID_N);
    if n == 0 {
        return usage("--grid-n must be at least 1");
    }
    let lo = args.grid_lo.unwrap_or(1e-4 * eta);
    let hi = args.grid_hi.unwrap_or((1.0 - 1e-4) * eta);
    let meta = GridMeta {
        n,
        lo,
        hi,
        spacing: "log".into(),
    };
    let grid = RhoGrid::log_spaced(lo, hi, n).map_err(|e| CliErr::Usage(e.to_string()))?;
    Ok((grid, meta))
}

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliErr> {
    match out {
        Some(path) => {
            let f = File::create(path)
                .map_err(|e| CliErr::Run(format!("cannot create {}: {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(std::io::stdout()))),
    }
}

/// Exit code 1 when Blahut-Arimoto left any reported point unconverged
/// (closed-form points are always converged). The report is still written.
fn convergence_exit(points: &[PointRecord]) -> i32 {
    let stuck = points.iter().filter(|p| !p.converged).count();
    if stuck > 0 {
        eprintln!(
            "warning: {stuck} point(s) did not reach the requested tolerance; \
             see the converged column"
        );
        1
    } else {
        0
    }
}

// ---------------------------------------------------------------------------
// subcommands

fn run(cli: Cli) -> Result<i32, CliErr> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliErr::Run(format!("thread pool: {e}")))?;
    }
    let map = match &cli.config {
        Some(path) => load_config(path)?,
        None => HashMap::new(),
    };
    let mut format = cli.format;
    if format.is_none() {
        if let Some(raw) = map.get("format") {
            format = Some(match raw.as_str() {
                "csv" => Format::Csv,
                "json" => Format::Json,
                other => return usage(format!("config key format={other:?}: expected csv|json")),
            });
        }
    }
    let format = format.unwrap_or(Format::Json);
    let mut w = open_out(&cli.out)?;
    let code = match cli.cmd {
        Cmd::Channel(mut cmd) => {
            fill_chan(&mut cmd.chan, &map)?;
            fill(&mut cmd.rho, &map, "rho")?;
            cmd_channel(&mut w, &cmd)?
        }
        Cmd::Capacity(mut cmd) => {
            fill_chan(&mut cmd.chan, &map)?;
            fill_solve(&mut cmd.solve, &map)?;
            fill(&mut cmd.rho, &map, "rho")?;
            cmd_capacity(&mut w, format, &cmd)?
        }
        Cmd::Binary(mut cmd) => {
            fill_chan(&mut cmd.chan, &map)?;
            fill(&mut cmd.rho, &map, "rho")?;
            cmd_binary(&mut w, format, &cmd)?
        }
        Cmd::Sweep(mut cmd) => {
            fill_chan(&mut cmd.chan, &map)?;
            fill_solve(&mut cmd.solve, &map)?;
            fill_grid(&mut cmd.grid, &map)?;
            cmd_sweep(&mut w, format, &cmd)?
        }
        Cmd::Pmf(mut cmd) => {
            fill_chan(&mut cmd.chan, &map)?;
            fill_solve(&mut cmd.solve, &map)?;
            fill_grid(&mut cmd.grid, &map)?;
            cmd_pmf(&mut w, format, &cmd)?
        }
        Cmd::Validate(mut cmd) => {
            fill_chan(&mut cmd.chan, &map)?;
            fill(&mut cmd.rho, &map, "rho")?;
            fill(&mut cmd.trials, &map, "trials")?;
            fill(&mut cmd.seed, &map, "seed")?;
            fill(&mut cmd.tv_bound, &map, "tv_bound")?;
            if cmd.path.is_none() {
                if let Some(raw) = map.get("path") {
                    cmd.path = Some(match raw.as_str() {
                        "thinning" => PathArg::Thinning,
                        "arrival-times" | "arrival_times" => PathArg::ArrivalTimes,
                        other => {
                            return usage(format!(
                                "config key path={other:?}: expected thinning|arrival-times"
                            ))
                        }
                    });
                }
            }
            if cmd.check.is_none() {
                if let Some(raw) = map.get("check") {
                    cmd.check = Some(PathBuf::from(raw));
                }
            }
            cmd_validate(&mut w, format, &cmd)?
        }
    };
    w.flush().map_err(|e| CliErr::Run(format!("write: {e}")))?;
    Ok(code)
}

fn cmd_channel(w: &mut impl Write, cmd: &ChannelCmd) -> Result<i32, CliErr> {
    let (params, meta) = resolve_channel(&cmd.chan)?;
    let rho = require_rho(cmd.rho)?;
    let ctx = make_context(&params, rho)?;
    let channel = end_to_end_closed_form(&ctx)?;
    write_channel_csv(w, &channel, &meta, &ctx)?;
    Ok(0)
}

fn cmd_capacity(w: &mut impl Write, format: Format, cmd: &CapacityCmd) -> Result<i32, CliErr> {
    let (params, meta) = resolve_channel(&cmd.chan)?;
    let rho = require_rho(cmd.rho)?;
    let grid = RhoGrid::explicit(vec![rho]).map_err(|e| CliErr::Usage(e.to_string()))?;
    let grid_meta = GridMeta {
        n: 1,
        lo: rho,
        hi: rho,
        spacing: "explicit".into(),
    };
    let modes = modes_of(cmd.solve.mode, ModeArg::Ba);
    let opts = solve_options(&cmd.solve, false);
    let report = assemble_sweep(&params, &meta, &grid, grid_meta, &modes, &opts)?;
    emit_sweep(w, format, &report)?;
    Ok(convergence_exit(&report.points))
}

fn cmd_binary(w: &mut impl Write, format: Format, cmd: &BinaryCmd) -> Result<i32, CliErr> {
    let (params, meta) = resolve_channel(&cmd.chan)?;
    let rho = require_rho(cmd.rho)?;
    let ctx = make_context(&params, rho)?;
    let bc = binary_capacity(&ctx);
    let report = BinaryReport::new(meta, &ctx, &bc);
    match format {
        Format::Json => write_json(w, &report)?,
        Format::Csv => write_binary_csv(w, &report)?,
    }
    Ok(0)
}

fn cmd_sweep(w: &mut impl Write, format: Format, cmd: &SweepCmd) -> Result<i32, CliErr> {
    let (params, meta) = resolve_channel(&cmd.chan)?;
    let (grid, grid_meta) = resolve_grid(&cmd.grid, meta.eta)?;
    let modes = modes_of(cmd.solve.mode, ModeArg::Both);
    let opts = solve_options(&cmd.solve, !cmd.grid.no_refine);
    let report = assemble_sweep(&params, &meta, &grid, grid_meta, &modes, &opts)?;
    emit_sweep(w, format, &report)?;
    Ok(convergence_exit(&report.points))
}

fn cmd_pmf(w: &mut impl Write, format: Format, cmd: &PmfCmd) -> Result<i32, CliErr> {
    let (params, meta) = resolve_channel(&cmd.chan)?;
    let (grid, grid_meta) = resolve_grid(&cmd.grid, meta.eta)?;
    let modes = modes_of(cmd.solve.mode, ModeArg::Ba);
    if modes.len() != 1 {
        return usage("pmf needs a single solver: --mode binary or --mode ba");
    }
    let opts = solve_options(&cmd.solve, !cmd.grid.no_refine);
    let report = assemble_sweep(&params, &meta, &grid, grid_meta, &modes, &opts)?;
    let point = report.points[report.best_index].clone();
    let pmf_report = PmfReport {
        params: meta,
        point,
    };
    match format {
        Format::Json => write_json(w, &pmf_report)?,
        Format::Csv => write_pmf_csv(w, &pmf_report.params, &pmf_report.point)?,
    }
    Ok(convergence_exit(std::slice::from_ref(&pmf_report.point)))
}

fn cmd_validate(w: &mut impl Write, format: Format, cmd: &ValidateCmd) -> Result<i32, CliErr> {
    let (params, meta) = resolve_channel(&cmd.chan)?;
    let rho = require_rho(cmd.rho)?;
    let path = match cmd.path.unwrap_or(PathArg::Thinning) {
        PathArg::Thinning => SamplingPath::Thinning,
        PathArg::ArrivalTimes => SamplingPath::ArrivalTimes,
    };
    let sim = SimConfig {
        params: params.clone(),
        rho,
        trials: cmd.trials.unwrap_or(DEFAULT_TRIALS),
        seed: cmd.seed.unwrap_or(DEFAULT_SEED),
        path,
    };
    let emp = empirical_channel(&sim)?;
    let tv_bound = cmd.tv_bound.unwrap_or(DEFAULT_TV_BOUND);
    let tv_per_row: Vec<f64> = emp.tv_to_closed_form.clone();
    let tv_max = tv_per_row.iter().copied().fold(0.0, f64::max);
    let rows_exceeding = tv_per_row.iter().filter(|&&tv| tv > tv_bound).count();
    let check_bit_exact = match &cmd.check {
        Some(file) => {
            let built = end_to_end_closed_form(&emp.ctx)?;
            let (loaded, _) = read_channel_csv_file::<f64>(file)?;
            Some(channels_bit_identical(&built, &loaded))
        }
        None => None,
    };
    let pass = rows_exceeding == 0 && check_bit_exact.unwrap_or(true);
    let report = ValidateReport {
        params: meta,
        rho,
        tau: emp.ctx.tau,
        m_rho: emp.ctx.m_rho,
        theta: emp.ctx.theta,
        trials: sim.trials,
        seed: sim.seed,
        sampling_path: path.as_str().to_string(),
        tv_bound,
        tv_per_row,
        tv_max,
        rows_exceeding,
        check_file: cmd.check.as_ref().map(|p| p.display().to_string()),
        check_bit_exact,
        pass,
    };
    match format {
        Format::Json => write_json(w, &report)?,
        Format::Csv => write_validate_csv(w, &report)?,
    }
    if report.pass {
        Ok(0)
    } else {
        eprintln!(
            "validation failed: {} row(s) above tv bound {tv_bound}{}",
            report.rows_exceeding,
            if report.check_bit_exact == Some(false) {
                "; channel file reload is not bit-exact"
            } else {
                ""
            }
        );
        Ok(1)
    }
}

// ---------------------------------------------------------------------------
// sweep assembly

/// Run every requested mode over the grid and flatten into one report:
/// points sorted by rho (binary before ba at equal rho), best = highest rate,
/// threshold = first rho whose product m_rho * theta crosses the
/// binary-optimality constant.
fn assemble_sweep(
    params: &ChannelParams<f64>,
    meta: &ParamsMeta,
    grid: &RhoGrid<f64>,
    grid_meta: GridMeta,
    modes: &[SolveMode],
    opts: &SolveOptions<f64>,
) -> Result<SweepReport, CliErr> {
    let mut solved: Vec<CapacityPoint<f64>> = Vec::new();
    for &mode in modes {
        solved.extend(sweep(params, grid, mode, opts)?.points);
    }
    let rank = |m: SolveMode| match m {
        SolveMode::BinaryClosedForm => 0u8,
        SolveMode::BlahutArimoto => 1u8,
    };
    solved.sort_by(|a, b| {
        a.rho
            .total_cmp(&b.rho)
            .then_with(|| rank(a.mode).cmp(&rank(b.mode)))
    });
    let best_index = solved
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.rate.total_cmp(&b.1.rate).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let threshold_rho = solved
        .iter()
        .find(|p| p.m_rho as f64 * p.theta >= BINARY_OPTIMALITY_PRODUCT)
        .map(|p| p.rho);
    let points = solved
        .iter()
        .map(|p| PointRecord::from_point(p, meta.c))
        .collect();
    Ok(SweepReport {
        params: meta.clone(),
        grid: grid_meta,
        points,
        best_index,
        threshold_rho,
    })
}

fn emit_sweep(w: &mut impl Write, format: Format, report: &SweepReport) -> Result<(), CliErr> {
    match format {
        Format::Json => write_json(w, report)?,
        Format::Csv => write_sweep_csv(w, report)?,
    }
    Ok(())
}
