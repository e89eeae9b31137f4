//! Report structs and file formats.
//!
//! Every report exists in two encodings that carry identical numbers: JSON
//! (via serde, shortest-round-trip decimals) and CSV (17 significant digits,
//! `#`-prefixed `key=value` metadata lines before the column header). Both
//! round-trip `f64` values bit-exactly, and writing is deterministic: the
//! same report produces byte-identical files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::capacity::BinaryCapacity;
use crate::channel::{compress_dense, DiscreteChannel, Row, ThetaContext};
use crate::error::{Error, Result};
use crate::optimize::CapacityPoint;
use crate::scalar::Scalar;

/// 17 significant digits: enough to reconstruct any `f64` bit-exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Channel parameters as plain numbers (reports are always `f64`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsMeta {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub eta: f64,
    pub c: f64,
}

/// Description of the rho grid a sweep ran on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
    /// "log", "linear", or "explicit".
    pub spacing: String,
}

/// One solved operating point, flattened for serialization.
///
/// `rate` is bits/second; `rate_normalized` is the dimensionless `c * rate`
/// (the time unit cancels, so it is invariant under diffusion rescaling).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub rho: f64,
    pub tau: f64,
    pub m_rho: u64,
    pub theta: f64,
    pub mi_bits: f64,
    pub rate: f64,
    pub rate_normalized: f64,
    pub gap_bits: f64,
    pub converged: bool,
    /// Sparse optimal input pmf: `(symbol, mass)` pairs.
    pub pmf_sparse: Vec<(u64, f64)>,
    pub mode: String,
}

impl PointRecord {
    /// Flatten a solved point; `c` is the arrival-law scale used for the
    /// normalized rate.
    pub fn from_point<F: Scalar>(p: &CapacityPoint<F>, c: f64) -> Self {
        PointRecord {
            rho: p.rho.f64(),
            tau: p.tau.f64(),
            m_rho: p.m_rho,
            theta: p.theta.f64(),
            mi_bits: p.mi_bits.f64(),
            rate: p.rate.f64(),
            rate_normalized: c * p.rate.f64(),
            gap_bits: p.gap_bits.f64(),
            converged: p.converged,
            pmf_sparse: p.pmf.iter().map(|&(x, w)| (x, w.f64())).collect(),
            mode: p.mode.as_str().to_string(),
        }
    }
}

/// Full sweep report: the JSON document the CLI emits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub params: ParamsMeta,
    pub grid: GridMeta,
    pub points: Vec<PointRecord>,
    /// Index into `points` of the best (highest-rate) point.
    pub best_index: usize,
    /// Smallest grid rho at which the binary-optimality product crosses its
    /// threshold, if any.
    pub threshold_rho: Option<f64>,
}

/// One point with its parameters: the `pmf` subcommand's JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfReport {
    pub params: ParamsMeta,
    pub point: PointRecord,
}

/// Closed-form two-point capacity report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryReport {
    pub params: ParamsMeta,
    pub rho: f64,
    pub tau: f64,
    pub m_rho: u64,
    pub theta: f64,
    pub phi: f64,
    pub xi_star: f64,
    pub mi_bits: f64,
    pub rate: f64,
    pub rate_normalized: f64,
}

impl BinaryReport {
    pub fn new<F: Scalar>(params: ParamsMeta, ctx: &ThetaContext<F>, bc: &BinaryCapacity<F>) -> Self {
        BinaryReport {
            rho: ctx.rho.f64(),
            tau: ctx.tau.f64(),
            m_rho: ctx.m_rho,
            theta: ctx.theta.f64(),
            phi: bc.phi.f64(),
            xi_star: bc.xi_star.f64(),
            mi_bits: bc.mi_bits.f64(),
            rate: bc.rate_bits_per_sec.f64(),
            rate_normalized: params.c * bc.rate_bits_per_sec.f64(),
            params,
        }
    }
}

/// Monte Carlo validation report: per-row TV distances against the analytic
/// law, plus the optional bit-exactness check of a reloaded channel file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub params: ParamsMeta,
    pub rho: f64,
    pub tau: f64,
    pub m_rho: u64,
    pub theta: f64,
    pub trials: u64,
    pub seed: u64,
    pub sampling_path: String,
    pub tv_bound: f64,
    pub tv_per_row: Vec<f64>,
    pub tv_max: f64,
    pub rows_exceeding: usize,
    /// Path of the channel file checked for bit-exact reload, if any.
    pub check_file: Option<String>,
    /// Whether the reloaded file matched the in-memory channel bit-exactly.
    pub check_bit_exact: Option<bool>,
    pub pass: bool,
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse(format!("json: {e}"))
}

/// Serialize any report as pretty JSON followed by a newline.
pub fn write_json<T: Serialize>(w: &mut impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(json_err)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_json(&mut w, value)?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(r: &mut impl Read) -> Result<T> {
    serde_json::from_reader(r).map_err(json_err)
}

pub fn read_sweep_json(path: &Path) -> Result<SweepReport> {
    read_json(&mut BufReader::new(File::open(path)?))
}

fn write_meta_line(w: &mut impl Write, key: &str, value: &str) -> Result<()> {
    writeln!(w, "# {key}={value}")?;
    Ok(())
}

fn write_params_meta(w: &mut impl Write, p: &ParamsMeta) -> Result<()> {
    write_meta_line(w, "alpha", &fmt_f64(p.alpha))?;
    write_meta_line(w, "beta", &fmt_f64(p.beta))?;
    write_meta_line(w, "lambda", &fmt_f64(p.lambda))?;
    write_meta_line(w, "eta", &fmt_f64(p.eta))?;
    write_meta_line(w, "c", &fmt_f64(p.c))?;
    Ok(())
}

/// Sweep CSV: metadata lines, a column header, one line per point (the pmf
/// stays in the JSON encoding; CSV is for curve plotting).
pub fn write_sweep_csv(w: &mut impl Write, r: &SweepReport) -> Result<()> {
    write_params_meta(w, &r.params)?;
    write_meta_line(w, "grid_n", &r.grid.n.to_string())?;
    write_meta_line(w, "grid_lo", &fmt_f64(r.grid.lo))?;
    write_meta_line(w, "grid_hi", &fmt_f64(r.grid.hi))?;
    write_meta_line(w, "spacing", &r.grid.spacing)?;
    write_meta_line(w, "best_index", &r.best_index.to_string())?;
    write_meta_line(
        w,
        "threshold_rho",
        &r.threshold_rho.map_or_else(|| "none".to_string(), fmt_f64),
    )?;
    writeln!(
        w,
        "rho,tau,theta,m_rho,mi_bits,rate,rate_normalized,gap_bits,converged,mode"
    )?;
    for p in &r.points {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(p.rho),
            fmt_f64(p.tau),
            fmt_f64(p.theta),
            p.m_rho,
            fmt_f64(p.mi_bits),
            fmt_f64(p.rate),
            fmt_f64(p.rate_normalized),
            fmt_f64(p.gap_bits),
            p.converged,
            p.mode
        )?;
    }
    Ok(())
}

/// Input-pmf CSV for one point: metadata, then `symbol,mass` lines.
pub fn write_pmf_csv(w: &mut impl Write, params: &ParamsMeta, p: &PointRecord) -> Result<()> {
    write_params_meta(w, params)?;
    write_meta_line(w, "rho", &fmt_f64(p.rho))?;
    write_meta_line(w, "tau", &fmt_f64(p.tau))?;
    write_meta_line(w, "theta", &fmt_f64(p.theta))?;
    write_meta_line(w, "m_rho", &p.m_rho.to_string())?;
    write_meta_line(w, "mi_bits", &fmt_f64(p.mi_bits))?;
    write_meta_line(w, "rate", &fmt_f64(p.rate))?;
    write_meta_line(w, "mode", &p.mode)?;
    writeln!(w, "symbol,mass")?;
    for &(x, mass) in &p.pmf_sparse {
        writeln!(w, "{x},{}", fmt_f64(mass))?;
    }
    Ok(())
}

/// Single-row CSV for the closed-form binary capacity.
pub fn write_binary_csv(w: &mut impl Write, r: &BinaryReport) -> Result<()> {
    write_params_meta(w, &r.params)?;
    writeln!(
        w,
        "rho,tau,theta,m_rho,phi,xi_star,mi_bits,rate,rate_normalized"
    )?;
    writeln!(
        w,
        "{},{},{},{},{},{},{},{},{}",
        fmt_f64(r.rho),
        fmt_f64(r.tau),
        fmt_f64(r.theta),
        r.m_rho,
        fmt_f64(r.phi),
        fmt_f64(r.xi_star),
        fmt_f64(r.mi_bits),
        fmt_f64(r.rate),
        fmt_f64(r.rate_normalized)
    )?;
    Ok(())
}

/// Validation CSV: metadata (including the verdict), then `x,tv` lines.
pub fn write_validate_csv(w: &mut impl Write, r: &ValidateReport) -> Result<()> {
    write_params_meta(w, &r.params)?;
    write_meta_line(w, "rho", &fmt_f64(r.rho))?;
    write_meta_line(w, "tau", &fmt_f64(r.tau))?;
    write_meta_line(w, "theta", &fmt_f64(r.theta))?;
    write_meta_line(w, "m_rho", &r.m_rho.to_string())?;
    write_meta_line(w, "trials", &r.trials.to_string())?;
    write_meta_line(w, "seed", &r.seed.to_string())?;
    write_meta_line(w, "sampling_path", &r.sampling_path)?;
    write_meta_line(w, "tv_bound", &fmt_f64(r.tv_bound))?;
    write_meta_line(w, "tv_max", &fmt_f64(r.tv_max))?;
    write_meta_line(w, "rows_exceeding", &r.rows_exceeding.to_string())?;
    if let Some(f) = &r.check_file {
        write_meta_line(w, "check_file", f)?;
        write_meta_line(
            w,
            "check_bit_exact",
            &r.check_bit_exact.unwrap_or(false).to_string(),
        )?;
    }
    write_meta_line(w, "pass", &r.pass.to_string())?;
    writeln!(w, "x,tv")?;
    for (x, tv) in r.tv_per_row.iter().enumerate() {
        writeln!(w, "{x},{}", fmt_f64(*tv))?;
    }
    Ok(())
}

/// Channel matrix CSV: metadata lines, then one dense probability row per
/// input symbol (columns are output symbols `0..=y_max`).
pub fn write_channel_csv<F: Scalar>(
    w: &mut impl Write,
    channel: &DiscreteChannel<F>,
    params: &ParamsMeta,
    ctx: &ThetaContext<F>,
) -> Result<()> {
    write_params_meta(w, params)?;
    write_meta_line(w, "rho", &fmt_f64(ctx.rho.f64()))?;
    write_meta_line(w, "tau", &fmt_f64(ctx.tau.f64()))?;
    write_meta_line(w, "theta", &fmt_f64(ctx.theta.f64()))?;
    write_meta_line(w, "m_rho", &ctx.m_rho.to_string())?;
    let dense = channel.dense()?;
    for row in dense {
        let mut first = true;
        for p in row {
            if !first {
                w.write_all(b",")?;
            }
            first = false;
            w.write_all(fmt_f64(p.f64()).as_bytes())?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// `# key=value` metadata pairs from a channel CSV header, in file order.
pub type MetaPairs = Vec<(String, String)>;

/// Parse a channel CSV written by [`write_channel_csv`]. Returns the channel
/// (inputs `0..rows`) and the metadata pairs in file order.
pub fn read_channel_csv<F: Scalar>(
    r: &mut impl Read,
) -> Result<(DiscreteChannel<F>, MetaPairs)> {
    let reader = BufReader::new(r);
    let mut meta = Vec::new();
    let mut rows: Vec<Row<F>> = Vec::new();
    let mut width: Option<usize> = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            match rest.split_once('=') {
                Some((k, v)) => meta.push((k.trim().to_string(), v.trim().to_string())),
                None => {
                    return Err(Error::Parse(format!(
                        "line {}: metadata line without '='",
                        lineno + 1
                    )))
                }
            }
            continue;
        }
        let mut dense: Vec<F> = Vec::new();
        for tok in line.split(',') {
            let v: f64 = tok.trim().parse().map_err(|e| {
                Error::Parse(format!("line {}: bad number {tok:?}: {e}", lineno + 1))
            })?;
            dense.push(F::of(v));
        }
        match width {
            None => width = Some(dense.len()),
            Some(n) if n != dense.len() => {
                return Err(Error::Parse(format!(
                    "line {}: expected {n} columns, found {}",
                    lineno + 1,
                    dense.len()
                )))
            }
            _ => {}
        }
        rows.push(compress_dense(&dense));
    }
    let width = width.ok_or_else(|| Error::Parse("no probability rows in file".into()))?;
    let inputs = (0..rows.len() as u64).collect();
    let channel = DiscreteChannel::from_parts(inputs, rows, width as u64 - 1)?;
    Ok((channel, meta))
}

pub fn read_channel_csv_file<F: Scalar>(
    path: &Path,
) -> Result<(DiscreteChannel<F>, MetaPairs)> {
    read_channel_csv(&mut File::open(path)?)
}

/// True when the two channels hold exactly the same bits: same inputs, same
/// output bound, same row supports, and bit-identical probabilities.
pub fn channels_bit_identical<F: Scalar>(
    a: &DiscreteChannel<F>,
    b: &DiscreteChannel<F>,
) -> bool {
    a.inputs() == b.inputs()
        && a.y_max() == b.y_max()
        && a.rows().len() == b.rows().len()
        && a.rows().iter().zip(b.rows()).all(|(ra, rb)| {
            ra.start == rb.start
                && ra.probs.len() == rb.probs.len()
                && ra
                    .probs
                    .iter()
                    .zip(&rb.probs)
                    .all(|(x, y)| x.f64().to_bits() == y.f64().to_bits())
        })
}
