//! Command-line front end: `constants`, `verify` and `sweep`.
//!
//! Exit codes: `0` everything passed, `1` some check failed, `2` usage or
//! input error.
//!
//! `sweep` writes one CSV row per δ with the columns in [`SWEEP_COLUMNS`].
//! Non-finite values are written as `inf`/`NaN`; values that do not apply
//! (for example `p_star_w` in 1D) are left empty.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{a_1, a_p, bmo, bmo_w, doubling, fujii_wilson, hruscev, jn_sup_r, ConstantsReport};
use crate::error::{Error, Result};
use crate::families::WeightKind;
use crate::grid::{CubeFamily, DoublingMode, GridSpec, Weight};
use crate::io::read_weight;
use crate::sobolev::sobolev_exponent;
use crate::verify::{
    calibrate_embedding, check_bmo_chain, check_bmo_vs_bmow, check_doubling_bound, check_embedding,
    check_embedding_piecewise, check_left_open, check_rhi, check_subset, check_tsutsui, embedding_via_jn,
    parse_checks, rhi_epsilon_max, CheckId, CheckResult,
};

/// Frozen column order of `sweep` output.
pub const SWEEP_COLUMNS: [&str; 16] = [
    "v",
    "delta",
    "fujii_wilson_m1",
    "hruscev_m1",
    "bmo_log",
    "bmo_w_log",
    "jn_r_star",
    "embed_jn_p",
    "a_p_at_p",
    "embed_jn_pass",
    "doubling",
    "p_star_w",
    "implied_kappa",
    "implied_tsutsui_c",
    "implied_bmo_c",
    "all_pass",
];

/// Checks run by `sweep` to fill `all_pass` unless `--checks` is given.
pub const SWEEP_DEFAULT_CHECKS: &str = "rhi,left_open,doubling,bmo_chain,embed_jn";

#[derive(Debug, Parser)]
#[command(name = "weightlab", version, about = "Muckenhoupt weight constants and inequality checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print every constant of one weight.
    Constants(ConstantsArgs),
    /// Run inequality checks on one weight.
    Verify(VerifyArgs),
    /// Tabulate constants over a flat family as δ varies.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Clip,
    RequireInside,
}

impl From<Mode> for DoublingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Clip => DoublingMode::Clip,
            Mode::RequireInside => DoublingMode::RequireInside,
        }
    }
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Dimension, 1 or 2.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Grid level; the grid has 2^L cells per side.
    #[arg(long = "L", default_value_t = 6)]
    level: u32,
    /// `dyadic`, `aligned` or `aligned:a,b`.
    #[arg(long, default_value = "dyadic")]
    family: String,
    /// Doubling snap mode.
    #[arg(long, value_enum, default_value_t = Mode::Clip)]
    doubling_mode: Mode,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// Generator spec such as `flat:delta=0.05,shape=sin`.
    #[arg(long, conflicts_with = "weight_file")]
    weight: Option<String>,
    /// Weight file in CSV or JSON grid format.
    #[arg(long)]
    weight_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FormatArgs {
    /// JSON output (default).
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// CSV output.
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Args)]
struct ConstantsArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    format: FormatArgs,
    /// Exponents for `[w]_{A_p}`.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2.0])]
    p: Vec<f64>,
}

/// Constants the checks take as parameters.
#[derive(Debug, Args, Clone)]
struct CheckParams {
    /// Exponents for `left_open`.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2.0])]
    p: Vec<f64>,
    /// Reverse Hölder exponent; the admissible endpoint when absent.
    #[arg(long)]
    eps: Option<f64>,
    /// Embedding constant τ; calibrated on the weight when absent.
    #[arg(long)]
    tau: Option<f64>,
    /// Embedding constant τ'; `2 log 3 · τ` when absent.
    #[arg(long)]
    tau_prime: Option<f64>,
    /// Doubling constant κ.
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Constant in `bmo <= C bmo_w`.
    #[arg(long, default_value_t = 4.0)]
    bmo_c: f64,
    /// Flat threshold `c` of the piecewise embedding.
    #[arg(long, default_value_t = 0.5)]
    small_c: f64,
    /// Growth constant `C` of the piecewise embedding.
    #[arg(long, default_value_t = 1.0)]
    large_c: f64,
    /// Budget for the Tsutsui constant; record-only when absent.
    #[arg(long)]
    tsutsui_c: Option<f64>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    format: FormatArgs,
    /// Comma-separated check ids; all checks when absent.
    #[arg(long)]
    checks: Option<String>,
    #[command(flatten)]
    params: CheckParams,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Flat generator spec; its `delta` is replaced by each sweep point.
    #[arg(long, default_value = "flat:delta=0,shape=sin")]
    weight: String,
    /// Explicit δ values.
    #[arg(long, value_delimiter = ',', conflicts_with = "delta_range")]
    deltas: Option<Vec<f64>>,
    /// `start:stop:count`, evenly spaced and inclusive.
    #[arg(long)]
    delta_range: Option<String>,
    /// Checks that decide `all_pass`.
    #[arg(long, default_value = SWEEP_DEFAULT_CHECKS)]
    checks: String,
    /// Exponent `p` of the weighted Sobolev column (n = 2 only).
    #[arg(long, default_value_t = 1.0)]
    sobolev_p: f64,
    #[command(flatten)]
    params: CheckParams,
}

/// Parse `args` (including the program name), run, write the report and
/// return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Constants(a) => cmd_constants(&a).map(|s| (s, 0)),
        Command::Verify(a) => cmd_verify(&a).map(|(s, ok)| (s, if ok { 0 } else { 1 })),
        Command::Sweep(a) => cmd_sweep(&a).map(|(s, ok)| (s, if ok { 0 } else { 1 })),
    };
    match outcome {
        Ok(((text, out), code)) => match out {
            Some(path) => match std::fs::write(&path, text) {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {}: {e}", path.display());
                    2
                }
            },
            None => {
                let _ = stdout.write_all(text.as_bytes());
                code
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

/// Report text and the file it goes to.
type Rendered = (String, Option<PathBuf>);

fn grid_and_family(g: &GridArgs) -> Result<(GridSpec, CubeFamily)> {
    Ok((GridSpec::new(g.n, g.level)?, g.family.parse()?))
}

fn load_weight(grid: GridSpec, source: &SourceArgs) -> Result<Weight> {
    match (&source.weight, &source.weight_file) {
        (Some(spec), None) => spec.parse::<WeightKind>()?.generate(grid),
        (None, Some(path)) => read_weight(path),
        _ => Err(Error::InvalidParameter("give exactly one of --weight and --weight-file".into())),
    }
}

fn cmd_constants(a: &ConstantsArgs) -> Result<Rendered> {
    let (grid, family) = grid_and_family(&a.grid)?;
    let w = load_weight(grid, &a.source)?;
    let report = ConstantsReport::compute(&w, &family, &a.p, a.grid.doubling_mode.into())?;
    let text = if a.format.csv { constants_csv(&report) } else { to_json_line(&report) };
    Ok((text, a.grid.out.clone()))
}

fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn constants_csv(r: &ConstantsReport) -> String {
    let mut rows = vec!["v,constant,p,value".to_string()];
    let mut push = |name: &str, p: Option<f64>, v: Option<f64>| {
        rows.push(format!(
            "1,{name},{},{}",
            p.map(num).unwrap_or_default(),
            v.map(num).unwrap_or_default()
        ));
    };
    for e in &r.a_p {
        push("a_p", Some(e.p), Some(e.value));
    }
    push("a_1", None, Some(r.a_1.value));
    push("fujii_wilson", None, Some(r.fujii_wilson.value));
    push("hruscev", None, Some(r.hruscev.value));
    push("log_ainfty", None, Some(r.log_ainfty.value));
    push("bmo_log", None, Some(r.bmo_log.value));
    push("bmo_w_log", None, Some(r.bmo_w_log.value));
    push("doubling", None, r.doubling.as_ref().map(|d| d.value));
    push("jn_r_star", None, Some(r.jn_r_star.value.unwrap_or(f64::INFINITY)));
    let mut s = rows.join("\n");
    s.push('\n');
    s
}

/// τ and τ' actually used: the given ones, else calibrated on `w`, else
/// (constant weight) `τ = 2^{n+1}`.
fn embedding_constants(w: &Weight, family: &CubeFamily, p: &CheckParams) -> Result<(f64, f64)> {
    let ln9 = 2.0 * 3f64.ln();
    match (p.tau, p.tau_prime) {
        (Some(t), Some(tp)) => Ok((t, tp)),
        (Some(t), None) => Ok((t, ln9 * t)),
        (None, tp) => {
            let t = match calibrate_embedding(std::slice::from_ref(w), family) {
                Ok((t, _)) => t,
                Err(Error::DegenerateWeight) => (1u32 << (w.grid().dim() + 1)) as f64,
                Err(e) => return Err(e),
            };
            Ok((t, tp.unwrap_or(ln9 * t)))
        }
    }
}

/// Cells of the domain holding the `k` largest weights, with `k` chosen to
/// make `w(E)/w(Q)` largest relative to the subset bound.
fn worst_subset(w: &Weight, family: &CubeFamily) -> Vec<usize> {
    let fw = fujii_wilson(w, family).value;
    let n = w.grid().dim();
    let theta = 1.0 / (1.0 + (1u32 << (n + 1)) as f64 * (fw - 1.0));
    let mut order: Vec<usize> = (0..w.values().len()).collect();
    order.sort_by(|&i, &j| w.values()[j].total_cmp(&w.values()[i]).then(i.cmp(&j)));
    let total: f64 = w.values().iter().sum();
    let count = order.len() as f64;
    let (mut acc, mut best, mut best_k) = (0.0, f64::NEG_INFINITY, 1);
    for (k, &i) in order.iter().enumerate() {
        acc += w.values()[i];
        let ratio = (acc / total) / ((k + 1) as f64 / count).powf(theta);
        if ratio > best {
            best = ratio;
            best_k = k + 1;
        }
    }
    order.truncate(best_k);
    order
}

fn run_checks(w: &Weight, family: &CubeFamily, mode: DoublingMode, checks: &[CheckId], p: &CheckParams) -> Result<Vec<CheckResult>> {
    let n = w.grid().dim();
    let logw = w.log();
    let mut out = Vec::new();
    for id in checks {
        match id {
            CheckId::Rhi => {
                let eps = match p.eps {
                    Some(e) => e,
                    None => {
                        let max = rhi_epsilon_max(fujii_wilson(w, family).value, n);
                        if max.is_finite() { max } else { 1.0 }
                    }
                };
                out.push(check_rhi(w, eps, family)?);
            }
            CheckId::Subset => {
                let cells = worst_subset(w, family);
                out.push(check_subset(w, &w.grid().domain(), &cells, family)?);
            }
            CheckId::LeftOpen => {
                for &q in &p.p {
                    out.push(check_left_open(w, q, family)?);
                }
            }
            CheckId::Doubling => out.push(check_doubling_bound(w, family, mode, p.kappa)?),
            CheckId::BmoChain => out.extend(check_bmo_chain(w, family)?),
            CheckId::Tsutsui => out.push(check_tsutsui(&logw, w, family, p.tsutsui_c)?),
            CheckId::EmbedJn => out.push(embedding_via_jn(w, family)?.1),
            CheckId::EmbedThm11 => {
                let (t, tp) = embedding_constants(w, family, p)?;
                out.push(check_embedding(w, t, tp, family)?);
            }
            CheckId::EmbedPiecewise => {
                let (t, tp) = embedding_constants(w, family, p)?;
                out.push(check_embedding_piecewise(w, p.small_c, p.large_c, t, tp, family)?);
            }
            CheckId::BmoVsBmow => out.push(check_bmo_vs_bmow(&logw, w, p.bmo_c, family)?),
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    v: u32,
    n: usize,
    #[serde(rename = "L")]
    level: u32,
    family: String,
    all_pass: bool,
    results: &'a [CheckResult],
}

fn cmd_verify(a: &VerifyArgs) -> Result<(Rendered, bool)> {
    let checks = match &a.checks {
        Some(list) => parse_checks(list)?,
        None => CheckId::ALL.to_vec(),
    };
    let (grid, family) = grid_and_family(&a.grid)?;
    let w = load_weight(grid, &a.source)?;
    let results = run_checks(&w, &family, a.grid.doubling_mode.into(), &checks, &a.params)?;
    let all_pass = results.iter().all(|r| r.pass);
    let text = if a.format.csv {
        let mut s = String::from("v,id,part,lhs,rhs,ratio,pass\n");
        for r in &results {
            let part = r.params.get("part").and_then(|v| v.as_str()).unwrap_or("");
            s.push_str(&format!("1,{},{part},{},{},{},{}\n", r.id, num(r.lhs), num(r.rhs), num(r.ratio), r.pass));
        }
        s
    } else {
        let g = w.grid();
        to_json_line(&VerifyReport {
            v: 1,
            n: g.dim(),
            level: g.level(),
            family: family.label(),
            all_pass,
            results: &results,
        })
    };
    Ok(((text, a.grid.out.clone()), all_pass))
}

fn parse_range(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Parse(format!("delta range `{s}` is not start:stop:count"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, k] = parts.as_slice() else { return Err(bad()) };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let k: usize = k.trim().parse().map_err(|_| bad())?;
    Ok(match k {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect(),
    })
}

/// One sweep row; `None` prints as an empty cell.
#[derive(Debug, Clone)]
struct SweepRow {
    cells: Vec<Option<String>>,
    all_pass: bool,
}

fn param_f64(r: &CheckResult, key: &str) -> Option<f64> {
    r.params.get(key).and_then(|v| v.as_f64())
}

fn sweep_row(
    kind: &WeightKind,
    delta: f64,
    grid: GridSpec,
    family: &CubeFamily,
    mode: DoublingMode,
    checks: &[CheckId],
    a: &SweepArgs,
) -> Result<SweepRow> {
    let w = kind.with_delta(delta)?.generate(grid)?;
    let logw = w.log();
    let fw = fujii_wilson(&w, family).value;
    let h = hruscev(&w, family).value;
    let jn = jn_sup_r(&w, family, 3.0)?;
    let (p, embed) = embedding_via_jn(&w, family)?;
    let ap = if p - 1.0 <= 1e-12 { a_1(&w, family).value } else { a_p(&w, p, family)?.value };
    let d = match doubling(&w, family, mode) {
        Ok(s) => Some(s.value),
        Err(Error::NoAdmissibleCube) => None,
        Err(e) => return Err(e),
    };
    let tau = a.params.tau.unwrap_or((1u32 << (grid.dim() + 1)) as f64);
    let p_star = if grid.dim() >= 2 { sobolev_exponent(a.sobolev_p, fw, tau, grid.dim()).ok() } else { None };
    let kappa = match d {
        Some(_) => param_f64(&check_doubling_bound(&w, family, mode, a.params.kappa)?, "implied_kappa"),
        None => None,
    };
    let tsutsui = param_f64(&check_tsutsui(&logw, &w, family, None)?, "implied_c");
    let bmo_c = param_f64(&check_bmo_vs_bmow(&logw, &w, a.params.bmo_c, family)?, "implied_c");
    let results = run_checks(&w, family, mode, checks, &a.params)?;
    let all_pass = results.iter().all(|r| r.pass);
    let cells = vec![
        Some("1".to_string()),
        Some(num(delta)),
        Some(num(fw - 1.0)),
        Some(num(h - 1.0)),
        Some(num(bmo(&logw, family).value)),
        Some(num(bmo_w(&logw, &w, family)?.value)),
        Some(num(jn.r)),
        Some(num(p)),
        Some(num(ap)),
        Some(embed.pass.to_string()),
        d.map(num),
        p_star.map(num),
        kappa.map(num),
        tsutsui.map(num),
        bmo_c.map(num),
        Some(all_pass.to_string()),
    ];
    Ok(SweepRow { cells, all_pass })
}

fn cmd_sweep(a: &SweepArgs) -> Result<(Rendered, bool)> {
    let (grid, family) = grid_and_family(&a.grid)?;
    let kind: WeightKind = a.weight.parse()?;
    kind.with_delta(0.0)?;
    let checks = parse_checks(&a.checks)?;
    let deltas = match (&a.deltas, &a.delta_range) {
        (Some(d), None) => d.clone(),
        (None, Some(r)) => parse_range(r)?,
        _ => return Err(Error::InvalidParameter("give exactly one of --deltas and --delta-range".into())),
    };
    let mode: DoublingMode = a.grid.doubling_mode.into();
    let rows = deltas
        .par_iter()
        .map(|&d| sweep_row(&kind, d, grid, &family, mode, &checks, a))
        .collect::<Result<Vec<_>>>()?;
    let mut text = SWEEP_COLUMNS.join(",");
    text.push('\n');
    for r in &rows {
        let line: Vec<String> = r.cells.iter().map(|c| c.clone().unwrap_or_default()).collect();
        text.push_str(&line.join(","));
        text.push('\n');
    }
    let ok = rows.iter().all(|r| r.all_pass);
    Ok(((text, a.grid.out.clone()), ok))
}
