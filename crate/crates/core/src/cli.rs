//! The `ptsym` command line: `generate | analyze | counts | sweep | evolve`.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure,
//! 3 unitarity violation.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{build_c_operator, COperator, COperatorResiduals};
use crate::construction::{
    classify_matrix, count_parity_params, make_pt_system, maximal_signature, parameter_table, pt_commutator, Block,
    MatrixClass, PtSystem, SystemFile, SystemSampler, TimeReversal,
};
use crate::dynamics::{
    nonunitarity_demo, unitarity_trace, weighted_trace, BraEvolution, DemoVerdict, EvolutionTrace, DEFAULT_STEPS,
    DEFAULT_T_MAX,
};
use crate::error::{Error, Result};
use crate::io::{csv_writer, fmt_f64, read_json, write_json_to};
use crate::linalg::{eigendecompose, ComplexMatrix, C64, DEFAULT_TOL};
use crate::oracle::{h2, p2, TwoByTwoParams};
use crate::spectral::{classify_phase, Phase, SpectralData};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_UNITARITY: i32 = 3;

/// `evolve` exits with [`EXIT_UNITARITY`] when the drift exceeds this.
pub const DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "ptsym", version, about = "PT-symmetric matrix Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random PT-symmetric system and write it as JSON.
    Generate(GenerateArgs),
    /// Spectrum, phase, PT norms, C operator and class flags of a system.
    Analyze(AnalyzeArgs),
    /// Parameter counts for D = 1..=max-dim.
    Counts(CountsArgs),
    /// Spectrum along a one-parameter grid, as CSV.
    Sweep(SweepArgs),
    /// Inner product of two evolving states, as CSV.
    Evolve(EvolveArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub dim: Option<usize>,
    /// `m+,m-`; defaults to the maximal signature for `--dim`.
    #[arg(long, value_parser = parse_signature)]
    pub signature: Option<(usize, usize)>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Scale of the B block entries.
    #[arg(long, default_value_t = 1.0)]
    pub coupling: f64,
    /// Redraw until the system is in the unbroken phase.
    #[arg(long)]
    pub unbroken: bool,
    #[arg(long, default_value_t = 10_000)]
    pub max_attempts: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// JSON destination; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CountsArgs {
    #[arg(long, default_value_t = 6)]
    pub max_dim: usize,
    /// CSV destination; the text table always goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// System JSON with provenance; sweeps a block entry such as `A[0,1]`.
    /// Without it the two-level Hamiltonian is swept over `r`, `s`, `t` or `phi`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub param: String,
    /// `lo,hi,step`; the grid is `lo, lo + step, …` strictly below `hi`.
    #[arg(long, value_parser = parse_range)]
    pub range: (f64, f64, f64),
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub r: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// `eigen:N`, `random:SEED` or `basis:N`. Defaults to `random:0`, or to
    /// the fixed demonstration pair for an asymmetric `H`.
    #[arg(long, value_parser = parse_state)]
    pub state: Option<StateSpec>,
    /// Second state; defaults to `--state`.
    #[arg(long, value_parser = parse_state)]
    pub state_b: Option<StateSpec>,
    #[arg(long, default_value_t = DEFAULT_T_MAX)]
    pub t_max: f64,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateSpec {
    Eigen(usize),
    Random(u64),
    Basis(usize),
}

fn parse_signature(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected m+,m-")?;
    let a = a.trim().parse().map_err(|e| format!("m+: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("m-: {e}"))?;
    Ok((a, b))
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected lo,hi,step".into());
    }
    let mut vals = [0.0; 3];
    for (v, p) in vals.iter_mut().zip(&parts) {
        *v = p.trim().parse().map_err(|e| format!("{p}: {e}"))?;
    }
    Ok((vals[0], vals[1], vals[2]))
}

fn parse_state(s: &str) -> std::result::Result<StateSpec, String> {
    let (kind, n) = s.split_once(':').ok_or("expected eigen:N, random:SEED or basis:N")?;
    let n: u64 = n.trim().parse().map_err(|e| format!("{n}: {e}"))?;
    match kind {
        "eigen" => Ok(StateSpec::Eigen(n as usize)),
        "random" => Ok(StateSpec::Random(n)),
        "basis" => Ok(StateSpec::Basis(n as usize)),
        _ => Err(format!("unknown state kind {kind:?}")),
    }
}

/// Exit code for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonConvergence(_)
        | Error::ResidualTooLarge { .. }
        | Error::Singular(_)
        | Error::Defective(_)
        | Error::BrokenPhase { .. }
        | Error::ExceptionalPoint(_)
        | Error::NotPtCollinear(_)
        | Error::NonFinite => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Counts(a) => cmd_counts(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Evolve(a) => cmd_evolve(&a),
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub fn resolve_signature(dim: Option<usize>, signature: Option<(usize, usize)>) -> Result<(usize, usize)> {
    match (dim, signature) {
        (None, None) => Err(usage("one of --dim or --signature is required")),
        (Some(d), None) => Ok(maximal_signature(d)),
        (d, Some((mp, mm))) => {
            if let Some(d) = d {
                if mp + mm != d {
                    return Err(Error::InvalidSignature {
                        m_plus: mp,
                        m_minus: mm,
                        reason: "m_plus + m_minus must equal --dim",
                    });
                }
            }
            if mp + mm == 0 {
                return Err(Error::InvalidSignature { m_plus: mp, m_minus: mm, reason: "dimension must be positive" });
            }
            Ok((mp, mm))
        }
    }
}

fn cmd_generate(args: &GenerateArgs) -> Result<i32> {
    let (mp, mm) = resolve_signature(args.dim, args.signature)?;
    if !(args.coupling.is_finite()) {
        return Err(usage("--coupling must be finite"));
    }
    let mut sampler = SystemSampler::new(args.seed).with_coupling(args.coupling);
    let sys = if args.unbroken {
        sampler.unbroken_system(mp, mm, args.max_attempts, args.tol)?
    } else {
        sampler.system(mp, mm)?
    }
    .with_seed(args.seed);

    let d = mp + mm;
    let counts = parameter_table(d);
    let summary = format!(
        "parity params: {}\ncounts (D={d}): parity_max={} h0={} pt={} hermitian={} real_symmetric={}\n",
        count_parity_params(d, mp, mm)?,
        counts.parity_max,
        counts.h0,
        counts.pt,
        counts.hermitian,
        counts.real_symmetric
    );
    match &args.out {
        Some(path) => {
            let mut w = open_out(Some(path))?;
            write_json_to(&mut w, &sys)?;
            w.flush()?;
            print!("{summary}");
        }
        None => {
            write_json_to(io::stdout().lock(), &sys)?;
            eprint!("{summary}");
        }
    }
    Ok(EXIT_OK)
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantResiduals {
    /// `max |Hᵢⱼ − Hⱼᵢ|`
    pub symmetry: f64,
    /// `max |P H* P − H|`
    pub pt_commutator: f64,
    /// `max |P² − I|`
    pub parity_squared: f64,
    pub c_squared: Option<f64>,
    pub c_commutator: Option<f64>,
    pub c_pt_commutator: Option<f64>,
}

/// JSON report written by `analyze`. Keys appear in declaration order.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub dim: usize,
    pub signature: [usize; 2],
    pub parity_params: usize,
    pub eigenvalues: Vec<[f64; 2]>,
    pub phase: &'static str,
    pub real_count: usize,
    pub conjugate_pairs: usize,
    pub signs: Vec<i8>,
    pub pt_norms: Vec<f64>,
    pub residuals: Vec<f64>,
    pub conditions: Vec<f64>,
    pub c_operator: Option<ComplexMatrix>,
    pub invariants: InvariantResiduals,
    pub classes: Vec<MatrixClass>,
    pub h: ComplexMatrix,
    pub p: ComplexMatrix,
}

/// Signature of a validated parity operator, read off its trace.
pub fn parity_signature(p: &ComplexMatrix) -> (usize, usize) {
    let d = p.dim() as f64;
    let plus = ((d + p.trace().re) / 2.0).round().clamp(0.0, d) as usize;
    (plus, p.dim() - plus)
}

pub fn analyze(sys: &PtSystem, tol: f64) -> Result<AnalysisReport> {
    let data: SpectralData = classify_phase(sys, tol)?;
    let summary = data.summary();
    let (h, p) = (sys.h(), sys.p());
    let cop: Option<COperator> = match data.phase {
        Phase::Unbroken => match COperator::from_spectrum(&data, p, tol) {
            Ok(c) => Some(c),
            Err(Error::ExceptionalPoint(_)) => None,
            Err(e) => return Err(e),
        },
        _ => None,
    };
    let res: Option<COperatorResiduals> = cop.as_ref().map(|c| c.residuals(h, p)).transpose()?;
    let (mp, mm) = parity_signature(p);
    Ok(AnalysisReport {
        dim: sys.dim(),
        signature: [mp, mm],
        parity_params: count_parity_params(sys.dim(), mp, mm)?,
        eigenvalues: summary.eigenvalues,
        phase: summary.phase,
        real_count: summary.real_count,
        conjugate_pairs: summary.conjugate_pairs,
        signs: summary.signs,
        pt_norms: data.pt_norms.clone(),
        residuals: summary.residuals,
        conditions: data.conditions.clone(),
        c_operator: cop.map(COperator::into_matrix),
        invariants: InvariantResiduals {
            symmetry: h.max_abs_diff(&h.transpose())?,
            pt_commutator: pt_commutator(h, p, TimeReversal::Conjugation)?.max_abs(),
            parity_squared: p.mul(p)?.max_abs_diff(&ComplexMatrix::identity(p.dim()))?,
            c_squared: res.map(|r| r.squared),
            c_commutator: res.map(|r| r.commutator),
            c_pt_commutator: res.map(|r| r.pt_commutator),
        },
        classes: classify_matrix(h, Some(p), tol)?.into_iter().collect(),
        h: h.clone(),
        p: p.clone(),
    })
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<i32> {
    let sys: PtSystem = read_json(&args.input)?;
    let report = analyze(&sys, args.tol)?;
    let mut w = open_out(args.out.as_deref())?;
    write_json_to(&mut w, &report)?;
    w.flush()?;
    Ok(EXIT_OK)
}

const COUNT_ROWS: [&str; 5] = ["parity", "h0", "pt", "hermitian", "real_symmetric"];

/// Text table with one row per count and one column per dimension.
pub fn counts_table(max_dim: usize) -> String {
    let tables: Vec<[usize; 5]> = (1..=max_dim).map(|d| parameter_table(d).as_array()).collect();
    let mut out = format!("{:<16}", "D");
    for d in 1..=max_dim {
        out += &format!("{d:>6}");
    }
    out.push('\n');
    for (k, name) in COUNT_ROWS.iter().enumerate() {
        out += &format!("{name:<16}");
        for row in &tables {
            out += &format!("{:>6}", row[k]);
        }
        out.push('\n');
    }
    out
}

/// CSV with columns `D,parity,h0,pt,hermitian,real_symmetric`.
pub fn write_counts_csv<W: Write>(writer: W, max_dim: usize) -> Result<()> {
    let mut w = csv_writer(writer);
    let mut header = vec!["D"];
    header.extend(COUNT_ROWS);
    w.write_record(&header)?;
    for d in 1..=max_dim {
        let mut rec = vec![d.to_string()];
        rec.extend(parameter_table(d).as_array().iter().map(|n| n.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_counts(args: &CountsArgs) -> Result<i32> {
    if args.max_dim < 1 {
        return Err(usage("--max-dim must be at least 1"));
    }
    print!("{}", counts_table(args.max_dim));
    if let Some(path) = &args.out {
        let mut w = open_out(Some(path))?;
        write_counts_csv(&mut w, args.max_dim)?;
        w.flush()?;
    }
    Ok(EXIT_OK)
}

/// `lo, lo + step, …` strictly below `hi`. `lo == hi` is an empty grid.
pub fn sweep_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err(usage("range bounds and step must be finite"));
    }
    if step <= 0.0 {
        return Err(usage("range step must be positive"));
    }
    if hi < lo {
        return Err(usage(format!("empty range: hi {hi} is below lo {lo}")));
    }
    let n = ((hi - lo) / step * (1.0 - 1e-12)).ceil() as usize;
    Ok((0..n).map(|k| lo + k as f64 * step).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub eigenvalues: Vec<C64>,
    pub phase: &'static str,
    /// Smallest distance between two eigenvalues.
    pub min_gap: f64,
}

fn sweep_point(sys: &PtSystem, value: f64, tol: f64) -> Result<SweepRow> {
    let data = classify_phase(sys, tol)?;
    let mut values = data.eigenvalues();
    // Snap rounding-level real parts so columns of conjugate pairs keep a
    // consistent order along the grid.
    let grain = 1e-9 * values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let key = |z: &C64| (z.re / grain).round() + 0.0;
    values.sort_by(|a, b| key(a).total_cmp(&key(b)).then(a.im.total_cmp(&b.im)));
    let mut min_gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            min_gap = min_gap.min((values[i] - values[j]).norm());
        }
    }
    Ok(SweepRow { value, eigenvalues: values, phase: data.phase.tag(), min_gap })
}

/// Which parameter a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    R,
    S,
    T,
    Phi,
    Entry(Block, usize, usize),
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r" => return Ok(SweepParam::R),
            "s" => return Ok(SweepParam::S),
            "t" => return Ok(SweepParam::T),
            "phi" => return Ok(SweepParam::Phi),
            _ => {}
        }
        let bad = || usage(format!("unknown sweep parameter {s:?}; use r, s, t, phi or A[i,j], B[i,j], C[i,j]"));
        let block = match s.get(..1) {
            Some("A") => Block::A,
            Some("B") => Block::B,
            Some("C") => Block::C,
            _ => return Err(bad()),
        };
        let inner = s[1..].strip_prefix('[').and_then(|x| x.strip_suffix(']')).ok_or_else(bad)?;
        let (i, j) = inner.split_once(',').ok_or_else(bad)?;
        let i = i.trim().parse().map_err(|_| bad())?;
        let j = j.trim().parse().map_err(|_| bad())?;
        Ok(SweepParam::Entry(block, i, j))
    }
}

/// Sweeps one parameter of the two-level Hamiltonian; rows come back in
/// grid order.
pub fn sweep_two_level(base: TwoByTwoParams, param: SweepParam, grid: &[f64], tol: f64) -> Result<Vec<SweepRow>> {
    grid.par_iter()
        .map(|&x| {
            let mut pr = base;
            match param {
                SweepParam::R => pr.r = x,
                SweepParam::S => pr.s = x,
                SweepParam::T => pr.t = x,
                SweepParam::Phi => pr.phi = x,
                SweepParam::Entry(..) => return Err(usage("block entries need --input")),
            }
            sweep_point(&PtSystem::new(h2(&pr), p2(pr.phi))?, x, tol)
        })
        .collect()
}

/// Sweeps one block entry of a system built from block form and angles.
pub fn sweep_block_entry(sys: &PtSystem, param: SweepParam, grid: &[f64], tol: f64) -> Result<Vec<SweepRow>> {
    let SweepParam::Entry(block, i, j) = param else {
        return Err(usage("systems read from --input are swept over block entries A[i,j], B[i,j] or C[i,j]"));
    };
    let prov = sys.provenance().ok_or_else(|| usage("input system has no provenance; cannot vary block entries"))?;
    let spec = prov.parity_spec()?;
    // Reject a bad index before fanning out.
    prov.blocks.clone().set_entry(block, i, j, 0.0)?;
    grid.par_iter()
        .map(|&x| {
            let mut blocks = prov.blocks.clone();
            blocks.set_entry(block, i, j, x)?;
            sweep_point(&make_pt_system(&blocks, &spec)?, x, tol)
        })
        .collect()
}

/// Columns `value,re_0,im_0,…,phase,min_gap`.
pub fn write_sweep_csv<W: Write>(writer: W, dim: usize, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv_writer(writer);
    let mut header = vec!["value".to_string()];
    for k in 0..dim {
        header.push(format!("re_{k}"));
        header.push(format!("im_{k}"));
    }
    header.push("phase".into());
    header.push("min_gap".into());
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![fmt_f64(row.value)];
        for z in &row.eigenvalues {
            rec.push(fmt_f64(z.re));
            rec.push(fmt_f64(z.im));
        }
        rec.push(row.phase.to_string());
        rec.push(fmt_f64(row.min_gap));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<i32> {
    let param: SweepParam = args.param.parse()?;
    let (lo, hi, step) = args.range;
    let grid = sweep_grid(lo, hi, step)?;
    let (dim, rows) = match &args.input {
        Some(path) => {
            let sys: PtSystem = read_json(path)?;
            (sys.dim(), sweep_block_entry(&sys, param, &grid, args.tol)?)
        }
        None => {
            let base = TwoByTwoParams { r: args.r, s: args.s, t: args.t, phi: args.phi };
            (2, sweep_two_level(base, param, &grid, args.tol)?)
        }
    };
    let mut w = open_out(args.out.as_deref())?;
    write_sweep_csv(&mut w, dim, &rows)?;
    w.flush()?;
    Ok(EXIT_OK)
}

/// Resolves a state spec against a Hamiltonian; `eigen:N` uses the sorted
/// (PT-fixed, when unbroken) eigenvectors.
pub fn resolve_state(spec: StateSpec, h: &ComplexMatrix, eigvecs: &[Vec<C64>]) -> Result<Vec<C64>> {
    let d = h.dim();
    match spec {
        StateSpec::Random(seed) => Ok(SystemSampler::new(seed).complex_vector(d)),
        StateSpec::Basis(n) if n < d => {
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[n] = C64::new(1.0, 0.0);
            Ok(v)
        }
        StateSpec::Eigen(n) if n < d => Ok(eigvecs[n].clone()),
        StateSpec::Basis(n) | StateSpec::Eigen(n) => Err(usage(format!("state index {n} out of range for D={d}"))),
    }
}

fn cmd_evolve(args: &EvolveArgs) -> Result<i32> {
    let file: SystemFile = read_json(&args.input)?;
    let a_spec = args.state.unwrap_or(StateSpec::Random(0));
    let b_spec = args.state_b.unwrap_or(a_spec);
    let scale = file.h.max_abs().max(1.0);
    let symmetric = file.h.dim() == file.p.dim() && file.h.is_symmetric(crate::construction::SYMMETRY_TOL * scale);

    let trace: EvolutionTrace = if symmetric {
        let sys = PtSystem::try_from(file)?;
        let data = classify_phase(&sys, args.tol)?;
        let c = build_c_operator(&sys, args.tol)?;
        let vecs: Vec<Vec<C64>> = data.pairs.into_iter().map(|p| p.vector).collect();
        let a = resolve_state(a_spec, sys.h(), &vecs)?;
        let b = resolve_state(b_spec, sys.h(), &vecs)?;
        unitarity_trace(&sys, &c, &a, &b, args.t_max, args.steps)?
    } else {
        let vecs: Vec<Vec<C64>> = eigendecompose(&file.h, args.tol)?.into_iter().map(|p| p.vector).collect();
        let report = if args.state.is_none() && args.state_b.is_none() {
            nonunitarity_demo(&file.h, &file.p, args.t_max, args.steps)?
        } else {
            let a = resolve_state(a_spec, &file.h, &vecs)?;
            let b = resolve_state(b_spec, &file.h, &vecs)?;
            weighted_trace(&file.h, &file.p, &a, &b, args.t_max, args.steps, BraEvolution::Heisenberg)?
        };
        eprintln!(
            "asymmetric H: weight-matrix inner product, |[W,H]| = {}, verdict {}",
            fmt_f64(report.commutator_norm),
            match report.verdict {
                DemoVerdict::Violation => "violation",
                DemoVerdict::Inconclusive => "inconclusive",
            }
        );
        report.trace
    };

    let mut w = open_out(args.out.as_deref())?;
    trace.write_csv(&mut w)?;
    w.flush()?;
    eprintln!("max drift: {}", fmt_f64(trace.max_drift));
    if trace.max_drift > DRIFT_LIMIT {
        eprintln!("unitarity violated: drift exceeds {}", fmt_f64(DRIFT_LIMIT));
        return Ok(EXIT_UNITARITY);
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsers() {
        assert_eq!(parse_signature("6,2").unwrap(), (6, 2));
        assert!(parse_signature("6").is_err());
        assert_eq!(parse_range("0,2,0.01").unwrap(), (0.0, 2.0, 0.01));
        assert_eq!(parse_state("eigen:1").unwrap(), StateSpec::Eigen(1));
        assert_eq!(parse_state("random:9").unwrap(), StateSpec::Random(9));
        assert!(parse_state("foo:1").is_err());
        assert_eq!("A[0,1]".parse::<SweepParam>().unwrap(), SweepParam::Entry(Block::A, 0, 1));
        assert_eq!("phi".parse::<SweepParam>().unwrap(), SweepParam::Phi);
        assert!("D[0,0]".parse::<SweepParam>().is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(sweep_grid(0.0, 2.0, 0.01).unwrap().len(), 200);
        assert_eq!(sweep_grid(0.0, 1.0, 0.3).unwrap().len(), 4);
        assert!(sweep_grid(1.0, 1.0, 0.1).unwrap().is_empty());
        assert!(sweep_grid(0.0, 1.0, 0.0).is_err());
        assert!(sweep_grid(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn signatures() {
        assert_eq!(resolve_signature(Some(5), None).unwrap(), (3, 2));
        assert_eq!(resolve_signature(None, Some((6, 2))).unwrap(), (6, 2));
        assert!(resolve_signature(Some(4), Some((2, 1))).is_err());
        assert!(resolve_signature(None, None).is_err());
    }

    #[test]
    fn counts_output() {
        let mut buf = Vec::new();
        write_counts_csv(&mut buf, 2).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "D,parity,h0,pt,hermitian,real_symmetric\n1,0,1,1,1,1\n2,1,3,4,4,3\n"
        );
        assert!(counts_table(6).lines().count() == 6);
    }
}
