//! Command-line front end. [`run`] returns the process exit code:
//! 0 success, 1 usage or input error, 2 a check or verification failed,
//! 3 the search did not converge.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyonforge_core::assembly::{
    assemble_ccz, assemble_controlled_phase, convert_registers, evaluate_gate, ConversionDirection, GateReport,
};
use anyonforge_core::braid::{braid_relation_residual, evaluate};
use anyonforge_core::code::{multi_qubit_code, QubitCharges};
use anyonforge_core::fusion::FusionBasis;
use anyonforge_core::grouping::Grouping;
use anyonforge_core::search::{describe, SearchConfig, SynthesisResult};
use anyonforge_core::target::{
    make_target_b1, make_target_b3, make_target_e, make_target_not, make_target_p, make_target_unitary, SynthesisTarget,
};
use anyonforge_core::{AnyonModel, Charge, C64};
use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

use crate::cache::{self, CacheStatus};
use crate::error::{Error, Result};
use crate::export;
use crate::files::{curve_csv, parse_scheme, parse_word, BraidFile};
use crate::json::{self, Json};
use crate::parallel::{default_workers, search_parallel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Residual limit for `check`.
const CHECK_TOLERANCE: f64 = 1e-9;
/// Slack when comparing an assembled gate with its component budget.
const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "anyonforge",
    version,
    about = "SU(2)_k anyons: fusion spaces, qubit codes and braid synthesis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Charges, quantum dimensions and fusion rules of SU(2)_k.
    Model(ModelArgs),
    /// Pentagon, hexagon and braid-relation residuals.
    Check(CheckArgs),
    /// Fusion-tree basis of a row of anyons, optionally with a braid matrix.
    Basis(BasisArgs),
    /// Qubit register made of anyons.
    Code(CodeArgs),
    /// Exhaustive braid search for a gate.
    Synth(SynthArgs),
    /// CZ, CCZ or register conversion from braid files.
    Assemble(AssembleArgs),
    /// Recompute a braid file and compare with the stored values.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub k: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub k: u32,
    /// Largest strand count for the braid relations.
    #[arg(long, default_value_t = 6)]
    pub max_strands: usize,
    /// Perturb one F entry before checking (the check must then fail).
    #[arg(long, hide = true)]
    pub corrupt_cache: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    #[arg(long)]
    pub k: u32,
    /// Leaf charges as twice-spin integers, e.g. 1,1,1,1.
    #[arg(long, value_delimiter = ',', required = true)]
    pub leaves: Vec<u32>,
    /// Total charge, twice-spin.
    #[arg(long, default_value_t = 0)]
    pub total: u32,
    /// Also print the matrix of this braid, e.g. "s1 s2' s1".
    #[arg(long)]
    pub word: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value_t = 1)]
    pub qubits: usize,
    /// Outer anyon charge (twice-spin); defaults depend on k.
    #[arg(long)]
    pub a: Option<u32>,
    /// Paired anyon charge (twice-spin).
    #[arg(long)]
    pub b: Option<u32>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub k: u32,
    /// P, B1, B3, E, NOT, or a JSON file holding a 2x2 "matrix".
    #[arg(long)]
    pub target: String,
    /// Single-qubit code for NOT and matrix targets: three-anyon or four-anyon.
    #[arg(long, default_value = "three-anyon")]
    pub scheme: String,
    #[arg(long, default_value_t = 12)]
    pub max_length: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long = "phase-tol", default_value_t = 1e-9)]
    pub phase_tol: f64,
    /// Only move the target's mobile block (a1 for P, B1, B3).
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub weave_only: bool,
    /// Enumerate far-commuting letters in one order only.
    #[arg(long)]
    pub dedup: bool,
    /// Search threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Also write the distance-vs-length curve as CSV here.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Gate {
    Cz,
    Ccz,
    Convert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Merge,
    Split,
    RoundTrip,
}

#[derive(Debug, Args)]
pub struct AssembleArgs {
    #[arg(long, value_enum)]
    pub gate: Gate,
    /// Required to match the level stored in the braid files, if given.
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub p: Option<PathBuf>,
    #[arg(long)]
    pub b1: Option<PathBuf>,
    #[arg(long)]
    pub b3: Option<PathBuf>,
    #[arg(long)]
    pub e: Option<PathBuf>,
    /// CCZ without its last three braids.
    #[arg(long)]
    pub truncated: bool,
    #[arg(long, value_enum, default_value_t = Direction::RoundTrip)]
    pub direction: Direction,
    /// Write the assembled braid (cz and ccz only) as a braid file.
    #[arg(long)]
    pub braid_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Model(a) => cmd_model(a, stdout, stderr),
        Command::Check(a) => cmd_check(a, stdout, stderr),
        Command::Basis(a) => cmd_basis(a, stdout, stderr),
        Command::Code(a) => cmd_code(a, stdout, stderr),
        Command::Synth(a) => cmd_synth(a, stdout, stderr),
        Command::Assemble(a) => cmd_assemble(a, stdout, stderr),
        Command::Verify(a) => cmd_verify(a, stdout, stderr),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn emit(output: &Output, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &output.out {
        Some(p) => write_file(p, text),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn no_csv(output: &Output) -> Result<()> {
    if output.format == Format::Csv {
        return Err(Error::Usage("csv output is only available for synthesis curves".into()));
    }
    Ok(())
}

fn model(k: u32, stderr: &mut dyn Write) -> Result<AnyonModel> {
    let (m, status) = cache::load_model(k)?;
    match status {
        CacheStatus::Replaced { path, reason } => {
            let _ = writeln!(stderr, "warning: rebuilt {} ({reason})", path.display());
        }
        CacheStatus::Unwritable { path, reason } => {
            let _ = writeln!(stderr, "warning: could not write {} ({reason})", path.display());
        }
        _ => {}
    }
    Ok(m)
}

fn charge(model: &AnyonModel, twice_spin: u32) -> Result<Charge> {
    Ok(model.charge(twice_spin)?)
}

fn cmd_model(a: ModelArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    no_csv(&a.output)?;
    let m = model(a.k, stderr)?;
    let text = match a.output.format {
        Format::Text => export::model_text(&m)?,
        _ => export::model_json(&m)?.render(),
    };
    emit(&a.output, &text, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_check(a: CheckArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    no_csv(&a.output)?;
    let mut m = model(a.k, stderr)?;
    if a.corrupt_cache {
        let mut symbols = m.symbols().clone();
        let labels = symbols
            .f_blocks()
            .find(|(_, b)| b.rows.len() > 1)
            .map(|(l, _)| l)
            .ok_or_else(|| Error::Usage("no F block to corrupt at this level".into()))?;
        symbols.perturb_f(labels, 0, 0, C64::new(1e-3, 0.0))?;
        m = AnyonModel::with_symbols(symbols)?;
    }
    let s = m.symbols();
    let charges: Vec<Charge> = [Charge::HALF, Charge::ONE]
        .into_iter()
        .filter(|c| c.twice_spin() <= a.k)
        .collect();
    let (braid, relations) = braid_relation_residual(&m, a.max_strands, &charges)?;
    let rows = [
        ("pentagon", s.pentagon_residual()),
        ("hexagon", s.hexagon_residual()),
        ("f_unitarity", s.max_f_unitarity_residual()),
        ("r_modulus", s.max_r_modulus_residual()),
        ("braid_relations", braid),
    ];
    let pass = rows.iter().all(|(_, r)| *r < CHECK_TOLERANCE);
    let text = match a.output.format {
        Format::Text => {
            let mut t = format!("SU(2)_{} consistency (limit {CHECK_TOLERANCE:e})\n", a.k);
            for (name, r) in rows {
                let _ = writeln!(
                    t,
                    "{name:<16} {r:.3e} {}",
                    if r < CHECK_TOLERANCE { "ok" } else { "FAIL" }
                );
            }
            let _ = writeln!(t, "{relations} braid relations checked");
            t
        }
        _ => {
            let mut j = Json::object([("k", Json::uint(a.k))]);
            for (name, r) in rows {
                j.push(name, Json::Float(r));
            }
            j.push("braid_relations_checked", Json::uint(relations));
            j.push("tolerance", Json::Float(CHECK_TOLERANCE));
            j.push("pass", Json::Bool(pass));
            j.render()
        }
    };
    emit(&a.output, &text, stdout)?;
    Ok(if pass { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_basis(a: BasisArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    no_csv(&a.output)?;
    let m = model(a.k, stderr)?;
    let leaves = a.leaves.iter().map(|&c| charge(&m, c)).collect::<Result<Vec<_>>>()?;
    let basis = FusionBasis::enumerate(&m, &leaves, charge(&m, a.total)?)?;
    let operator = match &a.word {
        Some(text) => {
            let w = parse_word(leaves.len(), text)?;
            let e = evaluate(&m, &basis, &Grouping::singletons(leaves.len()), &w)?;
            Some((w, e))
        }
        None => None,
    };
    let text = match a.output.format {
        Format::Text => {
            let mut t = format!("{} trees\n", basis.dim());
            for tree in basis.trees() {
                let names: Vec<String> = tree.internals.iter().map(Charge::to_string).collect();
                let _ = writeln!(t, "  {}", names.join(" "));
            }
            if let Some((w, e)) = &operator {
                let _ = writeln!(t, "braid {w}:");
                for r in 0..e.op.matrix.rows() {
                    let row: Vec<String> = (0..e.op.matrix.cols())
                        .map(|c| {
                            let z = e.op.matrix[(r, c)];
                            format!("{:+.6}{:+.6}i", z.re, z.im)
                        })
                        .collect();
                    let _ = writeln!(t, "  {}", row.join("  "));
                }
            }
            t
        }
        _ => {
            let mut j = export::basis_json(&m, &basis);
            if let Some((w, e)) = &operator {
                j.push(
                    "braid",
                    export::operator_json(&w.to_string(), &basis, &e.op.target, &e.op.matrix),
                );
            }
            j.render()
        }
    };
    emit(&a.output, &text, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_code(a: CodeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    no_csv(&a.output)?;
    let m = model(a.k, stderr)?;
    let mut charges = QubitCharges::for_level(a.k);
    if let Some(x) = a.a {
        charges.a = charge(&m, x)?;
    }
    if let Some(x) = a.b {
        charges.b = charge(&m, x)?;
    }
    let code = multi_qubit_code(&m, a.qubits, charges)?;
    let text = match a.output.format {
        Format::Text => {
            let mut t = format!(
                "{} qubit(s), a = {}, b = {}: {} states, {} computational, {} outside\n",
                code.qubit_count(),
                charges.a,
                charges.b,
                code.dim(),
                code.computational().len(),
                code.non_computational().len()
            );
            for (bits, i) in code.computational() {
                let bits: String = bits.iter().map(|b| char::from(b'0' + b)).collect();
                let _ = writeln!(t, "  |{bits}> = tree {i}");
            }
            t
        }
        _ => export::code_json(&m, &code).render(),
    };
    emit(&a.output, &text, stdout)?;
    Ok(EXIT_OK)
}

fn synth_target(m: &AnyonModel, a: &SynthArgs) -> Result<SynthesisTarget> {
    let scheme = parse_scheme(&a.scheme).map_err(|e| Error::Usage(e.to_string()))?;
    Ok(match a.target.as_str() {
        "P" => make_target_p(m)?,
        "B1" => make_target_b1(m)?,
        "B3" => make_target_b3(m)?,
        "E" => make_target_e(m)?,
        "NOT" => make_target_not(m, scheme)?,
        path => {
            let p = Path::new(path);
            let text = std::fs::read_to_string(p).map_err(|_| {
                Error::Usage(format!(
                    "unknown target {path:?} (not P, B1, B3, E, NOT or a readable file)"
                ))
            })?;
            let v = json::parse(&text)?;
            let matrix = json::as_matrix(json::field(&v, "matrix")?, "matrix")?;
            let id = match v.get("name") {
                Some(n) => json::as_str(n, "name")?.to_string(),
                None => p.file_stem().map_or("U".into(), |s| s.to_string_lossy().into_owned()),
            };
            make_target_unitary(m, &id, scheme, matrix)?
        }
    })
}

fn cmd_synth(a: SynthArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let m = model(a.k, stderr)?;
    let target = synth_target(&m, &a)?;
    let config = SearchConfig {
        max_length: a.max_length,
        tolerance: a.tol,
        phase_tolerance: a.phase_tol,
        weave_only: a.weave_only,
        dedup: a.dedup,
    };
    config.validate()?;
    let workers = a.workers.unwrap_or_else(default_workers).max(1);
    let (result, seconds) = search_parallel(&target, &config, workers)?;
    let file = BraidFile::from_result(&target, &result, Some(&config));
    let csv = curve_csv(&result.curve, &seconds);
    if let Some(p) = &a.curve {
        write_file(p, &csv)?;
    }
    let text = match a.output.format {
        Format::Json => file.to_json().render(),
        Format::Csv => csv,
        Format::Text => synth_text(&result),
    };
    emit(&a.output, &text, stdout)?;
    Ok(if result.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn synth_text(r: &SynthesisResult) -> String {
    let mut t = format!("target {}\nbraid {} ({} letters)\n", r.target, r.braid, r.braid.len());
    let _ = writeln!(
        t,
        "distance {:.6e}\nleakage {:.6e}\nconverged {}",
        r.distance, r.leakage, r.converged
    );
    for (label, z) in &r.sector_phases {
        let _ = writeln!(t, "  {label}: {:+.6} {:+.6}i", z.re, z.im);
    }
    for p in &r.curve {
        let _ = writeln!(
            t,
            "  L={:<3} best {:.6e} nodes {}",
            p.length, p.best_distance, p.nodes_explored
        );
    }
    t
}

/// Loads a component braid file and re-evaluates it, so that assembly uses
/// the braid's actual distance rather than the stored one.
fn component(
    path: &Option<PathBuf>,
    name: &str,
    k: &mut Option<u32>,
    stderr: &mut dyn Write,
) -> Result<(AnyonModel, SynthesisResult)> {
    let path = path
        .as_ref()
        .ok_or_else(|| Error::Usage(format!("--{} is required for this gate", name.to_lowercase())))?;
    let f = BraidFile::read(path)?;
    match k {
        Some(level) if *level != f.k => {
            return Err(Error::Usage(format!(
                "{} is for k = {}, not k = {level}",
                path.display(),
                f.k
            )));
        }
        _ => *k = Some(f.k),
    }
    if f.target != name {
        return Err(Error::Usage(format!(
            "{} holds a {} braid, expected {name}",
            path.display(),
            f.target
        )));
    }
    let m = model(f.k, stderr)?;
    let t = f.target(&m)?;
    let r = describe(&t, &f.word)?;
    Ok((m, r))
}

fn cmd_assemble(a: AssembleArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    no_csv(&a.output)?;
    let mut k = a.k;
    let report: GateReport = match a.gate {
        Gate::Cz => {
            let (m, p) = component(&a.p, "P", &mut k, stderr)?;
            assemble_controlled_phase(&m, &p)?
        }
        Gate::Ccz => {
            let (m, b1) = component(&a.b1, "B1", &mut k, stderr)?;
            let (_, p) = component(&a.p, "P", &mut k, stderr)?;
            let (_, b3) = component(&a.b3, "B3", &mut k, stderr)?;
            assemble_ccz(&m, &b1, &p, &b3, a.truncated)?
        }
        Gate::Convert => {
            let (m, e) = component(&a.e, "E", &mut k, stderr)?;
            let dir = match a.direction {
                Direction::Merge => ConversionDirection::Merge,
                Direction::Split => ConversionDirection::Split,
                Direction::RoundTrip => ConversionDirection::RoundTrip,
            };
            convert_registers(&m, dir, &e)?
        }
    };
    let k = k.expect("set by the first component");
    if let Some(path) = &a.braid_out {
        if a.gate == Gate::Convert {
            return Err(Error::Usage("--braid-out is only available for cz and ccz".into()));
        }
        write_file(path, &BraidFile::from_gate(k, &report).to_json().render())?;
    }
    let text = match a.output.format {
        Format::Text => export::gate_report_text(&report, BOUND_SLACK),
        _ => export::gate_report_json(k, &report, BOUND_SLACK).render(),
    };
    emit(&a.output, &text, stdout)?;
    let phases_ok = a.gate != Gate::Ccz || report.phases_cancel(BOUND_SLACK);
    Ok(if report.within_bound(BOUND_SLACK) && phases_ok {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn cmd_verify(a: VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    no_csv(&a.output)?;
    let f = BraidFile::read(&a.file)?;
    let m = model(f.k, stderr)?;
    let (distance, leakage) = match f.target.as_str() {
        gate @ ("cz" | "ccz" | "ccz-truncated") => {
            let qubits = if gate == "cz" { 2 } else { 3 };
            let code = multi_qubit_code(&m, qubits, QubitCharges::for_level(f.k))?;
            if f.leaves != code.basis().leaves() || f.grouping != Grouping::singletons(f.leaves.len()).blocks() {
                return Err(Error::Format(format!(
                    "{gate} braids act on the {qubits}-qubit register's single strands"
                )));
            }
            evaluate_gate(&m, gate, &f.word)?
        }
        _ => {
            let r = describe(&f.target(&m)?, &f.word)?;
            (r.distance, r.leakage)
        }
    };
    let mut deviation = (distance - f.distance).abs();
    if let Some(l) = f.leakage {
        deviation = deviation.max((leakage - l).abs());
    }
    if distance.is_nan() {
        deviation = f64::INFINITY;
    }
    let matches = deviation <= a.tol;
    let text = match a.output.format {
        Format::Text => format!(
            "{} braid of {} letters: distance {:.6e} (stored {:.6e}), leakage {:.6e}, deviation {:.3e}: {}\n",
            f.target,
            f.word.len(),
            distance,
            f.distance,
            leakage,
            deviation,
            if matches { "ok" } else { "MISMATCH" }
        ),
        _ => {
            let mut j = Json::object([
                ("target", Json::str(f.target.clone())),
                ("k", Json::uint(f.k)),
                ("length", Json::uint(f.word.len())),
                ("stored_distance", Json::Float(f.distance)),
                ("distance", Json::Float(distance)),
            ]);
            if let Some(l) = f.leakage {
                j.push("stored_leakage", Json::Float(l));
            }
            j.push("leakage", Json::Float(leakage));
            j.push("deviation", Json::Float(deviation));
            j.push("tolerance", Json::Float(a.tol));
            j.push("matches", Json::Bool(matches));
            j.render()
        }
    };
    emit(&a.output, &text, stdout)?;
    Ok(if matches { EXIT_OK } else { EXIT_FAILED })
}
