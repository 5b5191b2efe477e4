//! Command-line front end.
//!
//! Every command builds a [`Report`] holding a human-readable text and a JSON
//! document. With `--machine` the JSON goes to stdout and the text to stderr;
//! otherwise only the text is printed, on stdout.

pub mod statefile;

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::activation::{
    entanglement_maxcorr, partial_trace, run_protocol, verify_maximally_correlated, Subsystem,
};
use crate::fock::{FockBasis, Statistics};
use crate::lift::SingleParticleUnitary;
use crate::quantumness::{
    classify, quantumness, quantumness_oracle, von_neumann_entropy, OptimizerConfig,
};
use crate::CMatrix;
use statefile::{parse_state_file, parse_unitary, ParseError, StateFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Off-diagonal magnitude below which a joint output counts as diagonal. Loose
/// enough to absorb the residue of an optimized `V`.
const DIAGONAL_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "fockcorr",
    version,
    about = "Quantumness of correlations for indistinguishable fermions and bosons"
)]
pub struct Cli {
    /// Print a JSON document on stdout and the human report on stderr.
    #[arg(long, global = true)]
    pub machine: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the occupation basis with its indices.
    Basis(BasisArgs),
    /// Minimize the single-particle measurement disturbance.
    Quantumness(QuantumnessArgs),
    /// Run the system-apparatus coupling and report the generated entanglement.
    Activate(ActivateArgs),
    /// Place a state in the C ⊂ P ⊂ U ⊂ Q hierarchy.
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("stats").required(true).args(["fermionic", "bosonic"])))]
pub struct BasisArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub fermionic: bool,
    #[arg(long)]
    pub bosonic: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Nelder-Mead iterations per restart.
    #[arg(long, default_value_t = 20_000)]
    pub max_iterations: usize,
}

impl OptimizerArgs {
    pub fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts.max(1),
            max_iterations: self.max_iterations.max(1),
            tol: self.tol,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct QuantumnessArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// Also report the minimum over this many Haar-random unitaries.
    #[arg(long, default_value_t = 0)]
    pub oracle_samples: usize,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("measurement").required(true).args(["v_matrix", "v_optimal"])))]
pub struct ActivateArgs {
    pub file: PathBuf,
    /// File with the single-particle unitary, one row per line as `re im` pairs.
    #[arg(long)]
    pub v_matrix: Option<PathBuf>,
    /// Use the unitary that minimizes the disturbance.
    #[arg(long)]
    pub v_optimal: bool,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug)]
pub enum CliError {
    Read(PathBuf, io::Error),
    Parse(PathBuf, ParseError),
    Input(String),
    Numerical(crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read(..) | CliError::Parse(..) | CliError::Input(_) => EXIT_PARSE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Read(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Parse(p, e) => write!(f, "{}:{}:{}: {}", p.display(), e.line, e.column, e.message),
            CliError::Input(msg) => f.write_str(msg),
            CliError::Numerical(e) => write!(f, "numerical error: {e}"),
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Numerical(e)
    }
}

pub struct Report {
    pub human: String,
    pub machine: Value,
    pub warnings: Vec<String>,
}

/// Runs a parsed command line, writing to the given streams. Returns the exit
/// code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Basis(a) => cmd_basis(a),
        Command::Quantumness(a) => cmd_quantumness(a),
        Command::Activate(a) => cmd_activate(a),
        Command::Classify(a) => cmd_classify(a),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    for w in &report.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let written = if cli.machine {
        let doc = serde_json::to_string_pretty(&report.machine).expect("json values serialize");
        writeln!(out, "{doc}").and_then(|_| err.write_all(report.human.as_bytes()))
    } else {
        out.write_all(report.human.as_bytes())
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_PARSE
        }
    }
}

fn load_state(path: &Path) -> Result<StateFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Read(path.to_path_buf(), e))?;
    parse_state_file(&text).map_err(|e| CliError::Parse(path.to_path_buf(), e))
}

fn load_unitary(path: &Path, d: usize) -> Result<SingleParticleUnitary, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Read(path.to_path_buf(), e))?;
    let v = parse_unitary(&text).map_err(|e| CliError::Parse(path.to_path_buf(), e))?;
    if v.d() != d {
        return Err(CliError::Input(format!(
            "{}: unitary is {}x{}, state has d = {d}",
            path.display(),
            v.d(),
            v.d()
        )));
    }
    Ok(v)
}

fn matrix_json(m: &CMatrix) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    json!(rows)
}

fn matrix_text(m: &CMatrix) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        s.push_str("  ");
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            let _ = write!(s, " {:>10.6}{:+.6}i", z.re, z.im);
        }
        s.push('\n');
    }
    s
}

fn header(sf: &StateFile) -> (String, Value) {
    let b = &sf.basis;
    let kind = match sf.representation() {
        statefile::Representation::Pure => "pure",
        statefile::Representation::Mixed => "mixed",
    };
    let text = format!(
        "state: {} ({}, d = {}, n = {}, dimension {}, {})\n",
        sf.label.as_deref().unwrap_or("-"),
        b.statistics(),
        b.d(),
        b.n(),
        b.dim(),
        kind
    );
    let value = json!({
        "label": sf.label,
        "statistics": b.statistics(),
        "d": b.d(),
        "n": b.n(),
        "dimension": b.dim(),
        "representation": kind,
    });
    (text, value)
}

pub fn cmd_basis(a: &BasisArgs) -> Result<Report, CliError> {
    let stats = if a.fermionic {
        Statistics::Fermionic
    } else {
        Statistics::Bosonic
    };
    let basis = FockBasis::new(a.d, a.n, stats).map_err(|e| CliError::Input(e.to_string()))?;
    let mut human = String::new();
    let mut states = Vec::with_capacity(basis.dim());
    for (i, k) in basis.states().iter().enumerate() {
        let _ = writeln!(human, "{i} : {k}");
        states.push(json!({ "index": i, "modes": k.modes() }));
    }
    let machine = json!({
        "command": "basis",
        "statistics": stats,
        "d": a.d,
        "n": a.n,
        "dimension": basis.dim(),
        "states": states,
    });
    Ok(Report {
        human,
        machine,
        warnings: Vec::new(),
    })
}

#[derive(Serialize)]
struct RestartRow {
    index: usize,
    value: f64,
    iterations: usize,
}

pub fn cmd_quantumness(a: &QuantumnessArgs) -> Result<Report, CliError> {
    let sf = load_state(&a.file)?;
    let rho = sf.density();
    let cfg = a.optimizer.config();
    let mut report = quantumness(&rho, &sf.basis, &cfg)?;
    if a.oracle_samples > 0 {
        report.oracle_value = Some(quantumness_oracle(&rho, &sf.basis, a.oracle_samples, cfg.seed)?);
    }

    let (mut human, state) = header(&sf);
    let _ = writeln!(human, "Q = {:.9} nats", report.q_value);
    let _ = writeln!(human, "converged: {}", if report.converged { "yes" } else { "no" });
    let _ = writeln!(human, "argmin V:");
    human.push_str(&matrix_text(report.argmin_v.matrix()));
    let _ = writeln!(human, "restart  value            iterations");
    let rows: Vec<RestartRow> = report
        .restart_values
        .iter()
        .zip(&report.restart_iterations)
        .enumerate()
        .map(|(index, (&value, &iterations))| RestartRow {
            index,
            value,
            iterations,
        })
        .collect();
    for r in &rows {
        let _ = writeln!(human, "{:>7}  {:<15.9e}  {}", r.index, r.value, r.iterations);
    }
    if let Some(o) = report.oracle_value {
        let _ = writeln!(human, "oracle ({} Haar samples): {o:.9}", a.oracle_samples);
    }

    let machine = json!({
        "command": "quantumness",
        "state": state,
        "config": {
            "restarts": cfg.restarts,
            "max_iterations": cfg.max_iterations,
            "tol": cfg.tol,
            "seed": cfg.seed,
        },
        "q_value": report.q_value,
        "converged": report.converged,
        "evaluations": report.evaluations,
        "argmin_v": matrix_json(report.argmin_v.matrix()),
        "restarts": rows,
        "oracle_samples": a.oracle_samples,
        "oracle_value": report.oracle_value,
    });
    Ok(Report {
        human,
        machine,
        warnings: sf.warnings.clone(),
    })
}

pub fn cmd_activate(a: &ActivateArgs) -> Result<Report, CliError> {
    let sf = load_state(&a.file)?;
    let rho = sf.density();
    let (v, source) = match &a.v_matrix {
        Some(path) => (load_unitary(path, sf.basis.d())?, "file"),
        None => {
            let report = quantumness(&rho, &sf.basis, &a.optimizer.config())?;
            (report.argmin_v, "optimal")
        }
    };
    let js = run_protocol(&rho, &v, &sf.basis)?;
    let check = verify_maximally_correlated(&js);
    let entanglement = entanglement_maxcorr(&js)?;
    let system = partial_trace(&js, Subsystem::System);
    let apparatus = partial_trace(&js, Subsystem::Apparatus);
    let system_spectrum = system.spectrum();
    let apparatus_spectrum = apparatus.spectrum();
    let m = js.matrix();
    let mut off_diagonal = 0.0f64;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if r != c {
                off_diagonal = off_diagonal.max(m[(r, c)].norm());
            }
        }
    }
    let diagonal = off_diagonal <= DIAGONAL_TOL;
    let joint_entropy = von_neumann_entropy(js.state());
    let system_entropy = von_neumann_entropy(&system);

    let (mut human, state) = header(&sf);
    let _ = writeln!(human, "V ({source}):");
    human.push_str(&matrix_text(v.matrix()));
    let _ = writeln!(human, "entanglement = {entanglement:.9} nats");
    let _ = writeln!(
        human,
        "maximally correlated: {} (largest off-pattern entry {:.3e})",
        if check.holds { "yes" } else { "no" },
        check.max_off_pattern
    );
    let _ = writeln!(
        human,
        "diagonal output (classically correlated): {} (largest off-diagonal entry {:.3e})",
        if diagonal { "yes" } else { "no" },
        off_diagonal
    );
    let _ = writeln!(human, "S(joint) = {joint_entropy:.9}, S(system) = {system_entropy:.9}");
    let fmt_spectrum = |s: &[f64]| {
        s.iter()
            .map(|x| format!("{x:.9}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(human, "system spectrum: {}", fmt_spectrum(&system_spectrum));
    let _ = writeln!(human, "apparatus spectrum: {}", fmt_spectrum(&apparatus_spectrum));

    let machine = json!({
        "command": "activate",
        "state": state,
        "v_source": source,
        "v": matrix_json(v.matrix()),
        "entanglement": entanglement,
        "max_corr": check,
        "diagonal_output": diagonal,
        "max_off_diagonal": off_diagonal,
        "joint_entropy": joint_entropy,
        "system_entropy": system_entropy,
        "system_spectrum": system_spectrum,
        "apparatus_spectrum": apparatus_spectrum,
    });
    Ok(Report {
        human,
        machine,
        warnings: sf.warnings.clone(),
    })
}

pub fn cmd_classify(a: &ClassifyArgs) -> Result<Report, CliError> {
    let sf = load_state(&a.file)?;
    let rho = sf.density();
    let cfg = a.optimizer.config();
    let report = classify(&rho, &sf.basis, &cfg)?;

    let (mut human, state) = header(&sf);
    let _ = writeln!(human, "class: {}", report.class.label());
    let _ = writeln!(human, "Q = {:.9} nats", report.quantumness.q_value);
    match report.slater_rank {
        Some(r) => {
            let _ = writeln!(human, "slater rank: {r}");
        }
        None => {
            let _ = writeln!(human, "slater rank: n/a");
        }
    }
    if let Some(w) = &report.classical_witness {
        let _ = writeln!(human, "condensate modes (columns of V):");
        human.push_str(&matrix_text(w.matrix()));
    }

    let machine = json!({
        "command": "classify",
        "state": state,
        "class": report.class.label(),
        "q_value": report.quantumness.q_value,
        "q_converged": report.quantumness.converged,
        "slater_rank": report.slater_rank,
        "pure": report.is_pure,
        "classical_witness": report.classical_witness.as_ref().map(|w| matrix_json(w.matrix())),
        "seed": cfg.seed,
    });
    Ok(Report {
        human,
        machine,
        warnings: sf.warnings.clone(),
    })
}
