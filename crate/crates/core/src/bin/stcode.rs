use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use stcode::decode::{Experiment, NoiseModel, DEFAULT_TABLE_BUDGET};
use stcode::outcome_code::{self, compute_outcome_code, linearize};
use stcode::sparsify::{low_weight_stabilizers, SearchOptions, SearchReport};
use stcode::spacetime_code::{self, logical_generators, SpacetimeCode};
use stcode::{parse_circuit, Circuit, Error, SCHEMA_VERSION};

#[derive(Parser)]
#[command(name = "stcode", version, about = "Outcome codes, spacetime codes and circuit decoding for Clifford circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a circuit file.
    Validate {
        /// Circuit file, or `-` for stdin.
        input: PathBuf,
    },
    /// Outcome code checks and output stabilizer group.
    Checks {
        input: PathBuf,
        #[arg(long)]
        json: bool,
        /// Write the sign-fixed circuit to this path (`-` for stdout).
        #[arg(long, value_name = "PATH")]
        emit_linearized: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Spacetime code generators, parameters and logical operators.
    Spacetime {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Shorthand for `--format alist`.
        #[arg(long, conflicts_with_all = ["format", "mm", "json"])]
        alist: bool,
        /// Shorthand for `--format mm`.
        #[arg(long, conflicts_with_all = ["format", "json"])]
        mm: bool,
        /// Shorthand for `--format json`.
        #[arg(long, conflicts_with = "format")]
        json: bool,
        /// Include logical operator generators in JSON or text output.
        #[arg(long)]
        logicals: bool,
        /// Recheck commutation, forward/backward agreement and parameters.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Low-weight connected generators of the spacetime code.
    Sparsify {
        input: PathBuf,
        #[arg(long, short = 'M')]
        max_weight: usize,
        /// Largest restricted generating set enumerated per ball.
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..=40))]
        budget: u64,
        /// Skip balls over budget instead of failing.
        #[arg(long)]
        skip_over_budget: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo of the lookup decoder under circuit noise.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Write the main output here instead of stdout.
    #[arg(long, short = 'o', value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    input: PathBuf,
    /// Fault probability for every location class.
    #[arg(long, value_parser = probability)]
    p: Option<f64>,
    #[arg(long, value_parser = probability)]
    p_unitary: Option<f64>,
    #[arg(long, value_parser = probability)]
    p_measurement: Option<f64>,
    #[arg(long, value_parser = probability)]
    p_idle: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Largest number of fault events enumerated by the lookup table.
    #[arg(long, default_value_t = 2)]
    max_faults: usize,
    /// Largest number of fault configurations enumerated.
    #[arg(long, default_value_t = DEFAULT_TABLE_BUDGET)]
    table_budget: u64,
    /// Write the lookup table in binary form to this path.
    #[arg(long, value_name = "PATH")]
    dump_table: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Alist,
    Mm,
}

fn probability(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("{p} is not in [0, 1]"))
    }
}

enum Failure {
    Io(String),
    Lib(Error),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Lib(Error::Syntax { .. } | Error::PauliSyntax { .. }) => 2,
            Failure::Lib(Error::Invalid(_) | Error::Precondition(_)) => 3,
            Failure::Lib(Error::Budget(_)) => 4,
            Failure::Lib(_) | Failure::Invariant(_) => 5,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }
}

fn load(path: &Path) -> Result<Circuit, Failure> {
    let text = read_input(path)?;
    Ok(parse_circuit(&text)?)
}

fn write_to(path: Option<&Path>, data: &[u8]) -> CmdResult {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::write(p, data).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut out = io::stdout().lock();
            out.write_all(data)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn cmd_validate(input: &Path) -> CmdResult {
    let c = load(input)?;
    let text = format!(
        "ok: {} qubits, depth {}, {} operations, {} measurements\n",
        c.n(),
        c.depth(),
        c.ops().len(),
        c.num_measurements()
    );
    write_to(None, text.as_bytes())
}

fn cmd_checks(input: &Path, json: bool, emit: Option<&Path>, out: &OutputArgs) -> CmdResult {
    let c = load(input)?;
    let (code, group) = compute_outcome_code(&c);
    let report = if json {
        with_newline(outcome_code::to_json(&code, &group))
    } else {
        let mut s = format!("m = {}\nk = {}\nchecks = {}\n", code.m(), code.k(), code.r());
        for (i, ch) in code.checks().iter().enumerate() {
            s += &format!("check {i}: u = {} b = {}\n", ch.u, ch.b as u8);
        }
        s += &format!("output stabilizers = {}\n", group.generators.len());
        for g in &group.generators {
            s += &format!("  {}\n", g.op);
        }
        s += &format!("output logical pairs = {}\n", group.logicals.len());
        for (a, b) in &group.logicals {
            s += &format!("  {a} {b}\n");
        }
        s
    };
    write_to(out.output.as_deref(), report.as_bytes())?;
    if let Some(p) = emit {
        write_to(Some(p), linearize(&c).to_text().as_bytes())?;
    }
    Ok(())
}

fn build_code(c: &Circuit) -> Result<(Circuit, outcome_code::OutcomeCode, SpacetimeCode), Failure> {
    let lin = linearize(c);
    let (oc, _) = compute_outcome_code(&lin);
    let code = SpacetimeCode::build(&lin, &oc)?;
    Ok((lin, oc, code))
}

fn check_verify(lin: &Circuit, code: &SpacetimeCode) -> CmdResult {
    let problems = spacetime_code::verify(lin, code);
    if problems.is_empty() {
        eprintln!("verify: ok");
        Ok(())
    } else {
        Err(Failure::Invariant(problems.join("\n")))
    }
}

fn cmd_spacetime(
    input: &Path,
    format: Format,
    logicals: bool,
    verify: bool,
    out: &OutputArgs,
) -> CmdResult {
    let c = load(input)?;
    let (lin, oc, code) = build_code(&c)?;
    if verify {
        check_verify(&lin, &code)?;
    }
    let logs = if logicals { Some(logical_generators(&lin, &oc)?) } else { None };
    let text = match format {
        Format::Alist => code.to_alist(),
        Format::Mm => code.to_matrix_market(),
        Format::Json => with_newline(code.to_json(logs.as_ref())),
        Format::Text => {
            let mut s = format!(
                "N = {}\nK = {}\nr = {}\nstabilizers:\n",
                code.num_qubits(),
                code.num_logicals(),
                code.r()
            );
            for f in code.stabilizers() {
                s += &format!("  {f}\n");
            }
            if let Some(l) = &logs {
                for (name, fam) in [("output", &l.output), ("level", &l.level), ("relation", &l.relation)] {
                    s += &format!("{name} logicals:\n");
                    for f in fam {
                        s += &format!("  {f}\n");
                    }
                }
            }
            s
        }
    };
    write_to(out.output.as_deref(), text.as_bytes())
}

#[derive(Serialize)]
struct SparsifyJson<'a> {
    schema_version: u32,
    max_weight: usize,
    #[serde(rename = "N")]
    big_n: usize,
    #[serde(rename = "K")]
    big_k: usize,
    r: usize,
    generators: Vec<String>,
    checks: Vec<String>,
    fallback: usize,
    found: usize,
    report: &'a SearchReport,
}

fn cmd_sparsify(
    input: &Path,
    max_weight: usize,
    budget: u64,
    skip: bool,
    format: Format,
    out: &OutputArgs,
) -> CmdResult {
    let c = load(input)?;
    let opts = SearchOptions { budget: budget as usize, skip_over_budget: skip };
    let sp = low_weight_stabilizers(&c, max_weight, opts)?;
    if sp.fallback > 0 {
        eprintln!(
            "warning: {} of {} generators fall back to check operators (no connected stabilizer of weight <= {max_weight} completes the basis)",
            sp.fallback,
            sp.basis.len()
        );
    }
    if sp.report.budget_hits > 0 {
        eprintln!("warning: {} balls skipped over budget", sp.report.budget_hits);
    }
    let text = match format {
        Format::Alist => sp.code.to_alist(),
        Format::Mm => sp.code.to_matrix_market(),
        Format::Json => {
            let doc = SparsifyJson {
                schema_version: SCHEMA_VERSION,
                max_weight,
                big_n: sp.code.num_qubits(),
                big_k: sp.code.num_logicals(),
                r: sp.code.r(),
                generators: sp.basis.iter().map(|f| f.to_string()).collect(),
                checks: sp.basis_checks.iter().map(|u| u.to_string()).collect(),
                fallback: sp.fallback,
                found: sp.found.len(),
                report: &sp.report,
            };
            with_newline(serde_json::to_string_pretty(&doc).expect("serializable"))
        }
        Format::Text => {
            let mut s = format!("r = {}\nfound = {}\nfallback = {}\ngenerators:\n", sp.code.r(), sp.found.len(), sp.fallback);
            for f in &sp.basis {
                s += &format!("  {:>3}  {f}\n", f.weight());
            }
            s += "weight histogram of found stabilizers:\n";
            for (w, k) in &sp.report.weight_histogram {
                s += &format!("  {w:>3}  {k}\n");
            }
            s
        }
    };
    write_to(out.output.as_deref(), text.as_bytes())
}

fn cmd_simulate(a: &SimulateArgs) -> CmdResult {
    let c = load(&a.input)?;
    let base = a.p;
    let pick = |x: Option<f64>, name: &str| {
        x.or(base).ok_or_else(|| Failure::Lib(Error::Precondition(format!("missing --p or --{name}"))))
    };
    let nm = NoiseModel {
        p_unitary: pick(a.p_unitary, "p-unitary")?,
        p_measurement: pick(a.p_measurement, "p-measurement")?,
        p_idle: pick(a.p_idle, "p-idle")?,
        overrides: Default::default(),
    };
    let exp = Experiment::new(&c, &nm, a.max_faults, a.table_budget)?;
    let zero = stcode::BitVec::zeros(exp.code.r());
    match exp.decoder.get(&zero) {
        Some(e) if nm.p_unitary < 1.0 && nm.p_measurement < 1.0 && nm.p_idle < 1.0 && !e.fault.is_identity() => {
            return Err(Failure::Invariant("zero syndrome does not map to the empty fault".into()));
        }
        _ => {}
    }
    if let Some(p) = &a.dump_table {
        write_to(Some(p), &exp.decoder.to_bytes())?;
    }
    let rep = exp.monte_carlo(a.trials, a.seed);
    write_to(a.out.output.as_deref(), with_newline(rep.to_json()).as_bytes())
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Validate { input } => cmd_validate(&input),
        Command::Checks { input, json, emit_linearized, out } => {
            cmd_checks(&input, json, emit_linearized.as_deref(), &out)
        }
        Command::Spacetime { input, format, alist, mm, json, logicals, verify, out } => {
            let format = if alist {
                Format::Alist
            } else if mm {
                Format::Mm
            } else if json {
                Format::Json
            } else {
                format
            };
            cmd_spacetime(&input, format, logicals, verify, &out)
        }
        Command::Sparsify { input, max_weight, budget, skip_over_budget, format, out } => {
            cmd_sparsify(&input, max_weight, budget, skip_over_budget, format, &out)
        }
        Command::Simulate(a) => cmd_simulate(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Io(msg) => eprintln!("error: {msg}"),
                Failure::Lib(Error::Invalid(diags)) => {
                    for d in diags {
                        eprintln!("error: {d}");
                    }
                }
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Invariant(msg) => eprintln!("internal invariant violated:\n{msg}"),
            }
            ExitCode::from(f.code())
        }
    }
}
