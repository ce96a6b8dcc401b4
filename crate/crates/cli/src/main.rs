//! `qtv`: transpile, verify and validate quantum circuits.
//!
//! Exit codes: 0 pass or VALID, 1 failure or INVALID (also usage and I/O
//! errors), 2 undetermined or INCONCLUSIVE.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use qtv_core::calculus::{equiv_prove, ProofResult, ProverConfig};
use qtv_core::contracts::render_counterexample;
use qtv_core::device::{CouplingMap, Layout};
use qtv_core::passes::{
    oracle_equal, pass_by_name, run_pass_manager, BasicSwap, CancelLog, LookaheadSwap, ManagerOptions, MappedCircuit,
    TranspilerPass,
};
use qtv_core::qasm;
use qtv_core::semantics::{EqualityMode, ORACLE_CAP};
use qtv_core::suite::refine::refine_representation;
use qtv_core::suite::{run_section, section_for_pass, Context, Section, SuiteConfig, SuiteReport, SECTIONS};
use qtv_core::validator::{validate_cnot_cancellation, validate_swap_insertion, Status};
use qtv_core::{DAGCircuit, QuantumCircuit, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(name = "qtv", version, about = "Verified quantum circuit transpiler")]
struct Cli {
    /// Seed for every randomized campaign (decimal or 0x-prefixed hex).
    #[arg(long, global = true, value_parser = parse_seed, default_value = "0xCE871")]
    seed: u64,
    /// Prover search budget, in explored states.
    #[arg(long, global = true, default_value_t = 10_000)]
    budget: usize,
    /// Numeric tolerance for oracle comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Random cases per campaign.
    #[arg(long, global = true)]
    cases: Option<usize>,
    /// Print `-` instead of wall-clock times, for byte-stable reports.
    #[arg(long, global = true)]
    no_timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certify every rewrite rule in the corpus against the matrix oracle.
    VerifyPatterns,
    /// Run the contract campaign for one pass.
    CheckPass {
        name: String,
        /// Named regression instance instead of the random campaign.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Run a pass pipeline on a circuit.
    Transpile {
        input: PathBuf,
        /// Comma-separated pass names.
        #[arg(long)]
        passes: String,
        /// Coupling map (JSON) for routing passes.
        #[arg(long)]
        cmap: Option<PathBuf>,
        /// Initial layout (JSON list of [virtual, physical] pairs).
        #[arg(long)]
        layout: Option<PathBuf>,
        /// Where to write the output circuit; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the initial layout the router used.
        #[arg(long)]
        layout_out: Option<PathBuf>,
        /// Write the final layout.
        #[arg(long)]
        final_layout_out: Option<PathBuf>,
        /// Write the cancellation log (JSON).
        #[arg(long)]
        log: Option<PathBuf>,
        /// Skip the per-pass contract checks.
        #[arg(long)]
        unchecked: bool,
    },
    /// Validate one compilation: input circuit against output circuit.
    Validate {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Auto)]
        kind: Kind,
        /// Initial layout of a routed output.
        #[arg(long)]
        layout: Option<PathBuf>,
        /// Final layout of a routed output; defaults to the initial one.
        #[arg(long)]
        final_layout: Option<PathBuf>,
        /// Cancellation log written by `transpile --log`.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Also check the output against this coupling map.
        #[arg(long)]
        cmap: Option<PathBuf>,
    },
    /// Check a data representation against its specification model.
    RefineCheck {
        /// One of dag, bloch, quaternion, bloch-multiqubit.
        representation: String,
    },
    /// Look for a rewriting proof that two circuits are equivalent.
    Prove { first: PathBuf, second: PathBuf },
    /// Run the full verification suite, or selected sections.
    Suite {
        #[arg(long = "section")]
        sections: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// Cancellation if a log is given, swap insertion otherwise.
    Auto,
    Swap,
    Cnot,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    r.map_err(|e| format!("bad seed {s}: {e}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Pass = 0,
    Fail = 1,
    Undetermined = 2,
}

impl From<bool> for Outcome {
    fn from(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

impl Cli {
    fn suite_config(&self) -> SuiteConfig {
        let d = SuiteConfig::default();
        SuiteConfig {
            seed: self.seed,
            tol: self.tol,
            budget: self.budget,
            cases: self.cases.unwrap_or(d.cases),
            timings: !self.no_timings,
            ..d
        }
    }

    fn prover(&self) -> ProverConfig {
        ProverConfig {
            budget: self.budget,
            ..ProverConfig::default()
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_circuit(path: &Path) -> Result<QuantumCircuit> {
    qasm::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_cmap(path: &Path) -> Result<CouplingMap> {
    CouplingMap::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_layout(path: &Path, physical: usize) -> Result<Layout> {
    Layout::from_json(&read(path)?, physical).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn print_section(s: &Section) -> Outcome {
    print!("{}", s.render());
    s.passed().into()
}

fn pipeline(spec: &str, layout: Option<&Layout>) -> Result<Vec<Box<dyn TranspilerPass>>> {
    let names: Vec<&str> = spec.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        bail!("empty pass list");
    }
    // Resolve every name first so a typo fails before anything runs.
    let mut passes = names.iter().map(|n| pass_by_name(n)).collect::<qtv_core::Result<Vec<_>>>()?;
    for (p, n) in passes.iter_mut().zip(&names) {
        match *n {
            "basic_swap" => {
                *p = Box::new(BasicSwap {
                    layout: layout.cloned(),
                })
            }
            "lookahead_swap" => {
                *p = Box::new(LookaheadSwap {
                    layout: layout.cloned(),
                    ..LookaheadSwap::default()
                })
            }
            _ => {}
        }
    }
    Ok(passes)
}

#[allow(clippy::too_many_arguments)]
fn transpile(
    cli: &Cli,
    input: &Path,
    passes: &str,
    cmap: Option<&Path>,
    layout: Option<&Path>,
    out: Option<&Path>,
    layout_out: Option<&Path>,
    final_layout_out: Option<&Path>,
    log: Option<&Path>,
    unchecked: bool,
) -> Result<Outcome> {
    let circuit = read_circuit(input)?;
    let cmap = cmap.map(read_cmap).transpose()?;
    let layout = match (layout, &cmap) {
        (Some(p), Some(m)) => Some(read_layout(p, m.size())?),
        (Some(_), None) => bail!("--layout needs --cmap"),
        (None, _) => None,
    };
    let passes = pipeline(passes, layout.as_ref())?;
    let opts = ManagerOptions {
        tol: cli.tol,
        check_contracts: !unchecked,
        ..ManagerOptions::default()
    };
    let result = run_pass_manager(&passes, &circuit, cmap.as_ref(), opts)?;
    let report = result.lines(!cli.no_timings).join("\n") + "\n";
    if let Some(ce) = &result.aborted {
        print!("{report}");
        print!("{}", render_counterexample(ce));
        return Ok(Outcome::Fail);
    }
    let text = qasm::print(&result.state.dag.to_circuit());
    match out {
        Some(p) => {
            write(p, &text)?;
            print!("{report}");
        }
        None => {
            eprint!("{report}");
            print!("{text}");
        }
    }
    let mapped = result.mapped();
    if let Some(p) = layout_out {
        write(p, &mapped.initial_layout.to_json())?;
    }
    if let Some(p) = final_layout_out {
        write(p, &mapped.final_layout.to_json())?;
    }
    if let Some(p) = log {
        let events = result.state.cancel_log.clone().unwrap_or_default();
        write(p, &serde_json::to_string_pretty(&events)?)?;
    }
    Ok(Outcome::Pass)
}

struct ValidateArgs<'a> {
    input: &'a Path,
    output: &'a Path,
    kind: Kind,
    layout: Option<&'a Path>,
    final_layout: Option<&'a Path>,
    log: Option<&'a Path>,
    cmap: Option<&'a Path>,
}

fn validate(cli: &Cli, a: ValidateArgs<'_>) -> Result<Outcome> {
    let input = read_circuit(a.input)?;
    let output = read_circuit(a.output)?;
    let kind = match a.kind {
        Kind::Auto if a.log.is_some() => Kind::Cnot,
        Kind::Auto => Kind::Swap,
        k => k,
    };
    if let Some(p) = a.cmap {
        let m = read_cmap(p)?;
        let ok = output.qreg() <= m.size() && qtv_core::passes::coupling_compliant(&output, &m);
        println!("COUPLING compliant={ok}");
    }
    let verdict = match kind {
        Kind::Swap => {
            let physical = output.qreg();
            let init = match a.layout {
                Some(p) => read_layout(p, physical)?,
                None => Layout::from_v2p((0..input.qreg()).collect(), physical)?,
            };
            let fin = match a.final_layout {
                Some(p) => read_layout(p, physical)?,
                None => init.clone(),
            };
            let mapped = MappedCircuit::new(DAGCircuit::from_circuit(&output), init, fin)?;
            validate_swap_insertion(&input, &mapped)?
        }
        _ => {
            let log: Option<CancelLog> = match a.log {
                Some(p) => Some(serde_json::from_str(&read(p)?).with_context(|| format!("parsing {}", p.display()))?),
                None => None,
            };
            validate_cnot_cancellation(&input, &output, log.as_ref(), &cli.prover())?
        }
    };
    print!("{}", verdict.render());
    Ok(match verdict.status {
        Status::Valid => Outcome::Pass,
        Status::Invalid => Outcome::Fail,
        Status::Inconclusive => Outcome::Undetermined,
    })
}

fn prove(cli: &Cli, first: &Path, second: &Path) -> Result<Outcome> {
    let (a, b) = (read_circuit(first)?, read_circuit(second)?);
    match equiv_prove(&a, &b, &cli.prover())? {
        ProofResult::Proved(trace) => {
            println!("PROVED mode={} steps={}", trace.mode.as_str(), trace.steps.len());
            for (i, s) in trace.steps.iter().enumerate() {
                println!("STEP {i} rule={} at={} {:?}", s.rule, s.position, s.direction);
            }
            Ok(Outcome::Pass)
        }
        ProofResult::Unknown { explored } => {
            let fits = |c: &QuantumCircuit| c.qreg() + c.cbits() <= ORACLE_CAP;
            if a.qreg() == b.qreg() && fits(&a) && fits(&b) {
                let conv = ProverConfig::default().convention;
                if !oracle_equal(&a, &b, conv, EqualityMode::UpToPhase, cli.tol)? {
                    println!("DISPROVED oracle explored={explored}");
                    return Ok(Outcome::Fail);
                }
            }
            println!("UNKNOWN explored={explored}");
            Ok(Outcome::Undetermined)
        }
    }
}

fn suite(cli: &Cli, names: &[String]) -> Result<Outcome> {
    let mut ctx = Context::new(cli.suite_config());
    let names: Vec<&str> = if names.is_empty() {
        SECTIONS.to_vec()
    } else {
        names.iter().map(String::as_str).collect()
    };
    let sections = names.iter().map(|n| run_section(n, &mut ctx)).collect::<qtv_core::Result<Vec<_>>>()?;
    let report = SuiteReport { sections };
    print!("{}", report.render());
    Ok(report.passed().into())
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::VerifyPatterns => {
            let mut ctx = Context::new(cli.suite_config());
            Ok(print_section(&run_section("patterns", &mut ctx)?))
        }
        Command::CheckPass { name, suite } => {
            let section = section_for_pass(name, suite.as_deref())?;
            let mut ctx = Context::new(cli.suite_config());
            Ok(print_section(&run_section(section, &mut ctx)?))
        }
        Command::Transpile {
            input,
            passes,
            cmap,
            layout,
            out,
            layout_out,
            final_layout_out,
            log,
            unchecked,
        } => transpile(
            cli,
            input,
            passes,
            cmap.as_deref(),
            layout.as_deref(),
            out.as_deref(),
            layout_out.as_deref(),
            final_layout_out.as_deref(),
            log.as_deref(),
            *unchecked,
        ),
        Command::Validate {
            input,
            output,
            kind,
            layout,
            final_layout,
            log,
            cmap,
        } => validate(
            cli,
            ValidateArgs {
                input,
                output,
                kind: *kind,
                layout: layout.as_deref(),
                final_layout: final_layout.as_deref(),
                log: log.as_deref(),
                cmap: cmap.as_deref(),
            },
        ),
        Command::RefineCheck { representation } => {
            Ok(print_section(&refine_representation(representation, &cli.suite_config())?))
        }
        Command::Prove { first, second } => prove(cli, first, second),
        Command::Suite { sections } => suite(cli, sections),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    debug_assert_eq!(parse_seed("0xCE871"), Ok(DEFAULT_SEED));
    let outcome = run(&cli);
    let _ = std::io::stdout().flush();
    match outcome {
        Ok(o) => ExitCode::from(o as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Outcome::Fail as u8)
        }
    }
}
