//! The `cfr` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 input or validation error,
//! 3 equivalence check found a disagreement.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::domain::{derive_properties, parse_properties, print_properties, PropertySet};
use crate::equiv::{differential, sample_goals};
use crate::interp::{check_property_soundness, format_trace, solve};
use crate::specialize::{emit, specialize, Entry, ResidualProgram, SpecConfig};
use crate::syntax::{parse_goal, parse_program, ParseError, Program};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_DISAGREEMENT: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "cfr",
    version,
    about = "Control-flow refinement of constrained Horn clause programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split predicates per reachable property set and print the refined program.
    Refine {
        input: PathBuf,
        /// `auto` to derive properties from clause guards, or a properties file.
        #[arg(long, default_value = "auto")]
        props: String,
        /// Entry predicate as NAME/ARITY (required).
        #[arg(long)]
        entry: Option<String>,
        #[arg(long, value_enum, default_value = "on")]
        strengthen: Switch,
        #[arg(long, default_value = "solve__")]
        prefix: String,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Run a ground goal with the mixed interpreter.
    Run {
        input: PathBuf,
        goal: String,
        #[arg(long, default_value = "auto")]
        props: String,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
        /// Print one line per call: `q(v1,...,vk) [properties]`.
        #[arg(long)]
        trace: bool,
    },
    /// Print the property set in properties-file syntax.
    Props {
        input: PathBuf,
        #[arg(long, default_value = "auto")]
        props: String,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Compare an original and a refined program on sampled ground goals.
    CheckEquiv {
        original: PathBuf,
        refined: PathBuf,
        /// Name of the refined predicate that corresponds to the entry.
        #[arg(long)]
        entry_version: String,
        /// Entry predicate of the original program as NAME/ARITY.
        #[arg(long)]
        entry: String,
        #[arg(long, default_value = "auto")]
        props: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Argument range LO:HI (inclusive).
        #[arg(long, default_value = "-20:20", allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
    },
}

enum Failure {
    Usage(String),
    Input(String),
    Disagreement,
}

/// Parse `argv` (including the program name) and dispatch.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = write!(err, "{e}");
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "cfr: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "cfr: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Disagreement) => EXIT_DISAGREEMENT,
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Refine {
            input,
            props,
            entry,
            strengthen,
            prefix,
            output,
        } => {
            let program = load_program(&input)?;
            let entry = entry.ok_or_else(|| Failure::Usage("refine needs --entry NAME/ARITY".into()))?;
            let psi = load_props(&props, &program)?;
            let (name, arity) = parse_entry(&entry)?;
            check_entry_arity(&program, &name, arity)?;
            let cfg = SpecConfig {
                strengthen: strengthen == Switch::On,
                prefix,
                entry: Entry::Predicate(name),
            };
            let residual = specialize(&program, &psi, &cfg).map_err(|e| Failure::Input(e.to_string()))?;
            let text = render_residual(&residual, &psi);
            write_output(output.as_deref(), &text, out)
        }
        Command::Run {
            input,
            goal,
            props,
            max_steps,
            trace,
        } => {
            let program = load_program(&input)?;
            let psi = load_props(&props, &program)?;
            let goal = parse_goal(&goal).map_err(|e| Failure::Input(format!("goal:{e}")))?;
            if max_steps == 0 {
                return Err(Failure::Usage("--max-steps must be positive".into()));
            }
            let outcome = solve(&goal, &psi, &program, max_steps).map_err(|e| Failure::Input(e.to_string()))?;
            let mut text = String::new();
            if trace {
                text.push_str(&format_trace(outcome.trace(), &psi));
            }
            text.push_str(&format!("{}\n", outcome.kind()));
            text.push_str(&format!("calls: {}\n", outcome.trace().step_count));
            if !check_property_soundness(outcome.trace(), &psi) {
                text.push_str("warning: property check failed on trace\n");
            }
            write_output(None, &text, out)
        }
        Command::Props { input, props, output } => {
            let program = load_program(&input)?;
            let psi = load_props(&props, &program)?;
            write_output(output.as_deref(), &print_properties(&psi), out)
        }
        Command::CheckEquiv {
            original,
            refined,
            entry_version,
            entry,
            props,
            seed,
            trials,
            range,
            max_steps,
        } => {
            let orig = load_program(&original)?;
            let refined = load_program(&refined)?;
            let psi = load_props(&props, &orig)?;
            let (name, arity) = parse_entry(&entry)?;
            check_entry_arity(&orig, &name, arity)?;
            let (lo, hi) = parse_range(&range)?;
            if max_steps == 0 {
                return Err(Failure::Usage("--max-steps must be positive".into()));
            }
            let goals = sample_goals(&name, arity, lo, hi, trials, seed);
            let report = differential(&orig, &refined, &entry_version, &goals, &psi, max_steps)
                .map_err(|e| Failure::Input(e.to_string()))?;
            let mut text = String::new();
            for d in &report.disagreements {
                text.push_str(&format!(
                    "disagreement: {} original={} refined={}\n",
                    d.goal, d.original, d.residual
                ));
            }
            text.push_str(&format!(
                "trials: {}\nagreements: {}\ndisagreements: {}\nbudget exhausted: {}\n",
                report.trials,
                report.agreements,
                report.disagreements.len(),
                report.budget_exhausted
            ));
            write_output(None, &text, out)?;
            if report.is_equivalent() {
                Ok(())
            } else {
                Err(Failure::Disagreement)
            }
        }
    }
}

/// The emitted program preceded by one comment line per version.
pub fn render_residual(residual: &ResidualProgram, psi: &PropertySet) -> String {
    let mut text = String::new();
    for (version, name) in residual.versions() {
        text.push_str(&format!(
            "% {name}: {} {}\n",
            version.predicate(),
            version.phi().describe(psi)
        ));
    }
    text.push_str(&emit(residual));
    text
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn located(path: &Path, e: ParseError) -> Failure {
    Failure::Input(format!("{}:{e}", path.display()))
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    parse_program(&read(path)?).map_err(|e| located(path, e))
}

fn load_props(spec: &str, program: &Program) -> Result<PropertySet, Failure> {
    if spec == "auto" {
        return Ok(derive_properties(program));
    }
    let path = Path::new(spec);
    parse_properties(&read(path)?, program).map_err(|e| located(path, e))
}

fn parse_entry(entry: &str) -> Result<(String, usize), Failure> {
    let bad = || Failure::Usage(format!("--entry expects NAME/ARITY, got `{entry}`"));
    let (name, arity) = entry.rsplit_once('/').ok_or_else(bad)?;
    let arity = arity.parse().map_err(|_| bad())?;
    Ok((name.to_owned(), arity))
}

fn check_entry_arity(program: &Program, name: &str, arity: usize) -> Result<(), Failure> {
    match program.arity(name) {
        None => Err(Failure::Input(format!("unknown entry predicate `{name}`"))),
        Some(a) if a != arity => Err(Failure::Input(format!(
            "entry `{name}/{arity}` does not match the program's arity {a}"
        ))),
        Some(_) => Ok(()),
    }
}

fn parse_range(range: &str) -> Result<(i64, i64), Failure> {
    let bad = || Failure::Usage(format!("--range expects LO:HI with LO =< HI, got `{range}`"));
    let (lo, hi) = range.split_once(':').ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(format!("cannot write output: {e}"))),
    }
}
