//! Command-line interface.
//!
//! Verdicts go to standard output, diagnostics to standard error. Exit
//! status is 0 on success whatever the verdict, 2 on usage or parse errors
//! and 3 when a size cap or node budget stops the computation.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::clone::{canonical_g, find_violation, is_diagonal_cautious, unary_polymorphisms};
use crate::corpus::boolean_corpus;
use crate::error::Error;
use crate::formula::{eliminate_equalities, ScspInstance};
use crate::gadget::{
    build_gadget, decide_singleton, describe_columns, reduce_with_gadget, verify_gadget, Premise,
};
use crate::oracles::{solve_csp, solve_scsp, SolveResult, Verdict, DEFAULT_BUDGET};
use crate::random::InstanceBounds;
use crate::structure::{
    expand_with_constants, fmt_tuple, parse_constant_symbol, validate_structure, Structure,
};
use crate::text::{
    parse_csp_instance, parse_instance, parse_operation, parse_structure, write_instance,
};
use crate::verify::{verify_reduction, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "scsp",
    version,
    about = "Surjective CSP reductions and diagonal-cautious clones"
)]
struct Cli {
    /// Write a machine-readable sidecar report to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
struct CapArgs {
    /// Largest universe size for n-ary constructions (n^n cells).
    #[arg(long, default_value_t = 4)]
    cap: usize,
}

impl CapArgs {
    fn cells(&self) -> usize {
        crate::structure::checked_pow(self.cap, self.cap).unwrap_or(usize::MAX)
    }
}

#[derive(Debug, Args, Clone, Copy)]
struct BudgetArgs {
    /// Search node budget per solver call.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report structure invariant violations.
    Validate { structure: PathBuf },
    /// Check whether an operation table is a polymorphism.
    PolyCheck { structure: PathBuf, table: PathBuf },
    /// List the unary polymorphisms.
    Unary { structure: PathBuf },
    /// Dump the canonical map G.
    Gmap {
        structure: PathBuf,
        #[command(flatten)]
        cap: CapArgs,
    },
    /// Decide whether Pol(B) is diagonal-cautious.
    Cautious {
        structure: PathBuf,
        #[command(flatten)]
        cap: CapArgs,
    },
    /// Build the gadget formula, optionally verifying its conditions.
    Gadget {
        structure: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
        #[arg(long)]
        verify: bool,
        /// Maximum number of gadget solutions enumerated by --verify.
        #[arg(long, default_value_t = 100_000)]
        solution_cap: usize,
        #[command(flatten)]
        cap: CapArgs,
    },
    /// Reduce a CSP(B+) instance to an SCSP(B) instance.
    Reduce {
        structure: PathBuf,
        instance: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
        /// Skip the diagonal-cautious check; the premise is then reported unchecked.
        #[arg(long)]
        no_check: bool,
        #[command(flatten)]
        cap: CapArgs,
    },
    /// Decide a CSP instance (constant atoms solve over B+).
    SolveCsp {
        structure: PathBuf,
        instance: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Decide an SCSP instance; `eq` lines are eliminated first.
    SolveScsp {
        structure: PathBuf,
        instance: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Check the reduction against the oracles on random instances.
    Verify {
        structure: PathBuf,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_vars: usize,
        #[arg(long, default_value_t = 5)]
        max_atoms: usize,
        /// Keep only instances whose CSP(B+) verdict is yes.
        #[arg(long)]
        satisfiable_only: bool,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        cap: CapArgs,
    },
    /// Run the two-element single-relation corpus.
    Corpus {
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Default)]
struct Output {
    stdout: String,
    stderr: String,
    report: Option<String>,
    code: i32,
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Contract(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text)
        .map_err(|e| Error::Contract(format!("cannot write {}: {e}", path.display())))
}

fn load_structure(path: &Path) -> Result<Structure, Error> {
    Structure::from_def(parse_structure(&read(path)?)?)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SizeCap { .. } | Error::UniverseTooLarge(_) => EXIT_REFUSED,
        _ => EXIT_USAGE,
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn verdict_output(result: &SolveResult) -> Output {
    let mut out = Output::default();
    writeln!(out.stdout, "{}", result.verdict).unwrap();
    if let Some(w) = &result.witness {
        writeln!(out.stdout, "{w}").unwrap();
    }
    writeln!(
        out.stderr,
        "nodes {} time {:.3}s",
        result.stats.nodes,
        result.stats.elapsed.as_secs_f64()
    )
    .unwrap();
    if result.verdict == Verdict::BudgetExceeded {
        out.code = EXIT_REFUSED;
    }
    out
}

fn execute(command: Command) -> Result<Output, Error> {
    let mut out = Output::default();
    match command {
        Command::Validate { structure } => {
            let def = parse_structure(&read(&structure)?)?;
            let diagnostics = validate_structure(&def);
            if diagnostics.is_empty() {
                writeln!(out.stdout, "valid").unwrap();
            }
            for d in diagnostics {
                writeln!(out.stdout, "{d}").unwrap();
            }
        }
        Command::PolyCheck { structure, table } => {
            let s = load_structure(&structure)?;
            let f = parse_operation(&read(&table)?, s.size())?;
            match find_violation(&s, &f) {
                None => writeln!(out.stdout, "yes").unwrap(),
                Some(v) => writeln!(out.stdout, "no\nviolation {v}").unwrap(),
            }
        }
        Command::Unary { structure } => {
            let s = load_structure(&structure)?;
            let monoid = unary_polymorphisms(&s)?;
            writeln!(out.stdout, "count {}", monoid.len()).unwrap();
            for u in monoid.members() {
                write!(out.stdout, "{u}").unwrap();
            }
            writeln!(
                out.stdout,
                "closed-under-composition {}",
                yes_no(monoid.is_closed_under_composition())
            )
            .unwrap();
            writeln!(
                out.stdout,
                "inverses {}",
                yes_no(monoid.contains_inverses())
            )
            .unwrap();
        }
        Command::Gmap { structure, cap } => {
            let s = load_structure(&structure)?;
            write!(out.stdout, "{}", canonical_g(&s, cap.cells())?).unwrap();
        }
        Command::Cautious { structure, cap } => {
            let s = load_structure(&structure)?;
            let verdict = is_diagonal_cautious(&s, cap.cells())?;
            writeln!(out.stdout, "{}", yes_no(verdict.is_diagonal_cautious)).unwrap();
            if let Some(w) = &verdict.witness {
                writeln!(out.stdout, "witness {}", fmt_tuple(w)).unwrap();
            }
            let mut report = format!(
                "structure {}\ndiagonal-cautious {}\n",
                s.fingerprint(),
                yes_no(verdict.is_diagonal_cautious)
            );
            write!(report, "{}", verdict.gmap).unwrap();
            out.report = Some(report);
        }
        Command::Gadget {
            structure,
            output,
            verify,
            solution_cap,
            cap,
        } => {
            let s = load_structure(&structure)?;
            let g = build_gadget(&s, cap.cells())?;
            writeln!(out.stdout, "variables {}", g.formula.vars.len()).unwrap();
            writeln!(out.stdout, "m {}", g.m).unwrap();
            writeln!(out.stdout, "atoms {}", g.formula.atoms.len()).unwrap();
            writeln!(out.stdout, "columns {}", describe_columns(&g.columns)).unwrap();
            if verify {
                let report = verify_gadget(&s, &g, solution_cap, cap.cells())?;
                write!(out.stdout, "{report}").unwrap();
            }
            let text = write_instance(&g.formula.vars, &g.formula.atoms);
            match output {
                Some(path) => write(&path, &text)?,
                None => out.stdout.push_str(&text),
            }
            out.report = Some(out.stdout.clone());
        }
        Command::Reduce {
            structure,
            instance,
            output,
            no_check,
            cap,
        } => {
            let s = load_structure(&structure)?;
            let phi = parse_csp_instance(&read(&instance)?)?;
            if s.size() == 1 {
                writeln!(out.stderr, "universe has size 1; decided directly").unwrap();
                writeln!(out.stdout, "{}", yes_no(decide_singleton(&s, &phi)?)).unwrap();
                return Ok(out);
            }
            let premise = if no_check {
                Premise::Unchecked
            } else if is_diagonal_cautious(&s, cap.cells())?.is_diagonal_cautious {
                Premise::Verified
            } else {
                Premise::Failed
            };
            if premise != Premise::Verified {
                writeln!(out.stderr, "warning: {premise}").unwrap();
            }
            let g = build_gadget(&s, cap.cells())?;
            let r = reduce_with_gadget(&s, &phi, &g, premise)?;
            let text = write_instance(&r.instance.vars, &r.instance.atoms);
            let counts = format!(
                "variables {}\natoms {}\n",
                r.instance.vars.len(),
                r.instance.atoms.len()
            );
            match output {
                Some(path) => {
                    write(&path, &text)?;
                    out.stdout.push_str(&counts);
                }
                None => {
                    out.stdout.push_str(&text);
                    out.stderr.push_str(&counts);
                }
            }
            out.report = Some(format!(
                "structure {}\npremise {}\ninput-variables {}\ninput-atoms {}\n\
                 variables-before-elimination {}\nvariables {}\natoms {}\n\
                 original-atoms {}\ngadget-atoms {}\n",
                s.fingerprint(),
                premise,
                phi.vars.len(),
                phi.atoms.len(),
                r.vars_before_elimination,
                r.instance.vars.len(),
                r.instance.atoms.len(),
                r.original_atoms,
                r.gadget_atoms
            ));
        }
        Command::SolveCsp {
            structure,
            instance,
            budget,
        } => {
            let s = load_structure(&structure)?;
            let phi = parse_csp_instance(&read(&instance)?)?;
            let needs_constants = phi.atoms.iter().any(|a| {
                s.signature().index_of(&a.symbol).is_none()
                    && parse_constant_symbol(&a.symbol).is_some()
            });
            let target = if needs_constants {
                expand_with_constants(&s)?
            } else {
                s
            };
            let result = solve_csp(&target, &phi, Some(budget.budget))?;
            out = verdict_output(&result);
        }
        Command::SolveScsp {
            structure,
            instance,
            budget,
        } => {
            let s = load_structure(&structure)?;
            let file = parse_instance(&read(&instance)?)?;
            if let Some(line) = file.first_const_line {
                return Err(Error::Parse {
                    line,
                    message: "`const` is only allowed in CSP(B+) instances".into(),
                });
            }
            let (vars, atoms) = eliminate_equalities(&file.formula.vars, &file.formula)?;
            let inst = ScspInstance::new(vars, atoms)?;
            let result = solve_scsp(&s, &inst, Some(budget.budget))?;
            out = verdict_output(&result);
        }
        Command::Verify {
            structure,
            trials,
            seed,
            max_vars,
            max_atoms,
            satisfiable_only,
            budget,
            cap,
        } => {
            let s = load_structure(&structure)?;
            let config = VerifyConfig {
                trials,
                seed,
                bounds: InstanceBounds {
                    max_vars,
                    max_atoms,
                    constants: true,
                },
                budget: Some(budget.budget),
                cap: cap.cells(),
                satisfiable_only,
                ..VerifyConfig::default()
            };
            let report = verify_reduction(&s, &config)?;
            out.stdout = report.to_string();
            out.report = Some(out.stdout.clone());
            if report.budget_exhausted() > 0 {
                out.code = EXIT_REFUSED;
            }
        }
        Command::Corpus {
            trials,
            seed,
            budget,
        } => {
            let config = VerifyConfig {
                trials,
                seed,
                budget: Some(budget.budget),
                ..VerifyConfig::default()
            };
            let (mut cautious, mut total_trials, mut agreed, mut exhausted) = (0, 0, 0, 0);
            let mut report = String::new();
            for (i, s) in boolean_corpus().iter().enumerate() {
                let verdict = is_diagonal_cautious(s, config.cap)?;
                let arity = s.signature().symbols()[0].arity;
                let size = s.relations()[0].len();
                if !verdict.is_diagonal_cautious {
                    writeln!(out.stdout, "{i} arity {arity} tuples {size} cautious no").unwrap();
                    continue;
                }
                cautious += 1;
                let r = verify_reduction(s, &config)?;
                total_trials += r.trials.len();
                agreed += r.agreements();
                exhausted += r.budget_exhausted();
                writeln!(
                    out.stdout,
                    "{i} arity {arity} tuples {size} cautious yes agree {}/{}",
                    r.agreements(),
                    r.trials.len()
                )
                .unwrap();
                write!(report, "{r}").unwrap();
            }
            writeln!(out.stdout, "summary").unwrap();
            writeln!(out.stdout, "structures {}", boolean_corpus().len()).unwrap();
            writeln!(out.stdout, "cautious {cautious}").unwrap();
            writeln!(out.stdout, "trials {total_trials}").unwrap();
            writeln!(out.stdout, "agree {agreed}").unwrap();
            writeln!(out.stdout, "budget-exceeded {exhausted}").unwrap();
            writeln!(out.stdout, "end").unwrap();
            out.report = Some(report);
            if exhausted > 0 {
                out.code = EXIT_REFUSED;
            }
        }
    }
    Ok(out)
}

/// Runs one invocation, writing to the given streams; returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
            } else {
                let _ = stdout.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(cli.command) {
        Ok(out) => {
            let _ = stdout.write_all(out.stdout.as_bytes());
            let _ = stderr.write_all(out.stderr.as_bytes());
            if let Some(path) = &cli.report {
                let text = out.report.as_deref().unwrap_or(&out.stdout);
                if let Err(e) = write(path, text) {
                    let _ = writeln!(stderr, "error: {e}");
                    return EXIT_USAGE;
                }
            }
            out.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
