//! Command-line front end: explore process graphs, check equivalences,
//! compile between specifications and automata, and inspect fixtures.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ppdalab_core::algebra::{
    builtin_specs, check_guardedness, parse_spec_file, print_spec, to_gnf, Guardedness, RecSpec,
};
use ppdalab_core::equivalence::{check_fragments, CheckResult, Relation, Verdict};
use ppdalab_core::lts::{explore, Budget, LtsFragment};
use ppdalab_core::ppda::{fixtures, parse_ppda_file, print_ppda, Ppda};
use ppdalab_core::transforms::{
    bcp_spec_to_ppda, one_state_ppda_to_bpp_theta, ppda_to_bcp_theta,
};

#[derive(Parser)]
#[command(
    name = "ppdalab",
    version,
    about = "Parallel pushdown automata and parallel process algebra workbench"
)]
struct Cli {
    /// Seed for randomized property commands (recorded for reproducibility).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// Maximum number of explored states.
    #[arg(long, default_value_t = 4000)]
    max_states: usize,

    /// Maximum exploration depth (transitions from the root, tau included).
    #[arg(long, default_value_t = 40)]
    max_depth: usize,

    /// Maximum state weight (bag size / parallel width); heavier states are
    /// kept but not expanded.
    #[arg(long)]
    max_weight: Option<usize>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        let mut budget = Budget::new(self.max_states.max(1), self.max_depth.max(1));
        if let Some(w) = self.max_weight {
            budget = budget.with_weight(w);
        }
        budget
    }

    fn describe(&self) -> String {
        match self.max_weight {
            Some(w) => format!(
                "max-states {}, max-depth {}, max-weight {}",
                self.max_states, self.max_depth, w
            ),
            None => format!("max-states {}, max-depth {}", self.max_states, self.max_depth),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RelationArg {
    Strong,
    Branching,
    Dpbb,
}

impl From<RelationArg> for Relation {
    fn from(value: RelationArg) -> Relation {
        match value {
            RelationArg::Strong => Relation::Strong,
            RelationArg::Branching => Relation::Branching,
            RelationArg::Dpbb => Relation::Dpbb,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    /// Recursive specification to parallel pushdown automaton.
    SpecToPpda,
    /// Any automaton to a communicating specification with priorities.
    PpdaToSpec,
    /// One-state automaton to a basic parallel specification with priorities.
    OnestateToSpec,
}

#[derive(Subcommand)]
enum Command {
    /// Explore a process graph and dump the fragment (or DOT with --dot).
    Explore {
        file: PathBuf,
        name: String,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Emit Graphviz DOT instead of the fragment dump.
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a process graph as Graphviz DOT.
    Render {
        file: PathBuf,
        name: String,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check two process graphs for equivalence on bounded explorations.
    /// Exit code: 0 equivalent, 1 inequivalent, 2 inconclusive at horizon.
    Check {
        file_a: PathBuf,
        name_a: String,
        file_b: PathBuf,
        name_b: String,
        #[arg(long, value_enum, default_value_t = RelationArg::Dpbb)]
        relation: RelationArg,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Compile between specifications and automata; writes the artifact and
    /// a report with the embedded equivalence verdict.
    Compile {
        direction: Direction,
        file: PathBuf,
        name: String,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bring a specification into Greibach Normal Form.
    Gnf {
        file: PathBuf,
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the guardedness of a specification.
    /// Exit code: 0 guarded (strongly or weakly), 1 unguarded.
    Guardedness { file: PathBuf, name: String },
    /// List or print the bundled automata and specifications.
    Fixtures {
        /// `list`, or `show NAME`.
        #[arg(default_value = "list")]
        action: String,
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Source {
    Automaton(Box<Ppda>),
    Spec(Box<RecSpec>),
}

impl Source {
    fn name(&self) -> &str {
        match self {
            Source::Automaton(m) => m.name(),
            Source::Spec(s) => s.name(),
        }
    }

    fn graph(&self, budget: Budget) -> Result<LtsFragment, CliError> {
        match self {
            Source::Automaton(m) => Ok(explore(&m.semantics(), budget)?),
            Source::Spec(s) => Ok(explore(&s.semantics(s.initial_expr()), budget)?),
        }
    }
}

#[derive(Debug)]
struct CliError(String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn load_sources(path: &Path) -> Result<Vec<Source>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError(format!("cannot read {}: {}", path.display(), e)))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("ppda") => Ok(parse_ppda_file(&text)?
            .into_iter()
            .map(|m| Source::Automaton(Box::new(m)))
            .collect()),
        Some("spec") => Ok(parse_spec_file(&text)?
            .into_iter()
            .map(|s| Source::Spec(Box::new(s)))
            .collect()),
        other => Err(CliError(format!(
            "unknown input extension {:?} for {} (expected .ppda or .spec)",
            other,
            path.display()
        ))),
    }
}

fn resolve(path: &Path, name: &str) -> Result<Source, CliError> {
    let sources = load_sources(path)?;
    let available: Vec<String> = sources.iter().map(|s| s.name().to_string()).collect();
    sources.into_iter().find(|s| s.name() == name).ok_or_else(|| {
        CliError(format!(
            "no `{}` in {} (available: {})",
            name,
            path.display(),
            available.join(", ")
        ))
    })
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, content)
                .map_err(|e| CliError(format!("cannot write {}: {}", path.display(), e)))?;
            println!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{}", content);
            Ok(())
        }
    }
}

fn verdict_exit(verdict: &Verdict) -> ExitCode {
    match verdict.result {
        CheckResult::Equivalent => ExitCode::from(0),
        CheckResult::Inequivalent(_) => ExitCode::from(1),
        CheckResult::InconclusiveAtHorizon => ExitCode::from(2),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Explore { file, name, budget, dot, out } => {
            let source = resolve(&file, &name)?;
            let fragment = source.graph(budget.budget())?;
            let content = if dot { fragment.to_dot() } else { fragment.dump() };
            emit(&out, &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Render { file, name, budget, out } => {
            let source = resolve(&file, &name)?;
            let fragment = source.graph(budget.budget())?;
            emit(&out, &fragment.to_dot())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { file_a, name_a, file_b, name_b, relation, budget } => {
            let left = resolve(&file_a, &name_a)?;
            let right = resolve(&file_b, &name_b)?;
            let fragment_a = left.graph(budget.budget())?;
            let fragment_b = right.graph(budget.budget())?;
            let verdict = check_fragments(&fragment_a, &fragment_b, relation.into())
                .with_params(budget.describe());
            print!("{}", verdict.report());
            Ok(verdict_exit(&verdict))
        }
        Command::Compile { direction, file, name, budget, out } => {
            let source = resolve(&file, &name)?;
            match (direction, source) {
                (Direction::SpecToPpda, Source::Spec(spec)) => {
                    let compiled = bcp_spec_to_ppda(&spec)?;
                    emit(&out, &print_ppda(&compiled.ppda))?;
                    print!("{}", compiled.report());
                    let spec_budget = budget.budget();
                    let mut ppda_budget = budget.budget();
                    if let Some(w) = ppda_budget.max_weight {
                        // compiled bags also hold the re-spawned root token
                        ppda_budget.max_weight = Some(w + 1);
                    }
                    let verdict = compiled
                        .verify(&spec, spec_budget, ppda_budget)?
                        .with_params(budget.describe());
                    print!("{}", verdict.report());
                    Ok(verdict_exit(&verdict))
                }
                (Direction::PpdaToSpec, Source::Automaton(m)) => {
                    let compiled = ppda_to_bcp_theta(&m)?;
                    emit(&out, &print_spec(&compiled.spec))?;
                    print!("{}", compiled.report());
                    let verdict = compiled
                        .verify(&m, budget.budget(), budget.budget())?
                        .with_params(budget.describe());
                    print!("{}", verdict.report());
                    Ok(verdict_exit(&verdict))
                }
                (Direction::OnestateToSpec, Source::Automaton(m)) => {
                    let compiled = one_state_ppda_to_bpp_theta(&m)?;
                    emit(&out, &print_spec(&compiled.spec))?;
                    print!("{}", compiled.report());
                    let verdict = compiled
                        .verify(&m, budget.budget(), budget.budget())?
                        .with_params(budget.describe());
                    print!("{}", verdict.report());
                    Ok(verdict_exit(&verdict))
                }
                (Direction::SpecToPpda, Source::Automaton(_)) => {
                    Err(CliError("spec-to-ppda expects a .spec input".into()))
                }
                (_, Source::Spec(_)) => {
                    Err(CliError("this direction expects a .ppda input".into()))
                }
            }
        }
        Command::Gnf { file, name, out } => {
            let source = resolve(&file, &name)?;
            let Source::Spec(spec) = source else {
                return Err(CliError("gnf expects a .spec input".into()));
            };
            let gnf = to_gnf(&spec)?;
            emit(&out, &print_spec(&gnf.to_rec_spec()))?;
            if !gnf.named_components.is_empty() {
                println!("fresh identifiers:");
                for (fresh, component) in &gnf.named_components {
                    println!("  {} = {}", fresh, component);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Guardedness { file, name } => {
            let source = resolve(&file, &name)?;
            let Source::Spec(spec) = source else {
                return Err(CliError("guardedness expects a .spec input".into()));
            };
            let result = check_guardedness(&spec);
            println!("{}", result);
            match result {
                Guardedness::Unguarded { .. } => Ok(ExitCode::from(1)),
                _ => Ok(ExitCode::SUCCESS),
            }
        }
        Command::Fixtures { action, name, out } => {
            let automata = fixtures();
            let specs = builtin_specs();
            match action.as_str() {
                "list" => {
                    for (key, m) in &automata {
                        println!("{} (ppda, {} states)", key, m.states().len());
                    }
                    for (key, s) in &specs {
                        println!("{} (spec, {} equations)", key, s.equations().len());
                    }
                    Ok(ExitCode::SUCCESS)
                }
                "show" => {
                    let name =
                        name.ok_or_else(|| CliError("fixtures show needs a name".into()))?;
                    if let Some(m) = automata.get(&name) {
                        emit(&out, &print_ppda(m))?;
                    } else if let Some(s) = specs.get(&name) {
                        emit(&out, &print_spec(s))?;
                    } else {
                        let names: Vec<&str> = automata
                            .keys()
                            .chain(specs.keys())
                            .map(|n| n.as_str())
                            .collect();
                        return Err(CliError(format!(
                            "unknown fixture `{}` (available: {})",
                            name,
                            names.join(", ")
                        )));
                    }
                    Ok(ExitCode::SUCCESS)
                }
                other => {
                    Err(CliError(format!("unknown fixtures action `{}` (list, show)", other)))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(3)
        }
    }
}
