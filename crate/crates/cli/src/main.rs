use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use groundness::corpus::compare;
use groundness::deps::{minimal_implications, DepsError, Site};
use groundness::engine::{analyze, instantiate_result, mono_entry, poly_entry, EngineError, Options};
use groundness::mono::Mode;
use groundness::oracle::suite::{run_all, CheckConfig};
use groundness::poly::{Assignment, Params, PolyError};
use groundness::report::Report;
use groundness::syntax::{parse_program, Program};

#[derive(Parser)]
#[command(name = "groundness", version, about = "Groundness analysis for a Prolog subset")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Domain {
    Mono,
    Poly,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a program from its `:- analyze(...)` directive.
    Analyze {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "poly")]
        mode: Domain,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Parameter modes for a mono run, e.g. `alpha=g,beta=u`.
        #[arg(long)]
        assign: Option<String>,
        #[arg(long, default_value_t = Options::default().iteration_cap)]
        iteration_cap: usize,
    },
    /// Analyze polymorphically, then instantiate under a total assignment.
    Instantiate {
        file: PathBuf,
        #[arg(long)]
        assign: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Groundness implications at the goal and at every program point.
    Deps { file: PathBuf },
    /// Run the oracle suites.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random instances per randomized suite; 0 runs only the
        /// exhaustive suites.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        max_params: usize,
    },
    /// Analyze every `.pl` file in a directory both ways and report the
    /// polymorphic/monomorphic time ratio.
    Corpus { dir: PathBuf },
}

/// An error with its exit code.
struct Failure(u8, String);

fn input(msg: impl ToString) -> Failure {
    Failure(1, msg.to_string())
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match e {
            EngineError::Poly(_) | EngineError::MissingAssignment(_) => 1,
            _ => 2,
        };
        Failure(code, e.to_string())
    }
}

impl From<PolyError> for Failure {
    fn from(e: PolyError) -> Self {
        input(e)
    }
}

fn load(path: &Path) -> Result<Program, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    parse_program(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn parse_assign(params: &Params, text: &str) -> Result<Assignment, Failure> {
    let mut pairs = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, mode) = part.split_once('=').ok_or_else(|| input(format!("expected name=g|u, got `{part}`")))?;
        let mode =
            Mode::parse(mode.trim()).ok_or_else(|| input(format!("`{}` is not a mode (g or u)", mode.trim())))?;
        pairs.push((name.trim().to_string(), mode));
    }
    Ok(Assignment::from_pairs(params, &pairs)?)
}

fn emit(report: &Report, format: Format) {
    match format {
        Format::Text => print!("{}", report.text()),
        Format::Json => println!("{}", report.json().to_string_pretty()),
    }
}

fn cmd_analyze(file: &Path, mode: Domain, format: Format, assign: Option<&str>, cap: usize) -> Result<(), Failure> {
    let program = load(file)?;
    let d = &program.directive;
    let opts = Options { iteration_cap: cap, ..Options::default() };
    let (params, poly_input) = poly_entry(d)?;
    let report = match mode {
        Domain::Poly => {
            if assign.is_some() {
                return Err(input("--assign applies to --mode mono; use `instantiate` for poly results"));
            }
            Report::poly(&program, &params, &analyze(&program, &d.goal, &poly_input, &opts)?)
        }
        Domain::Mono => {
            let kappa = assign.map(|a| parse_assign(&params, a)).transpose()?;
            let input = mono_entry(d, kappa.as_ref().map(|k| (&params, k)))?;
            Report::mono(&program, &analyze(&program, &d.goal, &input, &opts)?)
        }
    };
    emit(&report, format);
    Ok(())
}

fn cmd_instantiate(file: &Path, assign: &str, format: Format) -> Result<(), Failure> {
    let program = load(file)?;
    let d = &program.directive;
    let (params, input) = poly_entry(d)?;
    let kappa = parse_assign(&params, assign)?;
    let result = analyze(&program, &d.goal, &input, &Options::default())?;
    let report = Report::mono(&program, &instantiate_result(&result, &kappa))
        .with_note(format!("instantiated under {}", kappa.render(&params)));
    emit(&report, format);
    Ok(())
}

fn cmd_deps(file: &Path) -> Result<(), Failure> {
    let program = load(file)?;
    let d = &program.directive;
    let (_, input) = poly_entry(d)?;
    let result = analyze(&program, &d.goal, &input, &Options::default())?;
    let sites = std::iter::once((Site::Goal, &result.goal_output))
        .chain(result.points.iter().map(|(p, abs)| (Site::Point(*p), abs)));
    for (site, abs) in sites {
        match minimal_implications(abs, site) {
            Ok(found) => found.iter().for_each(|i| println!("{i}")),
            Err(DepsError::BudgetExceeded(n)) => eprintln!("skipping {site}: {n} variables in scope"),
            Err(e) => return Err(Failure(2, e.to_string())),
        }
    }
    Ok(())
}

fn cmd_check(config: CheckConfig) -> Result<(), Failure> {
    let reports = run_all(&config);
    let mut failed = false;
    for r in &reports {
        println!("{r}");
        failed |= !r.passed();
    }
    if failed {
        Err(Failure(3, "some checks failed".into()))
    } else {
        Ok(())
    }
}

fn cmd_corpus(dir: &Path) -> Result<(), Failure> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| input(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "pl"))
        .collect();
    files.sort();
    let programs = files.iter().map(|f| load(f)).collect::<Result<Vec<_>, _>>()?;
    // Sequential on purpose: parallel runs would distort the timings.
    let results = programs.iter().map(|p| compare(p, &Options::default(), Duration::from_millis(20)));
    let mut worst: Option<Failure> = None;
    for (file, r) in files.iter().zip(results) {
        let name = file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        match r {
            Ok(c) => println!("{name:<16} {c}"),
            Err(e) => {
                eprintln!("{name}: {e}");
                worst.get_or_insert(Failure::from(e));
            }
        }
    }
    worst.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze { file, mode, format, assign, iteration_cap } => {
            cmd_analyze(&file, mode, format, assign.as_deref(), iteration_cap)
        }
        Command::Instantiate { file, assign, format } => cmd_instantiate(&file, &assign, format),
        Command::Deps { file } => cmd_deps(&file),
        Command::Check { seed, trials, depth, max_params } => {
            cmd_check(CheckConfig { seed, trials, depth, max_params })
        }
        Command::Corpus { dir } => cmd_corpus(&dir),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("groundness: {msg}");
            ExitCode::from(code)
        }
    }
}
