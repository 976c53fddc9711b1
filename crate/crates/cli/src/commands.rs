//! Argument parsing, command dispatch, and error rendering.
//!
//! Every command prints a single pretty-printed JSON document on stdout.
//! Failures print `{"error": {"kind", "pointer", "message"}}` on stderr
//! and map onto stable exit codes:
//!
//! | code | meaning                                                |
//! |------|--------------------------------------------------------|
//! | 0    | success; for `check`/`search`, the bounds held         |
//! | 2    | a built-in regression check failed                     |
//! | 3    | a bound violation was found                            |
//! | 64   | input could not be read or parsed, or bad usage        |
//! | 65   | input parsed but failed validation                     |
//! | 66   | a resource limit was exceeded                          |
//! | 67   | the model has trajectories with infinite entropy production |

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use infobound::bounds::{self, Verdict};
use infobound::{fluctuation, search};

use crate::docs::{ChainDocument, DocError, ModelDocument};
use crate::report::{
    AveragesDto, BoundsDto, ChainGapDto, CheckDto, DimsDto, JarzynskiDto, MutualDto, OracleDto,
    SearchDto, Units, VerifyDto,
};

#[derive(Parser)]
#[command(
    name = "infobound",
    version,
    about = "Information bounds and fluctuation identities on finite measurement chains"
)]
struct Cli {
    /// Report information quantities in bits instead of nats.
    #[arg(long, global = true)]
    bits: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute the two built-in counterexample chains and verify their
    /// reports against the expected values.
    VerifyExamples,
    /// Evaluate the candidate bounds on a chain document.
    Check(CheckArgs),
    /// Search chain space for bound violations.
    Search(SearchArgs),
    /// Average the generalized fluctuation identity on a feedback model.
    Jarzynski(JarzynskiArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Path to a chain document; `-` reads from stdin.
    input: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    /// Minimize I_QC, probing the lower bound.
    MinimizeIqc,
    /// Maximize I_QC - H(k), probing the upper bound.
    MaximizeIqcMinusHk,
}

impl ObjectiveArg {
    fn to_core(self) -> search::Objective {
        match self {
            ObjectiveArg::MinimizeIqc => search::Objective::MinimizeIqc,
            ObjectiveArg::MaximizeIqcMinusHk => search::Objective::MaximizeIqcMinusHk,
        }
    }

    fn label(self) -> &'static str {
        match self {
            ObjectiveArg::MinimizeIqc => "minimize_iqc",
            ObjectiveArg::MaximizeIqcMinusHk => "maximize_iqc_minus_hk",
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    /// Alphabet sizes of the final, outcome, and initial variables.
    #[arg(long, required = true, num_args = 3, value_names = ["N2", "NK", "N1"])]
    dims: Vec<usize>,

    #[arg(long, value_enum, default_value_t = ObjectiveArg::MinimizeIqc)]
    objective: ObjectiveArg,

    /// Independent Nelder-Mead restarts.
    #[arg(long, default_value_t = 50)]
    restarts: usize,

    /// Seed for the restart ensemble; falls back to INFOBOUND_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,

    /// Total objective-evaluation budget across all restarts.
    #[arg(long, default_value_t = 50_000)]
    budget: u64,

    /// Also run the brute-force grid oracle with this many steps per axis.
    #[arg(long)]
    oracle_steps: Option<usize>,

    /// Write the report to this file in addition to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Sum the identity over every trajectory.
    Exhaustive,
    /// Estimate the identity by sampling forward trajectories.
    Mc,
}

impl ModeArg {
    fn label(self) -> &'static str {
        match self {
            ModeArg::Exhaustive => "exhaustive",
            ModeArg::Mc => "mc",
        }
    }
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["model", "from_chain"]))]
struct JarzynskiArgs {
    /// Path to a feedback-model document; `-` reads from stdin.
    #[arg(long)]
    model: Option<PathBuf>,

    /// Build the zero-entropy-production model embedding this chain
    /// document instead of reading a model.
    #[arg(long)]
    from_chain: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,

    /// Sample count (mc mode only).
    #[arg(long, default_value_t = 100_000)]
    samples: u64,

    /// Sampling seed (mc mode only); falls back to INFOBOUND_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
}

/// A rendered failure: what to print on stderr and which code to exit with.
struct Failure {
    kind: &'static str,
    exit: u8,
    pointer: Option<String>,
    message: String,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    pointer: Option<&'a str>,
    message: &'a str,
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    error: ErrorBody<'a>,
}

impl Failure {
    fn parse(pointer: Option<String>, message: String) -> Self {
        Self {
            kind: "parse",
            exit: 64,
            pointer,
            message,
        }
    }

    fn io(message: String) -> Self {
        Self {
            kind: "io",
            exit: 64,
            pointer: None,
            message,
        }
    }

    fn core(pointer: Option<String>, err: infobound::Error) -> Self {
        let (kind, exit) = match &err {
            infobound::Error::InfiniteSigma { .. } => ("infinite_sigma", 67),
            infobound::Error::ResourceLimit(_) => ("resource_limit", 66),
            infobound::Error::SelfCheck(_) => ("regression", 2),
            _ => ("validation", 65),
        };
        Self {
            kind,
            exit,
            pointer,
            message: err.to_string(),
        }
    }

    fn render(&self) -> String {
        let doc = ErrorDoc {
            error: ErrorBody {
                kind: self.kind,
                pointer: self.pointer.as_deref(),
                message: &self.message,
            },
        };
        serde_json::to_string(&doc).expect("error reports contain only strings")
    }
}

impl From<DocError> for Failure {
    fn from(err: DocError) -> Self {
        Failure::core(err.pointer, err.source)
    }
}

impl From<infobound::Error> for Failure {
    fn from(err: infobound::Error) -> Self {
        Failure::core(None, err)
    }
}

/// Parses `args` and runs the selected command, writing the report to
/// stdout. Returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut stdout = std::io::stdout();
    run_with(args, &mut stdout)
}

/// Like [`run`], but writes the report to the given sink so callers can
/// capture it in process. Diagnostics still go to stderr.
pub fn run_with<I, T>(args: I, out: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version arrive here too; those print on stdout
            // and succeed, while genuine usage errors exit with 64.
            let code = if err.use_stderr() { 64 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    let units = if cli.bits { Units::Bits } else { Units::Nats };
    let outcome = match cli.command {
        Command::VerifyExamples => verify_examples(units, out),
        Command::Check(args) => check(&args, units, out),
        Command::Search(args) => run_search(&args, units, out),
        Command::Jarzynski(args) => jarzynski(&args, units, out),
    };
    outcome.unwrap_or_else(|failure| {
        eprintln!("{}", failure.render());
        failure.exit
    })
}

fn emit<T: Serialize>(out: &mut dyn Write, dto: &T) -> Result<String, Failure> {
    let rendered = serde_json::to_string_pretty(dto)
        .map_err(|e| Failure::io(format!("cannot render the report: {e}")))?;
    writeln!(out, "{rendered}")
        .map_err(|e| Failure::io(format!("cannot write the report: {e}")))?;
    Ok(rendered)
}

fn read_document<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let raw = if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map(|_| buf)
            .map_err(|e| Failure::io(format!("cannot read stdin: {e}")))
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))
    }?;
    let mut deserializer = serde_json::Deserializer::from_str(&raw);
    serde_path_to_error::deserialize(&mut deserializer)
        .map_err(|e| Failure::parse(pointer_of(e.path()), e.inner().to_string()))
}

/// Renders a deserialization path as a JSON pointer, or `None` at the root.
fn pointer_of(path: &serde_path_to_error::Path) -> Option<String> {
    use serde_path_to_error::Segment;
    let mut pointer = String::new();
    for segment in path.iter() {
        match segment {
            Segment::Map { key } => {
                pointer.push('/');
                pointer.push_str(&key.replace('~', "~0").replace('/', "~1"));
            }
            Segment::Seq { index } => {
                pointer.push('/');
                pointer.push_str(&index.to_string());
            }
            Segment::Enum { variant } => {
                pointer.push('/');
                pointer.push_str(variant);
            }
            Segment::Unknown => {}
        }
    }
    (!pointer.is_empty()).then_some(pointer)
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("INFOBOUND_SEED") {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            Failure::parse(None, format!("INFOBOUND_SEED is not a valid seed: {raw:?}"))
        }),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(std::env::VarError::NotUnicode(_)) => Err(Failure::parse(
            None,
            "INFOBOUND_SEED is not valid unicode".into(),
        )),
    }
}

fn verify_examples(units: Units, out: &mut dyn Write) -> Result<u8, Failure> {
    let (first, second) = bounds::verify_fixtures().map_err(Failure::from)?;
    let dto = VerifyDto {
        status: "ok",
        units: units.label(),
        example1: BoundsDto::new(&first, units),
        example2: BoundsDto::new(&second, units),
    };
    emit(out, &dto)?;
    Ok(0)
}

fn check(args: &CheckArgs, units: Units, out: &mut dyn Write) -> Result<u8, Failure> {
    let doc: ChainDocument = read_document(&args.input)?;
    let chain = doc.to_chain()?;
    let report = bounds::check_bounds(&chain);
    let mutual = bounds::check_mutual_bounds(&chain);
    let holds = report.verdict == Verdict::Holds;
    let dto = CheckDto {
        units: units.label(),
        bounds: BoundsDto::new(&report, units),
        mutual: MutualDto::new(&mutual, units),
    };
    emit(out, &dto)?;
    Ok(if holds { 0 } else { 3 })
}

/// The objective's natural value: search minimizes internally, so the
/// maximization objective reports the negated optimum.
fn natural_value(objective: search::Objective, minimized: f64) -> f64 {
    match objective {
        search::Objective::MinimizeIqc => minimized,
        search::Objective::MaximizeIqcMinusHk => {
            if minimized == 0.0 {
                0.0
            } else {
                -minimized
            }
        }
    }
}

fn run_search(args: &SearchArgs, units: Units, out: &mut dyn Write) -> Result<u8, Failure> {
    let dims = (args.dims[0], args.dims[1], args.dims[2]);
    let seed = resolve_seed(args.seed)?;
    let objective = args.objective.to_core();
    let result = search::search(dims, objective, args.restarts, seed, args.budget)?;
    let report = bounds::check_bounds(&result.best_chain);
    let holds = report.verdict == Verdict::Holds;

    let oracle = args
        .oracle_steps
        .map(|steps| {
            search::grid_oracle(dims, objective, steps).map(|minimum| OracleDto {
                steps,
                value: units.scale(natural_value(objective, minimum)),
            })
        })
        .transpose()?;

    let dto = SearchDto {
        units: units.label(),
        objective: args.objective.label(),
        dims: [dims.0, dims.1, dims.2],
        seed,
        restarts: result.restarts_run,
        budget: args.budget,
        evaluations: result.evaluations,
        converged: result.converged,
        best_value: units.scale(natural_value(objective, result.best_value)),
        oracle,
        bounds: BoundsDto::new(&report, units),
        best_chain: ChainDocument::from_chain(&result.best_chain),
    };
    let rendered = emit(out, &dto)?;
    if let Some(path) = &args.out {
        std::fs::write(path, format!("{rendered}\n"))
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(if holds { 0 } else { 3 })
}

fn jarzynski(args: &JarzynskiArgs, units: Units, out: &mut dyn Write) -> Result<u8, Failure> {
    let (model, chain) = match (&args.model, &args.from_chain) {
        (Some(path), None) => {
            let doc: ModelDocument = read_document(path)?;
            (doc.to_model()?, None)
        }
        (None, Some(path)) => {
            let doc: ChainDocument = read_document(path)?;
            let chain = doc.to_chain()?;
            let model = fluctuation::build_zero_sigma_model(&chain);
            (model, Some(chain))
        }
        _ => unreachable!("clap enforces exactly one model source"),
    };

    let chain_dto = chain
        .map(|chain| {
            let averages = fluctuation::averages(&model)?;
            let gap = fluctuation::conjecture_gap(&model, &chain)?;
            Ok::<_, infobound::Error>(ChainGapDto {
                iqc: units.scale(gap.iqc),
                avg_sigma: units.scale(averages.avg_sigma),
                avg_ic: units.scale(gap.avg_ic),
                gap: units.scale(gap.gap),
                sigma_plus_iqc: units.scale(averages.avg_sigma + gap.iqc),
            })
        })
        .transpose()?;

    let dims = DimsDto {
        n0: model.n0(),
        n_outcomes: model.n_outcomes(),
        n1: model.n1(),
    };
    let dto = match args.mode {
        ModeArg::Exhaustive => {
            let value = fluctuation::jarzynski_exhaustive(&model)?;
            let averages = fluctuation::averages(&model)?;
            JarzynskiDto {
                units: units.label(),
                mode: args.mode.label(),
                dims,
                jarzynski: Some(value),
                averages: Some(AveragesDto::new(&averages, units)),
                estimate: None,
                std_error: None,
                samples: None,
                seed: None,
                chain: chain_dto,
            }
        }
        ModeArg::Mc => {
            let seed = resolve_seed(args.seed)?;
            let estimate = fluctuation::jarzynski_montecarlo(&model, args.samples, seed)?;
            JarzynskiDto {
                units: units.label(),
                mode: args.mode.label(),
                dims,
                jarzynski: None,
                averages: None,
                estimate: Some(estimate.estimate),
                std_error: Some(estimate.std_error),
                samples: Some(args.samples),
                seed: Some(seed),
                chain: chain_dto,
            }
        }
    };
    emit(out, &dto)?;
    Ok(0)
}
