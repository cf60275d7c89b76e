mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use normloop::NormalForm;

#[derive(Parser)]
#[command(name = "normloop", version, about = "Relational schema normalization with a generate/verify refinement loop")]
struct Cli {
    /// Log to stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a DDL file and print its canonical JSON interchange form.
    Parse(ParseArgs),
    /// Check a schema against 1NF to 3NF.
    Verify(VerifyArgs),
    /// Run the refinement loop and print the final schema.
    Normalize(NormalizeArgs),
    /// Plant seeded anomalies in a clean schema.
    Inject(InjectArgs),
    /// Run inject, refine, score trials on a bundled dataset.
    Bench(BenchArgs),
    /// Print a generation or verification prompt with its token estimate.
    Prompt(PromptArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendChoice {
    Det,
    Llm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PromptMode {
    Gen,
    Ver,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatChoice {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
pub struct ConfigArgs {
    /// Backend config file (default: ./normloop.toml when present).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args)]
pub struct ParseArgs {
    /// DDL file, or the name of a bundled dataset.
    pub file: String,
}

#[derive(Args)]
pub struct VerifyArgs {
    pub file: String,
    #[arg(long, default_value = "3")]
    pub nf: NormalForm,
    #[arg(long, value_enum, default_value_t = BackendChoice::Det)]
    pub backend: BackendChoice,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Args)]
pub struct NormalizeArgs {
    pub file: String,
    /// Backend for both roles.
    #[arg(long, value_enum, default_value_t = BackendChoice::Det)]
    pub backend: BackendChoice,
    /// Generation backend, overriding --backend.
    #[arg(long, value_enum)]
    pub generator: Option<BackendChoice>,
    /// Verification backend, overriding --backend.
    #[arg(long, value_enum)]
    pub verifier: Option<BackendChoice>,
    #[arg(long, default_value_t = normloop::refine::DEFAULT_MAX_ATTEMPTS)]
    pub max_attempts: u32,
    #[arg(long, default_value_t = normloop::refine::DEFAULT_HARD_CAP)]
    pub hard_cap: u32,
    #[arg(long, default_value = "3")]
    pub target: NormalForm,
    /// Examples in the generation prompt: 0, 1 or few.
    #[arg(long, default_value = "0")]
    pub shots: normloop::prompt::ShotMode,
    /// Write the full transcript as JSON.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Args)]
pub struct InjectArgs {
    pub file: String,
    #[arg(long)]
    pub nf: NormalForm,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub count: u32,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Bundled dataset name (Orders, Advertising, AirportDB) or a DDL file.
    #[arg(long)]
    pub schema: String,
    #[arg(long)]
    pub nf: NormalForm,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub count: u32,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub trials: u32,
    #[arg(long)]
    pub seed: u64,
    #[arg(long = "gen", value_enum, default_value_t = BackendChoice::Det)]
    pub generator: BackendChoice,
    #[arg(long = "ver", value_enum, default_value_t = BackendChoice::Det)]
    pub verifier: BackendChoice,
    #[arg(long, default_value_t = normloop::refine::DEFAULT_MAX_ATTEMPTS)]
    pub max_attempts: u32,
    #[arg(long, default_value_t = normloop::refine::DEFAULT_HARD_CAP)]
    pub hard_cap: u32,
    #[arg(long, default_value = "0")]
    pub shots: normloop::prompt::ShotMode,
    /// Worker threads (default: logical CPUs).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,
    /// Also write the report to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatChoice::Text)]
    pub format: FormatChoice,
    /// Write every trial's ground truth and transcript as JSON.
    #[arg(long)]
    pub runs: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Args)]
pub struct PromptArgs {
    #[arg(long, value_enum)]
    pub mode: PromptMode,
    #[arg(long, default_value = "0")]
    pub shots: normloop::prompt::ShotMode,
    /// DDL file, or the name of a bundled dataset.
    #[arg(long)]
    pub schema: String,
    #[arg(long, default_value = "3")]
    pub nf: NormalForm,
    /// Feedback text to include, read from a file.
    #[arg(long)]
    pub feedback: Option<PathBuf>,
    /// Template file replacing the built-in one.
    #[arg(long)]
    pub template: Option<PathBuf>,
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => tracing::Level::WARN,
        1 => tracing::Level::INFO,
        _ => tracing::Level::DEBUG,
    };
    tracing_subscriber::fmt().with_writer(std::io::stderr).with_max_level(level).with_target(false).init();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.verbose);
    let result = match cli.command {
        Command::Parse(a) => commands::parse(a),
        Command::Verify(a) => commands::verify(a),
        Command::Normalize(a) => commands::normalize(a),
        Command::Inject(a) => commands::inject(a),
        Command::Bench(a) => commands::bench(a),
        Command::Prompt(a) => commands::prompt(a),
    };
    match result {
        Ok(code) => code.into(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code().into()
        }
    }
}
