use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use agentgc_core::agent::{
    exit_status, parse_intent, repl, Agent, AgentError, AgentOptions, FileOutcome, Level, Logger, ParsedRequest,
    TaskType,
};
use agentgc_core::cognition::{HttpLlm, LlmClient, DB_FILE_NAME};
use agentgc_core::config::{Mode, DEFAULT_SEED};
use agentgc_core::metrics::{compression_ratio, throughput, MetricSample};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "agentgc", version, about = "Learning-based lossless DNA compressor with automatic parameter tuning")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Parameter database (created from the bundled records if missing).
    #[arg(long, global = true, env = "AGENTGC_DB", default_value = DB_FILE_NAME)]
    db: PathBuf,
    /// Seed stored in each archive.
    #[arg(long, global = true, env = "AGENTGC_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Maximum number of files processed at once.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Decompress each archive right after writing it and compare hashes.
    #[arg(long, global = true)]
    verify: bool,
    /// Only log warnings and errors.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one natural-language request.
    Say { utterance: Vec<String> },
    /// Interactive session; type exit to leave.
    Repl,
    /// Compress a file or every file in a directory.
    Compress {
        path: PathBuf,
        /// 0 = compression ratio, 1 = throughput, 2 = balanced.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(0..=2))]
        mode: u8,
        /// Fraction of available memory in (0, 1]; values above 1 are read as percentages.
        #[arg(long, default_value_t = 0.7)]
        memory_percent: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Restore a file or every `.aggc` archive in a directory.
    Decompress {
        path: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compression ratio and throughput from sizes and time.
    Metrics { original_bytes: u64, compressed_bytes: u64, seconds: f64 },
}

fn memory_fraction(v: f64) -> Result<f64, AgentError> {
    let f = if v > 1.0 { v / 100.0 } else { v };
    if f > 0.0 && f <= 1.0 {
        Ok(f)
    } else {
        Err(AgentError::Parse(format!("memory percentage {v} is outside (0, 100]")))
    }
}

fn build_agent(common: &Common, output: Option<PathBuf>) -> Result<Agent, AgentError> {
    let log = Logger::stderr().with_min_level(if common.quiet { Level::Warn } else { Level::Info });
    let mut opts = AgentOptions {
        db_path: common.db.clone(),
        seed: common.seed,
        verify: common.verify,
        output,
        llm: HttpLlm::from_env().map(|c| Arc::new(c) as Arc<dyn LlmClient>),
        ..AgentOptions::default()
    };
    if let Some(w) = common.workers {
        opts.workers = w.max(1);
    }
    Agent::new(opts, log)
}

fn print_outcomes(outcomes: &[FileOutcome]) -> i32 {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for o in outcomes {
        match &o.result {
            Ok(report) => {
                let _ = writeln!(out, "{}", report.to_json());
            }
            Err(e) => eprintln!("{}: {e}", o.path.display()),
        }
    }
    exit_status(outcomes)
}

fn run_request(common: &Common, req: &ParsedRequest, output: Option<PathBuf>) -> Result<i32, AgentError> {
    let agent = build_agent(common, output)?;
    Ok(print_outcomes(&agent.run(req)))
}

fn run(cli: Cli) -> Result<i32, AgentError> {
    let common = &cli.common;
    match cli.command {
        Command::Say { utterance } => {
            let req = parse_intent(&utterance.join(" "))?;
            println!("{}", req.to_json());
            run_request(common, &req, None)
        }
        Command::Repl => {
            let agent = build_agent(common, None)?;
            repl(&agent, std::io::stdin().lock(), std::io::stdout()).map_err(|e| AgentError::Io(e.to_string()))?;
            Ok(0)
        }
        Command::Compress { path, mode, memory_percent, output } => {
            let mode = Mode::try_from(mode).map_err(|e| AgentError::Parse(e.to_string()))?;
            let req = ParsedRequest {
                task_type: TaskType::Compress,
                file_path: path.display().to_string(),
                memory_percent: Some(memory_fraction(memory_percent)?),
                mode: Some(mode),
            };
            run_request(common, &req, output)
        }
        Command::Decompress { path, output } => {
            let req = ParsedRequest {
                task_type: TaskType::Decompress,
                file_path: path.display().to_string(),
                memory_percent: None,
                mode: None,
            };
            run_request(common, &req, output)
        }
        Command::Metrics { original_bytes, compressed_bytes, seconds } => {
            let s = MetricSample::new(original_bytes, compressed_bytes, seconds);
            let cr = compression_ratio(&s).map_err(|e| AgentError::Parse(e.to_string()))?;
            let thp = throughput(&s).map_err(|e| AgentError::Parse(e.to_string()))?;
            println!("{{\"cr_bits_per_base\":{cr},\"throughput_kb_s\":{thp}}}");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("agentgc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
