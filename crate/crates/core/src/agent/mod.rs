//! Conversational front end: intent parsing, the leader/worker
//! orchestration and a line-oriented REPL.

pub mod intent;
pub mod log;
pub mod orchestrate;

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::cognition::CognitionError;
use crate::pipeline::PipelineError;

pub use intent::{parse_intent, IntentError, ParsedRequest, TaskType};
pub use log::{Level, Logger, SharedBuffer};
pub use orchestrate::{archive_path, restored_path, Agent, AgentOptions, FileOutcome, ARCHIVE_EXT};

#[derive(Debug, Error, PartialEq)]
pub enum AgentError {
    #[error("{0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl AgentError {
    /// Process exit status for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            AgentError::Parse(_) => 2,
            AgentError::Io(_) => 3,
            AgentError::Integrity(_) => 4,
            AgentError::Internal(_) => 5,
        }
    }
}

impl From<IntentError> for AgentError {
    fn from(e: IntentError) -> Self {
        AgentError::Parse(e.to_string())
    }
}

impl From<CognitionError> for AgentError {
    fn from(e: CognitionError) -> Self {
        match e {
            CognitionError::Io(m) => AgentError::Io(m),
            other => AgentError::Internal(other.to_string()),
        }
    }
}

impl From<PipelineError> for AgentError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::BadMagic
            | PipelineError::UnsupportedVersion(_)
            | PipelineError::Truncated
            | PipelineError::Corrupt(_)
            | PipelineError::IntegrityMismatch
            | PipelineError::Coder(_) => AgentError::Integrity(e.to_string()),
            PipelineError::Config(_) => AgentError::Parse(e.to_string()),
            other => AgentError::Internal(other.to_string()),
        }
    }
}

pub const PROMPT: &str = "agentgc> ";

/// Parses and runs one utterance. Returns per-file outcomes.
pub fn handle(agent: &Agent, utterance: &str) -> Result<Vec<FileOutcome>, AgentError> {
    let req = parse_intent(utterance)?;
    Ok(agent.run(&req))
}

/// Exit status summarising a batch: 0 if every file succeeded, otherwise
/// the code of the first failure.
pub fn exit_status(outcomes: &[FileOutcome]) -> i32 {
    outcomes.iter().find_map(|o| o.result.as_ref().err().map(AgentError::exit_code)).unwrap_or(0)
}

/// Reads utterances line by line until `exit`, `quit` or end of input.
/// Each request is echoed as JSON, followed by one report line per file;
/// clarification questions are plain text.
pub fn repl<R: BufRead, W: Write>(agent: &Agent, input: R, mut out: W) -> std::io::Result<()> {
    writeln!(out, "agentgc ready. describe a compression task, or type exit.")?;
    let mut lines = input.lines();
    loop {
        write!(out, "{PROMPT}")?;
        out.flush()?;
        let Some(line) = lines.next() else { break };
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if matches!(text.to_ascii_lowercase().as_str(), "exit" | "quit") {
            break;
        }
        match parse_intent(text) {
            Ok(req) => {
                writeln!(out, "{}", req.to_json())?;
                for o in agent.run(&req) {
                    match o.result {
                        Ok(report) => writeln!(out, "{}", report.to_json())?,
                        Err(e) => writeln!(out, "{}: {e}", o.path.display())?,
                    }
                }
            }
            Err(e) => writeln!(out, "{}", AgentError::from(e))?,
        }
        out.flush()?;
    }
    writeln!(out)?;
    Ok(())
}
