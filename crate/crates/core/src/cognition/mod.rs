//! Memory analysis, record retrieval, prompt construction and parameter
//! tuning.

pub mod database;
pub mod llm;
pub mod memory;
pub mod prompt;
pub mod retrieval;
pub mod tuner;

use thiserror::Error;

pub use database::{ParameterRecord, VectorDatabase, DB_FILE_NAME};
pub use llm::{HttpLlm, LlmClient, Suggestion};
pub use memory::{estimate_memory, probe_memory, MEMORY_ENV};
pub use prompt::build_prompt;
pub use retrieval::{retrieve_similar, Retrieved, TuningQuery};
pub use tuner::{tune_parameters, TuneOutcome, TuneSource};

#[derive(Debug, Error, PartialEq)]
pub enum CognitionError {
    #[error("memory probe: {0}")]
    Memory(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("the parameter database is empty")]
    ColdStart,
    #[error("parameter database: {0}")]
    Database(String),
    #[error("I/O: {0}")]
    Io(String),
    #[error("LLM: {0}")]
    Llm(String),
}
