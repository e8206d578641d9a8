//! Rule grammar turning a user utterance into a request.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Mode;

pub const DEFAULT_MEMORY_PERCENT: f64 = 0.7;
pub const DEFAULT_MODE: Mode = Mode::Bm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskType {
    Compress,
    Decompress,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedRequest {
    pub task_type: TaskType,
    pub file_path: String,
    pub memory_percent: Option<f64>,
    pub mode: Option<Mode>,
}

impl ParsedRequest {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("request serializes")
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum IntentError {
    #[error("please say what you want to do")]
    Empty,
    #[error("do you want to compress or decompress a file?")]
    NoTask,
    #[error("which file? give its absolute path, for example /data/genome.fa")]
    NoPath,
    #[error("memory percentage must be between 1 and 100, got {0}")]
    BadPercent(String),
}

const CP_CUES: [&str; 2] = ["least disk space", "long time"];
const TP_CUES: [&str; 2] = ["as soon as possible", "fastest"];
const BM_CUES: [&str; 2] = ["balance", "balanced"];

fn is_absolute_path(token: &str) -> bool {
    let b = token.as_bytes();
    token.starts_with('/') || (b.len() >= 3 && b[0].is_ascii_alphabetic() && b[1] == b':' && (b[2] == b'\\' || b[2] == b'/'))
}

fn clean_token(token: &str) -> &str {
    token
        .trim_end_matches([',', ';', ':', '!', '?', '.'])
        .trim_matches(|c: char| matches!(c, '"' | '\'' | '`'))
        .trim_end_matches([',', ';', ':', '!', '?'])
}

/// Earliest mode cue in `text`, if any.
fn find_mode(text: &str) -> Option<Mode> {
    let mut hits: Vec<(usize, Mode)> = Vec::new();
    let mut add = |cues: &[&str], mode| {
        if let Some(pos) = cues.iter().filter_map(|c| text.find(c)).min() {
            hits.push((pos, mode));
        }
    };
    add(&CP_CUES, Mode::Cp);
    add(&TP_CUES, Mode::Tp);
    add(&BM_CUES, Mode::Bm);
    if let Some(start) = text.find("as little") {
        if text[start..].contains("as possible") {
            hits.push((start, Mode::Cp));
        }
    }
    hits.into_iter().min_by_key(|&(pos, _)| pos).map(|(_, m)| m)
}

/// `<n> percent` or `<n>%`, as a fraction.
fn find_percent(tokens: &[&str]) -> Result<Option<f64>, IntentError> {
    for (i, tok) in tokens.iter().enumerate() {
        let t = clean_token(tok);
        let number = if let Some(n) = t.strip_suffix('%') {
            Some(n)
        } else if tokens.get(i + 1).is_some_and(|next| clean_token(next).eq_ignore_ascii_case("percent")) {
            Some(t)
        } else {
            None
        };
        if let Some(n) = number {
            let v: f64 = n.parse().map_err(|_| IntentError::BadPercent(n.to_string()))?;
            if !(v > 0.0 && v <= 100.0) {
                return Err(IntentError::BadPercent(n.to_string()));
            }
            return Ok(Some(v / 100.0));
        }
    }
    Ok(None)
}

pub fn parse_intent(utterance: &str) -> Result<ParsedRequest, IntentError> {
    let text = utterance.trim();
    if text.is_empty() {
        return Err(IntentError::Empty);
    }
    let lower = text.to_lowercase();
    let task_type = if lower.contains("decompress") {
        TaskType::Decompress
    } else if lower.contains("compress") {
        TaskType::Compress
    } else {
        return Err(IntentError::NoTask);
    };
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let file_path = tokens
        .iter()
        .map(|t| clean_token(t))
        .find(|t| is_absolute_path(t))
        .ok_or(IntentError::NoPath)?
        .to_string();

    Ok(match task_type {
        TaskType::Decompress => ParsedRequest { task_type, file_path, memory_percent: None, mode: None },
        TaskType::Compress => ParsedRequest {
            task_type,
            file_path,
            memory_percent: Some(find_percent(&tokens)?.unwrap_or(DEFAULT_MEMORY_PERCENT)),
            mode: Some(find_mode(&lower).unwrap_or(DEFAULT_MODE)),
        },
    })
}
