//! Optional chat-completion client and parsing of its parameter reply.

use std::time::Duration;

use serde_json::{json, Value};

use super::CognitionError;

pub const ENDPOINT_ENV: &str = "AGENTGC_LLM_ENDPOINT";
pub const KEY_ENV: &str = "AGENTGC_LLM_KEY";
pub const MODEL_ENV: &str = "AGENTGC_LLM_MODEL";

pub trait LlmClient: Send + Sync {
    /// Sends `prompt` as a single user message and returns the reply text.
    fn complete(&self, prompt: &str) -> Result<String, CognitionError>;
}

/// HTTP client for an OpenAI-style chat endpoint.
#[derive(Debug, Clone)]
pub struct HttpLlm {
    pub endpoint: String,
    pub key: Option<String>,
    pub model: String,
    pub timeout: Duration,
    pub retries: usize,
}

impl HttpLlm {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            key: None,
            model: "default".into(),
            timeout: Duration::from_secs(10),
            retries: 1,
        }
    }

    /// Client configured from `AGENTGC_LLM_*`, or `None` without an endpoint.
    pub fn from_env() -> Option<Self> {
        let endpoint = std::env::var(ENDPOINT_ENV).ok().filter(|s| !s.trim().is_empty())?;
        let mut c = Self::new(endpoint);
        c.key = std::env::var(KEY_ENV).ok().filter(|s| !s.is_empty());
        if let Ok(m) = std::env::var(MODEL_ENV) {
            c.model = m;
        }
        Some(c)
    }

    fn attempt(&self, agent: &ureq::Agent, body: &Value) -> Result<String, CognitionError> {
        let mut req = agent.post(&self.endpoint).set("Content-Type", "application/json");
        if let Some(key) = &self.key {
            req = req.set("Authorization", &format!("Bearer {key}"));
        }
        let resp = req.send_string(&body.to_string()).map_err(|e| CognitionError::Llm(e.to_string()))?;
        let text = resp.into_string().map_err(|e| CognitionError::Llm(e.to_string()))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| CognitionError::Llm(format!("reply is not JSON: {e}")))?;
        reply_content(&v).ok_or_else(|| CognitionError::Llm("reply has no message content".into()))
    }
}

impl LlmClient for HttpLlm {
    fn complete(&self, prompt: &str) -> Result<String, CognitionError> {
        let agent = ureq::AgentBuilder::new().timeout(self.timeout).build();
        let body = json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
        });
        let mut last = CognitionError::Llm("no attempt made".into());
        for _ in 0..=self.retries {
            match self.attempt(&agent, &body) {
                Ok(s) => return Ok(s),
                Err(e) => last = e,
            }
        }
        Err(last)
    }
}

/// Assistant text from `choices[0].message.content` or `message.content`.
fn reply_content(v: &Value) -> Option<String> {
    let msg = v.pointer("/choices/0/message/content").or_else(|| v.pointer("/message/content"))?;
    msg.as_str().map(str::to_string)
}

/// Parameters proposed by the model; absent or unusable fields are `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Suggestion {
    pub context: Option<f64>,
    pub gpu_mem_kb: Option<f64>,
    pub embed_dim: Option<f64>,
    pub hidden_dim: Option<f64>,
    pub learning_rate: Option<f64>,
    pub batch: Option<f64>,
    pub mode: Option<f64>,
}

/// The first balanced `{...}` object in `text`.
pub fn extract_json_object(text: &str) -> Option<&str> {
    let start = text.find('{')?;
    let mut depth = 0usize;
    let mut in_str = false;
    let mut escaped = false;
    for (i, ch) in text[start..].char_indices() {
        if in_str {
            match ch {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => in_str = false,
                _ => {}
            }
            continue;
        }
        match ch {
            '"' => in_str = true,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&text[start..start + i + 1]);
                }
            }
            _ => {}
        }
    }
    None
}

fn number(v: Option<&Value>) -> Option<f64> {
    let x = match v? {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }?;
    x.is_finite().then_some(x)
}

pub fn parse_suggestion(reply: &str) -> Result<Suggestion, CognitionError> {
    let obj = extract_json_object(reply).ok_or_else(|| CognitionError::Llm("no JSON object in reply".into()))?;
    let v: Value = serde_json::from_str(obj).map_err(|e| CognitionError::Llm(format!("malformed JSON: {e}")))?;
    let mut s = Suggestion {
        context: number(v.get("context-length")),
        gpu_mem_kb: number(v.get("GPU-Mem(KB)")),
        batch: number(v.get("BatchSize")),
        mode: number(v.get("mode")),
        ..Suggestion::default()
    };
    // a scalar here carries no architecture and is ignored
    if let Some(Value::Object(p)) = v.get("AMKLCF_Parameters") {
        s.embed_dim = number(p.get("embed_dim"));
        s.hidden_dim = number(p.get("hidden_dim"));
        s.learning_rate = number(p.get("learning_rate"));
    }
    if s == Suggestion::default() {
        return Err(CognitionError::Llm("reply contains none of the expected keys".into()));
    }
    Ok(s)
}
