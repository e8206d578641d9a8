//! JSON-lines event log: `{ts, level, phase, message, ...}` per line.

use std::io::Write;
use std::sync::{Arc, Mutex};

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Debug,
    Info,
    Warn,
    Error,
}

impl Level {
    fn as_str(self) -> &'static str {
        match self {
            Level::Debug => "debug",
            Level::Info => "info",
            Level::Warn => "warn",
            Level::Error => "error",
        }
    }
}

type Sink = Arc<Mutex<Box<dyn Write + Send>>>;

#[derive(Clone)]
pub struct Logger {
    sink: Option<Sink>,
    min_level: Level,
}

impl std::fmt::Debug for Logger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Logger").field("enabled", &self.sink.is_some()).field("min_level", &self.min_level).finish()
    }
}

/// In-memory sink, mostly for tests.
#[derive(Clone, Default)]
pub struct SharedBuffer(pub Arc<Mutex<Vec<u8>>>);

impl SharedBuffer {
    pub fn contents(&self) -> String {
        String::from_utf8_lossy(&self.0.lock().unwrap()).into_owned()
    }
}

impl Write for SharedBuffer {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.lock().unwrap().extend_from_slice(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

impl Logger {
    pub fn new(writer: Box<dyn Write + Send>) -> Self {
        Self { sink: Some(Arc::new(Mutex::new(writer))), min_level: Level::Info }
    }

    pub fn stderr() -> Self {
        Self::new(Box::new(std::io::stderr()))
    }

    pub fn null() -> Self {
        Self { sink: None, min_level: Level::Error }
    }

    pub fn buffer() -> (Self, SharedBuffer) {
        let buf = SharedBuffer::default();
        (Self::new(Box::new(buf.clone())), buf)
    }

    pub fn with_min_level(self, min_level: Level) -> Self {
        Self { min_level, ..self }
    }

    pub fn log(&self, level: Level, phase: &str, message: &str, extra: Option<Map<String, Value>>) {
        let Some(sink) = &self.sink else { return };
        if level < self.min_level {
            return;
        }
        let mut obj = Map::new();
        obj.insert("ts".into(), Value::String(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)));
        obj.insert("level".into(), Value::String(level.as_str().into()));
        obj.insert("phase".into(), Value::String(phase.into()));
        obj.insert("message".into(), Value::String(message.into()));
        if let Some(extra) = extra {
            obj.extend(extra);
        }
        let line = Value::Object(obj).to_string();
        if let Ok(mut w) = sink.lock() {
            let _ = writeln!(w, "{line}");
            let _ = w.flush();
        }
    }

    pub fn info(&self, phase: &str, message: &str) {
        self.log(Level::Info, phase, message, None);
    }

    pub fn warn(&self, phase: &str, message: &str) {
        self.log(Level::Warn, phase, message, None);
    }

    pub fn error(&self, phase: &str, message: &str) {
        self.log(Level::Error, phase, message, None);
    }

    pub fn info_with(&self, phase: &str, message: &str, extra: Value) {
        let extra = match extra {
            Value::Object(m) => Some(m),
            _ => None,
        };
        self.log(Level::Info, phase, message, extra);
    }
}
