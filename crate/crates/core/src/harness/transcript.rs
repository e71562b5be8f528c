use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::qlcgen::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

/// One message of one session, as persisted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub schema_version: u32,
    pub session_id: String,
    pub role: Role,
    pub text: String,
    /// RFC 3339, UTC.
    pub timestamp: String,
    /// Question a user message asks or an assistant message answers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qlc_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_version: Option<String>,
}

impl TranscriptRecord {
    pub fn new(session_id: &str, role: Role, text: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            session_id: session_id.to_string(),
            role,
            text: text.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            qlc_id: None,
            model: None,
            prompt_version: None,
        }
    }
}

/// Destination for transcript records; each append must be durable before
/// the session continues.
pub trait TranscriptSink {
    fn append(&mut self, record: &TranscriptRecord) -> io::Result<()>;
}

impl TranscriptSink for Vec<TranscriptRecord> {
    fn append(&mut self, record: &TranscriptRecord) -> io::Result<()> {
        self.push(record.clone());
        Ok(())
    }
}

/// Append-only JSON-lines file, flushed after every record.
pub struct JsonlTranscript {
    file: File,
}

impl JsonlTranscript {
    pub fn open(path: &Path) -> io::Result<Self> {
        Ok(Self {
            file: OpenOptions::new().create(true).append(true).open(path)?,
        })
    }
}

impl TranscriptSink for JsonlTranscript {
    fn append(&mut self, record: &TranscriptRecord) -> io::Result<()> {
        let line = serde_json::to_string(record).map_err(io::Error::other)?;
        writeln!(self.file, "{line}")?;
        self.file.flush()?;
        self.file.sync_data()
    }
}

pub fn read_transcript(path: &Path) -> io::Result<Vec<TranscriptRecord>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}
