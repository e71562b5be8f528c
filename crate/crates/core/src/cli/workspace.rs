use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::analysis::StructuralFingerprint;
use crate::harness::{read_transcript, AnswerRecord, TranscriptRecord};
use crate::parser::SourceProgram;
use crate::qlcgen::{Qlc, TaskBundle, SCHEMA_VERSION};
use crate::report::{file_stem, Annotation};

/// Directory tree shared by every command. Stages talk only through these files.
#[derive(Debug, Clone)]
pub struct WorkspaceLayout {
    pub root: PathBuf,
}

/// An accepted program as stored under `programs/`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramRecord {
    pub schema_version: u32,
    #[serde(flatten)]
    pub program: SourceProgram,
    pub fingerprint: StructuralFingerprint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub review: Option<String>,
}

/// The questions generated for one program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QlcFile {
    pub schema_version: u32,
    pub program_id: String,
    pub task_id: String,
    pub seed: u64,
    pub questions: Vec<Qlc>,
}

/// The graded answers of one model for one program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerFile {
    pub schema_version: u32,
    pub model_name: String,
    pub program_id: String,
    pub answers: Vec<AnswerRecord>,
}

impl AnswerFile {
    pub fn new(model_name: &str, program_id: &str, answers: Vec<AnswerRecord>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            model_name: model_name.into(),
            program_id: program_id.into(),
            answers,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Pretty JSON with a trailing newline, so equal values give equal bytes.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut text = serde_json::to_string_pretty(value).expect("records serialize");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// Files in `dir` with extension `ext`, sorted by name. A missing directory is empty.
pub fn files_with_ext(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, CliError> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == ext))
        .collect();
    out.sort();
    Ok(out)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

impl WorkspaceLayout {
    pub const DIRS: [&'static str; 7] = ["tasks", "programs", "qlcs", "transcripts", "answers", "annotations", "reports"];

    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn create(&self) -> Result<(), CliError> {
        for d in Self::DIRS {
            let p = self.root.join(d);
            fs::create_dir_all(&p).map_err(io_err(&p))?;
        }
        Ok(())
    }

    pub fn dir(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn task_path(&self, task_id: &str) -> PathBuf {
        self.dir("tasks").join(format!("{task_id}.json"))
    }

    pub fn program_path(&self, program_id: &str) -> PathBuf {
        self.dir("programs").join(format!("{program_id}.json"))
    }

    pub fn qlc_path(&self, program_id: &str) -> PathBuf {
        self.dir("qlcs").join(format!("{program_id}.json"))
    }

    pub fn transcript_dir(&self, model: &str) -> PathBuf {
        self.dir("transcripts").join(file_stem(model))
    }

    pub fn transcript_path(&self, model: &str, program_id: &str) -> PathBuf {
        self.transcript_dir(model).join(format!("{program_id}.jsonl"))
    }

    pub fn answer_path(&self, model: &str, program_id: &str) -> PathBuf {
        self.dir("answers").join(file_stem(model)).join(format!("{program_id}.json"))
    }

    pub fn annotation_path(&self, rater: &str) -> PathBuf {
        self.dir("annotations").join(format!("{}.jsonl", file_stem(rater)))
    }

    pub fn task(&self, task_id: &str) -> Result<TaskBundle, CliError> {
        let p = self.task_path(task_id);
        if !p.is_file() {
            return Err(CliError::UnknownTask(task_id.to_string()));
        }
        read_json(&p)
    }

    pub fn programs(&self) -> Result<Vec<ProgramRecord>, CliError> {
        files_with_ext(&self.dir("programs"), "json")?.iter().map(|p| read_json(p)).collect()
    }

    pub fn qlc_files(&self) -> Result<Vec<QlcFile>, CliError> {
        files_with_ext(&self.dir("qlcs"), "json")?.iter().map(|p| read_json(p)).collect()
    }

    pub fn qlcs(&self) -> Result<Vec<Qlc>, CliError> {
        Ok(self.qlc_files()?.into_iter().flat_map(|f| f.questions).collect())
    }

    /// Transcript files per model directory: (program id, records).
    pub fn transcripts(&self, model: &str) -> Result<Vec<(String, Vec<TranscriptRecord>)>, CliError> {
        files_with_ext(&self.transcript_dir(model), "jsonl")?
            .into_iter()
            .map(|p| Ok((stem(&p), read_transcript(&p).map_err(io_err(&p))?)))
            .collect()
    }

    /// Model directory names under `transcripts/`, sorted.
    pub fn transcript_models(&self) -> Result<Vec<String>, CliError> {
        let dir = self.dir("transcripts");
        if !dir.is_dir() {
            return Ok(Vec::new());
        }
        let mut out: Vec<String> = fs::read_dir(&dir)
            .map_err(io_err(&dir))?
            .filter_map(|e| e.ok())
            .filter(|e| e.path().is_dir())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .collect();
        out.sort();
        Ok(out)
    }

    pub fn answers(&self) -> Result<Vec<AnswerRecord>, CliError> {
        let dir = self.dir("answers");
        let mut out = Vec::new();
        if !dir.is_dir() {
            return Ok(out);
        }
        let mut models: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(io_err(&dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_dir())
            .collect();
        models.sort();
        for m in models {
            for f in files_with_ext(&m, "json")? {
                out.extend(read_json::<AnswerFile>(&f)?.answers);
            }
        }
        Ok(out)
    }

    pub fn annotations(&self) -> Result<Vec<Annotation>, CliError> {
        let mut out = Vec::new();
        for p in files_with_ext(&self.dir("annotations"), "jsonl")? {
            out.extend(read_annotations(&p)?);
        }
        Ok(out)
    }
}

pub fn read_annotations(path: &Path) -> Result<Vec<Annotation>, CliError> {
    if !path.is_file() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            serde_json::from_str(l).map_err(|source| CliError::Json {
                path: path.to_path_buf(),
                source,
            })
        })
        .collect()
}
