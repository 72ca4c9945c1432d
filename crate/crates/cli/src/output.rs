use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::args::{Format, OutputArgs};
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Top-level JSON object: a version tag, the command name and the command's payload.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Resolves `out` against `dir` when relative.
pub fn resolve(out: &Path, dir: Option<&Path>) -> PathBuf {
    match dir {
        Some(dir) if out.is_relative() => dir.join(out),
        _ => out.to_path_buf(),
    }
}

/// Where a command's table goes: a file or stdout.
pub struct Sink {
    path: Option<PathBuf>,
    writer: Box<dyn Write>,
}

impl Sink {
    pub fn open(args: &OutputArgs) -> CliResult<Self> {
        match &args.out {
            Some(out) => Self::file(&resolve(out, args.out_dir.as_deref())),
            None => Ok(Self {
                path: None,
                writer: Box::new(BufWriter::new(io::stdout().lock())),
            }),
        }
    }

    pub fn file(path: &Path) -> CliResult<Self> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        Ok(Self {
            path: Some(path.to_path_buf()),
            writer: Box::new(BufWriter::new(file)),
        })
    }

    fn io_error(&self, e: io::Error) -> CliError {
        CliError::io(self.path.clone().unwrap_or_else(|| PathBuf::from("<stdout>")), e)
    }

    pub fn csv<T: Serialize>(mut self, rows: &[T]) -> CliResult<()> {
        let path = self.path.clone();
        {
            let mut w = csv::Writer::from_writer(&mut self.writer);
            for row in rows {
                w.serialize(row).map_err(|e| csv_error(e, &path))?;
            }
            w.flush().map_err(|e| csv_error(e.into(), &path))?;
        }
        self.writer.flush().map_err(|e| self.io_error(e))
    }

    pub fn json<T: Serialize>(mut self, command: &str, body: &T) -> CliResult<()> {
        let envelope = Envelope {
            schema_version: SCHEMA_VERSION,
            command,
            body,
        };
        serde_json::to_writer_pretty(&mut self.writer, &envelope).map_err(|e| self.io_error(e.into()))?;
        writeln!(self.writer).map_err(|e| self.io_error(e))?;
        self.writer.flush().map_err(|e| self.io_error(e))
    }

    /// One CSV row, or a JSON object `{ schema_version, command, <key>: record }`.
    pub fn record<T: Serialize>(self, format: Format, command: &str, key: &str, record: &T) -> CliResult<()> {
        match format {
            Format::Csv => self.csv(std::slice::from_ref(record)),
            Format::Json => {
                let body = serde_json::json!({ key: record });
                self.json(command, &body)
            }
        }
    }

    /// CSV rows or a JSON object `{ schema_version, command, <key>: rows }`.
    pub fn table<T: Serialize>(self, format: Format, command: &str, key: &str, rows: &[T]) -> CliResult<()> {
        match format {
            Format::Csv => self.csv(rows),
            Format::Json => {
                let body = serde_json::json!({ key: rows });
                self.json(command, &body)
            }
        }
    }
}

fn csv_error(e: csv::Error, path: &Option<PathBuf>) -> CliError {
    let path = path.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Data(format!("{}: {other:?}", path.display())),
    }
}
