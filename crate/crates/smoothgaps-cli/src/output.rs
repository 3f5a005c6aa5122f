//! Report emission. CSV output opens with `# config=<canonical json>` and a
//! header line; JSONL output starts with a config record and tags every line
//! with schema_version and a record type. Field values never contain commas,
//! so no CSV quoting is needed.

use std::io::{self, Write};

use serde::Serialize;

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "csv" => Some(Format::Csv),
            "jsonl" => Some(Format::Jsonl),
            _ => None,
        }
    }
}

/// A report row: one serde shape for JSONL plus a hand-rolled CSV line.
pub trait Row: Serialize {
    const TYPE: &'static str;
    const HEADER: &'static str;
    fn csv(&self) -> String;
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    schema_version: u32,
    #[serde(rename = "type")]
    record_type: &'static str,
    #[serde(flatten)]
    rec: &'a T,
}

pub struct Emitter<W: Write> {
    format: Format,
    w: W,
}

impl<W: Write> Emitter<W> {
    pub fn new(format: Format, w: W) -> Self {
        Emitter { format, w }
    }

    pub fn config(&mut self, cfg: &RunConfig) -> io::Result<()> {
        match self.format {
            Format::Csv => writeln!(self.w, "# config={}", cfg.canonical()),
            Format::Jsonl => self.json_line("config", cfg),
        }
    }

    pub fn header<T: Row>(&mut self) -> io::Result<()> {
        if self.format == Format::Csv {
            writeln!(self.w, "{}", T::HEADER)?;
        }
        Ok(())
    }

    pub fn row<T: Row>(&mut self, row: &T) -> io::Result<()> {
        match self.format {
            Format::Csv => writeln!(self.w, "{}", row.csv()),
            Format::Jsonl => self.json_line(T::TYPE, row),
        }
    }

    fn json_line<T: Serialize>(&mut self, record_type: &'static str, rec: &T) -> io::Result<()> {
        let tagged = Tagged { schema_version: SCHEMA_VERSION, record_type, rec };
        let line = serde_json::to_string(&tagged).expect("row serializes");
        writeln!(self.w, "{line}")
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.w.flush()
    }
}

/// Structured error record on stderr.
pub fn emit_error(kind: &str, message: &str) {
    let rec = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "type": "error",
        "kind": kind,
        "message": message,
    });
    eprintln!("{rec}");
}

pub fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}
