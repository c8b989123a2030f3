use std::io::Write;

use clap::ValueEnum;
use serde_json::Value;

use crate::Global;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// A header row and data rows.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// What a command produced: the JSON document, its CSV rendering and the
/// exit status.
#[derive(Debug)]
pub struct Report {
    pub json: Value,
    pub table: Table,
    pub exit: u8,
}

fn render(global: &Global, report: &Report) -> std::io::Result<Vec<u8>> {
    match global.format {
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(&report.json)?;
            s.push(b'\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&report.table.header)?;
            for r in &report.table.rows {
                w.write_record(r)?;
            }
            w.into_inner().map_err(|e| e.into_error())
        }
    }
}

pub fn emit(global: &Global, report: &Report) -> std::io::Result<()> {
    let bytes = render(global, report)?;
    match &global.out {
        Some(path) => std::fs::write(path, bytes),
        None => std::io::stdout().write_all(&bytes),
    }
}
