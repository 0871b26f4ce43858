//! Result envelopes: JSON documents and CSV tables with a provenance header.

use nilrec::exactnum::rational_to_string;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn exact(q: &BigRational) -> Value {
    json!({ "exact": rational_to_string(q) })
}

pub fn exact_int(n: impl ToString) -> Value {
    json!({ "exact": n.to_string() })
}

pub fn numeric(x: f64) -> Value {
    json!({ "numeric": fmt17(x) })
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub struct Output {
    pub result: Value,
    pub table: Table,
}

#[derive(Serialize)]
pub struct Provenance<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub precision_digits: u32,
    pub parallel: bool,
}

pub fn render(format: Format, prov: &Provenance, config: &Value, out: &Output) -> String {
    match format {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "provenance": prov,
                "config": config,
                "result": out.result,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = format!("# schema_version={SCHEMA_VERSION}\n");
            s.push_str(&format!("# provenance={}\n", serde_json::to_string(prov).expect("serializable")));
            s.push_str(&format!("# config={}\n", serde_json::to_string(config).expect("serializable")));
            s.push_str(&out.table.header.join(","));
            s.push('\n');
            for row in &out.table.rows {
                let fields: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
                s.push_str(&fields.join(","));
                s.push('\n');
            }
            s
        }
    }
}
