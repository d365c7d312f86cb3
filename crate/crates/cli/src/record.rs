use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;

/// One output row.
#[derive(Debug, Clone, Serialize)]
pub struct QueryRecord {
    pub command: String,
    pub beta: Option<u32>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub order: String,
    pub x_re: Option<f64>,
    pub x_im: Option<f64>,
    pub parameters: BTreeMap<String, Value>,
    pub value: f64,
    pub stderr: Option<f64>,
    pub method: String,
    pub runtime_ms: u64,
}

impl QueryRecord {
    pub fn new(command: &str, order: impl Into<String>, value: f64, method: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            beta: None,
            n: None,
            m: None,
            order: order.into(),
            x_re: None,
            x_im: None,
            parameters: BTreeMap::new(),
            value,
            stderr: None,
            method: method.into(),
            runtime_ms: 0,
        }
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.parameters.insert(key.into(), v.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

const CSV_HEADER: &str = "command,beta,n,m,order,x_re,x_im,value,stderr,method,runtime_ms";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub struct Sink<W: Write> {
    out: W,
    format: Format,
    header_done: bool,
}

impl<W: Write> Sink<W> {
    pub fn new(out: W, format: Format) -> Self {
        Self { out, format, header_done: false }
    }

    pub fn emit(&mut self, r: &QueryRecord) -> io::Result<()> {
        match self.format {
            Format::Json => {
                serde_json::to_writer(&mut self.out, r)?;
                writeln!(self.out)
            }
            Format::Csv => {
                if !self.header_done {
                    writeln!(self.out, "{CSV_HEADER}")?;
                    self.header_done = true;
                }
                writeln!(
                    self.out,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    csv_field(&r.command),
                    opt(r.beta),
                    opt(r.n),
                    opt(r.m),
                    csv_field(&r.order),
                    opt(r.x_re),
                    opt(r.x_im),
                    r.value,
                    opt(r.stderr),
                    csv_field(&r.method),
                    r.runtime_ms
                )
            }
        }
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }
}
