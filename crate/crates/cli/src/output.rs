//! Rendering and atomic writing of command results.

use std::io::{self, Write};
use std::path::Path;

use serde_json::{Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Column-major trace data.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub enum Body {
    Table(Table),
    Report(Value),
}

/// Everything a command produces: echoed parameters, free-form notes and
/// the data itself.
#[derive(Debug, Clone)]
pub struct Output {
    pub command: &'static str,
    pub params: Vec<(String, Value)>,
    pub notes: Vec<String>,
    pub body: Body,
}

impl Output {
    pub fn table(command: &'static str, columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        let columns = columns.iter().map(|s| s.to_string()).collect();
        Self { command, params: Vec::new(), notes: Vec::new(), body: Body::Table(Table { columns, rows }) }
    }

    pub fn report(command: &'static str, value: Value) -> Self {
        Self { command, params: Vec::new(), notes: Vec::new(), body: Body::Report(value) }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.push((key.to_string(), value.into()));
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    /// Tables default to CSV, reports to JSON.
    pub fn default_format(&self) -> Format {
        match self.body {
            Body::Table(_) => Format::Csv,
            Body::Report(_) => Format::Json,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# vecmag {VERSION}\n"));
        s.push_str(&format!("# command = {}\n", self.command));
        for (k, v) in &self.params {
            s.push_str(&format!("# {k} = {}\n", scalar_text(v)));
        }
        for n in &self.notes {
            s.push_str(&format!("# note: {n}\n"));
        }
        match &self.body {
            Body::Table(t) => {
                s.push_str(&t.columns.join(","));
                s.push('\n');
                for row in &t.rows {
                    let cells: Vec<String> = row.iter().map(|&x| number(x)).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
            }
            Body::Report(v) => {
                s.push_str("key,value\n");
                let mut flat = Vec::new();
                flatten("", v, &mut flat);
                for (k, v) in flat {
                    s.push_str(&format!("{k},{}\n", csv_cell(&v)));
                }
            }
        }
        s
    }

    fn render_json(&self) -> String {
        let mut params = Map::new();
        for (k, v) in &self.params {
            params.insert(k.clone(), v.clone());
        }
        let data = match &self.body {
            Body::Table(t) => serde_json::json!({ "columns": t.columns, "rows": t.rows }),
            Body::Report(v) => v.clone(),
        };
        let doc = serde_json::json!({
            "artifact": "vecmag",
            "version": VERSION,
            "command": self.command,
            "params": params,
            "notes": self.notes,
            "data": data,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
        s.push('\n');
        s
    }
}

/// Shortest round-trip text; exponent form for very small or large values.
pub fn number(x: f64) -> String {
    if x.is_finite() {
        Value::from(x).to_string()
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_cell(v: &Value) -> String {
    let t = scalar_text(v);
    if t.contains([',', '"', '\n']) {
        format!("\"{}\"", t.replace('"', "\"\""))
    } else {
        t
    }
}

/// Dotted-path flattening; arrays use numeric segments.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                flatten(&join(k), v, out);
            }
        }
        Value::Array(a) => {
            for (i, v) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), v, out);
            }
        }
        other => out.push((prefix.to_string(), other.clone())),
    }
}

/// Writes `text` to `path` through a temporary file in the same directory,
/// then renames it into place; `None` means stdout.
pub fn write_atomic(path: Option<&Path>, text: &str) -> io::Result<()> {
    let Some(path) = path else {
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes())?;
        return out.flush();
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
