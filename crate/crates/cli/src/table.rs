//! Check tables shared by every subcommand that tests something, plus
//! atomic output.

use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Format implied by a file extension, falling back to `self`.
    pub fn for_path(self, path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            _ => self,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    /// Reported for context; never affects the exit code.
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        })
    }
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub quantity: String,
    pub window: String,
    pub value: f64,
    pub uncertainty: Option<f64>,
    pub target: String,
    pub tolerance: Option<f64>,
    pub status: Status,
}

impl CheckRow {
    pub fn new(quantity: impl Into<String>, value: f64, target: impl Into<String>, status: Status) -> Self {
        Self {
            quantity: quantity.into(),
            window: String::new(),
            value,
            uncertainty: None,
            target: target.into(),
            tolerance: None,
            status,
        }
    }

    pub fn window(mut self, w: impl Into<String>) -> Self {
        self.window = w.into();
        self
    }

    pub fn tolerance(mut self, t: f64) -> Self {
        self.tolerance = Some(t);
        self
    }

    pub fn uncertainty(mut self, u: f64) -> Self {
        self.uncertainty = Some(u);
        self
    }
}

pub fn any_failed(rows: &[CheckRow]) -> bool {
    rows.iter().any(|r| r.status == Status::Fail)
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn encode<T: Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>, String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(rows).map_err(|e| e.to_string())?;
            s.push(b'\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| e.to_string())?;
            }
            w.into_inner().map_err(|e| e.to_string())
        }
    }
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T], format: Format) -> Result<(), String> {
    let bytes = encode(rows, format.for_path(path))?;
    write_atomic(path, &bytes).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

pub fn read_checks(path: &Path, format: Format) -> Result<Vec<CheckRow>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    match format.for_path(path) {
        Format::Json => serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display())),
        Format::Csv => csv::Reader::from_reader(text.as_bytes())
            .deserialize()
            .collect::<Result<Vec<CheckRow>, _>>()
            .map_err(|e| format!("{}: {e}", path.display())),
    }
}

fn fmt_value(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e6) {
        format!("{v:.6e}")
    } else {
        format!("{v:.10}")
    }
}

/// Aligned plain-text rendering for the terminal.
pub fn render(rows: &[CheckRow]) -> String {
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.status.to_string(),
                r.quantity.clone(),
                r.window.clone(),
                fmt_value(r.value),
                r.uncertainty.map(|u| format!("±{u:.2e}")).unwrap_or_default(),
                match r.tolerance {
                    Some(t) => format!("{} (tol {t:.0e})", r.target),
                    None => r.target.clone(),
                },
            ]
        })
        .collect();
    let mut width = [0usize; 6];
    for c in &cells {
        for (w, s) in width.iter_mut().zip(c) {
            *w = (*w).max(s.chars().count());
        }
    }
    let mut out = String::new();
    for c in &cells {
        let line: Vec<String> = c
            .iter()
            .zip(width)
            .map(|(s, w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}
