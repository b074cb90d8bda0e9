//! File formats: the CSV table layout every experiment emits (comment
//! headers, 17-significant-digit floats) and PGM images for the foveation
//! demo.

pub mod pgm;

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Format a float with 17 significant digits, the fixed width used in every
/// CSV so reruns are byte-identical.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Float(v) => fmt_float(*v),
            Value::Text(s) => s.clone(),
            Value::Empty => String::new(),
        }
    }
}

/// A CSV document: `#` comment header echoing the experiment spec, one
/// column-name row, data rows, and optional `#` footer lines (fits,
/// diagnostics).
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub footers: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table {
            comments: Vec::new(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            footers: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn footer(&mut self, line: impl Into<String>) {
        self.footers.push(line.into());
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        for c in &self.comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Value::render).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        for f in &self.footers {
            writeln!(w, "# {f}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let mut f = std::fs::File::create(path)?;
        self.write_to(&mut f)?;
        Ok(())
    }

    /// Values of a column as floats (empty cells skipped); helper for tests.
    pub fn column_floats(&self, name: &str) -> Vec<f64> {
        let idx = self.columns.iter().position(|c| c == name).expect("unknown column");
        self.rows
            .iter()
            .filter_map(|r| match &r[idx] {
                Value::Int(v) => Some(*v as f64),
                Value::Float(v) => Some(*v),
                Value::Text(_) | Value::Empty => None,
            })
            .collect()
    }
}

/// Ordinary least squares fit of y against x; returns (slope, intercept).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Mean and unbiased sample standard deviation; σ̂ is None when fewer than
/// two samples are available.
pub fn mean_and_sd(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len();
    assert!(n >= 1);
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    (mean, Some(var.sqrt()))
}
