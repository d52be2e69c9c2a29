//! Deterministic report tables: CSV and JSON serialization with a fixed
//! numeric width.

use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One cell of a report table. Undefined ratios stay explicitly absent,
/// never 0 or NaN.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Text(String),
    Number(f64),
    Missing,
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Number(v)
    }
}

impl From<Option<f64>> for Value {
    fn from(v: Option<f64>) -> Self {
        v.map(Value::Number).unwrap_or(Value::Missing)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    Bar,
    Line,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(String, f64)>,
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub name: String,
    pub kind: ChartKind,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, Default)]
pub struct ReportSet {
    pub tables: Vec<Table>,
    pub charts: Vec<Chart>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ManifestEntry {
    pub file: String,
    pub rows: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

/// Render a number with 12 significant digits. Plain decimal notation in
/// a sane magnitude window, scientific outside it.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    if !(-5..15).contains(&magnitude) {
        return format!("{v:.11e}");
    }
    let precision = (11 - magnitude).max(0) as usize;
    let text = format!("{v:.precision$}");
    let trimmed = text.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

fn csv_cell(value: &Value) -> String {
    match value {
        Value::Text(t) => {
            if t.contains(',') || t.contains('"') || t.contains('\n') {
                format!("\"{}\"", t.replace('"', "\"\""))
            } else {
                t.clone()
            }
        }
        Value::Number(v) => format_number(*v),
        Value::Missing => String::new(),
    }
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn json_cell(value: &Value) -> String {
    match value {
        Value::Text(t) => format!("\"{}\"", json_escape(t)),
        Value::Number(v) => format_number(*v),
        Value::Missing => "null".to_string(),
    }
}

fn table_to_csv(table: &Table) -> String {
    let mut out = String::new();
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(csv_cell).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn table_to_json(table: &Table) -> String {
    let columns: Vec<String> = table
        .columns
        .iter()
        .map(|c| format!("\"{}\"", json_escape(c)))
        .collect();
    let rows: Vec<String> = table
        .rows
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(json_cell).collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!(
        "{{\"columns\":[{}],\"rows\":[{}]}}\n",
        columns.join(","),
        rows.join(",")
    )
}

/// Write every table in every requested format. Output is byte-stable
/// for identical input.
pub fn write_reports(
    reports: &ReportSet,
    dir: &Path,
    formats: &[Format],
) -> Result<Manifest, ReportError> {
    fs::create_dir_all(dir)?;
    let mut manifest = Manifest::default();
    for table in &reports.tables {
        for format in formats {
            let (ext, body) = match format {
                Format::Csv => ("csv", table_to_csv(table)),
                Format::Json => ("json", table_to_json(table)),
            };
            let file = format!("{}.{ext}", table.name);
            fs::write(dir.join(&file), body)?;
            manifest.files.push(ManifestEntry {
                file,
                rows: table.rows.len(),
            });
        }
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn sample_table(name: &str) -> Table {
        let mut t = Table::new(name, &["country", "value", "share"]);
        t.push(vec!["A".into(), 26.727272727273.into(), None.into()]);
        t
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(0.375), "0.375");
        assert_eq!(format_number(26.727272727272727), "26.7272727273");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(1e20), "1.00000000000e20");
    }

    #[test]
    fn manifest_counts_files() {
        let reports = ReportSet {
            tables: vec![sample_table("one"), sample_table("two")],
            charts: vec![],
        };
        let dir = tempdir().unwrap();
        let manifest = write_reports(&reports, dir.path(), &[Format::Csv, Format::Json]).unwrap();
        assert_eq!(manifest.files.len(), 4);
        assert!(dir.path().join("one.csv").exists());
        assert!(dir.path().join("two.json").exists());
    }

    #[test]
    fn empty_report_set_is_fine() {
        let dir = tempdir().unwrap();
        let manifest = write_reports(&ReportSet::default(), dir.path(), &[Format::Csv]).unwrap();
        assert!(manifest.files.is_empty());
    }

    #[test]
    fn missing_values_serialize_as_empty_and_null() {
        let dir = tempdir().unwrap();
        let reports = ReportSet {
            tables: vec![sample_table("t")],
            charts: vec![],
        };
        write_reports(&reports, dir.path(), &[Format::Csv, Format::Json]).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert!(csv.lines().nth(1).unwrap().ends_with(','));
        let json = std::fs::read_to_string(dir.path().join("t.json")).unwrap();
        assert!(json.contains("null"));
    }

    #[test]
    fn writes_are_deterministic() {
        let reports = ReportSet {
            tables: vec![sample_table("t")],
            charts: vec![],
        };
        let d1 = tempdir().unwrap();
        let d2 = tempdir().unwrap();
        write_reports(&reports, d1.path(), &[Format::Json]).unwrap();
        write_reports(&reports, d2.path(), &[Format::Json]).unwrap();
        let a = std::fs::read(d1.path().join("t.json")).unwrap();
        let b = std::fs::read(d2.path().join("t.json")).unwrap();
        assert_eq!(a, b);
    }
}
