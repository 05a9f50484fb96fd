use std::fmt::Write as _;
use std::io;
use std::path::Path;

/// One table cell. Missing numbers are undefined quotients or failed points.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(Option<f64>),
    Text(String),
}

impl Cell {
    pub fn num(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Num(v) => *v,
            Cell::Text(_) => None,
        }
    }

    pub fn text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(Some(v))
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }

    /// From a file extension, defaulting to CSV.
    pub fn for_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

/// Column-named rows plus an ordered key/value metadata block.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the header");
        self.rows.push(row);
    }

    pub fn set_meta(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        match self.metadata.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.metadata.push((key.to_string(), value)),
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column; `None` if the column does not exist.
    pub fn numbers(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].num()).collect())
    }

    pub fn texts(&self, name: &str) -> Option<Vec<String>> {
        let i = self.column_index(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[i] {
                    Cell::Text(s) => s.clone(),
                    Cell::Int(i) => i.to_string(),
                    Cell::Num(v) => v.map(format_number).unwrap_or_default(),
                })
                .collect(),
        )
    }

    /// Rows whose `status` is anything but `ok`.
    pub fn failures(&self) -> usize {
        match self.column_index("status") {
            Some(i) => self.rows.iter().filter(|r| r[i].text() != Some("ok")).count(),
            None => 0,
        }
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn render(table: &ResultTable, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => render_csv(table),
        OutputFormat::Json => render_json(table),
    }
}

fn render_csv(table: &ResultTable) -> String {
    let mut out = String::new();
    for (k, v) in &table.metadata {
        let _ = writeln!(out, "# {k} = {v}");
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        let fields = row.iter().map(|c| match c {
            Cell::Int(i) => i.to_string(),
            Cell::Num(Some(x)) => format_number(*x),
            Cell::Num(None) => String::new(),
            Cell::Text(s) => s.clone(),
        });
        w.write_record(fields).expect("in-memory write");
    }
    let bytes = w.into_inner().expect("in-memory flush");
    out.push_str(std::str::from_utf8(&bytes).expect("utf-8 fields"));
    out
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn render_json(table: &ResultTable) -> String {
    let mut out = String::from("{\n  \"metadata\": {");
    for (i, (k, v)) in table.metadata.iter().enumerate() {
        let sep = if i == 0 { "" } else { "," };
        let _ = write!(out, "{sep}\n    {}: {}", json_str(k), json_str(v));
    }
    out.push_str(if table.metadata.is_empty() { "},\n" } else { "\n  },\n" });
    let cols: Vec<String> = table.columns.iter().map(|c| json_str(c)).collect();
    let _ = writeln!(out, "  \"columns\": [{}],", cols.join(", "));
    out.push_str("  \"rows\": [");
    for (r, row) in table.rows.iter().enumerate() {
        let sep = if r == 0 { "" } else { "," };
        let fields: Vec<String> = row
            .iter()
            .zip(&cols)
            .map(|(cell, name)| {
                let v = match cell {
                    Cell::Int(i) => i.to_string(),
                    Cell::Num(Some(x)) if x.is_finite() => format_number(*x),
                    Cell::Num(_) => "null".to_string(),
                    Cell::Text(s) => json_str(s),
                };
                format!("{name}: {v}")
            })
            .collect();
        let _ = write!(out, "{sep}\n    {{{}}}", fields.join(", "));
    }
    out.push_str(if table.rows.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
    out
}

/// Writes the table; I/O errors are returned unchanged.
pub fn emit(table: &ResultTable, format: OutputFormat, path: &Path) -> io::Result<()> {
    std::fs::write(path, render(table, format))
}

/// Parses CSV produced by [`emit`]. Empty fields read back as missing
/// numbers, bare digits as integers, anything that is not a number as text.
pub fn parse_csv(text: &str) -> Result<ResultTable, csv::Error> {
    let mut metadata = Vec::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        let body = line.trim_start_matches('#').trim_start();
        if let Some((k, v)) = body.split_once(" = ") {
            metadata.push((k.to_string(), v.to_string()));
        }
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(
            rec.iter()
                .map(|f| {
                    if f.is_empty() {
                        Cell::Num(None)
                    } else if let Ok(i) = f.parse::<u64>() {
                        Cell::Int(i)
                    } else {
                        match f.parse::<f64>() {
                            Ok(x) => Cell::Num(Some(x)),
                            Err(_) => Cell::Text(f.to_string()),
                        }
                    }
                })
                .collect(),
        );
    }
    Ok(ResultTable { columns, rows, metadata })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new(vec!["index".into(), "x".into(), "g1".into(), "status".into()]);
        t.set_meta("route", "analytic");
        t.push_row(vec![0usize.into(), (-0.1).into(), Some(0.1 + 0.2).into(), "ok".into()]);
        t.push_row(vec![1usize.into(), 1e-300.into(), None.into(), "numeric_failed: a, b".into()]);
        t
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_number(0.1 + 0.2), "3.0000000000000004e-1");
        assert_eq!(format_number(-1.0), "-1.0000000000000000e0");
    }

    #[test]
    fn csv_round_trip() {
        let t = sample();
        let back = parse_csv(&render(&t, OutputFormat::Csv)).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn empty_table_is_header_and_metadata() {
        let mut t = ResultTable::new(vec!["a".into(), "b".into()]);
        t.set_meta("k", "v");
        assert_eq!(render(&t, OutputFormat::Csv), "# k = v\na,b\n");
        let v: serde_json::Value = serde_json::from_str(&render(&t, OutputFormat::Json)).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 0);
        assert_eq!(v["metadata"]["k"], "v");
    }

    #[test]
    fn json_is_valid_and_exact() {
        let t = sample();
        let v: serde_json::Value = serde_json::from_str(&render(&t, OutputFormat::Json)).unwrap();
        assert_eq!(v["metadata"]["route"], "analytic");
        assert_eq!(v["rows"][0]["g1"].as_f64(), Some(0.1 + 0.2));
        assert!(v["rows"][1]["g1"].is_null());
        assert_eq!(v["rows"][1]["x"].as_f64(), Some(1e-300));
        assert_eq!(v["rows"][1]["status"], "numeric_failed: a, b");
    }

    #[test]
    fn failures_count_non_ok_status() {
        assert_eq!(sample().failures(), 1);
    }
}
