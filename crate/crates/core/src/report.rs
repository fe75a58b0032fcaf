//! Error-table rendering as csv, tsv, or markdown, plus a csv reader for
//! post-processing.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{ErrorReport, ExperimentConfig, ReportRow, RowFlag, MAX_REPORTED_ORDER};

pub const REPORT_COLUMNS: [&str; 6] = ["n", "err0", "err1", "err2", "runtime_ms", "flag"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Csv,
    Tsv,
    Markdown,
}

impl ReportFormat {
    /// Format implied by a file extension; csv otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsv") => Self::Tsv,
            Some("md" | "markdown") => Self::Markdown,
            _ => Self::Csv,
        }
    }
}

fn full(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

fn short(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.2e}")).unwrap_or_else(|| "-".into())
}

fn delimited(report: &ErrorReport, delimiter: u8) -> Result<Vec<u8>> {
    let mut out = csv::WriterBuilder::new().delimiter(delimiter).from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    out.write_record(REPORT_COLUMNS).map_err(io)?;
    for row in &report.rows {
        let mut record = vec![row.n.to_string()];
        record.extend(row.errors.iter().map(|e| full(*e)));
        record.push(full(row.runtime_ms));
        record.push(row.flag.as_str().to_string());
        out.write_record(&record).map_err(io)?;
    }
    out.into_inner().map_err(|e| Error::Io(e.to_string()))
}

fn markdown(report: &ErrorReport) -> Vec<u8> {
    let mut text = format!("| {} |\n|{}\n", REPORT_COLUMNS.join(" | "), "---|".repeat(REPORT_COLUMNS.len()));
    for row in &report.rows {
        let errs: Vec<String> = row.errors.iter().map(|e| short(*e)).collect();
        let runtime = row.runtime_ms.map(|t| format!("{t:.1}")).unwrap_or_else(|| "-".into());
        text.push_str(&format!("| {} | {} | {} | {} |\n", row.n, errs.join(" | "), runtime, row.flag.as_str()));
    }
    text.into_bytes()
}

/// Renders the table: 17 significant digits in csv/tsv, 3 in markdown.
pub fn render_report(report: &ErrorReport, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Csv => delimited(report, b','),
        ReportFormat::Tsv => delimited(report, b'\t'),
        ReportFormat::Markdown => Ok(markdown(report)),
    }
}

/// `<path>.meta.json`, holding the configuration and seed behind a table.
pub fn meta_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes the table and, when a configuration is given, its sidecar.
pub fn emit_report(
    report: &ErrorReport,
    format: ReportFormat,
    path: &Path,
    config: Option<&ExperimentConfig>,
) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::File::create(path)?.write_all(&render_report(report, format)?)?;
    if let Some(config) = config {
        let meta = serde_json::json!({ "name": report.name, "seed": report.seed, "config": config });
        std::fs::write(meta_path(path), serde_json::to_string_pretty(&meta).expect("json value serializes"))?;
    }
    Ok(())
}

/// Reads a csv or tsv table back; the message column is not stored.
pub fn read_report<R: Read>(reader: R, format: ReportFormat) -> Result<Vec<ReportRow>> {
    let delimiter = match format {
        ReportFormat::Csv => b',',
        ReportFormat::Tsv => b'\t',
        ReportFormat::Markdown => return Err(Error::InvalidInput("markdown tables are output only".into())),
    };
    let mut rdr = csv::ReaderBuilder::new().delimiter(delimiter).from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Dataset { line: 1, message: e.to_string() })?;
    if header.iter().ne(REPORT_COLUMNS) {
        return Err(Error::Dataset { line: 1, message: format!("expected header {}", REPORT_COLUMNS.join(",")) });
    }
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let bad = |message: String| Error::Dataset { line, message };
        let record = record.map_err(|e| bad(e.to_string()))?;
        let opt = |j: usize| -> Result<Option<f64>> {
            let text = &record[j];
            if text.is_empty() {
                Ok(None)
            } else {
                text.parse().map(Some).map_err(|_| bad(format!("{}: cannot parse {text:?}", REPORT_COLUMNS[j])))
            }
        };
        let mut errors = [None; MAX_REPORTED_ORDER + 1];
        for (d, e) in errors.iter_mut().enumerate() {
            *e = opt(1 + d)?;
        }
        rows.push(ReportRow {
            n: record[0].parse().map_err(|_| bad(format!("n: cannot parse {:?}", &record[0])))?,
            errors,
            runtime_ms: opt(4)?,
            flag: RowFlag::parse(&record[5]).ok_or_else(|| bad(format!("unknown flag {:?}", &record[5])))?,
            message: None,
        });
    }
    Ok(rows)
}
