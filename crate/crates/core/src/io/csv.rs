//! Plain-text exports. Floats use `{:.16e}`, which round-trips every f64.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pca::ErrorReport;

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `index,value` with 1-based indices.
pub fn spectrum_csv(spectrum: &[f64]) -> String {
    let mut out = String::from("index,value\n");
    for (k, v) in spectrum.iter().enumerate() {
        let _ = writeln!(out, "{},{v:.16e}", k + 1);
    }
    out
}

pub fn export_spectrum(spectrum: &[f64], path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &spectrum_csv(spectrum))
}

pub fn parse_spectrum(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines();
    if lines.next() != Some("index,value") {
        return Err(Error::Format {
            offset: 0,
            msg: "missing 'index,value' header".into(),
        });
    }
    let mut offset = "index,value\n".len() as u64;
    let mut out = Vec::new();
    for (k, line) in lines.enumerate() {
        let value = line
            .split_once(',')
            .filter(|(i, _)| i.parse::<usize>().ok() == Some(k + 1))
            .and_then(|(_, v)| v.parse::<f64>().ok())
            .ok_or_else(|| Error::Format {
                offset,
                msg: format!("bad spectrum row '{line}'"),
            })?;
        out.push(value);
        offset += line.len() as u64 + 1;
    }
    Ok(out)
}

pub fn read_spectrum(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_spectrum(&text)
}

/// `sample,squared_error` rows (1-based), then a `mean,predicted,relative_gap`
/// block.
pub fn report_csv(report: &ErrorReport) -> String {
    let mut out = String::from("sample,squared_error\n");
    for (n, e) in report.per_sample.iter().enumerate() {
        let _ = writeln!(out, "{},{e:.16e}", n + 1);
    }
    out.push_str("mean,predicted,relative_gap\n");
    let _ = writeln!(
        out,
        "{:.16e},{:.16e},{:.16e}",
        report.mean, report.predicted, report.relative_gap
    );
    out
}

pub fn export_report(report: &ErrorReport, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &report_csv(report))
}
