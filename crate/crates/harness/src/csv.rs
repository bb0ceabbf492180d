//! CSV output for trajectories and convergence reports.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::converge::ConvergenceReport;
use crate::error::{HarnessError, Result};

/// Full-precision scientific notation (17 significant digits).
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trajectory<W: Write>(
    out: &mut W,
    columns: &[String],
    times: &[f64],
    coords: &[Vec<f64>],
) -> std::io::Result<()> {
    writeln!(out, "t,{}", columns.join(","))?;
    for (t, row) in times.iter().zip(coords) {
        let mut line = format_value(*t);
        for x in row {
            line.push(',');
            line.push_str(&format_value(*x));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_report<W: Write>(out: &mut W, report: &ConvergenceReport) -> std::io::Result<()> {
    writeln!(out, "h,error,pair_order")?;
    for (i, (h, e)) in report.h.iter().zip(&report.errors).enumerate() {
        let pair = match i {
            0 => String::new(),
            _ => format_value(report.pair_orders[i - 1]),
        };
        writeln!(out, "{},{},{}", format_value(*h), format_value(*e), pair)?;
    }
    writeln!(out, "# fitted_order={}", format_value(report.fitted_order))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = BufWriter::new(file);
    f(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| HarnessError::io(path, e))
}

pub fn emit_csv(path: &Path, columns: &[String], times: &[f64], coords: &[Vec<f64>]) -> Result<()> {
    write_file(path, |out| write_trajectory(out, columns, times, coords))
}

pub fn emit_report(path: &Path, report: &ConvergenceReport) -> Result<()> {
    write_file(path, |out| write_report(out, report))
}

/// A parsed CSV: header fields, numeric rows and `#` comment lines.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub comments: Vec<String>,
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let bad = |msg: String| HarnessError::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, msg));
    let header = match lines.next() {
        Some(line) => line.map_err(|e| HarnessError::io(path, e))?,
        None => return Err(bad("empty file".into())),
    };
    let mut table = CsvTable {
        header: header.split(',').map(str::to_string).collect(),
        rows: Vec::new(),
        comments: Vec::new(),
    };
    for line in lines {
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        if let Some(comment) = line.strip_prefix('#') {
            table.comments.push(comment.trim().to_string());
            continue;
        }
        let row = line
            .split(',')
            .map(|f| match f {
                "" => Ok(None),
                _ => f.parse().map(Some).map_err(|_| bad(format!("bad number `{f}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        table.rows.push(row);
    }
    Ok(table)
}
