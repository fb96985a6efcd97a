//! Text formats: comma-separated matrices, experiment results and summaries,
//! the JSON denoising report, and a gnuplot script for the summary curves.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimators::DenoiseReport;
use crate::matrix::DenseMatrix;
use crate::simulate::{ExperimentRecord, SummaryRow};

pub const RESULTS_HEADER: &str = "rank,sigma,rep,sigma_hat,sq_err_sigma,mse_matrix,kept_rank";
pub const SUMMARY_HEADER: &str = "rank,sigma,mean_sq_err_sigma,mean_mse_matrix,count";

/// Shortest decimal string that parses back to exactly `x` (at most 17
/// significant digits).
pub fn format_float(x: f64) -> String {
    format!("{x}")
}

/// `x` rounded to `digits` significant digits, rendered without trailing zeros.
pub fn format_significant(x: f64, digits: usize) -> String {
    let digits = digits.clamp(1, 17);
    let rounded: f64 = format!("{:.*e}", digits - 1, x)
        .parse()
        .expect("scientific rendering parses");
    format_float(rounded)
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let lines: Vec<&str> = text.lines().collect();
    let last = lines.iter().rposition(|l| !l.trim().is_empty()).map_or(0, |i| i + 1);
    for (idx, line) in lines[..last].iter().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "empty row".into(),
            });
        }
        let mut row = Vec::new();
        for (col, field) in line.split(',').enumerate() {
            let field = field.trim();
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("field {} ({field:?}) is not a number", col + 1),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("field {} is not finite", col + 1),
                });
            }
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {} fields, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no rows".into(),
        });
    }
    DenseMatrix::from_rows(&rows)
}

pub fn render_matrix(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|&v| format_float(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    Ok(fs::write(path, render_matrix(m))?)
}

pub fn render_results(records: &[ExperimentRecord]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.rank,
            format_float(r.sigma),
            r.rep,
            format_float(r.sigma_hat),
            format_float(r.sq_err_sigma),
            format_float(r.mse_matrix),
            r.kept_rank
        );
    }
    out
}

pub fn render_summary(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.rank,
            format_float(r.sigma),
            format_float(r.mean_sq_err_sigma),
            format_float(r.mean_mse_matrix),
            r.count
        );
    }
    out
}

/// Parses a summary CSV back into rows.
pub fn parse_summary(text: &str) -> Result<Vec<SummaryRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == SUMMARY_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header {SUMMARY_HEADER:?}"),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse { line: idx + 1, message };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(bad(format!("expected 5 fields, found {}", fields.len())));
        }
        let float = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
        let int = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("{s:?}: {e}")));
        rows.push(SummaryRow {
            rank: int(fields[0])?,
            sigma: float(fields[1])?,
            mean_sq_err_sigma: float(fields[2])?,
            mean_mse_matrix: float(fields[3])?,
            count: int(fields[4])?,
        });
    }
    Ok(rows)
}

pub fn render_report(report: &DenoiseReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Gnuplot script drawing two side-by-side log-scale panels from the
/// summary CSV: mean squared error of `σ̂` and of `M̂` against `σ`, one
/// curve per rank.
pub fn render_plot_script(summary_path: &str, ranks: &[usize]) -> String {
    let mut ranks = ranks.to_vec();
    ranks.sort_unstable();
    ranks.dedup();
    let curves = |column: usize| -> String {
        ranks
            .iter()
            .map(|r| {
                format!(
                    "DATA using ($1=={r} ? $2 : 1/0):($1=={r} ? ${column} : 1/0) with linespoints title 'r = {r}'"
                )
            })
            .collect::<Vec<_>>()
            .join(", \\\n     ")
    };
    let mut out = String::new();
    let _ = writeln!(out, "# Mean squared error of the noise-level and matrix estimates.");
    let _ = writeln!(out, "# Render with: gnuplot -p <this file>");
    let _ = writeln!(out, "DATA = '{}'", summary_path.replace('\'', "''"));
    let _ = writeln!(out, "set datafile separator ','");
    let _ = writeln!(out, "set key autotitle columnhead");
    let _ = writeln!(out, "set terminal pngcairo size 1200,500");
    let _ = writeln!(out, "set output DATA.'.png'");
    let _ = writeln!(out, "set multiplot layout 1,2");
    let _ = writeln!(out, "set logscale xy");
    let _ = writeln!(out, "set xlabel 'sigma'");
    let _ = writeln!(out, "set key top left");
    let _ = writeln!(out, "set title 'MSE of sigma estimate'");
    let _ = writeln!(out, "set ylabel 'mean (sigma_hat - sigma)^2'");
    let _ = writeln!(out, "plot {}", curves(3));
    let _ = writeln!(out, "set title 'MSE of matrix estimate'");
    let _ = writeln!(out, "set ylabel 'mean mse(M_hat, M)'");
    let _ = writeln!(out, "plot {}", curves(4));
    let _ = writeln!(out, "unset multiplot");
    out
}
