use std::io::Write;

use anyhow::Result;
use serde::Serialize;

use crate::rows::{AsymptoticRow, BoundsRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
    Plain,
}

fn fixed(x: f64) -> String {
    format!("{x:.4}")
}

fn write_csv<W: Write, R: Serialize>(out: W, rows: &[R], header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    // written by hand so an empty table still has a header
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_text<W: Write>(mut out: W, header: &[&str], cells: &[Vec<String>], format: Format) -> Result<()> {
    let widths: Vec<usize> = (0..header.len())
        .map(|j| {
            cells
                .iter()
                .map(|r| r[j].len())
                .chain(std::iter::once(header[j].len()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cols: &[String]| -> String {
        let padded: Vec<String> = cols
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:>w$}"))
            .collect();
        match format {
            Format::Markdown => format!("| {} |", padded.join(" | ")),
            _ => padded.join("  "),
        }
    };
    let header: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    writeln!(out, "{}", line(&header))?;
    if format == Format::Markdown {
        // right-aligned columns, same width as "| cell |"
        let rule: Vec<String> = widths.iter().map(|&w| format!("{}:", "-".repeat(w + 1))).collect();
        writeln!(out, "|{}|", rule.join("|"))?;
    }
    for row in cells {
        writeln!(out, "{}", line(row))?;
    }
    Ok(())
}

const ASYMPTOTIC_HEADER: [&str; 6] = ["alpha", "n", "mu_n", "lambda_tilde", "band", "band_valid"];
const BOUNDS_HEADER: [&str; 6] = ["alpha", "n", "lower", "asymptotic", "literature_upper", "upper"];

pub fn write_asymptotic<W: Write>(out: W, rows: &[AsymptoticRow], format: Format) -> Result<()> {
    if format == Format::Csv {
        return write_csv(out, rows, &ASYMPTOTIC_HEADER);
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.alpha.to_string(),
                r.n.to_string(),
                fixed(r.mu_n),
                fixed(r.lambda_tilde),
                fixed(r.band),
                r.band_valid.to_string(),
            ]
        })
        .collect();
    write_text(out, &ASYMPTOTIC_HEADER, &cells, format)
}

pub fn write_bounds<W: Write>(out: W, rows: &[BoundsRow], format: Format) -> Result<()> {
    if format == Format::Csv {
        return write_csv(out, rows, &BOUNDS_HEADER);
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.alpha.to_string(),
                r.n.to_string(),
                fixed(r.lower),
                fixed(r.asymptotic),
                fixed(r.literature_upper),
                r.upper.map(fixed).unwrap_or_default(),
            ]
        })
        .collect();
    write_text(out, &BOUNDS_HEADER, &cells, format)
}
