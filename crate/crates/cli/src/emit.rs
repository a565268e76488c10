use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use hyperlab::prelude::*;
use serde_json::json;

use crate::config::Format;

/// A scan row: a report, or the error that stopped that instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Row {
    Report(BoundReport),
    Failed {
        quantity: Quantity,
        p: u64,
        card_a: Option<u64>,
        card_h: Option<u64>,
        k: Option<u64>,
        error: String,
    },
}

impl Row {
    fn csv_record(&self) -> Vec<String> {
        match self {
            Row::Report(r) => r.csv_record(),
            Row::Failed {
                quantity,
                p,
                card_a,
                card_h,
                k,
                error,
            } => {
                let opt = |v: &Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
                vec![
                    quantity.to_string(),
                    p.to_string(),
                    opt(card_a),
                    opt(card_h),
                    String::new(),
                    opt(k),
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("error: {error}"),
                    String::new(),
                ]
            }
        }
    }

    fn json(&self) -> Result<serde_json::Value> {
        Ok(match self {
            Row::Report(r) => serde_json::to_value(r)?,
            Row::Failed {
                quantity,
                p,
                card_a,
                card_h,
                k,
                error,
            } => json!({
                "quantity": quantity,
                "inputs": { "p": p, "card_A": card_a, "card_H": card_h, "M": null, "k": k },
                "error": error,
            }),
        })
    }
}

pub fn render_reports(reports: &[BoundReport], format: Format) -> Result<String> {
    let rows: Vec<Row> = reports.iter().cloned().map(Row::Report).collect();
    render_rows(&rows, format)
}

/// CSV with the fixed header, or a JSON array of report objects.
pub fn render_rows(rows: &[Row], format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(BoundReport::CSV_HEADER)?;
            for row in rows {
                w.write_record(row.csv_record())?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        Format::Json => {
            let values = rows.iter().map(Row::json).collect::<Result<Vec<_>>>()?;
            let mut s = serde_json::to_string_pretty(&values)?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Writes to `path` when given, otherwise to `stdout`.
pub fn write_output(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => stdout.write_all(text.as_bytes()).context("writing to stdout"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hyperlab::bounds::{make_report, ReportInputs};

    fn report() -> BoundReport {
        let inputs = ReportInputs {
            p: 7,
            card_A: Some(2),
            card_H: Some(1),
            M: Some(1),
            k: None,
        };
        make_report(Quantity::Charsum, inputs, 2, 4.0 / 7.0 + 4.0 * 7f64.sqrt(), "charsum", Exactness::ExactConstant)
    }

    #[test]
    fn single_report_csv_has_two_lines() {
        let text = render_reports(&[report()], Format::Csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "quantity,p,card_A,card_H,M,k,empirical,bound,ratio,regime,exactness");
        assert_eq!(lines[1], "charsum,7,2,1,1,,2,11.1544338157,0.179300898015,charsum,exact-constant");
    }

    #[test]
    fn json_round_trips() {
        let r = report();
        let text = render_reports(std::slice::from_ref(&r), Format::Json).unwrap();
        let back: Vec<BoundReport> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, vec![r]);
    }

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(render_rows(&[], Format::Csv).unwrap().lines().count(), 1);
    }
}
