//! CSV and JSON rendering. Floats use the shortest round-trip form, so output
//! is byte-stable for a given configuration.

use std::io::Write;

use prolate::experiments::Outcome;
use prolate::{CheckRecord, FigureRow, OutputFormat, Table1Row, ThresholdRecord};
use serde::Serialize;

pub trait CsvRow {
    fn header(rows: &[Self]) -> Vec<&'static str>
    where
        Self: Sized;
    fn fields(&self) -> Vec<String>;
}

fn sci(x: f64) -> String {
    format!("{x:e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

impl CsvRow for Table1Row {
    fn header(_: &[Self]) -> Vec<&'static str> {
        vec!["c", "n", "pi_n_over_2c", "abs_lambda", "mu"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.c.to_string(),
            self.n.to_string(),
            self.pi_n_over_2c.to_string(),
            sci(self.abs_lambda),
            sci(self.mu),
        ]
    }
}

impl CsvRow for ThresholdRecord {
    fn header(_: &[Self]) -> Vec<&'static str> {
        vec!["eps", "c", "n1", "delta1", "n2", "delta2", "n2_minus_n1"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            sci(self.epsilon),
            self.c.to_string(),
            self.n1.to_string(),
            self.delta1.to_string(),
            self.n2.to_string(),
            self.delta2.to_string(),
            self.n2_minus_n1.to_string(),
        ]
    }
}

impl CsvRow for FigureRow {
    fn header(rows: &[Self]) -> Vec<&'static str> {
        let mut h = vec!["c", "n", "log_abs_lambda", "log_zeta"];
        if rows.iter().any(|r| r.neg_delta.is_some()) {
            h.extend(["neg_delta", "log_xi", "ordering"]);
        }
        h
    }

    fn fields(&self) -> Vec<String> {
        let mut f = vec![
            self.c.to_string(),
            self.n.to_string(),
            self.log_abs_lambda.to_string(),
            self.log_zeta.to_string(),
        ];
        if self.neg_delta.is_some() {
            f.push(opt(self.neg_delta));
            f.push(opt(self.log_xi));
            f.push(self.ordering.map_or_else(String::new, |b| b.to_string()));
        }
        f
    }
}

impl CsvRow for CheckRecord {
    fn header(_: &[Self]) -> Vec<&'static str> {
        vec!["suite", "check", "c", "n", "applicable", "passed", "detail"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.suite.to_string(),
            self.check.to_string(),
            opt(self.c),
            self.n.map_or_else(String::new, |n| n.to_string()),
            self.applicable.to_string(),
            self.passed.to_string(),
            self.detail.clone(),
        ]
    }
}

pub fn write_rows<T: CsvRow + Serialize, W: Write>(
    out: W,
    format: OutputFormat,
    outcome: &Outcome<T>,
) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(out, &outcome.rows),
        OutputFormat::Json => write_json(out, outcome),
    }
}

pub fn write_csv<T: CsvRow, W: Write>(out: W, rows: &[T]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(T::header(rows))?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()
}

pub fn write_json<T: Serialize + ?Sized, W: Write>(mut out: W, value: &T) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
}
