//! CSV and manifest serialization.
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`, with `.` as decimal separator regardless of locale.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::diagnostics::TrajectoryRecord;

pub const TRAJECTORY_HEADER: &str =
    "t,x1,x2,x3,v1,v2,v3,energy,energy_err,momentum,momentum_err,fp_iters";

/// Shortest round-trip decimal representation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Writes the record as CSV. `energy_err` and `momentum_err` are absolute
/// deviations from the first sample; momentum columns are empty when the
/// record carries no momentum.
pub fn write_trajectory_csv<W: Write>(record: &TrajectoryRecord, mut out: W) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    let Some(first) = record.samples().first() else {
        return Ok(());
    };
    let mut line = String::with_capacity(256);
    for s in record.samples() {
        line.clear();
        for value in [s.t, s.x.e1, s.x.e2, s.x.e3, s.v.e1, s.v.e2, s.v.e3, s.energy] {
            line.push_str(&fmt_f64(value));
            line.push(',');
        }
        line.push_str(&fmt_f64((s.energy - first.energy).abs()));
        line.push(',');
        match (s.momentum, first.momentum) {
            (Some(m), Some(m0)) => {
                let _ = write!(line, "{},{}", fmt_f64(m), fmt_f64((m - m0).abs()));
            }
            _ => line.push(','),
        }
        let _ = write!(line, ",{}", s.fp_iters);
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn trajectory_csv_string(record: &TrajectoryRecord) -> String {
    let mut buf = Vec::new();
    write_trajectory_csv(record, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

/// Plain `key: value` run manifest, entries kept in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            // values are single-line by construction
            let v = v.replace('\n', " ");
            let _ = writeln!(s, "{k}: {v}");
        }
        s
    }
}
