use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// One iteration of an encode or decode.
///
/// `lambda` and `threshold` are the values in force when the iteration ran.
/// `mean_l1_distortion` is only known on the encoder side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: u64,
    pub lambda: f64,
    pub threshold: f64,
    pub cumulative_payload_nats: f64,
    pub mean_l1_distortion: Option<f64>,
    pub sparsity: f64,
    /// A refresh preceded this iteration.
    pub refresh: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trace {
    pub n: usize,
    pub rows: Vec<TraceRow>,
    pub refresh_count: u64,
    pub payload_bits: u64,
}

impl Trace {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: TraceRow) {
        self.rows.push(row);
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    /// Index-emitting iterations recorded (the `t = 0` row excluded).
    pub fn iterations(&self) -> u64 {
        self.rows.last().map_or(0, |r| r.t)
    }

    /// Check that `t` strictly increases and sparsity and distortion never
    /// go up. Returns a description of the first violation.
    pub fn check_monotone(&self) -> std::result::Result<(), String> {
        for w in self.rows.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if b.t <= a.t {
                return Err(format!("t not increasing at row t={}", b.t));
            }
            if b.sparsity > a.sparsity {
                return Err(format!("sparsity rose at t={}", b.t));
            }
            if let (Some(da), Some(db)) = (a.mean_l1_distortion, b.mean_l1_distortion) {
                if db > da {
                    return Err(format!("distortion rose at t={}: {da} -> {db}", b.t));
                }
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row).map_err(csv_error)?;
        }
        if self.rows.is_empty() {
            w.write_record([
                "t",
                "lambda",
                "threshold",
                "cumulative_payload_nats",
                "mean_l1_distortion",
                "sparsity",
                "refresh",
            ])
            .map_err(csv_error)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))
    }
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    Error::io("<csv>", std::io::Error::other(e.to_string()))
}
