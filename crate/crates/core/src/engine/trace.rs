use std::fmt::Write as _;
use std::io;

use serde::Serialize;

pub const TRACE_HEADER: &str = "outer,inner,rho,loss,distance,gradnorm,step";

/// One inner iteration. `step` is the SD step length or the ADMM `μ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub outer: usize,
    pub inner: usize,
    pub rho: f64,
    pub loss: f64,
    pub distance: f64,
    pub gradnorm: f64,
    pub step: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunTrace {
    rows: Vec<TraceRow>,
}

impl RunTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a row; `(outer, inner)` must not go backwards.
    pub fn push(&mut self, row: TraceRow) {
        debug_assert!(self
            .rows
            .last()
            .is_none_or(|last| (last.outer, last.inner) < (row.outer, row.inner)));
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(TRACE_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = write!(s, "{},{},{},{},{},{},", r.outer, r.inner, r.rho, r.loss, r.distance, r.gradnorm);
            if let Some(step) = r.step {
                let _ = write!(s, "{step}");
            }
            s.push('\n');
        }
        s
    }

    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv_string().as_bytes())
    }
}
