use std::collections::BTreeSet;
use std::io::Write;

use serde::Serialize;

use super::monitor::{Extremes, Violation};
use crate::error::Result;

/// One sampled row of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FlowRecord {
    pub t: f64,
    /// `A_{−1}, …, A_n`.
    pub quermass: Vec<f64>,
    #[serde(flatten)]
    pub extremes: Extremes,
    /// Estimates breached since the previous record.
    pub violations: BTreeSet<Violation>,
}

impl FlowRecord {
    fn fields(&self) -> Vec<String> {
        let e = &self.extremes;
        let mut out = vec![self.t.to_string()];
        out.extend(self.quermass.iter().map(f64::to_string));
        out.extend(
            [
                e.min_u,
                e.min_rho,
                e.max_rho,
                e.min_f,
                e.max_f,
                e.min_lambda,
                e.max_lambda,
                e.max_speed,
            ]
            .iter()
            .map(f64::to_string),
        );
        let flags: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        out.push(flags.join(";"));
        out
    }
}

/// Sampled history of a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FlowTrace {
    pub n: usize,
    pub records: Vec<FlowRecord>,
}

impl FlowTrace {
    pub fn new(n: usize) -> Self {
        Self { n, records: Vec::new() }
    }

    pub fn header(n: usize) -> Vec<String> {
        let mut h = vec!["t".to_string()];
        h.extend((-1..=n as isize).map(|m| format!("A_{m}")));
        h.extend(
            [
                "minU",
                "minRho",
                "maxRho",
                "minF",
                "maxF",
                "minLambda",
                "maxLambda",
                "maxSpeed",
                "violationFlags",
            ]
            .iter()
            .map(|s| s.to_string()),
        );
        h
    }

    /// Every violation recorded along the run.
    pub fn violations(&self) -> BTreeSet<Violation> {
        self.records.iter().flat_map(|r| r.violations.iter().copied()).collect()
    }

    pub fn last(&self) -> Option<&FlowRecord> {
        self.records.last()
    }

    /// Record closest to time `t`.
    pub fn at(&self, t: f64) -> Option<&FlowRecord> {
        self.records
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        self.write_csv_with(out, &[], |_| Vec::new())
    }

    /// Writes the standard columns followed by `extra_header`, filling the
    /// extra cells per record with `extra`.
    pub fn write_csv_with<W: Write>(
        &self,
        out: W,
        extra_header: &[&str],
        extra: impl Fn(usize) -> Vec<String>,
    ) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = Self::header(self.n);
        header.extend(extra_header.iter().map(|s| s.to_string()));
        w.write_record(&header)?;
        for (i, r) in self.records.iter().enumerate() {
            let mut row = r.fields();
            row.extend(extra(i));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
