//! Per-trial records, serialized one JSON object per line.
//!
//! `samples_drawn` is the sub-linearity ledger: the number of row indices
//! committed by each sampling step's budget. Per-step budgets come from the
//! configuration formulas alone and never reference `n`. Evaluation scans
//! (coverage counting, reference ratios) run after an algorithm finishes and
//! are excluded from the ledger.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::geometry::{coverage_count, Ball, PointSet, DEFAULT_SLACK};
use crate::rng::RngStream;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TrialReport {
    pub algorithm: String,
    pub seed: u64,
    pub stream: u64,
    pub n: u64,
    pub d: u64,
    /// Snapshot of the configuration the trial ran under.
    pub cfg: serde_json::Value,
    pub radius: f64,
    pub center_norm: f64,
    pub samples_drawn: u64,
    pub coverage_count: u64,
    pub target_coverage: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_vs_reference: Option<f64>,
    pub fallback: bool,
    pub wall_time_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Selection rank actually used by the outlier estimator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_rank: Option<u64>,
    /// The alternative rank the proof constructs; recorded alongside.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_rank_proof: Option<u64>,
}

impl TrialReport {
    pub(crate) fn new(
        algorithm: &str,
        ps: &PointSet,
        stream: RngStream,
        cfg: serde_json::Value,
    ) -> Self {
        Self {
            algorithm: algorithm.to_string(),
            seed: stream.seed,
            stream: stream.stream,
            n: ps.n() as u64,
            d: ps.d() as u64,
            cfg,
            radius: 0.0,
            center_norm: 0.0,
            samples_drawn: 0,
            coverage_count: 0,
            target_coverage: ps.n() as u64,
            ratio_vs_reference: None,
            fallback: false,
            wall_time_ms: 0.0,
            gamma: None,
            t_rank: None,
            t_rank_proof: None,
        }
    }

    /// Fills the evaluation-only fields: output geometry, full coverage
    /// scan, and wall time. Runs after the algorithm proper.
    pub(crate) fn finish(&mut self, ball: &Ball, ps: &PointSet, started: Instant) {
        self.radius = ball.radius;
        self.center_norm = ball.center.iter().map(|x| x * x).sum::<f64>().sqrt();
        self.coverage_count = coverage_count(ps, ball, DEFAULT_SLACK) as u64;
        self.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    }

    /// Records the output radius relative to a reference radius.
    pub fn with_reference(mut self, reference_radius: f64) -> Self {
        self.ratio_vs_reference = if reference_radius > 0.0 {
            Some(self.radius / reference_radius)
        } else if self.radius == 0.0 {
            Some(1.0)
        } else {
            None
        };
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }

    /// Serialization with the wall time zeroed: equal keys mean two trials
    /// agree on every reproducible field.
    pub fn determinism_key(&self) -> String {
        let mut clone = self.clone();
        clone.wall_time_ms = 0.0;
        clone.to_json_line()
    }
}
