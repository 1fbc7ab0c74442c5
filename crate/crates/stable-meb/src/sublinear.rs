//! Sub-linear sampling algorithms for enclosing balls of stable instances:
//! the epsilon-net ball (algorithm I), the two-witness radius-range
//! estimator with its quick 4/(1-eps) ball, the core-set growth oracle for
//! candidate radii, and the binary-search ball (algorithm II).

use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coreset::{approx_center, coreset_meb};
use crate::error::ConfigError;
use crate::geometry::{farthest_in, Ball, PointSet};
use crate::report::TrialReport;
use crate::rng::{sample_indices, RngStream};

/// Hard cap on any single sampling budget; larger requests are reported as
/// configuration errors rather than silently clamped.
pub const SAMPLE_BUDGET_CAP: u64 = 1 << 26;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Parameters of the sampling algorithms. `beta` is the stability lower
/// bound of the instance, supplied by the caller; `c_net` and `c_hit` expose
/// the constants hidden in the sample-size bounds (default 1).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AlgoConfig {
    pub epsilon: f64,
    pub beta: f64,
    /// Failure probability of a single estimate or oracle call.
    pub eta: f64,
    /// Overall failure budget of the binary-search algorithm.
    pub eta0: f64,
    /// Center-accuracy share in (0, 1); 1/3 reproduces the stated
    /// iteration cap z = 3/epsilon.
    pub s: f64,
    pub c_net: f64,
    pub c_hit: f64,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        Self { epsilon: 0.1, beta: 0.05, eta: 0.1, eta0: 0.1, s: 1.0 / 3.0, c_net: 1.0, c_hit: 1.0 }
    }
}

impl AlgoConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(ConfigError::Epsilon(self.epsilon));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(ConfigError::Beta(self.beta));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(ConfigError::Eta(self.eta));
        }
        if !(self.eta0 > 0.0 && self.eta0 < 1.0) {
            return Err(ConfigError::Eta(self.eta0));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(ConfigError::Shrink(self.s));
        }
        if self.c_net < 1.0 {
            return Err(ConfigError::Constant(self.c_net));
        }
        if self.c_hit < 1.0 {
            return Err(ConfigError::Constant(self.c_hit));
        }
        Ok(())
    }

    /// Growth cap `z = ceil(2 / ((1 - s) * epsilon))`; 3/epsilon at s = 1/3.
    pub fn coreset_cap(&self) -> usize {
        (2.0 / ((1.0 - self.s) * self.epsilon)).ceil() as usize
    }

    /// Inner center accuracy `xi = s * epsilon / (1 + epsilon)`.
    pub fn xi(&self) -> f64 {
        self.s * self.epsilon / (1.0 + self.epsilon)
    }

    /// Net sample size `ceil(c_net * (d/beta) * ln(d/beta + e))`; the
    /// additive e keeps the logarithm positive for small d/beta.
    pub fn net_sample_size(&self, d: usize) -> u64 {
        let ratio = d as f64 / self.beta;
        (self.c_net * ratio * (ratio + std::f64::consts::E).ln()).ceil() as u64
    }

    /// Hitting-sample size `ceil(c_hit * (1/beta) * ln(1/eta))` for the
    /// radius-range estimate.
    pub fn range_sample_size(&self) -> usize {
        (self.c_hit / self.beta * (1.0 / self.eta).ln()).ceil() as usize
    }

    /// Per-iteration oracle sample size `ceil(c_hit * (1/beta) * ln(z/eta))`.
    pub fn oracle_sample_size(&self, eta: f64) -> usize {
        (self.c_hit / self.beta * (self.coreset_cap() as f64 / eta).ln()).ceil() as usize
    }

    /// Grid exponent count `w = ceil(log_{1+eps}(2 / (1-eps)^2)) + 1`.
    pub fn grid_len(&self) -> usize {
        let e = self.epsilon;
        ((2.0 / ((1.0 - e) * (1.0 - e))).ln() / (1.0 + e).ln()).ceil() as usize + 1
    }

    /// Output expansion of algorithm I: `(1 + (2 + sqrt 2) sqrt(eps)) / (1 - eps)`.
    pub fn alg1_expansion(&self) -> f64 {
        (1.0 + (2.0 + SQRT2) * self.epsilon.sqrt()) / (1.0 - self.epsilon)
    }

    /// End-to-end ratio bound of algorithm I: `alg1_expansion * (1 + eps)`.
    pub fn alg1_ratio_bound(&self) -> f64 {
        self.alg1_expansion() * (1.0 + self.epsilon)
    }

    /// Ratio bound of the quick two-witness ball: `4 / (1 - eps)`.
    pub fn quick_ratio_bound(&self) -> f64 {
        4.0 / (1.0 - self.epsilon)
    }

    /// Output expansion of algorithm II:
    /// `(1 + (4 + 4 sqrt 2) sqrt(eps / (1 - eps))) / (1 + eps)`.
    pub fn alg2_expansion(&self) -> f64 {
        let x2 = (4.0 + 4.0 * SQRT2) * (self.epsilon / (1.0 - self.epsilon)).sqrt();
        (1.0 + x2) / (1.0 + self.epsilon)
    }

    /// Ratio bound of algorithm II: `(1 + x1)(1 + x2) / (1 + eps)` with
    /// `x1 = 8 eps / (1 - eps)` and `x2 = (4 + 4 sqrt 2) sqrt(eps / (1 - eps))`.
    pub fn alg2_ratio_bound(&self) -> f64 {
        let x1 = 8.0 * self.epsilon / (1.0 - self.epsilon);
        (1.0 + x1) * self.alg2_expansion()
    }
}

/// Interval bracketing the optimal radius, with the witness pair that
/// produced it: `lo = ||p1 - p2|| / 2`, `hi = ||p1 - p2|| / (1 - eps)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusRange {
    pub lo: f64,
    pub hi: f64,
    pub p1: usize,
    pub p2: usize,
    pub witness_distance: f64,
}

/// Outcome of one oracle call on a candidate radius.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleOutcome {
    pub yes: bool,
    /// Accepted center; present exactly when the answer is yes.
    pub center: Option<Vec<f64>>,
    pub iterations_used: usize,
    pub samples_drawn: u64,
}

/// Epsilon-net ball: core-set ball of a `Theta((d/beta) log(d/beta))`
/// uniform sample, expanded by `alg1_expansion`. Touches only the sampled
/// rows; no full scan inside the algorithm.
pub fn alg1_meb(
    ps: &PointSet,
    cfg: &AlgoConfig,
    stream: RngStream,
) -> Result<(Ball, TrialReport), ConfigError> {
    cfg.validate()?;
    let started = Instant::now();
    let m = cfg.net_sample_size(ps.d());
    if m > SAMPLE_BUDGET_CAP {
        return Err(ConfigError::SampleBudget { requested: m, cap: SAMPLE_BUDGET_CAP });
    }
    let mut rng = stream.rng();
    let idx = sample_indices(&mut rng, ps.n(), m as usize);
    let sample = ps.subset(&idx);
    let (inner, _) = coreset_meb(&sample, cfg.epsilon, cfg.s)?;
    let ball = Ball::new(inner.center, inner.radius * cfg.alg1_expansion());
    let mut report = TrialReport::new("alg1", ps, stream, snapshot(cfg));
    report.samples_drawn = m;
    report.finish(&ball, ps, started);
    Ok((ball, report))
}

fn snapshot(cfg: &AlgoConfig) -> serde_json::Value {
    serde_json::to_value(cfg).expect("config serializes")
}

/// Full-pass core-set ball packaged as a trial: the linear-time baseline the
/// sampling algorithms are compared against. Deterministic regardless of the
/// stream; the ledger records all n rows.
pub fn coreset_trial(
    ps: &PointSet,
    cfg: &AlgoConfig,
    stream: RngStream,
) -> Result<(Ball, TrialReport), ConfigError> {
    cfg.validate()?;
    let started = Instant::now();
    let (ball, _) = coreset_meb(ps, cfg.epsilon, cfg.s)?;
    let mut report = TrialReport::new("coreset", ps, stream, snapshot(cfg));
    report.samples_drawn = ps.n() as u64;
    report.finish(&ball, ps, started);
    Ok((ball, report))
}

fn range_inner(ps: &PointSet, cfg: &AlgoConfig, rng: &mut ChaCha8Rng) -> (RadiusRange, u64) {
    let p1 = sample_indices(rng, ps.n(), 1)[0];
    let q = sample_indices(rng, ps.n(), cfg.range_sample_size());
    let (p2, witness) = farthest_in(ps, &q, ps.row(p1));
    let range = RadiusRange {
        lo: witness / 2.0,
        hi: witness / (1.0 - cfg.epsilon),
        p1,
        p2,
        witness_distance: witness,
    };
    (range, 1 + q.len() as u64)
}

/// Two-witness radius range: a random anchor `p1`, the farthest point `p2`
/// of a hitting sample, and the bracket `[|p1 p2|/2, |p1 p2|/(1-eps)]`,
/// which contains the optimal radius with probability `1 - eta` on
/// beta-stable instances.
pub fn estimate_radius_range(
    ps: &PointSet,
    cfg: &AlgoConfig,
    stream: RngStream,
) -> Result<RadiusRange, ConfigError> {
    cfg.validate()?;
    let mut rng = stream.rng();
    Ok(range_inner(ps, cfg, &mut rng).0)
}

/// Quick ball `B(p1, 2 |p1 p2| / (1 - eps))`: covers the whole set and is a
/// `4 / (1 - eps)` approximation with probability `1 - eta`.
pub fn quick_meb(
    ps: &PointSet,
    cfg: &AlgoConfig,
    stream: RngStream,
) -> Result<(Ball, TrialReport), ConfigError> {
    cfg.validate()?;
    let started = Instant::now();
    let mut rng = stream.rng();
    let (range, samples) = range_inner(ps, cfg, &mut rng);
    let ball = quick_ball(ps, cfg, &range);
    let mut report = TrialReport::new("quick", ps, stream, snapshot(cfg));
    report.samples_drawn = samples;
    report.finish(&ball, ps, started);
    Ok((ball, report))
}

fn quick_ball(ps: &PointSet, cfg: &AlgoConfig, range: &RadiusRange) -> Ball {
    Ball::new(ps.row(range.p1).to_vec(), 2.0 / (1.0 - cfg.epsilon) * range.witness_distance)
}

/// Core-set growth oracle for a candidate radius `h`. Guarantees on
/// beta-stable instances: yes whenever `h >= (1 + eps) Rad(P)`; no with
/// probability at least `1 - eta` whenever `h < (1 - eps) Rad(P)`.
///
/// The per-call sampling budget (one seed row plus `z` iteration chunks) is
/// drawn up front, so the committed count depends only on the
/// configuration; early stopping skips the distance work of unconsumed
/// chunks.
pub fn oracle_test_h(
    ps: &PointSet,
    h: f64,
    cfg: &AlgoConfig,
    stream: RngStream,
) -> Result<OracleOutcome, ConfigError> {
    cfg.validate()?;
    let mut rng = stream.rng();
    Ok(oracle_inner(ps, h, cfg.eta, cfg, &mut rng))
}

fn oracle_inner(
    ps: &PointSet,
    h: f64,
    eta: f64,
    cfg: &AlgoConfig,
    rng: &mut ChaCha8Rng,
) -> OracleOutcome {
    assert!(h > 0.0, "candidate radius must be positive, got {h}");
    let z = cfg.coreset_cap();
    let chunk = cfg.oracle_sample_size(eta);
    let budget = 1 + z * chunk;
    let idx = sample_indices(rng, ps.n(), budget);
    let xi = cfg.xi();
    let mut t = vec![idx[0]];
    for i in 1..=z {
        let center = approx_center(ps, &t, xi);
        let sample = &idx[1 + (i - 1) * chunk..1 + i * chunk];
        let (far_idx, far_dist) = farthest_in(ps, sample, &center);
        if far_dist < h {
            return OracleOutcome {
                yes: true,
                center: Some(center),
                iterations_used: i,
                samples_drawn: budget as u64,
            };
        }
        t.push(far_idx);
    }
    OracleOutcome { yes: false, center: None, iterations_used: z, samples_drawn: budget as u64 }
}

/// Values of the candidate-radius grid: `(1 - eps) a (1 + eps)^i` for
/// `i < w`, with the last point pinned to `(1 + eps) b` so the grid ends
/// exactly at the top of the bracket.
pub fn search_grid(cfg: &AlgoConfig, range: &RadiusRange) -> Vec<f64> {
    let w = cfg.grid_len();
    (0..=w).map(|i| grid_value(cfg, range, i)).collect()
}

fn grid_value(cfg: &AlgoConfig, range: &RadiusRange, i: usize) -> f64 {
    let e = cfg.epsilon;
    let w = cfg.grid_len();
    if i < w {
        (1.0 - e) * range.lo * (1.0 + e).powi(i as i32)
    } else {
        // Pinned endpoint, then geometric continuation for padded probes
        // beyond the real grid (always in guaranteed-yes territory).
        (1.0 + e).powi((i - w) as i32) * (1.0 + e) * range.hi
    }
}

enum SearchPass {
    Flip(i64),
    Inconsistent,
}

/// Binary-search ball (algorithm II): estimate the radius bracket, locate
/// the oracle's no-to-yes flip on the candidate grid, rerun the oracle two
/// grid steps up, and return the accepted center with the
/// `alg2_expansion` radius. Falls back to the quick ball when the search is
/// inconsistent twice or the confirming call answers no.
pub fn alg2_meb(
    ps: &PointSet,
    cfg: &AlgoConfig,
    stream: RngStream,
) -> Result<(Ball, TrialReport), ConfigError> {
    cfg.validate()?;
    let started = Instant::now();
    let mut rng = stream.rng();
    let mut report = TrialReport::new("alg2", ps, stream, snapshot(cfg));
    let (range, mut samples) = range_inner(ps, cfg, &mut rng);

    if range.witness_distance == 0.0 {
        // Every sampled point coincides with the anchor.
        let ball = Ball::new(ps.row(range.p1).to_vec(), 0.0);
        report.samples_drawn = samples;
        report.finish(&ball, ps, started);
        return Ok((ball, report));
    }

    let w = cfg.grid_len();
    // Padding the searched index range to a power of two makes the probe
    // count independent of where the flip lands.
    let padded = w.next_power_of_two();
    let eta_search = cfg.eta0 / (2.0 * (w as f64).log2());

    let run_pass = |rng: &mut ChaCha8Rng, samples: &mut u64| -> SearchPass {
        let bottom = oracle_inner(ps, grid_value(cfg, &range, 0), eta_search, cfg, rng);
        *samples += bottom.samples_drawn;
        if bottom.yes {
            return SearchPass::Flip(-1);
        }
        let top = oracle_inner(ps, grid_value(cfg, &range, padded), eta_search, cfg, rng);
        *samples += top.samples_drawn;
        if !top.yes {
            return SearchPass::Inconsistent;
        }
        let (mut lo, mut hi) = (0usize, padded);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let probe = oracle_inner(ps, grid_value(cfg, &range, mid), eta_search, cfg, rng);
            *samples += probe.samples_drawn;
            if probe.yes {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if hi > w {
            // All real grid points answered no; the flip only exists in the
            // padded continuation.
            SearchPass::Inconsistent
        } else {
            SearchPass::Flip(lo as i64)
        }
    };

    let mut outcome = run_pass(&mut rng, &mut samples);
    if matches!(outcome, SearchPass::Inconsistent) {
        // One restart with fresh randomness before giving up.
        outcome = run_pass(&mut rng, &mut samples);
    }

    let (ball, fallback) = match outcome {
        SearchPass::Inconsistent => (quick_ball(ps, cfg, &range), true),
        SearchPass::Flip(i0) => {
            // Confirming call at (1+eps)^(i0+2) a - deliberately without the
            // (1-eps) grid factor.
            let h = (1.0 + cfg.epsilon).powi((i0 + 2) as i32) * range.lo;
            let confirm = oracle_inner(ps, h, cfg.eta0 / 2.0, cfg, &mut rng);
            samples += confirm.samples_drawn;
            match confirm.center {
                Some(center) => (Ball::new(center, cfg.alg2_expansion() * h), false),
                None => (quick_ball(ps, cfg, &range), true),
            }
        }
    };
    report.samples_drawn = samples;
    report.fallback = fallback;
    report.finish(&ball, ps, started);
    Ok((ball, report))
}
