//! Sub-linear enclosing ball with outliers: the two-ball gap estimator
//! selects the t-th farthest sampled point so that, with the right rank, the
//! witness lands in the ring just inside the inlier boundary; the output
//! ball is then a 4/(1-eps) approximation covering the required count.

use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::geometry::{kth_farthest, Ball, PointSet};
use crate::report::TrialReport;
use crate::rng::{sample_indices, RngStream};
use crate::sublinear::{RadiusRange, SAMPLE_BUDGET_CAP};

/// Parameters for the outlier estimator. `beta` is the stability lower
/// bound of the outlier instance; `gamma` the outlier fraction.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OutlierConfig {
    pub gamma: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub c_out: f64,
}

impl Default for OutlierConfig {
    fn default() -> Self {
        Self { gamma: 0.1, beta: 0.05, epsilon: 0.2, eta: 0.1, c_out: 1.0 }
    }
}

impl OutlierConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(ConfigError::Gamma(self.gamma));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(ConfigError::Beta(self.beta));
        }
        if self.gamma + self.beta >= 1.0 {
            return Err(ConfigError::GammaBeta { gamma: self.gamma, beta: self.beta });
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(ConfigError::Epsilon(self.epsilon));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(ConfigError::Eta(self.eta));
        }
        if self.c_out < 1.0 {
            return Err(ConfigError::Constant(self.c_out));
        }
        let m = self.sample_size();
        if m > SAMPLE_BUDGET_CAP {
            return Err(ConfigError::SampleBudget { requested: m, cap: SAMPLE_BUDGET_CAP });
        }
        // Rank window underpinning the estimator: the statement rank must
        // sit strictly past the expected outlier count and no deeper than
        // the ring boundary.
        let m = m as f64;
        let t = self.rank(m as u64) as f64;
        let sigma = self.sigma();
        let lo = (1.0 + 2.0 * sigma) * self.gamma * m;
        let hi = (1.0 - sigma) * (self.gamma + self.beta) * m + 1.0;
        if !(t > lo && t <= hi + 1e-9) {
            return Err(ConfigError::RankWindow { rank: t as usize });
        }
        Ok(())
    }

    /// Concentration slack `sigma = beta / (2 (2 gamma + beta))`, in (0, 1/2).
    pub fn sigma(&self) -> f64 {
        0.5 * self.beta / (2.0 * self.gamma + self.beta)
    }

    /// Sample size
    /// `ceil(c_out * max(1/beta, 1/gamma) * ((2 gamma + beta)^2 / beta^2) * ln(1/eta))`.
    pub fn sample_size(&self) -> u64 {
        let lead = (1.0 / self.beta).max(1.0 / self.gamma);
        let ring = (2.0 * self.gamma + self.beta) / self.beta;
        (self.c_out * lead * ring * ring * (1.0 / self.eta).ln()).ceil() as u64
    }

    /// Selection rank `floor((2 gamma + 2 beta) / (2 gamma + beta) * gamma * m) + 1`.
    pub fn rank(&self, m: u64) -> usize {
        let factor = (2.0 * self.gamma + 2.0 * self.beta) / (2.0 * self.gamma + self.beta);
        (factor * self.gamma * m as f64 + 1e-9).floor() as usize + 1
    }

    /// The rank the proof constructs, `floor((1 + sigma) gamma m) + 1`;
    /// recorded in reports alongside the statement rank.
    pub fn rank_proof(&self, m: u64) -> usize {
        ((1.0 + self.sigma()) * self.gamma * m as f64 + 1e-9).floor() as usize + 1
    }

    /// Ratio bound of the output ball: `4 / (1 - eps)`.
    pub fn ratio_bound(&self) -> f64 {
        4.0 / (1.0 - self.epsilon)
    }

    /// Covered-point target `ceil((1 - gamma) n)`.
    pub fn target_coverage(&self, n: usize) -> u64 {
        (n - (self.gamma * n as f64 + 1e-9).floor() as usize) as u64
    }
}

fn witness_inner(
    ps: &PointSet,
    cfg: &OutlierConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(RadiusRange, u64, usize), ConfigError> {
    let m = cfg.sample_size() as usize;
    let t = cfg.rank(m as u64);
    if t > m {
        return Err(ConfigError::RankOverflow { rank: t, sample_size: m });
    }
    let p1 = sample_indices(rng, ps.n(), 1)[0];
    let q = sample_indices(rng, ps.n(), m);
    let (p2, witness) = kth_farthest(ps, &q, ps.row(p1), t);
    let range = RadiusRange {
        lo: witness / 2.0,
        hi: witness / (1.0 - cfg.epsilon),
        p1,
        p2,
        witness_distance: witness,
    };
    Ok((range, 1 + m as u64, t))
}

/// Radius bracket for the optimal inlier ball: anchor `p1`, then the t-th
/// farthest point of a uniform sample. Contains the optimal radius with
/// probability `(1 - eta)(1 - gamma)` on beta-stable outlier instances.
pub fn outlier_radius_witness(
    ps: &PointSet,
    cfg: &OutlierConfig,
    stream: RngStream,
) -> Result<RadiusRange, ConfigError> {
    cfg.validate()?;
    let mut rng = stream.rng();
    Ok(witness_inner(ps, cfg, &mut rng)?.0)
}

/// Outlier ball `B(p1, 2 |p1 p2| / (1 - eps))`: with probability
/// `(1 - eta)(1 - gamma)` it covers at least `(1 - gamma) n` points with
/// radius at most `4 / (1 - eps)` times the optimal.
pub fn meb_outliers_sublinear(
    ps: &PointSet,
    cfg: &OutlierConfig,
    stream: RngStream,
) -> Result<(Ball, TrialReport), ConfigError> {
    cfg.validate()?;
    let started = Instant::now();
    let mut rng = stream.rng();
    let (range, samples, t) = witness_inner(ps, cfg, &mut rng)?;
    let ball =
        Ball::new(ps.row(range.p1).to_vec(), 2.0 / (1.0 - cfg.epsilon) * range.witness_distance);
    let mut report = TrialReport::new(
        "outlier",
        ps,
        stream,
        serde_json::to_value(cfg).expect("config serializes"),
    );
    report.samples_drawn = samples;
    report.target_coverage = cfg.target_coverage(ps.n());
    report.gamma = Some(cfg.gamma);
    report.t_rank = Some(t as u64);
    report.t_rank_proof = Some(cfg.rank_proof(cfg.sample_size()) as u64);
    report.finish(&ball, ps, started);
    Ok((ball, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::{brute_meb_outliers, generate, Family, InstanceSpec};

    #[test]
    fn rank_formula() {
        let cfg = OutlierConfig { gamma: 0.1, beta: 0.05, ..OutlierConfig::default() };
        assert_eq!(cfg.rank(1000), 121); // floor(1.2 * 0.1 * 1000) + 1
        assert!((cfg.sigma() - 0.1).abs() <= 1e-12);
    }

    #[test]
    fn sample_size_formula() {
        // max(1/beta, 1/gamma) * ((2 gamma + beta)^2 / beta^2) * ln(1/eta)
        // = 20 * 25 * ln 10 = 1151.3; ceil = 1152.
        let cfg = OutlierConfig {
            gamma: 0.1,
            beta: 0.05,
            eta: 0.1,
            c_out: 1.0,
            ..OutlierConfig::default()
        };
        assert_eq!(cfg.sample_size(), 1152);
    }

    #[test]
    fn rank_window_holds_across_valid_configs() {
        for &gamma in &[0.05, 0.1, 0.2, 0.4] {
            for &beta in &[0.01, 0.05, 0.1, 0.3] {
                if gamma + beta >= 1.0 {
                    continue;
                }
                let cfg = OutlierConfig { gamma, beta, ..OutlierConfig::default() };
                cfg.validate().unwrap_or_else(|e| {
                    panic!("gamma {gamma}, beta {beta}: {e}");
                });
                let m = cfg.sample_size();
                assert!(cfg.rank_proof(m) <= cfg.rank(m));
            }
        }
    }

    #[test]
    fn config_rejections() {
        let ok = OutlierConfig::default();
        assert!(OutlierConfig { gamma: 0.0, ..ok }.validate().is_err());
        assert!(OutlierConfig { gamma: 0.7, beta: 0.4, ..ok }.validate().is_err());
        assert!(OutlierConfig { c_out: 0.0, ..ok }.validate().is_err());
        // Even extreme-but-valid parameters (sample of 2) keep the rank
        // inside the ring window; the window check is a structural
        // assertion, not a reachable failure.
        let extreme = OutlierConfig { gamma: 0.5, beta: 0.49, eta: 0.9, epsilon: 0.2, c_out: 1.0 };
        extreme.validate().unwrap();
        assert_eq!(extreme.sample_size(), 2);
        assert_eq!(extreme.rank(2), 2);
    }

    #[test]
    fn degenerate_identical_points() {
        let ps = PointSet::new(2, vec![3.0; 20]).unwrap();
        let cfg = OutlierConfig::default();
        let range = outlier_radius_witness(&ps, &cfg, RngStream::new(1, 0)).unwrap();
        assert_eq!((range.lo, range.hi), (0.0, 0.0));
        let (ball, report) = meb_outliers_sublinear(&ps, &cfg, RngStream::new(1, 0)).unwrap();
        assert_eq!(ball.radius, 0.0);
        assert_eq!(report.coverage_count, 10);
        assert!(report.coverage_count >= report.target_coverage);
    }

    #[test]
    fn radius_formula() {
        // eps = 0.2 turns a unit witness distance into radius 2.5.
        let cfg = OutlierConfig { epsilon: 0.2, ..OutlierConfig::default() };
        assert!((2.0 / (1.0 - cfg.epsilon) - 2.5).abs() <= 1e-12);
        assert!((cfg.ratio_bound() - 5.0).abs() <= 1e-12);
    }

    #[test]
    fn sample_count_is_independent_of_n() {
        let cfg = OutlierConfig::default();
        let mk = |n: usize, seed: u64| {
            generate(&InstanceSpec {
                family: Family::PlantedOutliers,
                n,
                d: 5,
                gamma: 0.1,
                spread: 10.0,
                seed,
            })
            .unwrap()
            .0
        };
        let small = mk(1000, 3);
        let large = mk(4000, 4);
        for trial in 0..3u64 {
            let s = RngStream::new(55, trial);
            let (_, ra) = meb_outliers_sublinear(&small, &cfg, s).unwrap();
            let (_, rb) = meb_outliers_sublinear(&large, &cfg, s).unwrap();
            assert_eq!(ra.samples_drawn, rb.samples_drawn);
            assert_eq!(ra.samples_drawn, cfg.sample_size() + 1);
        }
    }

    #[test]
    fn tiny_planted_instances_meet_ratio_and_coverage_rate() {
        // n = 12, gamma = 1/6: brute force provides the exact optimal
        // radius; the joint coverage-and-ratio event must reach the
        // (1 - eta)(1 - gamma) = 0.75 rate up to a binomial 99% margin.
        let cfg =
            OutlierConfig { gamma: 1.0 / 6.0, beta: 0.05, epsilon: 0.2, eta: 0.1, c_out: 1.0 };
        let spec = InstanceSpec {
            family: Family::PlantedOutliers,
            n: 12,
            d: 3,
            gamma: 1.0 / 6.0,
            spread: 10.0,
            seed: 77,
        };
        let (ps, _) = generate(&spec).unwrap();
        let opt = brute_meb_outliers(&ps, 2).0;
        let mut joint = 0;
        let trials = 300;
        for trial in 0..trials {
            let (ball, report) =
                meb_outliers_sublinear(&ps, &cfg, RngStream::new(500, trial)).unwrap();
            let ratio_ok = ball.radius <= cfg.ratio_bound() * opt.radius;
            let coverage_ok = report.coverage_count >= 10;
            if ratio_ok && coverage_ok {
                joint += 1;
            }
        }
        let threshold = 0.75 - 2.5758 * (0.75f64 * 0.25 / trials as f64).sqrt();
        assert!(
            joint as f64 / trials as f64 >= threshold,
            "joint success {joint}/{trials} below {threshold:.3}"
        );
    }

    #[test]
    fn witness_interval_contains_optimal_radius() {
        // Planted instance with inliers inside the unit ball and outliers at
        // spread 10: the bracket must contain the inlier-optimal radius at
        // the (1 - eta)(1 - gamma) rate. The reference radius comes from the
        // ground-truth inlier set.
        let spec = InstanceSpec {
            family: Family::PlantedOutliers,
            n: 20_000,
            d: 10,
            gamma: 0.1,
            spread: 10.0,
            seed: 4242,
        };
        let (ps, truth) = generate(&spec).unwrap();
        let inliers = ps.subset(&truth.unwrap());
        let rad_opt = crate::reference::reference_meb(&inliers, 1e-3).radius;
        let cfg = OutlierConfig { gamma: 0.1, beta: 0.05, epsilon: 0.2, eta: 0.1, c_out: 1.0 };
        let trials = 200;
        let mut hits = 0;
        for trial in 0..trials {
            let range = outlier_radius_witness(&ps, &cfg, RngStream::new(600, trial)).unwrap();
            if range.lo <= rad_opt && rad_opt <= range.hi {
                hits += 1;
            }
        }
        let threshold = 0.9 * 0.9 - 2.5758 * (0.81f64 * 0.19 / trials as f64).sqrt();
        assert!(
            hits as f64 / trials as f64 >= threshold,
            "containment {hits}/{trials} below {threshold:.3}"
        );
    }
}
