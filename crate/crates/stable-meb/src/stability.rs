//! Instance generators with controllable stability, and brute-force oracles
//! for stability coefficients and enclosing balls with outliers on tiny
//! instances.

use itertools::Itertools;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::coreset::{exact_meb_of_rows, exact_meb_small};
use crate::error::ConfigError;
use crate::geometry::{Ball, PointSet};
use crate::rng::RngStream;

/// Instance family of a generated dataset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// Points uniform in the unit ball (radial method: direction uniform on
    /// the sphere via normalized Gaussians, radius U^(1/d)).
    #[serde(rename = "uniform-ball")]
    UniformBall,
    /// Standard Gaussian coordinates.
    #[serde(rename = "gaussian")]
    Gaussian,
    /// The d+1 vertices of the regular d-simplex with unit edges.
    #[serde(rename = "regular-simplex")]
    RegularSimplex,
    /// Uniform-ball inliers plus a planted fraction of far outliers, with
    /// the inlier index set as ground truth.
    #[serde(rename = "planted-outliers")]
    PlantedOutliers,
}

impl Family {
    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "uniform-ball" => Some(Family::UniformBall),
            "gaussian" => Some(Family::Gaussian),
            "regular-simplex" | "simplex" => Some(Family::RegularSimplex),
            "planted-outliers" => Some(Family::PlantedOutliers),
            _ => None,
        }
    }
}

fn default_spread() -> f64 {
    10.0
}

/// Deterministic description of a generated instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub family: Family,
    pub n: usize,
    pub d: usize,
    /// Outlier fraction; `gamma * n` must be an integer for planted outliers.
    #[serde(default)]
    pub gamma: f64,
    /// Planting distance for outliers, in units of the inlier radius.
    #[serde(default = "default_spread")]
    pub spread: f64,
    pub seed: u64,
}

/// Largest beta for which an instance is beta-stable at a given epsilon,
/// measured exactly by enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub epsilon: f64,
    /// Minimum number of removals that pushes the radius below
    /// `(1 - epsilon) * Rad(P)`, or `n` when no removal set does.
    pub m_star: usize,
    /// `(m_star - 1) / n`: the instance is beta-stable exactly for
    /// `beta * n <= m_star - 1`.
    pub beta_max: f64,
    pub base_radius: f64,
}

fn unit_direction<R: Rng>(rng: &mut R, d: usize, out: &mut Vec<f64>) {
    loop {
        out.clear();
        let mut norm2 = 0.0;
        for _ in 0..d {
            let x: f64 = rng.sample(StandardNormal);
            norm2 += x * x;
            out.push(x);
        }
        if norm2 > 0.0 {
            let inv = 1.0 / norm2.sqrt();
            out.iter_mut().for_each(|x| *x *= inv);
            return;
        }
    }
}

fn uniform_ball_points<R: Rng>(rng: &mut R, n: usize, d: usize, data: &mut Vec<f64>) {
    let mut dir = Vec::with_capacity(d);
    for _ in 0..n {
        unit_direction(rng, d, &mut dir);
        let u: f64 = rng.gen_range(0.0..1.0);
        let r = u.powf(1.0 / d as f64);
        data.extend(dir.iter().map(|x| x * r));
    }
}

/// Vertices of the regular unit-edge d-simplex, centered on the origin.
/// Vertex i is the projection of `e_i / sqrt(2)` onto the zero-sum
/// hyperplane, expressed in the Helmert orthonormal basis.
fn simplex_vertices(d: usize) -> Vec<f64> {
    let n = d + 1;
    let mut data = vec![0.0; n * d];
    for i in 0..n {
        for k in 1..=d {
            let h = if i < k {
                1.0
            } else if i == k {
                -(k as f64)
            } else {
                0.0
            };
            data[i * d + (k - 1)] = h / (k as f64 * (k as f64 + 1.0)).sqrt() / 2.0f64.sqrt();
        }
    }
    data
}

/// Rounds `gamma * n` to the planted outlier count, failing when it is not
/// an integer.
pub fn outlier_count(gamma: f64, n: usize) -> Result<usize, ConfigError> {
    let raw = gamma * n as f64;
    let k = raw.round();
    if (raw - k).abs() > 1e-9 {
        return Err(ConfigError::OutlierCount { gamma, n });
    }
    Ok(k as usize)
}

/// Generates the instance described by `spec`. Deterministic: identical
/// specs produce bit-identical point sets. For planted outliers the second
/// component carries the ground-truth inlier index set.
pub fn generate(spec: &InstanceSpec) -> Result<(PointSet, Option<Vec<usize>>), ConfigError> {
    if spec.n == 0 || spec.d == 0 {
        return Err(ConfigError::EmptyInstance { n: spec.n, d: spec.d });
    }
    let mut rng = RngStream::new(spec.seed, 0).rng();
    match spec.family {
        Family::UniformBall => {
            let mut data = Vec::with_capacity(spec.n * spec.d);
            uniform_ball_points(&mut rng, spec.n, spec.d, &mut data);
            Ok((PointSet::new(spec.d, data).expect("finite by construction"), None))
        }
        Family::Gaussian => {
            let data: Vec<f64> =
                (0..spec.n * spec.d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            Ok((PointSet::new(spec.d, data).expect("finite by construction"), None))
        }
        Family::RegularSimplex => {
            if spec.n != spec.d + 1 {
                return Err(ConfigError::SimplexSize {
                    n: spec.n,
                    d: spec.d,
                    expected: spec.d + 1,
                });
            }
            let data = simplex_vertices(spec.d);
            Ok((PointSet::new(spec.d, data).expect("finite by construction"), None))
        }
        Family::PlantedOutliers => {
            if !(0.0..1.0).contains(&spec.gamma) {
                return Err(ConfigError::Gamma(spec.gamma));
            }
            if spec.spread < 1.0 {
                return Err(ConfigError::Spread(spec.spread));
            }
            let n_out = outlier_count(spec.gamma, spec.n)?;
            let n_in = spec.n - n_out;
            if n_in == 0 {
                return Err(ConfigError::Gamma(spec.gamma));
            }
            let mut data = Vec::with_capacity(spec.n * spec.d);
            uniform_ball_points(&mut rng, n_in, spec.d, &mut data);
            let mut dir = Vec::with_capacity(spec.d);
            for _ in 0..n_out {
                unit_direction(&mut rng, spec.d, &mut dir);
                data.extend(dir.iter().map(|x| x * spec.spread));
            }
            let ps = PointSet::new(spec.d, data).expect("finite by construction");
            Ok((ps, Some((0..n_in).collect())))
        }
    }
}

/// Exact smallest ball covering `n - k_remove` points, by enumerating all
/// kept subsets. Ties resolve to the lexicographically smallest kept set.
///
/// Panics unless `n <= 16`, `d <= 8` and `k_remove < n`.
pub fn brute_meb_outliers(ps: &PointSet, k_remove: usize) -> (Ball, Vec<usize>) {
    assert!(
        ps.n() <= 16 && ps.d() <= 8,
        "brute_meb_outliers limited to n <= 16, d <= 8; got n = {}, d = {}",
        ps.n(),
        ps.d()
    );
    assert!(k_remove < ps.n(), "cannot remove all {} points", ps.n());
    let keep = ps.n() - k_remove;
    let mut best: Option<(Ball, Vec<usize>)> = None;
    for kept in (0..ps.n()).combinations(keep) {
        let ball = exact_meb_of_rows(ps, &kept);
        if best.as_ref().is_none_or(|(b, _)| ball.radius < b.radius) {
            best = Some((ball, kept));
        }
    }
    best.expect("keep >= 1")
}

/// Exact stability coefficient of a tiny instance: sweeps removal counts
/// until the optimal radius drops below `(1 - epsilon) * Rad(P)`.
pub fn stability_coefficient(ps: &PointSet, epsilon: f64) -> StabilityReport {
    assert!(ps.n() <= 16 && ps.d() <= 8, "stability_coefficient limited to n <= 16, d <= 8");
    assert!(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
    let base_radius = exact_meb_small(ps).radius;
    let threshold = (1.0 - epsilon) * base_radius;
    let mut m_star = ps.n();
    if base_radius > 0.0 {
        for m in 1..ps.n() {
            if brute_meb_outliers(ps, m).0.radius < threshold {
                m_star = m;
                break;
            }
        }
    }
    StabilityReport { epsilon, m_star, beta_max: (m_star - 1) as f64 / ps.n() as f64, base_radius }
}

/// Verifies by double enumeration that the optimal inlier set of a stable
/// outlier instance is itself a stable plain instance: computes the largest
/// beta for which `(P, gamma)` is beta-stable, extracts `P_opt`, and checks
/// that `P_opt` is `beta / (1 - gamma)`-stable.
pub fn check_outlier_stability_claim(ps: &PointSet, gamma: f64, epsilon: f64) -> bool {
    assert!(
        ps.n() <= 16 && ps.d() <= 8,
        "check_outlier_stability_claim limited to n <= 16, d <= 8"
    );
    let n = ps.n();
    let k_out = outlier_count(gamma, n).expect("gamma * n must be an integer");
    assert!(k_out < n, "gamma leaves no inliers");
    let (opt_ball, kept) = brute_meb_outliers(ps, k_out);
    let r_opt = opt_ball.radius;
    let threshold = (1.0 - epsilon) * r_opt;

    // Largest beta with (P, gamma) beta-stable: radius over subsets of size
    // >= (1 - gamma - beta) n must stay >= threshold, i.e. removals up to
    // (gamma + beta) n keep the radius up.
    let mut flip = n; // first removal count that breaks the bound; n = never
    if r_opt > 0.0 {
        for k in k_out + 1..n {
            if brute_meb_outliers(ps, k).0.radius < threshold {
                flip = k;
                break;
            }
        }
    }
    let beta_removals = flip - 1 - k_out; // beta * n

    // Definition-2 stability of P_opt at beta' = beta / (1 - gamma):
    // removals from P_opt up to beta' * |P_opt| = beta * n.
    let sub = ps.subset(&kept);
    let j_max = beta_removals.min(sub.n() - 1);
    for j in 1..=j_max {
        if brute_meb_outliers(&sub, j).0.radius < threshold - 1e-12 * r_opt {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dist;

    #[test]
    fn simplex_has_unit_pairwise_distances() {
        let spec = InstanceSpec {
            family: Family::RegularSimplex,
            n: 4,
            d: 3,
            gamma: 0.0,
            spread: 10.0,
            seed: 0,
        };
        let (ps, gt) = generate(&spec).unwrap();
        assert_eq!(ps.n(), 4);
        assert!(gt.is_none());
        for i in 0..4 {
            for j in i + 1..4 {
                assert!((dist(ps.row(i), ps.row(j)) - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn simplex_circumradius_matches_formula() {
        for d in 2..=8 {
            let spec = InstanceSpec {
                family: Family::RegularSimplex,
                n: d + 1,
                d,
                gamma: 0.0,
                spread: 10.0,
                seed: 0,
            };
            let (ps, _) = generate(&spec).unwrap();
            let ball = exact_meb_small(&ps);
            let expected = (d as f64 / (2.0 * (1.0 + d as f64))).sqrt();
            assert!(
                (ball.radius - expected).abs() <= 1e-9 * expected,
                "d = {d}: {} vs {}",
                ball.radius,
                expected
            );
        }
    }

    #[test]
    fn uniform_ball_subsamples_stay_inside_unit_ball() {
        let spec = InstanceSpec {
            family: Family::UniformBall,
            n: 10_000,
            d: 2,
            gamma: 0.0,
            spread: 10.0,
            seed: 3,
        };
        let (ps, _) = generate(&spec).unwrap();
        let sub = ps.subset(&(0..16).collect::<Vec<_>>());
        assert!(exact_meb_small(&sub).radius <= 1.0);
        let origin = vec![0.0; 2];
        for i in 0..ps.n() {
            assert!(dist(ps.row(i), &origin) <= 1.0);
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let spec = InstanceSpec {
            family: Family::PlantedOutliers,
            n: 50,
            d: 6,
            gamma: 0.1,
            spread: 10.0,
            seed: 99,
        };
        let (a, gta) = generate(&spec).unwrap();
        let (b, gtb) = generate(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(gta, gtb);
    }

    #[test]
    fn planted_outliers_recovered_by_brute_force() {
        let spec = InstanceSpec {
            family: Family::PlantedOutliers,
            n: 10,
            d: 3,
            gamma: 0.1,
            spread: 10.0,
            seed: 17,
        };
        let (ps, gt) = generate(&spec).unwrap();
        let gt = gt.unwrap();
        assert_eq!(gt.len(), 9);
        let (_, kept) = brute_meb_outliers(&ps, 1);
        assert_eq!(kept, gt);
    }

    #[test]
    fn generator_rejects_bad_specs() {
        let bad_gamma = InstanceSpec {
            family: Family::PlantedOutliers,
            n: 10,
            d: 2,
            gamma: 0.25,
            spread: 10.0,
            seed: 0,
        };
        assert!(matches!(generate(&bad_gamma), Err(ConfigError::OutlierCount { .. })));
        let ok_gamma = InstanceSpec { gamma: 0.3, ..bad_gamma.clone() };
        assert!(generate(&ok_gamma).is_ok());
        let bad_simplex = InstanceSpec {
            family: Family::RegularSimplex,
            n: 3,
            d: 3,
            gamma: 0.0,
            spread: 10.0,
            seed: 0,
        };
        assert!(matches!(generate(&bad_simplex), Err(ConfigError::SimplexSize { .. })));
    }

    #[test]
    fn brute_identity_at_zero_removals() {
        let spec = InstanceSpec {
            family: Family::Gaussian,
            n: 8,
            d: 3,
            gamma: 0.0,
            spread: 10.0,
            seed: 5,
        };
        let (ps, _) = generate(&spec).unwrap();
        let (ball, kept) = brute_meb_outliers(&ps, 0);
        let exact = exact_meb_small(&ps);
        assert_eq!(ball.radius, exact.radius);
        assert_eq!(kept, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn brute_drops_far_point_from_triangle() {
        let h = 3.0f64.sqrt() / 2.0;
        let ps = PointSet::new(2, vec![0.0, 0.0, 1.0, 0.0, 0.5, h, 10.0, 0.0]).unwrap();
        let (ball, kept) = brute_meb_outliers(&ps, 1);
        assert_eq!(kept, vec![0, 1, 2]);
        assert!((ball.radius - 0.5773503).abs() <= 1e-7);
    }

    #[test]
    fn brute_collinear_keeps_prefix() {
        let ps = PointSet::new(1, vec![0.0, 1.0, 2.0, 3.0, 100.0]).unwrap();
        let (ball, kept) = brute_meb_outliers(&ps, 1);
        assert_eq!(kept, vec![0, 1, 2, 3]);
        assert!((ball.radius - 1.5).abs() <= 1e-12);
    }

    #[test]
    fn brute_radius_nonincreasing_in_removals() {
        let spec = InstanceSpec {
            family: Family::Gaussian,
            n: 9,
            d: 2,
            gamma: 0.0,
            spread: 10.0,
            seed: 11,
        };
        let (ps, _) = generate(&spec).unwrap();
        let mut prev = f64::INFINITY;
        for m in 0..ps.n() {
            let r = brute_meb_outliers(&ps, m).0.radius;
            assert!(r <= prev + 1e-12);
            prev = r;
        }
    }

    #[test]
    fn stability_of_triangle_with_far_point() {
        let h = 3.0f64.sqrt() / 2.0;
        let ps = PointSet::new(2, vec![0.0, 0.0, 1.0, 0.0, 0.5, h, 10.0, 0.0]).unwrap();
        let report = stability_coefficient(&ps, 0.1);
        assert_eq!(report.m_star, 1);
        assert_eq!(report.beta_max, 0.0);
    }

    #[test]
    fn stability_of_identical_points_never_degrades() {
        let ps = PointSet::new(2, vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        let report = stability_coefficient(&ps, 0.3);
        assert_eq!(report.m_star, 3);
        assert_eq!(report.base_radius, 0.0);
    }

    #[test]
    fn stability_of_simplex_matches_closed_form() {
        // Removing m vertices of the regular d-simplex leaves the regular
        // (d-m)-simplex with radius sqrt((d-m) / (2 (d-m+1))). The minimal
        // m with radius < (1 - eps) * r_d is the independent oracle here.
        let d = 7;
        let eps = 0.01;
        let spec = InstanceSpec {
            family: Family::RegularSimplex,
            n: d + 1,
            d,
            gamma: 0.0,
            spread: 10.0,
            seed: 0,
        };
        let (ps, _) = generate(&spec).unwrap();
        let r = |dim: usize| (dim as f64 / (2.0 * (dim as f64 + 1.0))).sqrt();
        let expected = (1..=d).find(|&m| r(d - m) < (1.0 - eps) * r(d)).unwrap_or(d + 1);
        let report = stability_coefficient(&ps, eps);
        assert_eq!(report.m_star, expected);
        assert_eq!(report.m_star, 1);
        // Example-II bound: 1 - beta <= 1 / (1 + (2 eps - eps^2) d) at the
        // first failing removal count.
        let beta = report.m_star as f64 / ps.n() as f64;
        assert!(1.0 - beta <= 1.0 / (1.0 + (2.0 * eps - eps * eps) * d as f64) + 1e-9);
    }

    #[test]
    fn uniform_ball_stability_grows_with_dimension() {
        // Average beta_max over seeded tiny uniform-ball instances must be
        // nondecreasing in d: higher dimension concentrates mass near the
        // boundary, so removals shrink the radius less.
        let eps = 0.1;
        let mut averages = Vec::new();
        for d in [2usize, 4, 7] {
            let mut total = 0.0;
            for seed in 0..50u64 {
                let (ps, _) = generate(&InstanceSpec {
                    family: Family::UniformBall,
                    n: 10,
                    d,
                    gamma: 0.0,
                    spread: 10.0,
                    seed: 40_000 + seed,
                })
                .unwrap();
                total += stability_coefficient(&ps, eps).beta_max;
            }
            averages.push(total / 50.0);
        }
        assert!(
            averages[0] <= averages[1] && averages[1] <= averages[2],
            "average beta_max not nondecreasing in d: {averages:?}"
        );
    }

    #[test]
    fn outlier_claim_holds_on_random_instances() {
        for seed in 0..25u64 {
            let spec = InstanceSpec {
                family: if seed % 2 == 0 { Family::Gaussian } else { Family::UniformBall },
                n: 10,
                d: 3,
                gamma: 0.0,
                spread: 10.0,
                seed,
            };
            let (ps, _) = generate(&spec).unwrap();
            assert!(check_outlier_stability_claim(&ps, 0.1, 0.15), "seed {seed}");
        }
    }

    #[test]
    fn outlier_claim_gamma_zero_and_degenerate() {
        let (ps, _) = generate(&InstanceSpec {
            family: Family::Gaussian,
            n: 8,
            d: 2,
            gamma: 0.0,
            spread: 10.0,
            seed: 2,
        })
        .unwrap();
        assert!(check_outlier_stability_claim(&ps, 0.0, 0.2));
        let same = PointSet::new(2, vec![0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!(check_outlier_stability_claim(&same, 0.25, 0.2));
    }
}
