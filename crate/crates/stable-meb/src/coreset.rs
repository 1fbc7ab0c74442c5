//! Full-pass (1+epsilon)-approximate minimum enclosing ball via core-set
//! growth with approximate center updates, plus an exact small-instance
//! oracle used throughout the test suites.

use itertools::Itertools;

use crate::error::ConfigError;
use crate::geometry::{dist2, farthest_full, Ball, PointSet};

/// Above this working-set size the center iteration falls back from the
/// precomputed Gram table to direct scans (|T|^2 memory).
const GRAM_LIMIT: usize = 1024;

/// State of the core-set growth loop at termination.
#[derive(Clone, Debug)]
pub struct CoresetState {
    /// Core-set rows in insertion order (duplicates permitted).
    pub indices: Vec<usize>,
    /// Approximate center of the final core-set.
    pub center: Vec<f64>,
    /// Growth iterations performed (points added after the seed).
    pub iterations: usize,
    /// Iteration cap `z = ceil(2 / ((1 - s) * epsilon))`.
    pub cap: usize,
    /// Center-accuracy share `s` in (0, 1).
    pub shrink: f64,
    /// Inner center accuracy `xi = s * epsilon / (1 + epsilon)`.
    pub xi: f64,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.len() {
        acc += a[i] * b[i];
    }
    acc
}

/// Point within `xi * r*` of the exact enclosing-ball center of the rows `t`,
/// where `r*` is the exact radius. Iterative scheme: start at the first row
/// of `t`, then `K = ceil(1 / xi^2)` steps of "move toward the farthest row
/// by step 1/(k+1)", which is O(K * |t| * d) in the direct form. Farthest
/// selection works on `||p||^2 - 2<p, c>` with incrementally updated inner
/// products, so a step costs O(|t|) after the one-time Gram table.
pub fn approx_center(ps: &PointSet, t: &[usize], xi: f64) -> Vec<f64> {
    assert!(!t.is_empty(), "approx_center over an empty core-set");
    assert!(xi > 0.0 && xi < 1.0, "xi must lie in (0, 1), got {xi}");
    let d = ps.d();
    let m = t.len();
    for &i in t {
        assert!(i < ps.n(), "row index {i} out of range (n = {})", ps.n());
    }
    if m == 1 {
        return ps.row(t[0]).to_vec();
    }
    let steps = (1.0 / (xi * xi)).ceil() as usize;
    let mut pts = Vec::with_capacity(m * d);
    for &i in t {
        pts.extend_from_slice(ps.row(i));
    }
    let row = |j: usize| &pts[j * d..(j + 1) * d];
    let sqn: Vec<f64> = (0..m).map(|j| dot(row(j), row(j))).collect();

    if m <= GRAM_LIMIT {
        let mut gram = vec![0.0; m * m];
        for j in 0..m {
            for l in j..m {
                let g = dot(row(j), row(l));
                gram[j * m + l] = g;
                gram[l * m + j] = g;
            }
        }
        // c is tracked as simplex weights; dots[j] = <p_j, c>.
        let mut weights = vec![0.0; m];
        weights[0] = 1.0;
        let mut dots: Vec<f64> = (0..m).map(|j| gram[j * m]).collect();
        for k in 1..=steps {
            let mut q = 0;
            let mut best = f64::NEG_INFINITY;
            for (j, (&s, &dt)) in sqn.iter().zip(&dots).enumerate() {
                let score = s - 2.0 * dt;
                if score > best {
                    best = score;
                    q = j;
                }
            }
            let gamma = 1.0 / (k + 1) as f64;
            let keep = 1.0 - gamma;
            let gq = &gram[q * m..(q + 1) * m];
            for ((dt, &g), w) in dots.iter_mut().zip(gq).zip(weights.iter_mut()) {
                *dt = keep * *dt + gamma * g;
                *w *= keep;
            }
            weights[q] += gamma;
        }
        let mut c = vec![0.0; d];
        for (j, &w) in weights.iter().enumerate() {
            if w != 0.0 {
                let p = row(j);
                for x in 0..d {
                    c[x] += w * p[x];
                }
            }
        }
        c
    } else {
        let mut c = row(0).to_vec();
        for k in 1..=steps {
            let mut q = 0;
            let mut best = f64::NEG_INFINITY;
            for (j, &s) in sqn.iter().enumerate() {
                let score = s - 2.0 * dot(row(j), &c);
                if score > best {
                    best = score;
                    q = j;
                }
            }
            let gamma = 1.0 / (k + 1) as f64;
            let p = row(q);
            for x in 0..d {
                c[x] += gamma * (p[x] - c[x]);
            }
        }
        c
    }
}

/// Core-set construction for the (1+epsilon)-approximate enclosing ball.
///
/// Seeds the core-set with row 0, then repeatedly recenters with
/// [`approx_center`] and adds the farthest point of the whole set (full
/// scan). Stops once no point lies beyond `(1 + eps) / (1 + xi)` times the
/// in-set radius — which certifies the final radius against the exact
/// optimum — or after `z = ceil(2 / ((1 - s) eps))` growth iterations. The
/// returned radius is the distance to the farthest point of the whole set,
/// so the ball always covers all n points.
pub fn coreset_meb(ps: &PointSet, eps: f64, s: f64) -> Result<(Ball, CoresetState), ConfigError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(ConfigError::Epsilon(eps));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(ConfigError::Shrink(s));
    }
    let cap = (2.0 / ((1.0 - s) * eps)).ceil() as usize;
    let xi = s * eps / (1.0 + eps);
    let mut t = vec![0usize];
    let mut grown = 0usize;
    loop {
        let center = approx_center(ps, &t, xi);
        let r_t = t.iter().map(|&i| dist2(ps.row(i), &center)).fold(0.0f64, f64::max).sqrt();
        let (far_idx, far_dist) = farthest_full(ps, &center);
        if far_dist <= (1.0 + eps) / (1.0 + xi) * r_t || grown == cap {
            let state = CoresetState {
                indices: t,
                center: center.clone(),
                iterations: grown,
                cap,
                shrink: s,
                xi,
            };
            return Ok((Ball::new(center, far_dist), state));
        }
        t.push(far_idx);
        grown += 1;
    }
}

/// Solves `a x = b` in place (k x k, row-major) by Gaussian elimination with
/// partial pivoting. Returns `None` when the matrix is numerically singular.
fn solve_linear(a: &mut [f64], b: &mut [f64], k: usize) -> Option<()> {
    let scale = a.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1e-300);
    for col in 0..k {
        let mut pivot = col;
        for r in col + 1..k {
            if a[r * k + col].abs() > a[pivot * k + col].abs() {
                pivot = r;
            }
        }
        if a[pivot * k + col].abs() <= 1e-12 * scale {
            return None;
        }
        if pivot != col {
            for x in 0..k {
                a.swap(col * k + x, pivot * k + x);
            }
            b.swap(col, pivot);
        }
        let inv = 1.0 / a[col * k + col];
        for r in col + 1..k {
            let f = a[r * k + col] * inv;
            if f != 0.0 {
                for x in col..k {
                    a[r * k + x] -= f * a[col * k + x];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for col in (0..k).rev() {
        let mut s = b[col];
        for x in col + 1..k {
            s -= a[col * k + x] * b[x];
        }
        b[col] = s / a[col * k + col];
    }
    Some(())
}

/// Circumcenter of the listed rows within their affine hull: the unique
/// point there equidistant from every row. `None` for affinely dependent
/// (rank-deficient) subsets.
fn circumcenter(ps: &PointSet, support: &[usize]) -> Option<Vec<f64>> {
    let k = support.len() - 1;
    let p0 = ps.row(support[0]);
    if k == 0 {
        return Some(p0.to_vec());
    }
    let d = ps.d();
    let diffs: Vec<Vec<f64>> = support[1..]
        .iter()
        .map(|&i| ps.row(i).iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let mut a = vec![0.0; k * k];
    let mut b = vec![0.0; k];
    for i in 0..k {
        for j in i..k {
            let g = dot(&diffs[i], &diffs[j]);
            a[i * k + j] = g;
            a[j * k + i] = g;
        }
        b[i] = 0.5 * dot(&diffs[i], &diffs[i]);
    }
    solve_linear(&mut a, &mut b, k)?;
    let mut center = p0.to_vec();
    for i in 0..k {
        for x in 0..d {
            center[x] += b[i] * diffs[i][x];
        }
    }
    Some(center)
}

/// Exact enclosing ball of the listed rows by support-subset enumeration.
pub(crate) fn exact_meb_of_rows(ps: &PointSet, rows: &[usize]) -> Ball {
    assert!(!rows.is_empty(), "exact enclosing ball of zero rows");
    let max_support = (ps.d() + 1).min(rows.len());
    let mut best: Option<Ball> = None;
    for k in 1..=max_support {
        for support in rows.iter().copied().combinations(k) {
            let Some(center) = circumcenter(ps, &support) else {
                continue;
            };
            let r2 = rows.iter().map(|&i| dist2(ps.row(i), &center)).fold(0.0f64, f64::max);
            let r = r2.sqrt();
            if best.as_ref().is_none_or(|b| r < b.radius) {
                best = Some(Ball::new(center, r));
            }
        }
    }
    best.expect("at least the single-point candidates exist")
}

/// Exact minimum enclosing ball by enumerating candidate support subsets of
/// size 1..=d+1. Radius is minimal to about 1e-9 relative.
///
/// Panics unless `n <= 16` and `d <= 8` (enumeration feasibility bound).
pub fn exact_meb_small(ps: &PointSet) -> Ball {
    assert!(
        ps.n() <= 16 && ps.d() <= 8,
        "exact_meb_small limited to n <= 16, d <= 8; got n = {}, d = {}",
        ps.n(),
        ps.d()
    );
    let rows: Vec<usize> = (0..ps.n()).collect();
    exact_meb_of_rows(ps, &rows)
}
