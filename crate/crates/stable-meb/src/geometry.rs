//! Points, balls, and the distance/selection primitives shared by every
//! algorithm in this crate.

use crate::error::DataError;

/// Default relative slack on radius comparisons, absorbing round-off in
/// accumulated distance computations.
pub const DEFAULT_SLACK: f64 = 1e-9;

/// Immutable set of `n` points in `R^d`, stored row-major with O(1) row access.
///
/// Coordinates are validated finite at construction so inner loops skip
/// checks. Safe to share across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl PointSet {
    /// Builds a point set from row-major coordinates.
    pub fn new(d: usize, data: Vec<f64>) -> Result<Self, DataError> {
        if d == 0 || data.is_empty() || !data.len().is_multiple_of(d) {
            return Err(DataError::EmptyDeclared {
                n: data.len().checked_div(d).unwrap_or(0) as u64,
                d: d as u64,
            });
        }
        for (i, &x) in data.iter().enumerate() {
            if !x.is_finite() {
                return Err(DataError::NonFinite { row: i / d, col: i % d });
            }
        }
        Ok(Self { n: data.len() / d, d, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Copies the listed rows (duplicates allowed) into a new point set.
    ///
    /// Panics if any index is out of range.
    pub fn subset(&self, rows: &[usize]) -> PointSet {
        assert!(!rows.is_empty(), "subset of zero rows");
        let mut data = Vec::with_capacity(rows.len() * self.d);
        for &r in rows {
            assert!(r < self.n, "row index {r} out of range (n = {})", self.n);
            data.extend_from_slice(self.row(r));
        }
        PointSet { n: rows.len(), d: self.d, data }
    }
}

/// Ball given by center and nonnegative radius.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    /// Panics if the radius is negative or any coordinate is non-finite.
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        assert!(radius >= 0.0 && radius.is_finite(), "invalid radius {radius}");
        assert!(center.iter().all(|x| x.is_finite()), "non-finite center");
        Self { center, radius }
    }

    pub fn d(&self) -> usize {
        self.center.len()
    }
}

/// Squared Euclidean distance. Panics on dimension mismatch.
#[inline]
pub fn dist2(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "dimension mismatch: {} vs {}", p.len(), q.len());
    let mut acc = 0.0;
    for i in 0..p.len() {
        let t = p[i] - q[i];
        acc += t * t;
    }
    acc
}

/// Euclidean distance `||p - q||`. Panics on dimension mismatch.
#[inline]
pub fn dist(p: &[f64], q: &[f64]) -> f64 {
    dist2(p, q).sqrt()
}

/// Number of points of `ps` inside `ball`, with a relative slack on the
/// radius. Full O(nd) scan; evaluation only, never called inside the
/// sub-linear algorithms.
pub fn coverage_count(ps: &PointSet, ball: &Ball, slack: f64) -> usize {
    assert!(slack >= 0.0, "slack must be nonnegative, got {slack}");
    assert_eq!(ball.d(), ps.d(), "ball dimension {} vs point dimension {}", ball.d(), ps.d());
    let r = ball.radius * (1.0 + slack);
    let r2 = r * r;
    let mut count = 0;
    for i in 0..ps.n() {
        if dist2(ps.row(i), &ball.center) <= r2 {
            count += 1;
        }
    }
    count
}

/// Index (and distance) of the row farthest from `c` among `indices`.
/// Ties break toward the smallest row index.
///
/// Panics if `indices` is empty or contains an out-of-range row.
pub fn farthest_in(ps: &PointSet, indices: &[usize], c: &[f64]) -> (usize, f64) {
    assert!(!indices.is_empty(), "farthest_in over an empty index sequence");
    let mut best_idx = usize::MAX;
    let mut best_d2 = f64::NEG_INFINITY;
    for &i in indices {
        assert!(i < ps.n(), "row index {i} out of range (n = {})", ps.n());
        let d2 = dist2(ps.row(i), c);
        if d2 > best_d2 || (d2 == best_d2 && i < best_idx) {
            best_d2 = d2;
            best_idx = i;
        }
    }
    (best_idx, best_d2.sqrt())
}

/// Farthest row from `c` over the whole set (full scan).
pub fn farthest_full(ps: &PointSet, c: &[f64]) -> (usize, f64) {
    let mut best_idx = 0;
    let mut best_d2 = f64::NEG_INFINITY;
    for i in 0..ps.n() {
        let d2 = dist2(ps.row(i), c);
        if d2 > best_d2 {
            best_d2 = d2;
            best_idx = i;
        }
    }
    (best_idx, best_d2.sqrt())
}

/// Row whose distance to `c` has rank `t` among `indices` when distances are
/// sorted decreasingly (rank 1 = farthest). Expected-linear selection, no
/// full sort. On equal distances the smaller row index ranks as farther.
///
/// Panics if `t` is outside `1..=indices.len()`.
pub fn kth_farthest(ps: &PointSet, indices: &[usize], c: &[f64], t: usize) -> (usize, f64) {
    assert!(t >= 1 && t <= indices.len(), "rank {t} out of range for {} indices", indices.len());
    let mut keyed: Vec<(f64, usize)> = indices
        .iter()
        .map(|&i| {
            assert!(i < ps.n(), "row index {i} out of range (n = {})", ps.n());
            (dist2(ps.row(i), c), i)
        })
        .collect();
    let (_, &mut (d2, idx), _) =
        keyed.select_nth_unstable_by(t - 1, |a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    (idx, d2.sqrt())
}
