//! The set of current records under streaming insertion.
//!
//! A [`Frontier`] holds an antichain under strict dominance (record-large
//! convention): a new point is a record unless some member strictly
//! dominates it, and a record removes every member it strictly dominates.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{check_dims, precedes, Point};

/// Result of feeding one observation to a frontier.
#[derive(Debug, Clone, PartialEq)]
pub enum RecordOutcome {
    NotRecord,
    /// `killed` is filled only when the frontier retains killed points.
    Record {
        kills: usize,
        killed: Vec<Point>,
    },
}

impl RecordOutcome {
    pub fn is_record(&self) -> bool {
        matches!(self, RecordOutcome::Record { .. })
    }

    /// Kill count, with `None` for a non-record.
    pub fn kills(&self) -> Option<usize> {
        match self {
            RecordOutcome::NotRecord => None,
            RecordOutcome::Record { kills, .. } => Some(*kills),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    /// Linear scan, any dimension.
    GenericScan,
    /// Sorted staircase, dimension 2 only.
    Staircase2D,
}

/// Antichain of current records.
///
/// Coordinates are stored flat (`dim` values per member). For
/// [`Backend::Staircase2D`] members are ordered by first coordinate
/// ascending, ties by second coordinate descending; the second coordinate
/// is then nonincreasing along the sequence.
#[derive(Debug, Clone)]
pub struct Frontier {
    dim: usize,
    backend: Backend,
    coords: Vec<f64>,
    retain_killed: bool,
    scratch: Vec<usize>,
}

impl Frontier {
    pub fn new(dim: usize, backend: Backend) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("frontier dimension must be positive"));
        }
        if backend == Backend::Staircase2D && dim != 2 {
            return Err(invalid(format!("staircase backend needs dimension 2, got {dim}")));
        }
        Ok(Frontier { dim, backend, coords: Vec::new(), retain_killed: false, scratch: Vec::new() })
    }

    /// Staircase for d = 2, linear scan otherwise.
    pub fn for_dim(dim: usize) -> Result<Self> {
        let backend = if dim == 2 { Backend::Staircase2D } else { Backend::GenericScan };
        Frontier::new(dim, backend)
    }

    /// Keep copies of killed points in each [`RecordOutcome`].
    pub fn with_killed_retention(mut self, on: bool) -> Self {
        self.retain_killed = on;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn clear(&mut self) {
        self.coords.clear();
    }

    /// Members in storage order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &[f64]> + ExactSizeIterator + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn points(&self) -> Vec<Point> {
        self.iter().map(|c| Point::new(c.to_vec()).expect("frontier holds finite points")).collect()
    }

    /// Members sorted lexicographically; convenient for comparing sets.
    pub fn sorted_points(&self) -> Vec<Vec<f64>> {
        let mut v: Vec<Vec<f64>> = self.iter().map(<[f64]>::to_vec).collect();
        v.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        v
    }

    pub fn insert(&mut self, p: &Point) -> Result<RecordOutcome> {
        self.insert_slice(p.coords())
    }

    /// Insert raw coordinates. The slice must be finite.
    pub fn insert_slice(&mut self, p: &[f64]) -> Result<RecordOutcome> {
        check_dims(self.dim, p.len())?;
        Ok(match self.backend {
            Backend::GenericScan => self.insert_scan(p),
            Backend::Staircase2D => self.insert_staircase(p),
        })
    }

    /// Kill count only; `None` for a non-record. Never allocates killed
    /// points, whatever the retention flag says.
    pub fn insert_count(&mut self, p: &[f64]) -> Result<Option<usize>> {
        let keep = std::mem::replace(&mut self.retain_killed, false);
        let out = self.insert_slice(p);
        self.retain_killed = keep;
        Ok(out?.kills())
    }

    fn killed_points(&self, idx: impl Iterator<Item = usize>) -> Vec<Point> {
        if !self.retain_killed {
            return Vec::new();
        }
        idx.map(|i| {
            let c = self.coords[i * self.dim..(i + 1) * self.dim].to_vec();
            Point::new(c).expect("frontier holds finite points")
        })
        .collect()
    }

    fn insert_scan(&mut self, p: &[f64]) -> RecordOutcome {
        let d = self.dim;
        self.scratch.clear();
        for (i, m) in self.coords.chunks_exact(d).enumerate() {
            if precedes(p, m) {
                // An antichain member dominating p rules out any earlier kill
                // (it would dominate the killed member too).
                debug_assert!(self.scratch.is_empty());
                if i > 0 {
                    // Transpose toward the front: frequent dominators are
                    // found sooner on later inserts.
                    let j = i / 2;
                    for k in 0..d {
                        self.coords.swap(i * d + k, j * d + k);
                    }
                }
                return RecordOutcome::NotRecord;
            }
            if precedes(m, p) {
                self.scratch.push(i);
            }
        }
        let kills = self.scratch.len();
        let killed = self.killed_points(self.scratch.iter().copied());
        // Remove from the back so swap_remove never moves a pending index.
        for &i in self.scratch.iter().rev() {
            let last = self.coords.len() / d - 1;
            if i != last {
                for k in 0..d {
                    self.coords[i * d + k] = self.coords[last * d + k];
                }
            }
            self.coords.truncate(last * d);
        }
        self.coords.extend_from_slice(p);
        RecordOutcome::Record { kills, killed }
    }

    fn insert_staircase(&mut self, p: &[f64]) -> RecordOutcome {
        let (px, py) = (p[0], p[1]);
        let n = self.len();
        let x = |c: &[f64], i: usize| c[2 * i];
        let y = |c: &[f64], i: usize| c[2 * i + 1];
        let c = &self.coords;

        // First member with x > px carries the largest y among them.
        let after = partition_point(n, |i| x(c, i) <= px);
        if after < n && y(c, after) > py {
            return RecordOutcome::NotRecord;
        }
        // Members with x < px form a prefix; those with y < py are its tail.
        let below = partition_point(n, |i| x(c, i) < px);
        let first_kill = partition_point(below, |i| y(c, i) >= py);
        let kills = below - first_kill;
        let killed = self.killed_points(first_kill..below);
        self.coords.drain(2 * first_kill..2 * below);

        // Equal-x members stay, ordered by y descending around p.
        let n = self.len();
        let c = &self.coords;
        let at = partition_point(n, |i| x(c, i) < px || (x(c, i) == px && y(c, i) > py));
        self.coords.splice(2 * at..2 * at, [px, py]);
        RecordOutcome::Record { kills, killed }
    }
}

/// First index in `0..n` where `pred` is false, for a predicate that is
/// true on a prefix.
fn partition_point(n: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Indices (ascending) of the points not strictly dominated by any other
/// point in the list.
pub fn maxima_of(points: &[Point]) -> Result<Vec<usize>> {
    let Some(first) = points.first() else {
        return Ok(Vec::new());
    };
    let d = first.dim();
    for p in points {
        check_dims(d, p.dim())?;
    }
    // Candidates in descending coordinate sum: a dominator always has the
    // larger sum, so each point only needs checking against kept maxima.
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[b].plus_sum().total_cmp(&points[a].plus_sum()));
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        let p = points[i].coords();
        if !kept.iter().any(|&j| precedes(p, points[j].coords())) {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    Ok(kept)
}
