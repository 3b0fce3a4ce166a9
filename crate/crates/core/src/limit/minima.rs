//! Minimal points of a Poisson process with intensity `scale · e^(v_+)` on
//! a bounded region of the positive orthant, sampled lazily.
//!
//! The search walks a k-d subdivision lower half first. A point can only
//! be dominated (`f ≺ v`) by points in boxes visited earlier or in its own
//! box, so minima found so far are final. Before a box is sampled it is
//! clipped against them: any part of it lying strictly above a found
//! minimum in every coordinate holds no minima, and its points are never
//! generated. Only the surviving boxes are sampled, exactly.

use rand::Rng;
use rand_distr::{Distribution, Open01, Poisson};

use crate::geometry::{plus_sum, precedes};
use crate::rng::SimRng;

/// Recursion cap; boxes at this depth are sampled whatever their mass.
const MAX_DEPTH: u32 = 200;

pub(crate) trait Region {
    fn dim(&self) -> usize;

    fn contains(&self, v: &[f64]) -> bool;

    /// Lower `hi` so that `[lo, hi]` still covers the region's part of the
    /// original box. Returns `false` when that part is empty.
    fn clip(&self, lo: &[f64], hi: &mut [f64]) -> bool;

    /// `∫_{[lo, hi] ∩ region} e^(v_+) dv`, when the caller needs counts of
    /// unvisited points.
    fn box_mass(&self, _lo: &[f64], _hi: &[f64]) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct MinimaOutcome {
    /// Minimal points, flat, `dim` coordinates each, in discovery order.
    pub points: Vec<f64>,
    /// Process points generated inside the region (minimal or not).
    pub generated: u64,
    /// Sum of `box_mass` over sampled boxes, times `scale`.
    pub sampled_mass: f64,
}

pub(crate) struct MinimaSearch<'a, R: Region> {
    region: &'a R,
    scale: f64,
    leaf_mass: f64,
    out: MinimaOutcome,
    buf: Vec<f64>,
}

impl<'a, R: Region> MinimaSearch<'a, R> {
    pub fn new(region: &'a R, scale: f64, leaf_mass: f64) -> Self {
        MinimaSearch { region, scale, leaf_mass, out: MinimaOutcome::default(), buf: Vec::new() }
    }

    pub fn run(mut self, hi: Vec<f64>, rng: &mut SimRng) -> MinimaOutcome {
        let lo = vec![0.0; self.region.dim()];
        self.visit(lo, hi, 0, rng);
        self.out
    }

    /// Clip `hi` against the minima found so far; `false` if nothing is left.
    fn clip_by_minima(&self, lo: &[f64], hi: &mut [f64]) -> bool {
        let d = lo.len();
        for f in self.out.points.chunks_exact(d) {
            let mut free = None;
            let mut below = 0;
            for j in 0..d {
                if f[j] < lo[j] {
                    below += 1;
                } else {
                    free = Some(j);
                }
            }
            if below == d {
                return false;
            }
            if below == d - 1 {
                let j = free.expect("one coordinate is not below");
                if f[j] < hi[j] {
                    hi[j] = f[j];
                    if hi[j] <= lo[j] {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn visit(&mut self, lo: Vec<f64>, mut hi: Vec<f64>, depth: u32, rng: &mut SimRng) {
        if !self.region.clip(&lo, &mut hi) || !self.clip_by_minima(&lo, &mut hi) {
            return;
        }
        let mass = self.scale * lo.iter().zip(&hi).map(|(&a, &b)| b.exp() - a.exp()).product::<f64>();
        if !(mass > 0.0) {
            return;
        }
        if mass <= self.leaf_mass || depth >= MAX_DEPTH {
            self.sample_leaf(&lo, &hi, mass, rng);
            return;
        }
        let j = (0..lo.len())
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .expect("dimension is positive");
        let mid = 0.5 * (lo[j] + hi[j]);
        let mut lower_hi = hi.clone();
        lower_hi[j] = mid;
        let mut upper_lo = lo.clone();
        upper_lo[j] = mid;
        self.visit(lo, lower_hi, depth + 1, rng);
        self.visit(upper_lo, hi, depth + 1, rng);
    }

    fn sample_leaf(&mut self, lo: &[f64], hi: &[f64], mass: f64, rng: &mut SimRng) {
        let d = lo.len();
        self.out.sampled_mass += self.scale * self.region.box_mass(lo, hi);
        let n = poisson(mass, rng);
        if n == 0 {
            return;
        }
        self.buf.clear();
        for _ in 0..n {
            let start = self.buf.len();
            for j in 0..d {
                // Density ∝ e^v on (lo, hi), by inversion.
                let u: f64 = Open01.sample(rng);
                let v = (lo[j].exp() + u * (hi[j].exp() - lo[j].exp())).ln();
                self.buf.push(v.clamp(lo[j], hi[j]));
            }
            if self.region.contains(&self.buf[start..]) {
                self.out.generated += 1;
            } else {
                self.buf.truncate(start);
            }
        }
        // A dominator has the smaller coordinate sum.
        let mut order: Vec<usize> = (0..self.buf.len() / d).collect();
        order.sort_by(|&a, &b| {
            plus_sum(&self.buf[a * d..(a + 1) * d]).total_cmp(&plus_sum(&self.buf[b * d..(b + 1) * d]))
        });
        for i in order {
            let v = &self.buf[i * d..(i + 1) * d];
            if !self.out.points.chunks_exact(d).any(|f| precedes(f, v)) {
                self.out.points.extend_from_slice(v);
            }
        }
    }
}

pub(crate) fn poisson(mean: f64, rng: &mut SimRng) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    if mean < 12.0 {
        // Inversion by sequential search.
        let mut u: f64 = rng.random();
        let mut p = (-mean).exp();
        let mut k = 0u64;
        while u > p {
            u -= p;
            k += 1;
            p *= mean / k as f64;
            if p == 0.0 {
                break;
            }
        }
        return k;
    }
    Poisson::new(mean).expect("finite positive mean").sample(rng) as u64
}
