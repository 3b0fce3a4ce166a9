//! Closed-form reference values and bounds for the kill-count limit `K(d)`.
//!
//! Everything here is a pure function. Bounds that can overflow are
//! computed in log space; `ln_*` variants expose the logarithm directly.

use std::f64::consts::{E, LN_2};

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};

/// Largest argument accepted by [`stirling2`]; `S(30, m)` fits in a `u128`.
pub const STIRLING_MAX: u32 = 30;

/// Stirling number of the second kind `S(r, m)`: partitions of an
/// `r`-set into `m` nonempty blocks.
pub fn stirling2(r: u32, m: u32) -> Result<u128> {
    if r > STIRLING_MAX || m > STIRLING_MAX {
        return Err(invalid(format!("stirling2 arguments must be <= {STIRLING_MAX}, got ({r}, {m})")));
    }
    if m > r {
        return Ok(0);
    }
    // Row-by-row recurrence S(n, j) = j S(n-1, j) + S(n-1, j-1).
    let mut row = vec![0u128; m as usize + 1];
    row[0] = 1;
    for _ in 0..r {
        for j in (1..=m as usize).rev() {
            row[j] = j as u128 * row[j] + row[j - 1];
        }
        row[0] = 0;
    }
    Ok(row[m as usize])
}

/// `P(K(2) = k) = 2^-(k+1)`.
pub fn d2_exact_pmf(k: u32) -> f64 {
    0.5f64.powi(k as i32 + 1)
}

/// `P(K(2) >= k) = 2^-k`.
pub fn d2_exact_tail(k: u32) -> f64 {
    0.5f64.powi(k as i32)
}

/// `E K(2)^r = Σ_{m=1}^r m! S(r, m)` (the ordered Bell / Fubini numbers).
pub fn d2_moment(r: u32) -> Result<f64> {
    if !(1..=20).contains(&r) {
        return Err(invalid(format!("d2_moment needs 1 <= r <= 20, got {r}")));
    }
    let mut total = 0u128;
    let mut fact = 1u128;
    for m in 1..=r {
        fact *= m as u128;
        total += fact * stirling2(r, m)?;
    }
    Ok(total as f64)
}

/// `a_d = 2^(1/d) d^((d+1)/(d-1))`, `d >= 2`.
pub fn a_d(d: u32) -> Result<f64> {
    Ok(ln_a_d(d)?.exp())
}

pub fn ln_a_d(d: u32) -> Result<f64> {
    need_d2(d)?;
    let df = f64::from(d);
    Ok(LN_2 / df + (df + 1.0) / (df - 1.0) * df.ln())
}

fn need_d2(d: u32) -> Result<()> {
    if d < 2 {
        return Err(invalid(format!("this bound needs d >= 2, got {d}")));
    }
    Ok(())
}

/// `ln[a_d^r r^((d + 1 - 1/(d-1)) r)]`.
pub fn ln_moment_upper_bound(d: u32, r: u32) -> Result<f64> {
    if r == 0 {
        return Err(invalid("moment order must be positive"));
    }
    let rf = f64::from(r);
    let df = f64::from(d);
    Ok(rf * ln_a_d(d)? + (df + 1.0 - 1.0 / (df - 1.0)) * rf * rf.ln())
}

/// Upper bound on `E K(d)^r`; `+inf` once it leaves `f64` range.
pub fn moment_upper_bound(d: u32, r: u32) -> Result<f64> {
    Ok(ln_moment_upper_bound(d, r)?.exp())
}

pub fn ln_brightwell_bound(d: u32, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(invalid("m must be positive"));
    }
    let mf = f64::from(m);
    Ok(mf * ln_a_d(d)? - mf / f64::from(d - 1) * mf.ln())
}

/// `a_d^m m^(-m/(d-1))`, an upper bound on `P(r_m = m)`. Returned as is,
/// so it can exceed 1.
pub fn brightwell_bound(d: u32, m: u32) -> Result<f64> {
    Ok(ln_brightwell_bound(d, m)?.exp())
}

/// `P(Gamma(d, 1) > delta) = e^-delta Σ_{j<d} delta^j / j!`.
pub fn gamma_tail(d: u32, delta: f64) -> Result<f64> {
    if d == 0 {
        return Err(invalid("dimension must be positive"));
    }
    if !(delta >= 0.0) {
        return Err(invalid(format!("delta must be >= 0, got {delta}")));
    }
    if delta.is_infinite() {
        return Ok(0.0);
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..d {
        term *= delta / f64::from(j);
        sum += term;
    }
    Ok((-delta).exp() * sum)
}

/// `γ_d(s) = ∫_0^s η^(d-1)/(d-1)! e^η dη`, the mass (per unit `e^-g`) of
/// the ℓ1 slab of radius `s` below a point.
pub fn slab_mass(d: u32, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    // Small arguments: the power series avoids the cancellation in the
    // closed form (-1)^d [1 - e^s Σ_{j<d} (-s)^j / j!].
    if s < 1.0 + f64::from(d) {
        // Σ_{n>=0} s^(n+d) / ((n+d) (d-1)! n!)
        let mut lead = 1.0;
        for j in 1..d {
            lead *= s / f64::from(j);
        }
        lead *= s; // s^d / (d-1)!
        let mut sum = 0.0;
        let mut term = lead;
        for n in 0..200u32 {
            let t = term / f64::from(n + d);
            sum += t;
            if t < sum * 1e-17 {
                break;
            }
            term *= s / f64::from(n + 1);
        }
        return sum;
    }
    // Large arguments: γ_d(s) = e^s Σ_{j<d} (-1)^(d-1-j) s^j / j! + (-1)^d,
    // dominated by the j = d-1 term.
    let mut sum = 0.0;
    let mut term = 1.0;
    for j in 0..d {
        if j > 0 {
            term *= s / f64::from(j);
        }
        let sign = if (d - 1 - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        sum += sign * term;
    }
    let tail = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
    s.exp() * sum + tail
}

pub fn gumbel_pdf(g: f64) -> f64 {
    let t = (-g).exp();
    if t.is_infinite() {
        return 0.0;
    }
    t * (-t).exp()
}

pub fn gumbel_cdf(g: f64) -> f64 {
    (-(-g).exp()).exp()
}

/// Lower bound curve `((e^c - 1) / e^(2c))^d` on `P(K(d) >= 1)`.
pub fn pk1_lower_curve(d: u32, c: f64) -> f64 {
    ((c.exp() - 1.0) / (2.0 * c).exp()).powi(d as i32)
}

/// `4^-d`, the curve at its optimum `c = ln 2`.
pub fn pk1_lower(d: u32) -> f64 {
    0.25f64.powi(d as i32)
}

/// `(1 + 1/c) [c^(d-2) / Γ(c+1)]^(-1/(c+1))`: the large-`d` upper
/// expression for `P(K(d) >= 1)`. Only an asymptotic indicator.
pub fn pk1_upper_expression(d: u32, c: f64) -> f64 {
    let ln_inner = f64::from(d as i32 - 2) * c.ln() - ln_gamma(c + 1.0);
    (1.0 + 1.0 / c) * (-ln_inner / (c + 1.0)).exp()
}

/// Minimum of [`pk1_upper_expression`] over `c = 0.01, 0.02, ..., 20`.
pub fn pk1_upper_asymptotic(d: u32) -> (f64, f64) {
    (1..=2000)
        .map(|i| f64::from(i) * 0.01)
        .map(|c| (c, pk1_upper_expression(d, c)))
        .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// The constant `e/(e-1) (d-1)!` of the tail lower curve.
pub fn tail_lower_constant(d: u32) -> Result<f64> {
    need_d2(d)?;
    let fact: f64 = (1..d).map(f64::from).product();
    Ok(E / (E - 1.0) * fact)
}

/// Tail curves at `k >= 1`, `d >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailCurves {
    /// `exp[-(c k)^(1/(d-1))]`; the asymptotic result carries a `(1 + o(1))` in the
    /// exponent, so this is a shape indicator at finite `k`.
    pub lower: f64,
    /// `min_r k^-r · moment_upper_bound(d, r)`, clamped to 1. Rigorous.
    pub upper: f64,
    /// `ln upper`, unclamped, for `k` where `upper` underflows.
    pub ln_upper: f64,
    /// Minimizing moment order.
    pub upper_r: u32,
}

pub fn tail_bound_curves(d: u32, k: u64) -> Result<TailCurves> {
    need_d2(d)?;
    if k == 0 {
        return Err(invalid("tail curves need k >= 1"));
    }
    let c = tail_lower_constant(d)?;
    let kf = k as f64;
    let lower = (-(c * kf).powf(1.0 / f64::from(d - 1))).exp();
    // The log-bound -r ln k + ln_moment_upper_bound(d, r) is convex in r.
    let mut best = (f64::INFINITY, 1u32);
    for r in 1..=1_000_000u32 {
        let v = ln_moment_upper_bound(d, r)? - f64::from(r) * kf.ln();
        if v < best.0 {
            best = (v, r);
        } else {
            break;
        }
    }
    Ok(TailCurves { lower, upper: best.0.exp().min(1.0), ln_upper: best.0, upper_r: best.1 })
}

/// `P(K_g = k)` for `d = 2` and fixed Gumbel level `g`: the mixed Poisson
/// law `∫_0^∞ e^-g λ^k/k! exp[-e^-g (e^λ - 1)] dλ`.
pub fn d2_kg_pmf(g: f64, k: u32) -> f64 {
    let scale = (-g).exp();
    // Integrand is negligible once e^-g (e^λ - 1) > 60.
    let upper = (1.0 + 60.0 / scale).ln();
    let ln_kfact = ln_gamma(f64::from(k) + 1.0);
    let f = |lam: f64| {
        if lam <= 0.0 {
            return if k == 0 { scale } else { 0.0 };
        }
        (f64::from(k) * lam.ln() - ln_kfact - scale * lam.exp_m1()).exp() * scale
    };
    simpson(f, 0.0, upper, 20_000)
}

/// `E K_g(Δ+)`: expected number of maxima below `x(g)` beyond ℓ1 radius
/// `delta`, `e^(e^-g) ∫_Δ^∞ η^(d-1)/(d-1)! e^-(g-η) exp[-e^-(g-η)] dη`.
pub fn kg_beyond_mean(d: u32, g: f64, delta: f64) -> f64 {
    let ln_fact = ln_gamma(f64::from(d));
    let f = |eta: f64| {
        let t = eta - g;
        let body = f64::from(d - 1) * eta.max(1e-300).ln() - ln_fact + t - t.exp() + (-g).exp();
        body.exp()
    };
    // exp[-e^(η-g)] kills the integrand once η > g + 5.
    let hi = (g + 5.0).max(delta) + 1.0;
    if hi <= delta {
        return 0.0;
    }
    simpson(f, delta, hi, 20_000)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// All the reference values for one dimension.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub d: u32,
    /// `None` for `d = 1`, where the moment/Brightwell/tail bounds are
    /// undefined.
    pub a_d: Option<f64>,
    pub pk1_lower: f64,
    /// `(c, value)` pairs on a grid.
    pub pk1_lower_curve: Vec<(f64, f64)>,
    /// `(c, value)` pairs; asymptotic indicator only.
    pub pk1_upper_curve: Vec<(f64, f64)>,
    pub pk1_upper_asymptotic: f64,
    pub pk1_upper_asymptotic_c: f64,
    /// Exact `P(K >= 1)` where known (`d = 1`: 1, `d = 2`: 1/2).
    pub pk1_exact: Option<f64>,
    /// `(k, curves)` for `k = 1..=kmax`.
    pub tail: Vec<(u64, TailCurves)>,
    /// `(r, ln bound, bound)` for `r = 1..=rmax`.
    pub moment_upper: Vec<(u32, f64, f64)>,
    /// `(m, bound)` for `m = 1..=mmax`.
    pub brightwell: Vec<(u32, f64)>,
}

impl BoundReport {
    pub fn new(d: u32, kmax: u64, rmax: u32, mmax: u32) -> Result<Self> {
        if d == 0 {
            return Err(invalid("dimension must be positive"));
        }
        let grid: Vec<f64> = (1..=40).map(|i| f64::from(i) * 0.1).collect();
        let (c_best, upper) = pk1_upper_asymptotic(d);
        let has_bounds = d >= 2;
        let tail = if has_bounds {
            (1..=kmax).map(|k| Ok((k, tail_bound_curves(d, k)?))).collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let moment_upper = if has_bounds {
            (1..=rmax)
                .map(|r| {
                    let l = ln_moment_upper_bound(d, r)?;
                    Ok((r, l, l.exp()))
                })
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let brightwell = if has_bounds {
            (1..=mmax).map(|m| Ok((m, brightwell_bound(d, m)?))).collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        Ok(BoundReport {
            d,
            a_d: has_bounds.then(|| a_d(d)).transpose()?,
            pk1_lower: pk1_lower(d),
            pk1_lower_curve: grid.iter().map(|&c| (c, pk1_lower_curve(d, c))).collect(),
            pk1_upper_curve: grid.iter().map(|&c| (c, pk1_upper_expression(d, c))).collect(),
            pk1_upper_asymptotic: upper,
            pk1_upper_asymptotic_c: c_best,
            pk1_exact: match d {
                1 => Some(1.0),
                2 => Some(1.0 - d2_exact_pmf(0)),
                _ => None,
            },
            tail,
            moment_upper,
            brightwell,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ContinuousCDF, Gamma};

    /// Count set partitions of {0..r} into m blocks by restricted growth
    /// strings.
    fn partitions_brute(r: usize, m: usize) -> u128 {
        fn go(pos: usize, r: usize, m: usize, max: usize) -> u128 {
            if pos == r {
                return u128::from(max == m);
            }
            (0..=max.min(m - 1)).map(|b| go(pos + 1, r, m, max.max(b + 1))).sum()
        }
        if r == 0 {
            return u128::from(m == 0);
        }
        if m == 0 {
            return 0;
        }
        go(0, r, m, 0)
    }

    #[test]
    fn stirling_against_enumeration() {
        assert_eq!(stirling2(1, 1).unwrap(), 1);
        assert_eq!(stirling2(3, 2).unwrap(), 3);
        assert_eq!(stirling2(4, 2).unwrap(), 7);
        assert_eq!(stirling2(0, 0).unwrap(), 1);
        assert_eq!(stirling2(5, 0).unwrap(), 0);
        assert_eq!(stirling2(2, 5).unwrap(), 0);
        for r in 0..=9 {
            for m in 0..=9 {
                assert_eq!(stirling2(r, m).unwrap(), partitions_brute(r as usize, m as usize), "S({r},{m})");
            }
        }
        assert!(stirling2(31, 2).is_err());
        // S(30, 15) is the largest entry of row 30; it must not overflow.
        assert!(stirling2(30, 15).unwrap() > 0);
    }

    #[test]
    fn d2_law_and_moments() {
        assert_eq!(d2_exact_pmf(0), 0.5);
        assert_eq!(d2_exact_tail(0), 1.0);
        assert_eq!(d2_exact_tail(3), 0.125);
        let total: f64 = (0..=60).map(d2_exact_pmf).sum();
        assert!((total - (1.0 - 0.5f64.powi(61))).abs() < 1e-16);
        assert_eq!(d2_moment(1).unwrap(), 1.0);
        assert_eq!(d2_moment(2).unwrap(), 3.0);
        assert_eq!(d2_moment(3).unwrap(), 13.0);
        for r in 1..=10u32 {
            let direct: f64 = (0..400).map(|k| (k as f64).powi(r as i32) * d2_exact_pmf(k)).sum();
            let stirling = d2_moment(r).unwrap();
            assert!(((direct - stirling) / stirling).abs() < 1e-9, "r={r}");
        }
        assert!(d2_moment(0).is_err() && d2_moment(21).is_err());
    }

    #[test]
    fn constant_and_bounds() {
        let a2 = a_d(2).unwrap();
        assert!((a2 - 8.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((a2 - 11.3137).abs() < 1e-4);
        assert!((moment_upper_bound(2, 1).unwrap() - a2).abs() < 1e-12);
        assert!((moment_upper_bound(2, 2).unwrap() - 2048.0).abs() < 1e-9);
        assert!((brightwell_bound(2, 1).unwrap() - a2).abs() < 1e-12);
        assert!((brightwell_bound(2, 4).unwrap() - 64.0).abs() < 1e-10);
        assert!(brightwell_bound(2, 20).unwrap() < 1.0);
        assert!(a_d(1).is_err());
        assert!(moment_upper_bound(1, 2).is_err());
        assert!(brightwell_bound(1, 2).is_err());
        assert!(tail_bound_curves(1, 2).is_err());
        // Overflow-free in log space.
        assert!(ln_moment_upper_bound(20, 30).unwrap().is_finite());
        for d in 2..=20 {
            assert!(a_d(d).unwrap() >= 1.0);
        }
    }

    #[test]
    fn gamma_tail_values() {
        for delta in [0.0, 0.5, 3.0, 12.0] {
            assert!((gamma_tail(1, delta).unwrap() - (-delta).exp()).abs() < 1e-15);
        }
        for d in 1..6 {
            assert_eq!(gamma_tail(d, 0.0).unwrap(), 1.0);
        }
        assert!((gamma_tail(2, 10.0).unwrap() - 11.0 * (-10f64).exp()).abs() < 1e-16);
        assert!((gamma_tail(2, 10.0).unwrap() - 4.994e-4).abs() < 1e-6);
        assert!((gamma_tail(3, 8.0).unwrap() - 41.0 * (-8f64).exp()).abs() < 1e-15);
        assert!((gamma_tail(3, 8.0).unwrap() - 0.01375).abs() < 1e-5);
        assert!(gamma_tail(2, -1.0).is_err());
        assert!(gamma_tail(0, 1.0).is_err());
    }

    #[test]
    fn gamma_tail_matches_incomplete_gamma_and_recurrence() {
        for d in 1..=8u32 {
            let dist = Gamma::new(f64::from(d), 1.0).unwrap();
            for delta in [0.1, 1.0, 4.0, 9.5] {
                let ours = gamma_tail(d, delta).unwrap();
                assert!((ours - dist.sf(delta)).abs() < 1e-12, "d={d} delta={delta}");
                if d > 1 {
                    let fact: f64 = (1..d).map(f64::from).product();
                    let step = (-delta).exp() * delta.powi(d as i32 - 1) / fact;
                    assert!((ours - gamma_tail(d - 1, delta).unwrap() - step).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn slab_mass_against_quadrature() {
        for d in 1..=5u32 {
            let fact: f64 = (1..d).map(f64::from).product();
            for s in [1e-4, 0.3, 2.0, 5.5, 10.0] {
                let q = simpson(|e| e.powi(d as i32 - 1) / fact * e.exp(), 0.0, s, 20_000);
                let m = slab_mass(d, s);
                assert!(((m - q) / q).abs() < 1e-9, "d={d} s={s}: {m} vs {q}");
            }
        }
        // d = 2, Δ = 10: (Δ - 1) e^Δ + 1.
        assert!((slab_mass(2, 10.0) - (9.0 * 10f64.exp() + 1.0)).abs() < 1e-7);
        assert_eq!(slab_mass(3, 0.0), 0.0);
    }

    #[test]
    fn gumbel_functions() {
        assert!((gumbel_cdf(0.0) - (-1f64).exp()).abs() < 1e-16);
        assert!((gumbel_cdf(-(2f64.ln()).ln()) - 0.5).abs() < 1e-15);
        let total = simpson(gumbel_pdf, -10.0, 45.0, 200_000);
        assert!((total - 1.0).abs() < 1e-10);
        let tilted = simpson(|g| (-g).exp() * gumbel_pdf(g), -10.0, 45.0, 200_000);
        assert!((tilted - 1.0).abs() < 1e-9);
        assert_eq!(gumbel_pdf(-800.0), 0.0);
    }

    #[test]
    fn pk1_values() {
        assert_eq!(pk1_lower(1), 0.25);
        assert_eq!(pk1_lower(2), 0.0625);
        for d in 1..8 {
            assert!((pk1_lower_curve(d, LN_2) - pk1_lower(d)).abs() < 1e-15);
            // ln 2 is the optimum of the lower curve.
            assert!(pk1_lower_curve(d, 0.6) <= pk1_lower(d));
            assert!(pk1_lower_curve(d, 0.8) <= pk1_lower(d));
        }
        // The asymptotic optimum drifts toward c ≈ 3.59 and base 0.757.
        let (c, v) = pk1_upper_asymptotic(200);
        let (_, v2) = pk1_upper_asymptotic(201);
        assert!((c - 3.59).abs() < 0.6, "c = {c}");
        assert!(((v2 / v) - 0.757).abs() < 0.01, "ratio {}", v2 / v);
        let r = BoundReport::new(2, 5, 3, 20).unwrap();
        assert_eq!(r.pk1_exact, Some(0.5));
        assert_eq!(r.tail.len(), 5);
        let r1 = BoundReport::new(1, 5, 3, 20).unwrap();
        assert!(r1.a_d.is_none() && r1.tail.is_empty() && r1.moment_upper.is_empty());
        assert_eq!(r1.pk1_lower, 0.25);
    }

    #[test]
    fn tail_curves() {
        assert!((tail_lower_constant(2).unwrap() - 1.582).abs() < 1e-3);
        assert!((tail_lower_constant(3).unwrap() - 2.0 * E / (E - 1.0)).abs() < 1e-12);
        for k in [1u64, 3, 10, 1000] {
            let t = tail_bound_curves(2, k).unwrap();
            assert!(t.upper <= 1.0 && t.lower <= 1.0);
            // Rigorous upper curve sits above the exact d = 2 tail.
            assert!(t.upper >= d2_exact_tail(k as u32));
            // Brute-force minimum over r.
            let brute = (1..200u32)
                .map(|r| ln_moment_upper_bound(2, r).unwrap() - f64::from(r) * (k as f64).ln())
                .fold(f64::INFINITY, f64::min);
            assert!((t.upper - brute.exp().min(1.0)).abs() <= 1e-12 * t.upper.max(1e-300));
        }
        // Upper-curve decay in d = 2 scales like exp(-Θ(k^(1/2))): the log
        // ratio at 4k vs k approaches 2.
        let l = |k: u64| -tail_bound_curves(2, k).unwrap().ln_upper;
        let ratio = l(4_000_000_000_000) / l(1_000_000_000_000);
        assert!((ratio - 2.0).abs() < 0.15, "ratio {ratio}");
        assert!(tail_bound_curves(2, 0).is_err());
    }

    #[test]
    fn d2_fixed_level_law() {
        for g in [-2.0, 0.0, 1.5, 4.0] {
            let total: f64 = (0..80).map(|k| d2_kg_pmf(g, k)).sum();
            assert!((total - 1.0).abs() < 1e-6, "g={g} total={total}");
        }
        // Mixing over the Gumbel level recovers 2^-(k+1).
        for k in 0..4u32 {
            let mixed = simpson(|g| gumbel_pdf(g) * d2_kg_pmf(g, k), -6.0, 30.0, 1_500);
            assert!((mixed - d2_exact_pmf(k)).abs() < 1e-5, "k={k} {mixed}");
        }
    }

    #[test]
    fn beyond_mean_mixes_to_gamma_tail() {
        for (d, delta) in [(1u32, 2.0), (2, 4.0), (3, 5.0)] {
            let mixed = simpson(|g| gumbel_pdf(g) * kg_beyond_mean(d, g, delta), -6.0, 40.0, 3_000);
            let exact = gamma_tail(d, delta).unwrap();
            assert!(((mixed - exact) / exact).abs() < 1e-4, "d={d}: {mixed} vs {exact}");
        }
    }
}
