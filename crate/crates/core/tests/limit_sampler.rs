use pareto_records::analytics::{d2_kg_pmf, kg_beyond_mean};
use pareto_records::limit::{
    estimate_limit_law, reference, sample_k_g_truncated, tv_truncation_bound, LimitConfig,
    DEFAULT_CANDIDATE_BUDGET,
};
use pareto_records::rng::{child_rng, SimRng};
use rand::Rng;
use rand_distr::{Distribution, Poisson};

fn histogram(ks: impl Iterator<Item = u64>) -> (Vec<f64>, f64) {
    let mut counts = Vec::<u64>::new();
    let mut n = 0u64;
    for k in ks {
        if counts.len() <= k as usize {
            counts.resize(k as usize + 1, 0);
        }
        counts[k as usize] += 1;
        n += 1;
    }
    (counts.iter().map(|&c| c as f64 / n as f64).collect(), n as f64)
}

fn at(p: &[f64], k: usize) -> f64 {
    p.get(k).copied().unwrap_or(0.0)
}

/// Every cell of two independent pmfs agrees within `z` combined SE.
fn assert_same_law(a: &[f64], na: f64, b: &[f64], nb: f64, z: f64, what: &str) {
    for k in 0..a.len().max(b.len()) {
        let (pa, pb) = (at(a, k), at(b, k));
        let pool = (pa * na + pb * nb) / (na + nb);
        let se = (pool * (1.0 - pool) * (1.0 / na + 1.0 / nb)).sqrt();
        assert!((pa - pb).abs() <= z * se + 1e-12, "{what}: k={k} {pa} vs {pb} (se {se})");
    }
}

#[test]
fn one_dimension_fixed_level() {
    let delta = 3.0;
    for (s, g) in [(0u64, -1.0f64), (1, 0.0), (2, 2.0)] {
        let n = 20_000;
        let hits = (0..n)
            .filter(|&i| {
                let mut rng = child_rng(100 + s, i);
                sample_k_g_truncated(1, g, delta, DEFAULT_CANDIDATE_BUDGET, &mut rng).unwrap().k() == 1
            })
            .count() as f64
            / n as f64;
        let exact = 1.0 - (-(-g).exp() * delta.exp_m1()).exp();
        let se = (exact * (1.0 - exact) / n as f64).sqrt();
        assert!((hits - exact).abs() <= 4.0 * se, "g={g}: {hits} vs {exact}");
    }
}

#[test]
fn one_dimension_mixed() {
    for delta in [1.0, 3.0, 6.0] {
        let law = estimate_limit_law(&LimitConfig::new(1, delta, 7, 40_000)).unwrap();
        let exact = 1.0 - (-delta).exp();
        let (p, _) = law.tail(1);
        let se = (exact * (1.0 - exact) / law.trials as f64).sqrt();
        assert!((p - exact).abs() <= 3.0 * se, "delta={delta}: {p} vs {exact}");
        assert_eq!(law.pmf.len(), 2);
        assert!((1.0 - exact - tv_truncation_bound(1, delta).unwrap()).abs() < 1e-15);
    }
}

#[test]
fn fast_and_reference_samplers_agree() {
    for (d, g, delta) in [(2usize, 0.0f64, 4.0f64), (3, 0.0, 3.5), (3, -1.0, 2.5), (4, 0.5, 3.0)] {
        let n = 12_000u64;
        let x = vec![g / d as f64; d];
        let mut fast_ext = 0u64;
        let (fast, nf) = histogram((0..n).map(|i| {
            let r = sample_k_g_truncated(d, g, delta, 1e9, &mut child_rng(1, i)).unwrap();
            fast_ext += r.n_maximal;
            r.k()
        }));
        let mut ref_max = 0u64;
        let (slow, ns) = histogram((0..n).map(|i| {
            let r = reference::sample_at(&x, delta, 1e9, &mut child_rng(2, i)).unwrap();
            ref_max += r.n_maximal;
            r.k()
        }));
        assert_same_law(&fast, nf, &slow, ns, 4.0, &format!("d={d} g={g} delta={delta}"));
        // Candidate maxima come from the same slab process.
        let (mf, mr) = (fast_ext as f64 / n as f64, ref_max as f64 / n as f64);
        assert!((mf - mr).abs() < 0.05 * mr.max(1.0), "maximal counts {mf} vs {mr}");
    }
}

#[test]
fn reference_location_invariance() {
    let (d, g, delta) = (3usize, 0.3f64, 3.0f64);
    let n = 12_000u64;
    let base = vec![g / 3.0; 3];
    let shifted = vec![g / 3.0 + 0.8, g / 3.0 - 0.8, g / 3.0];
    let (a, na) =
        histogram((0..n).map(|i| reference::sample_at(&base, delta, 1e9, &mut child_rng(3, i)).unwrap().k()));
    let (b, nb) = histogram(
        (0..n).map(|i| reference::sample_at(&shifted, delta, 1e9, &mut child_rng(4, i)).unwrap().k()),
    );
    assert_same_law(&a, na, &b, nb, 4.0, "shifted base point");
    assert_eq!(d, base.len());
}

#[test]
fn two_dimensions_fixed_level_law() {
    let delta = 10.0;
    for g in [-1.0f64, 1.0] {
        let n = 20_000u64;
        let (p, nn) = histogram((0..n).map(|i| {
            sample_k_g_truncated(2, g, delta, DEFAULT_CANDIDATE_BUDGET, &mut child_rng(5, i)).unwrap().k()
        }));
        // Truncation only lowers counts, by at most E K_g(Δ+) in total.
        let slack = kg_beyond_mean(2, g, delta);
        assert!(slack < 1e-2, "slack {slack}");
        for k in 0..6 {
            let exact = d2_kg_pmf(g, k as u32);
            let se = (exact * (1.0 - exact) / nn).sqrt();
            assert!((at(&p, k) - exact).abs() <= 4.0 * se + slack, "g={g} k={k}: {} vs {exact}", at(&p, k));
        }
    }
}

#[test]
fn mean_identity() {
    for (d, samples) in [(2usize, 60_000u64), (3, 30_000), (4, 12_000)] {
        let delta = match d {
            2 => 8.0,
            3 => 7.0,
            _ => 6.0,
        };
        let law = estimate_limit_law(&LimitConfig::new(d, delta, 11, samples)).unwrap();
        let (mean, se) = law.mean();
        let tail = tv_truncation_bound(d, delta).unwrap();
        assert!((mean + tail - 1.0).abs() <= 3.0 * se, "d={d}: mean {mean} + {tail} (se {se})");
    }
}

fn poisson_count(mean: f64, rng: &mut SimRng) -> u64 {
    if mean <= 0.0 {
        0
    } else {
        Poisson::new(mean).unwrap().sample(rng) as u64
    }
}

/// The same count after `u = e^(-z)`: a unit-rate process on the positive
/// quadrant, dominance reversed. Anchor `a = (e^(-g), 1)`; candidates are
/// points `u ≻ a` with `u1 u2 ≤ e^(Δ-g)`, and externals live in the two
/// rectangles below the candidates that avoid both cones of `a`.
fn homogeneous_k_2d(g: f64, delta: f64, rng: &mut SimRng) -> u64 {
    let a = [(-g).exp(), 1.0];
    let cap = (delta - g).exp();
    let hi = [cap / a[1], cap / a[0]];
    let n = poisson_count((hi[0] - a[0]) * (hi[1] - a[1]), rng);
    let pts: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.random_range(a[0]..hi[0]), rng.random_range(a[1]..hi[1])])
        .filter(|u| u[0] * u[1] <= cap)
        .collect();
    let minimal: Vec<[f64; 2]> =
        pts.iter().filter(|u| !pts.iter().any(|w| w[0] < u[0] && w[1] < u[1])).copied().collect();
    if minimal.is_empty() {
        return 0;
    }
    let top =
        [minimal.iter().map(|m| m[0]).fold(0.0, f64::max), minimal.iter().map(|m| m[1]).fold(0.0, f64::max)];
    let mut ext = Vec::new();
    for _ in 0..poisson_count(a[0] * (top[1] - a[1]), rng) {
        ext.push([rng.random_range(0.0..a[0]), rng.random_range(a[1]..top[1])]);
    }
    for _ in 0..poisson_count((top[0] - a[0]) * a[1], rng) {
        ext.push([rng.random_range(a[0]..top[0]), rng.random_range(0.0..a[1])]);
    }
    minimal.iter().filter(|m| !ext.iter().any(|w| w[0] < m[0] && w[1] < m[1])).count() as u64
}

#[test]
fn homogeneous_picture_agrees() {
    let (g, delta) = (0.5f64, 3.0f64);
    let n = 12_000u64;
    let (fast, nf) =
        histogram((0..n).map(|i| sample_k_g_truncated(2, g, delta, 1e9, &mut child_rng(6, i)).unwrap().k()));
    let (homog, nh) = histogram((0..n).map(|i| homogeneous_k_2d(g, delta, &mut child_rng(7, i))));
    assert!(at(&homog, 0) < 0.9, "{homog:?}");
    assert_same_law(&fast, nf, &homog, nh, 4.0, "exponential map");
}
