use gaborface_core::nmds::{
    classical_init, dissimilarity_order, embed, isotonic_fit, procrustes_align, rsq,
    scan_dimensions, stress1, Configuration, Disparities, EmbedOptions, ProcrustesOptions,
};
use gaborface_core::similarity::{MatrixKind, PairMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i:02}")).collect()
}

fn planted(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)))
        .collect()
}

fn dissimilarities(points: &[(f64, f64)], f: impl Fn(f64) -> f64) -> PairMatrix {
    PairMatrix::from_fn(ids(points.len()), MatrixKind::Dissimilarity, |i, j| {
        let (a, b) = (points[i], points[j]);
        Ok(f(((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()))
    })
    .unwrap()
}

/// Least-squares monotone fit by trying every split of the sequence into
/// contiguous blocks and keeping the best non-decreasing block means.
fn exhaustive_monotone_fit(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << (n - 1)) {
        let mut fit = Vec::with_capacity(n);
        let mut start = 0;
        let mut prev_mean = f64::NEG_INFINITY;
        let mut ok = true;
        for end in 1..=n {
            if end == n || mask & (1 << (end - 1)) != 0 {
                let mean = y[start..end].iter().sum::<f64>() / (end - start) as f64;
                if mean < prev_mean {
                    ok = false;
                    break;
                }
                fit.extend(std::iter::repeat_n(mean, end - start));
                prev_mean = mean;
                start = end;
            }
        }
        if !ok {
            continue;
        }
        let sse: f64 = fit.iter().zip(y).map(|(f, v)| (f - v).powi(2)).sum();
        if best.as_ref().is_none_or(|(b, _)| sse < *b) {
            best = Some((sse, fit));
        }
    }
    best.unwrap().1
}

#[test]
fn pava_matches_exhaustive_block_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..200 {
        let n = rng.gen_range(1..=10);
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let along: Vec<f64> = order.iter().map(|&i| y[i]).collect();
        let want = exhaustive_monotone_fit(&along);
        let got = isotonic_fit(&y, &order).unwrap();
        for (k, &i) in order.iter().enumerate() {
            assert!((got.values[i] - want[k]).abs() < 1e-9);
        }
    }
}

#[test]
fn stress_matches_direct_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..50 {
        let n = rng.gen_range(2..40);
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
        let h: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            num += (d[i] - h[i]) * (d[i] - h[i]);
            den += d[i] * d[i];
        }
        let got = stress1(&d, &Disparities { values: h }).unwrap();
        assert!((got - (num / den).sqrt()).abs() < 1e-14);
    }
}

#[test]
fn classical_recovers_planted_plane() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let pts = planted(&mut rng, 12);
    let m = dissimilarities(&pts, |d| d);
    let c = classical_init(&m, 2, 0).unwrap();
    let mut k = 0;
    let out = c.pair_distances();
    for i in 0..12 {
        for j in i + 1..12 {
            let want = m.get(i, j);
            assert!((out[k] - want).abs() <= 1e-6 * want, "pair {i},{j}");
            k += 1;
        }
    }
}

#[test]
fn embedding_recovers_planted_distances() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let pts = planted(&mut rng, 15);
    let c = embed(&dissimilarities(&pts, |d| d), 2, &EmbedOptions::default()).unwrap();
    assert!(c.stress < 1e-3, "stress {}", c.stress);
    assert!(c.rsq > 0.99);
}

#[test]
fn embedding_recovers_squared_distances() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let pts = planted(&mut rng, 20);
    let c = embed(
        &dissimilarities(&pts, |d| d * d),
        2,
        &EmbedOptions::default(),
    )
    .unwrap();
    assert!(c.stress < 0.05, "stress {}", c.stress);
    for w in c.stress_history.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
    }
}

#[test]
fn embedding_depends_only_on_dissimilarity_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let pts = planted(&mut rng, 14);
    let base = embed(&dissimilarities(&pts, |d| d), 2, &EmbedOptions::default()).unwrap();
    let transforms: [fn(f64) -> f64; 3] = [|d| 3.0 * d + 7.0, |d| d.powf(2.5), |d| d.sqrt()];
    for f in transforms {
        let other = embed(&dissimilarities(&pts, f), 2, &EmbedOptions::default()).unwrap();
        let (_, residual) = procrustes_align(&other, &base, ProcrustesOptions::default()).unwrap();
        assert!(residual < 1e-6, "residual {residual}");
    }
}

#[test]
fn stress_decreases_with_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let pts: Vec<(f64, f64)> = planted(&mut rng, 10);
    let m = PairMatrix::from_fn(ids(10), MatrixKind::Dissimilarity, |i, j| {
        // perturbed distances are not exactly two-dimensional
        let (a, b) = (pts[i], pts[j]);
        Ok(((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt() + 0.3 * ((i * 7 + j * 3) % 5) as f64)
    })
    .unwrap();
    let scan = scan_dimensions(&m, 4, &EmbedOptions::default()).unwrap();
    assert_eq!(scan.len(), 4);
    assert!(scan[0].stress > scan[1].stress);
    assert!(scan.iter().all(|r| (0.0..=1.0).contains(&r.rsq)));
}

fn config(points: &[f64]) -> Configuration {
    Configuration::new(ids(points.len() / 2), 2, points.to_vec()).unwrap()
}

fn transform(points: &[f64], angle: f64, reflect: bool, shift: (f64, f64)) -> Vec<f64> {
    let (s, c) = angle.sin_cos();
    points
        .chunks(2)
        .flat_map(|p| {
            let y = if reflect { -p[1] } else { p[1] };
            [c * p[0] - s * y + shift.0, s * p[0] + c * y + shift.1]
        })
        .collect()
}

/// Best RMS residual over a 0.1° rotation grid, with and without reflection,
/// translation fixed by matching centroids.
fn grid_search_residual(source: &Configuration, target: &Configuration, reflections: bool) -> f64 {
    let n = source.len();
    let mut best = f64::INFINITY;
    for flip in [false, true] {
        if flip && !reflections {
            continue;
        }
        for step in 0..3600 {
            let angle = (step as f64 * 0.1).to_radians();
            let moved = transform(source.coordinates(), angle, flip, (0.0, 0.0));
            let ss: f64 = moved
                .iter()
                .zip(target.coordinates())
                .map(|(a, b)| (a - b).powi(2))
                .sum();
            best = best.min((ss / n as f64).sqrt());
        }
    }
    best
}

#[test]
fn procrustes_recovers_rotation_and_translation() {
    let mut rng = ChaCha8Rng::seed_from_u64(28);
    let pts: Vec<f64> = (0..16).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let target = config(&pts);
    let moved = config(&transform(
        target.coordinates(),
        std::f64::consts::FRAC_PI_6,
        false,
        (4.0, -2.0),
    ));
    let (_, r) = procrustes_align(&moved, &target, ProcrustesOptions::default()).unwrap();
    assert!(r < 1e-9);
}

#[test]
fn reflection_needs_permission() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let pts: Vec<f64> = (0..20).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let target = config(&pts);
    let mirrored = config(&transform(target.coordinates(), 0.7, true, (0.0, 0.0)));
    let (_, with) = procrustes_align(&mirrored, &target, ProcrustesOptions::default()).unwrap();
    assert!(with < 1e-9);
    let opts = ProcrustesOptions {
        allow_reflection: false,
        allow_scaling: false,
    };
    let (_, without) = procrustes_align(&mirrored, &target, opts).unwrap();
    let oracle = grid_search_residual(&mirrored, &target, false);
    assert!(without > 1e-3);
    assert!(without <= oracle + 1e-9);
    assert!(
        oracle - without < 1e-3,
        "grid optimum {oracle} vs {without}"
    );
}

#[test]
fn procrustes_never_loses_to_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for _ in 0..5 {
        let a = config(
            &(0..16)
                .map(|_| rng.gen_range(-3.0..3.0))
                .collect::<Vec<_>>(),
        );
        let b = config(
            &(0..16)
                .map(|_| rng.gen_range(-3.0..3.0))
                .collect::<Vec<_>>(),
        );
        let (_, r) = procrustes_align(&a, &b, ProcrustesOptions::default()).unwrap();
        assert!(r <= grid_search_residual(&a, &b, true) + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pava_is_monotone_and_mean_preserving(y in prop::collection::vec(0.0f64..100.0, 1..60)) {
        let order = dissimilarity_order(&(0..y.len()).map(|i| i as f64).collect::<Vec<_>>(), &y);
        let fit = isotonic_fit(&y, &order).unwrap();
        for w in order.windows(2) {
            prop_assert!(fit.values[w[0]] <= fit.values[w[1]] + 1e-12);
        }
        let mean_in: f64 = y.iter().sum::<f64>() / y.len() as f64;
        let mean_out: f64 = fit.values.iter().sum::<f64>() / y.len() as f64;
        prop_assert!((mean_in - mean_out).abs() <= 1e-9 * mean_in.max(1.0));
        let r = rsq(&y, &fit);
        prop_assert!((0.0..=1.0).contains(&r));
    }
}
