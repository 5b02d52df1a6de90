use gaborface_core::gabor::{FilterBank, ImageRaster, JetVector};
use gaborface_core::grid::{GridNode, GridPlacement, GridTemplate};
use gaborface_core::ratings::{semantic_dissimilarity, semantic_matrix, RatingVector, ADJECTIVES};
use gaborface_core::similarity::{
    gabor_image_similarity, gabor_matrix, geometry_dissimilarity, geometry_matrix, jet_similarity,
    CodedImage, MatrixKind,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn placement(id: &str, coords: &[(f64, f64)], size: (usize, usize)) -> GridPlacement {
    let t = GridTemplate::standard();
    let nodes = t
        .names
        .iter()
        .zip(coords)
        .map(|(n, &(x, y))| GridNode::new(n.clone(), x, y))
        .collect();
    GridPlacement::new(id, nodes, t.nose_tip.clone(), size).unwrap()
}

fn random_coords(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    (0..34)
        .map(|_| (rng.gen_range(lo..hi), rng.gen_range(lo..hi)))
        .collect()
}

fn textured(rng: &mut ChaCha8Rng, w: usize, h: usize) -> ImageRaster {
    let blobs: Vec<(f64, f64, f64, f64)> = (0..12)
        .map(|_| {
            (
                rng.gen_range(0.0..w as f64),
                rng.gen_range(0.0..h as f64),
                rng.gen_range(3.0..15.0),
                rng.gen_range(20.0..120.0),
            )
        })
        .collect();
    let noise: Vec<f64> = (0..w * h).map(|_| rng.gen_range(0.0..20.0)).collect();
    ImageRaster::from_fn(w, h, |x, y| {
        let mut v = 40.0 + noise[y * w + x];
        for &(cx, cy, r, a) in &blobs {
            let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
            v += a * (-d2 / (2.0 * r * r)).exp();
        }
        v
    })
    .unwrap()
}

fn coded(rng: &mut ChaCha8Rng, id: &str) -> (ImageRaster, GridPlacement, CodedImage) {
    let img = textured(rng, 96, 96);
    let grid = placement(id, &random_coords(rng, 4.0, 92.0), (96, 96));
    let c = CodedImage::encode(&img, &grid, &FilterBank::standard()).unwrap();
    (img, grid, c)
}

#[test]
fn geometry_vector_matches_direct_distances() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let t = GridTemplate::standard();
    let nose = t.names.iter().position(|n| *n == t.nose_tip).unwrap();
    for _ in 0..20 {
        let coords = random_coords(&mut rng, 0.0, 255.0);
        let v = placement("a", &coords, (256, 256)).geometry_vector();
        let want: Vec<f64> = coords
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != nose)
            .map(|(_, &(x, y))| {
                ((x - coords[nose].0).powi(2) + (y - coords[nose].1).powi(2)).sqrt()
            })
            .collect();
        assert_eq!(v.len(), 33);
        for (a, b) in v.distances().iter().zip(&want) {
            assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        }
    }
}

#[test]
fn image_similarity_is_mean_of_node_similarities() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..3 {
        let (_, _, a) = coded(&mut rng, "a");
        let (_, _, b) = coded(&mut rng, "b");
        let per_node: f64 = a
            .jets
            .iter()
            .zip(&b.jets)
            .map(|(x, y)| {
                let dot: f64 = x
                    .amplitudes()
                    .iter()
                    .zip(y.amplitudes())
                    .map(|(p, q)| p * q)
                    .sum();
                let nx: f64 = x.amplitudes().iter().map(|p| p * p).sum::<f64>().sqrt();
                let ny: f64 = y.amplitudes().iter().map(|p| p * p).sum::<f64>().sqrt();
                dot / (nx * ny)
            })
            .sum::<f64>()
            / 34.0;
        let s = gabor_image_similarity(&a, &b).unwrap();
        assert!((s - per_node).abs() < 1e-12);
        assert_eq!(s, gabor_image_similarity(&b, &a).unwrap());
        assert!((0.0..=1.0).contains(&s));
    }
}

#[test]
fn similarity_ignores_illumination_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let bank = FilterBank::standard();
    let (_, _, a) = coded(&mut rng, "a");
    let (img_b, grid_b, b) = coded(&mut rng, "b");
    let base = gabor_image_similarity(&a, &b).unwrap();
    for c in [0.5, 2.0, 10.0] {
        let scaled = CodedImage::encode(&img_b.scaled(c).unwrap(), &grid_b, &bank).unwrap();
        assert!((gabor_image_similarity(&a, &scaled).unwrap() - base).abs() < 1e-9);
    }
}

#[test]
fn matrices_match_elementwise_operations() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let items: Vec<CodedImage> = (0..5)
        .map(|i| coded(&mut rng, &format!("i{i}")).2)
        .collect();
    let m = gabor_matrix(&items).unwrap();
    assert_eq!(m.kind(), MatrixKind::Similarity);
    for i in 0..5 {
        for j in 0..5 {
            let want = if i == j {
                1.0
            } else {
                gabor_image_similarity(&items[i], &items[j]).unwrap()
            };
            assert_eq!(m.get(i, j), want);
        }
    }

    let shapes: Vec<_> = (0..5)
        .map(|i| {
            (
                format!("g{i}"),
                placement("g", &random_coords(&mut rng, 0.0, 255.0), (256, 256)).geometry_vector(),
            )
        })
        .collect();
    let g = geometry_matrix(&shapes).unwrap();
    assert_eq!(g.kind(), MatrixKind::Dissimilarity);
    for i in 0..5 {
        for j in 0..5 {
            assert_eq!(
                g.get(i, j),
                geometry_dissimilarity(&shapes[i].1, &shapes[j].1).unwrap()
            );
        }
    }
}

fn rating(rng: &mut ChaCha8Rng, id: &str) -> RatingVector {
    RatingVector::new(
        id,
        ADJECTIVES.iter().map(|s| s.to_string()).collect(),
        (0..6).map(|_| rng.gen_range(1.0..=5.0)).collect(),
    )
    .unwrap()
}

#[test]
fn semantic_matrix_matches_direct_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let items: Vec<RatingVector> = (0..6).map(|i| rating(&mut rng, &format!("r{i}"))).collect();
    let m = semantic_matrix(&items).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let want: f64 = items[i]
                .values()
                .iter()
                .zip(items[j].values())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!((m.get(i, j) - want).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn geometry_ignores_translation(seed in 0u64..10_000, dx in -40.0f64..40.0, dy in -40.0f64..40.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = random_coords(&mut rng, 50.0, 200.0);
        let moved: Vec<_> = coords.iter().map(|&(x, y)| (x + dx, y + dy)).collect();
        let a = placement("a", &coords, (256, 256)).geometry_vector();
        let b = placement("a", &moved, (256, 256)).geometry_vector();
        for (u, v) in a.distances().iter().zip(b.distances()) {
            prop_assert!((u - v).abs() <= 1e-9);
        }
    }

    #[test]
    fn uniform_rescale_scales_shape(seed in 0u64..10_000, target in 1usize..1024) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = placement("a", &random_coords(&mut rng, 0.0, 255.0), (256, 256));
        let c = target as f64 / 256.0;
        let r = p.rescale((target, target)).unwrap();
        for (u, v) in p.geometry_vector().distances().iter().zip(r.geometry_vector().distances()) {
            prop_assert!((v - c * u).abs() <= 1e-12 * (c * u).max(1.0));
        }
    }

    #[test]
    fn geometry_is_a_metric(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<_> = (0..3)
            .map(|_| placement("a", &random_coords(&mut rng, 0.0, 255.0), (256, 256)).geometry_vector())
            .collect();
        let d = |i: usize, j: usize| geometry_dissimilarity(&v[i], &v[j]).unwrap();
        prop_assert_eq!(d(0, 1), d(1, 0));
        prop_assert_eq!(d(0, 0), 0.0);
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9);
    }

    #[test]
    fn semantic_is_a_metric(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r: Vec<_> = (0..3).map(|i| rating(&mut rng, &format!("r{i}"))).collect();
        let d = |i: usize, j: usize| semantic_dissimilarity(&r[i], &r[j]).unwrap();
        prop_assert_eq!(d(0, 1), d(1, 0));
        prop_assert_eq!(d(2, 2), 0.0);
        prop_assert!(d(0, 1) > 0.0);
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9);
    }

    #[test]
    fn jet_similarity_is_symmetric_and_bounded(
        a in prop::collection::vec(0.0f64..1e3, 18),
        b in prop::collection::vec(0.0f64..1e3, 18),
    ) {
        let (a, b) = (JetVector::new(a).unwrap(), JetVector::new(b).unwrap());
        prop_assume!(!a.is_zero() && !b.is_zero());
        let s = jet_similarity(&a, &b).unwrap();
        prop_assert_eq!(s, jet_similarity(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&s));
    }
}
