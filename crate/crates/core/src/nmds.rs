//! Non-metric multidimensional scaling.
//!
//! Kruskal's stress-1 with least-squares monotone disparities (PAVA, primary
//! treatment of ties), minimised by SMACOF majorization from a Torgerson
//! start. Configurations can be compared after Procrustes alignment.
//!
//! Pairs are always enumerated in upper-triangle row-major order:
//! `(0,1), (0,2), …, (0,n-1), (1,2), …`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::linalg::{determinant, svd_square, symmetric_eigen};
use crate::rank::{average_ranks, pearson_correlation, DEFAULT_SEED};
use crate::similarity::{MatrixKind, PairMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbedOptions {
    pub max_iterations: usize,
    /// Stop once stress-1 improves by less than this between iterations.
    pub tolerance: f64,
    /// Seeds the random columns used when the Torgerson start is rank
    /// deficient.
    pub seed: u64,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-6,
            seed: DEFAULT_SEED,
        }
    }
}

/// `n` labelled points in `d` dimensions, centred at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    item_ids: Vec<String>,
    dims: usize,
    coordinates: Vec<f64>,
    pub stress: f64,
    pub rsq: f64,
    pub iterations: usize,
    /// Stress-1 before each update, followed by the final value.
    pub stress_history: Vec<f64>,
    /// Set when the input carried no order information (all dissimilarities
    /// equal) and the start configuration was returned unchanged.
    pub degenerate: bool,
    /// Number of columns filled with seeded random values because the
    /// Torgerson matrix had too few positive eigenvalues.
    pub random_columns: usize,
}

impl Configuration {
    /// Wraps row-major coordinates (`n × dims`), translating them so the
    /// centroid is the origin.
    pub fn new(item_ids: Vec<String>, dims: usize, mut coordinates: Vec<f64>) -> Result<Self> {
        let n = item_ids.len();
        if dims == 0 {
            return Err(invalid("d", "must be at least 1"));
        }
        if coordinates.len() != n * dims {
            return Err(Error::DimensionMismatch {
                expected: n * dims,
                found: coordinates.len(),
            });
        }
        if coordinates.iter().any(|c| !c.is_finite()) {
            return Err(invalid("coordinates", "must be finite"));
        }
        center(&mut coordinates, dims);
        Ok(Self {
            item_ids,
            dims,
            coordinates,
            stress: 0.0,
            rsq: 1.0,
            iterations: 0,
            stress_history: Vec::new(),
            degenerate: false,
            random_columns: 0,
        })
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.item_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.item_ids.is_empty()
    }

    /// Row-major `n × d` coordinates.
    pub fn coordinates(&self) -> &[f64] {
        &self.coordinates
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coordinates[i * self.dims..(i + 1) * self.dims]
    }

    /// Euclidean distances over the canonical pairs.
    pub fn pair_distances(&self) -> Vec<f64> {
        pair_distances(&self.coordinates, self.len(), self.dims)
    }
}

fn center(coords: &mut [f64], dims: usize) {
    let n = coords.len() / dims;
    if n == 0 {
        return;
    }
    for c in 0..dims {
        let mean = (0..n).map(|i| coords[i * dims + c]).sum::<f64>() / n as f64;
        for i in 0..n {
            coords[i * dims + c] -= mean;
        }
    }
}

fn pair_distances(coords: &[f64], n: usize, dims: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let ss: f64 = (0..dims)
                .map(|c| {
                    let t = coords[i * dims + c] - coords[j * dims + c];
                    t * t
                })
                .sum();
            out.push(libm::sqrt(ss));
        }
    }
    out
}

fn upper_triangle(m: &PairMatrix) -> Vec<f64> {
    let n = m.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(m.get(i, j));
        }
    }
    out
}

fn check_dissimilarity(m: &PairMatrix, dims: usize) -> Result<()> {
    if m.kind() != MatrixKind::Dissimilarity {
        return Err(invalid("matrix", "a dissimilarity matrix is required"));
    }
    if dims == 0 {
        return Err(invalid("d", "must be at least 1"));
    }
    if m.len() < dims + 1 {
        return Err(invalid("d", "needs at least d + 1 items"));
    }
    Ok(())
}

/// Torgerson start: top-`d` eigenvectors of the double-centred squared
/// dissimilarities, scaled by the root eigenvalues.
///
/// Each column's sign is fixed so its largest-magnitude entry is positive.
/// Columns without a positive eigenvalue are filled with seeded uniform
/// values and counted in [`Configuration::random_columns`].
pub fn classical_init(dissimilarity: &PairMatrix, dims: usize, seed: u64) -> Result<Configuration> {
    check_dissimilarity(dissimilarity, dims)?;
    let n = dissimilarity.len();
    let ids = dissimilarity.item_ids().to_vec();
    if dissimilarity.values().iter().all(|&v| v == 0.0) {
        return Configuration::new(ids, dims, vec![0.0; n * dims]);
    }

    let sq: Vec<f64> = dissimilarity.values().iter().map(|v| v * v).collect();
    let row_mean: Vec<f64> = sq
        .chunks(n)
        .map(|r| r.iter().sum::<f64>() / n as f64)
        .collect();
    let grand = row_mean.iter().sum::<f64>() / n as f64;
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            b[i * n + j] = -0.5 * (sq[i * n + j] - row_mean[i] - row_mean[j] + grand);
        }
    }
    let (values, vectors) = symmetric_eigen(&b, n);
    let top = values[0].max(0.0);

    let mut coords = vec![0.0; n * dims];
    let mut random_columns = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread = libm::sqrt(top.max(f64::MIN_POSITIVE) / n as f64);
    for c in 0..dims {
        let lambda = values.get(c).copied().unwrap_or(0.0);
        if lambda > 1e-10 * top && lambda > 0.0 {
            let root = libm::sqrt(lambda);
            let column: Vec<f64> = (0..n).map(|i| vectors[i * n + c]).collect();
            let pivot = column
                .iter()
                .copied()
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap_or(0.0);
            let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
            for i in 0..n {
                coords[i * dims + c] = sign * root * column[i];
            }
        } else {
            random_columns += 1;
            for i in 0..n {
                coords[i * dims + c] = spread * rng.gen_range(-1.0..1.0);
            }
        }
    }
    let mut config = Configuration::new(ids, dims, coords)?;
    config.random_columns = random_columns;
    let dissim = upper_triangle(dissimilarity);
    let (stress, rsq, _) = diagnostics(&dissim, &config.pair_distances());
    config.stress = stress;
    config.rsq = rsq;
    Ok(config)
}

/// Least-squares monotone fits to the pair distances.
#[derive(Debug, Clone, PartialEq)]
pub struct Disparities {
    pub values: Vec<f64>,
}

/// Pair order by ascending dissimilarity; tied dissimilarities are ordered
/// by ascending distance, which releases them from any mutual constraint.
pub fn dissimilarity_order(dissimilarities: &[f64], distances: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dissimilarities.len()).collect();
    order.sort_by(|&a, &b| {
        dissimilarities[a]
            .total_cmp(&dissimilarities[b])
            .then(distances[a].total_cmp(&distances[b]))
            .then(a.cmp(&b))
    });
    order
}

/// Pool-adjacent-violators: the non-decreasing (along `order`) sequence
/// closest in least squares to `distances`. Output is indexed like
/// `distances`.
pub fn isotonic_fit(distances: &[f64], order: &[usize]) -> Result<Disparities> {
    let n = distances.len();
    if order.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: order.len(),
        });
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return Err(invalid("order", "not a permutation"));
        }
        seen[i] = true;
    }

    // Blocks of (sum, count); merged while the last two are out of order.
    let mut sums: Vec<f64> = Vec::with_capacity(n);
    let mut counts: Vec<usize> = Vec::with_capacity(n);
    for &i in order {
        sums.push(distances[i]);
        counts.push(1);
        while sums.len() > 1 {
            let k = sums.len() - 1;
            // mean[k-1] > mean[k], compared without division
            if sums[k - 1] * counts[k] as f64 > sums[k] * counts[k - 1] as f64 {
                let (s, c) = (sums.pop().unwrap(), counts.pop().unwrap());
                sums[k - 1] += s;
                counts[k - 1] += c;
            } else {
                break;
            }
        }
    }
    let mut values = vec![0.0; n];
    let mut pos = 0;
    for (s, c) in sums.iter().zip(&counts) {
        let mean = s / *c as f64;
        for &i in &order[pos..pos + c] {
            values[i] = mean;
        }
        pos += c;
    }
    Ok(Disparities { values })
}

/// Kruskal's stress-1: `sqrt(Σ(d - d̂)² / Σ d²)`.
pub fn stress1(distances: &[f64], disparities: &Disparities) -> Result<f64> {
    if distances.len() != disparities.values.len() {
        return Err(Error::DimensionMismatch {
            expected: distances.len(),
            found: disparities.values.len(),
        });
    }
    let denom: f64 = distances.iter().map(|d| d * d).sum();
    if denom == 0.0 {
        return Err(Error::DegenerateConfiguration("all distances are zero"));
    }
    let num: f64 = distances
        .iter()
        .zip(&disparities.values)
        .map(|(d, h)| (d - h) * (d - h))
        .sum();
    Ok(libm::sqrt(num / denom))
}

/// Squared Pearson correlation between distances and disparities; 1 when
/// the fit is exact, 0 when either side is constant.
pub fn rsq(distances: &[f64], disparities: &Disparities) -> f64 {
    if distances == disparities.values.as_slice() {
        return 1.0;
    }
    match pearson_correlation(distances, &disparities.values) {
        Some(r) => (r * r).clamp(0.0, 1.0),
        None => 0.0,
    }
}

/// (stress, rsq, disparities) of a configuration's distances.
fn diagnostics(dissim: &[f64], distances: &[f64]) -> (f64, f64, Disparities) {
    let order = dissimilarity_order(dissim, distances);
    let disp = isotonic_fit(distances, &order).expect("order is a permutation");
    let stress = stress1(distances, &disp).unwrap_or(0.0);
    let r = if stress == 0.0 {
        1.0
    } else {
        rsq(distances, &disp)
    };
    (stress, r, disp)
}

/// Non-metric embedding of `dissimilarity` into `dims` dimensions.
///
/// The start is the Torgerson solution of the *ranks* of the
/// dissimilarities, so the whole fit depends only on their order: any
/// strictly increasing transform of the input gives the same output.
///
/// Each iteration rescales the configuration to its optimal size for the
/// normalized disparities `√m · d̂/‖d̂‖` (m = number of pairs) and applies
/// one Guttman transform. With that normalization stress-1 cannot
/// increase from one iteration to the next.
pub fn embed(
    dissimilarity: &PairMatrix,
    dims: usize,
    options: &EmbedOptions,
) -> Result<Configuration> {
    check_dissimilarity(dissimilarity, dims)?;
    if options.tolerance.is_nan() || options.tolerance < 0.0 {
        return Err(invalid("tolerance", "must be non-negative"));
    }
    let n = dissimilarity.len();
    let dissim = upper_triangle(dissimilarity);
    let m = dissim.len();

    let ranks = average_ranks(&dissim)?;
    let mut k = 0;
    let rank_matrix = PairMatrix::from_fn(
        dissimilarity.item_ids().to_vec(),
        MatrixKind::Dissimilarity,
        |_, _| {
            k += 1;
            Ok(ranks[k - 1])
        },
    )?;
    let mut config = classical_init(&rank_matrix, dims, options.seed)?;

    if dissim.iter().all(|&v| v == dissim[0]) {
        let (stress, rsq, _) = diagnostics(&dissim, &config.pair_distances());
        config.stress = stress;
        config.rsq = rsq;
        config.degenerate = true;
        return Ok(config);
    }

    let eta = libm::sqrt(m as f64);
    let mut x = config.coordinates.clone();
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let dist = pair_distances(&x, n, dims);
        let ss_dist: f64 = dist.iter().map(|d| d * d).sum();
        if ss_dist == 0.0 {
            return Err(Error::DegenerateConfiguration("all points coincide"));
        }
        let order = dissimilarity_order(&dissim, &dist);
        let fit = isotonic_fit(&dist, &order)?;
        let stress = stress1(&dist, &fit)?;
        let converged = match history.last() {
            Some(&prev) => prev - stress < options.tolerance,
            None => false,
        };
        history.push(stress);
        if converged || stress == 0.0 || iterations >= options.max_iterations {
            break;
        }

        let fit_norm = libm::sqrt(fit.values.iter().map(|v| v * v).sum::<f64>());
        let scale = eta * fit_norm / ss_dist;
        for v in x.iter_mut() {
            *v *= scale;
        }
        let target: Vec<f64> = fit.values.iter().map(|v| eta * v / fit_norm).collect();
        let dist: Vec<f64> = dist.iter().map(|d| d * scale).collect();
        x = guttman_transform(&x, n, dims, &dist, &target);
        iterations += 1;
    }

    // Normalise the output scale the same way.
    let dist = pair_distances(&x, n, dims);
    let (stress, rsq, fit) = diagnostics(&dissim, &dist);
    let fit_norm = libm::sqrt(fit.values.iter().map(|v| v * v).sum::<f64>());
    let ss_dist: f64 = dist.iter().map(|d| d * d).sum();
    if fit_norm > 0.0 && ss_dist > 0.0 {
        let scale = eta * fit_norm / ss_dist;
        x.iter_mut().for_each(|v| *v *= scale);
    }
    let mut out = Configuration::new(dissimilarity.item_ids().to_vec(), dims, x)?;
    out.stress = stress;
    out.rsq = rsq;
    out.iterations = iterations;
    out.stress_history = history;
    out.random_columns = config.random_columns;
    Ok(out)
}

/// `X⁺ = (1/n) B(X) X` with `B_ij = -t_ij / d_ij` off the diagonal.
fn guttman_transform(x: &[f64], n: usize, dims: usize, dist: &[f64], target: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * dims];
    let mut p = 0;
    for i in 0..n {
        for j in i + 1..n {
            let b = if dist[p] > 0.0 {
                target[p] / dist[p]
            } else {
                0.0
            };
            p += 1;
            for c in 0..dims {
                let diff = x[i * dims + c] - x[j * dims + c];
                out[i * dims + c] += b * diff;
                out[j * dims + c] -= b * diff;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= n as f64;
    }
    out
}

/// One row of a stress-by-dimension scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionFit {
    pub dims: usize,
    pub stress: f64,
    pub rsq: f64,
}

/// Embeds at every dimension `1..=max_dims` (capped at `n - 1`).
pub fn scan_dimensions(
    dissimilarity: &PairMatrix,
    max_dims: usize,
    options: &EmbedOptions,
) -> Result<Vec<DimensionFit>> {
    let cap = max_dims.min(dissimilarity.len().saturating_sub(1));
    (1..=cap)
        .map(|d| {
            embed(dissimilarity, d, options).map(|c| DimensionFit {
                dims: d,
                stress: c.stress,
                rsq: c.rsq,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProcrustesOptions {
    pub allow_reflection: bool,
    pub allow_scaling: bool,
}

impl Default for ProcrustesOptions {
    fn default() -> Self {
        Self {
            allow_reflection: true,
            allow_scaling: false,
        }
    }
}

/// Translates, rotates (and optionally reflects and scales) `source` onto
/// `target`, minimising the summed squared point distances. Returns the
/// moved source and the root-mean-square residual distance.
pub fn procrustes_align(
    source: &Configuration,
    target: &Configuration,
    options: ProcrustesOptions,
) -> Result<(Configuration, f64)> {
    if source.item_ids != target.item_ids {
        return Err(invalid(
            "items",
            "configurations must list the same items in the same order",
        ));
    }
    if source.dims != target.dims {
        return Err(Error::DimensionMismatch {
            expected: target.dims,
            found: source.dims,
        });
    }
    let (n, d) = (source.len(), source.dims);
    if distinct_points(source) < 2 || distinct_points(target) < 2 {
        return Err(Error::Underdetermined);
    }

    let mut a = source.coordinates.clone();
    let mut b = target.coordinates.clone();
    let target_centroid: Vec<f64> = (0..d)
        .map(|c| (0..n).map(|i| b[i * d + c]).sum::<f64>() / n as f64)
        .collect();
    center(&mut a, d);
    center(&mut b, d);

    let mut h = vec![0.0; d * d];
    for i in 0..n {
        for r in 0..d {
            for c in 0..d {
                h[r * d + c] += a[i * d + r] * b[i * d + c];
            }
        }
    }
    let (mut u, s, v) = svd_square(&h, d);
    let mut trace: f64 = s.iter().sum();
    if !options.allow_reflection {
        let r = rotation_from(&u, &v, d);
        if determinant(&r, d) < 0.0 {
            for k in 0..d {
                u[k * d + d - 1] = -u[k * d + d - 1];
            }
            trace -= 2.0 * s[d - 1];
        }
    }
    let rot = rotation_from(&u, &v, d);
    let scale = if options.allow_scaling {
        let ss: f64 = a.iter().map(|x| x * x).sum();
        trace / ss
    } else {
        1.0
    };

    let mut moved = vec![0.0; n * d];
    let mut sq = 0.0;
    for i in 0..n {
        for c in 0..d {
            let val: f64 = (0..d).map(|k| a[i * d + k] * rot[k * d + c]).sum::<f64>() * scale
                + target_centroid[c];
            moved[i * d + c] = val;
            let diff = val - target.coordinates[i * d + c];
            sq += diff * diff;
        }
    }
    let residual = libm::sqrt(sq / n as f64);
    let mut aligned = source.clone();
    // Keep the target's centroid rather than re-centring.
    aligned.coordinates = moved;
    Ok((aligned, residual))
}

fn rotation_from(u: &[f64], v: &[f64], d: usize) -> Vec<f64> {
    let mut r = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            r[i * d + j] = (0..d).map(|k| u[i * d + k] * v[j * d + k]).sum();
        }
    }
    r
}

fn distinct_points(c: &Configuration) -> usize {
    let mut count = 0;
    for i in 0..c.len() {
        if (0..i).all(|j| c.point(i) != c.point(j)) {
            count += 1;
            if count >= 2 {
                break;
            }
        }
    }
    count
}
