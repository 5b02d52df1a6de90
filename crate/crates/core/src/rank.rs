//! Spearman rank correlation between model and semantic pair values.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::similarity::{MatrixKind, PairMatrix};
use crate::special::student_t_two_sided_p;

/// Default seed for permutation tests.
pub const DEFAULT_SEED: u64 = 0x5EED_1998;

/// Midranks (1-based); tied values share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(invalid("values", "at least one value is required"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("values", "all values must be finite"));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    Ok(ranks)
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Pearson correlation, `None` when either series is constant.
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.is_empty() {
        return None;
    }
    pearson(x, y)
}

/// Two equal-length series, usually the off-diagonal pairs of two matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSeries {
    x: Vec<f64>,
    y: Vec<f64>,
    pair_labels: Vec<(String, String)>,
}

impl PairedSeries {
    pub fn new(x: Vec<f64>, y: Vec<f64>, pair_labels: Vec<(String, String)>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        if !pair_labels.is_empty() && pair_labels.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: pair_labels.len(),
            });
        }
        if x.len() < 3 {
            return Err(invalid("series", "at least 3 pairs are required"));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(invalid("series", "all values must be finite"));
        }
        Ok(Self { x, y, pair_labels })
    }

    /// Unlabelled series.
    pub fn from_values(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::new(x, y, Vec::new())
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn pair_labels(&self) -> &[(String, String)] {
        &self.pair_labels
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Copy with the x series negated.
    pub fn negate_x(&self) -> Self {
        Self {
            x: self.x.iter().map(|v| -v).collect(),
            y: self.y.clone(),
            pair_labels: self.pair_labels.clone(),
        }
    }
}

/// Pearson correlation of the midranks.
pub fn spearman_rho(s: &PairedSeries) -> Result<f64> {
    let rx = average_ranks(&s.x)?;
    let ry = average_ranks(&s.y)?;
    pearson(&rx, &ry).ok_or(Error::UndefinedCorrelation("a series is constant"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignificanceMethod {
    /// `t = ρ √((n-2)/(1-ρ²))` against Student's t with `n - 2` degrees of freedom.
    TApproximation,
    /// Monte-Carlo permutation of one series' ranks.
    Permutation { permutations: u32, seed: u64 },
}

impl SignificanceMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SignificanceMethod::TApproximation => "t_approximation",
            SignificanceMethod::Permutation { .. } => "permutation",
        }
    }
}

/// A two-sided p-value; `exact_extreme` marks `|ρ| = 1` under the
/// t-approximation, where `p` is reported as 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValue {
    pub p: f64,
    pub exact_extreme: bool,
}

/// Two-sided p-value of `rho` under the t-approximation.
pub fn t_approximation_p(rho: f64, n: usize) -> Result<PValue> {
    if n < 3 {
        return Err(invalid("n", "at least 3 pairs are required"));
    }
    if !rho.is_finite() || rho.abs() > 1.0 {
        return Err(invalid("rho", "must lie in [-1, 1]"));
    }
    if rho.abs() == 1.0 {
        return Ok(PValue {
            p: 0.0,
            exact_extreme: true,
        });
    }
    let df = (n - 2) as f64;
    let t = rho * libm::sqrt(df / (1.0 - rho * rho));
    Ok(PValue {
        p: student_t_two_sided_p(t, df),
        exact_extreme: false,
    })
}

/// Monte-Carlo permutation p-value `(1 + #{|ρ*| ≥ |ρ|}) / (1 + permutations)`.
///
/// Permutation `i` shuffles with its own ChaCha stream `i`, so the result
/// does not depend on evaluation order.
pub fn permutation_p(s: &PairedSeries, permutations: u32, seed: u64) -> Result<PValue> {
    if permutations == 0 {
        return Err(invalid("permutations", "must be positive"));
    }
    let rx = average_ranks(&s.x)?;
    let ry = average_ranks(&s.y)?;
    let observed = pearson(&rx, &ry)
        .ok_or(Error::UndefinedCorrelation("a series is constant"))?
        .abs();
    // Guard against rounding making an equally extreme permutation look smaller.
    let threshold = observed - 1e-12;
    let mut shuffled = ry.clone();
    let mut hits: u64 = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..permutations {
        rng.set_stream(u64::from(i));
        rng.set_word_pos(0);
        shuffled.copy_from_slice(&ry);
        shuffled.shuffle(&mut rng);
        let r = pearson(&rx, &shuffled).unwrap_or(0.0);
        if r.abs() >= threshold {
            hits += 1;
        }
    }
    Ok(PValue {
        p: (hits + 1) as f64 / (f64::from(permutations) + 1.0),
        exact_extreme: false,
    })
}

pub fn significance(s: &PairedSeries, rho: f64, method: SignificanceMethod) -> Result<PValue> {
    match method {
        SignificanceMethod::TApproximation => t_approximation_p(rho, s.len()),
        SignificanceMethod::Permutation { permutations, seed } => {
            permutation_p(s, permutations, seed)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub rho: f64,
    /// Number of pairs in the series.
    pub n: usize,
    pub p_two_sided: f64,
    pub method: SignificanceMethod,
    pub exact_extreme: bool,
}

/// The off-diagonal pairs of both matrices in canonical order: ids sorted
/// lexicographically, pairs `(a, b)` with `a < b` in lexicographic order.
/// The model series is negated when it is a similarity so that agreement
/// with the semantic dissimilarities gives a positive coefficient.
pub fn paired_upper_triangles(model: &PairMatrix, semantic: &PairMatrix) -> Result<PairedSeries> {
    let mut only_in_model: Vec<String> = model
        .item_ids()
        .iter()
        .filter(|id| semantic.index_of(id).is_none())
        .cloned()
        .collect();
    let mut only_in_semantic: Vec<String> = semantic
        .item_ids()
        .iter()
        .filter(|id| model.index_of(id).is_none())
        .cloned()
        .collect();
    if !only_in_model.is_empty() || !only_in_semantic.is_empty() {
        only_in_model.sort();
        only_in_semantic.sort();
        return Err(Error::ItemMismatch {
            only_in_model,
            only_in_semantic,
        });
    }
    let mut ids: Vec<&String> = model.item_ids().iter().collect();
    ids.sort();
    let sign = match model.kind() {
        MatrixKind::Similarity => -1.0,
        MatrixKind::Dissimilarity => 1.0,
    };
    let n = ids.len();
    let mut x = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    let mut y = Vec::with_capacity(x.capacity());
    let mut labels = Vec::with_capacity(x.capacity());
    for i in 0..n {
        let (mi, si) = (
            model.index_of(ids[i]).unwrap(),
            semantic.index_of(ids[i]).unwrap(),
        );
        for j in i + 1..n {
            let (mj, sj) = (
                model.index_of(ids[j]).unwrap(),
                semantic.index_of(ids[j]).unwrap(),
            );
            x.push(sign * model.get(mi, mj));
            y.push(semantic.get(si, sj));
            labels.push((ids[i].clone(), ids[j].clone()));
        }
    }
    PairedSeries::new(x, y, labels)
}

/// Spearman correlation between a model matrix and a semantic
/// dissimilarity matrix over the same items, with its two-sided p-value.
pub fn correlate_model_with_ratings(
    model: &PairMatrix,
    semantic: &PairMatrix,
    method: SignificanceMethod,
) -> Result<CorrelationResult> {
    if model.len() < 3 {
        return Err(invalid("items", "at least 3 items are required"));
    }
    let series = paired_upper_triangles(model, semantic)?;
    let rho = spearman_rho(&series)?;
    let p = significance(&series, rho, method)?;
    Ok(CorrelationResult {
        rho,
        n: series.len(),
        p_two_sided: p.p,
        method,
        exact_extreme: p.exact_extreme,
    })
}
