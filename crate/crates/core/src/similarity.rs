//! Image-pair similarity from jets, geometry dissimilarity, and the
//! symmetric pair matrices built from either.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gabor::{compute_jet, FilterBank, Fnv, ImageRaster, JetVector};
use crate::grid::{GridPlacement, ShapeVector};

/// Normalized dot product of two jets. Lies in `[0, 1]` since amplitudes
/// are non-negative.
pub fn jet_similarity(a: &JetVector, b: &JetVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.is_zero() || b.is_zero() {
        return Err(Error::DegenerateJet);
    }
    let (a, b) = (a.amplitudes(), b.amplitudes());
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let saa: f64 = a.iter().map(|x| x * x).sum();
    let sbb: f64 = b.iter().map(|x| x * x).sum();
    Ok((dot / libm::sqrt(saa * sbb)).clamp(0.0, 1.0))
}

/// An image coded as one jet per grid node, in template order.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedImage {
    pub image_id: String,
    pub jets: Vec<JetVector>,
    /// Hash of the filter bank and the node-name order.
    pub fingerprint: u64,
}

impl CodedImage {
    /// Computes the jet at every node of `grid` (which must already be in
    /// the image's coordinate frame).
    pub fn encode(image: &ImageRaster, grid: &GridPlacement, bank: &FilterBank) -> Result<Self> {
        let jets = grid
            .points()
            .map(|p| compute_jet(image, bank, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            image_id: String::from(grid.image_id()),
            jets,
            fingerprint: coding_fingerprint(bank, grid.nodes().iter().map(|n| n.name.as_str())),
        })
    }

    /// Number of node pairs whose jets are all-zero on either side.
    pub fn degenerate_pairs(&self, other: &CodedImage) -> usize {
        self.jets
            .iter()
            .zip(&other.jets)
            .filter(|(a, b)| a.is_zero() || b.is_zero())
            .count()
    }
}

/// Fingerprint combining the bank parameters with the node-name order.
pub fn coding_fingerprint<'a>(bank: &FilterBank, node_names: impl Iterator<Item = &'a str>) -> u64 {
    let mut h = Fnv::new();
    h.write_u64(bank.fingerprint());
    for name in node_names {
        h.write_bytes(name.as_bytes());
    }
    h.finish()
}

/// Mean over corresponding nodes of the per-node jet similarity.
///
/// A node whose jet is all-zero on either side contributes 0; use
/// [`CodedImage::degenerate_pairs`] to detect and report such nodes.
pub fn gabor_image_similarity(a: &CodedImage, b: &CodedImage) -> Result<f64> {
    if a.fingerprint != b.fingerprint || a.jets.len() != b.jets.len() || a.jets.is_empty() {
        return Err(Error::IncompatibleCoding {
            a: a.image_id.clone(),
            b: b.image_id.clone(),
        });
    }
    let mut total = 0.0;
    for (ja, jb) in a.jets.iter().zip(&b.jets) {
        total += match jet_similarity(ja, jb) {
            Ok(s) => s,
            Err(Error::DegenerateJet) => 0.0,
            Err(e) => return Err(e),
        };
    }
    Ok(total / a.jets.len() as f64)
}

/// Euclidean distance between two shape vectors.
pub fn geometry_dissimilarity(a: &ShapeVector, b: &ShapeVector) -> Result<f64> {
    euclidean(a.distances(), b.distances())
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let ss: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(libm::sqrt(ss))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Similarity,
    Dissimilarity,
}

impl MatrixKind {
    pub fn diagonal(self) -> f64 {
        match self {
            MatrixKind::Similarity => 1.0,
            MatrixKind::Dissimilarity => 0.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::Similarity => "similarity",
            MatrixKind::Dissimilarity => "dissimilarity",
        }
    }
}

/// A symmetric `n × n` matrix of pairwise values over labelled items.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMatrix {
    item_ids: Vec<String>,
    values: Vec<f64>,
    kind: MatrixKind,
}

impl PairMatrix {
    /// Validates and wraps a row-major matrix.
    pub fn new(item_ids: Vec<String>, values: Vec<f64>, kind: MatrixKind) -> Result<Self> {
        let n = item_ids.len();
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        for (i, id) in item_ids.iter().enumerate() {
            if item_ids[..i].contains(id) {
                return Err(Error::Matrix(format!("duplicate item id `{id}`")));
            }
        }
        for i in 0..n {
            if values[i * n + i] != kind.diagonal() {
                return Err(Error::Matrix(format!(
                    "diagonal entry {i} is {}, expected {}",
                    values[i * n + i],
                    kind.diagonal()
                )));
            }
            for j in 0..i {
                let v = values[i * n + j];
                if !v.is_finite() {
                    return Err(Error::Matrix(format!("entry ({i}, {j}) is not finite")));
                }
                if v != values[j * n + i] {
                    return Err(Error::Matrix(format!("entry ({i}, {j}) breaks symmetry")));
                }
            }
        }
        Ok(Self {
            item_ids,
            values,
            kind,
        })
    }

    /// Fills the upper triangle with `f(i, j)` and mirrors it. Errors are
    /// wrapped with the offending pair's ids.
    pub fn from_fn(
        item_ids: Vec<String>,
        kind: MatrixKind,
        mut f: impl FnMut(usize, usize) -> Result<f64>,
    ) -> Result<Self> {
        let n = item_ids.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = kind.diagonal();
            for j in i + 1..n {
                let v = f(i, j).map_err(|e| Error::Pair {
                    a: item_ids[i].clone(),
                    b: item_ids[j].clone(),
                    source: Box::new(e),
                })?;
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Ok(Self {
            item_ids,
            values,
            kind,
        })
    }

    pub fn len(&self) -> usize {
        self.item_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.item_ids.is_empty()
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.len().max(1))
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.item_ids.iter().position(|x| x == id)
    }

    /// `1 - s` for a similarity matrix; a dissimilarity matrix is returned
    /// unchanged.
    pub fn to_dissimilarity(&self) -> PairMatrix {
        match self.kind {
            MatrixKind::Dissimilarity => self.clone(),
            MatrixKind::Similarity => PairMatrix {
                item_ids: self.item_ids.clone(),
                values: self.values.iter().map(|s| 1.0 - s).collect(),
                kind: MatrixKind::Dissimilarity,
            },
        }
    }

    /// Restricts to the listed items, in the listed order.
    pub fn subset(&self, ids: &[String]) -> Result<PairMatrix> {
        let idx = ids
            .iter()
            .map(|id| {
                self.index_of(id)
                    .ok_or_else(|| Error::Matrix(format!("unknown item id `{id}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let n = idx.len();
        let mut values = Vec::with_capacity(n * n);
        for &i in &idx {
            for &j in &idx {
                values.push(self.get(i, j));
            }
        }
        PairMatrix::new(ids.to_vec(), values, self.kind)
    }
}

/// Gabor similarity matrix over coded images.
pub fn gabor_matrix(items: &[CodedImage]) -> Result<PairMatrix> {
    let ids = items.iter().map(|c| c.image_id.clone()).collect();
    PairMatrix::from_fn(ids, MatrixKind::Similarity, |i, j| {
        gabor_image_similarity(&items[i], &items[j])
    })
}

/// Geometry dissimilarity matrix over `(image_id, shape)` items.
pub fn geometry_matrix(items: &[(String, ShapeVector)]) -> Result<PairMatrix> {
    let ids = items.iter().map(|(id, _)| id.clone()).collect();
    PairMatrix::from_fn(ids, MatrixKind::Dissimilarity, |i, j| {
        geometry_dissimilarity(&items[i].1, &items[j].1)
    })
}
