//! Averaged semantic rating vectors.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::similarity::{euclidean, MatrixKind, PairMatrix};

/// Lowest and highest point of the rating scale.
pub const SCALE: (f64, f64) = (1.0, 5.0);

/// Adjective columns in their conventional order; the fear-excluded
/// studies use the first five.
pub const ADJECTIVES: [&str; 6] = [
    "happiness",
    "sadness",
    "surprise",
    "anger",
    "disgust",
    "fear",
];

/// Per-adjective ratings of one image, averaged over observers.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingVector {
    image_id: String,
    adjectives: Vec<String>,
    values: Vec<f64>,
}

impl RatingVector {
    pub fn new(
        image_id: impl Into<String>,
        adjectives: Vec<String>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let image_id = image_id.into();
        let err = |reason: String| Error::Rating {
            image_id: image_id.clone(),
            reason,
        };
        if !(5..=6).contains(&adjectives.len()) {
            return Err(err(format!(
                "expected 5 or 6 adjectives, found {}",
                adjectives.len()
            )));
        }
        if values.len() != adjectives.len() {
            return Err(err(format!(
                "{} adjectives but {} values",
                adjectives.len(),
                values.len()
            )));
        }
        for (a, v) in adjectives.iter().zip(&values) {
            if !(v.is_finite() && *v >= SCALE.0 && *v <= SCALE.1) {
                return Err(err(format!("{a} = {v} is outside [1, 5]")));
            }
        }
        Ok(Self {
            image_id,
            adjectives,
            values,
        })
    }

    pub fn image_id(&self) -> &str {
        &self.image_id
    }

    pub fn adjectives(&self) -> &[String] {
        &self.adjectives
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Drops one adjective column, e.g. `"fear"`. Returns the vector
    /// unchanged when the column is absent.
    pub fn without(&self, adjective: &str) -> Result<Self> {
        match self.adjectives.iter().position(|a| a == adjective) {
            None => Ok(self.clone()),
            Some(i) => {
                let mut adjectives = self.adjectives.clone();
                let mut values = self.values.clone();
                adjectives.remove(i);
                values.remove(i);
                Self::new(self.image_id.clone(), adjectives, values)
            }
        }
    }
}

/// Euclidean distance between two rating vectors over the same adjectives.
pub fn semantic_dissimilarity(a: &RatingVector, b: &RatingVector) -> Result<f64> {
    if a.adjectives != b.adjectives {
        return Err(Error::AdjectiveMismatch);
    }
    euclidean(&a.values, &b.values)
}

pub fn semantic_matrix(items: &[RatingVector]) -> Result<PairMatrix> {
    let ids = items.iter().map(|r| r.image_id.clone()).collect();
    PairMatrix::from_fn(ids, MatrixKind::Dissimilarity, |i, j| {
        semantic_dissimilarity(&items[i], &items[j])
    })
}
