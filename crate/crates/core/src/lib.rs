//! Pure numerical core for coding grayscale face images with a Gabor
//! wavelet bank sampled on a fiducial grid, comparing the resulting codes,
//! and relating them to human rating data.
//!
//! The crate is `no_std` and only needs `alloc`. All file formats, image
//! decoding and the study pipeline live in the companion `gaborface` crate.
//!
//! Modules:
//!
//! - [`gabor`]: filter bank, kernel evaluation, per-point responses and jets.
//! - [`grid`]: the 34-node fiducial grid and the nose-relative shape vector.
//! - [`similarity`]: jet / image similarity, geometry dissimilarity, pair matrices.
//! - [`ratings`]: averaged semantic rating vectors.
//! - [`rank`]: midranks, Spearman correlation and its significance.
//! - [`nmds`]: classical initialization, PAVA, stress-1, SMACOF embedding,
//!   Procrustes alignment.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod linalg;
mod special;

pub mod gabor;
pub mod grid;
pub mod nmds;
pub mod rank;
pub mod ratings;
pub mod similarity;

pub use error::{Error, Result};
pub use gabor::{FilterBank, FilterSpec, ImageRaster, JetVector, Point};
pub use grid::{GridNode, GridPlacement, GridTemplate, ShapeVector};
pub use nmds::{Configuration, Disparities, EmbedOptions, ProcrustesOptions};
pub use rank::{CorrelationResult, PairedSeries, SignificanceMethod};
pub use ratings::RatingVector;
pub use similarity::{CodedImage, MatrixKind, PairMatrix};

/// Distribution functions exposed for callers that want to report
/// significance themselves.
pub mod stats {
    pub use crate::special::{regularized_incomplete_beta, student_t_two_sided_p};
}
