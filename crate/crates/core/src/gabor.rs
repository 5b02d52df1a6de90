//! Gabor filter bank and per-point filter responses.
//!
//! Each filter is a quadrature pair: a DC-corrected cosine (even) kernel and
//! a sine (odd) kernel, both under an isotropic Gaussian envelope whose width
//! scales with the wavelength:
//!
//! ```text
//! even(r) = (k²/σ²) exp(-k²|r-r0|²/2σ²) (cos(k·(r-r0)) - exp(-σ²/2))
//! odd(r)  = (k²/σ²) exp(-k²|r-r0|²/2σ²)  sin(k·(r-r0))
//! ```
//!
//! Responses are evaluated only at requested centres (no dense convolution).
//! The kernel is truncated to a square window of half-width
//! `ceil(TRUNCATION_RADIUS * σ / k)` pixels and pixels outside the image are
//! supplied by mirror reflection about the edge.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Envelope radius, in units of the envelope standard deviation `σ/k`, at
/// which the kernel is truncated. At this radius the envelope is `e^-18`.
pub const TRUNCATION_RADIUS: f64 = 6.0;

/// A position in image coordinates: origin top-left, x right, y down.
/// Pixel `(i, j)` has its centre at `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// One Gabor filter: wave-vector magnitude and angle plus envelope width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    wavenumber: f64,
    orientation: f64,
    sigma: f64,
}

impl FilterSpec {
    pub fn new(wavenumber: f64, orientation: f64, sigma: f64) -> Result<Self> {
        if !wavenumber.is_finite() || wavenumber <= 0.0 {
            return Err(invalid("wavenumber", "must be finite and > 0"));
        }
        if !orientation.is_finite() || !(0.0..PI).contains(&orientation) {
            return Err(invalid("orientation", "must lie in [0, pi)"));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(invalid("sigma", "must be finite and > 0"));
        }
        Ok(Self {
            wavenumber,
            orientation,
            sigma,
        })
    }

    /// Spatial frequency in radians per pixel.
    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    /// Wave-vector angle in radians, in `[0, π)`.
    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Cartesian wave-vector `k (cos θ, sin θ)`.
    pub fn wave_vector(&self) -> (f64, f64) {
        (
            self.wavenumber * libm::cos(self.orientation),
            self.wavenumber * libm::sin(self.orientation),
        )
    }

    /// Half-width in pixels of the truncated kernel window.
    pub fn window_radius(&self) -> usize {
        libm::ceil(TRUNCATION_RADIUS * self.sigma / self.wavenumber) as usize
    }

    fn gain(&self) -> f64 {
        self.wavenumber * self.wavenumber / (self.sigma * self.sigma)
    }

    fn dc_term(&self) -> f64 {
        libm::exp(-self.sigma * self.sigma / 2.0)
    }
}

/// An ordered set of filters, frequency-major and orientation-minor.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    specs: Vec<FilterSpec>,
    wavenumbers: Vec<f64>,
    orientations: Vec<f64>,
    sigma: f64,
}

impl FilterBank {
    /// Builds the bank `wavenumbers × orientations`, frequency-major.
    pub fn new(wavenumbers: &[f64], orientations: &[f64], sigma: f64) -> Result<Self> {
        if wavenumbers.is_empty() {
            return Err(invalid("wavenumbers", "list is empty"));
        }
        if orientations.is_empty() {
            return Err(invalid("orientations", "list is empty"));
        }
        check_distinct("wavenumbers", wavenumbers)?;
        check_distinct("orientations", orientations)?;

        let mut specs = Vec::with_capacity(wavenumbers.len() * orientations.len());
        for &k in wavenumbers {
            for &theta in orientations {
                specs.push(FilterSpec::new(k, theta, sigma)?);
            }
        }
        Ok(Self {
            specs,
            wavenumbers: wavenumbers.to_vec(),
            orientations: orientations.to_vec(),
            sigma,
        })
    }

    /// Three octave-spaced frequencies `{π/2, π/4, π/8}`, six orientations
    /// at `π/6` spacing and `σ = π`: 18 filters.
    pub fn standard() -> Self {
        let orientations: Vec<f64> = (0..6).map(|i| i as f64 * PI / 6.0).collect();
        Self::new(&[PI / 2.0, PI / 4.0, PI / 8.0], &orientations, PI)
            .expect("standard bank parameters are valid")
    }

    pub fn specs(&self) -> &[FilterSpec] {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn orientations(&self) -> &[f64] {
        &self.orientations
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn frequency_count(&self) -> usize {
        self.wavenumbers.len()
    }

    pub fn orientation_count(&self) -> usize {
        self.orientations.len()
    }

    /// 64-bit FNV-1a hash over the bank parameters' bit patterns. Two banks
    /// with equal fingerprints produce comparable jets.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::new();
        h.write_u64(self.wavenumbers.len() as u64);
        for k in &self.wavenumbers {
            h.write_u64(k.to_bits());
        }
        h.write_u64(self.orientations.len() as u64);
        for t in &self.orientations {
            h.write_u64(t.to_bits());
        }
        h.write_u64(self.sigma.to_bits());
        h.finish()
    }
}

fn check_distinct(name: &'static str, values: &[f64]) -> Result<()> {
    for (i, a) in values.iter().enumerate() {
        if !a.is_finite() {
            return Err(invalid(name, "contains a non-finite value"));
        }
        if values[..i].contains(a) {
            return Err(invalid(name, "contains a duplicate value"));
        }
    }
    Ok(())
}

pub(crate) struct Fnv(u64);

impl Fnv {
    pub(crate) fn new() -> Self {
        Self(0xcbf2_9ce4_8422_2325)
    }

    pub(crate) fn write_u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    pub(crate) fn write_bytes(&mut self, bytes: &[u8]) {
        self.write_u64(bytes.len() as u64);
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    pub(crate) fn finish(&self) -> u64 {
        self.0
    }
}

/// A grayscale image stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRaster {
    width: usize,
    height: usize,
    intensities: Vec<f64>,
}

impl ImageRaster {
    pub fn new(width: usize, height: usize, intensities: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(invalid("size", "width and height must be at least 1"));
        }
        if intensities.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                found: intensities.len(),
            });
        }
        if intensities.iter().any(|v| !v.is_finite()) {
            return Err(invalid("intensities", "all values must be finite"));
        }
        Ok(Self {
            width,
            height,
            intensities,
        })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.intensities[y * self.width + x]
    }

    /// Intensity at integer coordinates, with out-of-range coordinates
    /// folded back by half-sample mirror reflection (`-1 → 0`, `w → w-1`).
    pub fn get_reflected(&self, x: i64, y: i64) -> f64 {
        self.get(reflect(x, self.width), reflect(y, self.height))
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= 0.0 && p.y >= 0.0 && p.x < self.width as f64 && p.y < self.height as f64
    }

    /// Returns a copy with every intensity multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.width,
            self.height,
            self.intensities.iter().map(|v| v * factor).collect(),
        )
    }
}

fn reflect(i: i64, n: usize) -> usize {
    let n = n as i64;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

/// Even and odd kernel values of `spec` centred at `center`, evaluated at
/// `point`.
pub fn evaluate_kernel(spec: &FilterSpec, center: Point, point: Point) -> (f64, f64) {
    let dx = point.x - center.x;
    let dy = point.y - center.y;
    let k = spec.wavenumber;
    let s2 = spec.sigma * spec.sigma;
    let envelope = spec.gain() * libm::exp(-k * k * (dx * dx + dy * dy) / (2.0 * s2));
    let (kx, ky) = spec.wave_vector();
    let phase = kx * dx + ky * dy;
    (
        envelope * (libm::cos(phase) - spec.dc_term()),
        envelope * libm::sin(phase),
    )
}

/// Even and odd responses of one filter at `center`: the sum over the
/// truncated window of kernel value times intensity.
///
/// The window is centred on the pixel nearest to `center`; the kernel is
/// evaluated at exact (possibly fractional) offsets. Summation is row-major.
pub fn filter_response(
    image: &ImageRaster,
    spec: &FilterSpec,
    center: Point,
) -> Result<(f64, f64)> {
    if !center.x.is_finite() || !center.y.is_finite() || !image.contains(center) {
        return Err(Error::OutOfBounds {
            x: center.x,
            y: center.y,
            width: image.width,
            height: image.height,
        });
    }
    let radius = spec.window_radius() as i64;
    let cx = libm::round(center.x) as i64;
    let cy = libm::round(center.y) as i64;

    // exp(-a(dx²+dy²)) and exp(i(kx dx + ky dy)) both factor over the axes.
    let k = spec.wavenumber;
    let a = k * k / (2.0 * spec.sigma * spec.sigma);
    let (kx, ky) = spec.wave_vector();
    let axis = |c: i64, origin: f64, freq: f64| -> Vec<(f64, f64, f64)> {
        (c - radius..=c + radius)
            .map(|p| {
                let d = p as f64 - origin;
                let (s, co) = libm::sincos(freq * d);
                (libm::exp(-a * d * d), co, s)
            })
            .collect()
    };
    let xs = axis(cx, center.x, kx);
    let ys = axis(cy, center.y, ky);
    let gain = spec.gain();
    let dc = spec.dc_term();

    let mut even = 0.0;
    let mut odd = 0.0;
    for (row, &(ey, cy_, sy)) in (cy - radius..=cy + radius).zip(&ys) {
        for (col, &(ex, cx_, sx)) in (cx - radius..=cx + radius).zip(&xs) {
            let envelope = gain * ex * ey;
            let cos = cx_ * cy_ - sx * sy;
            let sin = sx * cy_ + cx_ * sy;
            let v = image.get_reflected(col, row);
            even += envelope * (cos - dc) * v;
            odd += envelope * sin * v;
        }
    }
    Ok((even, odd))
}

/// Magnitude of the quadrature pair.
pub fn amplitude(even: f64, odd: f64) -> f64 {
    libm::sqrt(even * even + odd * odd)
}

/// Response amplitudes of the whole bank at one point, in bank order.
#[derive(Debug, Clone, PartialEq)]
pub struct JetVector {
    amplitudes: Vec<f64>,
}

impl JetVector {
    pub fn new(amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(invalid(
                "amplitudes",
                "jet entries must be finite and non-negative".to_string(),
            ));
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.iter().all(|&a| a == 0.0)
    }

    #[cfg(test)]
    pub(crate) fn zeros(n: usize) -> Self {
        Self {
            amplitudes: alloc::vec![0.0; n],
        }
    }
}

pub fn compute_jet(image: &ImageRaster, bank: &FilterBank, point: Point) -> Result<JetVector> {
    let mut amplitudes = Vec::with_capacity(bank.len());
    for spec in bank.specs() {
        let (even, odd) = filter_response(image, spec, point)?;
        amplitudes.push(amplitude(even, odd));
    }
    Ok(JetVector { amplitudes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn standard_bank_has_eighteen_filters() {
        let bank = FilterBank::standard();
        assert_eq!(bank.len(), 18);
        assert_eq!(bank.frequency_count(), 3);
        assert_eq!(bank.orientation_count(), 6);
        assert_eq!(bank.specs()[0].wavenumber(), PI / 2.0);
        assert_eq!(bank.specs()[5].orientation(), 5.0 * PI / 6.0);
        assert_eq!(bank.specs()[17].wavenumber(), PI / 8.0);
        assert_eq!(bank.sigma(), PI);
    }

    #[test]
    fn minimal_bank() {
        let bank = FilterBank::new(&[1.0], &[0.0], 1.0).unwrap();
        assert_eq!(bank.len(), 1);
    }

    #[test]
    fn bank_is_frequency_major() {
        let bank = FilterBank::new(&[PI / 2.0, PI / 4.0], &[0.0, PI / 2.0], PI).unwrap();
        let order: Vec<(f64, f64)> = bank
            .specs()
            .iter()
            .map(|s| (s.wavenumber(), s.orientation()))
            .collect();
        assert_eq!(
            order,
            vec![
                (PI / 2.0, 0.0),
                (PI / 2.0, PI / 2.0),
                (PI / 4.0, 0.0),
                (PI / 4.0, PI / 2.0)
            ]
        );
    }

    #[test]
    fn bank_rejects_bad_parameters() {
        assert!(FilterBank::new(&[], &[0.0], 1.0).is_err());
        assert!(FilterBank::new(&[1.0], &[], 1.0).is_err());
        assert!(FilterBank::new(&[1.0, 1.0], &[0.0], 1.0).is_err());
        assert!(FilterBank::new(&[1.0], &[PI], 1.0).is_err());
        assert!(FilterBank::new(&[1.0], &[-0.1], 1.0).is_err());
        assert!(FilterBank::new(&[f64::NAN], &[0.0], 1.0).is_err());
        assert!(FilterBank::new(&[1.0], &[0.0], 0.0).is_err());
        assert!(FilterBank::new(&[-1.0], &[0.0], 1.0).is_err());
    }

    #[test]
    fn fingerprint_distinguishes_banks() {
        let a = FilterBank::standard();
        let b = FilterBank::new(&[PI / 2.0], &[0.0], PI).unwrap();
        assert_eq!(a.fingerprint(), FilterBank::standard().fingerprint());
        assert_ne!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn kernel_at_center() {
        let spec = FilterSpec::new(PI / 4.0, PI / 3.0, PI).unwrap();
        let c = Point::new(10.5, 3.25);
        let (e, o) = evaluate_kernel(&spec, c, c);
        let gain = (PI / 4.0) * (PI / 4.0) / (PI * PI);
        assert!(approx(e, gain * (1.0 - libm::exp(-PI * PI / 2.0)), 1e-15));
        assert_eq!(o, 0.0);
    }

    #[test]
    fn kernel_vanishes_far_away() {
        let spec = FilterSpec::new(PI / 8.0, 0.0, PI).unwrap();
        let (e, o) = evaluate_kernel(&spec, Point::new(0.0, 0.0), Point::new(500.0, 300.0));
        assert!(e.abs() < 1e-300 && o.abs() < 1e-300);
    }

    #[test]
    #[allow(clippy::excessive_precision)] // reference digits kept verbatim
    fn kernel_matches_high_precision_value() {
        // k = π/2, θ = 0, σ = π at offset (1, 0); reference from 40-digit evaluation.
        let spec = FilterSpec::new(PI / 2.0, 0.0, PI).unwrap();
        let (e, o) = evaluate_kernel(&spec, Point::new(0.0, 0.0), Point::new(1.0, 0.0));
        assert!(approx(e, -0.001_586_703_696_316_618_3, 1e-15));
        assert!(approx(o, 0.220_624_225_646_148_850_7, 1e-15));
    }

    #[test]
    fn amplitude_examples() {
        assert_eq!(amplitude(3.0, 4.0), 5.0);
        assert_eq!(amplitude(0.0, 0.0), 0.0);
        assert_eq!(amplitude(-2.0, 0.0), 2.0);
    }

    #[test]
    fn reflection_indices() {
        assert_eq!(reflect(-1, 5), 0);
        assert_eq!(reflect(-2, 5), 1);
        assert_eq!(reflect(5, 5), 4);
        assert_eq!(reflect(6, 5), 3);
        assert_eq!(reflect(10, 5), 0);
        assert_eq!(reflect(-7, 1), 0);
    }

    #[test]
    fn center_outside_image_is_rejected() {
        let img = ImageRaster::new(4, 4, vec![1.0; 16]).unwrap();
        let spec = FilterSpec::new(1.0, 0.0, 1.0).unwrap();
        for p in [
            Point::new(-0.5, 1.0),
            Point::new(4.0, 1.0),
            Point::new(1.0, 4.0),
            Point::new(f64::NAN, 1.0),
        ] {
            assert!(matches!(
                filter_response(&img, &spec, p),
                Err(Error::OutOfBounds { .. })
            ));
        }
        assert!(compute_jet(&img, &FilterBank::standard(), Point::new(9.0, 0.0)).is_err());
    }

    #[test]
    fn image_validation() {
        assert!(ImageRaster::new(0, 3, vec![]).is_err());
        assert!(ImageRaster::new(2, 2, vec![0.0; 3]).is_err());
        assert!(ImageRaster::new(1, 1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn jet_rejects_negative_entries() {
        assert!(JetVector::new(vec![1.0, -0.5]).is_err());
        assert!(JetVector::new(vec![1.0, 0.5]).is_ok());
    }

    #[test]
    fn constant_image_gives_zero_jet() {
        let img = ImageRaster::new(64, 64, vec![128.0; 64 * 64]).unwrap();
        let bank = FilterBank::standard();
        let jet = compute_jet(&img, &bank, Point::new(20.0, 41.0)).unwrap();
        assert_eq!(jet.len(), 18);
        for a in jet.amplitudes() {
            assert!(*a < 1e-6 * 128.0);
        }
    }
}
