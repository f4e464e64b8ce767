//! Helpers shared by the integration test binaries.
#![allow(dead_code)]

use frcrypt_core::chaos::{MaskKind, MaskSpec, Xoshiro256StarStar};
use frcrypt_core::container::load_image;
use frcrypt_core::pipeline::{Algorithm, EncryptionKey, Orders, PlainImage};
use frcrypt_core::{CMatrix, RMatrix};
use ndarray::Array2;

pub const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/astronaut_256.png");

/// The 256x256 RGB natural test image.
pub fn fixture() -> PlainImage {
    load_image(FIXTURE).expect("fixture image")
}

/// A key of the right mask family for `algorithm`, all orders 0.5.
pub fn key_for(algorithm: Algorithm) -> EncryptionKey {
    let (m1, m2) = match algorithm {
        Algorithm::A31 | Algorithm::A41 => (MaskKind::Uniform { seed: 11 }, MaskKind::Uniform { seed: 22 }),
        Algorithm::A32 | Algorithm::A42 => (
            MaskKind::Logistic { p: 3.99, x0: 0.31 },
            MaskKind::Logistic { p: 3.99, x0: 0.62 },
        ),
        Algorithm::A33 | Algorithm::A43 => (
            MaskKind::KaplanYorke { a: 1.97, b: 0.3, x0: 0.21, y0: 0.1 },
            MaskKind::KaplanYorke { a: 1.97, b: 0.3, x0: 0.43, y0: 0.2 },
        ),
    };
    EncryptionKey::new(algorithm, Orders::uniform(0.5), MaskSpec::new(m1), MaskSpec::new(m2)).unwrap()
}

/// Pseudo-random 0..=255 image.
pub fn noise_image(rows: usize, cols: usize, seed: u64) -> PlainImage {
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let mut chan = || -> RMatrix { Array2::from_shape_simple_fn((rows, cols), || (rng.next_f64() * 256.0).floor()) };
    PlainImage::new([chan(), chan(), chan()]).unwrap()
}

pub fn fro(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_dev(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
