//! Double random phase encoding with fractional Fourier transforms.
//!
//! Every algorithm runs the same per-channel chain on some working matrix `w`:
//!
//! ```text
//! encrypt:  w' = T2( T1( w * m1 ) * m2 )
//! decrypt:  w  = conj(m1) * T1^-1( conj(m2) * T2^-1( w' ) )
//! ```
//!
//! For `A3x`, `w` is the whole channel, `T1` has orders `(alpha, beta)` and
//! `T2` has `(gamma, delta)`. For `A4x`, `w` is the LL subband of a single
//! level Haar DWT, `T1` has `(gamma, delta)` and `T2` has `(alpha, beta)`;
//! the three detail subbands pass through untouched and the channel is
//! resynthesised with the inverse DWT. Masks for `A4x` are half size.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::chaos::{MaskFamily, MaskSpec, PhaseMask};
use crate::dwt::{dwt2_haar, idwt2_haar};
use crate::frft::{OrderPair, Plan2d, PlanSource};
use crate::{CMatrix, Error, Execution, RMatrix, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    A31,
    A32,
    A33,
    A41,
    A42,
    A43,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::A31,
        Algorithm::A32,
        Algorithm::A33,
        Algorithm::A41,
        Algorithm::A42,
        Algorithm::A43,
    ];

    /// Container byte: `0x31` for A31 and so on.
    pub fn code(self) -> u8 {
        match self {
            Algorithm::A31 => 0x31,
            Algorithm::A32 => 0x32,
            Algorithm::A33 => 0x33,
            Algorithm::A41 => 0x41,
            Algorithm::A42 => 0x42,
            Algorithm::A43 => 0x43,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::A31 => "A31",
            Algorithm::A32 => "A32",
            Algorithm::A33 => "A33",
            Algorithm::A41 => "A41",
            Algorithm::A42 => "A42",
            Algorithm::A43 => "A43",
        }
    }

    /// Whether the chain runs on the LL subband.
    pub fn uses_dwt(self) -> bool {
        matches!(self, Algorithm::A41 | Algorithm::A42 | Algorithm::A43)
    }

    pub fn mask_family(self) -> MaskFamily {
        match self {
            Algorithm::A31 | Algorithm::A41 => MaskFamily::Uniform,
            Algorithm::A32 | Algorithm::A42 => MaskFamily::Logistic,
            Algorithm::A33 | Algorithm::A43 => MaskFamily::KaplanYorke,
        }
    }

    /// The DWT-accelerated variant of a baseline algorithm and vice versa.
    pub fn counterpart(self) -> Algorithm {
        match self {
            Algorithm::A31 => Algorithm::A41,
            Algorithm::A32 => Algorithm::A42,
            Algorithm::A33 => Algorithm::A43,
            Algorithm::A41 => Algorithm::A31,
            Algorithm::A42 => Algorithm::A32,
            Algorithm::A43 => Algorithm::A33,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches(['A', 'a']);
        let t = t.replace('.', "");
        Self::ALL
            .into_iter()
            .find(|a| a.name()[1..] == t)
            .ok_or_else(|| Error::InvalidKey(format!("unknown algorithm {s:?}")))
    }
}

/// The four fractional orders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orders {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Orders {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Orders {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn uniform(v: f64) -> Self {
        Orders::new(v, v, v, v)
    }

    pub fn alpha_beta(&self) -> OrderPair {
        OrderPair::new(self.alpha, self.beta)
    }

    pub fn gamma_delta(&self) -> OrderPair {
        OrderPair::new(self.gamma, self.delta)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }
}

impl Default for Orders {
    fn default() -> Self {
        Orders::uniform(0.5)
    }
}

/// The entire secret: algorithm, orders and both mask generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncryptionKey {
    pub algorithm: Algorithm,
    pub orders: Orders,
    pub mask1: MaskSpec,
    pub mask2: MaskSpec,
}

impl EncryptionKey {
    /// Builds and validates a key.
    pub fn new(algorithm: Algorithm, orders: Orders, mask1: MaskSpec, mask2: MaskSpec) -> Result<Self> {
        let key = EncryptionKey {
            algorithm,
            orders,
            mask1,
            mask2,
        };
        key.validate()?;
        Ok(key)
    }

    pub fn validate(&self) -> Result<()> {
        let names = ["alpha", "beta", "gamma", "delta"];
        for (name, v) in names.iter().zip(self.orders.as_array()) {
            if !v.is_finite() {
                return Err(Error::InvalidKey(format!("{name} = {v} is not finite")));
            }
        }
        let want = self.algorithm.mask_family();
        for (i, m) in [(1, &self.mask1), (2, &self.mask2)] {
            if m.kind.family() != want {
                return Err(Error::InvalidKey(format!(
                    "mask{i}.kind is {} but {} needs {}",
                    m.kind.family().name(),
                    self.algorithm,
                    want.name()
                )));
            }
            m.validate()?;
        }
        if self.mask1 == self.mask2 {
            return Err(Error::InvalidKey(
                "mask1 and mask2 must differ (independent seeds)".into(),
            ));
        }
        Ok(())
    }

    /// Same key with different orders.
    pub fn with_orders(&self, orders: Orders) -> Self {
        EncryptionKey { orders, ..*self }
    }

    pub fn with_algorithm(&self, algorithm: Algorithm) -> Self {
        EncryptionKey { algorithm, ..*self }
    }
}

/// An RGB image with real channels on the 0..=255 scale.
#[derive(Debug, Clone, PartialEq)]
pub struct PlainImage {
    channels: [RMatrix; 3],
}

impl PlainImage {
    pub fn new(channels: [RMatrix; 3]) -> Result<Self> {
        let d = channels[0].dim();
        for c in &channels[1..] {
            crate::check_same_dims(d, c.dim())?;
        }
        if channels.iter().flat_map(|c| c.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(PlainImage { channels })
    }

    pub fn channels(&self) -> &[RMatrix; 3] {
        &self.channels
    }

    /// `(rows, cols)`, i.e. `(height, width)`.
    pub fn dims(&self) -> (usize, usize) {
        self.channels[0].dim()
    }

    pub fn to_complex(&self) -> [CMatrix; 3] {
        self.channels
            .clone()
            .map(|c| c.mapv(|v| Complex64::new(v, 0.0)))
    }
}

/// Per-channel complex ciphertext.
#[derive(Debug, Clone, PartialEq)]
pub struct EncryptedImage {
    algorithm: Algorithm,
    channels: [CMatrix; 3],
}

impl EncryptedImage {
    pub fn new(algorithm: Algorithm, channels: [CMatrix; 3]) -> Result<Self> {
        let d = channels[0].dim();
        for c in &channels[1..] {
            crate::check_same_dims(d, c.dim())?;
        }
        Ok(EncryptedImage {
            algorithm,
            channels,
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn channels(&self) -> &[CMatrix; 3] {
        &self.channels
    }

    pub fn dims(&self) -> (usize, usize) {
        self.channels[0].dim()
    }
}

/// Decryption output. Imaginary parts are rounding noise for the right key.
#[derive(Debug, Clone, PartialEq)]
pub struct DecryptedImage {
    pub channels: [CMatrix; 3],
}

impl DecryptedImage {
    /// Real parts, for display and saving.
    pub fn to_plain(&self) -> PlainImage {
        PlainImage {
            channels: self.channels.clone().map(|c| c.mapv(|z| z.re)),
        }
    }
}

/// Knobs shared by encryption and decryption.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PipelineOptions {
    pub plans: PlanSource,
    pub exec: Execution,
}

impl PipelineOptions {
    pub fn new(plans: PlanSource, exec: Execution) -> Self {
        PipelineOptions { plans, exec }
    }
}

fn check_dims(algorithm: Algorithm, (rows, cols): (usize, usize)) -> Result<(usize, usize)> {
    if algorithm.uses_dwt() {
        if rows % 2 == 1 || cols % 2 == 1 {
            return Err(Error::OddDimension { rows, cols });
        }
        if rows < 4 || cols < 4 {
            return Err(Error::TooSmall {
                rows,
                cols,
                reason: "DWT variants need at least 4x4 so the LL subband is 2x2",
            });
        }
        Ok((rows / 2, cols / 2))
    } else {
        if rows < 2 || cols < 2 {
            return Err(Error::TooSmall {
                rows,
                cols,
                reason: "the transform needs at least 2x2",
            });
        }
        Ok((rows, cols))
    }
}

/// (first, second) transform orders of the encryption chain.
fn stage_orders(key: &EncryptionKey) -> (OrderPair, OrderPair) {
    if key.algorithm.uses_dwt() {
        (key.orders.gamma_delta(), key.orders.alpha_beta())
    } else {
        (key.orders.alpha_beta(), key.orders.gamma_delta())
    }
}

/// Masks and plans for encrypting channels of one size under one key.
#[derive(Debug, Clone)]
pub struct Encryptor {
    dwt: bool,
    mask1: PhaseMask,
    mask2: PhaseMask,
    first: Plan2d,
    second: Plan2d,
}

impl Encryptor {
    /// `dims` are the full channel dimensions `(rows, cols)`.
    pub fn new(key: &EncryptionKey, dims: (usize, usize), plans: PlanSource) -> Result<Self> {
        key.validate()?;
        let (r, c) = check_dims(key.algorithm, dims)?;
        let (o1, o2) = stage_orders(key);
        Ok(Encryptor {
            dwt: key.algorithm.uses_dwt(),
            mask1: key.mask1.mask(r, c)?,
            mask2: key.mask2.mask(r, c)?,
            first: Plan2d::new(r, c, o1, plans)?,
            second: Plan2d::new(r, c, o2, plans)?,
        })
    }

    fn chain(&self, w: &CMatrix) -> Result<CMatrix> {
        let w = self.first.apply(&self.mask1.apply(w)?)?;
        self.second.apply(&self.mask2.apply(&w)?)
    }

    pub fn encrypt_channel(&self, channel: &CMatrix) -> Result<CMatrix> {
        if self.dwt {
            let mut bands = dwt2_haar(channel)?;
            bands.ll = self.chain(&bands.ll)?;
            idwt2_haar(&bands)
        } else {
            self.chain(channel)
        }
    }
}

/// Conjugate masks and inverse plans for one key and channel size.
#[derive(Debug, Clone)]
pub struct Decryptor {
    dwt: bool,
    conj1: PhaseMask,
    conj2: PhaseMask,
    first_inv: Plan2d,
    second_inv: Plan2d,
}

impl Decryptor {
    pub fn new(key: &EncryptionKey, dims: (usize, usize), plans: PlanSource) -> Result<Self> {
        key.validate()?;
        let (r, c) = check_dims(key.algorithm, dims)?;
        let (o1, o2) = stage_orders(key);
        Ok(Decryptor {
            dwt: key.algorithm.uses_dwt(),
            conj1: key.mask1.mask(r, c)?.conj(),
            conj2: key.mask2.mask(r, c)?.conj(),
            first_inv: Plan2d::new(r, c, o1.negated(), plans)?,
            second_inv: Plan2d::new(r, c, o2.negated(), plans)?,
        })
    }

    fn chain(&self, w: &CMatrix) -> Result<CMatrix> {
        let w = self.conj2.apply(&self.second_inv.apply(w)?)?;
        self.conj1.apply(&self.first_inv.apply(&w)?)
    }

    pub fn decrypt_channel(&self, channel: &CMatrix) -> Result<CMatrix> {
        if self.dwt {
            let mut bands = dwt2_haar(channel)?;
            bands.ll = self.chain(&bands.ll)?;
            idwt2_haar(&bands)
        } else {
            self.chain(channel)
        }
    }
}

fn collect3(r: [Result<CMatrix>; 3]) -> Result<[CMatrix; 3]> {
    let [a, b, c] = r;
    Ok([a?, b?, c?])
}

/// Encrypts with whichever algorithm the key names.
pub fn encrypt(image: &PlainImage, key: &EncryptionKey, opts: PipelineOptions) -> Result<EncryptedImage> {
    let enc = Encryptor::new(key, image.dims(), opts.plans)?;
    let channels = image.to_complex();
    let out = opts.exec.map_channels(&channels, |c| enc.encrypt_channel(c));
    EncryptedImage::new(key.algorithm, collect3(out)?)
}

/// Decrypts with whichever algorithm the key names.
pub fn decrypt(enc: &EncryptedImage, key: &EncryptionKey, opts: PipelineOptions) -> Result<DecryptedImage> {
    let dec = Decryptor::new(key, enc.dims(), opts.plans)?;
    let out = opts.exec.map_channels(enc.channels(), |c| dec.decrypt_channel(c));
    Ok(DecryptedImage {
        channels: collect3(out)?,
    })
}

fn require(key: &EncryptionKey, dwt: bool) -> Result<()> {
    if key.algorithm.uses_dwt() != dwt {
        let family = if dwt { "A41/A42/A43" } else { "A31/A32/A33" };
        return Err(Error::InvalidKey(format!(
            "{} is not one of {family}",
            key.algorithm
        )));
    }
    Ok(())
}

/// Full-image chain (`A31`, `A32`, `A33`).
pub fn encrypt_baseline(image: &PlainImage, key: &EncryptionKey, opts: PipelineOptions) -> Result<EncryptedImage> {
    require(key, false)?;
    encrypt(image, key, opts)
}

pub fn decrypt_baseline(enc: &EncryptedImage, key: &EncryptionKey, opts: PipelineOptions) -> Result<DecryptedImage> {
    require(key, false)?;
    decrypt(enc, key, opts)
}

/// LL-subband chain (`A41`, `A42`, `A43`).
pub fn encrypt_dwt(image: &PlainImage, key: &EncryptionKey, opts: PipelineOptions) -> Result<EncryptedImage> {
    require(key, true)?;
    encrypt(image, key, opts)
}

pub fn decrypt_dwt(enc: &EncryptedImage, key: &EncryptionKey, opts: PipelineOptions) -> Result<DecryptedImage> {
    require(key, true)?;
    decrypt(enc, key, opts)
}
