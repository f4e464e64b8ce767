//! Chaotic sequences and random phase masks.
//!
//! Three bounded maps drive the chaotic masks:
//!
//! * logistic: `x' = p x (1 - x)`, `0 < p <= 4`, `x` in `[0, 1]`
//! * tent: `x' = a x` if `x <= 0.5`, else `a (1 - x)`, `0 < a <= 2`
//! * Kaplan-Yorke: `x' = a x mod 1`, `y' = b y + cos(4 pi x)`, `0 <= a <= 2`,
//!   `0 <= b < 1`
//!
//! A map's driving matrix `S` (values in `[0, 1]`) becomes the chaotic random
//! phase mask `exp(i pi/2 S)`. The uniform mask uses `exp(2 pi i u)` with `u`
//! drawn from [`Xoshiro256StarStar`].

use std::f64::consts::{FRAC_PI_2, TAU};

use ndarray::Array2;
use num_complex::Complex64;

use crate::{CMatrix, Error, RMatrix, Result};

pub const DEFAULT_BURN_IN: usize = 1000;

/// Generator parameters for one phase mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaskKind {
    Uniform { seed: u64 },
    Logistic { p: f64, x0: f64 },
    Tent { a: f64, x0: f64 },
    KaplanYorke { a: f64, b: f64, x0: f64, y0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaskFamily {
    Uniform,
    Logistic,
    Tent,
    KaplanYorke,
}

impl MaskFamily {
    pub fn name(self) -> &'static str {
        match self {
            MaskFamily::Uniform => "uniform",
            MaskFamily::Logistic => "logistic",
            MaskFamily::Tent => "tent",
            MaskFamily::KaplanYorke => "kaplan-yorke",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "uniform" => MaskFamily::Uniform,
            "logistic" => MaskFamily::Logistic,
            "tent" => MaskFamily::Tent,
            "kaplan-yorke" => MaskFamily::KaplanYorke,
            _ => return None,
        })
    }
}

impl MaskKind {
    pub fn family(&self) -> MaskFamily {
        match self {
            MaskKind::Uniform { .. } => MaskFamily::Uniform,
            MaskKind::Logistic { .. } => MaskFamily::Logistic,
            MaskKind::Tent { .. } => MaskFamily::Tent,
            MaskKind::KaplanYorke { .. } => MaskFamily::KaplanYorke,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskSpec {
    pub kind: MaskKind,
    /// Iterates discarded before the map starts filling `S`.
    pub burn_in: usize,
}

impl MaskSpec {
    pub fn new(kind: MaskKind) -> Self {
        MaskSpec {
            kind,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            MaskKind::Uniform { .. } => Ok(()),
            MaskKind::Logistic { p, x0 } => check_logistic(p, x0),
            MaskKind::Tent { a, x0 } => check_tent(a, x0),
            MaskKind::KaplanYorke { a, b, x0, y0 } => check_ky(a, b, x0, y0),
        }
    }

    /// The mask of the given size.
    pub fn mask(&self, rows: usize, cols: usize) -> Result<PhaseMask> {
        match self.kind {
            MaskKind::Uniform { seed } => Ok(uniform_rpm(seed, rows, cols)),
            _ => crpm(&gen_chaotic_map(self, rows, cols)?),
        }
    }
}

fn param(name: &'static str, value: f64, ok: bool, bound: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter { name, value, bound })
    }
}

fn check_logistic(p: f64, x0: f64) -> Result<()> {
    param("p", p, p > 0.0 && p <= 4.0, "0 < p <= 4")?;
    param("x0", x0, (0.0..=1.0).contains(&x0), "0 <= x0 <= 1")
}

fn check_tent(a: f64, x0: f64) -> Result<()> {
    param("a", a, a > 0.0 && a <= 2.0, "0 < a <= 2")?;
    param("x0", x0, (0.0..=1.0).contains(&x0), "0 <= x0 <= 1")
}

fn check_ky(a: f64, b: f64, x0: f64, y0: f64) -> Result<()> {
    param("a", a, (0.0..=2.0).contains(&a), "0 <= a <= 2")?;
    param("b", b, (0.0..1.0).contains(&b), "0 <= b < 1")?;
    param("x0", x0, true, "finite")?;
    param("y0", y0, true, "finite")
}

/// Iterator over logistic-map iterates `x1, x2, ...` (the seed excluded).
#[derive(Debug, Clone)]
pub struct Logistic {
    p: f64,
    x: f64,
}

impl Logistic {
    pub fn new(p: f64, x0: f64) -> Result<Self> {
        check_logistic(p, x0)?;
        Ok(Logistic { p, x: x0 })
    }
}

impl Iterator for Logistic {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.x = self.p * self.x * (1.0 - self.x);
        Some(self.x)
    }
}

/// Tent-map iterates, branching on the current iterate.
#[derive(Debug, Clone)]
pub struct Tent {
    a: f64,
    x: f64,
}

impl Tent {
    pub fn new(a: f64, x0: f64) -> Result<Self> {
        check_tent(a, x0)?;
        Ok(Tent { a, x: x0 })
    }
}

impl Iterator for Tent {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.x = if self.x <= 0.5 {
            self.a * self.x
        } else {
            self.a * (1.0 - self.x)
        };
        Some(self.x)
    }
}

/// Kaplan-Yorke iterates as `(x, y)` pairs.
#[derive(Debug, Clone)]
pub struct KaplanYorke {
    a: f64,
    b: f64,
    x: f64,
    y: f64,
}

impl KaplanYorke {
    pub fn new(a: f64, b: f64, x0: f64, y0: f64) -> Result<Self> {
        check_ky(a, b, x0, y0)?;
        Ok(KaplanYorke { a, b, x: x0, y: y0 })
    }
}

impl Iterator for KaplanYorke {
    type Item = (f64, f64);

    fn next(&mut self) -> Option<(f64, f64)> {
        // y' uses the old x.
        let y = self.b * self.y + (2.0 * TAU * self.x).cos();
        let mut x = (self.a * self.x).rem_euclid(1.0);
        if x >= 1.0 {
            x = 0.0;
        }
        self.x = x;
        self.y = y;
        Some((x, y))
    }
}

pub fn logistic_iterate(p: f64, x0: f64, n: usize) -> Result<Vec<f64>> {
    Ok(Logistic::new(p, x0)?.take(n).collect())
}

pub fn tent_iterate(a: f64, x0: f64, n: usize) -> Result<Vec<f64>> {
    Ok(Tent::new(a, x0)?.take(n).collect())
}

pub fn ky_iterate(a: f64, b: f64, x0: f64, y0: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok(KaplanYorke::new(a, b, x0, y0)?.take(n).unzip())
}

/// Fills an `rows x cols` matrix, row-major, with the spec's sequence after
/// discarding `burn_in` iterates.
///
/// Logistic and tent use the `x` sequence directly. Kaplan-Yorke uses `y`,
/// min-max normalised over the generated block. Uniform specs yield the raw
/// `[0, 1)` draws behind [`uniform_rpm`].
pub fn gen_chaotic_map(spec: &MaskSpec, rows: usize, cols: usize) -> Result<RMatrix> {
    spec.validate()?;
    let len = rows * cols;
    if len == 0 {
        return Err(Error::InvalidSize(0));
    }
    let skip = spec.burn_in;
    let values: Vec<f64> = match spec.kind {
        MaskKind::Uniform { seed } => {
            let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
            (0..len).map(|_| rng.next_f64()).collect()
        }
        MaskKind::Logistic { p, x0 } => Logistic::new(p, x0)?.skip(skip).take(len).collect(),
        MaskKind::Tent { a, x0 } => Tent::new(a, x0)?.skip(skip).take(len).collect(),
        MaskKind::KaplanYorke { a, b, x0, y0 } => {
            let ys: Vec<f64> = KaplanYorke::new(a, b, x0, y0)?
                .skip(skip)
                .take(len)
                .map(|(_, y)| y)
                .collect();
            min_max_normalise(ys)?
        }
    };
    Ok(Array2::from_shape_vec((rows, cols), values).expect("length matches shape"))
}

fn min_max_normalise(mut ys: Vec<f64>) -> Result<Vec<f64>> {
    let (lo, hi) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| (lo.min(y), hi.max(y)));
    // A sequence collapsed onto a fixed point can still jitter by an ulp;
    // stretching that to [0, 1] would be meaningless.
    if hi - lo <= 1e-12 * hi.abs().max(lo.abs()).max(1.0) {
        return Err(Error::FlatSequence(lo));
    }
    let span = hi - lo;
    for y in &mut ys {
        *y = (*y - lo) / span;
    }
    Ok(ys)
}

/// A unit-modulus complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMask {
    values: CMatrix,
}

impl PhaseMask {
    pub fn values(&self) -> &CMatrix {
        &self.values
    }

    pub fn dim(&self) -> (usize, usize) {
        self.values.dim()
    }

    /// Phase of every entry in `(-pi, pi]`.
    pub fn phase(&self) -> RMatrix {
        self.values.mapv(|z| z.arg())
    }

    /// Elementwise product `image * mask`.
    pub fn apply(&self, image: &CMatrix) -> Result<CMatrix> {
        crate::check_same_dims(self.dim(), image.dim())?;
        Ok(image * &self.values)
    }

    pub fn conj(&self) -> PhaseMask {
        conj_mask(self)
    }
}

/// `exp(i pi/2 S)` elementwise.
pub fn crpm(s: &RMatrix) -> Result<PhaseMask> {
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(PhaseMask {
        values: s.mapv(|v| Complex64::from_polar(1.0, FRAC_PI_2 * v)),
    })
}

/// `exp(2 pi i u)` with `u` uniform on `[0, 1)` from a seeded
/// [`Xoshiro256StarStar`], filled row-major.
pub fn uniform_rpm(seed: u64, rows: usize, cols: usize) -> PhaseMask {
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    PhaseMask {
        values: Array2::from_shape_simple_fn((rows, cols), || {
            Complex64::from_polar(1.0, TAU * rng.next_f64())
        }),
    }
}

pub fn conj_mask(mask: &PhaseMask) -> PhaseMask {
    PhaseMask {
        values: mask.values.mapv(|z| z.conj()),
    }
}

/// xoshiro256** (Blackman and Vigna), seeded through SplitMix64.
///
/// All arithmetic is wrapping on `u64`.
///
/// Seeding: starting from `z = seed`, four SplitMix64 outputs fill `s[0..4]`:
///
/// ```text
/// z += 0x9e3779b97f4a7c15
/// t = z
/// t = (t ^ (t >> 30)) * 0xbf58476d1ce4e5b9
/// t = (t ^ (t >> 27)) * 0x94d049bb133111eb
/// out = t ^ (t >> 31)
/// ```
///
/// Step:
///
/// ```text
/// result = rotl(s[1] * 5, 7) * 9
/// t = s[1] << 17
/// s[2] ^= s[0];  s[3] ^= s[1];  s[1] ^= s[2];  s[0] ^= s[3]
/// s[2] ^= t;     s[3] = rotl(s[3], 45)
/// ```
///
/// A uniform double is `(result >> 11) * 2^-53`.
///
/// Reference: seed 0 yields `0x99ec5f36cb75f2b4, 0xbf6e1f784956452a,
/// 0x1a5f849d4933e6e0, 0x6aa594f1262d2d2c`.
#[derive(Debug, Clone)]
pub struct Xoshiro256StarStar {
    s: [u64; 4],
}

impl Xoshiro256StarStar {
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut z = seed;
        let mut s = [0u64; 4];
        for slot in &mut s {
            z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut t = z;
            t = (t ^ (t >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            t = (t ^ (t >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            *slot = t ^ (t >> 31);
        }
        Xoshiro256StarStar { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
