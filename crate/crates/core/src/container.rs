//! Files: plain images, encrypted containers, key files and previews.
//!
//! # Container layout
//!
//! All integers little-endian.
//!
//! | offset | size | field                                    |
//! |--------|------|------------------------------------------|
//! | 0      | 4    | magic `FRTC`                             |
//! | 4      | 2    | version, `1`                             |
//! | 6      | 1    | algorithm code (`0x31`..`0x33`, `0x41`..`0x43`) |
//! | 7      | 4    | width                                    |
//! | 11     | 4    | height                                   |
//! | 15     | 1    | channel count, `3`                       |
//! | 16     | ...  | payload                                  |
//!
//! The payload holds the R, G and B channels in turn, each row-major, each
//! element as an IEEE-754 `f64` real part followed by the imaginary part.
//! No key material is ever written.
//!
//! # Key files
//!
//! UTF-8 `name = value` lines; blank lines and `#` comments are ignored.
//!
//! ```text
//! algorithm = A42
//! alpha = 0.5
//! beta = 0.5
//! gamma = 0.5
//! delta = 0.5
//! burn_in = 1000
//! mask1.kind = logistic
//! mask1.p = 3.9900000000000002
//! mask1.x0 = 0.31
//! mask2.kind = logistic
//! mask2.p = 3.9900000000000002
//! mask2.x0 = 0.62
//! ```
//!
//! Mask parameters by kind: `uniform` takes `seed`; `logistic` takes `p`,
//! `x0`; `tent` takes `a`, `x0`; `kaplan-yorke` takes `a`, `b`, `x0`, `y0`.
//! `burn_in` may be overridden per mask with `maskN.burn_in`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use image::{DynamicImage, ImageFormat, ImageReader, RgbImage};
use ndarray::Array2;
use num_complex::Complex64;

use crate::chaos::{MaskFamily, MaskKind, MaskSpec, DEFAULT_BURN_IN};
use crate::format::g17;
use crate::pipeline::{Algorithm, EncryptedImage, EncryptionKey, Orders, PlainImage};
use crate::{Error, RMatrix, Result};

pub const MAGIC: [u8; 4] = *b"FRTC";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 16;
const CHANNELS: u8 = 3;

/// Decoded container header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContainerHeader {
    pub algorithm: Algorithm,
    pub width: u32,
    pub height: u32,
}

impl ContainerHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut h = [0u8; HEADER_LEN];
        h[0..4].copy_from_slice(&MAGIC);
        h[4..6].copy_from_slice(&VERSION.to_le_bytes());
        h[6] = self.algorithm.code();
        h[7..11].copy_from_slice(&self.width.to_le_bytes());
        h[11..15].copy_from_slice(&self.height.to_le_bytes());
        h[15] = CHANNELS;
        h
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format(format!("header truncated at {} bytes", bytes.len())));
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let algorithm = Algorithm::from_code(bytes[6])
            .ok_or_else(|| Error::Format(format!("unknown algorithm code {:#04x}", bytes[6])))?;
        let width = u32::from_le_bytes(bytes[7..11].try_into().unwrap());
        let height = u32::from_le_bytes(bytes[11..15].try_into().unwrap());
        if bytes[15] != CHANNELS {
            return Err(Error::Format(format!("channel count {} (expected 3)", bytes[15])));
        }
        Ok(ContainerHeader {
            algorithm,
            width,
            height,
        })
    }

    /// Payload length in bytes, or `None` on overflow.
    pub fn payload_len(&self) -> Option<usize> {
        (self.width as usize)
            .checked_mul(self.height as usize)?
            .checked_mul(CHANNELS as usize)?
            .checked_mul(16)
    }
}

pub fn encode_container(enc: &EncryptedImage) -> Result<Vec<u8>> {
    let (rows, cols) = enc.dims();
    let too_big = || Error::Format(format!("dimensions {rows}x{cols} exceed the u32 header fields"));
    let header = ContainerHeader {
        algorithm: enc.algorithm(),
        width: u32::try_from(cols).map_err(|_| too_big())?,
        height: u32::try_from(rows).map_err(|_| too_big())?,
    };
    let payload = header.payload_len().ok_or_else(too_big)?;
    let mut out = Vec::with_capacity(HEADER_LEN + payload);
    out.extend_from_slice(&header.to_bytes());
    for ch in enc.channels() {
        for z in ch.iter() {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_container(bytes: &[u8]) -> Result<EncryptedImage> {
    let header = ContainerHeader::parse(bytes)?;
    let payload = header
        .payload_len()
        .ok_or_else(|| Error::Format("dimension overflow".into()))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != payload {
        return Err(Error::Format(format!(
            "payload is {} bytes, header implies {payload}",
            body.len()
        )));
    }
    let (rows, cols) = (header.height as usize, header.width as usize);
    let per_channel = rows * cols * 16;
    let f = |b: &[u8]| f64::from_le_bytes(b.try_into().unwrap());
    let channel = |k: usize| {
        let chunk = &body[k * per_channel..(k + 1) * per_channel];
        let values = chunk
            .chunks_exact(16)
            .map(|e| Complex64::new(f(&e[..8]), f(&e[8..])))
            .collect();
        Array2::from_shape_vec((rows, cols), values).expect("length checked")
    };
    EncryptedImage::new(header.algorithm, [channel(0), channel(1), channel(2)])
}

pub fn save_container(enc: &EncryptedImage, path: impl AsRef<Path>) -> Result<()> {
    let bytes = encode_container(enc)?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(())
}

pub fn load_container(path: impl AsRef<Path>) -> Result<EncryptedImage> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode_container(&bytes)
}

/// True when the file starts with the container magic.
pub fn is_container(path: impl AsRef<Path>) -> Result<bool> {
    let mut head = [0u8; 4];
    let mut f = File::open(path)?;
    Ok(f.read(&mut head)? == 4 && head == MAGIC)
}

/// Loads an 8-bit PNG or TIFF. Grayscale is promoted to three equal
/// channels; an alpha channel is dropped.
pub fn load_image(path: impl AsRef<Path>) -> Result<PlainImage> {
    let reader = ImageReader::open(path)?.with_guessed_format()?;
    match reader.format() {
        Some(ImageFormat::Png) | Some(ImageFormat::Tiff) => {}
        other => {
            return Err(Error::UnsupportedImage(format!(
                "format {other:?}; only PNG and TIFF are read"
            )))
        }
    }
    let img = reader.decode()?;
    let rgb = match img {
        DynamicImage::ImageRgb8(rgb) => rgb,
        DynamicImage::ImageLuma8(_) | DynamicImage::ImageLumaA8(_) | DynamicImage::ImageRgba8(_) => img.to_rgb8(),
        other => {
            return Err(Error::UnsupportedImage(format!(
                "pixel type {:?}; only 8-bit gray or RGB is read",
                other.color()
            )))
        }
    };
    Ok(plain_from_rgb(&rgb))
}

pub fn plain_from_rgb(rgb: &RgbImage) -> PlainImage {
    let (w, h) = rgb.dimensions();
    let ch = |k: usize| Array2::from_shape_fn((h as usize, w as usize), |(r, c)| rgb.get_pixel(c as u32, r as u32)[k] as f64);
    PlainImage::new([ch(0), ch(1), ch(2)]).expect("dims agree and values finite")
}

fn rgb_from_channels(channels: [RMatrix; 3]) -> RgbImage {
    let (h, w) = channels[0].dim();
    RgbImage::from_fn(w as u32, h as u32, |c, r| {
        let px = |k: usize| channels[k][[r as usize, c as usize]].round().clamp(0.0, 255.0) as u8;
        image::Rgb([px(0), px(1), px(2)])
    })
}

/// Rounds and clamps each channel to 8 bits and writes an RGB image; the
/// format follows the file extension.
pub fn save_image(image: &PlainImage, path: impl AsRef<Path>) -> Result<()> {
    rgb_from_channels(image.channels().clone()).save(path)?;
    Ok(())
}

/// Per-channel magnitude, min-max stretched to `0..=255`. A constant channel
/// maps to black.
pub fn preview_image(enc: &EncryptedImage) -> RgbImage {
    let stretch = |c: &crate::CMatrix| {
        let mag = c.mapv(|z| z.norm());
        let lo = mag.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = mag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            mag.mapv(|m| 255.0 * (m - lo) / (hi - lo))
        } else {
            mag.mapv(|_| 0.0)
        }
    };
    let [r, g, b] = enc.channels();
    rgb_from_channels([stretch(r), stretch(g), stretch(b)])
}

pub fn export_preview(enc: &EncryptedImage, path: impl AsRef<Path>) -> Result<()> {
    preview_image(enc).save(path)?;
    Ok(())
}

fn mask_fields(kind: &MaskKind) -> Vec<(&'static str, String)> {
    match *kind {
        MaskKind::Uniform { seed } => vec![("seed", seed.to_string())],
        MaskKind::Logistic { p, x0 } => vec![("p", g17(p)), ("x0", g17(x0))],
        MaskKind::Tent { a, x0 } => vec![("a", g17(a)), ("x0", g17(x0))],
        MaskKind::KaplanYorke { a, b, x0, y0 } => {
            vec![("a", g17(a)), ("b", g17(b)), ("x0", g17(x0)), ("y0", g17(y0))]
        }
    }
}

/// Serialises a key in the text format described in the module docs.
pub fn format_key(key: &EncryptionKey) -> String {
    let mut s = String::from("# frcrypt key file\n");
    let o = key.orders;
    s += &format!("algorithm = {}\n", key.algorithm);
    for (name, v) in [("alpha", o.alpha), ("beta", o.beta), ("gamma", o.gamma), ("delta", o.delta)] {
        s += &format!("{name} = {}\n", g17(v));
    }
    let shared = key.mask1.burn_in == key.mask2.burn_in;
    if shared {
        s += &format!("burn_in = {}\n", key.mask1.burn_in);
    }
    for (i, m) in [(1, &key.mask1), (2, &key.mask2)] {
        s += &format!("mask{i}.kind = {}\n", m.kind.family().name());
        for (name, v) in mask_fields(&m.kind) {
            s += &format!("mask{i}.{name} = {v}\n");
        }
        if !shared {
            s += &format!("mask{i}.burn_in = {}\n", m.burn_in);
        }
    }
    s
}

struct Fields {
    map: BTreeMap<String, (usize, String)>,
}

impl Fields {
    fn take(&mut self, name: &str) -> Option<(usize, String)> {
        self.map.remove(name)
    }

    fn required(&mut self, name: &str) -> Result<(usize, String)> {
        self.take(name)
            .ok_or_else(|| Error::InvalidKey(format!("missing field `{name}`")))
    }

    fn real(&mut self, name: &str) -> Result<f64> {
        let (line, v) = self.required(name)?;
        v.parse::<f64>().map_err(|_| Error::KeyParse {
            line,
            msg: format!("`{name}` is not a number: {v:?}"),
        })
    }

    fn count<T: std::str::FromStr>(&mut self, name: &str) -> Result<Option<T>> {
        match self.take(name) {
            None => Ok(None),
            Some((line, v)) => v.parse::<T>().map(Some).map_err(|_| Error::KeyParse {
                line,
                msg: format!("`{name}` is not a non-negative integer: {v:?}"),
            }),
        }
    }

    fn mask(&mut self, i: u8, default_burn_in: usize) -> Result<MaskSpec> {
        let p = |f: &str| format!("mask{i}.{f}");
        let (line, kind) = self.required(&p("kind"))?;
        let family = MaskFamily::from_name(&kind).ok_or_else(|| Error::KeyParse {
            line,
            msg: format!("unknown mask kind {kind:?}"),
        })?;
        let kind = match family {
            MaskFamily::Uniform => MaskKind::Uniform {
                seed: self
                    .count(&p("seed"))?
                    .ok_or_else(|| Error::InvalidKey(format!("missing field `{}`", p("seed"))))?,
            },
            MaskFamily::Logistic => MaskKind::Logistic {
                p: self.real(&p("p"))?,
                x0: self.real(&p("x0"))?,
            },
            MaskFamily::Tent => MaskKind::Tent {
                a: self.real(&p("a"))?,
                x0: self.real(&p("x0"))?,
            },
            MaskFamily::KaplanYorke => MaskKind::KaplanYorke {
                a: self.real(&p("a"))?,
                b: self.real(&p("b"))?,
                x0: self.real(&p("x0"))?,
                y0: self.real(&p("y0"))?,
            },
        };
        let burn_in = self.count(&p("burn_in"))?.unwrap_or(default_burn_in);
        Ok(MaskSpec { kind, burn_in })
    }
}

/// Parses and validates a key file's contents.
pub fn parse_key(text: &str) -> Result<EncryptionKey> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (name, value) = content.split_once('=').ok_or_else(|| Error::KeyParse {
            line,
            msg: format!("expected `name = value`, got {content:?}"),
        })?;
        let name = name.trim().to_string();
        if map.insert(name.clone(), (line, value.trim().to_string())).is_some() {
            return Err(Error::KeyParse {
                line,
                msg: format!("duplicate field `{name}`"),
            });
        }
    }
    let mut f = Fields { map };
    let (line, alg) = f.required("algorithm")?;
    let algorithm: Algorithm = alg.parse().map_err(|_| Error::KeyParse {
        line,
        msg: format!("unknown algorithm {alg:?}"),
    })?;
    let orders = Orders::new(f.real("alpha")?, f.real("beta")?, f.real("gamma")?, f.real("delta")?);
    let burn_in = f.count("burn_in")?.unwrap_or(DEFAULT_BURN_IN);
    let mask1 = f.mask(1, burn_in)?;
    let mask2 = f.mask(2, burn_in)?;
    if let Some((name, (line, _))) = f.map.into_iter().next() {
        return Err(Error::KeyParse {
            line,
            msg: format!("unknown field `{name}`"),
        });
    }
    EncryptionKey::new(algorithm, orders, mask1, mask2)
}

pub fn read_key(path: impl AsRef<Path>) -> Result<EncryptionKey> {
    parse_key(&std::fs::read_to_string(path)?)
}

pub fn write_key(key: &EncryptionKey, path: impl AsRef<Path>) -> Result<()> {
    key.validate()?;
    std::fs::write(path, format_key(key))?;
    Ok(())
}
