//! Single-level orthonormal 2-D Haar wavelet.
//!
//! Each non-overlapping 2x2 block `[[a, b], [c, d]]` maps to one coefficient
//! in each subband:
//!
//! ```text
//! ll = (a + b + c + d) / 2     lh = (a - b + c - d) / 2
//! hl = (a + b - c - d) / 2     hh = (a - b - c + d) / 2
//! ```
//!
//! The 4x4 butterfly is its own inverse, so synthesis uses the same formula.

use ndarray::{Array2, Zip};
use num_complex::Complex64;

use crate::{CMatrix, Error, Result};

/// The four half-size subbands of one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandSet {
    pub ll: CMatrix,
    pub lh: CMatrix,
    pub hl: CMatrix,
    pub hh: CMatrix,
}

impl SubbandSet {
    /// Dimensions of the channel these subbands came from.
    pub fn parent_dims(&self) -> (usize, usize) {
        let (r, c) = self.ll.dim();
        (2 * r, 2 * c)
    }

    pub fn energy(&self) -> f64 {
        [&self.ll, &self.lh, &self.hl, &self.hh]
            .iter()
            .map(|m| m.iter().map(Complex64::norm_sqr).sum::<f64>())
            .sum()
    }
}

#[inline]
fn butterfly(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> [Complex64; 4] {
    [
        (a + b + c + d) * 0.5,
        (a - b + c - d) * 0.5,
        (a + b - c - d) * 0.5,
        (a - b - c + d) * 0.5,
    ]
}

/// Splits `channel` into LL, LH, HL, HH.
pub fn dwt2_haar(channel: &CMatrix) -> Result<SubbandSet> {
    let (rows, cols) = channel.dim();
    if rows % 2 == 1 || cols % 2 == 1 {
        return Err(Error::OddDimension { rows, cols });
    }
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidSize(0));
    }
    let half = (rows / 2, cols / 2);
    let mut out = SubbandSet {
        ll: Array2::zeros(half),
        lh: Array2::zeros(half),
        hl: Array2::zeros(half),
        hh: Array2::zeros(half),
    };
    Zip::indexed(&mut out.ll)
        .and(&mut out.lh)
        .and(&mut out.hl)
        .and(&mut out.hh)
        .for_each(|(i, j), ll, lh, hl, hh| {
            let (r, c) = (2 * i, 2 * j);
            [*ll, *lh, *hl, *hh] = butterfly(
                channel[[r, c]],
                channel[[r, c + 1]],
                channel[[r + 1, c]],
                channel[[r + 1, c + 1]],
            );
        });
    Ok(out)
}

/// Exact inverse of [`dwt2_haar`].
pub fn idwt2_haar(subbands: &SubbandSet) -> Result<CMatrix> {
    let dim = subbands.ll.dim();
    for band in [&subbands.lh, &subbands.hl, &subbands.hh] {
        crate::check_same_dims(dim, band.dim())?;
    }
    let mut out = Array2::zeros((2 * dim.0, 2 * dim.1));
    Zip::indexed(&subbands.ll)
        .and(&subbands.lh)
        .and(&subbands.hl)
        .and(&subbands.hh)
        .for_each(|(i, j), &ll, &lh, &hl, &hh| {
            let (r, c) = (2 * i, 2 * j);
            let [a, b, cc, d] = butterfly(ll, lh, hl, hh);
            out[[r, c]] = a;
            out[[r, c + 1]] = b;
            out[[r + 1, c]] = cc;
            out[[r + 1, c + 1]] = d;
        });
    Ok(out)
}
