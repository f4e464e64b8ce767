//! Restoration error, order sweeps and wall-clock timing.

use std::io::Write;
use std::time::Instant;

use crate::format::g17;
use crate::frft::PlanSource;
use crate::pipeline::{decrypt, encrypt, EncryptionKey, Orders, PipelineOptions, PlainImage};
use crate::{CMatrix, Error, Execution, Result};

/// Per-channel mean squared error on the 0..=255 intensity scale.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MseTriple {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl MseTriple {
    pub fn as_array(&self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }

    pub fn max(&self) -> f64 {
        self.r.max(self.g).max(self.b)
    }

    pub fn min(&self) -> f64 {
        self.r.min(self.g).min(self.b)
    }
}

/// Mean over all pixels of `|a - b|^2`.
pub fn mse_channel(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    crate::check_same_dims(a.dim(), b.dim())?;
    let n = a.len();
    if n == 0 {
        return Err(Error::InvalidSize(0));
    }
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    Ok(sum / n as f64)
}

pub fn mse_channels(a: &[CMatrix; 3], b: &[CMatrix; 3]) -> Result<MseTriple> {
    Ok(MseTriple {
        r: mse_channel(&a[0], &b[0])?,
        g: mse_channel(&a[1], &b[1])?,
        b: mse_channel(&a[2], &b[2])?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub order: f64,
    pub mse: MseTriple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepMode {
    /// Encrypt once with the key; decrypt with all four orders set to each
    /// sweep value.
    #[default]
    DecryptOrder,
    /// Encrypt and decrypt with all four orders set to each sweep value.
    BothOrders,
}

/// MSE between `image` and its restoration at each sweep order.
///
/// Rows are computed independently (in parallel under `opts.exec`); the
/// per-row work is sequential so the result does not depend on scheduling.
pub fn sweep_orders(
    image: &PlainImage,
    key: &EncryptionKey,
    orders: &[f64],
    mode: SweepMode,
    opts: PipelineOptions,
) -> Result<Vec<SweepRow>> {
    if orders.is_empty() {
        return Err(Error::InvalidKey("empty order sweep".into()));
    }
    let reference = image.to_complex();
    let inner = PipelineOptions::new(opts.plans, Execution::Sequential);
    let encrypted = match mode {
        SweepMode::DecryptOrder => Some(encrypt(image, key, inner)?),
        SweepMode::BothOrders => None,
    };
    let rows = opts.exec.map_vec(orders, |&v| -> Result<SweepRow> {
        let k = key.with_orders(Orders::uniform(v));
        let dec = match &encrypted {
            Some(enc) => decrypt(enc, &k, inner)?,
            None => decrypt(&encrypt(image, &k, inner)?, &k, inner)?,
        };
        Ok(SweepRow {
            order: v,
            mse: mse_channels(&dec.channels, &reference)?,
        })
    });
    rows.into_iter().collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["order", "mse_r", "mse_g", "mse_b"])?;
    for row in rows {
        w.write_record([g17(row.order), g17(row.mse.r), g17(row.mse.g), g17(row.mse.b)])?;
    }
    w.flush()?;
    Ok(())
}

/// Median of a non-empty sample; the mean of the middle pair for even sizes.
pub fn median(samples: &mut [f64]) -> f64 {
    assert!(!samples.is_empty(), "median of empty sample");
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        0.5 * (samples[n / 2 - 1] + samples[n / 2])
    }
}

/// Median seconds of a full encrypt + decrypt, after one untimed warm-up.
///
/// Runs on the calling thread only. `plans` decides whether plans come from
/// the cache or are rebuilt inside every timed run.
pub fn time_pipeline(image: &PlainImage, key: &EncryptionKey, repeats: usize, plans: PlanSource) -> Result<f64> {
    Ok(time_runs(image, key, repeats, plans)?.median)
}

/// Raw timing samples plus their median.
#[derive(Debug, Clone, PartialEq)]
pub struct Timing {
    pub samples: Vec<f64>,
    pub median: f64,
}

pub fn time_runs(image: &PlainImage, key: &EncryptionKey, repeats: usize, plans: PlanSource) -> Result<Timing> {
    if repeats == 0 {
        return Err(Error::InvalidKey("repeats must be at least 1".into()));
    }
    let opts = PipelineOptions::new(plans, Execution::Sequential);
    let run = || -> Result<()> {
        let enc = encrypt(image, key, opts)?;
        std::hint::black_box(decrypt(&enc, key, opts)?);
        Ok(())
    };
    run()?;
    let mut samples = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let t = Instant::now();
        run()?;
        samples.push(t.elapsed().as_secs_f64());
    }
    let median = median(&mut samples.clone());
    Ok(Timing { samples, median })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingRow {
    pub order: f64,
    pub baseline_seconds: f64,
    pub proposed_seconds: f64,
    /// `baseline_seconds / proposed_seconds`.
    pub ratio: f64,
}

/// Times a baseline key against its DWT counterpart at every order.
///
/// The two keys must name counterpart algorithms (A31 with A41 and so on).
/// All four orders of both keys are set to each value in `orders`.
pub fn speedup_report(
    image: &PlainImage,
    baseline: &EncryptionKey,
    proposed: &EncryptionKey,
    orders: &[f64],
    repeats: usize,
    plans: PlanSource,
) -> Result<Vec<TimingRow>> {
    if baseline.algorithm.uses_dwt() || baseline.algorithm.counterpart() != proposed.algorithm {
        return Err(Error::InvalidKey(format!(
            "{} and {} are not a baseline/DWT pair",
            baseline.algorithm, proposed.algorithm
        )));
    }
    orders
        .iter()
        .map(|&v| {
            let o = Orders::uniform(v);
            let b = time_pipeline(image, &baseline.with_orders(o), repeats, plans)?;
            let p = time_pipeline(image, &proposed.with_orders(o), repeats, plans)?;
            Ok(TimingRow {
                order: v,
                baseline_seconds: b,
                proposed_seconds: p,
                ratio: b / p,
            })
        })
        .collect()
}

pub fn write_timing_csv<W: Write>(rows: &[TimingRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["order", "baseline_s", "proposed_s", "ratio"])?;
    for row in rows {
        w.write_record([
            g17(row.order),
            g17(row.baseline_seconds),
            g17(row.proposed_seconds),
            g17(row.ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}
