//! Built-in invariant checks, run by `frcrypt selftest`.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::chaos::{
    gen_chaotic_map, ky_iterate, logistic_iterate, tent_iterate, uniform_rpm, MaskKind, MaskSpec,
    Xoshiro256StarStar,
};
use crate::dwt::{dwt2_haar, idwt2_haar};
use crate::frft::{build_plan, FrftPlan};
use crate::metrics::mse_channels;
use crate::pipeline::{decrypt, encrypt, Algorithm, EncryptionKey, Orders, PipelineOptions, PlainImage};
use crate::{CMatrix, Result};

/// Outcome of one property group.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed deviation or a short failure note.
    pub detail: String,
}

pub const DEFAULT_SIZES: [usize; 3] = [8, 16, 64];

const TOL: f64 = 1e-10;

fn random_matrix(rng: &mut Xoshiro256StarStar, rows: usize, cols: usize) -> CMatrix {
    Array2::from_shape_simple_fn((rows, cols), || {
        Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5)
    })
}

fn random_vec(rng: &mut Xoshiro256StarStar, n: usize) -> Vec<Complex64> {
    random_matrix(rng, n, 1).into_raw_vec_and_offset().0
}

fn max_abs_diff<'a>(a: impl IntoIterator<Item = &'a Complex64>, b: impl IntoIterator<Item = &'a Complex64>) -> f64 {
    a.into_iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

fn bounded(name: &'static str, worst: f64, tol: f64) -> CheckResult {
    CheckResult {
        name,
        passed: worst <= tol,
        detail: format!("max deviation {worst:.3e} (tol {tol:.0e})"),
    }
}

fn guard(name: &'static str, f: impl FnOnce() -> Result<CheckResult>) -> CheckResult {
    f().unwrap_or_else(|e| CheckResult {
        name,
        passed: false,
        detail: format!("error: {e}"),
    })
}

const ORDERS: [f64; 5] = [0.1, 0.5, 0.9, 1.3, 1.9];

fn plans(n: usize) -> Result<Vec<FrftPlan>> {
    ORDERS.iter().map(|&a| build_plan(n, a)).collect()
}

fn frft_unitarity(sizes: &[usize]) -> Result<CheckResult> {
    let mut rng = Xoshiro256StarStar::seed_from_u64(1);
    let mut worst = 0.0f64;
    for &n in sizes {
        for p in plans(n)? {
            let x = random_vec(&mut rng, n);
            worst = worst.max((norm(&p.apply(&x)?) - norm(&x)).abs());
            let m = p.matrix();
            let gram = m.dot(&m.t().mapv(|z| z.conj()));
            worst = worst.max(max_abs_diff(gram.iter(), Array2::<Complex64>::eye(n).iter()));
        }
    }
    Ok(bounded("frft.unitarity", worst, TOL))
}

fn frft_additivity(sizes: &[usize]) -> Result<CheckResult> {
    let mut rng = Xoshiro256StarStar::seed_from_u64(2);
    let mut worst = 0.0f64;
    for &n in sizes {
        let x = random_vec(&mut rng, n);
        for &a1 in &ORDERS {
            for &a2 in &ORDERS {
                let two_step = build_plan(n, a2)?.apply(&build_plan(n, a1)?.apply(&x)?)?;
                let direct = build_plan(n, a1 + a2)?.apply(&x)?;
                worst = worst.max(max_abs_diff(&two_step, &direct));
            }
        }
    }
    Ok(bounded("frft.index-additivity", worst, TOL))
}

fn frft_period(sizes: &[usize]) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for &n in sizes {
        for &a in &ORDERS {
            let p = build_plan(n, a)?;
            let q = build_plan(n, a + 4.0)?;
            let r = build_plan(n, a - 8.0)?;
            worst = worst.max(max_abs_diff(p.matrix(), q.matrix()));
            worst = worst.max(max_abs_diff(p.matrix(), r.matrix()));
        }
    }
    Ok(bounded("frft.period-4", worst, TOL))
}

fn frft_special_orders(sizes: &[usize]) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    let mut identity_exact = true;
    for &n in sizes {
        let c = n / 2;
        identity_exact &= build_plan(n, 0.0)?.matrix() == Array2::<Complex64>::eye(n);
        let parity = Array2::from_shape_fn((n, n), |(i, j)| {
            if (i + j) % n == (2 * c) % n {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::default()
            }
        });
        worst = worst.max(max_abs_diff(build_plan(n, 2.0)?.matrix(), parity.iter()));
        let dft = Array2::from_shape_fn((n, n), |(j, k)| {
            let (j, k) = (j as f64 - c as f64, k as f64 - c as f64);
            Complex64::from_polar(1.0 / (n as f64).sqrt(), -2.0 * PI * j * k / n as f64)
        });
        worst = worst.max(max_abs_diff(build_plan(n, 1.0)?.matrix(), dft.iter()));
    }
    let mut r = bounded("frft.special-orders", worst, TOL);
    if !identity_exact {
        r.passed = false;
        r.detail += "; F^0 is not exactly I";
    }
    Ok(r)
}

fn frft_inverse_adjoint(sizes: &[usize]) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for &n in sizes {
        for &a in &ORDERS {
            let fwd = build_plan(n, a)?;
            let inv = build_plan(n, -a)?;
            let adj = fwd.matrix().t().mapv(|z| z.conj());
            worst = worst.max(max_abs_diff(inv.matrix(), adj.iter()));
        }
    }
    Ok(bounded("frft.inverse-adjoint", worst, TOL))
}

fn dwt_reconstruction(sizes: &[usize]) -> Result<CheckResult> {
    let mut rng = Xoshiro256StarStar::seed_from_u64(3);
    let mut worst = 0.0f64;
    for &n in sizes {
        let x = random_matrix(&mut rng, n, n + 2);
        let y = idwt2_haar(&dwt2_haar(&x)?)?;
        worst = worst.max(max_abs_diff(&x, &y));
    }
    Ok(bounded("dwt.reconstruction", worst, 1e-12))
}

fn dwt_energy(sizes: &[usize]) -> Result<CheckResult> {
    let mut rng = Xoshiro256StarStar::seed_from_u64(4);
    let mut worst = 0.0f64;
    for &n in sizes {
        let x = random_matrix(&mut rng, n, n);
        let e: f64 = x.iter().map(Complex64::norm_sqr).sum();
        worst = worst.max((dwt2_haar(&x)?.energy() - e).abs() / e);
    }
    Ok(bounded("dwt.energy", worst, 1e-9))
}

fn chaos_boundedness() -> Result<CheckResult> {
    let steps = 100_000;
    let mut ok = true;
    for p in [3.57, 3.99, 4.0] {
        ok &= logistic_iterate(p, 0.123, steps)?.iter().all(|x| (0.0..=1.0).contains(x));
    }
    for a in [1.5, 1.99, 2.0] {
        ok &= tent_iterate(a, 0.377, steps)?.iter().all(|x| (0.0..=1.0).contains(x));
    }
    let (b, y0) = (0.3, 0.4);
    let (xs, ys) = ky_iterate(1.97, b, 0.21, y0, steps)?;
    ok &= xs.iter().all(|x| (0.0..1.0).contains(x));
    ok &= ys.iter().all(|y| y.abs() <= 1.0 / (1.0 - b) + f64::abs(y0));
    Ok(CheckResult {
        name: "chaos.boundedness",
        passed: ok,
        detail: format!("{steps} iterates per map"),
    })
}

fn chaos_determinism() -> Result<CheckResult> {
    let specs = [
        MaskSpec::new(MaskKind::Logistic { p: 3.99, x0: 0.3 }),
        MaskSpec::new(MaskKind::Tent { a: 1.9, x0: 0.3 }),
        MaskSpec::new(MaskKind::KaplanYorke { a: 1.97, b: 0.3, x0: 0.21, y0: 0.1 }),
        MaskSpec::new(MaskKind::Uniform { seed: 99 }),
    ];
    let mut ok = true;
    for s in &specs {
        ok &= gen_chaotic_map(s, 16, 16)? == gen_chaotic_map(s, 16, 16)?;
    }
    // Seed sensitivity: 1e-10 apart, diverged within 100 post-burn-in iterates.
    let base = MaskSpec::new(MaskKind::Logistic { p: 3.99, x0: 0.3 }).with_burn_in(100);
    let near = MaskSpec::new(MaskKind::Logistic { p: 3.99, x0: 0.3 + 1e-10 }).with_burn_in(100);
    let (a, b) = (gen_chaotic_map(&base, 10, 10)?, gen_chaotic_map(&near, 10, 10)?);
    let spread = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    ok &= spread > 0.1;
    Ok(CheckResult {
        name: "chaos.determinism",
        passed: ok,
        detail: format!("seed-perturbation spread {spread:.3}"),
    })
}

fn mask_unit_modulus(sizes: &[usize]) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for &n in sizes {
        let masks = [
            uniform_rpm(5, n, n),
            MaskSpec::new(MaskKind::Logistic { p: 3.99, x0: 0.7 }).mask(n, n)?,
            MaskSpec::new(MaskKind::KaplanYorke { a: 1.97, b: 0.3, x0: 0.4, y0: 0.0 }).mask(n, n)?,
        ];
        for m in &masks {
            let prod = m.values() * m.conj().values();
            for (z, w) in m.values().iter().zip(&prod) {
                worst = worst.max((z.norm() - 1.0).abs()).max((w - 1.0).norm());
            }
        }
    }
    Ok(bounded("mask.unit-modulus", worst, 1e-12))
}

pub(crate) fn demo_key(algorithm: Algorithm) -> EncryptionKey {
    use crate::chaos::MaskFamily;
    let (m1, m2) = match algorithm.mask_family() {
        MaskFamily::Uniform => (MaskKind::Uniform { seed: 11 }, MaskKind::Uniform { seed: 22 }),
        MaskFamily::Logistic => (
            MaskKind::Logistic { p: 3.99, x0: 0.31 },
            MaskKind::Logistic { p: 3.99, x0: 0.62 },
        ),
        _ => (
            MaskKind::KaplanYorke { a: 1.97, b: 0.3, x0: 0.21, y0: 0.1 },
            MaskKind::KaplanYorke { a: 1.97, b: 0.3, x0: 0.43, y0: 0.2 },
        ),
    };
    EncryptionKey::new(algorithm, Orders::default(), MaskSpec::new(m1), MaskSpec::new(m2))
        .expect("demo key is valid")
}

fn pipeline_roundtrip(sizes: &[usize]) -> Result<CheckResult> {
    let mut rng = Xoshiro256StarStar::seed_from_u64(6);
    let mut worst = 0.0f64;
    for &n in sizes {
        let ch = |rng: &mut Xoshiro256StarStar| Array2::from_shape_simple_fn((n, n), || (rng.next_f64() * 256.0).floor());
        let img = PlainImage::new([ch(&mut rng), ch(&mut rng), ch(&mut rng)])?;
        for alg in Algorithm::ALL {
            let key = demo_key(alg);
            let opts = PipelineOptions::default();
            let dec = decrypt(&encrypt(&img, &key, opts)?, &key, opts)?;
            worst = worst.max(mse_channels(&dec.channels, &img.to_complex())?.max());
        }
    }
    Ok(CheckResult {
        name: "pipeline.roundtrip",
        passed: worst <= 1e-18,
        detail: format!("max per-channel MSE {worst:.3e} over six algorithms (tol 1e-18)"),
    })
}

/// Runs every property group at the given transform sizes.
pub fn run(sizes: &[usize]) -> Vec<CheckResult> {
    vec![
        guard("frft.unitarity", || frft_unitarity(sizes)),
        guard("frft.index-additivity", || frft_additivity(sizes)),
        guard("frft.period-4", || frft_period(sizes)),
        guard("frft.special-orders", || frft_special_orders(sizes)),
        guard("frft.inverse-adjoint", || frft_inverse_adjoint(sizes)),
        guard("dwt.reconstruction", || dwt_reconstruction(sizes)),
        guard("dwt.energy", || dwt_energy(sizes)),
        guard("chaos.boundedness", chaos_boundedness),
        guard("chaos.determinism", chaos_determinism),
        guard("mask.unit-modulus", || mask_unit_modulus(sizes)),
        guard("pipeline.roundtrip", || pipeline_roundtrip(sizes)),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn small_sizes_pass() {
        for r in super::run(&[4, 8]) {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
