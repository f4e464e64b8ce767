mod common;

use common::{fixture, fro, key_for, max_dev, noise_image};
use frcrypt_core::chaos::{MaskKind, MaskSpec};
use frcrypt_core::dwt::dwt2_haar;
use frcrypt_core::frft::{build_plan, PlanSource};
use frcrypt_core::metrics::mse_channels;
use frcrypt_core::pipeline::{
    decrypt, decrypt_baseline, encrypt, encrypt_baseline, encrypt_dwt, Algorithm, EncryptionKey, Encryptor, Orders,
    PipelineOptions, PlainImage,
};
use frcrypt_core::{CMatrix, Error, Execution};
use ndarray::Array2;

const OPTS: PipelineOptions = PipelineOptions {
    plans: PlanSource::Cached,
    exec: Execution::Parallel,
};

/// `Pc X Pr^T` with dense plan matrices.
fn separable(x: &CMatrix, row_order: f64, col_order: f64) -> CMatrix {
    let pc = build_plan(x.nrows(), col_order).unwrap();
    let pr = build_plan(x.ncols(), row_order).unwrap();
    pc.matrix().dot(x).dot(&pr.matrix().t())
}

fn haar_blocks(x: &CMatrix) -> [CMatrix; 4] {
    let (h, w) = (x.nrows() / 2, x.ncols() / 2);
    let mut out = [(); 4].map(|_| Array2::zeros((h, w)));
    for i in 0..h {
        for j in 0..w {
            let (a, b, c, d) = (x[[2 * i, 2 * j]], x[[2 * i, 2 * j + 1]], x[[2 * i + 1, 2 * j]], x[[2 * i + 1, 2 * j + 1]]);
            out[0][[i, j]] = (a + b + c + d) / 2.0;
            out[1][[i, j]] = (a - b + c - d) / 2.0;
            out[2][[i, j]] = (a + b - c - d) / 2.0;
            out[3][[i, j]] = (a - b - c + d) / 2.0;
        }
    }
    out
}

fn haar_unblocks([ll, lh, hl, hh]: &[CMatrix; 4]) -> CMatrix {
    let (h, w) = ll.dim();
    let mut x = Array2::zeros((2 * h, 2 * w));
    for i in 0..h {
        for j in 0..w {
            let (p, q, r, t) = (ll[[i, j]], lh[[i, j]], hl[[i, j]], hh[[i, j]]);
            x[[2 * i, 2 * j]] = (p + q + r + t) / 2.0;
            x[[2 * i, 2 * j + 1]] = (p - q + r - t) / 2.0;
            x[[2 * i + 1, 2 * j]] = (p + q - r - t) / 2.0;
            x[[2 * i + 1, 2 * j + 1]] = (p - q - r + t) / 2.0;
        }
    }
    x
}

/// Straight-line encryption of one channel, written from the algorithm
/// definitions without going through the library's pipeline code.
fn reference_encrypt(f: &CMatrix, key: &EncryptionKey) -> CMatrix {
    let o = key.orders;
    let chain = |x: &CMatrix, first: (f64, f64), second: (f64, f64)| {
        let (m, n) = x.dim();
        let m1 = key.mask1.mask(m, n).unwrap().values().clone();
        let m2 = key.mask2.mask(m, n).unwrap().values().clone();
        let t = separable(&(x * &m1), first.0, first.1);
        separable(&(t * &m2), second.0, second.1)
    };
    if key.algorithm.uses_dwt() {
        let mut bands = haar_blocks(f);
        bands[0] = chain(&bands[0], (o.gamma, o.delta), (o.alpha, o.beta));
        haar_unblocks(&bands)
    } else {
        chain(f, (o.alpha, o.beta), (o.gamma, o.delta))
    }
}

fn with_orders(alg: Algorithm, o: Orders) -> EncryptionKey {
    key_for(alg).with_orders(o)
}

#[test]
fn matches_reference_chain() {
    let img = noise_image(8, 12, 1);
    let plain = img.to_complex();
    for alg in Algorithm::ALL {
        let key = with_orders(alg, Orders::new(0.3, 0.7, 1.1, -0.4));
        let enc = encrypt(&img, &key, OPTS).unwrap();
        for (got, f) in enc.channels().iter().zip(&plain) {
            let want = reference_encrypt(f, &key);
            assert!(max_dev(got, &want) <= 1e-9 * fro(&want), "{alg}");
        }
    }
}

#[test]
fn round_trip_every_algorithm() {
    let img = noise_image(32, 48, 2);
    for alg in Algorithm::ALL {
        for o in [Orders::uniform(0.5), Orders::new(0.1, 1.3, -0.7, 2.6)] {
            let key = with_orders(alg, o);
            let dec = decrypt(&encrypt(&img, &key, OPTS).unwrap(), &key, OPTS).unwrap();
            let mse = mse_channels(&dec.channels, &img.to_complex()).unwrap();
            assert!(mse.max() <= 1e-18, "{alg}: {mse:?}");
        }
    }
}

#[test]
fn identity_key_is_passthrough() {
    // x0 = 0 is a fixed point of the logistic map, so S is all zeros and
    // both masks are all ones.
    let img = noise_image(8, 8, 3);
    for alg in [Algorithm::A32, Algorithm::A42] {
        let key = EncryptionKey::new(
            alg,
            Orders::uniform(0.0),
            MaskSpec::new(MaskKind::Logistic { p: 3.9, x0: 0.0 }),
            MaskSpec::new(MaskKind::Logistic { p: 3.8, x0: 0.0 }),
        )
        .unwrap();
        let enc = encrypt(&img, &key, OPTS).unwrap();
        for (g, f) in enc.channels().iter().zip(&img.to_complex()) {
            assert!(max_dev(g, f) <= 1e-12, "{alg}");
            assert!(g.iter().all(|z| z.im.abs() <= 1e-12));
        }
    }
}

#[test]
fn wrong_key_material_fails_on_a_natural_image() {
    let img = fixture();
    let truth = img.to_complex();
    for alg in [Algorithm::A31, Algorithm::A42] {
        let key = key_for(alg);
        let enc = encrypt(&img, &key, OPTS).unwrap();

        let off = decrypt(&enc, &key.with_orders(Orders::uniform(0.4)), OPTS).unwrap();
        let mse = mse_channels(&off.channels, &truth).unwrap();
        assert!(mse.min() > 1e3, "{alg} orders 0.4: {mse:?}");

        let mut wrong_seed = key;
        wrong_seed.mask1.kind = match key.mask1.kind {
            MaskKind::Uniform { seed } => MaskKind::Uniform { seed: seed + 1 },
            MaskKind::Logistic { p, x0 } => MaskKind::Logistic { p, x0: x0 + 1e-10 },
            other => other,
        };
        let off = decrypt(&enc, &wrong_seed, OPTS).unwrap();
        let mse = mse_channels(&off.channels, &truth).unwrap();
        assert!(mse.r > 1e3, "{alg} wrong seed: {mse:?}");
    }
}

#[test]
fn orders_are_four_periodic() {
    let img = noise_image(16, 16, 4);
    for alg in [Algorithm::A33, Algorithm::A43] {
        let key = key_for(alg);
        let enc = encrypt(&img, &key, OPTS).unwrap();
        let good = decrypt(&enc, &key, OPTS).unwrap();
        let mut o = key.orders;
        o.alpha += 4.0;
        let shifted = decrypt(&enc, &key.with_orders(o), OPTS).unwrap();
        for (a, b) in good.channels.iter().zip(&shifted.channels) {
            assert!(max_dev(a, b) <= 1e-9, "{alg}");
        }
    }
}

#[test]
fn dwt_variants_pass_detail_subbands_through() {
    let img = noise_image(32, 16, 5);
    for alg in [Algorithm::A41, Algorithm::A42, Algorithm::A43] {
        let enc = encrypt(&img, &key_for(alg), OPTS).unwrap();
        for (g, f) in enc.channels().iter().zip(&img.to_complex()) {
            let (eg, ef) = (dwt2_haar(g).unwrap(), dwt2_haar(f).unwrap());
            assert!(max_dev(&eg.lh, &ef.lh) <= 1e-12);
            assert!(max_dev(&eg.hl, &ef.hl) <= 1e-12);
            assert!(max_dev(&eg.hh, &ef.hh) <= 1e-12);
            assert!(max_dev(&eg.ll, &ef.ll) > 1.0);
        }
    }
}

#[test]
fn channels_are_independent() {
    let img = noise_image(16, 24, 6);
    for alg in Algorithm::ALL {
        let key = key_for(alg);
        let all = encrypt(&img, &key, OPTS).unwrap();
        let enc = Encryptor::new(&key, img.dims(), PlanSource::Cached).unwrap();
        let alone = enc.encrypt_channel(&img.to_complex()[0]).unwrap();
        assert_eq!(alone, all.channels()[0], "{alg}");
    }
}

#[test]
fn baseline_preserves_channel_norms() {
    let img = noise_image(24, 20, 7);
    for alg in [Algorithm::A31, Algorithm::A32, Algorithm::A33] {
        let enc = encrypt_baseline(&img, &key_for(alg).with_orders(Orders::new(0.2, 0.9, 1.4, 0.6)), OPTS).unwrap();
        for (g, f) in enc.channels().iter().zip(&img.to_complex()) {
            assert!((fro(g) - fro(f)).abs() <= 1e-9 * fro(f), "{alg}");
        }
    }
}

#[test]
fn ciphertext_differs_from_plaintext() {
    let img = fixture();
    for alg in Algorithm::ALL {
        let enc = encrypt(&img, &key_for(alg), OPTS).unwrap();
        for (g, f) in enc.channels().iter().zip(&img.to_complex()) {
            let rel = fro(&(g - f)) / fro(f);
            assert!(rel > 0.5, "{alg}: {rel}");
        }
    }
}

#[test]
fn parallel_and_sequential_are_bit_identical() {
    let img = noise_image(64, 64, 8);
    let seq = PipelineOptions::new(PlanSource::Cached, Execution::Sequential);
    for alg in Algorithm::ALL {
        let key = key_for(alg);
        let a = encrypt(&img, &key, OPTS).unwrap();
        let b = encrypt(&img, &key, seq).unwrap();
        assert_eq!(a, b);
        assert_eq!(decrypt(&a, &key, OPTS).unwrap(), decrypt(&b, &key, seq).unwrap());
        let fresh = PipelineOptions::new(PlanSource::Fresh, Execution::Sequential);
        assert_eq!(encrypt(&img, &key, fresh).unwrap(), a);
    }
}

#[test]
fn size_rules() {
    let tiny = noise_image(2, 2, 9);
    let key = key_for(Algorithm::A31);
    let dec = decrypt_baseline(&encrypt_baseline(&tiny, &key, OPTS).unwrap(), &key, OPTS).unwrap();
    assert!(mse_channels(&dec.channels, &tiny.to_complex()).unwrap().max() <= 1e-18);

    let odd = noise_image(5, 7, 10);
    assert!(encrypt(&odd, &key, OPTS).is_ok());
    assert!(matches!(
        encrypt(&odd, &key_for(Algorithm::A41), OPTS),
        Err(Error::OddDimension { rows: 5, cols: 7 })
    ));
    assert!(matches!(encrypt(&tiny, &key_for(Algorithm::A41), OPTS), Err(Error::TooSmall { .. })));
    assert!(matches!(encrypt(&noise_image(1, 4, 0), &key, OPTS), Err(Error::TooSmall { .. })));
    assert!(encrypt(&noise_image(4, 4, 11), &key_for(Algorithm::A43), OPTS).is_ok());
}

#[test]
fn keys_are_checked() {
    let img = noise_image(8, 8, 12);
    assert!(matches!(encrypt_dwt(&img, &key_for(Algorithm::A32), OPTS), Err(Error::InvalidKey(_))));
    let k = key_for(Algorithm::A32);
    assert!(EncryptionKey::new(Algorithm::A33, k.orders, k.mask1, k.mask2).is_err());
    assert!(EncryptionKey::new(Algorithm::A32, k.orders, k.mask1, k.mask1).is_err());
    assert!(EncryptionKey::new(Algorithm::A32, Orders::uniform(f64::NAN), k.mask1, k.mask2).is_err());
    assert!(PlainImage::new([Array2::zeros((2, 2)), Array2::zeros((2, 2)), Array2::zeros((2, 3))]).is_err());
}

#[test]
fn decrypted_real_part_is_the_image() {
    let img = noise_image(16, 16, 13);
    let key = key_for(Algorithm::A43);
    let dec = decrypt(&encrypt(&img, &key, OPTS).unwrap(), &key, OPTS).unwrap();
    let plain = dec.to_plain();
    for (a, b) in plain.channels().iter().zip(img.channels()) {
        assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9));
    }
    let imag = dec.channels[0].iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    assert!(imag <= 1e-9);
}
