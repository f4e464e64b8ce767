//! Transform identities checked against directly constructed matrices.

use std::f64::consts::PI;

use frcrypt_core::frft::{build_plan, frft_1d, frft_2d, ifrft_2d, plan, OrderPair, PlanSource};
use frcrypt_core::CMatrix;
use ndarray::Array2;
use num_complex::Complex64;
use proptest::prelude::*;

fn centered_dft(n: usize) -> CMatrix {
    let c = (n / 2) as f64;
    Array2::from_shape_fn((n, n), |(j, k)| {
        let (j, k) = (j as f64 - c, k as f64 - c);
        Complex64::from_polar(1.0 / (n as f64).sqrt(), -2.0 * PI * j * k / n as f64)
    })
}

fn parity(n: usize) -> CMatrix {
    let c = n / 2;
    Array2::from_shape_fn((n, n), |(i, j)| {
        if j == (2 * c + n - i) % n {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::default()
        }
    })
}

fn max_dev(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn vec_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

fn pseudo_random(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = frcrypt_core::chaos::Xoshiro256StarStar::seed_from_u64(seed);
    (0..n).map(|_| Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5)).collect()
}

fn pseudo_random_matrix(r: usize, c: usize, seed: u64) -> CMatrix {
    Array2::from_shape_vec((r, c), pseudo_random(r * c, seed)).unwrap()
}

#[test]
fn order_zero_is_identity() {
    assert_eq!(build_plan(8, 0.0).unwrap().matrix(), &Array2::<Complex64>::eye(8));
    let x = pseudo_random(8, 1);
    assert_eq!(frft_1d(&build_plan(8, 0.0).unwrap(), &x).unwrap(), x);
}

#[test]
fn order_two_is_parity() {
    for n in [2, 3, 8, 9, 16] {
        let dev = max_dev(build_plan(n, 2.0).unwrap().matrix(), &parity(n));
        assert!(dev <= 1e-10, "n = {n}: {dev:e}");
    }
}

#[test]
fn order_one_is_centered_dft() {
    for n in [2, 3, 4, 5, 6, 7, 8, 16, 17, 64, 128, 256] {
        let dev = max_dev(build_plan(n, 1.0).unwrap().matrix(), &centered_dft(n));
        assert!(dev <= 1e-10, "n = {n}: {dev:e}");
    }
}

#[test]
fn order_three_is_inverse_dft() {
    let n = 16;
    let inv = centered_dft(n).t().mapv(|z| z.conj());
    assert!(max_dev(build_plan(n, 3.0).unwrap().matrix(), &inv) <= 1e-10);
}

#[test]
fn half_orders_undo_each_other() {
    let x = pseudo_random(32, 2);
    let y = frft_1d(&build_plan(32, 0.5).unwrap(), &x).unwrap();
    let back = frft_1d(&build_plan(32, -0.5).unwrap(), &y).unwrap();
    assert!(vec_dev(&x, &back) <= 1e-10);
}

#[test]
fn gaussian_is_self_transform() {
    // exp(-pi u^2) sampled on the centred grid u = (n - N/2) / sqrt(N).
    let n = 64;
    let c = (n / 2) as f64;
    let g: Vec<Complex64> = (0..n)
        .map(|i| {
            let u = (i as f64 - c) / (n as f64).sqrt();
            Complex64::new((-PI * u * u).exp(), 0.0)
        })
        .collect();
    let out = frft_1d(&build_plan(n, 0.5).unwrap(), &g).unwrap();
    let diff: Vec<Complex64> = out.iter().zip(&g).map(|(a, b)| a - b).collect();
    let rel = l2(&diff) / l2(&g);
    assert!(rel <= 1e-3, "relative error {rel:e}");
}

#[test]
fn adjoint_is_inverse() {
    for n in [4, 9, 32] {
        for a in [0.2, 0.5, 1.7, 2.9] {
            let fwd = build_plan(n, a).unwrap();
            let inv = build_plan(n, -a).unwrap();
            let adj = fwd.matrix().t().mapv(|z| z.conj());
            assert!(max_dev(inv.matrix(), &adj) <= 1e-10);
        }
    }
}

#[test]
fn period_four() {
    for n in [4, 8, 16] {
        for a in [0.1, 0.7, 1.5, 3.3] {
            let p = build_plan(n, a).unwrap();
            for shift in [4.0, -4.0, 8.0] {
                let q = build_plan(n, a + shift).unwrap();
                assert!(max_dev(p.matrix(), q.matrix()) <= 1e-10, "n={n} a={a} shift={shift}");
            }
        }
    }
}

#[test]
fn additivity_on_a_grid() {
    let n = 16;
    let x = pseudo_random(n, 3);
    for i in 1..=19 {
        for j in (1..=19).step_by(3) {
            let (a1, a2) = (i as f64 / 10.0, j as f64 / 10.0);
            let two = frft_1d(&build_plan(n, a2).unwrap(), &frft_1d(&build_plan(n, a1).unwrap(), &x).unwrap()).unwrap();
            let one = frft_1d(&build_plan(n, a1 + a2).unwrap(), &x).unwrap();
            assert!(vec_dev(&two, &one) <= 1e-10, "a1={a1} a2={a2}");
        }
    }
}

#[test]
fn frft_2d_examples() {
    let x = pseudo_random_matrix(8, 12, 4);
    assert_eq!(frft_2d(&x, OrderPair::new(0.0, 0.0), PlanSource::Cached).unwrap(), x);

    let y = frft_2d(&x, OrderPair::new(0.3, 0.7), PlanSource::Cached).unwrap();
    let back = frft_2d(&y, OrderPair::new(-0.3, -0.7), PlanSource::Cached).unwrap();
    assert!(max_dev(&x, &back) <= 1e-9);

    let (a1, b1, a2, b2) = (0.35, 1.2, 0.8, -0.45);
    let two = frft_2d(
        &frft_2d(&x, OrderPair::new(a1, b1), PlanSource::Cached).unwrap(),
        OrderPair::new(a2, b2),
        PlanSource::Cached,
    )
    .unwrap();
    let one = frft_2d(&x, OrderPair::new(a1 + a2, b1 + b2), PlanSource::Cached).unwrap();
    assert!(max_dev(&two, &one) <= 1e-9);

    let fro = |m: &CMatrix| m.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    assert!((fro(&y) - fro(&x)).abs() <= 1e-9);
}

#[test]
fn frft_2d_is_columns_then_rows() {
    let x = pseudo_random_matrix(6, 10, 5);
    let (ro, co) = (0.4, 1.1);
    let y = frft_2d(&x, OrderPair::new(ro, co), PlanSource::Fresh).unwrap();
    let col_plan = build_plan(6, co).unwrap();
    let row_plan = build_plan(10, ro).unwrap();
    let mut want = x.clone();
    for mut col in want.columns_mut() {
        let v = frft_1d(&col_plan, &col.to_vec()).unwrap();
        col.assign(&ndarray::ArrayView1::from(&v));
    }
    for mut row in want.rows_mut() {
        let v = frft_1d(&row_plan, &row.to_vec()).unwrap();
        row.assign(&ndarray::ArrayView1::from(&v));
    }
    assert!(max_dev(&y, &want) <= 1e-12);
}

#[test]
fn ifrft_2d_examples() {
    let x = pseudo_random_matrix(8, 8, 6);
    let o = OrderPair::new(0.5, 0.5);
    let y = frft_2d(&x, o, PlanSource::Cached).unwrap();
    assert!(max_dev(&ifrft_2d(&y, o, PlanSource::Cached).unwrap(), &x) <= 1e-9);
    assert_eq!(ifrft_2d(&x, OrderPair::new(0.0, 0.0), PlanSource::Cached).unwrap(), x);
    assert_eq!(
        ifrft_2d(&x, o, PlanSource::Cached).unwrap(),
        frft_2d(&x, OrderPair::new(-0.5, -0.5), PlanSource::Cached).unwrap()
    );
}

#[test]
fn cache_is_transparent() {
    let a = plan(20, 0.123, PlanSource::Cached).unwrap();
    let b = plan(20, 0.123, PlanSource::Fresh).unwrap();
    assert_eq!(a.matrix(), b.matrix());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unitary_for_any_order(n in 2usize..40, a in -6.0f64..6.0, seed in any::<u64>()) {
        let p = build_plan(n, a).unwrap();
        let x = pseudo_random(n, seed);
        let y = frft_1d(&p, &x).unwrap();
        prop_assert!((l2(&y) - l2(&x)).abs() <= 1e-10);
    }

    #[test]
    fn additive_for_any_orders(n in 2usize..40, a1 in 0.1f64..1.9, a2 in 0.1f64..1.9, seed in any::<u64>()) {
        let x = pseudo_random(n, seed);
        let two = frft_1d(&build_plan(n, a2).unwrap(), &frft_1d(&build_plan(n, a1).unwrap(), &x).unwrap()).unwrap();
        let one = frft_1d(&build_plan(n, a1 + a2).unwrap(), &x).unwrap();
        prop_assert!(vec_dev(&two, &one) <= 1e-10);
    }

    #[test]
    fn linear(n in 2usize..32, a in -2.0f64..2.0, s in -3.0f64..3.0, t in -3.0f64..3.0, seed in any::<u64>()) {
        let p = build_plan(n, a).unwrap();
        let x = pseudo_random(n, seed);
        let y = pseudo_random(n, seed.wrapping_add(1));
        let (s, t) = (Complex64::new(s, 0.5), Complex64::new(-0.25, t));
        let mix: Vec<Complex64> = x.iter().zip(&y).map(|(a, b)| s * a + t * b).collect();
        let lhs = frft_1d(&p, &mix).unwrap();
        let fx = frft_1d(&p, &x).unwrap();
        let fy = frft_1d(&p, &y).unwrap();
        let rhs: Vec<Complex64> = fx.iter().zip(&fy).map(|(a, b)| s * a + t * b).collect();
        prop_assert!(vec_dev(&lhs, &rhs) <= 1e-10);
    }
}
