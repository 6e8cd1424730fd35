//! Floating-point character moduli checked against the exact trichotomy.

use std::f64::consts::PI;

use proptest::prelude::*;
use tsl_core::measures::{Carrier, NoiseSpec, ProbMeasure};
use tsl_core::rational::{ratio, to_f64};
use tsl_core::solver::{fourier_trichotomy, Trichotomy};

const TOL: f64 = 1e-9;

/// `|Σ_x μ(x) e^{2πipx/n}|` by direct summation.
fn modulus(weights: &[f64], p: usize) -> f64 {
    let n = weights.len() as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for (x, w) in weights.iter().enumerate() {
        let t = 2.0 * PI * (p * x) as f64 / n;
        re += w * t.cos();
        im += w * t.sin();
    }
    (re * re + im * im).sqrt()
}

fn oracle(weights: &[f64]) -> (Vec<usize>, usize, Vec<usize>, Trichotomy) {
    let n = weights.len();
    let z: Vec<usize> = (0..n).filter(|&p| (modulus(weights, p) - 1.0).abs() < TOL).collect();
    let p_mu = z.iter().copied().find(|&p| p > 0).unwrap_or(0);
    let h: Vec<usize> = (0..n)
        .filter(|&g| {
            z.iter().all(|&p| {
                let t = 2.0 * PI * (p * g) as f64 / n as f64;
                (t.cos() - 1.0).abs() < TOL && t.sin().abs() < TOL
            })
        })
        .collect();
    let t = match p_mu {
        0 => Trichotomy::C1,
        1 => Trichotomy::C2,
        _ => Trichotomy::C3,
    };
    (z, p_mu, h, t)
}

fn noise(n: usize, weights: &[(usize, (i64, i64))]) -> NoiseSpec {
    let pairs: Vec<_> = weights.iter().map(|&(i, (p, q))| (i, ratio(p, q))).collect();
    NoiseSpec::iid(ProbMeasure::from_pairs(Carrier::Elements(n), &pairs).unwrap()).unwrap()
}

fn check(n: usize, nz: &NoiseSpec) {
    let floats: Vec<f64> = nz.tail().weights().iter().map(to_f64).collect();
    let (z, p_mu, h, t) = oracle(&floats);
    let r = fourier_trichotomy(n, nz).unwrap();
    assert_eq!(r.z_mu, z);
    assert_eq!(r.p_mu, p_mu);
    assert_eq!(r.h_mu, h);
    assert_eq!(r.trichotomy, t);
}

#[test]
fn reference_cases_agree_with_oracle() {
    let cases = [
        (2, noise(2, &[(0, (1, 2)), (1, (1, 2))]), 0, Trichotomy::C1),
        (3, noise(3, &[(1, (1, 1))]), 1, Trichotomy::C2),
        (4, noise(4, &[(0, (1, 2)), (2, (1, 2))]), 2, Trichotomy::C3),
    ];
    for (n, nz, p_mu, t) in cases {
        let floats: Vec<f64> = nz.tail().weights().iter().map(to_f64).collect();
        let (_, op, _, ot) = oracle(&floats);
        assert_eq!((op, ot), (p_mu, t));
        check(n, &nz);
    }
    let r = fourier_trichotomy(4, &noise(4, &[(0, (1, 2)), (2, (1, 2))])).unwrap();
    assert_eq!(r.h_mu, vec![0, 2]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_cyclic_noise_agrees_with_oracle(
        n in 1usize..10,
        raw in proptest::collection::vec(0i64..4, 10),
    ) {
        let mut w: Vec<i64> = raw[..n].to_vec();
        if w.iter().all(|&x| x == 0) {
            w[0] = 1;
        }
        let total: i64 = w.iter().sum();
        let pairs: Vec<_> = w.iter().enumerate().filter(|(_, &x)| x > 0).map(|(i, &x)| (i, ratio(x, total))).collect();
        let nz = NoiseSpec::iid(ProbMeasure::from_pairs(Carrier::Elements(n), &pairs).unwrap()).unwrap();
        check(n, &nz);
    }
}
