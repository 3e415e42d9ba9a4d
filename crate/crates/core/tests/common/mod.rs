#![allow(dead_code)]

use std::f64::consts::PI;

use apfourier_core::{Complex64, DiscreteSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(1/N) Σ_x f(x) e^{-2πikx/N}` by direct summation.
pub fn naive_dft(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    (0..n)
        .map(|k| {
            values
                .iter()
                .enumerate()
                .map(|(x, &v)| {
                    let phase = -2.0 * PI * ((k * x) % n) as f64 / n as f64;
                    Complex64::from_polar(v, phase)
                })
                .sum::<Complex64>()
                / n as f64
        })
        .collect()
}

pub fn naive_indicator_dft(set: &DiscreteSet) -> Vec<Complex64> {
    let mut v = vec![0.0; set.ambient()];
    for &e in set.elements() {
        v[e] = 1.0;
    }
    naive_dft(&v)
}

/// `(1/N²) Σ_{x,r} f(x) g(x+r) h(x+2r)` over `Z_N`.
pub fn brute_lambda3(f: &[f64], g: &[f64], h: &[f64]) -> f64 {
    let n = f.len();
    let mut total = 0.0;
    for x in 0..n {
        for r in 0..n {
            total += f[x] * g[(x + r) % n] * h[(x + 2 * r) % n];
        }
    }
    total / (n * n) as f64
}

/// Ordered triples `(x, y, z)` of elements with `x + y ≡ 2z (mod N)`.
pub fn brute_congruence(set: &DiscreteSet) -> u64 {
    let n = set.ambient();
    let e = set.elements();
    let mut count = 0;
    for &x in e {
        for &y in e {
            for &z in e {
                if (x + y) % n == (2 * z) % n {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Progressions `x < x + r < x + 2r` inside the set, by scanning `(x, r)`.
pub fn brute_genuine(set: &DiscreteSet) -> u64 {
    let n = set.ambient();
    let mut count = 0;
    for x in 0..n {
        for r in 1..n {
            if x + 2 * r >= n {
                break;
            }
            if set.contains(x) && set.contains(x + r) && set.contains(x + 2 * r) {
                count += 1;
            }
        }
    }
    count
}

pub fn indicator(set: &DiscreteSet) -> Vec<f64> {
    (0..set.ambient()).map(|i| if set.contains(i) { 1.0 } else { 0.0 }).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each point kept independently with a density drawn from `[0.05, 0.95]`.
pub fn random_set(rng: &mut ChaCha8Rng, n: usize) -> DiscreteSet {
    let p: f64 = rng.random_range(0.05..0.95);
    let elements: Vec<usize> = (0..n).filter(|_| rng.random_bool(p)).collect();
    DiscreteSet::new(n, elements).unwrap()
}

pub fn random_odd(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    let n = rng.random_range(lo..=hi);
    if n % 2 == 0 {
        if n < hi { n + 1 } else { n - 1 }
    } else {
        n
    }
}
