//! Independent reference models shared by the integration tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scsk::{BitStream, SignMagStream, TlbStream};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_stream(rng: &mut impl Rng, len: usize, density: f64) -> BitStream {
    BitStream::from_fn(len, |_| rng.random_bool(density))
}

pub fn random_tlb(rng: &mut impl Rng, len: usize) -> TlbStream {
    let (dp, dn) = (rng.random::<f64>(), rng.random::<f64>());
    TlbStream::new(random_stream(rng, len, dp), random_stream(rng, len, dn)).unwrap()
}

/// Sign line masked to the magnitude support.
pub fn random_signmag(rng: &mut impl Rng, len: usize) -> SignMagStream {
    let density = rng.random::<f64>();
    let m = random_stream(rng, len, density);
    let s = random_stream(rng, len, 0.5).and(&m).unwrap();
    SignMagStream::new(s, m).unwrap()
}

/// Count-level decode, written out bit by bit.
pub fn decode_by_counting(s: &TlbStream) -> f64 {
    let p = s.p().iter().filter(|&b| b).count() as f64;
    let n = s.n().iter().filter(|&b| b).count() as f64;
    (p - n) / s.len() as f64
}

/// Ordinary Kaczmarz, `x <- x + (y_i - a_i.x) / |a_i|^2 a_i`, returning every
/// iterate.
pub fn kaczmarz_iterates(a: &[Vec<f64>], y: &[f64], iterations: usize) -> Vec<Vec<f64>> {
    let n = a[0].len();
    let mut x = vec![0.0; n];
    let mut out = Vec::with_capacity(iterations);
    for k in 0..iterations {
        let row = &a[k % a.len()];
        let pred: f64 = row.iter().zip(&x).map(|(r, v)| r * v).sum();
        let norm: f64 = row.iter().map(|r| r * r).sum();
        let g = (y[k % a.len()] - pred) / norm;
        for (v, r) in x.iter_mut().zip(row) {
            *v += g * r;
        }
        out.push(x.clone());
    }
    out
}

/// NLMS with unit step size over the tapped delay line of `u`; returns the
/// coefficient vector after every sample.
pub fn nlms_iterates(taps: usize, u: &[f64], d: &[f64]) -> Vec<Vec<f64>> {
    let mut w = vec![0.0; taps];
    let mut out = Vec::with_capacity(u.len());
    for i in 0..u.len() {
        let reg: Vec<f64> = (0..taps).map(|k| if i >= k { u[i - k] } else { 0.0 }).collect();
        let e = d[i] - reg.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        let energy: f64 = reg.iter().map(|r| r * r).sum();
        for (wk, r) in w.iter_mut().zip(&reg) {
            *wk += e * r / energy;
        }
        out.push(w.clone());
    }
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
