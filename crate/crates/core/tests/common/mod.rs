//! Independent oracles shared by the integration tests. None of these call
//! into the engine's phase machinery.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Fractional part of `k·t` for `|k| < 2^53`, with the product error recovered by FMA.
pub fn frac_product(k: i64, t: f64) -> f64 {
    let kf = k as f64;
    let p = kf * t;
    let e = kf.mul_add(t, -p);
    let f = (p - p.floor()) + e;
    f - f.floor()
}

pub fn cis_turns(x: f64) -> Complex64 {
    let (s, c) = (TAU * x).sin_cos();
    Complex64::new(c, s)
}

/// Neumaier sum written out independently of the library.
pub fn kahan(values: impl IntoIterator<Item = Complex64>) -> Complex64 {
    let (mut s, mut c) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for v in values {
        for (sum, comp, x) in [(&mut s.re, &mut c.re, v.re), (&mut s.im, &mut c.im, v.im)] {
            let t = *sum + x;
            *comp += if sum.abs() >= x.abs() { (*sum - t) + x } else { (x - t) + *sum };
            *sum = t;
        }
    }
    s + c
}

/// `(1/N) Σ seq[n] e^{2πi p(n) t}` for integer `p` given by its coefficients.
pub fn weyl_direct(seq: &[Complex64], p: &[i64], t: f64) -> Complex64 {
    let total = kahan(seq.iter().enumerate().map(|(n, a)| {
        let k = p.iter().rev().fold(0i128, |acc, &c| acc * n as i128 + c as i128);
        a * cis_turns(frac_product(k as i64, t))
    }));
    total / seq.len() as f64
}

pub fn random_sequence(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale)
        .collect()
}

/// `Σ_ξ |f̂(ξ)|⁴` with `f̂(ξ) = (1/N) Σ_x f(x) e^{−2πi xξ/N}`, by direct DFT.
pub fn fourier_l4(seq: &[Complex64]) -> f64 {
    let n = seq.len();
    (0..n)
        .map(|xi| {
            let hat = kahan(
                seq.iter()
                    .enumerate()
                    .map(|(x, f)| f * cis_turns(-(((x * xi) % n) as f64) / n as f64)),
            ) / n as f64;
            hat.norm_sqr().powi(2)
        })
        .sum()
}

/// In-place `x_j ← Σ_k x_k e^{+2πi jk/M}` for `M` a power of two (iterative radix 2).
pub fn inverse_dft_pow2(x: &mut [Complex64]) {
    let m = x.len();
    assert!(m.is_power_of_two());
    let bits = m.trailing_zeros();
    for i in 0..m {
        let r = i.reverse_bits() >> (usize::BITS - bits);
        if i < r {
            x.swap(i, r);
        }
    }
    let roots: Vec<Complex64> = (0..m / 2).map(|k| cis_turns(k as f64 / m as f64)).collect();
    let mut len = 2;
    while len <= m {
        let stride = m / len;
        for block in x.chunks_exact_mut(len) {
            let (lo, hi) = block.split_at_mut(len / 2);
            for (k, (u, v)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                let t = *v * roots[k * stride];
                *v = *u - t;
                *u += t;
            }
        }
        len *= 2;
    }
}

/// Oracle supremum of `|(1/N) Σ a_n e^{2πi k_n t}|` over `[0, 1)` for integer keys `k_n ≥ 0`.
///
/// The best node of a power-of-two grid with at least eight points per unit
/// of degree locates the lobe; `fine` points of direct exact-phase summation
/// across one node spacing either side of it give the value.
pub fn brute_sup(seq: &[Complex64], keys: &[u64], fine: usize) -> (f64, f64) {
    let degree = *keys.iter().max().expect("nonempty") as usize;
    let m = (8 * (degree + 1)).next_power_of_two();
    let mut grid = vec![Complex64::new(0.0, 0.0); m];
    for (a, &k) in seq.iter().zip(keys) {
        grid[k as usize] += a;
    }
    inverse_dft_pow2(&mut grid);
    let best_j = (0..m).fold(0, |b, j| if grid[j].norm_sqr() > grid[b].norm_sqr() { j } else { b });

    let spacing = 1.0 / m as f64;
    let centre = best_j as f64 * spacing;
    let (mut t_best, mut v_best) = (centre, -1.0);
    for i in 0..fine {
        let t = centre - spacing + 2.0 * spacing * i as f64 / (fine - 1) as f64;
        let v = kahan(seq.iter().zip(keys).map(|(a, &k)| a * cis_turns(frac_product(k as i64, t)))).norm();
        if v > v_best {
            v_best = v;
            t_best = t;
        }
    }
    (t_best.rem_euclid(1.0), v_best / seq.len() as f64)
}
