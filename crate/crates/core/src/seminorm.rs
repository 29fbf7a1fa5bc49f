//! Finite-truncation Gowers-Host-Kra seminorm estimates.
//!
//! Along an orbit `u_n = f(T^n x)` the estimator uses the recursion
//!
//! ```text
//! L_1(u)     = |(1/N) Σ_{n<N} u_n|
//! L_{k+1}(u) = ((1/H) Σ_{h=1}^{H} L_k(u · conj(u∘shift_h))^{2^k})^{1/2^{k+1}}
//! ```
//!
//! and averages `L_k` over seeded sample points. Internally the power
//! `L_k^{2^k}` is carried, so the root is taken once at the end.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{sup_scan, ww_sequence, AverageSpec, ScanDomain};
use crate::error::{LabError, Result};
use crate::observable::Observable;
use crate::sum::{CompensatedSum, ComplexSum};
use crate::torus::{sample_points, SystemSpec, Walker};

pub const GHK_MAX_ORDER: u32 = 4;

/// Upper limit on `samples·H^{k−1}·N`.
pub const GHK_BUDGET: f64 = 1e9;

/// Upper limit on `N^{k+1}` for [`gowers_norm_finite`].
pub const FINITE_GOWERS_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GhkParams {
    pub n: usize,
    pub h: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for GhkParams {
    fn default() -> Self {
        GhkParams {
            n: 100_000,
            h: 1_000,
            samples: 8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeminormEstimate {
    pub k: u32,
    pub value: f64,
    pub n: usize,
    pub h: usize,
    pub samples: usize,
}

fn root_pow2(mut v: f64, k: u32) -> f64 {
    for _ in 0..k {
        v = v.sqrt();
    }
    v
}

fn mean_complex(seq: &[Complex64]) -> Complex64 {
    seq.iter().copied().collect::<ComplexSum>().value() / seq.len() as f64
}

/// `L_k(seq)^{2^k}`; `seq` must hold at least `n + (k−1)h` values.
fn level_power(seq: &[Complex64], k: u32, n: usize, h: usize) -> f64 {
    if k == 1 {
        return mean_complex(&seq[..n]).norm_sqr();
    }
    let powers: Vec<f64> = (1..=h)
        .into_par_iter()
        .map(|shift| {
            let diff: Vec<Complex64> = seq
                .iter()
                .zip(&seq[shift..])
                .map(|(u, v)| u * v.conj())
                .collect();
            level_power(&diff, k - 1, n, h)
        })
        .collect();
    powers.iter().copied().collect::<CompensatedSum>().value() / h as f64
}

pub fn ghk_estimate(sys: &SystemSpec, f: &Observable, k: u32, params: &GhkParams) -> Result<SeminormEstimate> {
    let GhkParams { n, h, samples, seed } = *params;
    if !(1..=GHK_MAX_ORDER).contains(&k) {
        return Err(LabError::Range(format!("seminorm order must lie in 1..=4, got {k}")));
    }
    if n == 0 || h == 0 || samples == 0 {
        return Err(LabError::Contract("N, H and samples must all be at least 1".into()));
    }
    if let Some(d) = f.dimension() {
        if d != sys.dimension() {
            return Err(LabError::DimensionMismatch {
                expected: sys.dimension(),
                found: d,
            });
        }
    }
    let required = samples as f64 * (h as f64).powi(k as i32 - 1) * n as f64;
    if required > GHK_BUDGET {
        return Err(LabError::Budget {
            required,
            limit: GHK_BUDGET,
        });
    }
    let length = n + (k as usize - 1) * h;
    let values: Vec<f64> = sample_points(sys, samples, seed)
        .par_iter()
        .map(|x| -> Result<f64> {
            let mut walker = Walker::new(sys, x, 1)?;
            let seq: Vec<Complex64> = (0..length)
                .map(|_| {
                    let v = f.eval(walker.current());
                    walker.advance();
                    v
                })
                .collect();
            Ok(root_pow2(level_power(&seq, k, n, h), k))
        })
        .collect::<Result<_>>()?;
    Ok(SeminormEstimate {
        k,
        value: values.iter().copied().collect::<CompensatedSum>().value() / samples as f64,
        n,
        h,
        samples,
    })
}

/// The `U^k` norm on `Z_N` (`k ∈ {2, 3}`) by the literal sum over all parallelepipeds.
pub fn gowers_norm_finite(seq: &[Complex64], k: u32) -> Result<f64> {
    if k != 2 && k != 3 {
        return Err(LabError::Range(format!("finite Gowers norm supports k = 2 or 3, got {k}")));
    }
    let n = seq.len();
    if n == 0 {
        return Err(LabError::Contract("sequence must be nonempty".into()));
    }
    let cost = (n as u64).checked_pow(k + 1).unwrap_or(u64::MAX);
    if cost > FINITE_GOWERS_BUDGET {
        return Err(LabError::Budget {
            required: cost as f64,
            limit: FINITE_GOWERS_BUDGET as f64,
        });
    }
    let vertices = 1usize << k;
    let shifts = n.pow(k);
    let per_x: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut acc = ComplexSum::new();
            let mut h = vec![0usize; k as usize];
            for code in 0..shifts {
                let mut rest = code;
                for slot in h.iter_mut() {
                    *slot = rest % n;
                    rest /= n;
                }
                let mut term = Complex64::new(1.0, 0.0);
                for omega in 0..vertices {
                    let offset: usize = (0..k as usize).filter(|&i| omega >> i & 1 == 1).map(|i| h[i]).sum();
                    let v = seq[(x + offset) % n];
                    term *= if omega.count_ones() % 2 == 1 { v.conj() } else { v };
                }
                acc.add(term);
            }
            acc.value()
        })
        .collect();
    let total = per_x.iter().copied().collect::<ComplexSum>().value();
    Ok(root_pow2((total.re / cost as f64).max(0.0), k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PairBoundParams {
    /// Length of each average.
    pub n: usize,
    /// Base points for the outer mean of `sup_t |W_N|²`.
    pub samples: usize,
    pub seed: u64,
    pub oversample: usize,
    pub seminorm: GhkParams,
}

impl Default for PairBoundParams {
    fn default() -> Self {
        PairBoundParams {
            n: 1_000,
            samples: 8,
            seed: 0,
            oversample: 4,
            seminorm: GhkParams {
                n: 2_000,
                h: 8,
                samples: 4,
                seed: 0,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairBoundRow {
    pub k_poly: usize,
    pub n: usize,
    pub samples: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; infinite or NaN when `rhs = 0`.
    pub ratio: f64,
}

/// Mean over sampled `x` of `sup_t |W_N|²` against `min(⫴f₁⫴²_{k+2}, ⫴f₂⫴²_{k+2})`.
pub fn estimate_pair_bound(spec: &AverageSpec, k_poly: usize, params: &PairBoundParams) -> Result<PairBoundRow> {
    if k_poly > 2 {
        return Err(LabError::Range(format!(
            "polynomial degree must be at most 2 (seminorm order k+2 ≤ 4), got {k_poly}"
        )));
    }
    if spec.p.degree() != Some(k_poly) || !spec.p.has_integer_coeffs() {
        return Err(LabError::Contract(format!(
            "p must have integer coefficients and degree {k_poly}"
        )));
    }
    if params.samples == 0 || params.n == 0 {
        return Err(LabError::Contract("N and samples must be at least 1".into()));
    }
    let order = k_poly as u32 + 2;
    let rhs = [&spec.f1, &spec.f2]
        .iter()
        .map(|f| ghk_estimate(&spec.sys, f, order, &params.seminorm).map(|e| e.value * e.value))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);

    let sups: Vec<f64> = sample_points(&spec.sys, params.samples, params.seed)
        .into_par_iter()
        .map(|x| -> Result<f64> {
            let seq = ww_sequence(&spec.with_start(x)?, params.n)?;
            let s = sup_scan(&seq, &spec.p, ScanDomain::UnitInterval, params.oversample)?;
            Ok(s.sup_value * s.sup_value)
        })
        .collect::<Result<_>>()?;
    let lhs = sups.iter().copied().collect::<CompensatedSum>().value() / params.samples as f64;
    Ok(PairBoundRow {
        k_poly,
        n: params.n,
        samples: params.samples,
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}
