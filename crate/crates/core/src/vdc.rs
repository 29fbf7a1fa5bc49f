//! Both sides of the van der Corput inequality for finite complex sequences:
//!
//! ```text
//! |(1/N) Σ_{n<N} a_n|²  ≤  (N+H)/(N²(H+1)) Σ_{n<N} |a_n|²
//!                         + 2(N+H)/(N²(H+1)²) Σ_{h=1}^{H} (H+1−h) Re Σ_{n<N−h} a_n conj(a_{n+h})
//! ```
//!
//! for `0 ≤ H ≤ N−1`. The right side is evaluated directly in `O(N·H)`; the
//! correlation sums keep their sign.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::sum::{CompensatedSum, ComplexSum};

/// Slack below which a negative `rhs − lhs` still counts as holding.
pub const VDC_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VdcReport {
    pub n: usize,
    pub h: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

pub fn vdc_lhs(seq: &[Complex64]) -> Result<f64> {
    if seq.is_empty() {
        return Err(LabError::Contract("sequence must be nonempty".into()));
    }
    let total: ComplexSum = seq.iter().copied().collect();
    Ok((total.value() / seq.len() as f64).norm_sqr())
}

pub fn vdc_rhs(seq: &[Complex64], h: usize) -> Result<f64> {
    let n = seq.len();
    if n == 0 {
        return Err(LabError::Contract("sequence must be nonempty".into()));
    }
    if h >= n {
        return Err(LabError::Contract(format!(
            "H must lie in [0, N−1] = [0, {}], got {h}",
            n - 1
        )));
    }
    let (nf, hf) = (n as f64, h as f64);
    let energy: CompensatedSum = seq.iter().map(|a| a.norm_sqr()).collect();
    if h == 0 {
        return Ok(energy.value() / nf);
    }
    let diagonal = (nf + hf) / (nf * nf * (hf + 1.0)) * energy.value();
    let weighted: CompensatedSum = (1..=h)
        .map(|shift| {
            let corr: CompensatedSum = seq
                .iter()
                .zip(&seq[shift..])
                .map(|(x, y)| (x * y.conj()).re)
                .collect();
            (h + 1 - shift) as f64 * corr.value()
        })
        .collect();
    Ok(diagonal + 2.0 * (nf + hf) / (nf * nf * (hf + 1.0) * (hf + 1.0)) * weighted.value())
}

pub fn vdc_check(seq: &[Complex64], h: usize) -> Result<VdcReport> {
    let rhs = vdc_rhs(seq, h)?;
    let lhs = vdc_lhs(seq)?;
    let slack = rhs - lhs;
    Ok(VdcReport {
        n: seq.len(),
        h,
        lhs,
        rhs,
        slack,
        holds: slack >= -VDC_SLACK,
    })
}
