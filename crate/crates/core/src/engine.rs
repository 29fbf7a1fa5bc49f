//! Double-recurrence Wiener-Wintner averages
//!
//! ```text
//! W_N(f₁, f₂, x, p, t) = (1/N) Σ_{n=0}^{N−1} f₁(T^{an}x) f₂(T^{bn}x) e^{2πi p(n) t}
//! ```
//!
//! together with their convergence traces in `N` and their suprema over `t`.
//!
//! The supremum over `t` is taken over `[0, 1)` when `p` has integer
//! coefficients (then `t ↦ W_N(t)` is 1-periodic) and over a caller-supplied
//! interval otherwise. On the unit interval the weights are binned by the
//! value of `p(n)`, which turns `N·W_N` into a trigonometric polynomial
//! `S(t) = Σ_k c_k e^{2πikt}` of degree `P` (the span of `p` on the window).
//! `S` is evaluated on an oversampled grid by FFT, the best node is refined by
//! parabolic interpolation on `|S|²`, and Bernstein's inequality
//! `|S'| ≤ 2πP·Σ|c_k|` certifies how far the true supremum can lie above the
//! best grid value. The reported error adds a floating-point allowance of
//! `(K + 8)·ε·Σ|c_k|/N` for `K` nonzero bins.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{LabError, Result};
use crate::observable::Observable;
use crate::phase::PhaseStream;
use crate::poly::PolyReal;
use crate::sum::{CompensatedSum, ComplexSum};
use crate::torus::{Point, SystemSpec, Walker};

/// Largest polynomial span accepted by the fft-binned method.
pub const MAX_FFT_SPAN: u64 = 1 << 22;

/// Default grid oversampling factor.
pub const DEFAULT_OVERSAMPLE: usize = 4;

/// Parabolic refinement rounds after the grid search.
pub const REFINEMENT_ROUNDS: usize = 2;

#[derive(Debug, Clone)]
pub struct AverageSpec {
    pub sys: SystemSpec,
    pub f1: Observable,
    pub f2: Observable,
    pub a: i64,
    pub b: i64,
    pub p: PolyReal,
    pub start: Point,
}

impl AverageSpec {
    pub fn new(
        sys: SystemSpec,
        f1: Observable,
        f2: Observable,
        a: i64,
        b: i64,
        p: PolyReal,
        start: Point,
    ) -> Result<Self> {
        if a == b {
            return Err(LabError::Contract(format!("exponents must differ, got a = b = {a}")));
        }
        let dim = sys.dimension();
        for f in [&f1, &f2] {
            if let Some(d) = f.dimension() {
                if d != dim {
                    return Err(LabError::DimensionMismatch {
                        expected: dim,
                        found: d,
                    });
                }
            }
        }
        if start.dimension() != dim {
            return Err(LabError::DimensionMismatch {
                expected: dim,
                found: start.dimension(),
            });
        }
        Ok(AverageSpec {
            sys,
            f1,
            f2,
            a,
            b,
            p,
            start,
        })
    }

    /// Same data with a different base point.
    pub fn with_start(&self, start: Point) -> Result<Self> {
        AverageSpec::new(
            self.sys.clone(),
            self.f1.clone(),
            self.f2.clone(),
            self.a,
            self.b,
            self.p.clone(),
            start,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AverageResult {
    pub n: usize,
    pub t: f64,
    pub value: Complex64,
}

impl AverageResult {
    pub fn abs(&self) -> f64 {
        self.value.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMethod {
    FftBinned,
    Grid,
}

impl fmt::Display for ScanMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanMethod::FftBinned => "fft-binned",
            ScanMethod::Grid => "grid",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupScanResult {
    pub n: usize,
    pub t_star: f64,
    pub sup_value: f64,
    pub method: ScanMethod,
    pub guaranteed_error: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScanDomain {
    UnitInterval,
    /// `points` equally spaced frequencies from `lo` to `hi` inclusive.
    Interval { lo: f64, hi: f64, points: usize },
}

/// Streams `a_n = f₁(T^{an}x)·f₂(T^{bn}x)`.
#[derive(Debug, Clone)]
pub struct RecurrenceStream {
    f1: Observable,
    f2: Observable,
    left: Walker,
    right: Walker,
}

impl RecurrenceStream {
    pub fn new(spec: &AverageSpec) -> Result<Self> {
        Ok(RecurrenceStream {
            f1: spec.f1.clone(),
            f2: spec.f2.clone(),
            left: Walker::new(&spec.sys, &spec.start, spec.a)?,
            right: Walker::new(&spec.sys, &spec.start, spec.b)?,
        })
    }
}

impl Iterator for RecurrenceStream {
    type Item = Complex64;

    fn next(&mut self) -> Option<Complex64> {
        let v = self.f1.eval(self.left.current()) * self.f2.eval(self.right.current());
        self.left.advance();
        self.right.advance();
        Some(v)
    }
}

/// The unweighted factors `a_0, …, a_{N−1}`.
pub fn ww_sequence(spec: &AverageSpec, n: usize) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(LabError::Contract("sequence length must be at least 1".into()));
    }
    Ok(RecurrenceStream::new(spec)?.take(n).collect())
}

/// `(1/N) Σ seq[n] e^{2πi p(n) t}`.
pub fn ww_average(seq: &[Complex64], p: &PolyReal, t: f64) -> Result<AverageResult> {
    if seq.is_empty() {
        return Err(LabError::Contract("cannot average an empty sequence".into()));
    }
    let acc: ComplexSum = seq
        .iter()
        .zip(PhaseStream::new(p, t, 0))
        .map(|(a, phase)| a * phase.cis())
        .collect();
    Ok(AverageResult {
        n: seq.len(),
        t,
        value: acc.value() / seq.len() as f64,
    })
}

fn check_checkpoints(checkpoints: &[usize]) -> Result<()> {
    if checkpoints.is_empty() {
        return Err(LabError::Contract("at least one checkpoint is required".into()));
    }
    if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::Contract(
            "checkpoints must be positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `W_N(t)` at every checkpoint from one streaming pass.
pub fn trace(spec: &AverageSpec, t: f64, checkpoints: &[usize]) -> Result<Vec<AverageResult>> {
    check_checkpoints(checkpoints)?;
    let mut stream = RecurrenceStream::new(spec)?.zip(PhaseStream::new(&spec.p, t, 0));
    let mut acc = ComplexSum::new();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut count = 0usize;
    for &cp in checkpoints {
        while count < cp {
            let (a, phase) = stream.next().expect("infinite stream");
            acc.add(a * phase.cis());
            count += 1;
        }
        out.push(AverageResult {
            n: cp,
            t,
            value: acc.value() / cp as f64,
        });
    }
    Ok(out)
}

/// `p(n)` as an exact integer, for integer-coefficient `p`.
fn integer_value(p: &PolyReal, n: i64) -> Result<i64> {
    p.eval_i128(n)
        .and_then(|v| i64::try_from(v).ok())
        .ok_or(LabError::SpanTooLarge {
            span: u64::MAX,
            limit: MAX_FFT_SPAN,
        })
}

fn require_integer_poly(p: &PolyReal) -> Result<()> {
    if p.has_integer_coeffs() {
        Ok(())
    } else {
        Err(LabError::Contract(
            "the unit-interval domain needs integer coefficients (t ↦ W_N is then 1-periodic); \
             pass an explicit interval instead"
                .into(),
        ))
    }
}

/// Coefficients `c_k = Σ_{p(n)=k} a_n` of the binned trigonometric polynomial.
#[derive(Debug, Clone, Default)]
struct Bins {
    slots: BTreeMap<i64, ComplexSum>,
    count: usize,
}

impl Bins {
    fn push(&mut self, key: i64, value: Complex64) {
        self.slots.entry(key).or_default().add(value);
        self.count += 1;
    }

    fn sup(&self, oversample: usize) -> Result<SupScanResult> {
        let n = self.count;
        let (lo, hi) = match (self.slots.keys().next(), self.slots.keys().next_back()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => return Err(LabError::Contract("cannot scan an empty sequence".into())),
        };
        let span = (hi as i128 - lo as i128) as u64;
        if span > MAX_FFT_SPAN {
            return Err(LabError::SpanTooLarge {
                span,
                limit: MAX_FFT_SPAN,
            });
        }
        let coeffs: Vec<(i64, Complex64)> = self
            .slots
            .iter()
            .map(|(&k, acc)| (k - lo, acc.value()))
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .collect();
        let mass: f64 = coeffs.iter().map(|(_, c)| c.norm()).collect::<CompensatedSum>().value();
        if coeffs.is_empty() {
            return Ok(SupScanResult {
                n,
                t_star: 0.0,
                sup_value: 0.0,
                method: ScanMethod::FftBinned,
                guaranteed_error: Some(0.0),
            });
        }

        let grid = oversample * (span as usize + 1);
        let mut buffer = vec![Complex64::new(0.0, 0.0); grid];
        for &(k, c) in &coeffs {
            buffer[k as usize] = c;
        }
        FftPlanner::new().plan_fft_inverse(grid).process(&mut buffer);
        let (best_node, _) = buffer
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| {
                let e = v.norm_sqr();
                if e > bv {
                    (i, e)
                } else {
                    (bi, bv)
                }
            });

        let energy = |t: f64| -> f64 {
            let angle = Angle::new(t);
            coeffs
                .iter()
                .map(|&(k, c)| c * angle.mul_int(k).cis())
                .collect::<ComplexSum>()
                .value()
                .norm_sqr()
        };
        let spacing = 1.0 / grid as f64;
        let (t_star, best) = refine(energy, best_node as f64 * spacing, spacing);

        let n_f = n as f64;
        let bernstein = std::f64::consts::TAU * span as f64 * mass * 0.5 * spacing / n_f;
        // floating-point evaluation error of either side of the comparison
        let rounding = (coeffs.len() + 8) as f64 * f64::EPSILON * mass / n_f;
        Ok(SupScanResult {
            n,
            t_star: Angle::new(t_star).value(),
            sup_value: best.sqrt() / n_f,
            method: ScanMethod::FftBinned,
            guaranteed_error: Some(bernstein + rounding),
        })
    }
}

/// Parabolic refinement of a maximum of `f` near `t0`, shrinking the bracket each round.
fn refine(f: impl Fn(f64) -> f64, t0: f64, h0: f64) -> (f64, f64) {
    let mut best_t = t0;
    let mut best = f(t0);
    let mut h = h0;
    for _ in 0..REFINEMENT_ROUNDS {
        let (fm, fp) = (f(best_t - h), f(best_t + h));
        let curvature = fm - 2.0 * best + fp;
        let mut candidates = vec![(best_t - h, fm), (best_t + h, fp)];
        if curvature < 0.0 {
            let t = best_t + (0.5 * h * (fm - fp) / curvature).clamp(-h, h);
            candidates.push((t, f(t)));
        }
        for (t, v) in candidates {
            if v > best {
                best = v;
                best_t = t;
            }
        }
        h /= 8.0;
    }
    (best_t, best)
}

/// Supremum of `|W_N(t)|` over `domain`.
pub fn sup_scan(
    seq: &[Complex64],
    p: &PolyReal,
    domain: ScanDomain,
    oversample: usize,
) -> Result<SupScanResult> {
    if seq.is_empty() {
        return Err(LabError::Contract("cannot scan an empty sequence".into()));
    }
    match domain {
        ScanDomain::UnitInterval => {
            if oversample < 2 {
                return Err(LabError::Contract(format!(
                    "oversample must be at least 2, got {oversample}"
                )));
            }
            require_integer_poly(p)?;
            let mut bins = Bins::default();
            for (n, &a) in seq.iter().enumerate() {
                bins.push(integer_value(p, n as i64)?, a);
            }
            bins.sup(oversample)
        }
        ScanDomain::Interval { lo, hi, points } => grid_scan(seq, p, lo, hi, points),
    }
}

fn grid_scan(seq: &[Complex64], p: &PolyReal, lo: f64, hi: f64, points: usize) -> Result<SupScanResult> {
    if points == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(LabError::Contract(
            "grid domain needs finite lo ≤ hi and at least one point".into(),
        ));
    }
    let t_at = |j: usize| {
        if points == 1 {
            lo
        } else {
            lo + (hi - lo) * j as f64 / (points - 1) as f64
        }
    };
    let values: Vec<f64> = (0..points)
        .into_par_iter()
        .map(|j| ww_average(seq, p, t_at(j)).map(|r| r.abs()))
        .collect::<Result<_>>()?;
    let (best, sup) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    Ok(SupScanResult {
        n: seq.len(),
        t_star: t_at(best),
        sup_value: sup,
        method: ScanMethod::Grid,
        guaranteed_error: None,
    })
}

/// One fft-binned scan per checkpoint over `[0, 1)`, extending the bins prefix by prefix.
pub fn sup_trace(spec: &AverageSpec, checkpoints: &[usize], oversample: usize) -> Result<Vec<SupScanResult>> {
    check_checkpoints(checkpoints)?;
    require_integer_poly(&spec.p)?;
    if oversample < 2 {
        return Err(LabError::Contract(format!(
            "oversample must be at least 2, got {oversample}"
        )));
    }
    let mut stream = RecurrenceStream::new(spec)?;
    let mut bins = Bins::default();
    let mut out = Vec::with_capacity(checkpoints.len());
    for &cp in checkpoints {
        while bins.count < cp {
            let n = bins.count as i64;
            bins.push(integer_value(&spec.p, n)?, stream.next().expect("infinite stream"));
        }
        out.push(bins.sup(oversample)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::SkewForm;

    fn ones(n: usize) -> Vec<Complex64> {
        vec![Complex64::new(1.0, 0.0); n]
    }

    fn linear() -> PolyReal {
        PolyReal::from_integers(&[0, 1])
    }

    fn kronecker_spec(alpha: f64, x: f64) -> AverageSpec {
        AverageSpec::new(
            SystemSpec::rotation(alpha),
            Observable::character(vec![1]),
            Observable::character(vec![1]),
            1,
            2,
            linear(),
            Point::new(&[x]),
        )
        .unwrap()
    }

    #[test]
    fn rejects_equal_exponents() {
        let err = AverageSpec::new(
            SystemSpec::rotation(0.1),
            Observable::character(vec![1]),
            Observable::character(vec![1]),
            3,
            3,
            linear(),
            Point::new(&[0.0]),
        );
        assert!(matches!(err, Err(LabError::Contract(_))));
    }

    #[test]
    fn constant_observables_give_ones() {
        let one = Observable::constant(2, Complex64::new(1.0, 0.0)).unwrap();
        let spec = AverageSpec::new(
            SystemSpec::skew(2, 0.3, SkewForm::Generic).unwrap(),
            one.clone(),
            one,
            1,
            -2,
            linear(),
            Point::new(&[0.2, 0.4]),
        )
        .unwrap();
        assert_eq!(ww_sequence(&spec, 16).unwrap(), ones(16));
    }

    #[test]
    fn rotation_characters_closed_form() {
        let (alpha, x) = (0.618_033_988_749_894_8, 0.3);
        let seq = ww_sequence(&kronecker_spec(alpha, x), 50).unwrap();
        for (n, v) in seq.iter().enumerate() {
            let expected = Angle::new(2.0 * x + 3.0 * n as f64 * alpha).cis();
            assert!((v - expected).norm() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn zero_exponent_freezes_first_factor() {
        let f1 = Observable::character(vec![2]);
        let spec = AverageSpec::new(
            SystemSpec::rotation(0.17),
            f1.clone(),
            Observable::character(vec![1]),
            0,
            1,
            linear(),
            Point::new(&[0.4]),
        )
        .unwrap();
        let seq = ww_sequence(&spec, 10).unwrap();
        let f1x = f1.eval(&Point::new(&[0.4]));
        for (n, v) in seq.iter().enumerate() {
            let f2 = Angle::new(0.4 + 0.17 * n as f64).cis();
            assert!((v - f1x * f2).norm() < 1e-12);
        }
    }

    #[test]
    fn average_examples() {
        assert_eq!(ww_average(&ones(10), &linear(), 0.0).unwrap().value, Complex64::new(1.0, 0.0));
        assert!(ww_average(&ones(10), &linear(), 0.5).unwrap().abs() < 1e-15);
        assert!(ww_average(&[], &linear(), 0.5).is_err());

        let (alpha, x) = (0.618_033_988_749_894_8, 0.3);
        let seq = ww_sequence(&kronecker_spec(alpha, x), 1000).unwrap();
        let t = Angle::new(1.0 - 3.0 * alpha).value();
        let w = ww_average(&seq, &linear(), t).unwrap();
        assert!((w.value - Angle::new(2.0 * x).cis()).norm() < 1e-9);
        assert!((w.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_constant_observables() {
        let one = Observable::constant(1, Complex64::new(1.0, 0.0)).unwrap();
        let spec = AverageSpec::new(
            SystemSpec::rotation(0.2),
            one.clone(),
            one,
            1,
            2,
            linear(),
            Point::new(&[0.0]),
        )
        .unwrap();
        let tr = trace(&spec, 0.0, &[1, 10, 100]).unwrap();
        assert!(tr.iter().all(|r| r.value == Complex64::new(1.0, 0.0)));
        assert!(trace(&spec, 0.0, &[10, 10]).is_err());
        assert!(trace(&spec, 0.0, &[]).is_err());
    }

    #[test]
    fn sup_scan_phase_alignment() {
        let seq: Vec<Complex64> = (0..200).map(|n| Angle::new(-0.3 * n as f64).cis()).collect();
        let r = sup_scan(&seq, &linear(), ScanDomain::UnitInterval, 4).unwrap();
        assert_eq!(r.method, ScanMethod::FftBinned);
        assert!((r.t_star - 0.3).abs() < 1e-6, "t* = {}", r.t_star);
        assert!((r.sup_value - 1.0).abs() < 1e-9, "sup = {}", r.sup_value);
    }

    #[test]
    fn sup_scan_all_ones() {
        let r = sup_scan(&ones(4), &linear(), ScanDomain::UnitInterval, 4).unwrap();
        assert!((r.sup_value - 1.0).abs() < 1e-15);
        assert!(r.t_star.min(1.0 - r.t_star) < 1e-9);
        assert!(ww_average(&ones(4), &linear(), 0.5).unwrap().abs() < 1e-15);
    }

    #[test]
    fn sup_scan_contract_errors() {
        let frac = PolyReal::new(&[0.0, 0.5]);
        assert!(matches!(
            sup_scan(&ones(8), &frac, ScanDomain::UnitInterval, 4),
            Err(LabError::Contract(_))
        ));
        assert!(sup_scan(&ones(8), &linear(), ScanDomain::UnitInterval, 1).is_err());
        let huge = PolyReal::from_integers(&[0, 0, 0, 1]);
        assert!(matches!(
            sup_scan(&ones(512), &huge, ScanDomain::UnitInterval, 4),
            Err(LabError::SpanTooLarge { .. })
        ));
        let grid = sup_scan(
            &ones(512),
            &huge,
            ScanDomain::Interval {
                lo: 0.0,
                hi: 0.1,
                points: 11,
            },
            4,
        )
        .unwrap();
        assert_eq!(grid.method, ScanMethod::Grid);
        assert_eq!(grid.guaranteed_error, None);
        assert!((grid.sup_value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sup_trace_kronecker_and_zero() {
        let spec = kronecker_spec(0.618_033_988_749_894_8, 0.1);
        for r in sup_trace(&spec, &[10, 100, 1000], 4).unwrap() {
            assert!(r.sup_value > 0.999 && r.sup_value <= 1.0 + 1e-9, "{r:?}");
        }
        let zero = AverageSpec::new(
            SystemSpec::rotation(0.3),
            Observable::zero(),
            Observable::character(vec![1]),
            1,
            2,
            linear(),
            Point::new(&[0.0]),
        )
        .unwrap();
        assert!(sup_trace(&zero, &[5, 50], 4).unwrap().iter().all(|r| r.sup_value == 0.0));
    }
}
