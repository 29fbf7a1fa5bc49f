//! Trigonometric polynomials on the torus, `f(q) = Σ c_j e^{2πi⟨k_j, q⟩}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{LabError, Result};
use crate::torus::Point;

/// Slack allowed on the normalisation `Σ|c_j| ≤ 1`.
const NORM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub freq: Vec<i64>,
    /// `[re, im]`
    pub amp: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawObservable", into = "RawObservable")]
pub struct Observable {
    terms: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObservable {
    terms: Vec<Term>,
}

impl TryFrom<RawObservable> for Observable {
    type Error = LabError;
    fn try_from(raw: RawObservable) -> Result<Self> {
        Observable::new(raw.terms)
    }
}

impl From<Observable> for RawObservable {
    fn from(o: Observable) -> Self {
        RawObservable { terms: o.terms }
    }
}

impl Observable {
    /// Terms must share one frequency length and satisfy `Σ|amp| ≤ 1`.
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        if let Some(first) = terms.first() {
            let dim = first.freq.len();
            if let Some(bad) = terms.iter().find(|t| t.freq.len() != dim) {
                return Err(LabError::DimensionMismatch {
                    expected: dim,
                    found: bad.freq.len(),
                });
            }
        }
        if terms.iter().any(|t| !t.amp.re.is_finite() || !t.amp.im.is_finite()) {
            return Err(LabError::Contract("observable amplitudes must be finite".into()));
        }
        let norm: f64 = terms.iter().map(|t| t.amp.norm()).sum();
        if norm > 1.0 + NORM_SLACK {
            return Err(LabError::Contract(format!(
                "observable amplitudes sum to {norm}, the sup-norm bound requires at most 1"
            )));
        }
        Ok(Observable { terms })
    }

    pub fn zero() -> Self {
        Observable { terms: Vec::new() }
    }

    pub fn constant(dimension: usize, value: Complex64) -> Result<Self> {
        Self::new(vec![Term {
            freq: vec![0; dimension],
            amp: value,
        }])
    }

    /// `e^{2πi⟨freq, q⟩}`.
    pub fn character(freq: Vec<i64>) -> Self {
        Observable {
            terms: vec![Term {
                freq,
                amp: Complex64::new(1.0, 0.0),
            }],
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Frequency length, or `None` for the zero observable.
    pub fn dimension(&self) -> Option<usize> {
        self.terms.first().map(|t| t.freq.len())
    }

    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.amp.norm()).sum()
    }

    pub fn conj(&self) -> Observable {
        Observable {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    freq: t.freq.iter().map(|k| -k).collect(),
                    amp: t.amp.conj(),
                })
                .collect(),
        }
    }

    /// `f ⊗ e^{2πi⟨extra, ·⟩}` on the product with an extra torus factor.
    pub fn tensor_character(&self, extra: &[i64]) -> Observable {
        Observable {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    freq: t.freq.iter().chain(extra).copied().collect(),
                    amp: t.amp,
                })
                .collect(),
        }
    }

    pub fn eval(&self, pt: &Point) -> Complex64 {
        let coords = pt.coords();
        self.terms
            .iter()
            .map(|t| {
                let phase = t
                    .freq
                    .iter()
                    .zip(coords)
                    .fold(Angle::ZERO, |acc, (&k, &c)| acc + c.mul_int(k));
                t.amp * phase.cis()
            })
            .sum()
    }
}
