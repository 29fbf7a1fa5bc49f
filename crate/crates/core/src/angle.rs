//! Angles on the circle, measured in turns.
//!
//! An [`Angle`] stores a point of `R/Z` as a 64-bit fixed-point fraction of a
//! full turn: the value is `bits / 2^64`. Addition and integer multiples are
//! wrapping integer operations, so mod-1 arithmetic on angles is exact and
//! associative. Conversions from `f64` round to the nearest multiple of
//! `2^-64`; conversions to `f64` truncate so the result always lies in
//! `[0, 1)`.

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Angle(u64);

impl Angle {
    pub const ZERO: Angle = Angle(0);

    /// Reduces `turns` mod 1. Non-finite input maps to zero.
    pub fn new(turns: f64) -> Self {
        if !turns.is_finite() {
            return Angle::ZERO;
        }
        let mut frac = turns - turns.floor();
        if frac >= 1.0 {
            frac = 0.0;
        }
        // frac * 2^64 is exact; rounding to the nearest integer may wrap to 2^64.
        let scaled = (frac * TWO_POW_64).round();
        if scaled >= TWO_POW_64 {
            Angle(0)
        } else {
            Angle(scaled as u64)
        }
    }

    pub const fn from_bits(bits: u64) -> Self {
        Angle(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// Value in `[0, 1)`.
    pub fn value(self) -> f64 {
        // Keep the top 53 bits so the conversion is exact and never rounds up to 1.
        (self.0 >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Representative in `[-1/2, 1/2)`.
    pub fn signed_value(self) -> f64 {
        (self.0 as i64) as f64 / TWO_POW_64
    }

    /// `k * self` mod 1.
    pub fn mul_int(self, k: i64) -> Self {
        Angle(self.0.wrapping_mul(k as u64))
    }

    /// Shortest distance on the circle, in `[0, 1/2]`.
    pub fn circular_distance(self, other: Angle) -> f64 {
        let d = self.0.wrapping_sub(other.0);
        let d = d.min(d.wrapping_neg());
        d as f64 / TWO_POW_64
    }

    /// `e^{2πi·self}`.
    pub fn cis(self) -> Complex64 {
        let (s, c) = (std::f64::consts::TAU * self.signed_value()).sin_cos();
        Complex64::new(c, s)
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        Angle(self.0.wrapping_add(rhs.0))
    }
}

impl AddAssign for Angle {
    fn add_assign(&mut self, rhs: Angle) {
        self.0 = self.0.wrapping_add(rhs.0);
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        Angle(self.0.wrapping_sub(rhs.0))
    }
}

impl SubAssign for Angle {
    fn sub_assign(&mut self, rhs: Angle) {
        self.0 = self.0.wrapping_sub(rhs.0);
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle(self.0.wrapping_neg())
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Angle({})", self.value())
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.value(), f)
    }
}

impl From<f64> for Angle {
    fn from(turns: f64) -> Self {
        Angle::new(turns)
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(deserializer)?;
        if !v.is_finite() {
            return Err(serde::de::Error::custom("angle must be a finite number"));
        }
        Ok(Angle::new(v))
    }
}
