//! Exact rational helpers shared by the polynomial and identity code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::angle::Angle;

/// Exact value of a finite double.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

pub fn rational_from_int(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// `r mod 1` rounded to the nearest multiple of `2^-bits`, as an integer in `[0, 2^bits)`.
pub fn frac_fixed(r: &BigRational, bits: u32) -> BigInt {
    let modulus = BigInt::one() << bits;
    let scaled = r * BigRational::from_integer(modulus.clone());
    // round half up
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let rounded = (scaled + half).floor().to_integer();
    rounded.mod_floor(&modulus)
}

/// `r mod 1` as an [`Angle`].
pub fn rational_to_angle(r: &BigRational) -> Angle {
    Angle::from_bits(frac_fixed(r, 64).to_u64().expect("reduced below 2^64"))
}

/// `r mod 1` as a 128-bit fixed-point fraction of a turn.
pub fn rational_to_turns128(r: &BigRational) -> u128 {
    frac_fixed(r, 128).to_u128().expect("reduced below 2^128")
}

/// Exact value of an angle, `bits / 2^64`.
pub fn angle_to_rational(a: Angle) -> BigRational {
    BigRational::new(BigInt::from(a.bits()), BigInt::one() << 64u32)
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Nearest `f64` to an exact rational.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
