//! Mod-1 polynomial phase streams.
//!
//! A [`PhaseStream`] yields `p(n)·t mod 1` for consecutive `n` using `deg p + 1`
//! finite-difference registers. The registers are 128-bit fixed-point turns,
//! initialised exactly from the rational values of `p·t`; each step is a chain
//! of wrapping additions and is therefore exact. The only error is the initial
//! rounding of each register (at most `2^-129`), which grows like `C(n, j)` in
//! register `j`: for degree 4 that is below `1e-18` turns at `n = 10^6`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::angle::Angle;
use crate::exact::{rational_from_f64, rational_to_turns128};
use crate::poly::PolyReal;

#[derive(Debug, Clone)]
pub struct PhaseStream {
    registers: Vec<u128>,
    position: i64,
}

impl PhaseStream {
    /// Stream of `p(n)·t mod 1` for `n = start, start + 1, …`.
    pub fn new(p: &PolyReal, t: f64, start: i64) -> Self {
        Self::with_exact_scale(p, &rational_from_f64(t), start)
    }

    /// Same as [`PhaseStream::new`] with an exact rational frequency.
    pub fn with_exact_scale(p: &PolyReal, scale: &BigRational, start: i64) -> Self {
        let scaled = p.scale(scale);
        let order = scaled.degree().map_or(0, |d| d + 1);
        // values P(start), …, P(start + order − 1), then forward differences in place
        let mut diffs: Vec<BigRational> = (0..order as i64)
            .map(|i| scaled.eval_exact(&BigInt::from(start + i)))
            .collect();
        for level in 1..order {
            for i in (level..order).rev() {
                diffs[i] = &diffs[i] - &diffs[i - 1];
            }
        }
        PhaseStream {
            registers: diffs.iter().map(rational_to_turns128).collect(),
            position: start,
        }
    }

    /// Index `n` of the phase the next call to [`Iterator::next`] returns.
    pub fn position(&self) -> i64 {
        self.position
    }

    /// Current phase without advancing.
    pub fn peek(&self) -> Angle {
        match self.registers.first() {
            Some(&r) => Angle::from_bits((r.wrapping_add(1u128 << 63) >> 64) as u64),
            None => Angle::ZERO,
        }
    }

    fn advance(&mut self) {
        for j in 0..self.registers.len().saturating_sub(1) {
            self.registers[j] = self.registers[j].wrapping_add(self.registers[j + 1]);
        }
        self.position += 1;
    }
}

impl Iterator for PhaseStream {
    type Item = Angle;

    fn next(&mut self) -> Option<Angle> {
        let out = self.peek();
        self.advance();
        Some(out)
    }
}
