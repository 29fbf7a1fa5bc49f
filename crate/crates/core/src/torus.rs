//! Measure-preserving systems on tori: rotations, Anzai skew products and
//! their products, with stepwise and closed-form orbits.
//!
//! Skew products act as `(y, z) ↦ (y + s·α, z + y^m + κ)`:
//!
//! | form          | m   | s | κ      |
//! |---------------|-----|---|--------|
//! | `paper-exact` | 1   | 2 | `α`    |
//! | `paper-exact` | 2   | 6 | `−α²`  |
//! | `generic`     | any | 1 | `0`    |
//!
//! For `m ≥ 2` the term `y^m` depends on which real number represents `y`,
//! so a [`Point`] carries the integer turns accumulated by each base
//! coordinate and the cocycle is always evaluated at the lifted value. With
//! that convention `R^n(y, z) = (y + nsα, z + Σ_{l<n} (y + lsα)^m + nκ)`,
//! which is what [`iterate_closed_form`] evaluates through Faulhaber sums.
//!
//! All arithmetic is exact fixed-point: stepping rounds the cocycle to
//! `2^-64` once per step and the closed form rounds once, so the two agree to
//! within `n · 2^-65` turns.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{LabError, Result};
use crate::exact::binomial;
use crate::poly::{faulhaber, FAULHABER_MAX};

/// Largest `n` accepted by [`iterate_closed_form`].
pub const SAFE_HORIZON: u64 = 1_000_000;

/// Agreement tolerance between closed-form and iterated orbits, in turns.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SkewForm {
    PaperExact,
    #[default]
    Generic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub enum SystemSpec {
    Rotation {
        alpha: Angle,
    },
    Skew {
        degree: u32,
        alpha: Angle,
        form: SkewForm,
    },
    Product {
        left: Box<SystemSpec>,
        right: Box<SystemSpec>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawSystem {
    Rotation {
        alpha: Angle,
    },
    Skew {
        m: u32,
        alpha: Angle,
        #[serde(default)]
        form: SkewForm,
    },
    Product {
        left: Box<SystemSpec>,
        right: Box<SystemSpec>,
    },
}

impl TryFrom<RawSystem> for SystemSpec {
    type Error = LabError;

    fn try_from(raw: RawSystem) -> Result<Self> {
        match raw {
            RawSystem::Rotation { alpha } => Ok(SystemSpec::Rotation { alpha }),
            RawSystem::Skew { m, alpha, form } => SystemSpec::skew(m, alpha, form),
            RawSystem::Product { left, right } => Ok(SystemSpec::Product { left, right }),
        }
    }
}

impl From<SystemSpec> for RawSystem {
    fn from(sys: SystemSpec) -> Self {
        match sys {
            SystemSpec::Rotation { alpha } => RawSystem::Rotation { alpha },
            SystemSpec::Skew {
                degree,
                alpha,
                form,
            } => RawSystem::Skew {
                m: degree,
                alpha,
                form,
            },
            SystemSpec::Product { left, right } => RawSystem::Product { left, right },
        }
    }
}

impl SystemSpec {
    pub fn rotation(alpha: impl Into<Angle>) -> Self {
        SystemSpec::Rotation {
            alpha: alpha.into(),
        }
    }

    pub fn skew(degree: u32, alpha: impl Into<Angle>, form: SkewForm) -> Result<Self> {
        if degree == 0 {
            return Err(LabError::Contract("skew degree must be at least 1".into()));
        }
        if degree > FAULHABER_MAX {
            return Err(LabError::Range(format!(
                "skew degree {degree} exceeds the supported maximum {FAULHABER_MAX}"
            )));
        }
        if form == SkewForm::PaperExact && degree > 2 {
            return Err(LabError::Unsupported(format!(
                "the paper-exact skew form is defined for m = 1 and m = 2 only, got m = {degree}"
            )));
        }
        Ok(SystemSpec::Skew {
            degree,
            alpha: alpha.into(),
            form,
        })
    }

    pub fn product(left: SystemSpec, right: SystemSpec) -> Self {
        SystemSpec::Product {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            SystemSpec::Rotation { .. } => 1,
            SystemSpec::Skew { .. } => 2,
            SystemSpec::Product { left, right } => left.dimension() + right.dimension(),
        }
    }
}

/// A point of the torus together with the integer turns of each coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    coords: Vec<Angle>,
    turns: Vec<i64>,
}

impl Point {
    /// Coordinates are reduced mod 1; the integer parts become the lifts.
    pub fn new(values: &[f64]) -> Self {
        Point {
            coords: values.iter().map(|&v| Angle::new(v)).collect(),
            turns: values
                .iter()
                .map(|&v| if v.is_finite() { v.floor() as i64 } else { 0 })
                .collect(),
        }
    }

    pub fn from_angles(coords: Vec<Angle>) -> Self {
        let turns = vec![0; coords.len()];
        Point { coords, turns }
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Angle] {
        &self.coords
    }

    pub fn values(&self) -> Vec<f64> {
        self.coords.iter().map(|a| a.value()).collect()
    }

    /// Coordinate `i` as a 64.64 fixed-point real (turns · 2^64 + fraction bits).
    pub fn lifted(&self, i: usize) -> i128 {
        ((self.turns[i] as i128) << 64) | self.coords[i].bits() as i128
    }

    fn set_lifted(&mut self, i: usize, lifted: i128) {
        self.coords[i] = Angle::from_bits(lifted as u64);
        self.turns[i] = (lifted >> 64) as i64;
    }

    /// Drops lifts, keeping only the torus point.
    pub fn reduced(&self) -> Point {
        Point::from_angles(self.coords.clone())
    }

    /// Largest per-coordinate circular distance.
    pub fn max_circular_distance(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.circular_distance(*b))
            .fold(0.0, f64::max)
    }

    pub fn split_at(&self, mid: usize) -> (Point, Point) {
        (
            Point {
                coords: self.coords[..mid].to_vec(),
                turns: self.turns[..mid].to_vec(),
            },
            Point {
                coords: self.coords[mid..].to_vec(),
                turns: self.turns[mid..].to_vec(),
            },
        )
    }

    pub fn concat(mut self, other: Point) -> Point {
        self.coords.extend(other.coords);
        self.turns.extend(other.turns);
        self
    }
}

fn check_dimension(sys: &SystemSpec, pt: &Point) -> Result<()> {
    let expected = sys.dimension();
    if pt.dimension() != expected {
        return Err(LabError::DimensionMismatch {
            expected,
            found: pt.dimension(),
        });
    }
    Ok(())
}

const MAX_LIMBS: usize = FAULHABER_MAX as usize;
type Limbs = [u64; MAX_LIMBS];

/// Parameters of one skew map in fixed point.
struct SkewLaw {
    m: usize,
    /// y-step `s·α` as a 64.64 fixed-point real.
    y_step: i128,
    /// numerator of κ over `2^(64m)`
    kappa: BigInt,
}

impl SkewLaw {
    fn new(degree: u32, alpha: Angle, form: SkewForm) -> Self {
        let a = alpha.bits() as i128;
        let a_big = BigInt::from(alpha.bits());
        let (s, kappa) = match (form, degree) {
            (SkewForm::PaperExact, 1) => (2, a_big),
            (SkewForm::PaperExact, 2) => (6, -(&a_big * &a_big)),
            _ => (1, BigInt::zero()),
        };
        SkewLaw {
            m: degree as usize,
            y_step: s * a,
            kappa,
        }
    }

    fn modulus(&self) -> BigInt {
        BigInt::one() << (64 * self.m)
    }

    fn kappa_limbs(&self) -> Limbs {
        let v = self.kappa.mod_floor(&self.modulus());
        let mut out = [0u64; MAX_LIMBS];
        for (i, d) in v.iter_u64_digits().enumerate().take(self.m) {
            out[i] = d;
        }
        out
    }

    /// `(y^m + κ) mod 1` rounded to 64 bits, for lifted `y`.
    fn cocycle(&self, y: i128, kappa: &Limbs) -> Angle {
        let m = self.m;
        let base = to_limbs(y);
        let mut acc = base;
        for _ in 1..m {
            acc = mul_trunc(&acc, &base, m);
        }
        let v = add_trunc(&acc, kappa, m);
        Angle::from_bits(round_top(&v, m))
    }
}

fn to_limbs(x: i128) -> Limbs {
    let fill = if x < 0 { u64::MAX } else { 0 };
    let mut out = [fill; MAX_LIMBS];
    out[0] = x as u64;
    out[1] = (x >> 64) as u64;
    out
}

fn mul_trunc(a: &Limbs, b: &Limbs, m: usize) -> Limbs {
    let mut r = [0u64; MAX_LIMBS];
    for i in 0..m {
        let mut carry: u128 = 0;
        for j in 0..m - i {
            let t = r[i + j] as u128 + a[i] as u128 * b[j] as u128 + carry;
            r[i + j] = t as u64;
            carry = t >> 64;
        }
    }
    r
}

fn add_trunc(a: &Limbs, b: &Limbs, m: usize) -> Limbs {
    let mut r = [0u64; MAX_LIMBS];
    let mut carry = 0u128;
    for i in 0..m {
        let t = a[i] as u128 + b[i] as u128 + carry;
        r[i] = t as u64;
        carry = t >> 64;
    }
    r
}

/// Top limb of a fraction with `64m` bits, rounded half up to 64 bits.
fn round_top(v: &Limbs, m: usize) -> u64 {
    if m == 1 {
        v[0]
    } else {
        v[m - 1].wrapping_add(v[m - 2] >> 63)
    }
}

/// Applies `sys` (or its inverse when `forward` is false) in place.
fn apply(sys: &SystemSpec, pt: &mut Point, offset: usize, forward: bool) {
    match sys {
        SystemSpec::Rotation { alpha } => {
            let a = alpha.bits() as i128;
            let y = pt.lifted(offset);
            pt.set_lifted(offset, if forward { y + a } else { y - a });
        }
        SystemSpec::Skew {
            degree,
            alpha,
            form,
        } => {
            let law = SkewLaw::new(*degree, *alpha, *form);
            let kappa = law.kappa_limbs();
            let y = pt.lifted(offset);
            if forward {
                let inc = law.cocycle(y, &kappa);
                pt.coords[offset + 1] += inc;
                pt.set_lifted(offset, y + law.y_step);
            } else {
                let prev = y - law.y_step;
                let inc = law.cocycle(prev, &kappa);
                pt.coords[offset + 1] -= inc;
                pt.set_lifted(offset, prev);
            }
        }
        SystemSpec::Product { left, right } => {
            apply(left, pt, offset, forward);
            apply(right, pt, offset + left.dimension(), forward);
        }
    }
}

/// One application of the map.
pub fn step(sys: &SystemSpec, pt: &Point) -> Result<Point> {
    check_dimension(sys, pt)?;
    let mut out = pt.clone();
    apply(sys, &mut out, 0, true);
    Ok(out)
}

/// One application of the inverse map.
pub fn step_inverse(sys: &SystemSpec, pt: &Point) -> Result<Point> {
    check_dimension(sys, pt)?;
    let mut out = pt.clone();
    apply(sys, &mut out, 0, false);
    Ok(out)
}

/// Steps an orbit by a fixed stride per call; negative strides use the inverse map.
#[derive(Debug, Clone)]
pub struct Walker {
    sys: SystemSpec,
    current: Point,
    stride: i64,
}

impl Walker {
    pub fn new(sys: &SystemSpec, start: &Point, stride: i64) -> Result<Self> {
        check_dimension(sys, start)?;
        Ok(Walker {
            sys: sys.clone(),
            current: start.clone(),
            stride,
        })
    }

    pub fn current(&self) -> &Point {
        &self.current
    }

    pub fn advance(&mut self) {
        let forward = self.stride > 0;
        for _ in 0..self.stride.unsigned_abs() {
            apply(&self.sys, &mut self.current, 0, forward);
        }
    }
}

/// `pt, T pt, …, T^{count−1} pt`.
#[derive(Debug, Clone)]
pub struct Orbit {
    walker: Walker,
    remaining: usize,
}

impl Iterator for Orbit {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        if self.remaining == 0 {
            return None;
        }
        let out = self.walker.current().clone();
        self.remaining -= 1;
        if self.remaining > 0 {
            self.walker.advance();
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for Orbit {}

pub fn orbit(sys: &SystemSpec, pt: &Point, count: usize) -> Result<Orbit> {
    if count == 0 {
        return Err(LabError::Contract("orbit length must be at least 1".into()));
    }
    Ok(Orbit {
        walker: Walker::new(sys, pt, 1)?,
        remaining: count,
    })
}

fn closed_form_in_place(sys: &SystemSpec, pt: &mut Point, offset: usize, n: u64) {
    match sys {
        SystemSpec::Rotation { alpha } => {
            let y = pt.lifted(offset);
            pt.set_lifted(offset, y + n as i128 * alpha.bits() as i128);
        }
        SystemSpec::Skew {
            degree,
            alpha,
            form,
        } => {
            let law = SkewLaw::new(*degree, *alpha, *form);
            let m = law.m as u32;
            let y = pt.lifted(offset);
            let y_big = BigInt::from(y);
            let step_big = BigInt::from(law.y_step);
            let n_big = BigInt::from(n);
            // Σ_{l<n} (y + l·β)^m = Σ_j C(m, j) y^{m−j} β^j S_j(n)
            let mut total = &n_big * &law.kappa;
            for j in 0..=m {
                let s_j = faulhaber(j)
                    .expect("degree bounded by the Faulhaber table")
                    .eval_exact(&n_big)
                    .to_integer();
                total += binomial(m, j) * y_big.pow(m - j) * step_big.pow(j) * s_j;
            }
            let v = total.mod_floor(&law.modulus());
            let shift = 64 * (m - 1);
            let rounded = if shift == 0 {
                v
            } else {
                (v + (BigInt::one() << (shift - 1))) >> shift
            };
            let bits = rounded.mod_floor(&(BigInt::one() << 64u32));
            pt.coords[offset + 1] += Angle::from_bits(bits.to_u64().expect("reduced"));
            pt.set_lifted(offset, y + n as i128 * law.y_step);
        }
        SystemSpec::Product { left, right } => {
            closed_form_in_place(left, pt, offset, n);
            closed_form_in_place(right, pt, offset + left.dimension(), n);
        }
    }
}

/// `R^n(pt)` from the closed form; products are handled componentwise.
pub fn iterate_closed_form(sys: &SystemSpec, pt: &Point, n: u64) -> Result<Point> {
    check_dimension(sys, pt)?;
    if n > SAFE_HORIZON {
        return Err(LabError::Horizon {
            n,
            limit: SAFE_HORIZON,
        });
    }
    let mut out = pt.clone();
    closed_form_in_place(sys, &mut out, 0, n);
    Ok(out)
}

/// Deterministic pseudo-uniform points; the same seed gives the same list.
pub fn sample_points(sys: &SystemSpec, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = sys.dimension();
    (0..count)
        .map(|_| Point::from_angles((0..dim).map(|_| Angle::from_bits(rng.next_u64())).collect()))
        .collect()
}
