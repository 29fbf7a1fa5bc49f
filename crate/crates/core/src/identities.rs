//! Phase reduction for double-recurrence averages on `base × skew`.
//!
//! With `F_j = f_j ⊗ e^{2πi(p_j y + q_j z)}` and the skew `(y, z) ↦ (y + β, z + y^m + κ)`
//! (`β = sα`), the closed-form iterate gives the phase of
//! `F₁(U^{an}·)F₂(U^{bn}·)` beyond the base factor as a polynomial in `n`:
//!
//! ```text
//! (p₁+p₂)y + (q₁+q₂)z + (ap₁+bp₂)βn + (aq₁+bq₂)κn + Σ_{i=0}^{m} C(m,i) y^{m−i} β^i Q_i(n),
//! Q_i(n) = q₁ S_i(an) + q₂ S_i(bn).
//! ```
//!
//! Choosing `q₁ = −bk`, `q₂ = ak` (and likewise for `p`) kills the linear
//! terms. Everything except the constant `C_yz` phase and the top monomial
//! `c_top α^m n^{m+1}`, `c_top = s^m·lc(Q_m)`, is the correction phase;
//! multiplying it out leaves `C_yz` times a polynomial Wiener-Wintner average of
//! the base system. All coefficients are exact rationals.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::angle::Angle;
use crate::error::{LabError, Result};
use crate::exact::{angle_to_rational, binomial, rational_from_int, rational_to_angle, rational_to_f64};
use crate::observable::Observable;
use crate::phase::PhaseStream;
use crate::poly::{faulhaber, PolyReal};
use crate::sum::ComplexSum;
use crate::torus::{Point, SkewForm, SystemSpec, Walker, SAFE_HORIZON};

/// Largest acceptable `max |LHS_n − RHS_n|`.
pub const IDENTITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ReductionSetup {
    pub a: i64,
    pub b: i64,
    pub m: u32,
    pub form: SkewForm,
    pub k_freq: i64,
    pub p_freq: i64,
    pub alpha: Angle,
    pub base: SystemSpec,
    pub f1: Observable,
    pub f2: Observable,
    /// Point of `base × skew`: base coordinates, then `y`, then `z`.
    pub start: Point,
}

/// `total = surviving + correction`, as polynomials in `n`.
#[derive(Debug, Clone)]
pub struct PhaseDecomposition {
    pub total: PolyReal,
    pub surviving: PolyReal,
    pub correction: PolyReal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub m: u32,
    pub a: i64,
    pub b: i64,
    pub k_freq: i64,
    pub alpha: f64,
    pub n: usize,
    pub c_top: f64,
    pub max_abs_gap: f64,
    pub lhs_tail: Complex64,
    pub rhs_tail: Complex64,
    pub passed: bool,
}

impl ReductionSetup {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: i64,
        b: i64,
        m: u32,
        form: SkewForm,
        k_freq: i64,
        p_freq: i64,
        alpha: Angle,
        base: SystemSpec,
        f1: Observable,
        f2: Observable,
        start: Point,
    ) -> Result<Self> {
        if a == b {
            return Err(LabError::Contract(format!("exponents must differ, got a = b = {a}")));
        }
        if k_freq == 0 {
            return Err(LabError::Contract("k_freq must be nonzero".into()));
        }
        SystemSpec::skew(m, alpha, form)?;
        let dim = base.dimension();
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
        if start.dimension() != dim + 2 {
            return Err(LabError::DimensionMismatch {
                expected: dim + 2,
                found: start.dimension(),
            });
        }
        let setup = ReductionSetup {
            a,
            b,
            m,
            form,
            k_freq,
            p_freq,
            alpha,
            base,
            f1,
            f2,
            start,
        };
        if setup.c_top().is_zero() {
            return Err(LabError::Degenerate(format!(
                "the top coefficient k·ab(b^m − a^m)/(m+1) vanishes for a = {a}, b = {b}, m = {m}; \
                 choose nonzero exponents with b^m ≠ a^m"
            )));
        }
        Ok(setup)
    }

    /// `(q₁, q₂) = (−b·k, a·k)`.
    pub fn q(&self) -> (i64, i64) {
        (-self.b * self.k_freq, self.a * self.k_freq)
    }

    /// `(p₁, p₂) = (−b·p_freq, a·p_freq)`.
    pub fn p(&self) -> (i64, i64) {
        (-self.b * self.p_freq, self.a * self.p_freq)
    }

    pub fn with_alpha(&self, alpha: Angle) -> ReductionSetup {
        ReductionSetup {
            alpha,
            ..self.clone()
        }
    }

    fn step_scale(&self) -> i64 {
        match (self.form, self.m) {
            (SkewForm::PaperExact, 1) => 2,
            (SkewForm::PaperExact, 2) => 6,
            _ => 1,
        }
    }

    fn kappa(&self) -> BigRational {
        let alpha = angle_to_rational(self.alpha);
        match (self.form, self.m) {
            (SkewForm::PaperExact, 1) => alpha,
            (SkewForm::PaperExact, 2) => -(&alpha * &alpha),
            _ => BigRational::zero(),
        }
    }

    pub fn skew(&self) -> SystemSpec {
        SystemSpec::skew(self.m, self.alpha, self.form).expect("validated on construction")
    }

    /// `U = base × skew`.
    pub fn product(&self) -> SystemSpec {
        SystemSpec::product(self.base.clone(), self.skew())
    }

    /// `Q_i(n) = q₁ S_i(an) + q₂ S_i(bn)`.
    pub fn q_poly(&self, i: u32) -> PolyReal {
        let (q1, q2) = self.q();
        let s = faulhaber(i).expect("degree validated by the skew constructor");
        s.compose_scale(self.a)
            .scale(&rational_from_int(q1))
            .add(&s.compose_scale(self.b).scale(&rational_from_int(q2)))
    }

    /// `s^m · lc(Q_m)`, the coefficient of `α^m n^{m+1}`.
    pub fn c_top(&self) -> BigRational {
        let q = self.q_poly(self.m);
        let lc = q.exact_coeffs().get(self.m as usize + 1).cloned().unwrap_or_else(BigRational::zero);
        lc * rational_from_int(self.step_scale().pow(self.m))
    }

    /// Phase polynomials at lifted `y` and `z` (in turns).
    pub fn decompose(&self, y: &BigRational, z: &BigRational) -> PhaseDecomposition {
        let (p1, p2) = self.p();
        let (q1, q2) = self.q();
        let beta = angle_to_rational(self.alpha) * rational_from_int(self.step_scale());
        let c_yz = rational_from_int(p1 + p2) * y + rational_from_int(q1 + q2) * z;
        let linear = rational_from_int(self.a * p1 + self.b * p2) * &beta
            + rational_from_int(self.a * q1 + self.b * q2) * self.kappa();

        let mut total = PolyReal::from_rationals(vec![c_yz.clone(), linear]);
        for i in 0..=self.m {
            let weight = BigRational::from_integer(binomial(self.m, i))
                * pow(y, self.m - i)
                * pow(&beta, i);
            total = total.add(&self.q_poly(i).scale(&weight));
        }
        let top = self.c_top() * pow(&angle_to_rational(self.alpha), self.m);
        let surviving = PolyReal::monomial(self.m as usize + 1, top).add(&PolyReal::from_rationals(vec![c_yz]));
        let correction = total.sub(&surviving);
        PhaseDecomposition {
            total,
            surviving,
            correction,
        }
    }

    fn start_yz(&self) -> (BigRational, BigRational) {
        let d = self.base.dimension();
        let unit = BigRational::from_integer(BigInt::one() << 64u32);
        let y = BigRational::from_integer(BigInt::from(self.start.lifted(d))) / &unit;
        let z = BigRational::from_integer(BigInt::from(self.start.lifted(d + 1))) / unit;
        (y, z)
    }

    /// Decomposition at the skew coordinates of `start`.
    pub fn decompose_at_start(&self) -> PhaseDecomposition {
        let (y, z) = self.start_yz();
        self.decompose(&y, &z)
    }
}

fn pow(x: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

fn check_horizon(n: u64) -> Result<()> {
    if n > SAFE_HORIZON {
        return Err(LabError::Horizon {
            n,
            limit: SAFE_HORIZON,
        });
    }
    Ok(())
}

fn eval_phase(poly: &PolyReal, n: u64) -> Result<Angle> {
    check_horizon(n)?;
    Ok(rational_to_angle(&poly.eval_exact(&BigInt::from(n))))
}

/// Full skew phase of `F₁(U^{an}·)F₂(U^{bn}·)` at `(y, z) ∈ [0,1)²`.
pub fn total_phase(setup: &ReductionSetup, n: u64, y: Angle, z: Angle) -> Result<Angle> {
    eval_phase(&setup.decompose(&angle_to_rational(y), &angle_to_rational(z)).total, n)
}

pub fn correction_phase(setup: &ReductionSetup, n: u64, y: Angle, z: Angle) -> Result<Angle> {
    eval_phase(&setup.decompose(&angle_to_rational(y), &angle_to_rational(z)).correction, n)
}

/// `C_yz` phase plus `c_top α^m n^{m+1}`.
pub fn surviving_phase(setup: &ReductionSetup, n: u64, y: Angle, z: Angle) -> Result<Angle> {
    eval_phase(&setup.decompose(&angle_to_rational(y), &angle_to_rational(z)).surviving, n)
}

/// `α ∈ [0, 1)` with `c_top α^m ≡ t (mod 1)`.
pub fn solve_alpha(c_top: &BigRational, m: u32, t: f64) -> Result<Angle> {
    if c_top.is_zero() {
        return Err(LabError::Degenerate("c_top = 0 cannot reach a target frequency".into()));
    }
    if !t.is_finite() {
        return Err(LabError::Contract("target frequency must be finite".into()));
    }
    let c = rational_to_f64(c_top);
    let t = t.rem_euclid(1.0);
    // c·u = t + j with u ∈ [0, 1)
    let u = if c > 0.0 || t == 0.0 { t / c } else { (t - 1.0) / c };
    if !(0.0..1.0).contains(&u) {
        return Err(LabError::Range(format!("no α ∈ [0, 1) reaches t = {t} with c_top = {c}")));
    }
    Ok(Angle::new(u.powf(1.0 / m as f64)))
}

/// Compares the literal product-system average against `C_yz` times the polynomial average.
///
/// With `t_target` set, `α` is first re-chosen so that `c_top α^m ≡ t_target`.
pub fn verify_reduction(setup: &ReductionSetup, n: usize, t_target: Option<f64>) -> Result<IdentityReport> {
    if n == 0 {
        return Err(LabError::Contract("N must be at least 1".into()));
    }
    let reach = n as u64 * setup.a.unsigned_abs().max(setup.b.unsigned_abs());
    check_horizon(reach)?;
    let c_top = setup.c_top();
    let setup = match t_target {
        Some(t) => setup.with_alpha(solve_alpha(&c_top, setup.m, t)?),
        None => setup.clone(),
    };
    let (p1, p2) = setup.p();
    let (q1, q2) = setup.q();
    let phases = setup.decompose_at_start();
    let c_yz = rational_to_angle(&phases.surviving.eval_exact(&BigInt::zero())).cis();

    let product = setup.product();
    let big_f1 = setup.f1.tensor_character(&[p1, q1]);
    let big_f2 = setup.f2.tensor_character(&[p2, q2]);
    let mut lhs_left = Walker::new(&product, &setup.start, setup.a)?;
    let mut lhs_right = Walker::new(&product, &setup.start, setup.b)?;
    let mut correction = PhaseStream::with_exact_scale(&phases.correction, &BigRational::one(), 0);

    let (base_start, _) = setup.start.split_at(setup.base.dimension());
    let mut rhs_left = Walker::new(&setup.base, &base_start, setup.a)?;
    let mut rhs_right = Walker::new(&setup.base, &base_start, setup.b)?;
    let top = setup.c_top() * pow(&angle_to_rational(setup.alpha), setup.m);
    let mut weyl = PhaseStream::with_exact_scale(&PolyReal::monomial(setup.m as usize + 1, BigRational::one()), &top, 0);

    let (mut lhs, mut rhs) = (ComplexSum::new(), ComplexSum::new());
    let mut gap = 0.0f64;
    let (mut lhs_tail, mut rhs_tail) = (Complex64::zero(), Complex64::zero());
    for count in 1..=n {
        let l = big_f1.eval(lhs_left.current())
            * big_f2.eval(lhs_right.current())
            * (-correction.next().expect("infinite stream")).cis();
        let r = setup.f1.eval(rhs_left.current())
            * setup.f2.eval(rhs_right.current())
            * weyl.next().expect("infinite stream").cis();
        lhs.add(l);
        rhs.add(c_yz * r);
        lhs_tail = lhs.value() / count as f64;
        rhs_tail = rhs.value() / count as f64;
        gap = gap.max((lhs_tail - rhs_tail).norm());
        for w in [&mut lhs_left, &mut lhs_right, &mut rhs_left, &mut rhs_right] {
            w.advance();
        }
    }
    Ok(IdentityReport {
        m: setup.m,
        a: setup.a,
        b: setup.b,
        k_freq: setup.k_freq,
        alpha: setup.alpha.value(),
        n,
        c_top: rational_to_f64(&c_top),
        max_abs_gap: gap,
        lhs_tail,
        rhs_tail,
        passed: gap <= IDENTITY_TOLERANCE,
    })
}

impl PhaseDecomposition {
    /// `max_n |total − surviving − correction|` in turns; zero by construction.
    pub fn residual(&self, upto: u64) -> f64 {
        (0..=upto)
            .map(|n| {
                let n = BigInt::from(n);
                let r = self.total.eval_exact(&n) - self.surviving.eval_exact(&n) - self.correction.eval_exact(&n);
                rational_to_angle(&r).signed_value().abs()
            })
            .fold(0.0, f64::max)
    }
}
