//! Numerical laboratory for polynomial Wiener-Wintner averages of double
//! recurrence,
//!
//! ```text
//! W_N(f₁, f₂, x, p, t) = (1/N) Σ_{n<N} f₁(T^{an}x) f₂(T^{bn}x) e^{2πi p(n) t},
//! ```
//!
//! on rotations and skew products of tori.
//!
//! - [`torus`]: systems, points, stepwise and closed-form orbits
//! - [`poly`], [`phase`]: exact polynomials, Faulhaber sums, mod-1 phase streams
//! - [`engine`]: `W_N`, convergence traces and `sup_t |W_N|`
//! - [`vdc`]: both sides of the van der Corput inequality
//! - [`seminorm`]: Gowers-Host-Kra seminorm estimates and finite Gowers norms
//! - [`identities`]: the phase reduction on `base × skew`
//!
//! ```
//! use wwlab::engine::{sup_scan, ww_sequence, AverageSpec, ScanDomain};
//! use wwlab::observable::Observable;
//! use wwlab::poly::PolyReal;
//! use wwlab::torus::{Point, SystemSpec};
//!
//! let spec = AverageSpec::new(
//!     SystemSpec::rotation(0.618_033_988_749_894_8),
//!     Observable::character(vec![1]),
//!     Observable::character(vec![1]),
//!     1,
//!     2,
//!     PolyReal::from_integers(&[0, 1]),
//!     Point::new(&[0.25]),
//! )?;
//! let seq = ww_sequence(&spec, 1_000)?;
//! let sup = sup_scan(&seq, &spec.p, ScanDomain::UnitInterval, 4)?;
//! assert!((sup.sup_value - 1.0).abs() < 1e-9);
//! # Ok::<(), wwlab::error::LabError>(())
//! ```

pub mod angle;
pub mod engine;
pub mod error;
pub mod exact;
pub mod identities;
pub mod observable;
pub mod phase;
pub mod poly;
pub mod seminorm;
pub mod sum;
pub mod torus;
pub mod vdc;

/// Book chapters, compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/systems.md")]
    mod systems {}
    #[doc = include_str!("../../../book/src/phases.md")]
    mod phases {}
    #[doc = include_str!("../../../book/src/averages.md")]
    mod averages {}
    #[doc = include_str!("../../../book/src/vdc.md")]
    mod vdc {}
    #[doc = include_str!("../../../book/src/seminorms.md")]
    mod seminorms {}
    #[doc = include_str!("../../../book/src/reduction.md")]
    mod reduction {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/testing.md")]
    mod testing {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
