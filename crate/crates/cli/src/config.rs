//! One JSON document per run. Each verb has its own struct so that unknown
//! keys are rejected with a line and column; the four common keys
//! (`experiment`, `seed`, `workers`, `output`) are repeated in every struct
//! because `deny_unknown_fields` does not compose with `flatten`.

use serde::{Deserialize, Serialize};

use wwlab::angle::Angle;
use wwlab::engine::ScanDomain;
use wwlab::observable::Observable;
use wwlab::poly::PolyReal;
use wwlab::torus::{SkewForm, SystemSpec};

/// Golden-ratio conjugate, the default irrational rotation number.
pub const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn default_schedule() -> Vec<usize> {
    vec![1_000, 10_000, 100_000]
}

fn default_oversample() -> usize {
    4
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitConfig {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output: Option<String>,
    pub system: SystemSpec,
    /// Defaults to the origin.
    pub start: Option<Vec<f64>>,
    #[serde(default = "OrbitConfig::default_n")]
    pub n: usize,
    #[serde(default = "OrbitConfig::default_every")]
    pub every: usize,
    #[serde(default = "default_true")]
    pub closed_form: bool,
}

impl OrbitConfig {
    fn default_n() -> usize {
        1_000
    }
    fn default_every() -> usize {
        1
    }
}

/// Everything that pins down one `W_N` family; shared by wwavg, trace,
/// sup-trace and estimate-bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AverageConfig {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output: Option<String>,
    pub system: SystemSpec,
    pub f1: Observable,
    pub f2: Observable,
    pub a: i64,
    pub b: i64,
    pub p: PolyReal,
    pub start: Option<Vec<f64>>,
    /// wwavg, trace
    pub t: Option<f64>,
    /// wwavg
    pub n: Option<usize>,
    /// trace, sup-trace, estimate-bound
    pub schedule: Option<Vec<usize>>,
    /// sup-trace, estimate-bound
    pub oversample: Option<usize>,
    /// sup-trace
    pub domain: Option<ScanDomain>,
    /// estimate-bound: base points for the outer mean.
    pub samples: Option<usize>,
    /// estimate-bound: degree of `p` (defaults to the actual degree).
    pub k_poly: Option<usize>,
    /// estimate-bound
    pub seminorm: Option<SeminormConfig>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeminormConfig {
    pub n: usize,
    pub h: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VdcConfig {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output: Option<String>,
    #[serde(default = "VdcConfig::default_cases")]
    pub cases: usize,
    #[serde(default = "VdcConfig::default_n")]
    pub n: usize,
    #[serde(default = "VdcConfig::default_h")]
    pub h: Vec<usize>,
}

impl VdcConfig {
    fn default_cases() -> usize {
        1_000
    }
    fn default_n() -> usize {
        256
    }
    fn default_h() -> Vec<usize> {
        vec![1, 8, 64]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GhkConfig {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output: Option<String>,
    pub system: SystemSpec,
    pub f: Observable,
    #[serde(default = "GhkConfig::default_k")]
    pub k: Vec<u32>,
    #[serde(default = "GhkConfig::default_n")]
    pub n: usize,
    #[serde(default = "GhkConfig::default_h")]
    pub h: usize,
    #[serde(default = "GhkConfig::default_samples")]
    pub samples: usize,
}

impl GhkConfig {
    fn default_k() -> Vec<u32> {
        vec![1, 2]
    }
    fn default_n() -> usize {
        100_000
    }
    fn default_h() -> usize {
        1_000
    }
    fn default_samples() -> usize {
        8
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityConfig {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output: Option<String>,
    #[serde(default = "IdentityConfig::default_m")]
    pub m: u32,
    #[serde(default = "IdentityConfig::default_a")]
    pub a: i64,
    #[serde(default = "IdentityConfig::default_b")]
    pub b: i64,
    #[serde(default)]
    pub form: SkewForm,
    #[serde(default = "IdentityConfig::default_k_freq")]
    pub k_freq: i64,
    #[serde(default)]
    pub p_freq: i64,
    #[serde(default = "IdentityConfig::default_alpha")]
    pub alpha: Angle,
    #[serde(default = "IdentityConfig::default_base")]
    pub base: SystemSpec,
    /// Observables on the base; default `e^{2πi x}` on every coordinate.
    pub f1: Option<Observable>,
    pub f2: Option<Observable>,
    /// Base coordinates, then `y`, then `z`.
    pub start: Option<Vec<f64>>,
    #[serde(default = "IdentityConfig::default_n")]
    pub n: usize,
    /// Each target `t` solves for `α` so that the reduction lands on `t`.
    #[serde(default)]
    pub t_targets: Vec<f64>,
    /// Extra rows with seeded random `α` and start point.
    #[serde(default)]
    pub draws: usize,
}

impl IdentityConfig {
    fn default_m() -> u32 {
        1
    }
    fn default_a() -> i64 {
        1
    }
    fn default_b() -> i64 {
        2
    }
    fn default_k_freq() -> i64 {
        1
    }
    fn default_alpha() -> Angle {
        Angle::new(GOLDEN)
    }
    fn default_base() -> SystemSpec {
        SystemSpec::rotation(0.37)
    }
    fn default_n() -> usize {
        10_000
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeylConfig {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output: Option<String>,
    #[serde(default = "WeylConfig::default_p")]
    pub p: PolyReal,
    #[serde(default = "WeylConfig::default_t")]
    pub t: f64,
    #[serde(default = "default_schedule")]
    pub schedule: Vec<usize>,
    /// Also emit `sup_t` rows along the same schedule.
    #[serde(default)]
    pub sup: bool,
    #[serde(default = "default_oversample")]
    pub oversample: usize,
}

impl WeylConfig {
    fn default_p() -> PolyReal {
        PolyReal::from_integers(&[0, 0, 1])
    }
    fn default_t() -> f64 {
        std::f64::consts::SQRT_2
    }
}

pub const ORBIT_SCHEMA: &str = r#"Config keys (JSON):
  system       SystemSpec, required. {"type":"rotation","alpha":A}
               | {"type":"skew","m":M,"alpha":A,"form":"generic"|"paper-exact"}  (form optional, default generic)
               | {"type":"product","left":S,"right":S}
  start        [f64; dimension], default all zeros
  n            number of points, default 1000
  every        emit every k-th point, default 1
  closed_form  also compare with the closed-form iterate, default true
  seed, workers, output, experiment   common keys
CSV columns: n, x0 .. x{d-1}, closed_form_gap"#;

pub const AVERAGE_KEYS: &str = r#"  system       SystemSpec, required (see `wwlab orbit --help`)
  f1, f2       observables, required: {"terms":[{"freq":[k..],"amp":[re,im]}]}, Σ|amp| ≤ 1
  a, b         distinct integer exponents, required
  p            polynomial coefficients, constant term first, required
  start        [f64; dimension], default all zeros"#;

pub const WWAVG_TAIL: &str = r#"  t            frequency, required
  n            length N, required
  seed, workers, output, experiment   common keys
CSV columns: N, t, re, im, abs, method, guaranteed_error"#;

pub const TRACE_TAIL: &str = r#"  t            frequency, required
  schedule     strictly increasing N values, default [1000, 10000, 100000]
  seed, workers, output, experiment   common keys
CSV columns: N, t, re, im, abs, method, guaranteed_error"#;

pub const SUP_TRACE_TAIL: &str = r#"  schedule     strictly increasing N values, default [1000, 10000, 100000]
  oversample   FFT oversampling factor, default 4
  domain       {"kind":"unit-interval"} (default) | {"kind":"interval","lo":L,"hi":H,"points":P}
  seed, workers, output, experiment   common keys
CSV columns: N, t, re, im, abs, method, guaranteed_error (t is the maximiser)"#;

pub const BOUND_TAIL: &str = r#"  schedule     N values, default [1000]
  samples      base points for the outer mean, default 8
  oversample   default 4
  k_poly       degree of p (≤ 2), default the degree of p
  seminorm     {"n":N,"h":H,"samples":S}, default {"n":2000,"h":8,"samples":4}
  seed, workers, output, experiment   common keys
CSV columns: k_poly, N, samples, lhs, rhs, ratio"#;

pub const VDC_SCHEMA: &str = r#"Config keys (JSON), all optional:
  cases        number of seeded random sequences, default 1000
  n            sequence length N, default 256
  h            lag bounds H, default [1, 8, 64]
  seed, workers, output, experiment   common keys
CSV columns: N, H, lhs, rhs, slack, holds (one row per case and H)
Exit 2 if any row has holds = false."#;

pub const GHK_SCHEMA: &str = r#"Config keys (JSON):
  system       SystemSpec, required (see `wwlab orbit --help`)
  f            observable, required
  k            seminorm orders in 1..=4, default [1, 2]
  n            inner average length N, default 100000
  h            lag range H, default 1000
  samples      sampled base points, default 8
  seed, workers, output, experiment   common keys
CSV columns: k, N, H, samples, value"#;

pub const IDENTITY_SCHEMA: &str = r#"Config keys (JSON), all optional:
  m            skew degree, default 1
  a, b         exponents, default 1, 2
  form         "generic" (default) | "paper-exact" (m ≤ 2)
  k_freq       nonzero fibre frequency, default 1
  p_freq       frequency on the base coordinate, default 0
  alpha        skew rotation number, default 0.6180339887498948
  base         SystemSpec for the base, default {"type":"rotation","alpha":0.37}
  f1, f2       observables on the base, default e^{2πi x} on every coordinate
  start        base coordinates then y then z, default 0.1, 0.2, ...
  n            length N, default 10000
  t_targets    frequencies t; each solves for α and adds a row, default []
  draws        extra rows with seeded random α and start, default 0
  seed, workers, output, experiment   common keys
CSV columns: m, a, b, k_freq, alpha, N, c_top, max_abs_gap, passed
Exit 2 if any row has passed = false."#;

pub const WEYL_SCHEMA: &str = r#"Config keys (JSON), all optional:
  p            polynomial coefficients, default [0, 0, 1]
  t            frequency, default √2
  schedule     strictly increasing N values, default [1000, 10000, 100000]
  sup          also emit sup_t rows, default false
  oversample   default 4
  seed, workers, output, experiment   common keys
CSV columns: N, t, re, im, abs, method, guaranteed_error"#;

/// Keys every config carries.
pub trait Common {
    fn experiment(&self) -> Option<&str>;
    fn seed(&self) -> Option<u64>;
    fn workers(&self) -> Option<usize>;
    fn output(&self) -> Option<&str>;
    fn set_resolved(&mut self, experiment: &str, seed: u64, workers: usize, output: String);
}

macro_rules! common {
    ($($t:ty),*) => {$(
        impl Common for $t {
            fn experiment(&self) -> Option<&str> {
                self.experiment.as_deref()
            }
            fn seed(&self) -> Option<u64> {
                self.seed
            }
            fn workers(&self) -> Option<usize> {
                self.workers
            }
            fn output(&self) -> Option<&str> {
                self.output.as_deref()
            }
            fn set_resolved(&mut self, experiment: &str, seed: u64, workers: usize, output: String) {
                self.experiment = Some(experiment.to_string());
                self.seed = Some(seed);
                self.workers = Some(workers);
                self.output = Some(output);
            }
        }
    )*};
}

common!(OrbitConfig, AverageConfig, VdcConfig, GhkConfig, IdentityConfig, WeylConfig);
