//! Runners: a resolved config in, a table of rows out.

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use wwlab::angle::Angle;
use wwlab::engine::{
    sup_scan, trace, ww_average, ww_sequence, AverageResult, AverageSpec, ScanDomain, SupScanResult,
};
use wwlab::identities::{verify_reduction, ReductionSetup};
use wwlab::observable::Observable;
use wwlab::poly::PolyReal;
use wwlab::seminorm::{estimate_pair_bound, ghk_estimate, GhkParams, PairBoundParams};
use wwlab::torus::{iterate_closed_form, orbit, Point, SystemSpec};
use wwlab::vdc::vdc_check;

use crate::config::{
    AverageConfig, GhkConfig, IdentityConfig, OrbitConfig, SeminormConfig, VdcConfig, WeylConfig,
};

pub const AVERAGE_COLUMNS: [&str; 7] = ["N", "t", "re", "im", "abs", "method", "guaranteed_error"];

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Rows that break the property a checking experiment tests.
    pub violations: usize,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            violations: 0,
        }
    }
}

/// Shortest round-trip form, switching to exponents for tiny or huge values.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn average_row(r: &AverageResult) -> Vec<String> {
    vec![
        r.n.to_string(),
        num(r.t),
        num(r.value.re),
        num(r.value.im),
        num(r.abs()),
        "direct".into(),
        String::new(),
    ]
}

fn sup_row(s: &SupScanResult, at_star: Complex64) -> Vec<String> {
    vec![
        s.n.to_string(),
        num(s.t_star),
        num(at_star.re),
        num(at_star.im),
        num(s.sup_value),
        s.method.to_string(),
        s.guaranteed_error.map(num).unwrap_or_default(),
    ]
}

fn start_point(start: &Option<Vec<f64>>, dim: usize) -> Result<Point> {
    match start {
        Some(v) if v.len() != dim => bail!("start has {} coordinates, the system needs {dim}", v.len()),
        Some(v) => Ok(Point::new(v)),
        None => Ok(Point::new(&vec![0.0; dim])),
    }
}

fn check_schedule(schedule: &[usize]) -> Result<()> {
    if schedule.is_empty() || schedule[0] == 0 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        bail!("schedule must be a nonempty, strictly increasing list of positive N");
    }
    Ok(())
}

pub fn run_orbit(cfg: &OrbitConfig) -> Result<Table> {
    let dim = cfg.system.dimension();
    let start = start_point(&cfg.start, dim)?;
    if cfg.every == 0 {
        bail!("every must be at least 1");
    }
    let mut columns = vec!["n".to_string()];
    columns.extend((0..dim).map(|i| format!("x{i}")));
    columns.push("closed_form_gap".into());

    let kept: Vec<(usize, Point)> = orbit(&cfg.system, &start, cfg.n)?
        .enumerate()
        .filter(|(n, _)| n % cfg.every == 0)
        .collect();
    let rows = kept
        .par_iter()
        .map(|(n, pt)| {
            let mut row = vec![n.to_string()];
            row.extend(pt.values().into_iter().map(num));
            row.push(if cfg.closed_form {
                let closed = iterate_closed_form(&cfg.system, &start, *n as u64)?;
                num(pt.max_circular_distance(&closed))
            } else {
                String::new()
            });
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        columns,
        rows,
        violations: 0,
    })
}

/// Which optional keys of [`AverageConfig`] a verb reads.
pub fn average_keys(verb: &str) -> &'static [&'static str] {
    match verb {
        "wwavg" => &["t", "n"],
        "trace" => &["t", "schedule"],
        "sup-trace" => &["schedule", "oversample", "domain"],
        "estimate-bound" => &["schedule", "oversample", "samples", "k_poly", "seminorm"],
        _ => &[],
    }
}

/// Rejects optional keys the verb would silently ignore.
pub fn check_average_keys(verb: &str, cfg: &AverageConfig) -> Result<()> {
    let present = [
        ("t", cfg.t.is_some()),
        ("n", cfg.n.is_some()),
        ("schedule", cfg.schedule.is_some()),
        ("oversample", cfg.oversample.is_some()),
        ("domain", cfg.domain.is_some()),
        ("samples", cfg.samples.is_some()),
        ("k_poly", cfg.k_poly.is_some()),
        ("seminorm", cfg.seminorm.is_some()),
    ];
    let allowed = average_keys(verb);
    for (key, set) in present {
        if set && !allowed.contains(&key) {
            bail!("key `{key}` is not used by the {verb} experiment");
        }
    }
    Ok(())
}

fn average_spec(cfg: &AverageConfig) -> Result<AverageSpec> {
    let start = start_point(&cfg.start, cfg.system.dimension())?;
    Ok(AverageSpec::new(
        cfg.system.clone(),
        cfg.f1.clone(),
        cfg.f2.clone(),
        cfg.a,
        cfg.b,
        cfg.p.clone(),
        start,
    )?)
}

fn required<T: Copy>(value: Option<T>, key: &str) -> Result<T> {
    value.with_context(|| format!("missing field `{key}`"))
}

/// Fills in verb defaults so the metadata echoes exactly what ran.
pub fn resolve_average(verb: &str, cfg: &mut AverageConfig) {
    let dim = cfg.system.dimension();
    cfg.start.get_or_insert_with(|| vec![0.0; dim]);
    match verb {
        "trace" | "sup-trace" => {
            cfg.schedule.get_or_insert_with(|| vec![1_000, 10_000, 100_000]);
        }
        "estimate-bound" => {
            cfg.schedule.get_or_insert_with(|| vec![1_000]);
            let defaults = PairBoundParams::default();
            cfg.samples.get_or_insert(defaults.samples);
            cfg.seminorm.get_or_insert(SeminormConfig {
                n: defaults.seminorm.n,
                h: defaults.seminorm.h,
                samples: defaults.seminorm.samples,
            });
            if let Some(d) = cfg.p.degree() {
                cfg.k_poly.get_or_insert(d);
            }
        }
        _ => {}
    }
    if matches!(verb, "sup-trace" | "estimate-bound") {
        cfg.oversample.get_or_insert(4);
    }
    if verb == "sup-trace" {
        cfg.domain.get_or_insert(ScanDomain::UnitInterval);
    }
}

pub fn run_wwavg(cfg: &AverageConfig) -> Result<Table> {
    let spec = average_spec(cfg)?;
    let t = required(cfg.t, "t")?;
    let n = required(cfg.n, "n")?;
    let seq = ww_sequence(&spec, n)?;
    let mut table = Table::new(&AVERAGE_COLUMNS);
    table.rows.push(average_row(&ww_average(&seq, &spec.p, t)?));
    Ok(table)
}

pub fn run_trace(cfg: &AverageConfig) -> Result<Table> {
    let spec = average_spec(cfg)?;
    let t = required(cfg.t, "t")?;
    let schedule = cfg.schedule.as_deref().unwrap_or_default();
    check_schedule(schedule)?;
    let mut table = Table::new(&AVERAGE_COLUMNS);
    table.rows = trace(&spec, t, schedule)?.iter().map(average_row).collect();
    Ok(table)
}

fn sup_rows(seq: &[Complex64], p: &PolyReal, schedule: &[usize], domain: ScanDomain, oversample: usize) -> Result<Vec<Vec<String>>> {
    schedule
        .iter()
        .map(|&n| {
            let s = sup_scan(&seq[..n], p, domain, oversample)?;
            let at_star = ww_average(&seq[..n], p, s.t_star)?.value;
            Ok(sup_row(&s, at_star))
        })
        .collect()
}

pub fn run_sup_trace(cfg: &AverageConfig) -> Result<Table> {
    let spec = average_spec(cfg)?;
    let schedule = cfg.schedule.as_deref().unwrap_or_default();
    check_schedule(schedule)?;
    let seq = ww_sequence(&spec, *schedule.last().unwrap())?;
    let domain = cfg.domain.unwrap_or(ScanDomain::UnitInterval);
    let mut table = Table::new(&AVERAGE_COLUMNS);
    table.rows = sup_rows(&seq, &spec.p, schedule, domain, cfg.oversample.unwrap_or(4))?;
    Ok(table)
}

pub fn run_estimate_bound(cfg: &AverageConfig, seed: u64) -> Result<Table> {
    let spec = average_spec(cfg)?;
    let schedule = cfg.schedule.as_deref().unwrap_or_default();
    check_schedule(schedule)?;
    let k_poly = required(cfg.k_poly, "k_poly")?;
    let seminorm = required(cfg.seminorm, "seminorm")?;
    let mut table = Table::new(&["k_poly", "N", "samples", "lhs", "rhs", "ratio"]);
    for &n in schedule {
        let params = PairBoundParams {
            n,
            samples: required(cfg.samples, "samples")?,
            seed,
            oversample: required(cfg.oversample, "oversample")?,
            seminorm: GhkParams {
                n: seminorm.n,
                h: seminorm.h,
                samples: seminorm.samples,
                seed,
            },
        };
        let r = estimate_pair_bound(&spec, k_poly, &params)?;
        table.rows.push(vec![
            r.k_poly.to_string(),
            r.n.to_string(),
            r.samples.to_string(),
            num(r.lhs),
            num(r.rhs),
            num(r.ratio),
        ]);
    }
    Ok(table)
}

pub fn run_vdc(cfg: &VdcConfig, seed: u64) -> Result<Table> {
    if cfg.h.is_empty() {
        bail!("h must list at least one lag bound");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sequences: Vec<Vec<Complex64>> = (0..cfg.cases)
        .map(|_| {
            (0..cfg.n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    let reports = sequences
        .par_iter()
        .map(|seq| cfg.h.iter().map(|&h| vdc_check(seq, h)).collect::<wwlab::error::Result<Vec<_>>>())
        .collect::<wwlab::error::Result<Vec<_>>>()?;
    let mut table = Table::new(&["N", "H", "lhs", "rhs", "slack", "holds"]);
    for r in reports.iter().flatten() {
        if !r.holds {
            table.violations += 1;
        }
        table.rows.push(vec![
            r.n.to_string(),
            r.h.to_string(),
            num(r.lhs),
            num(r.rhs),
            num(r.slack),
            r.holds.to_string(),
        ]);
    }
    Ok(table)
}

pub fn run_ghk(cfg: &GhkConfig, seed: u64) -> Result<Table> {
    let params = GhkParams {
        n: cfg.n,
        h: cfg.h,
        samples: cfg.samples,
        seed,
    };
    let mut table = Table::new(&["k", "N", "H", "samples", "value"]);
    for &k in &cfg.k {
        let e = ghk_estimate(&cfg.system, &cfg.f, k, &params)?;
        table.rows.push(vec![
            e.k.to_string(),
            e.n.to_string(),
            e.h.to_string(),
            e.samples.to_string(),
            num(e.value),
        ]);
    }
    Ok(table)
}

pub fn resolve_identity(cfg: &mut IdentityConfig) {
    let dim = cfg.base.dimension();
    cfg.f1.get_or_insert_with(|| Observable::character(vec![1; dim]));
    cfg.f2.get_or_insert_with(|| Observable::character(vec![1; dim]));
    cfg.start
        .get_or_insert_with(|| (1..=dim + 2).map(|i| 0.1 * i as f64).collect());
}

pub fn run_identity(cfg: &IdentityConfig, seed: u64) -> Result<Table> {
    let dim = cfg.base.dimension() + 2;
    let setup = ReductionSetup::new(
        cfg.a,
        cfg.b,
        cfg.m,
        cfg.form,
        cfg.k_freq,
        cfg.p_freq,
        cfg.alpha,
        cfg.base.clone(),
        cfg.f1.clone().context("missing field `f1`")?,
        cfg.f2.clone().context("missing field `f2`")?,
        start_point(&cfg.start, dim)?,
    )?;
    let mut jobs: Vec<(ReductionSetup, Option<f64>)> = vec![(setup.clone(), None)];
    jobs.extend(cfg.t_targets.iter().map(|&t| (setup.clone(), Some(t))));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cfg.draws {
        let mut drawn = setup.with_alpha(Angle::new(rng.gen()));
        let coords: Vec<f64> = (0..dim).map(|_| rng.gen()).collect();
        drawn.start = Point::new(&coords);
        jobs.push((drawn, None));
    }
    let reports = jobs
        .par_iter()
        .map(|(s, t)| verify_reduction(s, cfg.n, *t))
        .collect::<wwlab::error::Result<Vec<_>>>()?;
    let mut table = Table::new(&["m", "a", "b", "k_freq", "alpha", "N", "c_top", "max_abs_gap", "passed"]);
    for r in &reports {
        if !r.passed {
            table.violations += 1;
        }
        table.rows.push(vec![
            r.m.to_string(),
            r.a.to_string(),
            r.b.to_string(),
            r.k_freq.to_string(),
            num(r.alpha),
            r.n.to_string(),
            num(r.c_top),
            num(r.max_abs_gap),
            r.passed.to_string(),
        ]);
    }
    Ok(table)
}

pub fn run_weyl(cfg: &WeylConfig) -> Result<Table> {
    check_schedule(&cfg.schedule)?;
    let one = Observable::constant(1, Complex64::new(1.0, 0.0))?;
    let spec = AverageSpec::new(
        SystemSpec::rotation(0.0),
        one.clone(),
        one,
        1,
        2,
        cfg.p.clone(),
        Point::new(&[0.0]),
    )?;
    let mut table = Table::new(&AVERAGE_COLUMNS);
    table.rows = trace(&spec, cfg.t, &cfg.schedule)?.iter().map(average_row).collect();
    if cfg.sup {
        let seq = vec![Complex64::new(1.0, 0.0); *cfg.schedule.last().unwrap()];
        table
            .rows
            .extend(sup_rows(&seq, &cfg.p, &cfg.schedule, ScanDomain::UnitInterval, cfg.oversample)?);
    }
    Ok(table)
}
