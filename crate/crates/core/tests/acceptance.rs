//! Acceptance battery: one line per criterion, nonzero exit on any failure.

mod common;

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wwlab::angle::Angle;
use wwlab::engine::{sup_scan, sup_trace, trace, ww_average, AverageSpec, ScanDomain};
use wwlab::error::Result;
use wwlab::exact::rational_from_int;
use wwlab::identities::{verify_reduction, ReductionSetup};
use wwlab::observable::{Observable, Term};
use wwlab::poly::PolyReal;
use wwlab::seminorm::{estimate_pair_bound, ghk_estimate, gowers_norm_finite, GhkParams, PairBoundParams};
use wwlab::torus::{iterate_closed_form, Point, SkewForm, SystemSpec, Walker};
use wwlab::vdc::vdc_check;

use common::{brute_sup, fourier_l4, random_sequence, weyl_direct};

const GOLDEN: f64 = 0.618_033_988_749_894_8;

struct Outcome {
    passed: bool,
    detail: String,
}

fn criterion(index: usize, limit_secs: u64, body: impl FnOnce() -> Result<Outcome>) -> bool {
    let started = Instant::now();
    let outcome = body();
    let elapsed = started.elapsed();
    let in_time = elapsed <= Duration::from_secs(limit_secs);
    let (passed, detail) = match outcome {
        Ok(o) => (o.passed && in_time, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    println!(
        "[criterion {index}] {} {detail} ({:.2} s, limit {limit_secs} s)",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    passed
}

fn closed_form_vs_iteration() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let checkpoints = [1_000u64, 10_000, 100_000];
    let variants = [
        (1, SkewForm::PaperExact),
        (2, SkewForm::PaperExact),
        (1, SkewForm::Generic),
        (2, SkewForm::Generic),
        (3, SkewForm::Generic),
    ];
    let mut worst = 0.0f64;
    for (m, form) in variants {
        for _ in 0..20 {
            let sys = SystemSpec::skew(m, rng.gen::<f64>(), form)?;
            let start = Point::new(&[rng.gen(), rng.gen()]);
            let mut walker = Walker::new(&sys, &start, 1)?;
            let mut n = 0u64;
            for &cp in &checkpoints {
                while n < cp {
                    walker.advance();
                    n += 1;
                }
                let closed = iterate_closed_form(&sys, &start, cp)?;
                worst = worst.max(walker.current().max_circular_distance(&closed));
            }
        }
    }
    Ok(Outcome {
        passed: worst <= 1e-8,
        detail: format!("closed form vs iteration, 100 orbits to 1e5: max distance {worst:.3e}"),
    })
}

fn vdc_fuzz() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    for _ in 0..1_000 {
        let seq = random_sequence(&mut rng, 256, 1.0);
        for h in [1, 8, 64] {
            if !vdc_check(&seq, h)?.holds {
                violations += 1;
            }
        }
    }
    let ones = vdc_check(&vec![Complex64::new(1.0, 0.0); 256], 0)?;
    let equality = ones.lhs == 1.0 && ones.rhs == 1.0;
    Ok(Outcome {
        passed: violations == 0 && equality,
        detail: format!("van der Corput: {violations} violations in 3000 cases, all-ones H=0 equality {equality}"),
    })
}

fn sup_scan_oracle() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let seq = random_sequence(&mut rng, 512, 1.0);
    let p = PolyReal::from_integers(&[0, 0, 1]);
    let scan_started = Instant::now();
    let scan = sup_scan(&seq, &p, ScanDomain::UnitInterval, 4)?;
    let scan_secs = scan_started.elapsed().as_secs_f64();
    let keys: Vec<u64> = (0..512u64).map(|n| n * n).collect();
    let (_, oracle) = brute_sup(&seq, &keys, 1 << 16);
    let relative = (scan.sup_value - oracle).abs() / oracle;

    let err = scan.guaranteed_error.unwrap_or(f64::NAN);
    let mut dominated = 0;
    for _ in 0..1_000 {
        let t: f64 = rng.gen();
        if scan.sup_value + err >= ww_average(&seq, &p, t)?.abs() {
            dominated += 1;
        }
    }
    Ok(Outcome {
        passed: relative <= 1e-6 && dominated == 1_000,
        detail: format!(
            "sup scan N=512 p=n²: sup {:.12} vs brute {oracle:.12} (relative gap {relative:.2e}), dominance {dominated}/1000, scan {scan_secs:.2} s",
            scan.sup_value
        ),
    })
}

fn weyl_decay() -> Result<Outcome> {
    let one = Observable::constant(1, Complex64::new(1.0, 0.0))?;
    let spec = AverageSpec::new(
        SystemSpec::rotation(GOLDEN),
        one.clone(),
        one,
        1,
        2,
        PolyReal::from_integers(&[0, 0, 1]),
        Point::new(&[0.0]),
    )?;
    let t = std::f64::consts::SQRT_2;
    let checkpoints = [1_000, 10_000, 100_000, 1_000_000];
    let values = trace(&spec, t, &checkpoints)?;
    let ones = vec![Complex64::new(1.0, 0.0); 1_000_000];
    let mut oracle_gap = 0.0f64;
    for r in &values {
        oracle_gap = oracle_gap.max((r.value - weyl_direct(&ones[..r.n], &[0, 0, 1], t)).norm());
    }
    let mods: Vec<f64> = values.iter().map(|r| r.abs()).collect();
    let shown: Vec<String> = mods.iter().map(|v| format!("{v:.3e}")).collect();
    let decreasing = mods.windows(2).all(|w| w[1] < w[0]);
    Ok(Outcome {
        passed: decreasing && mods[3] <= 0.02 && oracle_gap <= 1e-9,
        detail: format!("Weyl decay at t=√2: |W_N| = [{}], oracle gap {oracle_gap:.1e}", shown.join(", ")),
    })
}

fn kronecker_witness() -> Result<Outcome> {
    let chi = Observable::character(vec![1]);
    let spec = AverageSpec::new(
        SystemSpec::rotation(GOLDEN),
        chi.clone(),
        chi,
        1,
        2,
        PolyReal::from_integers(&[0, 1]),
        Point::new(&[0.3]),
    )?;
    let sups: Vec<f64> = sup_trace(&spec, &[10, 100, 1_000, 10_000, 100_000], 4)?
        .iter()
        .map(|r| r.sup_value)
        .collect();
    let (lo, hi) = sups.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &s| (l.min(s), h.max(s)));
    Ok(Outcome {
        passed: lo >= 0.9 && hi <= 1.0 + 1e-9,
        detail: format!("Kronecker witness: sup_t |W_N| in [{lo:.12}, {hi:.12}] for N = 1e1..1e5"),
    })
}

fn random_observable(rng: &mut ChaCha8Rng, dim: usize) -> Result<Observable> {
    let count = rng.gen_range(1..=3);
    let terms = (0..count)
        .map(|_| Term {
            freq: (0..dim).map(|_| rng.gen_range(-3..=3)).collect(),
            amp: Angle::new(rng.gen()).cis() / count as f64,
        })
        .collect();
    Observable::new(terms)
}

fn reduction_identity() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let variants = [
        (1, SkewForm::PaperExact),
        (1, SkewForm::Generic),
        (2, SkewForm::PaperExact),
        (2, SkewForm::Generic),
        (3, SkewForm::Generic),
    ];
    let (mut runs, mut failures, mut worst) = (0, 0, 0.0f64);
    for (m, form) in variants {
        let mut drawn = 0;
        while drawn < 20 {
            let a = rng.gen_range(-3i64..=3);
            let b = rng.gen_range(-3i64..=3);
            let k = [-2i64, -1, 1, 2][rng.gen_range(0..4)];
            let base = SystemSpec::rotation(rng.gen::<f64>());
            let setup = ReductionSetup::new(
                a,
                b,
                m,
                form,
                k,
                rng.gen_range(-2..=2),
                Angle::new(rng.gen()),
                base,
                random_observable(&mut rng, 1)?,
                random_observable(&mut rng, 1)?,
                Point::new(&[rng.gen(), rng.gen(), rng.gen()]),
            );
            let Ok(setup) = setup else { continue };
            drawn += 1;
            let report = verify_reduction(&setup, 10_000, Some(rng.gen()))?;
            runs += 1;
            worst = worst.max(report.max_abs_gap);
            if !report.passed {
                failures += 1;
            }
        }
    }
    let basic = ReductionSetup::new(
        1,
        2,
        1,
        SkewForm::PaperExact,
        1,
        0,
        Angle::new(0.3),
        SystemSpec::rotation(GOLDEN),
        Observable::character(vec![1]),
        Observable::character(vec![1]),
        Point::new(&[0.1, 0.2, 0.3]),
    )?;
    let (_, q2) = basic.q();
    let (degree, lc) = basic.q_poly(1).leading_coeff_exact()?;
    let c2 = basic.c_top();
    let constant_ok = degree == 2 && lc == rational_from_int(1) && c2 == rational_from_int(2) && c2 == rational_from_int(basic.b * (basic.b - basic.a) * q2);
    Ok(Outcome {
        passed: failures == 0 && constant_ok,
        detail: format!(
            "reduction identity: {failures}/{runs} failures, max gap {worst:.2e}; c₂ = {c2} (b(b−a)q₂ match {constant_ok})"
        ),
    })
}

fn seminorm_sanity() -> Result<Outcome> {
    let mut notes = Vec::new();
    let mut ok = true;

    let skew = SystemSpec::skew(2, GOLDEN, SkewForm::Generic)?;
    let small = GhkParams {
        n: 200,
        h: 4,
        samples: 2,
        seed: 1,
    };
    for c in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5), Complex64::new(-0.25, 0.0)] {
        let f = Observable::constant(2, c)?;
        for k in 1..=4 {
            ok &= ghk_estimate(&skew, &f, k, &small)?.value == c.norm();
        }
    }
    notes.push(format!("constants exact {ok}"));

    let rot = SystemSpec::rotation(GOLDEN);
    let chi = Observable::character(vec![1]);
    let k1 = ghk_estimate(&rot, &chi, 1, &GhkParams { n: 100_000, h: 1, samples: 8, seed: 1 })?.value;
    let k2 = ghk_estimate(&rot, &chi, 2, &GhkParams { n: 100_000, h: 1_000, samples: 8, seed: 1 })?.value;
    ok &= k1 <= 1e-4 && (k2 - 1.0).abs() <= 0.05;
    notes.push(format!("character k=1 {k1:.2e}, k=2 {k2:.6}"));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for n in [1, 2, 3, 5, 8, 13, 16, 31, 32, 64] {
        let seq = random_sequence(&mut rng, n, 0.7);
        worst = worst.max((gowers_norm_finite(&seq, 2)?.powi(4) - fourier_l4(&seq)).abs());
    }
    let delta = [1.0, 0.0, 0.0, 0.0].map(|v| Complex64::new(v, 0.0));
    let delta_gap = (gowers_norm_finite(&delta, 2)? - 4f64.powf(-0.75)).abs();
    ok &= worst <= 1e-10 && delta_gap <= 1e-10;
    notes.push(format!("U² vs Fourier ℓ⁴ gap {worst:.1e}, delta gap {delta_gap:.1e}"));

    Ok(Outcome {
        passed: ok,
        detail: format!("seminorms: {}", notes.join("; ")),
    })
}

fn pair_bound_battery() -> Result<Outcome> {
    let one1 = Observable::constant(1, Complex64::new(1.0, 0.0))?;
    let chi = Observable::character(vec![1]);
    let rot = SystemSpec::rotation(GOLDEN);
    let skew = SystemSpec::skew(2, GOLDEN, SkewForm::Generic)?;
    let linear = PolyReal::from_integers(&[0, 1]);
    let square = PolyReal::from_integers(&[0, 0, 1]);
    let battery = vec![
        ("constant × character", AverageSpec::new(rot.clone(), one1.clone(), chi.clone(), 1, 2, linear.clone(), Point::new(&[0.0]))?, 1),
        ("Kronecker pair", AverageSpec::new(rot.clone(), chi.clone(), chi.clone(), 1, 2, linear.clone(), Point::new(&[0.0]))?, 1),
        ("constants, p=n²", AverageSpec::new(rot, one1.clone(), one1, 1, 2, square.clone(), Point::new(&[0.0]))?, 2),
        (
            "skew fibre character, p=n²",
            AverageSpec::new(skew, Observable::character(vec![0, 1]), Observable::character(vec![0, 1]), 1, 2, square, Point::new(&[0.0, 0.0]))?,
            2,
        ),
    ];
    let params = PairBoundParams::default();
    for (name, spec, k) in &battery {
        let row = estimate_pair_bound(spec, *k, &params)?;
        println!(
            "    pair bound [{name}] k_poly={} N={} samples={} lhs={:.6} rhs={:.6} ratio={:.6}",
            row.k_poly, row.n, row.samples, row.lhs, row.rhs, row.ratio
        );
    }
    Ok(Outcome {
        passed: true,
        detail: format!("pair-bound battery: {} rows emitted (report only)", battery.len()),
    })
}

fn main() {
    let results = [
        criterion(1, 10, closed_form_vs_iteration),
        criterion(2, 5, vdc_fuzz),
        criterion(3, 5, sup_scan_oracle),
        criterion(4, 30, weyl_decay),
        criterion(5, 10, kronecker_witness),
        criterion(6, 60, reduction_identity),
        criterion(7, 60, seminorm_sanity),
        criterion(8, 120, pair_bound_battery),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
