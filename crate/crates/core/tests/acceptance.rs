//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line. Tolerances and runtimes are part of the contract.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ergolab_core::entropy::{
    build_separated_family, entropy_estimate, verify_pairwise_separation,
    SepMethod,
};
use ergolab_core::interval::{classify_zero_entropy_app, ClassifyConfig};
use ergolab_core::measures::{
    detect_measure_multiplicity, empirical_measure, unique_ergodicity_test, weak_star_distance,
    TestFunctionFamily, SPREAD_THRESHOLD,
};
use ergolab_core::props::{test_app, test_strict_app, CellOutcome, PropertyGrid};
use ergolab_core::systems::zoo::*;
use ergolab_core::systems::SymbolicPoint;
use ergolab_core::tracing::{
    exact_power_certificate, is_traced, lift_power_tracing, start_times, trace_by_fixed_point,
    GapSchedule, TracingInstance,
};
use ergolab_core::{Point, SystemSpec};

fn report(criterion: u32, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Brute-force legal word enumeration, independent of `count_words`.
fn brute_words(transition: &[Vec<u8>], n: usize) -> u128 {
    fn rec(transition: &[Vec<u8>], prev: Option<usize>, left: usize) -> u128 {
        if left == 0 {
            return 1;
        }
        (0..transition.len())
            .filter(|&c| prev.is_none_or(|p| transition[p][c] == 1))
            .map(|c| rec(transition, Some(c), left - 1))
            .sum()
    }
    rec(transition, None, n)
}

#[test]
fn criterion_1_word_counts() {
    let t0 = std::time::Instant::now();
    let golden = golden_mean_sft();
    let transition = vec![vec![1u8, 1], vec![1, 0]];
    let mut ok = true;
    let mut first: Vec<u128> = Vec::new();
    for n in 1..=12usize {
        let fast = golden.count_words(n).unwrap();
        let brute = brute_words(&transition, n);
        first.push(fast);
        ok &= fast == brute;
    }
    ok &= first.starts_with(&[2, 3, 5, 8, 13, 21]);
    let full = full_shift(2);
    for n in 1..=32usize {
        ok &= full.count_words(n).unwrap() == 1u128 << n;
    }
    let elapsed = t0.elapsed();
    ok &= elapsed.as_secs_f64() < 5.0;
    report(
        1,
        ok,
        &format!("golden-mean counts {first:?} match brute force; 2^n exact; {elapsed:?}"),
    );
}

#[test]
fn criterion_2_entropy_slopes() {
    let t0 = std::time::Instant::now();
    // eps = 0.5 has agreement length 1, so symbolic counts equal the word
    // counts at length n exactly.
    let ns: Vec<usize> = (8..=16).collect();
    let golden = entropy_estimate(&golden_mean_sft(), &[0.5], &ns, SepMethod::Brute, 0)
        .unwrap()
        .estimate;
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let golden_ok = (golden - phi.ln()).abs() < 0.05;

    let full = entropy_estimate(&full_shift(2), &[0.5], &ns, SepMethod::Brute, 0)
        .unwrap()
        .estimate;
    let full_ok = (full - 2.0f64.ln()).abs() < 1e-9;

    let rot = entropy_estimate(
        &golden_rotation(),
        &[0.01],
        &[50, 100, 200],
        SepMethod::Greedy,
        4096,
    )
    .unwrap()
    .estimate;
    let rot_ok = rot.abs() < 0.01;
    let elapsed = t0.elapsed();
    report(
        2,
        golden_ok && full_ok && rot_ok && elapsed.as_secs_f64() < 30.0,
        &format!(
            "slopes: golden {golden:.4} (ln phi {:.4}), full {full:.4}, rotation {rot:.5}; {elapsed:?}",
            phi.ln()
        ),
    );
}

#[test]
fn criterion_3_separated_family() {
    let t0 = std::time::Instant::now();
    let sys = full_shift(4);
    let ys: [Point; 4] = [
        Point::Symbolic(SymbolicPoint::constant(0)),
        Point::Symbolic(SymbolicPoint::constant(1)),
        Point::Symbolic(SymbolicPoint::constant(2)),
        Point::Symbolic(SymbolicPoint::constant(3)),
    ];
    let (m, delta, depth) = (8usize, 0.05f64, 6usize);
    let family = build_separated_family(&sys, &ys, m, delta, depth, 0.5, 1024).unwrap();
    let mut ok = family.members.len() == 64;
    for member in &family.members {
        ok &= member.cert.counts.iter().all(|&c| c == 0);
        ok &= member.cert.instance.schedule.gaps.iter().all(|&t| t == 1);
    }
    let (sep_ok, bound) = verify_pairwise_separation(&sys, &family).unwrap();
    ok &= sep_ok;
    let expected = 2.0f64.ln() / ((1.0 + delta) * m as f64);
    ok &= (bound - expected).abs() < 1e-9;
    // Entropy at eps = gamma = 1/4 over lengths inside the family horizon
    // must dominate the bound.
    let horizon = ((1.0 + delta) * (2.0 * depth as f64 - 1.0) * m as f64).ceil() as usize;
    // Lengths capped at horizon / 2: the exact 4^n count overflows u128
    // beyond n = 63.
    let ns = [horizon / 8, horizon / 4, horizon / 2];
    let est = entropy_estimate(&sys, &[0.25], &ns, SepMethod::Brute, 0)
        .unwrap()
        .estimate;
    ok &= est >= expected - 0.02;
    let elapsed = t0.elapsed();
    ok &= elapsed.as_secs_f64() < 60.0;
    report(
        3,
        ok,
        &format!(
            "64 members, 2016 pairs separated, bound {bound:.4} (expected {expected:.4}), entropy {est:.4}; {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_4_tracing_arithmetic() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut ok = true;
    // Independent recurrence oracle on 10^4 random schedules.
    for _ in 0..10_000 {
        let k = rng.gen_range(1..8usize);
        let lengths: Vec<usize> = (0..k).map(|_| rng.gen_range(1..100)).collect();
        let gaps: Vec<usize> = (0..k - 1).map(|_| rng.gen_range(1..40)).collect();
        let ours = start_times(&lengths, &gaps).unwrap();
        let mut oracle = vec![0u64];
        for i in 0..gaps.len() {
            oracle.push(oracle[i] + lengths[i] as u64 + gaps[i] as u64 - 1);
        }
        ok &= ours == oracle;
    }
    // Monotonicity in (delta, eps) on 10^3 randomized instances.
    let sys = full_shift(2);
    for _ in 0..1_000 {
        let k = rng.gen_range(1..4usize);
        let targets: Vec<Point> = (0..k)
            .map(|_| {
                let w: Vec<u8> = (0..rng.gen_range(1..10usize)).map(|_| rng.gen_range(0..2)).collect();
                Point::Symbolic(SymbolicPoint::periodic(w))
            })
            .collect();
        let lengths: Vec<usize> = (0..k).map(|_| rng.gen_range(2..12)).collect();
        let gaps: Vec<usize> = (0..k - 1).map(|_| rng.gen_range(1..6)).collect();
        let schedule = GapSchedule::new(lengths, gaps).unwrap();
        let z: Vec<u8> = (0..rng.gen_range(1..10usize)).map(|_| rng.gen_range(0..2)).collect();
        let z = Point::Symbolic(SymbolicPoint::periodic(z));
        let delta = rng.gen_range(0.0..0.6);
        let eps = rng.gen_range(0.26..0.9);
        let base = TracingInstance::new(targets.clone(), schedule.clone(), delta, eps).unwrap();
        let (traced, _) = is_traced(&sys, &z, &base).unwrap();
        if traced {
            let wider = TracingInstance::new(
                targets,
                schedule,
                delta + rng.gen_range(0.0..0.4),
                eps + rng.gen_range(0.0..2.0),
            )
            .unwrap();
            let (still, _) = is_traced(&sys, &z, &wider).unwrap();
            ok &= still;
        }
    }
    report(4, ok, "10^4 schedule oracles exact; 10^3 monotonicity instances hold");
}

#[test]
fn criterion_5_fixed_point_tracer() {
    let t0 = std::time::Instant::now();
    // Base-4 metric puts the agreement length of eps = 0.4 at exactly one
    // symbol, so mistakes are exactly the ones in each window.
    let sys = density_zero_subshift_with_base(4.0);
    let p = Point::Symbolic(SymbolicPoint::constant(0));
    let gen = Point::Symbolic(SymbolicPoint::power_generator());
    let ns: Vec<usize> = (8..=14).map(|e| 1usize << e).collect();
    let report_fp = trace_by_fixed_point(&sys, &p, &[gen], &ns, 0.4, 0.05).unwrap();
    let mut ok = true;
    for row in &report_fp.rows {
        let bound = ((row.n as f64).log2().floor() + 2.0) / row.n as f64;
        for &f in &row.fractions {
            ok &= f <= bound;
        }
    }
    ok &= report_fp.empirical_m == Some(0);
    // The APP tester passes the same cells.
    let grid = PropertyGrid {
        delta1: vec![0.25],
        delta2: vec![0.05],
        eps: vec![0.4],
        ns: vec![256, 1024, 4096],
        blocks: 6,
        trials: 2,
    };
    let app = test_app(&sys, &grid, 4096, 5).unwrap();
    ok &= app.all_pass();
    let elapsed = t0.elapsed();
    ok &= elapsed.as_secs_f64() < 20.0;
    report(
        5,
        ok,
        &format!(
            "fractions within (log2 n + 2)/n for n in 2^8..2^14; APP cells pass; {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_6_power_lift() {
    let t0 = std::time::Instant::now();
    let sys = full_shift(2);
    let big_n = 3u64;
    let (gamma, eps) = (0.0625f64, 0.25f64);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ok = true;
    for trial in 0..100 {
        let k = rng.gen_range(2..5usize);
        let m = rng.gen_range(4..10usize);
        let gap = rng.gen_range(2..5usize);
        let l = rng.gen_range(0..big_n);
        let targets: Vec<Point> = (0..k)
            .map(|_| {
                let w: Vec<u8> = (0..8).map(|_| rng.gen_range(0..2)).collect();
                Point::Symbolic(SymbolicPoint::periodic(w))
            })
            .collect();
        // Certificate under f^3, then lift to f and re-verify with the
        // independent checker.
        let cert = exact_power_certificate(&sys, &targets, m, gap, big_n, gamma, 0.125).unwrap();
        let lifted = lift_power_tracing(&sys, big_n, &cert, gamma, eps, l).unwrap();
        let verified = lifted.verify(&sys).unwrap();
        ok &= verified;
        if !verified {
            eprintln!("trial {trial}: lift failed to re-verify");
        }
    }
    let elapsed = t0.elapsed();
    ok &= elapsed.as_secs_f64() < 20.0;
    report(6, ok, &format!("100 random lifts re-verified under f; {elapsed:?}"));
}

#[test]
fn criterion_7_strict_gap() {
    let t0 = std::time::Instant::now();
    let sys = density_zero_subshift();
    // Adversarial targets alternate the generator and the zero point
    // (landmark order); the strict search is an exhaustive cylinder scan.
    let grid = PropertyGrid {
        delta1: vec![0.25],
        delta2: vec![0.5],
        eps: vec![0.25],
        ns: vec![16, 32, 64],
        blocks: 4,
        trials: 1,
    };
    let strict = test_strict_app(&sys, &grid, usize::MAX, 7).unwrap();
    let mut ok = strict
        .cells
        .iter()
        .all(|c| c.outcome == CellOutcome::NoWitnessAtBudget);
    let app = test_app(&sys, &grid, usize::MAX, 7).unwrap();
    ok &= app.all_pass();
    let elapsed = t0.elapsed();
    ok &= elapsed.as_secs_f64() < 120.0;
    report(
        7,
        ok,
        &format!(
            "strict: no witness at n in {{16,32,64}} (exhaustive); non-strict passes; {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_8_classifier() {
    let t0 = std::time::Instant::now();
    let mut ok = true;

    let halving = match halving_map() {
        SystemSpec::IntervalMap { map } => map,
        _ => unreachable!(),
    };
    let rec = classify_zero_entropy_app(&halving, &ClassifyConfig::default()).unwrap();
    ok &= rec.characterization;
    let h_slope = rec.entropy_slope.unwrap();
    ok &= h_slope < 0.02;
    ok &= rec
        .app_trace
        .as_ref()
        .is_some_and(|t| t.rows.iter().all(|r| r.fractions.iter().all(|&f| f <= 0.1)));
    let h_sys = halving_map();
    let fam = TestFunctionFamily::for_system(&h_sys).unwrap();
    let h_samples: Vec<Point> = [0.1, 0.5, 0.9].iter().map(|&x| Point::Interval(x)).collect();
    let h_clusters = detect_measure_multiplicity(&h_sys, &h_samples, 512, 0.02, &fam)
        .unwrap()
        .clusters;
    ok &= h_clusters.len() == 1;

    let tent = match tent_map() {
        SystemSpec::IntervalMap { map } => map,
        _ => unreachable!(),
    };
    let config = ClassifyConfig {
        entropy: Some((vec![1e-3], vec![5, 7, 9], 1 << 21)),
        app: None,
        ..ClassifyConfig::default()
    };
    let rec = classify_zero_entropy_app(&tent, &config).unwrap();
    ok &= !rec.characterization;
    let t_slope = rec.entropy_slope.unwrap();
    ok &= (t_slope - 2.0f64.ln()).abs() < 0.1;
    let t_sys = tent_map();
    let fam = TestFunctionFamily::for_system(&t_sys).unwrap();
    let t_samples: Vec<Point> = [0.0, 2.0 / 3.0, 0.3]
        .iter()
        .map(|&x| Point::Interval(x))
        .collect();
    let t_clusters = detect_measure_multiplicity(&t_sys, &t_samples, 64, 0.02, &fam)
        .unwrap()
        .clusters;
    ok &= t_clusters.len() >= 2;

    let logistic = match logistic_map(2.5) {
        SystemSpec::IntervalMap { map } => map,
        _ => unreachable!(),
    };
    let config = ClassifyConfig {
        entropy: None,
        app: None,
        ..ClassifyConfig::default()
    };
    let rec = classify_zero_entropy_app(&logistic, &config).unwrap();
    ok &= !rec.characterization && rec.fixed_points.len() == 2;

    let elapsed = t0.elapsed();
    ok &= elapsed.as_secs_f64() < 120.0;
    report(
        8,
        ok,
        &format!(
            "halving: satisfied, slope {h_slope:.4}, 1 cluster; tent: fails, slope {t_slope:.4}, {} clusters; logistic(2.5): 2 fixed points; {elapsed:?}",
            t_clusters.len()
        ),
    );
}

#[test]
fn criterion_9_measure_axioms() {
    let t0 = std::time::Instant::now();
    let sys = golden_rotation();
    let fam = TestFunctionFamily::for_system(&sys).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut ok = true;
    for _ in 0..1_000 {
        let mk = |rng: &mut ChaCha8Rng| {
            let x = Point::circle_from_f64(rng.gen_range(0.0..1.0));
            empirical_measure(&sys, &x, rng.gen_range(1..64)).unwrap()
        };
        let (a, b, c) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
        let dab = weak_star_distance(&sys, &a, &b, &fam).unwrap();
        let dba = weak_star_distance(&sys, &b, &a, &fam).unwrap();
        ok &= dab == dba;
        let dac = weak_star_distance(&sys, &a, &c, &fam).unwrap();
        let dcb = weak_star_distance(&sys, &c, &b, &fam).unwrap();
        ok &= dab <= dac + dcb + 1e-12;
    }
    let starts: Vec<Point> = (0..8)
        .map(|i| Point::circle_from_f64(i as f64 / 8.0))
        .collect();
    let report_ue = unique_ergodicity_test(&sys, &starts, &[100, 1000, 10_000], &fam).unwrap();
    let first = report_ue.rows.first().unwrap().spread;
    let last = report_ue.rows.last().unwrap().spread;
    ok &= last < SPREAD_THRESHOLD && last * 2.0 <= first && report_ue.unique;
    let elapsed = t0.elapsed();
    ok &= elapsed.as_secs_f64() < 30.0;
    report(
        9,
        ok,
        &format!(
            "10^3 triples: symmetry exact, triangle holds; rotation spread {first:.4} -> {last:.4}; {elapsed:?}"
        ),
    );
}
