//! Experiment execution: each experiment kind maps onto the core library,
//! emits a deterministic JSON report plus CSV tables, and returns the
//! report for printing.

use std::error::Error;
use std::fs;
use std::path::Path;

use serde_json::json;

use ergolab_core::entropy::{entropy_estimate, SepMethod};
use ergolab_core::interval::classify_zero_entropy_app;
use ergolab_core::measures::{
    detect_measure_multiplicity, unique_ergodicity_test, TestFunctionFamily,
};
use ergolab_core::props::{test_app, test_periodic_exact_spec, test_strict_app, CellOutcome};
use ergolab_core::tracing::{is_traced, search_tracing_point};
use ergolab_core::{Point, SystemSpec, TracingCertificate};

use crate::config::{DichotomyParams, Experiment, ExperimentConfig, TraceParams};
use crate::report::{fmt_f64, write_csv, write_report, Report};

pub fn execute(
    config: &ExperimentConfig,
    config_bytes: &[u8],
    out_dir: &Path,
) -> Result<Report, Box<dyn Error>> {
    let sys = config.system.resolve()?;
    let seed = config.seed;
    let budget = config.budget;
    let (verdict, data) = match &config.experiment {
        Experiment::Entropy { eps, ns } => run_entropy(&sys, eps, ns, budget, out_dir)?,
        Experiment::Trace(params) => run_trace(&sys, params, budget, out_dir)?,
        Experiment::App { grid } => {
            let report = test_app(&sys, grid, budget, seed)?;
            write_property_csv(out_dir, &report)?;
            (report.trend.clone(), serde_json::to_value(&report)?)
        }
        Experiment::Sapp { grid } => {
            let report = test_strict_app(&sys, grid, budget, seed)?;
            write_property_csv(out_dir, &report)?;
            (report.trend.clone(), serde_json::to_value(&report)?)
        }
        Experiment::Spec { profiles, eps } => {
            let report = test_periodic_exact_spec(&sys, profiles, eps, budget)?;
            let rows: Vec<Vec<String>> = report
                .cells
                .iter()
                .map(|c| {
                    vec![
                        format!("{:?}", c.profile),
                        fmt_f64(c.eps),
                        c.m.map_or("none".into(), |m| m.to_string()),
                    ]
                })
                .collect();
            write_csv(out_dir, "spec_cells.csv", &["profile", "eps", "m"], &rows)?;
            let found = report.cells.iter().filter(|c| c.m.is_some()).count();
            (
                format!("{found}/{} cells admit a uniform gap", report.cells.len()),
                serde_json::to_value(&report)?,
            )
        }
        Experiment::UniqueErgodicity { ns } => {
            let fam = TestFunctionFamily::for_system(&sys)?;
            let starts = sys.landmarks();
            let report = unique_ergodicity_test(&sys, &starts, ns, &fam)?;
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| vec![r.n.to_string(), fmt_f64(r.spread)])
                .collect();
            write_csv(out_dir, "spread.csv", &["n", "spread"], &rows)?;
            (
                format!(
                    "{}: final spread {}",
                    if report.unique { "unique" } else { "not unique" },
                    fmt_f64(report.rows.last().map_or(f64::NAN, |r| r.spread))
                ),
                serde_json::to_value(&report)?,
            )
        }
        Experiment::Cluster { n, eta } => {
            let fam = TestFunctionFamily::for_system(&sys)?;
            let starts = sys.landmarks();
            let report = detect_measure_multiplicity(&sys, &starts, *n, *eta, &fam)?;
            let mut rows = Vec::new();
            for (c, members) in report.clusters.iter().enumerate() {
                for &m in members {
                    rows.push(vec![m.to_string(), c.to_string()]);
                }
            }
            write_csv(out_dir, "clusters.csv", &["sample", "cluster"], &rows)?;
            (
                format!("{} measure clusters", report.clusters.len()),
                serde_json::to_value(&report)?,
            )
        }
        Experiment::IntervalClassify { classify } => {
            let map = match &sys {
                SystemSpec::IntervalMap { map } => map.clone(),
                other => {
                    return Err(format!(
                        "interval-classify needs an interval map, got {}",
                        other.id()
                    )
                    .into())
                }
            };
            let record = classify_zero_entropy_app(&map, classify)?;
            let rows: Vec<Vec<String>> = record
                .fixed_points
                .iter()
                .map(|r| {
                    vec![
                        fmt_f64(r.location),
                        fmt_f64(r.residual),
                        r.bracketed.to_string(),
                        format!("{:?}", r.verdict),
                    ]
                })
                .collect();
            write_csv(
                out_dir,
                "fixed_points.csv",
                &["location", "residual", "bracketed", "verdict"],
                &rows,
            )?;
            (
                if record.characterization {
                    "characterization satisfied".to_string()
                } else {
                    "characterization fails".to_string()
                },
                serde_json::to_value(&record)?,
            )
        }
        Experiment::Dichotomy(params) => run_dichotomy(&sys, params, budget, seed, out_dir)?,
    };
    let report = Report::new(
        config.experiment.kind(),
        sys.id(),
        seed,
        config_bytes,
        verdict,
        data,
    );
    write_report(out_dir, &report)?;
    Ok(report)
}

fn run_entropy(
    sys: &SystemSpec,
    eps: &[f64],
    ns: &[usize],
    budget: usize,
    out_dir: &Path,
) -> Result<(String, serde_json::Value), Box<dyn Error>> {
    let est = entropy_estimate(sys, eps, ns, SepMethod::Greedy, budget)?;
    let rows: Vec<Vec<String>> = est
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.eps),
                r.n.to_string(),
                r.count.to_string(),
                fmt_f64(r.ln_count),
            ]
        })
        .collect();
    write_csv(out_dir, "entropy.csv", &["eps", "n", "count", "ln_count"], &rows)?;
    let slope_rows: Vec<Vec<String>> = est
        .per_eps
        .iter()
        .map(|s| vec![fmt_f64(s.eps), fmt_f64(s.slope), fmt_f64(s.residual)])
        .collect();
    write_csv(out_dir, "slopes.csv", &["eps", "slope", "residual"], &slope_rows)?;
    Ok((
        format!("entropy estimate {}", fmt_f64(est.estimate)),
        serde_json::to_value(&est)?,
    ))
}

fn run_trace(
    sys: &SystemSpec,
    params: &TraceParams,
    budget: usize,
    out_dir: &Path,
) -> Result<(String, serde_json::Value), Box<dyn Error>> {
    if let Some(path) = &params.verify {
        let bytes = fs::read(path)?;
        let cert: TracingCertificate = serde_json::from_slice(&bytes)?;
        let (ok, counts) = is_traced(sys, &cert.tracer, &cert.instance)?;
        let valid = ok && counts == cert.counts;
        let verdict = if valid {
            "certificate valid".to_string()
        } else {
            // Name the first failing block (1-based): a mistake budget
            // overrun or a count that disagrees with the stored one.
            let lengths = &cert.instance.schedule.lengths;
            let failing = counts
                .iter()
                .zip(&cert.counts)
                .enumerate()
                .find(|&(k, (fresh, stored))| {
                    *fresh as f64 > cert.instance.delta * lengths[k] as f64 || fresh != stored
                })
                .map(|(k, _)| k + 1)
                .unwrap_or(0);
            format!("certificate invalid (block {failing})")
        };
        let data = json!({ "valid": valid, "fresh_counts": counts, "stored_counts": cert.counts });
        return Ok((verdict, data));
    }
    let targets: Vec<Point> = match &params.targets {
        Some(t) => t.clone(),
        None => {
            let landmarks = sys.landmarks();
            (0..params.blocks)
                .map(|i| landmarks[i % landmarks.len()].clone())
                .collect()
        }
    };
    let found = search_tracing_point(
        sys,
        &targets,
        params.n,
        params.delta1,
        params.delta2,
        params.eps,
        params.blocks,
        budget,
    )?;
    match found {
        Some(cert) => {
            let rows: Vec<Vec<String>> = cert
                .counts
                .iter()
                .enumerate()
                .map(|(k, c)| vec![(k + 1).to_string(), c.to_string()])
                .collect();
            write_csv(out_dir, "trace_counts.csv", &["block", "mistakes"], &rows)?;
            fs::create_dir_all(out_dir)?;
            let mut body = serde_json::to_string_pretty(&cert)?;
            body.push('\n');
            fs::write(out_dir.join("certificate.json"), body)?;
            Ok((
                format!("tracer found ({:?})", cert.route),
                serde_json::to_value(&cert)?,
            ))
        }
        None => Ok(("no witness at budget".to_string(), json!(null))),
    }
}

fn write_property_csv(
    out_dir: &Path,
    report: &ergolab_core::props::PropertyReport,
) -> Result<(), Box<dyn Error>> {
    let rows: Vec<Vec<String>> = report
        .cells
        .iter()
        .map(|c| {
            vec![
                fmt_f64(c.delta1),
                fmt_f64(c.delta2),
                fmt_f64(c.eps),
                c.n.to_string(),
                format!("{:?}", c.outcome),
            ]
        })
        .collect();
    write_csv(
        out_dir,
        "property_cells.csv",
        &["delta1", "delta2", "eps", "n", "outcome"],
        &rows,
    )?;
    Ok(())
}

fn run_dichotomy(
    sys: &SystemSpec,
    params: &DichotomyParams,
    budget: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<(String, serde_json::Value), Box<dyn Error>> {
    // Hypothesis check: the tracing property over the configured grid.
    let app = test_app(sys, &params.grid, budget, seed)?;
    let app_ok = app.all_pass();

    let est = entropy_estimate(sys, &params.entropy_eps, &params.entropy_ns, SepMethod::Greedy, budget)?;
    let zero_entropy = est.estimate <= params.slope_threshold;

    let fam = TestFunctionFamily::for_system(sys)?;
    let starts = sys.landmarks();
    let ue = unique_ergodicity_test(sys, &starts, &params.measure_ns, &fam)?;
    let n_cluster = *params.measure_ns.last().expect("measure_ns nonempty");
    let clusters = detect_measure_multiplicity(sys, &starts, n_cluster, params.eta, &fam)?;
    let single = clusters.clusters.len() == 1;
    let unique_evidence = ue.unique && single;

    let verdict = if !app_ok {
        "HYPOTHESIS-UNMET".to_string()
    } else if zero_entropy == unique_evidence {
        "CONSISTENT".to_string()
    } else {
        "INCONSISTENT".to_string()
    };

    let rows = vec![
        vec!["app_passes".into(), app_ok.to_string()],
        vec!["entropy_slope".into(), fmt_f64(est.estimate)],
        vec!["slope_threshold".into(), fmt_f64(params.slope_threshold)],
        vec!["zero_entropy_at_scale".into(), zero_entropy.to_string()],
        vec!["uniform_convergence".into(), ue.unique.to_string()],
        vec!["measure_clusters".into(), clusters.clusters.len().to_string()],
        vec!["verdict".into(), verdict.clone()],
    ];
    write_csv(out_dir, "dichotomy.csv", &["metric", "value"], &rows)?;

    let data = json!({
        "app": serde_json::to_value(&app)?,
        "entropy": serde_json::to_value(&est)?,
        "unique_ergodicity": serde_json::to_value(&ue)?,
        "clusters": serde_json::to_value(&clusters)?,
        "thresholds": {
            "slope_threshold": params.slope_threshold,
            "spread_threshold": ergolab_core::measures::SPREAD_THRESHOLD,
            "linkage": 2.0 * params.eta,
        },
        "flags": {
            "app_passes": app_ok,
            "zero_entropy_at_scale": zero_entropy,
            "unique_evidence": unique_evidence,
        },
    });
    let cells_pass = app
        .cells
        .iter()
        .filter(|c| c.outcome != CellOutcome::NoWitnessAtBudget)
        .count();
    let verdict_line = format!(
        "{verdict} (slope {}, {} clusters, app {cells_pass}/{} cells)",
        fmt_f64(est.estimate),
        clusters.clusters.len(),
        app.cells.len()
    );
    Ok((verdict_line, data))
}
