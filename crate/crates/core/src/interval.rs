//! Interval-map analysis: fixed and periodic point location by sign-change
//! bracketing, attracting-fixed-point verification on sampled starts, the
//! displacement consequence check, and the zero-entropy classifier.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{entropy_estimate, SepMethod};
use crate::error::{CoreError, Result};
use crate::systems::{IntervalMapSpec, Point, SystemSpec};
use crate::tracing::{trace_by_fixed_point, FixedPointTraceReport};

/// Attraction verdict for a fixed point, on sampled starts only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    AttractingOnSamples,
    NotAttracting,
    Inconclusive,
}

/// Convergence evidence of one sampled start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinSample {
    pub start: f64,
    pub final_distance: f64,
    pub converged: bool,
}

/// A located fixed point with whatever attraction evidence has been
/// gathered for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointRecord {
    /// Bracketing interval of width at most `tol` (the whole domain for
    /// degenerate plateaus).
    pub bracket: (f64, f64),
    /// Bracket midpoint.
    pub location: f64,
    /// `f(location) - location`.
    pub residual: f64,
    /// Whether a genuine sign change brackets the root (plateaus and
    /// minimizer fallbacks are not bracketed).
    pub bracketed: bool,
    pub verdict: Verdict,
    pub basin: Vec<BasinSample>,
}

/// A located periodic point of a given period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPointRecord {
    pub period: usize,
    pub bracket: (f64, f64),
    pub location: f64,
    /// `f^q(location) - location`.
    pub residual: f64,
    pub bracketed: bool,
}

fn iter_map(map: &IntervalMapSpec, x: f64, q: usize) -> Result<f64> {
    let mut y = x;
    for _ in 0..q {
        y = map.eval(y)?;
    }
    Ok(y)
}

/// Roots of `f^q(x) - x` on a uniform grid: sign-change brackets sharpened
/// by bisection, near-zero endpoint and grid values, deduplicated at grid
/// spacing. An all-zero displacement (identity-like plateau) yields one
/// unbracketed record over the whole domain; an empty scan yields the
/// global minimizer of `|f^q(x) - x|`, also unbracketed.
fn scan_roots(
    map: &IntervalMapSpec,
    q: usize,
    resolution: usize,
    tol: f64,
) -> Result<Vec<PeriodicPointRecord>> {
    if resolution < 2 {
        return Err(CoreError::InvalidParams("resolution must be >= 2".into()));
    }
    if q < 1 {
        return Err(CoreError::NonPositiveEntry {
            what: "period",
            value: q as i64,
        });
    }
    if tol <= 0.0 {
        return Err(CoreError::NonPositiveRadius(tol));
    }
    let h = (map.hi - map.lo) / resolution as f64;
    let grid: Vec<f64> = (0..=resolution)
        .map(|i| map.lo + i as f64 * h)
        .collect();
    let g: Vec<f64> = grid
        .iter()
        .map(|&x| Ok(iter_map(map, x, q)? - x))
        .collect::<Result<_>>()?;

    if g.iter().all(|&v| v.abs() <= tol) {
        // Identity-like plateau: a continuum of fixed points.
        return Ok(vec![PeriodicPointRecord {
            period: q,
            bracket: (map.lo, map.hi),
            location: 0.5 * (map.lo + map.hi),
            residual: g[resolution / 2],
            bracketed: false,
        }]);
    }

    let mut roots: Vec<(f64, f64, bool)> = Vec::new(); // (lo, hi, bracketed)
    for i in 0..=resolution {
        if g[i].abs() <= tol {
            roots.push((grid[i], grid[i], false));
        }
    }
    for i in 0..resolution {
        if g[i] * g[i + 1] < 0.0 && g[i].abs() > tol && g[i + 1].abs() > tol {
            let (mut a, mut b) = (grid[i], grid[i + 1]);
            let (mut ga, _) = (g[i], g[i + 1]);
            while b - a > tol {
                let mid = 0.5 * (a + b);
                let gm = iter_map(map, mid, q)? - mid;
                if gm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if ga * gm < 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    ga = gm;
                }
            }
            roots.push((a, b, true));
        }
    }
    roots.sort_by(|p, r| p.0.partial_cmp(&r.0).unwrap());
    let mut dedup: Vec<(f64, f64, bool)> = Vec::new();
    for r in roots {
        match dedup.last_mut() {
            Some(prev) if r.0 - prev.0 <= h => {
                // Prefer the bracketed representative.
                if r.2 && !prev.2 {
                    *prev = r;
                }
            }
            _ => dedup.push(r),
        }
    }
    if dedup.is_empty() {
        // Guaranteed-nonempty fallback: the minimizer of |f^q(x) - x|.
        let (i, _) = g
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .unwrap();
        dedup.push((grid[i], grid[i], false));
    }
    dedup
        .into_iter()
        .map(|(a, b, bracketed)| {
            let location = 0.5 * (a + b);
            Ok(PeriodicPointRecord {
                period: q,
                bracket: (a, b),
                location,
                residual: iter_map(map, location, q)? - location,
                bracketed,
            })
        })
        .collect()
}

/// Locate the fixed points of the map: roots of `f(x) - x`. The list is
/// never empty for a map of the interval into itself; when no sign change
/// or near-zero value is found the global displacement minimizer is
/// returned unbracketed.
pub fn find_fixed_points(
    map: &IntervalMapSpec,
    resolution: usize,
    tol: f64,
) -> Result<Vec<FixedPointRecord>> {
    Ok(scan_roots(map, 1, resolution, tol)?
        .into_iter()
        .map(|r| FixedPointRecord {
            bracket: r.bracket,
            location: r.location,
            residual: r.residual,
            bracketed: r.bracketed,
            verdict: Verdict::Inconclusive,
            basin: Vec::new(),
        })
        .collect())
}

/// Locate genuine period-`q` points: roots of `f^q(x) - x` with the points
/// of every strictly smaller period dividing `q` removed (at grid-spacing
/// granularity). `q = 1` coincides with [`find_fixed_points`].
pub fn find_periodic_points(
    map: &IntervalMapSpec,
    q: usize,
    resolution: usize,
    tol: f64,
) -> Result<Vec<PeriodicPointRecord>> {
    let mut roots = scan_roots(map, q, resolution, tol)?;
    if q > 1 {
        let h = (map.hi - map.lo) / resolution as f64;
        let mut lower: Vec<f64> = Vec::new();
        for d in 1..q {
            if q.is_multiple_of(d) {
                for r in scan_roots(map, d, resolution, tol)? {
                    lower.push(r.location);
                }
            }
        }
        roots.retain(|r| lower.iter().all(|&p| (r.location - p).abs() > h));
    }
    Ok(roots)
}

/// Exit radius separating "keeps leaving every small neighborhood" from
/// merely slow convergence, as a fraction of the domain width.
const EXIT_FRACTION: f64 = 1e-3;

/// Decide attraction of the fixed point `p` on the sampled starts: every
/// orbit must land within `tol` of `p` at the horizon with eventually
/// non-increasing distance. An orbit still leaving the exit radius over
/// the final quarter of the horizon refutes attraction on samples; orbits
/// that neither converge nor clearly exit leave the verdict inconclusive.
pub fn is_attracting(
    map: &IntervalMapSpec,
    p: f64,
    starts: &[f64],
    horizon: usize,
    tol: f64,
) -> Result<(Verdict, Vec<BasinSample>)> {
    if (map.eval(p)? - p).abs() > tol {
        return Err(CoreError::NotFixedPoint(p));
    }
    if starts.is_empty() || horizon < 4 {
        return Err(CoreError::InvalidParams(
            "need starts and a horizon of at least 4".into(),
        ));
    }
    let exit = (map.hi - map.lo) * EXIT_FRACTION;
    let samples: Vec<Result<(BasinSample, bool)>> = starts
        .par_iter()
        .map(|&x0| {
            let mut dists = Vec::with_capacity(horizon + 1);
            let mut x = x0;
            dists.push((x - p).abs());
            for _ in 0..horizon {
                x = map.eval(x)?;
                dists.push((x - p).abs());
            }
            let tail = &dists[horizon - horizon / 4..];
            let monotone = tail.windows(2).all(|w| w[1] <= w[0] + tol);
            let converged = *dists.last().unwrap() <= tol && monotone;
            let exits = tail.iter().any(|&d| d > exit);
            Ok((
                BasinSample {
                    start: x0,
                    final_distance: *dists.last().unwrap(),
                    converged,
                },
                exits,
            ))
        })
        .collect();
    let mut basin = Vec::with_capacity(starts.len());
    let mut any_exits = false;
    for s in samples {
        let (b, exits) = s?;
        any_exits |= exits && !b.converged;
        basin.push(b);
    }
    let verdict = if basin.iter().all(|b| b.converged) {
        Verdict::AttractingOnSamples
    } else if any_exits {
        Verdict::NotAttracting
    } else {
        Verdict::Inconclusive
    };
    Ok((verdict, basin))
}

/// One violation of the displacement consequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementViolation {
    pub start: f64,
    pub step: usize,
    pub value: f64,
}

/// Report of [`check_fnxgex`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementReport {
    /// False when the no-other-periodic-points hypothesis was not
    /// established, in which case nothing was checked.
    pub checked: bool,
    pub violations: Vec<DisplacementViolation>,
}

/// Check the consequence of a unique fixed point with no other periodic
/// points: every iterate of a start below `p` stays above the start
/// (`f^j(x) > x`), and symmetrically below it for starts above `p`.
/// Requires the caller to pass whether the periodic-point hypothesis was
/// verified; violations are counterexamples to that hypothesis.
pub fn check_fnxgex(
    map: &IntervalMapSpec,
    p: f64,
    samples: &[f64],
    n: usize,
    hypothesis_verified: bool,
) -> Result<DisplacementReport> {
    if (map.eval(p)? - p).abs() > map.tol.max(1e-7) {
        return Err(CoreError::NotFixedPoint(p));
    }
    if !hypothesis_verified {
        return Ok(DisplacementReport {
            checked: false,
            violations: Vec::new(),
        });
    }
    let mut violations = Vec::new();
    for &x0 in samples {
        if (x0 - p).abs() <= map.tol {
            continue;
        }
        let mut x = x0;
        for j in 1..=n {
            x = map.eval(x)?;
            let bad = if x0 < p { x <= x0 } else { x >= x0 };
            if bad {
                violations.push(DisplacementViolation {
                    start: x0,
                    step: j,
                    value: x,
                });
                break;
            }
        }
    }
    Ok(DisplacementReport {
        checked: true,
        violations,
    })
}

/// Cross-check parameters of the classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub period_bound: usize,
    pub resolution: usize,
    pub tol: f64,
    pub samples: usize,
    pub horizon: usize,
    /// Entropy cross-check: `(eps list, n list, budget)`; skipped if `None`.
    pub entropy: Option<(Vec<f64>, Vec<usize>, usize)>,
    /// Tracing cross-check `(delta2, eps, n list)` through the fixed-point
    /// tracer; skipped if `None`.
    pub app: Option<(f64, f64, Vec<usize>)>,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            period_bound: 8,
            resolution: 4096,
            tol: 1e-9,
            samples: 64,
            horizon: 512,
            entropy: Some((vec![0.05], vec![4, 6, 8], 16384)),
            app: Some((0.1, 0.1, vec![64, 128, 256, 512])),
        }
    }
}

/// Verdict record of the classifier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub fixed_points: Vec<FixedPointRecord>,
    /// Genuine periodic points of periods `2..=period_bound`.
    pub extra_periodic: Vec<PeriodicPointRecord>,
    /// Whether the map has exactly one fixed point, no higher-period
    /// points up to the bound, and that point attracts on samples.
    pub characterization: bool,
    pub entropy_slope: Option<f64>,
    pub app_trace: Option<FixedPointTraceReport>,
    pub displacement: Option<DisplacementReport>,
    /// Scope of the periodic-point claim.
    pub notes: String,
}

/// Decide whether the map matches the unique-attracting-fixed-point
/// characterization and gather the corroborating evidence: entropy slope
/// near zero and a passing fixed-point tracer when it does.
pub fn classify_zero_entropy_app(
    map: &IntervalMapSpec,
    config: &ClassifyConfig,
) -> Result<ClassificationRecord> {
    let mut fixed = find_fixed_points(map, config.resolution, config.tol)?;
    let mut extra = Vec::new();
    for q in 2..=config.period_bound {
        extra.extend(find_periodic_points(map, q, config.resolution, config.tol)?);
    }
    let genuine: Vec<usize> = fixed
        .iter()
        .enumerate()
        .filter(|(_, r)| r.residual.abs() <= config.tol.max(1e-7))
        .map(|(i, _)| i)
        .collect();
    let single = genuine.len() == 1 && extra.is_empty();
    let mut characterization = false;
    if single {
        let idx = genuine[0];
        let p = fixed[idx].location;
        let h = (map.hi - map.lo) / (config.samples.max(2) - 1) as f64;
        let starts: Vec<f64> = (0..config.samples.max(2))
            .map(|i| map.lo + i as f64 * h)
            .collect();
        let (verdict, basin) = is_attracting(map, p, &starts, config.horizon, config.tol)?;
        fixed[idx].verdict = verdict;
        fixed[idx].basin = basin;
        characterization = verdict == Verdict::AttractingOnSamples;
    }

    let sys = SystemSpec::IntervalMap { map: map.clone() };
    let entropy_slope = match &config.entropy {
        Some((eps, ns, budget)) => {
            Some(entropy_estimate(&sys, eps, ns, SepMethod::Greedy, *budget)?.estimate)
        }
        None => None,
    };
    let app_trace = match (&config.app, characterization) {
        (Some((delta2, eps, ns)), true) => {
            let p = Point::Interval(fixed[genuine[0]].location);
            let targets = sys.landmarks();
            Some(trace_by_fixed_point(&sys, &p, &targets, ns, *eps, *delta2)?)
        }
        _ => None,
    };
    let displacement = if characterization {
        let p = fixed[genuine[0]].location;
        let m = 128usize;
        let starts: Vec<f64> = (0..m)
            .map(|i| map.lo + (i as f64 + 0.5) * (map.hi - map.lo) / m as f64)
            .collect();
        Some(check_fnxgex(map, p, &starts, 64, true)?)
    } else {
        None
    };
    Ok(ClassificationRecord {
        fixed_points: fixed,
        extra_periodic: extra,
        characterization,
        entropy_slope,
        app_trace,
        displacement,
        notes: format!(
            "periodic points excluded up to period {} at resolution {}",
            config.period_bound, config.resolution
        ),
    })
}
