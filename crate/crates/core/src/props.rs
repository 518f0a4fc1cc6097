//! Finite-scale testers for specification-like tracing properties and the
//! diagnostic quantities showing why strict tracing fails on non-minimal
//! systems.
//!
//! Each tester quantifies over a finite grid of tolerances and block
//! lengths; "no witness at budget" is a recorded outcome, never a
//! disproof — except where the search is exhaustive at its horizon.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::systems::{Point, SystemSpec};
use crate::tracing::{
    is_traced, search_tracing_point, GapSchedule, SearchRoute, TracingCertificate,
    TracingInstance,
};

/// The quantifier grid of a property test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyGrid {
    pub delta1: Vec<f64>,
    pub delta2: Vec<f64>,
    pub eps: Vec<f64>,
    pub ns: Vec<usize>,
    /// Blocks per trial (the finite stand-in for infinite target lists).
    #[serde(default = "default_blocks")]
    pub blocks: usize,
    /// Target lists sampled per cell: one adversarial plus `trials - 1`
    /// random ones.
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_blocks() -> usize {
    32
}

fn default_trials() -> usize {
    1
}

impl PropertyGrid {
    fn validate(&self) -> Result<()> {
        if self.delta1.is_empty() || self.delta2.is_empty() || self.eps.is_empty() || self.ns.is_empty()
        {
            return Err(CoreError::InvalidParams("empty grid axis".into()));
        }
        if self.blocks < 1 || self.trials < 1 {
            return Err(CoreError::InvalidParams("blocks and trials must be >= 1".into()));
        }
        if self.delta1.iter().any(|&d| d < 0.0)
            || self.delta2.iter().any(|&d| d < 0.0)
            || self.eps.iter().any(|&e| e <= 0.0)
            || self.ns.iter().any(|&n| n < 1)
        {
            return Err(CoreError::InvalidParams("grid values out of range".into()));
        }
        Ok(())
    }
}

/// Verdict of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellOutcome {
    /// Constructive route: the certificate was built, not searched for.
    Certified,
    /// A tracer was found by search and re-verified.
    WitnessFound,
    /// No tracer within the budget (three-valued: not a disproof, except
    /// for exhaustive cylinder searches at their stated horizon).
    NoWitnessAtBudget,
}

/// Result of one cell, with certificates for every passing trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellResult {
    pub delta1: f64,
    pub delta2: f64,
    pub eps: f64,
    pub n: usize,
    pub outcome: CellOutcome,
    pub certs: Vec<TracingCertificate>,
}

/// Empirical threshold of one `(delta1, delta2, eps)` column: the smallest
/// grid `n` such that it and every larger grid `n` pass; `None` when the
/// largest grid `n` fails.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmpiricalM {
    pub delta1: f64,
    pub delta2: f64,
    pub eps: f64,
    pub m: Option<usize>,
}

/// Full output of a property tester.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    pub grid: PropertyGrid,
    pub seed: u64,
    pub cells: Vec<CellResult>,
    pub empirical_m: Vec<EmpiricalM>,
    pub trend: String,
}

impl PropertyReport {
    /// All cells pass.
    pub fn all_pass(&self) -> bool {
        self.cells
            .iter()
            .all(|c| c.outcome != CellOutcome::NoWitnessAtBudget)
    }

    pub fn cell(&self, delta1: f64, delta2: f64, eps: f64, n: usize) -> Option<&CellResult> {
        self.cells.iter().find(|c| {
            c.delta1 == delta1 && c.delta2 == delta2 && c.eps == eps && c.n == n
        })
    }
}

/// Target lists for one cell: the adversarial list alternates the two
/// lead landmarks (e.g. generator versus the zero point on the
/// orbit-closure shift); the remaining lists are random points.
fn target_lists(
    sys: &SystemSpec,
    blocks: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<Vec<Point>>> {
    let landmarks = sys.landmarks();
    let mut lists = Vec::with_capacity(trials);
    let (a, b) = (landmarks[1].clone(), landmarks[0].clone());
    lists.push(
        (0..blocks)
            .map(|i| if i % 2 == 0 { a.clone() } else { b.clone() })
            .collect(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 1..trials {
        let mut list = Vec::with_capacity(blocks);
        for _ in 0..blocks {
            list.push(sys.sample_point(&mut rng)?);
        }
        lists.push(list);
    }
    Ok(lists)
}

fn run_grid(
    sys: &SystemSpec,
    grid: &PropertyGrid,
    budget: usize,
    seed: u64,
    property: &str,
    delta2_override: Option<f64>,
) -> Result<PropertyReport> {
    grid.validate()?;
    let delta2s: Vec<f64> = match delta2_override {
        Some(d) => vec![d],
        None => grid.delta2.clone(),
    };
    let mut coords = Vec::new();
    for &d1 in &grid.delta1 {
        for &d2 in &delta2s {
            for &e in &grid.eps {
                for &n in &grid.ns {
                    coords.push((d1, d2, e, n));
                }
            }
        }
    }
    let cells: Vec<CellResult> = coords
        .par_iter()
        .map(|&(d1, d2, e, n)| -> Result<CellResult> {
            let lists = target_lists(sys, grid.blocks, grid.trials, seed)?;
            let mut certs = Vec::new();
            let mut all_found = true;
            let mut all_exact = true;
            for targets in &lists {
                match search_tracing_point(sys, targets, n, d1, d2, e, grid.blocks, budget)? {
                    Some(cert) => {
                        debug_assert!(cert.verify(sys)?);
                        if cert.route != SearchRoute::ExactConstruction {
                            all_exact = false;
                        }
                        certs.push(cert);
                    }
                    None => {
                        all_found = false;
                        break;
                    }
                }
            }
            let outcome = if !all_found {
                CellOutcome::NoWitnessAtBudget
            } else if all_exact {
                CellOutcome::Certified
            } else {
                CellOutcome::WitnessFound
            };
            Ok(CellResult {
                delta1: d1,
                delta2: d2,
                eps: e,
                n,
                outcome,
                certs,
            })
        })
        .collect::<Result<_>>()?;

    let mut empirical_m = Vec::new();
    for &d1 in &grid.delta1 {
        for &d2 in &delta2s {
            for &e in &grid.eps {
                let col: Vec<&CellResult> = cells
                    .iter()
                    .filter(|c| c.delta1 == d1 && c.delta2 == d2 && c.eps == e)
                    .collect();
                // Smallest n whose suffix (itself and all larger) passes.
                let mut m = None;
                for c in col.iter().rev() {
                    if c.outcome == CellOutcome::NoWitnessAtBudget {
                        break;
                    }
                    m = Some(c.n);
                }
                empirical_m.push(EmpiricalM {
                    delta1: d1,
                    delta2: d2,
                    eps: e,
                    m,
                });
            }
        }
    }
    let passing = cells
        .iter()
        .filter(|c| c.outcome != CellOutcome::NoWitnessAtBudget)
        .count();
    let trend = format!("{passing}/{} cells pass at K={}", cells.len(), grid.blocks);
    Ok(PropertyReport {
        property: property.to_string(),
        grid: grid.clone(),
        seed,
        cells,
        empirical_m,
        trend,
    })
}

/// Test the approximate-product behavior over the grid: for each cell,
/// every sampled target list must admit a tracer with gaps at most
/// `1 + delta1 * n` and mistake fraction at most `delta2` at scale `eps`.
pub fn test_app(
    sys: &SystemSpec,
    grid: &PropertyGrid,
    budget: usize,
    seed: u64,
) -> Result<PropertyReport> {
    run_grid(sys, grid, budget, seed, "app", None)
}

/// The strict variant: the mistake fraction is forced to zero.
pub fn test_strict_app(
    sys: &SystemSpec,
    grid: &PropertyGrid,
    budget: usize,
    seed: u64,
) -> Result<PropertyReport> {
    run_grid(sys, grid, budget, seed, "strict_app", Some(0.0))
}

/// One cell of a periodic exact-specification test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodicSpecCell {
    pub profile: Vec<usize>,
    pub eps: f64,
    /// The smallest uniform gap parameter `M` (gap `M + 1`) admitting a
    /// zero-mistake periodic tracer, or `None` at the budget.
    pub m: Option<usize>,
    pub cert: Option<TracingCertificate>,
}

/// Output of [`test_periodic_exact_spec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodicSpecReport {
    pub cells: Vec<PeriodicSpecCell>,
}

/// Path of exactly `len` intermediate symbols from `a` to `b` in the
/// transition graph (full shift: any symbols work).
fn connect_exact(sys: &SystemSpec, a: u8, b: u8, len: usize) -> Option<Vec<u8>> {
    match sys {
        SystemSpec::FullShift { .. } => Some(vec![0u8; len]),
        SystemSpec::SftShift {
            alphabet,
            transition,
            ..
        } => {
            // DP over (steps, symbol): reachable sets with predecessors.
            let k = *alphabet;
            let mut reach = vec![vec![usize::MAX; k]; len + 1];
            reach[0][a as usize] = a as usize;
            for step in 0..len {
                for c in 0..k {
                    if reach[step][c] == usize::MAX {
                        continue;
                    }
                    for d in 0..k {
                        if transition[c][d] == 1 && reach[step + 1][d] == usize::MAX {
                            reach[step + 1][d] = c;
                        }
                    }
                }
            }
            // The final hop to `b` must also be legal.
            let last = (0..k).find(|&c| {
                reach[len][c] != usize::MAX && transition[c][b as usize] == 1
            })?;
            let mut path = Vec::with_capacity(len);
            let mut cur = last;
            for step in (1..=len).rev() {
                path.push(cur as u8);
                cur = reach[step][cur];
            }
            path.reverse();
            Some(path)
        }
        _ => None,
    }
}

/// Search the uniform gap `M` of a periodic exact specification: variable
/// block lengths, gaps all `M + 1`, zero mistakes, tracer periodic with
/// period `sum(m_k + M)`. Exact construction on shift spaces; interval
/// maps are probed with low-period points; other systems are unsupported.
pub fn test_periodic_exact_spec(
    sys: &SystemSpec,
    profiles: &[Vec<usize>],
    eps_values: &[f64],
    budget: usize,
) -> Result<PeriodicSpecReport> {
    if profiles.is_empty() || eps_values.is_empty() {
        return Err(CoreError::InvalidParams("empty profiles or eps list".into()));
    }
    let mut cells = Vec::new();
    for profile in profiles {
        if profile.is_empty() || profile.iter().any(|&m| m < 1) {
            return Err(CoreError::InvalidParams("bad length profile".into()));
        }
        for &eps in eps_values {
            let cell = periodic_spec_cell(sys, profile, eps, budget)?;
            cells.push(cell);
        }
    }
    Ok(PeriodicSpecReport { cells })
}

fn periodic_spec_cell(
    sys: &SystemSpec,
    profile: &[usize],
    eps: f64,
    budget: usize,
) -> Result<PeriodicSpecCell> {
    match sys {
        SystemSpec::FullShift { .. } | SystemSpec::SftShift { .. } => {
            let metric = sys.symbolic_metric().expect("symbolic");
            let l = metric.agreement_len(eps)?;
            // Targets: distinct periodic words of the profile lengths so the
            // test is not vacuous; built from the legal word enumeration.
            let targets = spec_targets(sys, profile)?;
            let alphabet = sys.alphabet().expect("shift space");
            'm_search: for m in l.saturating_sub(1)..l + 8 {
                // Each block copies m_k + L - 1 symbols; spacing m_k + M
                // leaves exactly M + 1 - L free slots per junction.
                let Some(free) = (m + 1).checked_sub(l) else {
                    continue;
                };
                // A uniform gap must serve every target list, so every
                // symbol pair needs a bridge of exactly `free` symbols.
                for a in 0..alphabet as u8 {
                    for b in 0..alphabet as u8 {
                        if connect_exact(sys, a, b, free).is_none() {
                            continue 'm_search;
                        }
                    }
                }
                let k = profile.len();
                let mut word = Vec::new();
                let mut segments: Vec<Vec<u8>> = Vec::with_capacity(k);
                for (i, t) in targets.iter().enumerate() {
                    let copy = t
                        .as_symbolic()
                        .expect("symbolic target")
                        .window(profile[i] + l - 1);
                    segments.push(copy);
                }
                for i in 0..k {
                    word.extend_from_slice(&segments[i]);
                    let next_first = segments[(i + 1) % k][0];
                    let last = *word.last().unwrap();
                    match connect_exact(sys, last, next_first, free) {
                        Some(bridge) => word.extend_from_slice(&bridge),
                        None => continue 'm_search,
                    }
                }
                // Trim: each segment contributed m_k + l - 1 + free
                // = m_k + m slots, so the word length is the period.
                let period: usize = profile.iter().map(|&mk| mk + m).sum();
                debug_assert_eq!(word.len(), period);
                let tracer = Point::Symbolic(crate::systems::SymbolicPoint::periodic(word));
                sys.validate(&tracer)?;
                let schedule = GapSchedule::new(profile.to_vec(), vec![m + 1; k - 1])?;
                let inst = TracingInstance::new(targets.clone(), schedule, 0.0, eps)?;
                let (ok, counts) = is_traced(sys, &tracer, &inst)?;
                if !ok {
                    continue;
                }
                // Periodicity of the tracer with the full period is by
                // construction; assert it through the dynamics.
                let back = sys.step_by(&tracer, period as u64)?;
                debug_assert_eq!(sys.dist(&back, &tracer)?, 0.0);
                let horizon = inst.schedule.span() + l as u64;
                return Ok(PeriodicSpecCell {
                    profile: profile.to_vec(),
                    eps,
                    m: Some(m),
                    cert: Some(TracingCertificate {
                        tracer,
                        instance: inst,
                        counts,
                        horizon,
                        route: SearchRoute::ExactConstruction,
                    }),
                });
            }
            Ok(PeriodicSpecCell {
                profile: profile.to_vec(),
                eps,
                m: None,
                cert: None,
            })
        }
        SystemSpec::IntervalMap { map } => {
            // Probe low-period points as candidate tracers.
            let mut candidates: Vec<Point> = Vec::new();
            for q in 1..=4usize {
                for r in crate::interval::find_periodic_points(map, q, 2048, 1e-9)? {
                    candidates.push(Point::Interval(r.location));
                }
            }
            let targets = spec_targets(sys, profile)?;
            let k = profile.len();
            for m in 0..8usize {
                let schedule = GapSchedule::new(profile.to_vec(), vec![m + 1; k - 1])?;
                let inst = TracingInstance::new(targets.clone(), schedule, 0.0, eps)?;
                for z in candidates.iter().take(budget) {
                    let (ok, counts) = is_traced(sys, z, &inst)?;
                    if ok {
                        let horizon = inst.schedule.span();
                        return Ok(PeriodicSpecCell {
                            profile: profile.to_vec(),
                            eps,
                            m: Some(m),
                            cert: Some(TracingCertificate {
                                tracer: z.clone(),
                                instance: inst,
                                counts,
                                horizon,
                                route: SearchRoute::GridSearch,
                            }),
                        });
                    }
                }
            }
            Ok(PeriodicSpecCell {
                profile: profile.to_vec(),
                eps,
                m: None,
                cert: None,
            })
        }
        SystemSpec::Rotation { .. } => Err(CoreError::UnsupportedSystem(
            "rotations have no periodic orbits to trace with".to_string(),
        )),
        SystemSpec::OrbitClosureShift { .. } => Err(CoreError::UnsupportedSystem(
            "orbit-closure shift has no periodic points besides the fixed point".to_string(),
        )),
        SystemSpec::Product { .. } => Err(CoreError::UnsupportedSystem(
            "periodic exact specification on products".to_string(),
        )),
    }
}

/// Distinct target points for a periodic-specification profile.
fn spec_targets(sys: &SystemSpec, profile: &[usize]) -> Result<Vec<Point>> {
    let landmarks = sys.landmarks();
    Ok((0..profile.len())
        .map(|i| landmarks[i % landmarks.len()].clone())
        .collect())
}

/// Search sampled pairs for a witness of non-minimality: a point `x` whose
/// orbit stays at distance at least `gamma` from `x2` over the horizon.
/// Gammas are tried largest first; the first witness wins.
pub fn minimality_obstruction(
    sys: &SystemSpec,
    samples: &[Point],
    horizon: usize,
    gamma_grid: &[f64],
) -> Result<Option<(Point, Point, f64)>> {
    if horizon < 1 {
        return Err(CoreError::InvalidParams("horizon must be >= 1".into()));
    }
    let mut gammas: Vec<f64> = gamma_grid.to_vec();
    gammas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    for &gamma in &gammas {
        for x in samples {
            'x2: for x2 in samples {
                if x == x2 {
                    continue;
                }
                let mut cur = x.clone();
                for j in 0..=horizon {
                    if j > 0 {
                        cur = sys.step(&cur)?;
                    }
                    if sys.dist(&cur, x2)? < gamma {
                        continue 'x2;
                    }
                }
                return Ok(Some((x.clone(), x2.clone(), gamma)));
            }
        }
    }
    Ok(None)
}

/// The two sides of the strict-tracing contradiction on a non-minimal
/// system, evaluated numerically.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContradictionQuantities {
    /// Birkhoff average of the bump at `x2` along the orbit of `x`
    /// (near zero when the orbit avoids `x2`).
    pub orbit_average: f64,
    /// The schedule lower bound `1 / (2 m)` that any zero-mistake tracer's
    /// average must exceed in the limit.
    pub schedule_lower_bound: f64,
    /// Average of the bump along an actual zero-mistake tracer for targets
    /// identically `x2` (when one was found): at least `(K - 1) / s_K`.
    pub tracer_average: Option<f64>,
}

/// Evaluate both sides of the contradiction: the orbit of `x` gives the
/// bump at `x2` average near zero, while any zero-mistake tracer of
/// constant targets `x2` with gaps at most `1 + m` has average at least
/// `1 / (2 m)` in the limit. Requires `eps` in `(0, gamma / 3)`.
pub fn strict_app_contradiction_quantities(
    sys: &SystemSpec,
    x: &Point,
    x2: &Point,
    gamma: f64,
    eps: f64,
    m: usize,
    horizon: usize,
) -> Result<ContradictionQuantities> {
    if !(eps > 0.0 && eps < gamma / 3.0) {
        return Err(CoreError::InvalidEpsilon {
            eps,
            lo: 0.0,
            hi: gamma / 3.0,
        });
    }
    if m < 1 || horizon < 1 {
        return Err(CoreError::InvalidParams("need m >= 1 and horizon >= 1".into()));
    }
    let phi = sys.bump(x2, eps)?;
    let mut cur = x.clone();
    let mut sum = 0.0;
    for j in 0..horizon {
        if j > 0 {
            cur = sys.step(&cur)?;
        }
        sum += phi(&cur);
    }
    let orbit_average = sum / horizon as f64;

    // Zero-mistake tracer for constant targets x2, gaps <= 1 + m
    // (delta1 = 1), over as many blocks as the horizon affords.
    let k = (horizon / (2 * m)).max(2);
    let tracer_average = match search_tracing_point(sys, std::slice::from_ref(x2), m, 1.0, 0.0, eps, k, 4096)?
    {
        Some(cert) => {
            let starts = cert.instance.schedule.start_times();
            let s_k = *starts.last().unwrap() + m as u64;
            let mut cur = cert.tracer.clone();
            let mut sum = 0.0;
            for j in 0..s_k {
                if j > 0 {
                    cur = sys.step(&cur)?;
                }
                sum += phi(&cur);
            }
            Some(sum / s_k as f64)
        }
        None => None,
    };
    Ok(ContradictionQuantities {
        orbit_average,
        schedule_lower_bound: 1.0 / (2.0 * m as f64),
        tracer_average,
    })
}
