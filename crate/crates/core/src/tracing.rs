//! Orbit tracing with mistake budgets.
//!
//! A gap schedule prescribes block lengths `m_k` and gaps `t_k`; the block
//! start times are `s_1 = 0`, `s_{k+1} = s_k + m_k + t_k - 1`. A point `z`
//! `(delta, eps)`-traces a list of targets when, for every block `k`, the
//! number of offsets `j < m_k` with `d(f^{s_k+j}(z), f^j(x_k)) > eps` is at
//! most `delta * m_k` (real comparison, no rounding).
//!
//! The module provides the predicate, searches that produce re-verifiable
//! certificates, a fixed-point tracer, and the power-system lift.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::systems::{Point, SymbolicPoint, SystemSpec, Tail};

/// Start times `s_1 = 0`, `s_k = sum_{i<k} (m_i + t_i - 1)`.
pub fn start_times(lengths: &[usize], gaps: &[usize]) -> Result<Vec<u64>> {
    if lengths.is_empty() {
        return Err(CoreError::EmptySchedule);
    }
    if gaps.len() + 1 < lengths.len() {
        return Err(CoreError::InvalidParams(format!(
            "need at least {} gaps for {} blocks, got {}",
            lengths.len() - 1,
            lengths.len(),
            gaps.len()
        )));
    }
    for &m in lengths {
        if m < 1 {
            return Err(CoreError::NonPositiveEntry {
                what: "length",
                value: m as i64,
            });
        }
    }
    for &t in gaps {
        if t < 1 {
            return Err(CoreError::NonPositiveEntry {
                what: "gap",
                value: t as i64,
            });
        }
    }
    let mut out = Vec::with_capacity(lengths.len());
    let mut s = 0u64;
    for k in 0..lengths.len() {
        out.push(s);
        if k + 1 < lengths.len() {
            s += (lengths[k] + gaps[k] - 1) as u64;
        }
    }
    Ok(out)
}

/// Block lengths and gaps; start times are always recomputed, never stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapSchedule {
    pub lengths: Vec<usize>,
    pub gaps: Vec<usize>,
}

impl GapSchedule {
    pub fn new(lengths: Vec<usize>, gaps: Vec<usize>) -> Result<GapSchedule> {
        start_times(&lengths, &gaps)?;
        Ok(GapSchedule { lengths, gaps })
    }

    /// Uniform schedule: `k` blocks of length `n`, all gaps equal.
    pub fn uniform(n: usize, gap: usize, k: usize) -> Result<GapSchedule> {
        GapSchedule::new(vec![n; k], vec![gap; k.saturating_sub(1)])
    }

    pub fn start_times(&self) -> Vec<u64> {
        start_times(&self.lengths, &self.gaps).expect("validated on construction")
    }

    /// Last traced time index plus one: `s_K + m_K`.
    pub fn span(&self) -> u64 {
        let starts = self.start_times();
        starts[starts.len() - 1] + self.lengths[self.lengths.len() - 1] as u64
    }

    pub fn max_gap(&self) -> usize {
        self.gaps[..self.lengths.len().saturating_sub(1)]
            .iter()
            .copied()
            .max()
            .unwrap_or(1)
    }
}

/// The data of one tracing problem: targets, schedule, and tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracingInstance {
    pub targets: Vec<Point>,
    pub schedule: GapSchedule,
    pub delta: f64,
    pub eps: f64,
}

impl TracingInstance {
    pub fn new(targets: Vec<Point>, schedule: GapSchedule, delta: f64, eps: f64) -> Result<Self> {
        if targets.len() != schedule.lengths.len() {
            return Err(CoreError::InvalidParams(format!(
                "{} targets for {} blocks",
                targets.len(),
                schedule.lengths.len()
            )));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(CoreError::InvalidParams(format!("delta {delta} not in [0,1]")));
        }
        if !(eps > 0.0) {
            return Err(CoreError::NonPositiveRadius(eps));
        }
        Ok(TracingInstance {
            targets,
            schedule,
            delta,
            eps,
        })
    }
}

/// How a certificate's tracer was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchRoute {
    /// Built symbol-by-symbol from the targets (shift spaces).
    ExactConstruction,
    /// The orbit of a fixed point.
    FixedPointOrbit,
    /// Exhaustive search over all legal cylinders at the horizon.
    ExhaustiveCylinder,
    /// Multi-start grid search over initial points.
    GridSearch,
    /// Produced by lifting a certificate of the power system.
    PowerLift,
}

/// A tracer together with the instance it solves and its verified counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracingCertificate {
    pub tracer: Point,
    pub instance: TracingInstance,
    pub counts: Vec<usize>,
    pub horizon: u64,
    pub route: SearchRoute,
}

impl TracingCertificate {
    /// Re-run the independent checker; a valid certificate's stored counts
    /// match and every count is within the mistake budget.
    pub fn verify(&self, sys: &SystemSpec) -> Result<bool> {
        let (ok, counts) = is_traced(sys, &self.tracer, &self.instance)?;
        Ok(ok && counts == self.counts)
    }
}

/// Exact mistake counts of every block (`power = 1` for the map itself,
/// `power = N` for tracing under `f^N`).
fn all_counts_power(
    sys: &SystemSpec,
    z: &Point,
    inst: &TracingInstance,
    power: u64,
) -> Result<Vec<usize>> {
    let starts = inst.schedule.start_times();
    // Fast path: shift spaces compare symbols directly, without cloning
    // shifted points.
    if let (Some(metric), Point::Symbolic(zs)) = (sys.symbolic_metric(), z) {
        let l = metric.agreement_len(inst.eps)? as u64;
        let mut counts = Vec::with_capacity(inst.targets.len());
        for (k, target) in inst.targets.iter().enumerate() {
            let xs = target.as_symbolic().ok_or_else(|| {
                CoreError::IllegalPoint("symbolic system with non-symbolic target".to_string())
            })?;
            let m = inst.schedule.lengths[k] as u64;
            let s = starts[k];
            let mut cnt = 0usize;
            for j in 0..m {
                let mistake = (0..l)
                    .any(|i| zs.symbol(power * (s + j) + i) != xs.symbol(power * j + i));
                if mistake {
                    cnt += 1;
                }
            }
            counts.push(cnt);
        }
        return Ok(counts);
    }
    // General path: iterate orbits.
    let mut counts = Vec::with_capacity(inst.targets.len());
    let span = inst.schedule.span();
    let mut z_orbit = Vec::with_capacity(span as usize);
    let mut cur = z.clone();
    for i in 0..span {
        if i > 0 {
            cur = sys.step_by(&cur, power)?;
        }
        z_orbit.push(cur.clone());
    }
    for (k, target) in inst.targets.iter().enumerate() {
        let m = inst.schedule.lengths[k];
        let s = starts[k] as usize;
        let mut cnt = 0usize;
        let mut x = target.clone();
        for j in 0..m {
            if j > 0 {
                x = sys.step_by(&x, power)?;
            }
            if sys.dist(&z_orbit[s + j], &x)? > inst.eps {
                cnt += 1;
            }
        }
        counts.push(cnt);
    }
    Ok(counts)
}

/// Mistake count of block `k` (1-based, per the schedule order).
pub fn mistake_count(sys: &SystemSpec, z: &Point, inst: &TracingInstance, k: usize) -> Result<usize> {
    if k < 1 || k > inst.targets.len() {
        return Err(CoreError::IndexOutOfRange {
            index: k,
            len: inst.targets.len(),
        });
    }
    Ok(all_counts_power(sys, z, inst, 1)?[k - 1])
}

/// The tracing predicate: true iff every block's mistake count is within
/// `delta * m_k`; the exact counts are returned regardless.
pub fn is_traced(sys: &SystemSpec, z: &Point, inst: &TracingInstance) -> Result<(bool, Vec<usize>)> {
    is_traced_power(sys, 1, z, inst)
}

/// The tracing predicate under the power system `f^power`.
pub fn is_traced_power(
    sys: &SystemSpec,
    power: u64,
    z: &Point,
    inst: &TracingInstance,
) -> Result<(bool, Vec<usize>)> {
    let counts = all_counts_power(sys, z, inst, power)?;
    let ok = counts
        .iter()
        .zip(&inst.schedule.lengths)
        .all(|(&c, &m)| c as f64 <= inst.delta * m as f64);
    Ok((ok, counts))
}

/// Cycle `targets` out to exactly `k` entries.
fn cycle_targets(targets: &[Point], k: usize) -> Result<Vec<Point>> {
    if targets.is_empty() {
        return Err(CoreError::InvalidParams("no targets supplied".into()));
    }
    Ok((0..k).map(|i| targets[i % targets.len()].clone()).collect())
}

/// Search for a tracer of `k_blocks` blocks of length `n` with gaps at most
/// `1 + delta1 * n` and per-block mistake fraction at most `delta2` at
/// scale `eps`. Targets are cycled to the block count. `None` means no
/// witness was found within the budget — evidence, not disproof — except
/// for orbit-closure shifts, where the cylinder search is exhaustive at
/// the horizon.
pub fn search_tracing_point(
    sys: &SystemSpec,
    targets: &[Point],
    n: usize,
    delta1: f64,
    delta2: f64,
    eps: f64,
    k_blocks: usize,
    budget: usize,
) -> Result<Option<TracingCertificate>> {
    if n < 1 || k_blocks < 1 {
        return Err(CoreError::InvalidParams("need n >= 1 and K >= 1".into()));
    }
    if delta1 < 0.0 || delta2 < 0.0 {
        return Err(CoreError::InvalidParams(
            "gap and mistake fractions must be nonnegative".into(),
        ));
    }
    if !(eps > 0.0) {
        return Err(CoreError::NonPositiveRadius(eps));
    }
    let targets = cycle_targets(targets, k_blocks)?;
    for t in &targets {
        sys.validate(t)?;
    }
    match sys {
        SystemSpec::FullShift { .. } | SystemSpec::SftShift { .. } => {
            exact_symbolic_search(sys, &targets, n, delta1, delta2, eps)
        }
        SystemSpec::OrbitClosureShift { .. } => {
            closure_search(sys, &targets, n, delta1, delta2, eps, budget)
        }
        SystemSpec::Rotation { .. } => rotation_search(sys, &targets, n, delta1, delta2, eps),
        SystemSpec::IntervalMap { .. } => grid_search(sys, &targets, n, delta2, eps, budget),
        SystemSpec::Product { .. } => Err(CoreError::UnsupportedSystem(
            "tracing search on product systems".to_string(),
        )),
    }
}

/// Maximum allowed gap, `t <= 1 + delta1 * n` with real arithmetic.
fn max_gap(delta1: f64, n: usize) -> usize {
    (1.0 + delta1 * n as f64).floor() as usize
}

/// A legal symbol with a self-loop (used to close tracer tails).
fn loop_symbol(sys: &SystemSpec) -> Result<u8> {
    match sys {
        SystemSpec::FullShift { .. } => Ok(0),
        SystemSpec::SftShift {
            alphabet,
            transition,
            ..
        } => (0..*alphabet)
            .find(|&c| transition[c][c] == 1)
            .map(|c| c as u8)
            .ok_or_else(|| {
                CoreError::UnsupportedSystem("transition graph has no self-loop".to_string())
            }),
        _ => Err(CoreError::UnsupportedSystem("loop symbol".to_string())),
    }
}

/// Constructive search on full shifts and SFTs: copy each target's first
/// `n + L - 1 - trunc` symbols (L the agreement length of `eps`), bridge
/// blocks with shortest connecting paths, and close with a looping tail.
/// Truncating `trunc` trailing symbols concedes at most `trunc` mistakes
/// per block in exchange for shorter gaps.
fn exact_symbolic_search(
    sys: &SystemSpec,
    targets: &[Point],
    n: usize,
    delta1: f64,
    delta2: f64,
    eps: f64,
) -> Result<Option<TracingCertificate>> {
    let metric = sys.symbolic_metric().expect("symbolic system");
    let l = metric.agreement_len(eps)?;
    let tmax = max_gap(delta1, n);
    let k = targets.len();
    let tail_sym = loop_symbol(sys)?;

    if l == 0 {
        // eps at least the diameter: everything traces everything.
        let tracer = Point::Symbolic(SymbolicPoint::constant(tail_sym));
        let schedule = GapSchedule::uniform(n, 1, k)?;
        let inst = TracingInstance::new(targets.to_vec(), schedule, delta2, eps)?;
        let (ok, counts) = is_traced(sys, &tracer, &inst)?;
        debug_assert!(ok);
        let horizon = inst.schedule.span();
        return Ok(Some(TracingCertificate {
            tracer,
            instance: inst,
            counts,
            horizon,
            route: SearchRoute::ExactConstruction,
        }));
    }

    // Worst-case bridge length over all symbol pairs.
    let alphabet = sys.alphabet().expect("symbolic system");
    let mut lworst = 0usize;
    for a in 0..alphabet {
        for b in 0..alphabet {
            lworst = lworst.max(sys.connect(a as u8, b as u8)?.len());
        }
    }
    let trunc = (l + lworst).saturating_sub(tmax);
    if trunc > l - 1 {
        return Ok(None); // gaps cannot fit even with maximal truncation
    }
    if trunc as f64 > delta2 * n as f64 {
        return Ok(None); // truncation would exceed the mistake budget
    }
    let copy_len = n + l - 1 - trunc;

    let mut prefix: Vec<u8> = Vec::new();
    let mut gaps: Vec<usize> = Vec::new();
    for (i, t) in targets.iter().enumerate() {
        let w = t
            .as_symbolic()
            .ok_or_else(|| CoreError::IllegalPoint("non-symbolic target".to_string()))?
            .window(copy_len);
        if i > 0 {
            let bridge = sys.connect(*prefix.last().unwrap(), w[0])?;
            gaps.push(l - trunc + bridge.len());
            prefix.extend_from_slice(&bridge);
        }
        prefix.extend_from_slice(&w);
    }
    let closing = sys.connect(*prefix.last().unwrap(), tail_sym)?;
    prefix.extend_from_slice(&closing);
    let tracer = Point::Symbolic(SymbolicPoint {
        prefix,
        tail: crate::systems::Tail::Periodic(vec![tail_sym]),
    });

    let schedule = GapSchedule::new(vec![n; k], gaps)?;
    if k > 1 && schedule.max_gap() > tmax {
        return Ok(None);
    }
    let inst = TracingInstance::new(targets.to_vec(), schedule, delta2, eps)?;
    let (ok, counts) = is_traced(sys, &tracer, &inst)?;
    if !ok {
        return Ok(None);
    }
    let horizon = inst.schedule.span() + l as u64;
    Ok(Some(TracingCertificate {
        tracer,
        instance: inst,
        counts,
        horizon,
        route: SearchRoute::ExactConstruction,
    }))
}

/// Reconstruct an actual point of the orbit closure realizing a legal
/// window: two or more ones pin a generator shift, at most one produces a
/// sparse limit point.
fn realize_closure_point(w: &[u8]) -> SymbolicPoint {
    let ones: Vec<usize> = (0..w.len()).filter(|&i| w[i] == 1).collect();
    if ones.len() >= 2 {
        let g = SymbolicPoint::power_generator();
        for a in 0..63u32 {
            let p = 1u64 << a;
            if p < ones[0] as u64 {
                continue;
            }
            let start = p - ones[0] as u64;
            let shifted = g.shift_by(start);
            if (0..w.len() as u64).all(|i| shifted.symbol(i) == w[i as usize]) {
                return shifted;
            }
        }
        unreachable!("window was checked legal");
    }
    SymbolicPoint::word_then_constant(w.to_vec(), 0)
}

/// Exhaustive search on the orbit-closure shift: first the cheap
/// fixed-point tracer, then every legal cylinder at the full schedule
/// horizon with dynamic programming over gap placements. A `None` from
/// this route means no point of the closure traces with any admissible
/// schedule at these parameters.
fn closure_search(
    sys: &SystemSpec,
    targets: &[Point],
    n: usize,
    delta1: f64,
    delta2: f64,
    eps: f64,
    budget: usize,
) -> Result<Option<TracingCertificate>> {
    let metric = sys.symbolic_metric().expect("symbolic system");
    let l = metric.agreement_len(eps)?;
    let k = targets.len();
    let tmax = max_gap(delta1, n);

    // Cheap route: the fixed point 0^infinity with gaps all 1.
    {
        let tracer = Point::Symbolic(SymbolicPoint::constant(0));
        let schedule = GapSchedule::uniform(n, 1, k)?;
        let inst = TracingInstance::new(targets.to_vec(), schedule, delta2, eps)?;
        let (ok, counts) = is_traced(sys, &tracer, &inst)?;
        if ok {
            let horizon = inst.schedule.span() + l as u64;
            return Ok(Some(TracingCertificate {
                tracer,
                instance: inst,
                counts,
                horizon,
                route: SearchRoute::FixedPointOrbit,
            }));
        }
    }

    // Exhaustive route over legal windows. Everything a tracer does within
    // the schedule is determined by its first `w_len` symbols, and every
    // point of the closure has a legal window, so scanning all legal
    // windows is complete at this horizon.
    let s_max = (k - 1) * (n + tmax - 1);
    let w_len = s_max + n + l;
    if w_len > budget {
        return Ok(None);
    }
    let windows = sys.words(w_len)?;
    let target_syms: Vec<&SymbolicPoint> = targets
        .iter()
        .map(|t| t.as_symbolic().expect("validated symbolic"))
        .collect();

    // Per window: DP over block start positions, on a precomputed
    // feasibility table (block k within budget when started at s).
    let found = windows.par_iter().find_map_first(|w| {
        let budget_per_block = delta2 * n as f64;
        let allowed = budget_per_block.floor() as usize;
        let feasible_at = |k_i: usize, s: usize| -> bool {
            let x = target_syms[k_i];
            let mut cnt = 0usize;
            for j in 0..n {
                if (0..l).any(|i| w[s + j + i] != x.symbol((j + i) as u64)) {
                    cnt += 1;
                    if cnt > allowed {
                        return false;
                    }
                }
            }
            true
        };
        if !feasible_at(0, 0) {
            return None;
        }
        let feasible: Vec<Vec<bool>> = (0..k)
            .map(|k_i| (0..=s_max).map(|s| feasible_at(k_i, s)).collect())
            .collect();
        // parent[k][s] = predecessor start of block k-1, or usize::MAX.
        let mut reach: Vec<Vec<usize>> = vec![vec![usize::MAX; s_max + 1]; k];
        reach[0][0] = 0;
        for k_i in 1..k {
            let mut any = false;
            for s_prev in 0..=s_max {
                if reach[k_i - 1][s_prev] == usize::MAX {
                    continue;
                }
                for t in 1..=tmax {
                    let s = s_prev + n + t - 1;
                    if s > s_max || reach[k_i][s] != usize::MAX {
                        continue;
                    }
                    if feasible[k_i][s] {
                        reach[k_i][s] = s_prev;
                        any = true;
                    }
                }
            }
            if !any {
                return None;
            }
        }
        // Reconstruct the lexicographically smallest schedule.
        let mut s_end = (0..=s_max).find(|&s| reach[k - 1][s] != usize::MAX)?;
        let mut starts = vec![s_end];
        for k_i in (1..k).rev() {
            s_end = reach[k_i][s_end];
            starts.push(s_end);
        }
        starts.reverse();
        let gaps: Vec<usize> = starts
            .windows(2)
            .map(|p| p[1] - p[0] - n + 1)
            .collect();
        Some((w.clone(), gaps))
    });

    let Some((w, gaps)) = found else {
        return Ok(None);
    };
    let tracer = Point::Symbolic(realize_closure_point(&w));
    let schedule = GapSchedule::new(vec![n; k], gaps)?;
    let inst = TracingInstance::new(targets.to_vec(), schedule, delta2, eps)?;
    let (ok, counts) = is_traced(sys, &tracer, &inst)?;
    if !ok {
        return Ok(None);
    }
    let horizon = inst.schedule.span() + l as u64;
    Ok(Some(TracingCertificate {
        tracer,
        instance: inst,
        counts,
        horizon,
        route: SearchRoute::ExhaustiveCylinder,
    }))
}

/// Fixed-point candidates of the system, used to seed searches.
pub fn fixed_point_candidates(sys: &SystemSpec) -> Result<Vec<Point>> {
    match sys {
        SystemSpec::FullShift { alphabet, .. } => Ok((0..*alphabet)
            .map(|c| Point::Symbolic(SymbolicPoint::constant(c as u8)))
            .collect()),
        SystemSpec::SftShift {
            alphabet,
            transition,
            ..
        } => Ok((0..*alphabet)
            .filter(|&c| transition[c][c] == 1)
            .map(|c| Point::Symbolic(SymbolicPoint::constant(c as u8)))
            .collect()),
        SystemSpec::OrbitClosureShift { .. } => {
            Ok(vec![Point::Symbolic(SymbolicPoint::constant(0))])
        }
        SystemSpec::Rotation { num, den } => {
            if *num == 0 {
                Ok(vec![Point::Circle { num: 0, den: *den }])
            } else {
                Ok(Vec::new())
            }
        }
        SystemSpec::IntervalMap { map } => {
            let records = crate::interval::find_fixed_points(map, 4096, 1e-9)?;
            Ok(records
                .into_iter()
                .filter(|r| r.residual.abs() <= 1e-7)
                .map(|r| Point::Interval(r.location))
                .collect())
        }
        SystemSpec::Product { .. } => Err(CoreError::UnsupportedSystem(
            "fixed-point candidates on products".to_string(),
        )),
    }
}

/// Adaptive-gap search on a rotation. An isometry keeps every block's
/// tracing distance constant in time, so block k is traced exactly when
/// `d(z + s_k alpha, x_k) <= eps`. The tracer starts on the first target
/// and each later gap is the smallest allowed one whose start time lands
/// within `eps` of its target; equidistribution makes hits likelier the
/// wider the gap budget `1 + delta1 * n` is.
fn rotation_search(
    sys: &SystemSpec,
    targets: &[Point],
    n: usize,
    delta1: f64,
    delta2: f64,
    eps: f64,
) -> Result<Option<TracingCertificate>> {
    let z = targets[0].clone();
    let tmax = max_gap(delta1, n);
    let mut gaps = Vec::with_capacity(targets.len().saturating_sub(1));
    let mut s = 0u64;
    for target in targets.iter().skip(1) {
        let mut found = None;
        for t in 1..=tmax {
            let s_next = s + n as u64 + t as u64 - 1;
            let pos = sys.step_by(&z, s_next)?;
            if sys.dist(&pos, target)? <= eps {
                found = Some(t);
                break;
            }
        }
        match found {
            Some(t) => {
                gaps.push(t);
                s += n as u64 + t as u64 - 1;
            }
            None => return Ok(None),
        }
    }
    let schedule = GapSchedule::new(vec![n; targets.len()], gaps)?;
    let instance = TracingInstance::new(targets.to_vec(), schedule, delta2, eps)?;
    let (ok, counts) = is_traced(sys, &z, &instance)?;
    if !ok {
        return Ok(None);
    }
    let horizon = instance.schedule.span();
    Ok(Some(TracingCertificate {
        tracer: z,
        instance,
        counts,
        horizon,
        route: SearchRoute::GridSearch,
    }))
}

/// Multi-start search for rotations and interval maps: fixed points first,
/// then a uniform grid of `budget` initial points, all with gaps fixed at 1.
fn grid_search(
    sys: &SystemSpec,
    targets: &[Point],
    n: usize,
    delta2: f64,
    eps: f64,
    budget: usize,
) -> Result<Option<TracingCertificate>> {
    let k = targets.len();
    let schedule = GapSchedule::uniform(n, 1, k)?;
    let mut candidates: Vec<(SearchRoute, Point)> = fixed_point_candidates(sys)?
        .into_iter()
        .map(|p| (SearchRoute::FixedPointOrbit, p))
        .collect();
    match sys {
        SystemSpec::Rotation { den, .. } => {
            for i in 0..budget as u64 {
                candidates.push((
                    SearchRoute::GridSearch,
                    Point::Circle {
                        num: (i * (den / budget as u64)) % den,
                        den: *den,
                    },
                ));
            }
        }
        SystemSpec::IntervalMap { map } => {
            for i in 0..budget {
                let x = map.lo + (i as f64 + 0.5) * (map.hi - map.lo) / budget as f64;
                candidates.push((SearchRoute::GridSearch, Point::Interval(x)));
            }
        }
        _ => {}
    }
    let inst = TracingInstance::new(targets.to_vec(), schedule, delta2, eps)?;
    let found = candidates
        .par_iter()
        .find_map_first(|(route, z)| match is_traced(sys, z, &inst) {
            Ok((true, counts)) => Some((*route, z.clone(), counts)),
            _ => None,
        });
    Ok(found.map(|(route, tracer, counts)| {
        let horizon = inst.schedule.span();
        TracingCertificate {
            tracer,
            instance: inst.clone(),
            counts,
            horizon,
            route,
        }
    }))
}

/// One row of a fixed-point tracing report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedPointTraceRow {
    pub n: usize,
    /// Mistake fraction of each target's block at this length.
    pub fractions: Vec<f64>,
}

/// Result of tracing by a fixed point's (constant) orbit, gaps all 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedPointTraceReport {
    pub rows: Vec<FixedPointTraceRow>,
    /// Largest tested `n` that fails the `delta2` budget (0 when all pass);
    /// `None` when the largest tested `n` itself fails, so no threshold is
    /// observable within the tested range.
    pub empirical_m: Option<usize>,
}

/// Trace all targets by the constant orbit of a fixed point `p` with gaps
/// all 1, reporting the per-block mistake fractions for each block length
/// in `ns` and the empirical threshold for budget `delta2`.
pub fn trace_by_fixed_point(
    sys: &SystemSpec,
    p: &Point,
    targets: &[Point],
    ns: &[usize],
    eps: f64,
    delta2: f64,
) -> Result<FixedPointTraceReport> {
    let moved = sys.dist(&sys.step(p)?, p)?;
    if moved > 1e-9 {
        return Err(CoreError::NotFixedPoint(moved));
    }
    if targets.is_empty() || ns.is_empty() {
        return Err(CoreError::InvalidParams("need targets and lengths".into()));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let schedule = GapSchedule::uniform(n, 1, targets.len())?;
        let inst = TracingInstance::new(targets.to_vec(), schedule, delta2, eps)?;
        let counts = all_counts_power(sys, p, &inst, 1)?;
        rows.push(FixedPointTraceRow {
            n,
            fractions: counts.iter().map(|&c| c as f64 / n as f64).collect(),
        });
    }
    let passes = |row: &FixedPointTraceRow| row.fractions.iter().all(|&f| f <= delta2);
    let empirical_m = if !passes(rows.last().unwrap()) {
        None
    } else {
        Some(
            rows.iter()
                .filter(|r| !passes(r))
                .map(|r| r.n)
                .max()
                .unwrap_or(0),
        )
    };
    Ok(FixedPointTraceReport { rows, empirical_m })
}

/// Verify that `gamma` is a uniform-continuity modulus for `eps` over the
/// first `n_power` iterates: `d(x, y) <= gamma` implies
/// `d(f^j(x), f^j(y)) < eps` for all `j < n_power`.
pub fn check_modulus(sys: &SystemSpec, gamma: f64, eps: f64, n_power: u64) -> Result<()> {
    if !(gamma > 0.0) {
        return Err(CoreError::NonPositiveRadius(gamma));
    }
    match sys {
        SystemSpec::FullShift { metric, .. }
        | SystemSpec::SftShift { metric, .. }
        | SystemSpec::OrbitClosureShift { metric, .. } => {
            // Shifting j times divides the agreement length by exactly j,
            // so the condition is L(gamma) >= L(eps) + n_power - 1.
            let lg = metric.agreement_len(gamma)? as u64;
            let le = metric.agreement_len(eps)? as u64;
            if lg >= le + n_power - 1 {
                Ok(())
            } else {
                Err(CoreError::ModulusTooLarge(gamma))
            }
        }
        SystemSpec::Rotation { .. } => {
            // Rotations are isometries.
            if gamma < eps {
                Ok(())
            } else {
                Err(CoreError::ModulusTooLarge(gamma))
            }
        }
        SystemSpec::IntervalMap { map } => {
            // Grid verification: perturb each grid point by +-gamma and
            // compare forward orbits.
            let grid = 4096;
            for i in 0..=grid {
                let x = map.lo + i as f64 * (map.hi - map.lo) / grid as f64;
                for y in [(x - gamma).max(map.lo), (x + gamma).min(map.hi)] {
                    let (mut a, mut b) = (x, y);
                    for _ in 0..n_power {
                        if (a - b).abs() >= eps {
                            return Err(CoreError::ModulusTooLarge(gamma));
                        }
                        a = map.eval(a)?;
                        b = map.eval(b)?;
                    }
                }
            }
            Ok(())
        }
        SystemSpec::Product { .. } => Err(CoreError::UnsupportedSystem(
            "modulus check on products".to_string(),
        )),
    }
}

/// Lift a tracing certificate of the power system `f^N` (block length
/// `m`, verified at scale `gamma` with mistake fraction `delta`) to a
/// certificate of `f` itself at scale `eps` with doubled mistake fraction:
/// block length `n = m N` when `l = 0`, else `n = (m - 1) N + l`, with
/// gaps `1 + N (t_k - 1)` respectively `1 + N (t_k - 1) + (N - l)`.
pub fn lift_power_tracing(
    sys: &SystemSpec,
    n_power: u64,
    cert: &TracingCertificate,
    gamma: f64,
    eps: f64,
    l: u64,
) -> Result<TracingCertificate> {
    if n_power < 1 || l >= n_power {
        return Err(CoreError::InvalidParams(format!(
            "need power >= 1 and remainder < power, got ({n_power}, {l})"
        )));
    }
    check_modulus(sys, gamma, eps, n_power)?;
    let (ok, _) = is_traced_power(sys, n_power, &cert.tracer, &cert.instance)?;
    if !ok {
        return Err(CoreError::InvalidParams(
            "input certificate does not verify under the power system".into(),
        ));
    }
    if n_power == 1 {
        return Ok(cert.clone());
    }
    let m = cert.instance.schedule.lengths[0];
    if cert.instance.schedule.lengths.iter().any(|&x| x != m) {
        return Err(CoreError::InvalidParams(
            "power lift requires equal block lengths".into(),
        ));
    }
    if m < 3 {
        return Err(CoreError::HorizonTooShort {
            horizon: m,
            required: 3,
        });
    }
    let big_n = n_power as usize;
    let l = l as usize;
    let n = if l == 0 {
        m * big_n
    } else {
        (m - 1) * big_n + l
    };
    let gaps: Vec<usize> = cert
        .instance
        .schedule
        .gaps
        .iter()
        .map(|&t| {
            if l == 0 {
                1 + big_n * (t - 1)
            } else {
                1 + big_n * (t - 1) + (big_n - l)
            }
        })
        .collect();
    let k = cert.instance.targets.len();
    let schedule = GapSchedule::new(vec![n; k], gaps)?;
    let delta = (2.0 * cert.instance.delta).min(1.0);
    let inst = TracingInstance::new(cert.instance.targets.clone(), schedule, delta, eps)?;
    let (ok, counts) = is_traced(sys, &cert.tracer, &inst)?;
    if !ok {
        let bad: Vec<usize> = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c as f64 > delta * n as f64)
            .map(|(i, _)| i)
            .collect();
        return Err(CoreError::SearchFailed(bad));
    }
    let horizon = inst.schedule.span();
    Ok(TracingCertificate {
        tracer: cert.tracer.clone(),
        instance: inst,
        counts,
        horizon,
        route: SearchRoute::PowerLift,
    })
}

/// Exact zero-tail certificate for tracing under the power map `f^N` on a
/// full shift: each target window of length `N (m - 1) + L(gamma)` is
/// copied at offset `N s_k`. Placements are disjoint when
/// `N * gap >= L(gamma)`; overlapping placements are attempted and kept
/// only if they still verify.
pub fn exact_power_certificate(
    sys: &SystemSpec,
    targets: &[Point],
    m: usize,
    gap: usize,
    big_n: u64,
    gamma: f64,
    delta: f64,
) -> Result<TracingCertificate> {
    let metric = sys
        .symbolic_metric()
        .ok_or_else(|| CoreError::UnsupportedSystem("power certificates need a shift".into()))?;
    let lg = metric.agreement_len(gamma)?;
    // When N * gap < L(gamma) consecutive copies overlap; later targets
    // overwrite the tail of earlier ones and the final verification
    // decides whether the construction still traces.
    let k = targets.len();
    let schedule = GapSchedule::uniform(m, gap, k)?;
    let starts = schedule.start_times();
    let need = (big_n as usize) * (m - 1) + lg;
    let total = (big_n as usize) * (*starts.last().unwrap() as usize) + need;
    let mut prefix = vec![0u8; total];
    for (k_i, t) in targets.iter().enumerate() {
        let x = t
            .as_symbolic()
            .ok_or_else(|| CoreError::IllegalPoint("symbolic target required".into()))?;
        let base = big_n as usize * starts[k_i] as usize;
        for i in 0..need {
            prefix[base + i] = x.symbol(i as u64);
        }
    }
    let tracer = Point::Symbolic(SymbolicPoint {
        prefix,
        tail: Tail::Periodic(vec![0]),
    });
    sys.validate(&tracer)?;
    let inst = TracingInstance::new(targets.to_vec(), schedule, delta, gamma)?;
    let (ok, counts) = is_traced_power(sys, big_n, &tracer, &inst)?;
    if !ok {
        return Err(CoreError::SearchFailed((0..k).collect()));
    }
    Ok(TracingCertificate {
        tracer,
        instance: inst,
        counts,
        horizon: 0,
        route: SearchRoute::ExactConstruction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::zoo::*;
    use crate::systems::SymbolicPoint;

    fn sym(word: &[u8]) -> Point {
        Point::Symbolic(SymbolicPoint::periodic(word.to_vec()))
    }

    #[test]
    fn start_times_examples() {
        assert_eq!(start_times(&[3, 3], &[2]).unwrap(), vec![0, 4]);
        assert_eq!(start_times(&[7], &[]).unwrap(), vec![0]);
        assert_eq!(start_times(&[2, 5, 1], &[1, 3]).unwrap(), vec![0, 2, 9]);
        assert!(start_times(&[], &[]).is_err());
        assert!(start_times(&[2, 2], &[]).is_err());
        assert!(start_times(&[2, 0], &[1]).is_err());
        assert!(start_times(&[2, 2], &[0]).is_err());
    }

    #[test]
    fn mistake_count_enumerates_offsets() {
        // Tracer shows 0101 over the window of a 0^inf target block:
        // symbol 1 gives distance 1 > 0.6, symbol 0 gives <= 1/2.
        let sys = full_shift(2);
        let z = Point::Symbolic(SymbolicPoint::word_then_constant(vec![0, 1, 0, 1], 0));
        let inst = TracingInstance::new(
            vec![sym(&[0])],
            GapSchedule::uniform(4, 1, 1).unwrap(),
            0.5,
            0.6,
        )
        .unwrap();
        assert_eq!(mistake_count(&sys, &z, &inst, 1).unwrap(), 2);
        // delta does not enter the count.
        let inst2 = TracingInstance::new(
            vec![sym(&[0])],
            GapSchedule::uniform(4, 1, 1).unwrap(),
            0.0,
            0.6,
        )
        .unwrap();
        assert_eq!(mistake_count(&sys, &z, &inst2, 1).unwrap(), 2);
        // Tracing the target by itself is mistake-free.
        assert_eq!(mistake_count(&sys, &sym(&[0]), &inst, 1).unwrap(), 0);
        assert!(mistake_count(&sys, &z, &inst, 2).is_err());
    }

    #[test]
    fn is_traced_alternating_blocks() {
        // Concatenation 000 111 000 ... traces alternating constants with
        // gaps 1 and zero mistakes at a coarse scale.
        let sys = full_shift(2);
        let z = Point::Symbolic(SymbolicPoint::periodic(vec![0, 0, 0, 1, 1, 1]));
        let inst = TracingInstance::new(
            vec![sym(&[0]), sym(&[1]), sym(&[0]), sym(&[1])],
            GapSchedule::uniform(3, 1, 4).unwrap(),
            0.0,
            0.9,
        )
        .unwrap();
        let (ok, counts) = is_traced(&sys, &z, &inst).unwrap();
        assert!(ok, "counts {counts:?}");
        assert_eq!(counts, vec![0, 0, 0, 0]);
    }

    #[test]
    fn threshold_is_real_comparison() {
        // m = 4, delta = 0.25: budget is 1.0, so 2 mistakes fail.
        let sys = full_shift(2);
        let z = Point::Symbolic(SymbolicPoint::word_then_constant(vec![1, 1, 0, 0], 0));
        let inst = TracingInstance::new(
            vec![sym(&[0])],
            GapSchedule::uniform(4, 1, 1).unwrap(),
            0.25,
            0.9,
        )
        .unwrap();
        let (ok, counts) = is_traced(&sys, &z, &inst).unwrap();
        assert_eq!(counts, vec![2]);
        assert!(!ok);
    }

    #[test]
    fn search_full_shift_concatenation() {
        // Coarse scale (L = 1): exact concatenation, gaps all 1.
        let sys = full_shift(2);
        let targets = vec![sym(&[0, 1]), sym(&[1]), sym(&[0])];
        let cert = search_tracing_point(&sys, &targets, 6, 0.0, 0.0, 0.5, 3, 64)
            .unwrap()
            .expect("certificate");
        assert_eq!(cert.instance.schedule.gaps, vec![1, 1]);
        assert_eq!(cert.counts, vec![0, 0, 0]);
        assert!(cert.verify(&sys).unwrap());
    }

    #[test]
    fn search_golden_mean_uses_bridges() {
        // Blocks ending in 1 followed by blocks starting with 1 need one
        // separating 0, so gaps of 2 appear; requires 1 + delta1*n >= 2.
        let sys = golden_mean_sft();
        let targets = vec![sym(&[1, 0]), sym(&[1, 0]), sym(&[1, 0])];
        let cert = search_tracing_point(&sys, &targets, 5, 0.25, 0.0, 0.5, 3, 64)
            .unwrap()
            .expect("certificate");
        assert!(cert.instance.schedule.max_gap() <= 2);
        assert!(cert.verify(&sys).unwrap());
        // The tracer itself must be a legal point of the subshift.
        sys.validate(&cert.tracer).unwrap();
    }

    #[test]
    fn search_with_lookahead_needs_longer_gaps() {
        // At a finer scale (L = 3) zero-mistake tracing needs gaps of 3,
        // so it fails when delta1 * n is too small and succeeds otherwise.
        let sys = full_shift(2);
        let targets = vec![sym(&[0]), sym(&[1])];
        let none = search_tracing_point(&sys, &targets, 4, 0.0, 0.0, 0.2, 2, 64).unwrap();
        assert!(none.is_none());
        let cert = search_tracing_point(&sys, &targets, 4, 0.6, 0.0, 0.2, 2, 64)
            .unwrap()
            .expect("certificate");
        assert_eq!(cert.instance.schedule.gaps, vec![3]);
        assert!(cert.verify(&sys).unwrap());
    }

    #[test]
    fn search_halving_map_absent_when_strict() {
        // Targets far from 0 with a tiny mistake budget at small n: no
        // tracer exists at the grid budget.
        let sys = halving_map();
        let targets = vec![Point::Interval(1.0), Point::Interval(0.9)];
        let none = search_tracing_point(&sys, &targets, 4, 0.5, 0.0, 0.05, 2, 512).unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn search_halving_map_fixed_point_route() {
        let sys = halving_map();
        let targets = vec![Point::Interval(1.0), Point::Interval(0.5)];
        let cert = search_tracing_point(&sys, &targets, 64, 0.5, 0.5, 0.25, 2, 512)
            .unwrap()
            .expect("certificate");
        assert_eq!(cert.route, SearchRoute::FixedPointOrbit);
        assert!(cert.verify(&sys).unwrap());
    }

    #[test]
    fn fixed_point_tracer_halving() {
        // Orbit of 1 under halving: 1, .5, .25, .125 exceed 0.1; from
        // .0625 on it does not -> fraction 4/10 at n = 10.
        let sys = halving_map();
        let report = trace_by_fixed_point(
            &sys,
            &Point::Interval(0.0),
            &[Point::Interval(1.0)],
            &[10, 64, 512],
            0.1,
            0.1,
        )
        .unwrap();
        assert!((report.rows[0].fractions[0] - 0.4).abs() < 1e-12);
        // Fraction ceil(log2(x/eps))/n shrinks; 64 passes 0.1 but 10 fails.
        assert_eq!(report.empirical_m, Some(10));
    }

    #[test]
    fn fixed_point_tracer_rejects_moving_point() {
        let sys = halving_map();
        let err = trace_by_fixed_point(
            &sys,
            &Point::Interval(0.5),
            &[Point::Interval(1.0)],
            &[8],
            0.1,
            0.1,
        );
        assert!(matches!(err, Err(CoreError::NotFixedPoint(_))));
    }

    #[test]
    fn fixed_point_tracer_density_zero() {
        // Base-4 metric: a mistake at offset j means a one at j itself,
        // so the count is the window's one-count <= floor(log2 n) + 1.
        let sys = density_zero_subshift_with_base(4.0);
        let g = Point::Symbolic(SymbolicPoint::power_generator());
        let p = Point::Symbolic(SymbolicPoint::constant(0));
        let n = 1 << 12;
        let report = trace_by_fixed_point(&sys, &p, &[g], &[n], 0.4, 0.05).unwrap();
        assert!(report.rows[0].fractions[0] <= 14.0 / n as f64);
        assert_eq!(report.empirical_m, Some(0));
    }

    #[test]
    fn modulus_checks() {
        let sys = full_shift(2);
        // L(gamma) >= L(eps) + N - 1: gamma = 2^-4, eps = 0.25, N = 3.
        check_modulus(&sys, 0.0625, 0.25, 3).unwrap();
        assert!(check_modulus(&sys, 0.25, 0.25, 3).is_err());
        check_modulus(&halving_map(), 0.1, 0.11, 5).unwrap();
        // The tent map doubles distances: gamma = eps/2 fails at N = 3.
        assert!(check_modulus(&tent_map(), 0.05, 0.1, 3).is_err());
        check_modulus(&tent_map(), 0.02, 0.1, 3).unwrap();
        check_modulus(&golden_rotation(), 0.05, 0.1, 100).unwrap();
    }

    /// Build a zero-mistake certificate for full_shift(2) under f^N by
    /// placing each target's needed window at the stretched start times.
    #[test]
    fn lift_gap_arithmetic() {
        // N=3, t_k=2, l=1 -> lifted gap 1 + 3*1 + 2 = 6.
        let sys = full_shift(2);
        let targets = vec![sym(&[0, 1, 1]), sym(&[1, 0])];
        let cert = exact_power_certificate(&sys, &targets, 8, 2, 3, 0.0625, 0.125).unwrap();
        let lifted = lift_power_tracing(&sys, 3, &cert, 0.0625, 0.25, 1).unwrap();
        assert_eq!(lifted.instance.schedule.gaps, vec![6]);
        assert_eq!(lifted.instance.schedule.lengths, vec![22, 22]);
        assert!(lifted.verify(&sys).unwrap());
        // l = 0: n = 24, gaps 1 + 3*(2-1) = 4.
        let lifted0 = lift_power_tracing(&sys, 3, &cert, 0.0625, 0.25, 0).unwrap();
        assert_eq!(lifted0.instance.schedule.gaps, vec![4]);
        assert_eq!(lifted0.instance.schedule.lengths, vec![24, 24]);
        assert!(lifted0.verify(&sys).unwrap());
    }

    #[test]
    fn lift_identity_case() {
        let sys = full_shift(2);
        let targets = vec![sym(&[0, 1])];
        let cert = exact_power_certificate(&sys, &targets, 8, 1, 1, 0.25, 0.125).unwrap();
        let lifted = lift_power_tracing(&sys, 1, &cert, 0.25, 0.25, 0).unwrap();
        assert_eq!(lifted, cert);
    }

    #[test]
    fn lift_rejects_bad_modulus() {
        let sys = full_shift(2);
        let targets = vec![sym(&[0, 1])];
        let cert = exact_power_certificate(&sys, &targets, 8, 2, 3, 0.0625, 0.125).unwrap();
        // gamma too coarse for eps over 3 iterates.
        let err = lift_power_tracing(&sys, 3, &cert, 0.25, 0.25, 0);
        assert!(matches!(err, Err(CoreError::ModulusTooLarge(_))));
    }

    #[test]
    fn lift_rejects_short_blocks() {
        let sys = full_shift(2);
        let targets = vec![sym(&[0, 1])];
        let cert = exact_power_certificate(&sys, &targets, 2, 2, 3, 0.0625, 0.125).unwrap();
        let err = lift_power_tracing(&sys, 3, &cert, 0.0625, 0.25, 0);
        assert!(matches!(err, Err(CoreError::HorizonTooShort { .. })));
    }

    #[test]
    fn certificate_json_round_trip() {
        let sys = golden_mean_sft();
        let targets = vec![sym(&[1, 0]), sym(&[0])];
        let cert = search_tracing_point(&sys, &targets, 4, 0.5, 0.0, 0.5, 2, 64)
            .unwrap()
            .expect("certificate");
        let js = serde_json::to_string(&cert).unwrap();
        let back: TracingCertificate = serde_json::from_str(&js).unwrap();
        assert_eq!(back, cert);
        assert!(back.verify(&sys).unwrap());
    }

    #[test]
    fn closure_search_finds_zero_tail_tracer() {
        // Targets 0^inf: the fixed point route wins immediately.
        let sys = density_zero_subshift();
        let z0 = Point::Symbolic(SymbolicPoint::constant(0));
        let cert = search_tracing_point(&sys, &[z0], 8, 0.5, 0.5, 0.25, 2, 4096)
            .unwrap()
            .expect("certificate");
        assert_eq!(cert.route, SearchRoute::FixedPointOrbit);
        assert!(cert.verify(&sys).unwrap());
    }

    #[test]
    fn closure_search_exhaustive_witness() {
        // A single generator block is traced by the generator itself.
        let sys = density_zero_subshift();
        let g = Point::Symbolic(SymbolicPoint::power_generator());
        let cert = search_tracing_point(&sys, &[g], 8, 0.25, 0.0, 0.5, 1, 4096)
            .unwrap()
            .expect("certificate");
        assert!(cert.verify(&sys).unwrap());
        sys.validate(&cert.tracer).unwrap();
    }

    #[test]
    fn rotation_search_picks_gaps_adaptively() {
        let sys = crate::systems::zoo::golden_rotation();
        let targets: Vec<Point> = [0.1, 0.62, 0.35]
            .iter()
            .map(|&t| Point::circle_from_f64(t))
            .collect();
        let cert = search_tracing_point(&sys, &targets, 64, 0.5, 0.0, 0.1, 3, 0)
            .unwrap()
            .expect("adaptive gaps reach arbitrary rotation targets");
        assert!(cert.verify(&sys).unwrap());
        assert_eq!(cert.tracer, targets[0]);
        assert!(cert.instance.schedule.max_gap() <= 33);
        // Gaps frozen at 1 cannot serve these targets: the isometry pins
        // the block distance at time 0.
        let schedule = GapSchedule::uniform(64, 1, 3).unwrap();
        let inst = TracingInstance::new(targets.clone(), schedule, 0.0, 0.1).unwrap();
        let (ok, _) = is_traced(&sys, &targets[0], &inst).unwrap();
        assert!(!ok);
    }
}
