//! Empirical measures along orbit segments, a fixed dictionary of test
//! functions metrizing weak-star convergence at finite scale, and the
//! unique-ergodicity diagnostics built on them.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::systems::{Point, SystemSpec};

/// The time average of point masses along an orbit segment:
/// `(1/n) sum_{j<n} delta at f^j(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    /// The orbit segment carrying equal weight `1 / points.len()`.
    pub points: Vec<Point>,
    /// The starting point the segment was grown from.
    pub source: Point,
}

impl EmpiricalMeasure {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Build the empirical measure of length `n` from `x`.
pub fn empirical_measure(sys: &SystemSpec, x: &Point, n: usize) -> Result<EmpiricalMeasure> {
    if n < 1 {
        return Err(CoreError::InvalidParams("measure length must be >= 1".into()));
    }
    sys.validate(x)?;
    Ok(EmpiricalMeasure {
        points: sys.orbit(x, n)?,
        source: x.clone(),
    })
}

/// One member of the test-function dictionary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum TestFn {
    /// Tent bump at a center: 1 inside `eps`, 0 outside `2 eps`.
    Bump { center: Point, eps: f64 },
    /// `cos(2 pi k t)` of the numeric coordinate (circle or interval).
    Cos { k: u32 },
    /// `sin(2 pi k t)` of the numeric coordinate.
    Sin { k: u32 },
}

impl TestFn {
    pub fn eval(&self, sys: &SystemSpec, p: &Point) -> Result<f64> {
        match self {
            TestFn::Bump { center, eps } => {
                let phi = sys.bump(center, *eps)?;
                Ok(phi(p))
            }
            TestFn::Cos { k } => Ok((2.0 * std::f64::consts::PI * *k as f64 * numeric(p)?).cos()),
            TestFn::Sin { k } => Ok((2.0 * std::f64::consts::PI * *k as f64 * numeric(p)?).sin()),
        }
    }
}

fn numeric(p: &Point) -> Result<f64> {
    match p {
        Point::Circle { num, den } => Ok(*num as f64 / *den as f64),
        Point::Interval(x) => Ok(*x),
        other => Err(CoreError::InvalidParams(format!(
            "harmonic test functions need a numeric coordinate, got {other:?}"
        ))),
    }
}

/// A weighted dictionary of Lipschitz test functions; the weighted sum of
/// integral discrepancies is the finite-scale weak-star distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionFamily {
    pub members: Vec<(f64, TestFn)>,
}

impl TestFunctionFamily {
    /// The default dictionary for a system: bumps of radius 0.2 at the
    /// landmarks and their images (eight functions), plus four harmonics
    /// on circle and interval systems. Weights decay as `2^-i`.
    pub fn for_system(sys: &SystemSpec) -> Result<Self> {
        let mut fns: Vec<TestFn> = Vec::new();
        let landmarks = sys.landmarks();
        for p in &landmarks {
            fns.push(TestFn::Bump {
                center: p.clone(),
                eps: 0.2,
            });
        }
        for p in &landmarks {
            fns.push(TestFn::Bump {
                center: sys.step(p)?,
                eps: 0.2,
            });
        }
        if matches!(
            sys,
            SystemSpec::Rotation { .. } | SystemSpec::IntervalMap { .. }
        ) {
            for k in 1..=2u32 {
                fns.push(TestFn::Cos { k });
                fns.push(TestFn::Sin { k });
            }
        }
        let members = fns
            .into_iter()
            .enumerate()
            .map(|(i, f)| (0.5f64.powi(i as i32), f))
            .collect();
        Ok(TestFunctionFamily { members })
    }
}

/// Integrate one test function against an empirical measure (the mean of
/// its values on the orbit segment).
pub fn integrate(sys: &SystemSpec, mu: &EmpiricalMeasure, f: &TestFn) -> Result<f64> {
    if mu.is_empty() {
        return Err(CoreError::InvalidParams("empty measure".into()));
    }
    let mut sum = 0.0;
    for p in &mu.points {
        sum += f.eval(sys, p)?;
    }
    Ok(sum / mu.points.len() as f64)
}

/// Finite-scale weak-star distance: the weighted sum of integral
/// discrepancies over the dictionary.
pub fn weak_star_distance(
    sys: &SystemSpec,
    mu: &EmpiricalMeasure,
    nu: &EmpiricalMeasure,
    fam: &TestFunctionFamily,
) -> Result<f64> {
    let mut d = 0.0;
    for (w, f) in &fam.members {
        d += w * (integrate(sys, mu, f)? - integrate(sys, nu, f)?).abs();
    }
    Ok(d)
}

/// One row of the unique-ergodicity diagnostic: the maximal pairwise
/// weak-star distance among the empirical measures at one length.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpreadRow {
    pub n: usize,
    pub spread: f64,
}

/// Output of [`unique_ergodicity_test`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniqueErgodicityReport {
    pub rows: Vec<SpreadRow>,
    /// Final spread below the absolute threshold (0.05).
    pub converged: bool,
    /// Spread shrank by at least a factor of two from first to last
    /// length (or started below threshold already).
    pub improving: bool,
    /// Joint verdict: empirical measures from all starting points merge.
    pub unique: bool,
}

pub const SPREAD_THRESHOLD: f64 = 0.05;
pub const IMPROVEMENT_FACTOR: f64 = 2.0;

/// Track the spread of empirical measures from several starting points at
/// increasing lengths. Uniquely ergodic systems drive the spread to zero
/// uniformly; systems with several ergodic measures keep it bounded away.
pub fn unique_ergodicity_test(
    sys: &SystemSpec,
    samples: &[Point],
    ns: &[usize],
    fam: &TestFunctionFamily,
) -> Result<UniqueErgodicityReport> {
    if samples.len() < 2 {
        return Err(CoreError::InvalidParams("need at least two samples".into()));
    }
    if ns.len() < 2 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CoreError::InvalidParams(
            "lengths must be strictly increasing with at least two entries".into(),
        ));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let measures: Vec<EmpiricalMeasure> = samples
            .iter()
            .map(|x| empirical_measure(sys, x, n))
            .collect::<Result<_>>()?;
        let mut spread: f64 = 0.0;
        for i in 0..measures.len() {
            for j in i + 1..measures.len() {
                spread = spread.max(weak_star_distance(sys, &measures[i], &measures[j], fam)?);
            }
        }
        rows.push(SpreadRow { n, spread });
    }
    let first = rows.first().unwrap().spread;
    let last = rows.last().unwrap().spread;
    let converged = last < SPREAD_THRESHOLD;
    let improving = first < SPREAD_THRESHOLD || last * IMPROVEMENT_FACTOR <= first;
    Ok(UniqueErgodicityReport {
        rows,
        converged,
        improving,
        unique: converged && improving,
    })
}

/// Output of [`detect_measure_multiplicity`]: single-linkage clusters of
/// the empirical measures (indices into the sample list).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiplicityReport {
    pub clusters: Vec<Vec<usize>>,
    /// Pairwise weak-star distance matrix (row-major, upper triangle
    /// mirrored).
    pub distances: Vec<Vec<f64>>,
}

/// Cluster long-run empirical measures by single linkage at threshold
/// `2 * eta`. Two or more clusters are evidence of several distinct
/// invariant measures.
pub fn detect_measure_multiplicity(
    sys: &SystemSpec,
    samples: &[Point],
    n: usize,
    eta: f64,
    fam: &TestFunctionFamily,
) -> Result<MultiplicityReport> {
    if samples.is_empty() {
        return Err(CoreError::InvalidParams("no samples".into()));
    }
    if eta <= 0.0 {
        return Err(CoreError::NonPositiveRadius(eta));
    }
    let measures: Vec<EmpiricalMeasure> = samples
        .iter()
        .map(|x| empirical_measure(sys, x, n))
        .collect::<Result<_>>()?;
    let m = measures.len();
    let mut distances = vec![vec![0.0f64; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let d = weak_star_distance(sys, &measures[i], &measures[j], fam)?;
            distances[i][j] = d;
            distances[j][i] = d;
        }
    }
    // Single linkage: union-find over edges below the threshold.
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..m {
        for j in i + 1..m {
            if distances[i][j] <= 2.0 * eta {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; m];
    for i in 0..m {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(c) => clusters[c].push(i),
            None => {
                root_of[r] = Some(clusters.len());
                clusters.push(vec![i]);
            }
        }
    }
    Ok(MultiplicityReport {
        clusters,
        distances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::zoo::*;
    use crate::systems::SymbolicPoint;

    #[test]
    fn empirical_measure_length_and_source() {
        let sys = golden_rotation();
        let x = Point::circle_from_f64(0.0);
        let mu = empirical_measure(&sys, &x, 50).unwrap();
        assert_eq!(mu.len(), 50);
        assert_eq!(mu.source, x);
    }

    #[test]
    fn weak_star_is_a_pseudometric() {
        let sys = full_shift(2);
        let fam = TestFunctionFamily::for_system(&sys).unwrap();
        let a = empirical_measure(&sys, &Point::Symbolic(SymbolicPoint::constant(0)), 16).unwrap();
        let b = empirical_measure(&sys, &Point::Symbolic(SymbolicPoint::constant(1)), 16).unwrap();
        let c =
            empirical_measure(&sys, &Point::Symbolic(SymbolicPoint::periodic(vec![0, 1])), 16)
                .unwrap();
        assert_eq!(weak_star_distance(&sys, &a, &a, &fam).unwrap(), 0.0);
        let dab = weak_star_distance(&sys, &a, &b, &fam).unwrap();
        let dba = weak_star_distance(&sys, &b, &a, &fam).unwrap();
        assert_eq!(dab, dba);
        assert!(dab > 0.0);
        let dac = weak_star_distance(&sys, &a, &c, &fam).unwrap();
        let dcb = weak_star_distance(&sys, &c, &b, &fam).unwrap();
        assert!(dab <= dac + dcb + 1e-12);
    }

    #[test]
    fn family_sizes() {
        let sym = TestFunctionFamily::for_system(&full_shift(2)).unwrap();
        assert_eq!(sym.members.len(), 8);
        let rot = TestFunctionFamily::for_system(&golden_rotation()).unwrap();
        assert_eq!(rot.members.len(), 12);
        // Weights decay geometrically.
        assert_eq!(rot.members[0].0, 1.0);
        assert_eq!(rot.members[1].0, 0.5);
    }

    #[test]
    fn rotation_measures_merge() {
        let sys = golden_rotation();
        let fam = TestFunctionFamily::for_system(&sys).unwrap();
        let samples: Vec<Point> = [0.0, 0.3, 0.7]
            .iter()
            .map(|&t| Point::circle_from_f64(t))
            .collect();
        let report =
            unique_ergodicity_test(&sys, &samples, &[100, 1000, 10000], &fam).unwrap();
        assert!(report.unique, "rows {:?}", report.rows);
        assert!(report.rows.last().unwrap().spread < SPREAD_THRESHOLD);
    }

    #[test]
    fn full_shift_measures_stay_apart() {
        let sys = full_shift(2);
        let fam = TestFunctionFamily::for_system(&sys).unwrap();
        let samples = vec![
            Point::Symbolic(SymbolicPoint::constant(0)),
            Point::Symbolic(SymbolicPoint::constant(1)),
        ];
        let report = unique_ergodicity_test(&sys, &samples, &[64, 256, 1024], &fam).unwrap();
        assert!(!report.unique);
        // Fixed points: empirical measures are already exact, the spread
        // never moves.
        let spreads: Vec<f64> = report.rows.iter().map(|r| r.spread).collect();
        assert!(spreads.iter().all(|&s| (s - spreads[0]).abs() < 1e-12));
        assert!(spreads[0] > SPREAD_THRESHOLD);
    }

    #[test]
    fn multiplicity_on_full_shift() {
        let sys = full_shift(2);
        let fam = TestFunctionFamily::for_system(&sys).unwrap();
        let samples = vec![
            Point::Symbolic(SymbolicPoint::constant(0)),
            Point::Symbolic(SymbolicPoint::constant(1)),
            Point::Symbolic(SymbolicPoint::word_then_constant(vec![1, 0, 1], 0)),
        ];
        let report = detect_measure_multiplicity(&sys, &samples, 512, 0.01, &fam).unwrap();
        // The third orbit converges to the delta at 0^inf: it clusters
        // with the first sample, the 1^inf fixed point stays alone.
        assert_eq!(report.clusters.len(), 2);
        assert!(report.clusters.iter().any(|c| c.contains(&0) && c.contains(&2)));
        assert!(report.clusters.iter().any(|c| c == &vec![1]));
    }

    #[test]
    fn multiplicity_single_cluster_on_rotation() {
        let sys = golden_rotation();
        let fam = TestFunctionFamily::for_system(&sys).unwrap();
        let samples: Vec<Point> = [0.1, 0.5, 0.9]
            .iter()
            .map(|&t| Point::circle_from_f64(t))
            .collect();
        let report = detect_measure_multiplicity(&sys, &samples, 4096, 0.02, &fam).unwrap();
        assert_eq!(report.clusters.len(), 1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let sys = golden_rotation();
        let fam = TestFunctionFamily::for_system(&sys).unwrap();
        let p = Point::circle_from_f64(0.2);
        assert!(empirical_measure(&sys, &p, 0).is_err());
        assert!(unique_ergodicity_test(&sys, std::slice::from_ref(&p), &[8, 16], &fam).is_err());
        assert!(unique_ergodicity_test(&sys, &[p.clone(), p.clone()], &[16, 8], &fam).is_err());
        assert!(detect_measure_multiplicity(&sys, &[p], 16, 0.0, &fam).is_err());
    }

    #[test]
    fn harmonics_reject_symbolic_points() {
        let sys = full_shift(2);
        let f = TestFn::Cos { k: 1 };
        let p = Point::Symbolic(SymbolicPoint::constant(0));
        assert!(f.eval(&sys, &p).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let sys = golden_rotation();
        let fam = TestFunctionFamily::for_system(&sys).unwrap();
        let s = serde_json::to_string(&fam).unwrap();
        let back: TestFunctionFamily = serde_json::from_str(&s).unwrap();
        assert_eq!(fam, back);
    }
}
