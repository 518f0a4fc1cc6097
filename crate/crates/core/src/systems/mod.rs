//! Phase spaces and maps: shift spaces over finite alphabets, circle
//! rotations, piecewise interval maps, and products.
//!
//! Symbolic systems carry a configurable ultrametric `d(x, y) = base^{-i}`
//! where `i` is the first index at which the sequences disagree. Circle
//! rotations iterate exactly on a fixed rational grid. Interval maps are
//! given by piecewise formulas in a small expression language.

pub mod expr;
pub mod point;
pub mod zoo;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
pub use expr::Expr;
pub use point::{power_indicator, Point, SymbolicPoint, Tail, CIRCLE_DEN};

/// Scan horizon used when computing exact symbolic distances: sequences
/// agreeing on this many symbols are treated as being at distance zero.
pub const SYMBOLIC_HORIZON: u64 = 96;

/// Metric parameters for a shift space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolicMetric {
    /// Base of the ultrametric `d(x, y) = base^{-i}`; must exceed 1.
    #[serde(default = "default_base")]
    pub base: f64,
}

fn default_base() -> f64 {
    2.0
}

impl Default for SymbolicMetric {
    fn default() -> Self {
        SymbolicMetric { base: 2.0 }
    }
}

impl SymbolicMetric {
    /// Distance implied by a first disagreement at index `i`.
    pub fn dist_at(&self, i: u64) -> f64 {
        self.base.powi(-(i as i32))
    }

    /// The smallest `L >= 0` with `base^{-L} <= eps`: two sequences are
    /// within `eps` exactly when they agree on their first `L` symbols.
    pub fn agreement_len(&self, eps: f64) -> Result<usize> {
        if !(eps > 0.0) {
            return Err(CoreError::NonPositiveRadius(eps));
        }
        let mut l = 0usize;
        let mut d = 1.0f64;
        while d > eps {
            l += 1;
            d /= self.base;
            if l as u64 > SYMBOLIC_HORIZON {
                return Err(CoreError::InvalidEpsilon {
                    eps,
                    lo: self.base.powi(-(SYMBOLIC_HORIZON as i32)),
                    hi: f64::INFINITY,
                });
            }
        }
        Ok(l)
    }
}

/// One monotone piece of an interval map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalPiece {
    pub lo: f64,
    pub hi: f64,
    pub formula: Expr,
}

/// A piecewise-defined self-map of a real interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalMapSpec {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub pieces: Vec<IntervalPiece>,
    /// Tolerance used at piece boundaries and for range clamping.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    1e-9
}

impl IntervalMapSpec {
    /// Evaluate the map at `x`, clamping the result to the phase interval.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x < self.lo - self.tol || x > self.hi + self.tol {
            return Err(CoreError::IllegalPoint(format!(
                "{x} outside [{}, {}]",
                self.lo, self.hi
            )));
        }
        let piece = self
            .pieces
            .iter()
            .find(|p| x >= p.lo - self.tol && x <= p.hi + self.tol)
            .ok_or_else(|| CoreError::IllegalPoint(format!("{x} not covered by any piece")))?;
        Ok(piece.formula.eval(x).clamp(self.lo, self.hi))
    }
}

/// Generator rule of an orbit-closure shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorRule {
    /// The indicator of the powers of two.
    PowerIndicator,
}

/// A dynamical system: the phase space together with its map and metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum SystemSpec {
    /// The full shift on `alphabet` symbols.
    FullShift {
        alphabet: usize,
        #[serde(default)]
        metric: SymbolicMetric,
    },
    /// A shift of finite type given by a 0/1 transition matrix
    /// (`transition[a][b] == 1` allows the word `ab`).
    SftShift {
        alphabet: usize,
        transition: Vec<Vec<u8>>,
        #[serde(default)]
        metric: SymbolicMetric,
    },
    /// The orbit closure of a lazily-defined generator sequence.
    OrbitClosureShift {
        generator: GeneratorRule,
        #[serde(default)]
        metric: SymbolicMetric,
    },
    /// Rotation of the circle by `num / den`, iterated exactly.
    Rotation { num: u64, den: u64 },
    /// A piecewise interval map.
    IntervalMap { map: IntervalMapSpec },
    /// The product of two systems with the sup metric.
    Product {
        left: Box<SystemSpec>,
        right: Box<SystemSpec>,
    },
}

impl SystemSpec {
    /// A short human-readable identifier for reports.
    pub fn id(&self) -> String {
        match self {
            SystemSpec::FullShift { alphabet, .. } => format!("full_shift({alphabet})"),
            SystemSpec::SftShift { alphabet, .. } => format!("sft({alphabet})"),
            SystemSpec::OrbitClosureShift { .. } => "density_zero_subshift".to_string(),
            SystemSpec::Rotation { num, den } => format!("rotation({num}/{den})"),
            SystemSpec::IntervalMap { map } => format!("interval({})", map.name),
            SystemSpec::Product { left, right } => format!("product({}, {})", left.id(), right.id()),
        }
    }

    /// The symbolic metric, when this is a shift space.
    pub fn symbolic_metric(&self) -> Option<SymbolicMetric> {
        match self {
            SystemSpec::FullShift { metric, .. }
            | SystemSpec::SftShift { metric, .. }
            | SystemSpec::OrbitClosureShift { metric, .. } => Some(*metric),
            _ => None,
        }
    }

    /// Alphabet size, when this is a shift space.
    pub fn alphabet(&self) -> Option<usize> {
        match self {
            SystemSpec::FullShift { alphabet, .. } | SystemSpec::SftShift { alphabet, .. } => {
                Some(*alphabet)
            }
            SystemSpec::OrbitClosureShift { .. } => Some(2),
            _ => None,
        }
    }

    /// Check that `p` belongs to the phase space.
    pub fn validate(&self, p: &Point) -> Result<()> {
        match (self, p) {
            (SystemSpec::FullShift { alphabet, .. }, Point::Symbolic(s)) => {
                validate_symbols(s, *alphabet)
            }
            (
                SystemSpec::SftShift {
                    alphabet,
                    transition,
                    ..
                },
                Point::Symbolic(s),
            ) => {
                validate_symbols(s, *alphabet)?;
                let span = check_span(s);
                for i in 0..span {
                    let (a, b) = (s.symbol(i) as usize, s.symbol(i + 1) as usize);
                    if transition[a][b] == 0 {
                        return Err(CoreError::IllegalPoint(format!(
                            "forbidden word {a}{b} at index {i}"
                        )));
                    }
                }
                Ok(())
            }
            (SystemSpec::OrbitClosureShift { .. }, Point::Symbolic(s)) => {
                validate_symbols(s, 2)?;
                let span = check_span(s) as usize;
                let w = s.window(span);
                if power_window_ok(&w) {
                    Ok(())
                } else {
                    Err(CoreError::IllegalPoint(
                        "window not realized by the generator's orbit closure".to_string(),
                    ))
                }
            }
            (SystemSpec::Rotation { den, .. }, Point::Circle { num, den: pden }) => {
                if pden == den && num < den {
                    Ok(())
                } else {
                    Err(CoreError::IllegalPoint(format!(
                        "circle point {num}/{pden} not on grid /{den}"
                    )))
                }
            }
            (SystemSpec::IntervalMap { map }, Point::Interval(x)) => {
                if *x >= map.lo - map.tol && *x <= map.hi + map.tol {
                    Ok(())
                } else {
                    Err(CoreError::IllegalPoint(format!(
                        "{x} outside [{}, {}]",
                        map.lo, map.hi
                    )))
                }
            }
            (SystemSpec::Product { left, right }, Point::Product(a, b)) => {
                left.validate(a)?;
                right.validate(b)
            }
            _ => Err(CoreError::IllegalPoint(format!(
                "point kind does not match system {}",
                self.id()
            ))),
        }
    }

    /// Apply the map once.
    pub fn step(&self, p: &Point) -> Result<Point> {
        match (self, p) {
            (
                SystemSpec::FullShift { .. }
                | SystemSpec::SftShift { .. }
                | SystemSpec::OrbitClosureShift { .. },
                Point::Symbolic(s),
            ) => Ok(Point::Symbolic(s.shift())),
            (SystemSpec::Rotation { num: rot, den }, Point::Circle { num, den: pden }) => {
                if pden != den {
                    return Err(CoreError::IllegalPoint("circle grid mismatch".to_string()));
                }
                Ok(Point::Circle {
                    num: (num + rot) % den,
                    den: *den,
                })
            }
            (SystemSpec::IntervalMap { map }, Point::Interval(x)) => {
                Ok(Point::Interval(map.eval(*x)?))
            }
            (SystemSpec::Product { left, right }, Point::Product(a, b)) => Ok(Point::Product(
                Box::new(left.step(a)?),
                Box::new(right.step(b)?),
            )),
            _ => Err(CoreError::IllegalPoint(format!(
                "point kind does not match system {}",
                self.id()
            ))),
        }
    }

    /// Apply the map `n` times.
    pub fn step_by(&self, p: &Point, n: u64) -> Result<Point> {
        match (self, p) {
            (
                SystemSpec::FullShift { .. }
                | SystemSpec::SftShift { .. }
                | SystemSpec::OrbitClosureShift { .. },
                Point::Symbolic(s),
            ) => Ok(Point::Symbolic(s.shift_by(n))),
            (SystemSpec::Rotation { num: rot, den }, Point::Circle { num, den: pden }) => {
                if pden != den {
                    return Err(CoreError::IllegalPoint("circle grid mismatch".to_string()));
                }
                let adv = ((*rot as u128 * n as u128) % *den as u128) as u64;
                Ok(Point::Circle {
                    num: (num + adv) % den,
                    den: *den,
                })
            }
            _ => {
                let mut q = p.clone();
                for _ in 0..n {
                    q = self.step(&q)?;
                }
                Ok(q)
            }
        }
    }

    /// The finite orbit segment `p, f(p), ..., f^{n-1}(p)`.
    pub fn orbit(&self, p: &Point, n: usize) -> Result<Vec<Point>> {
        let mut out = Vec::with_capacity(n);
        let mut q = p.clone();
        for i in 0..n {
            if i > 0 {
                q = self.step(&q)?;
            }
            out.push(q.clone());
        }
        Ok(out)
    }

    /// Metric distance between two points of the phase space.
    pub fn dist(&self, x: &Point, y: &Point) -> Result<f64> {
        match (self, x, y) {
            (
                SystemSpec::FullShift { metric, .. }
                | SystemSpec::SftShift { metric, .. }
                | SystemSpec::OrbitClosureShift { metric, .. },
                Point::Symbolic(a),
                Point::Symbolic(b),
            ) => Ok(match a.first_disagreement(b, SYMBOLIC_HORIZON) {
                Some(i) => metric.dist_at(i),
                None => 0.0,
            }),
            (SystemSpec::Rotation { den, .. }, Point::Circle { num: a, .. }, Point::Circle { num: b, .. }) => {
                let diff = a.abs_diff(*b);
                Ok(diff.min(den - diff) as f64 / *den as f64)
            }
            (SystemSpec::IntervalMap { .. }, Point::Interval(a), Point::Interval(b)) => {
                Ok((a - b).abs())
            }
            (SystemSpec::Product { left, right }, Point::Product(a1, a2), Point::Product(b1, b2)) => {
                Ok(left.dist(a1, b1)?.max(right.dist(a2, b2)?))
            }
            _ => Err(CoreError::IllegalPoint(
                "distance between mismatched point kinds".to_string(),
            )),
        }
    }

    /// Diameter of the phase space under the system metric.
    pub fn diameter(&self) -> f64 {
        match self {
            SystemSpec::FullShift { .. }
            | SystemSpec::SftShift { .. }
            | SystemSpec::OrbitClosureShift { .. } => 1.0,
            SystemSpec::Rotation { .. } => 0.5,
            SystemSpec::IntervalMap { map } => map.hi - map.lo,
            SystemSpec::Product { left, right } => left.diameter().max(right.diameter()),
        }
    }

    /// Number of legal words of length `n`.
    pub fn count_words(&self, n: usize) -> Result<u128> {
        if n == 0 {
            return Ok(1);
        }
        match self {
            SystemSpec::FullShift { alphabet, .. } => {
                let mut c: u128 = 1;
                for _ in 0..n {
                    c = c
                        .checked_mul(*alphabet as u128)
                        .ok_or_else(|| CoreError::InvalidParams("word count overflow".into()))?;
                }
                Ok(c)
            }
            SystemSpec::SftShift {
                alphabet,
                transition,
                ..
            } => {
                // Transfer-matrix count: vector of counts by final symbol.
                let mut counts = vec![1u128; *alphabet];
                for _ in 1..n {
                    let mut next = vec![0u128; *alphabet];
                    for a in 0..*alphabet {
                        for b in 0..*alphabet {
                            if transition[a][b] == 1 {
                                next[b] = next[b].checked_add(counts[a]).ok_or_else(|| {
                                    CoreError::InvalidParams("word count overflow".into())
                                })?;
                            }
                        }
                    }
                    counts = next;
                }
                Ok(counts.iter().sum())
            }
            SystemSpec::OrbitClosureShift { .. } => Ok(self.words(n)?.len() as u128),
            SystemSpec::Product { left, right } => {
                Ok(left.count_words(n)? * right.count_words(n)?)
            }
            _ => Err(CoreError::UnsupportedSystem(format!(
                "word counting on {}",
                self.id()
            ))),
        }
    }

    /// Enumerate the legal words of length `n` (shift spaces only).
    pub fn words(&self, n: usize) -> Result<Vec<Vec<u8>>> {
        match self {
            SystemSpec::FullShift { alphabet, .. } => {
                let mut out = Vec::new();
                enumerate_words(*alphabet, None, n, &mut Vec::new(), &mut out);
                Ok(out)
            }
            SystemSpec::SftShift {
                alphabet,
                transition,
                ..
            } => {
                let mut out = Vec::new();
                enumerate_words(*alphabet, Some(transition), n, &mut Vec::new(), &mut out);
                Ok(out)
            }
            SystemSpec::OrbitClosureShift { .. } => {
                // Every legal window appears in a sufficiently long prefix
                // of the generator: past index 4n the runs of zeros between
                // consecutive ones already exceed n on both sides, so every
                // sparse window is realized. Scan a prefix with slack.
                let g = SymbolicPoint::power_generator();
                let span = 16 * n + 16;
                let buf: Vec<u8> = (0..span as u64).map(|i| g.symbol(i)).collect();
                let mut seen: std::collections::BTreeSet<Vec<u8>> = std::collections::BTreeSet::new();
                for start in 0..=span - n {
                    seen.insert(buf[start..start + n].to_vec());
                }
                Ok(seen.into_iter().collect())
            }
            _ => Err(CoreError::UnsupportedSystem(format!(
                "word enumeration on {}",
                self.id()
            ))),
        }
    }

    /// Is `w` a legal word of this shift space?
    pub fn is_word_legal(&self, w: &[u8]) -> Result<bool> {
        match self {
            SystemSpec::FullShift { alphabet, .. } => {
                Ok(w.iter().all(|&s| (s as usize) < *alphabet))
            }
            SystemSpec::SftShift {
                alphabet,
                transition,
                ..
            } => {
                if !w.iter().all(|&s| (s as usize) < *alphabet) {
                    return Ok(false);
                }
                Ok(w.windows(2).all(|p| transition[p[0] as usize][p[1] as usize] == 1))
            }
            SystemSpec::OrbitClosureShift { .. } => {
                if !w.iter().all(|&s| s < 2) {
                    return Ok(false);
                }
                Ok(power_window_ok(w))
            }
            _ => Err(CoreError::UnsupportedSystem(format!(
                "word legality on {}",
                self.id()
            ))),
        }
    }

    /// Shortest word `u` such that `a u b` is legal, excluding the
    /// endpoints themselves (may be empty). Shift spaces with a transition
    /// structure only.
    pub fn connect(&self, a: u8, b: u8) -> Result<Vec<u8>> {
        match self {
            SystemSpec::FullShift { .. } => Ok(Vec::new()),
            SystemSpec::SftShift {
                alphabet,
                transition,
                ..
            } => {
                // BFS over symbols from `a`, tracking predecessors.
                let k = *alphabet;
                let (a, b) = (a as usize, b as usize);
                if transition[a][b] == 1 {
                    return Ok(Vec::new());
                }
                let mut pred = vec![usize::MAX; k];
                let mut queue = std::collections::VecDeque::new();
                for c in 0..k {
                    if transition[a][c] == 1 && pred[c] == usize::MAX {
                        pred[c] = a;
                        queue.push_back(c);
                    }
                }
                while let Some(c) = queue.pop_front() {
                    if transition[c][b] == 1 {
                        let mut path = vec![c as u8];
                        let mut cur = c;
                        while pred[cur] != a {
                            cur = pred[cur];
                            path.push(cur as u8);
                        }
                        path.reverse();
                        return Ok(path);
                    }
                    for d in 0..k {
                        if transition[c][d] == 1 && pred[d] == usize::MAX {
                            pred[d] = c;
                            queue.push_back(d);
                        }
                    }
                }
                Err(CoreError::InvalidParams(format!(
                    "symbols {a} and {b} not connected in transition graph"
                )))
            }
            _ => Err(CoreError::UnsupportedSystem(format!(
                "symbol connection on {}",
                self.id()
            ))),
        }
    }

    /// A continuous test function supported near `center`: value 1 on the
    /// closed ball of radius `eps`, 0 outside the open ball of radius
    /// `2 eps`, linear in the distance in between.
    pub fn bump(&self, center: &Point, eps: f64) -> Result<impl Fn(&Point) -> f64 + '_> {
        if !(eps > 0.0) {
            return Err(CoreError::NonPositiveRadius(eps));
        }
        self.validate(center)?;
        let center = center.clone();
        let sys = self;
        Ok(move |p: &Point| -> f64 {
            let d = sys.dist(&center, p).unwrap_or(f64::INFINITY);
            if d <= eps {
                1.0
            } else if d >= 2.0 * eps {
                0.0
            } else {
                2.0 - d / eps
            }
        })
    }

    /// Distinguished points used to seed test-function families.
    pub fn landmarks(&self) -> Vec<Point> {
        match self {
            SystemSpec::FullShift { alphabet, .. } => {
                let mut v = vec![
                    Point::Symbolic(SymbolicPoint::constant(0)),
                    Point::Symbolic(SymbolicPoint::periodic(vec![0, 1])),
                    Point::Symbolic(SymbolicPoint::periodic(vec![0, 0, 1])),
                ];
                if *alphabet > 1 {
                    v.insert(1, Point::Symbolic(SymbolicPoint::constant(1)));
                }
                v
            }
            SystemSpec::SftShift { .. } => vec![
                Point::Symbolic(SymbolicPoint::constant(0)),
                Point::Symbolic(SymbolicPoint::periodic(vec![0, 1])),
                Point::Symbolic(SymbolicPoint::periodic(vec![0, 0, 1])),
                Point::Symbolic(SymbolicPoint::periodic(vec![0, 0, 0, 1])),
            ],
            SystemSpec::OrbitClosureShift { .. } => vec![
                Point::Symbolic(SymbolicPoint::constant(0)),
                Point::Symbolic(SymbolicPoint::power_generator()),
                Point::Symbolic(SymbolicPoint::power_generator().shift()),
                Point::Symbolic(SymbolicPoint::word_then_constant(vec![0, 0, 0, 1], 0)),
            ],
            SystemSpec::Rotation { den, .. } => [0.1, 0.35, 0.6, 0.85]
                .iter()
                .map(|t| Point::Circle {
                    num: (t * *den as f64).round() as u64 % den,
                    den: *den,
                })
                .collect(),
            SystemSpec::IntervalMap { map } => [0.1, 0.35, 0.6, 0.85]
                .iter()
                .map(|t| Point::Interval(map.lo + t * (map.hi - map.lo)))
                .collect(),
            SystemSpec::Product { left, right } => {
                let ls = left.landmarks();
                let rs = right.landmarks();
                ls.into_iter()
                    .zip(rs)
                    .map(|(a, b)| Point::Product(Box::new(a), Box::new(b)))
                    .collect()
            }
        }
    }

    /// Draw a random point of the phase space.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> Result<Point> {
        match self {
            SystemSpec::FullShift { alphabet, .. } => {
                let word: Vec<u8> = (0..32).map(|_| rng.gen_range(0..*alphabet) as u8).collect();
                Ok(Point::Symbolic(SymbolicPoint::periodic(word)))
            }
            SystemSpec::SftShift {
                alphabet,
                transition,
                ..
            } => {
                // Random walk on the transition graph; retry until the
                // wraparound edge is also legal so the periodic point lies
                // in the subshift.
                'outer: for _ in 0..256 {
                    let mut word = vec![rng.gen_range(0..*alphabet) as u8];
                    for _ in 1..32 {
                        let prev = *word.last().unwrap() as usize;
                        let succ: Vec<u8> = (0..*alphabet)
                            .filter(|&b| transition[prev][b] == 1)
                            .map(|b| b as u8)
                            .collect();
                        if succ.is_empty() {
                            continue 'outer;
                        }
                        word.push(succ[rng.gen_range(0..succ.len())]);
                    }
                    let (last, first) = (*word.last().unwrap() as usize, word[0] as usize);
                    if transition[last][first] == 1 {
                        return Ok(Point::Symbolic(SymbolicPoint::periodic(word)));
                    }
                }
                Err(CoreError::InvalidParams(
                    "could not sample a periodic point of the subshift".into(),
                ))
            }
            SystemSpec::OrbitClosureShift { .. } => {
                let t = rng.gen_range(0u64..1024);
                Ok(Point::Symbolic(
                    SymbolicPoint::power_generator().shift_by(t),
                ))
            }
            SystemSpec::Rotation { den, .. } => Ok(Point::Circle {
                num: rng.gen_range(0..*den),
                den: *den,
            }),
            SystemSpec::IntervalMap { map } => {
                Ok(Point::Interval(rng.gen_range(map.lo..=map.hi)))
            }
            SystemSpec::Product { left, right } => Ok(Point::Product(
                Box::new(left.sample_point(rng)?),
                Box::new(right.sample_point(rng)?),
            )),
        }
    }
}

fn validate_symbols(s: &SymbolicPoint, alphabet: usize) -> Result<()> {
    let ok = s.prefix.iter().all(|&c| (c as usize) < alphabet)
        && match &s.tail {
            Tail::Periodic(w) => w.iter().all(|&c| (c as usize) < alphabet),
            Tail::PowerGenerator { .. } => alphabet >= 2,
        };
    if ok {
        Ok(())
    } else {
        Err(CoreError::IllegalPoint("symbol outside alphabet".to_string()))
    }
}

/// How far into the sequence structural checks must look: the prefix plus
/// one full period (or a fixed window for generator tails).
fn check_span(s: &SymbolicPoint) -> u64 {
    let plen = s.prefix.len() as u64;
    match &s.tail {
        Tail::Periodic(w) => plen + w.len() as u64 + 1,
        Tail::PowerGenerator { .. } => plen + 64,
    }
}

/// Is `w` a window of some point in the orbit closure of the indicator of
/// the powers of two? The closure consists of the generator's shifts, the
/// points `0^a 1 0^infinity`, and the zero point, so a window is legal
/// exactly when its ones can be aligned with powers of two (windows with at
/// most one `1` are absorbed by the sparse limit points).
pub fn power_window_ok(w: &[u8]) -> bool {
    let ones: Vec<usize> = (0..w.len()).filter(|&i| w[i] == 1).collect();
    if ones.is_empty() {
        return true;
    }
    if ones.len() == 1 {
        return true;
    }
    // Align the first one with each candidate power 2^a and check the
    // whole window against the generator.
    for a in 0..63u32 {
        let p = 1u64 << a;
        let first = ones[0] as u64;
        if p < first {
            continue;
        }
        let start = p - first;
        let ok = w
            .iter()
            .enumerate()
            .all(|(i, &s)| power_indicator(start + i as u64) == s);
        if ok {
            return true;
        }
        // Once the gap after 2^a exceeds the window, larger alignments
        // cannot place two ones inside the window.
        if p > 2 * (w.len() as u64 + 2) {
            break;
        }
    }
    false
}

fn enumerate_words(
    alphabet: usize,
    transition: Option<&Vec<Vec<u8>>>,
    n: usize,
    cur: &mut Vec<u8>,
    out: &mut Vec<Vec<u8>>,
) {
    if cur.len() == n {
        out.push(cur.clone());
        return;
    }
    for s in 0..alphabet {
        if let (Some(t), Some(&prev)) = (transition, cur.last()) {
            if t[prev as usize][s] == 0 {
                continue;
            }
        }
        cur.push(s as u8);
        enumerate_words(alphabet, transition, n, cur, out);
        cur.pop();
    }
}
