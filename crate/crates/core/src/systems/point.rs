//! Points of the supported phase spaces.
//!
//! Symbolic points are one-sided sequences stored as a finite prefix plus a
//! tail rule, so that shifting is cheap and orbits of lazily-defined points
//! (such as the indicator of the powers of two) never materialize more
//! symbols than a computation actually inspects.

use serde::{Deserialize, Serialize};

/// Denominator used for exact circle arithmetic; rotation angles are
/// snapped to this grid so that iteration is pure integer arithmetic.
pub const CIRCLE_DEN: u64 = 1_000_000_000_000;

/// Returns `1` when `i` is a power of two (1, 2, 4, 8, ...), else `0`.
pub fn power_indicator(i: u64) -> u8 {
    u8::from(i >= 1 && i.is_power_of_two())
}

/// Tail rule of a symbolic point: the symbols after the stored prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Tail {
    /// The word repeats forever (a single symbol gives a constant tail).
    Periodic(Vec<u8>),
    /// The indicator of the powers of two, read from absolute index
    /// `offset` onward.
    PowerGenerator { offset: u64 },
}

/// A one-sided symbolic sequence: explicit `prefix`, then `tail`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicPoint {
    pub prefix: Vec<u8>,
    pub tail: Tail,
}

impl SymbolicPoint {
    /// The sequence `w w w ...` for a nonempty word `w`.
    pub fn periodic(word: Vec<u8>) -> SymbolicPoint {
        assert!(!word.is_empty(), "periodic word must be nonempty");
        SymbolicPoint {
            prefix: Vec::new(),
            tail: Tail::Periodic(word),
        }
    }

    /// The constant sequence `s s s ...`.
    pub fn constant(s: u8) -> SymbolicPoint {
        SymbolicPoint::periodic(vec![s])
    }

    /// A finite word followed by a constant tail.
    pub fn word_then_constant(word: Vec<u8>, s: u8) -> SymbolicPoint {
        SymbolicPoint {
            prefix: word,
            tail: Tail::Periodic(vec![s]),
        }
    }

    /// The indicator of the powers of two: `0 1 1 0 1 0 0 0 1 ...`
    /// (ones exactly at indices 1, 2, 4, 8, 16, ...).
    pub fn power_generator() -> SymbolicPoint {
        SymbolicPoint {
            prefix: Vec::new(),
            tail: Tail::PowerGenerator { offset: 0 },
        }
    }

    /// Symbol at index `i` (no bound: the sequence is infinite).
    pub fn symbol(&self, i: u64) -> u8 {
        let plen = self.prefix.len() as u64;
        if i < plen {
            return self.prefix[i as usize];
        }
        match &self.tail {
            Tail::Periodic(w) => w[((i - plen) % w.len() as u64) as usize],
            Tail::PowerGenerator { offset } => power_indicator(offset + (i - plen)),
        }
    }

    /// The left shift: drops the first symbol.
    pub fn shift(&self) -> SymbolicPoint {
        if !self.prefix.is_empty() {
            return SymbolicPoint {
                prefix: self.prefix[1..].to_vec(),
                tail: self.tail.clone(),
            };
        }
        match &self.tail {
            Tail::Periodic(w) => {
                let mut rotated = w[1..].to_vec();
                rotated.push(w[0]);
                SymbolicPoint {
                    prefix: Vec::new(),
                    tail: Tail::Periodic(rotated),
                }
            }
            Tail::PowerGenerator { offset } => SymbolicPoint {
                prefix: Vec::new(),
                tail: Tail::PowerGenerator { offset: offset + 1 },
            },
        }
    }

    /// The `n`-fold left shift, computed without intermediate clones.
    pub fn shift_by(&self, n: u64) -> SymbolicPoint {
        let plen = self.prefix.len() as u64;
        if n < plen {
            return SymbolicPoint {
                prefix: self.prefix[n as usize..].to_vec(),
                tail: self.tail.clone(),
            };
        }
        let rest = n - plen;
        match &self.tail {
            Tail::Periodic(w) => {
                let r = (rest % w.len() as u64) as usize;
                let mut rotated = w[r..].to_vec();
                rotated.extend_from_slice(&w[..r]);
                SymbolicPoint {
                    prefix: Vec::new(),
                    tail: Tail::Periodic(rotated),
                }
            }
            Tail::PowerGenerator { offset } => SymbolicPoint {
                prefix: Vec::new(),
                tail: Tail::PowerGenerator {
                    offset: offset + rest,
                },
            },
        }
    }

    /// The first `n` symbols as a word.
    pub fn window(&self, n: usize) -> Vec<u8> {
        (0..n as u64).map(|i| self.symbol(i)).collect()
    }

    /// Index of the first symbol where `self` and `other` disagree,
    /// scanning at most `horizon` indices. `None` means they agree on
    /// the whole scanned range.
    pub fn first_disagreement(&self, other: &SymbolicPoint, horizon: u64) -> Option<u64> {
        (0..horizon).find(|&i| self.symbol(i) != other.symbol(i))
    }
}

/// A point in one of the supported phase spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Point {
    /// A one-sided symbolic sequence.
    Symbolic(SymbolicPoint),
    /// A circle point `num / den` with `den == CIRCLE_DEN`, in `[0, den)`.
    Circle { num: u64, den: u64 },
    /// A point of a real interval.
    Interval(f64),
    /// A point of a product system.
    Product(Box<Point>, Box<Point>),
}

impl Point {
    /// Snap a real number in `[0, 1)` (mod 1) to the exact circle grid.
    pub fn circle_from_f64(x: f64) -> Point {
        let frac = x.rem_euclid(1.0);
        let num = ((frac * CIRCLE_DEN as f64).round() as u64) % CIRCLE_DEN;
        Point::Circle {
            num,
            den: CIRCLE_DEN,
        }
    }

    /// The symbolic payload, if this is a symbolic point.
    pub fn as_symbolic(&self) -> Option<&SymbolicPoint> {
        match self {
            Point::Symbolic(s) => Some(s),
            _ => None,
        }
    }

    /// The interval coordinate, if this is an interval point.
    pub fn as_interval(&self) -> Option<f64> {
        match self {
            Point::Interval(x) => Some(*x),
            _ => None,
        }
    }
}
