//! A small catalog of ready-made systems used throughout the crate and by
//! the command-line front end.

use crate::error::{CoreError, Result};
use crate::systems::{
    Expr, GeneratorRule, IntervalMapSpec, IntervalPiece, SymbolicMetric, SystemSpec, CIRCLE_DEN,
};

/// The full shift on `k` symbols with the default metric.
pub fn full_shift(k: usize) -> SystemSpec {
    SystemSpec::FullShift {
        alphabet: k,
        metric: SymbolicMetric::default(),
    }
}

/// The full shift on `k` symbols with metric base `base`.
pub fn full_shift_with_base(k: usize, base: f64) -> SystemSpec {
    SystemSpec::FullShift {
        alphabet: k,
        metric: SymbolicMetric { base },
    }
}

/// The golden-mean shift: binary sequences with no two consecutive ones.
pub fn golden_mean_sft() -> SystemSpec {
    SystemSpec::SftShift {
        alphabet: 2,
        transition: vec![vec![1, 1], vec![1, 0]],
        metric: SymbolicMetric::default(),
    }
}

/// The orbit closure of the indicator of the powers of two: a transitive
/// subshift whose points have ones of density zero.
pub fn density_zero_subshift() -> SystemSpec {
    SystemSpec::OrbitClosureShift {
        generator: GeneratorRule::PowerIndicator,
        metric: SymbolicMetric::default(),
    }
}

/// The same subshift with a custom metric base.
pub fn density_zero_subshift_with_base(base: f64) -> SystemSpec {
    SystemSpec::OrbitClosureShift {
        generator: GeneratorRule::PowerIndicator,
        metric: SymbolicMetric { base },
    }
}

/// Rotation of the circle by `alpha` (snapped to the exact grid).
pub fn rotation(alpha: f64) -> SystemSpec {
    let frac = alpha.rem_euclid(1.0);
    SystemSpec::Rotation {
        num: ((frac * CIRCLE_DEN as f64).round() as u64) % CIRCLE_DEN,
        den: CIRCLE_DEN,
    }
}

/// Rotation by the golden mean `(sqrt(5) - 1) / 2`.
pub fn golden_rotation() -> SystemSpec {
    rotation((5.0f64.sqrt() - 1.0) / 2.0)
}

/// The full tent map on `[0, 1]`.
pub fn tent_map() -> SystemSpec {
    SystemSpec::IntervalMap {
        map: IntervalMapSpec {
            name: "tent".to_string(),
            lo: 0.0,
            hi: 1.0,
            pieces: vec![IntervalPiece {
                lo: 0.0,
                hi: 1.0,
                formula: Expr::parse("1 - abs(1 - 2*x)").unwrap(),
            }],
            tol: 1e-9,
        },
    }
}

/// The halving map `x -> x / 2` on `[0, 1]`.
pub fn halving_map() -> SystemSpec {
    SystemSpec::IntervalMap {
        map: IntervalMapSpec {
            name: "halving".to_string(),
            lo: 0.0,
            hi: 1.0,
            pieces: vec![IntervalPiece {
                lo: 0.0,
                hi: 1.0,
                formula: Expr::parse("x / 2").unwrap(),
            }],
            tol: 1e-9,
        },
    }
}

/// The logistic map `x -> r x (1 - x)` on `[0, 1]`.
pub fn logistic_map(r: f64) -> SystemSpec {
    SystemSpec::IntervalMap {
        map: IntervalMapSpec {
            name: format!("logistic({r})"),
            lo: 0.0,
            hi: 1.0,
            pieces: vec![IntervalPiece {
                lo: 0.0,
                hi: 1.0,
                formula: Expr::parse(&format!("{r} * x * (1 - x)")).unwrap(),
            }],
            tol: 1e-9,
        },
    }
}

/// An interval map from a formula string on `[0, 1]`.
pub fn interval_map_from_formula(name: &str, formula: &str) -> Result<SystemSpec> {
    Ok(SystemSpec::IntervalMap {
        map: IntervalMapSpec {
            name: name.to_string(),
            lo: 0.0,
            hi: 1.0,
            pieces: vec![IntervalPiece {
                lo: 0.0,
                hi: 1.0,
                formula: Expr::parse(formula)?,
            }],
            tol: 1e-9,
        },
    })
}

/// Look up a system by name. Accepts `full_shift(k)`, `golden_mean_sft`,
/// `density_zero_subshift`, `rotation(alpha)`, `golden_rotation`, `tent`,
/// `halving`, and `logistic(r)`.
pub fn zoo(name: &str) -> Result<SystemSpec> {
    let name = name.trim();
    if let Some(arg) = parse_call(name, "full_shift") {
        let k: usize = arg
            .parse()
            .map_err(|_| CoreError::Parse(format!("bad alphabet size {arg:?}")))?;
        if k < 2 {
            return Err(CoreError::InvalidParams("alphabet must have >= 2 symbols".into()));
        }
        return Ok(full_shift(k));
    }
    if let Some(arg) = parse_call(name, "rotation") {
        let a: f64 = arg
            .parse()
            .map_err(|_| CoreError::Parse(format!("bad rotation angle {arg:?}")))?;
        return Ok(rotation(a));
    }
    if let Some(arg) = parse_call(name, "logistic") {
        let r: f64 = arg
            .parse()
            .map_err(|_| CoreError::Parse(format!("bad logistic parameter {arg:?}")))?;
        return Ok(logistic_map(r));
    }
    match name {
        "golden_mean_sft" => Ok(golden_mean_sft()),
        "density_zero_subshift" => Ok(density_zero_subshift()),
        "golden_rotation" => Ok(golden_rotation()),
        "tent" => Ok(tent_map()),
        "halving" => Ok(halving_map()),
        other => Err(CoreError::UnknownSystem(other.to_string())),
    }
}

/// Names accepted by [`zoo`].
pub fn zoo_catalog() -> Vec<&'static str> {
    vec![
        "full_shift(k)",
        "golden_mean_sft",
        "density_zero_subshift",
        "rotation(alpha)",
        "golden_rotation",
        "tent",
        "halving",
        "logistic(r)",
    ]
}

fn parse_call<'a>(name: &'a str, head: &str) -> Option<&'a str> {
    name.strip_prefix(head)?
        .strip_prefix('(')?
        .strip_suffix(')')
}
