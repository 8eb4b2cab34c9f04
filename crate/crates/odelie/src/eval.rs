//! Numeric evaluation of expressions at a point `(n, u[0..=m])`.
//!
//! Evaluation is strict about domains: division by zero, `log` of a
//! non-positive value, `sqrt` of a negative value, a power with non-positive
//! base and non-integer exponent, and any non-finite intermediate all raise
//! an error instead of propagating NaN or infinity. `(-1)^n` and friends are
//! well-defined because an exponent that is integral *at the point* takes
//! the integer-power path, which handles negative bases by parity.

use crate::expr::{Expr, Func};
use thiserror::Error;

/// A sample point: the integer index `n` plus values for `u[0]..u[m]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub n: i64,
    pub u: Vec<f64>,
}

impl Point {
    pub fn new(n: i64, u: Vec<f64>) -> Point {
        Point { n, u }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("non-finite value while evaluating {op}")]
    NonFinite { op: &'static str },
    #[error("expression needs u[{needed}] but the point only provides {got} values")]
    PointTooShort { needed: usize, got: usize },
}

/// Evaluate `e` at `p`.
pub fn eval(e: &Expr, p: &Point) -> Result<f64, EvalError> {
    let mut scale = 0.0;
    eval_node(e, p, &mut scale)
}

/// Evaluate `e` at `p`, also returning the largest absolute value taken by
/// any subexpression. That magnitude is the natural yardstick for deciding
/// whether a residual is "zero up to cancellation noise".
pub fn eval_scaled(e: &Expr, p: &Point) -> Result<(f64, f64), EvalError> {
    let mut scale = 0.0;
    let v = eval_node(e, p, &mut scale)?;
    Ok((v, scale))
}

fn finite(v: f64, op: &'static str, scale: &mut f64) -> Result<f64, EvalError> {
    if !v.is_finite() {
        return Err(EvalError::NonFinite { op });
    }
    if v.abs() > *scale {
        *scale = v.abs();
    }
    Ok(v)
}

fn eval_node(e: &Expr, p: &Point, scale: &mut f64) -> Result<f64, EvalError> {
    match e {
        Expr::Integer(v) => finite(*v as f64, "integer", scale),
        Expr::Rational(r) => finite(*r.numer() as f64 / *r.denom() as f64, "rational", scale),
        Expr::Pi => finite(std::f64::consts::PI, "pi", scale),
        Expr::N => finite(p.n as f64, "n", scale),
        Expr::U(k) => {
            let v = *p.u.get(*k).ok_or(EvalError::PointTooShort {
                needed: *k,
                got: p.u.len(),
            })?;
            finite(v, "u", scale)
        }
        Expr::Add(ts) => {
            let mut acc = 0.0;
            for t in ts {
                acc += eval_node(t, p, scale)?;
            }
            finite(acc, "sum", scale)
        }
        Expr::Mul(ts) => {
            let mut acc = 1.0;
            for t in ts {
                acc *= eval_node(t, p, scale)?;
            }
            finite(acc, "product", scale)
        }
        Expr::Neg(inner) => {
            let v = eval_node(inner, p, scale)?;
            finite(-v, "negation", scale)
        }
        Expr::Div(a, b) => {
            let num = eval_node(a, p, scale)?;
            let den = eval_node(b, p, scale)?;
            if den == 0.0 {
                return Err(EvalError::NonFinite { op: "division" });
            }
            finite(num / den, "division", scale)
        }
        Expr::Pow(a, b) => {
            let base = eval_node(a, p, scale)?;
            let exp = eval_node(b, p, scale)?;
            let v = if exp.fract() == 0.0 && exp.abs() <= i32::MAX as f64 {
                if base == 0.0 && exp < 0.0 {
                    return Err(EvalError::NonFinite { op: "power" });
                }
                base.powi(exp as i32)
            } else if base > 0.0 {
                base.powf(exp)
            } else if base == 0.0 && exp > 0.0 {
                0.0
            } else {
                // Negative base with a non-integer exponent has no real value.
                return Err(EvalError::NonFinite { op: "power" });
            };
            finite(v, "power", scale)
        }
        Expr::Call(f, arg) => {
            let x = eval_node(arg, p, scale)?;
            let v = match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Abs => x.abs(),
                Func::Log => {
                    if x <= 0.0 {
                        return Err(EvalError::NonFinite { op: "log" });
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(EvalError::NonFinite { op: "sqrt" });
                    }
                    x.sqrt()
                }
            };
            finite(v, f.name(), scale)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn at(src: &str, n: i64, u: &[f64]) -> Result<f64, EvalError> {
        eval(&parse(src).unwrap(), &Point::new(n, u.to_vec()))
    }

    #[test]
    fn alternating_sign_uses_parity() {
        assert_eq!(at("(-1)^n", 7, &[]).unwrap(), -1.0);
        assert_eq!(at("(-1)^n", 10, &[]).unwrap(), 1.0);
        assert_eq!(at("(-1)^(n+1)", 7, &[]).unwrap(), 1.0);
    }

    #[test]
    fn decimation_coefficient_at_small_index() {
        // n/(n+4) * u0 at n = 1, u0 = 5 is exactly 1.
        assert_eq!(at("n/(n+4)*u[0]", 1, &[5.0]).unwrap(), 1.0);
    }

    #[test]
    fn domain_violations_are_errors() {
        assert_eq!(
            at("1/(u[0]-u[0])", 3, &[0.5]),
            Err(EvalError::NonFinite { op: "division" })
        );
        assert!(matches!(
            at("log(u[0])", 3, &[-0.5]),
            Err(EvalError::NonFinite { op: "log" })
        ));
        assert!(matches!(
            at("sqrt(u[0])", 3, &[-0.5]),
            Err(EvalError::NonFinite { op: "sqrt" })
        ));
        assert!(matches!(
            at("u[0]^(1/2)", 3, &[-0.5]),
            Err(EvalError::NonFinite { op: "power" })
        ));
    }

    #[test]
    fn short_point_is_reported() {
        assert_eq!(
            at("u[3]", 0, &[1.0, 2.0]),
            Err(EvalError::PointTooShort { needed: 3, got: 2 })
        );
    }

    #[test]
    fn scale_tracks_largest_intermediate() {
        // sqrt(n^2) - n has a tiny value but an O(n^2) intermediate; the
        // sqrt keeps the sum from being folded away symbolically.
        let e = parse("sqrt(n^2)-n").unwrap();
        let (v, scale) = eval_scaled(&e, &Point::new(1000, vec![])).unwrap();
        assert_eq!(v, 0.0);
        assert!(scale >= 1_000_000.0);
    }

    #[test]
    fn golden_ratio_power_evaluates() {
        let v = at("((1+sqrt(5))/2)^n", 4, &[]).unwrap();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((v - phi.powi(4)).abs() < 1e-12);
        // The conjugate root has a negative base but an integer exponent.
        let w = at("((1-sqrt(5))/2)^n", 3, &[]).unwrap();
        let psi = (1.0 - 5.0f64.sqrt()) / 2.0;
        assert!((w - psi.powi(3)).abs() < 1e-12);
    }
}
