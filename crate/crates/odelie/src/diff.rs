//! Partial differentiation with respect to a shifted variable `u[k]`.
//!
//! The result is built through the folding constructors, so vanishing
//! branches drop out structurally — differentiating an expression that does
//! not mention `u[k]` yields the literal zero. The derivative of `abs` is
//! `g/abs(g)` (sign away from zero); evaluating it at zero is an
//! evaluation-time error, matching the convention of the evaluator.

use crate::expr::{Expr, Func};

/// d/du[k] of `e`.
pub fn diff(e: &Expr, k: usize) -> Expr {
    match e {
        Expr::Integer(_) | Expr::Rational(_) | Expr::Pi | Expr::N => Expr::int(0),
        Expr::U(j) => Expr::int(if *j == k { 1 } else { 0 }),
        Expr::Add(ts) => Expr::add(ts.iter().map(|t| diff(t, k)).collect()),
        Expr::Mul(ts) => {
            let mut terms = Vec::with_capacity(ts.len());
            for i in 0..ts.len() {
                let mut factors = Vec::with_capacity(ts.len());
                for (j, t) in ts.iter().enumerate() {
                    if i == j {
                        factors.push(diff(t, k));
                    } else {
                        factors.push(t.clone());
                    }
                }
                terms.push(Expr::mul(factors));
            }
            Expr::add(terms)
        }
        Expr::Neg(inner) => Expr::neg(diff(inner, k)),
        Expr::Div(a, b) => {
            let da = diff(a, k);
            let db = diff(b, k);
            let num = Expr::sub(
                Expr::mul(vec![da, (**b).clone()]),
                Expr::mul(vec![(**a).clone(), db]),
            );
            Expr::div(num, Expr::pow((**b).clone(), Expr::int(2)))
        }
        Expr::Pow(base, exp) => {
            let db = diff(base, k);
            match exp.as_rational() {
                // Constant exponent: r * base^(r-1) * base'. This path keeps
                // negative bases legal for integer exponents.
                Some(r) => {
                    let reduced = Expr::pow(
                        (**base).clone(),
                        Expr::from_rational(r - num_rational::Rational64::from_integer(1)),
                    );
                    Expr::mul(vec![Expr::from_rational(r), reduced, db])
                }
                None => {
                    let de = diff(exp, k);
                    // base^exp * (exp' * log(base) + exp * base' / base);
                    // vanishing pieces fold away before they can hurt.
                    let log_term = Expr::mul(vec![de, Expr::log((**base).clone())]);
                    let pow_term = Expr::div(
                        Expr::mul(vec![(**exp).clone(), db]),
                        (**base).clone(),
                    );
                    Expr::mul(vec![e.clone(), Expr::add(vec![log_term, pow_term])])
                }
            }
        }
        Expr::Call(f, arg) => {
            let dg = diff(arg, k);
            if dg.is_zero_const() {
                return Expr::int(0);
            }
            let g = (**arg).clone();
            let outer = match f {
                Func::Sin => Expr::cos(g),
                Func::Cos => Expr::neg(Expr::sin(g)),
                Func::Exp => Expr::exp(g),
                Func::Log => return Expr::div(dg, g),
                Func::Sqrt => {
                    return Expr::div(dg, Expr::mul(vec![Expr::int(2), Expr::sqrt(g)]))
                }
                Func::Abs => Expr::div(g.clone(), Expr::abs(g)),
            };
            Expr::mul(vec![outer, dg])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval, Point};
    use crate::parse::parse;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn absent_variable_differentiates_to_literal_zero() {
        let e = parse("n*u[1]+sin(u[2])").unwrap();
        assert_eq!(diff(&e, 0), Expr::int(0));
    }

    #[test]
    fn polynomial_rules() {
        let e = parse("u[0]^2").unwrap();
        assert_eq!(diff(&e, 0), Expr::int(2) * Expr::u(0));
        let e = parse("u[0]*u[1]").unwrap();
        assert_eq!(diff(&e, 1), Expr::u(0));
    }

    // Independent oracle: central finite differences at random safe points.
    fn check_against_finite_differences(src: &str, k: usize) {
        let e = parse(src).unwrap();
        let d = diff(&e, k);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 20 && attempts < 500 {
            attempts += 1;
            let n = rng.gen_range(2..40i64);
            let u: Vec<f64> = (0..4).map(|_| rng.gen_range(0.15..0.85)).collect();
            let p = Point::new(n, u.clone());
            let h = 1e-6;
            let mut up = u.clone();
            up[k] += h;
            let mut um = u.clone();
            um[k] -= h;
            let (f_p, f_m, d_val) = match (
                eval(&e, &Point::new(n, up)),
                eval(&e, &Point::new(n, um)),
                eval(&d, &p),
            ) {
                (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                _ => continue,
            };
            let fd = (f_p - f_m) / (2.0 * h);
            let tol = 1e-5 * (1.0 + fd.abs());
            assert!(
                (d_val - fd).abs() <= tol,
                "derivative of {src} w.r.t. u[{k}] at {p:?}: symbolic {d_val}, numeric {fd}"
            );
            checked += 1;
        }
        assert!(checked >= 20, "not enough safe sample points for {src}");
    }

    #[test]
    fn matches_finite_differences_on_rational_map() {
        check_against_finite_differences("(u[1]+u[0])/(u[0]*u[1]+1)", 0);
        check_against_finite_differences("(u[1]+u[0])/(u[0]*u[1]+1)", 1);
    }

    #[test]
    fn matches_finite_differences_on_transcendentals() {
        check_against_finite_differences("log(abs((1-u[0])/(1+u[0])))*(u[0]^2-1)", 0);
        check_against_finite_differences("sqrt(u[2])*exp(u[0])", 2);
        check_against_finite_differences("sin(n*pi/2)*u[3]^3", 3);
        check_against_finite_differences("u[0]^(n/7)", 0);
    }
}
