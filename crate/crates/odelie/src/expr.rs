//! Immutable expression trees over the sequence index `n` and the shifted
//! variables `u[k]` (meaning `u_{n+k}`, `k >= 0`).
//!
//! Construction goes through smart constructors that apply *local* folding
//! only: flattening of nested sums/products, exact constant arithmetic,
//! `x + 0`, `x * 1`, `x * 0`, double negation, and cancellation of
//! structurally identical terms of opposite sign. There is no canonical-form
//! simplifier; semantic equality is decided numerically by the zero test.
//!
//! Exact integer and rational constants never degrade to floating point
//! during construction. Expressions are plain values: cloning is cheap
//! enough at this scale, and everything is `Send + Sync`.

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Function names admitted by the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Log,
    Abs,
    Sqrt,
    Exp,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "log" => Func::Log,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            _ => return None,
        })
    }
}

/// A symbolic expression. `Add` and `Mul` are n-ary and kept flat.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    /// Exact integer constant.
    Integer(i64),
    /// Exact rational constant; never integral (those normalize to `Integer`).
    Rational(Rational64),
    /// The circle constant.
    Pi,
    /// The sequence index `n`.
    N,
    /// The shifted variable `u[k]`, i.e. `u_{n+k}` with `k >= 0`.
    U(usize),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}

fn rat_from_i128(num: i128, den: i128) -> Option<Rational64> {
    if den == 0 {
        return None;
    }
    let g = gcd(num, den);
    let (mut num, mut den) = if g == 0 { (0, 1) } else { (num / g, den / g) };
    if den < 0 {
        num = -num;
        den = -den;
    }
    let num = i64::try_from(num).ok()?;
    let den = i64::try_from(den).ok()?;
    Some(Rational64::new_raw(num, den))
}

/// Overflow-checked rational arithmetic; `None` means "leave it symbolic".
fn rat_add(a: Rational64, b: Rational64) -> Option<Rational64> {
    let num = (*a.numer() as i128) * (*b.denom() as i128) + (*b.numer() as i128) * (*a.denom() as i128);
    let den = (*a.denom() as i128) * (*b.denom() as i128);
    rat_from_i128(num, den)
}

fn rat_mul(a: Rational64, b: Rational64) -> Option<Rational64> {
    let num = (*a.numer() as i128) * (*b.numer() as i128);
    let den = (*a.denom() as i128) * (*b.denom() as i128);
    rat_from_i128(num, den)
}

fn rat_div(a: Rational64, b: Rational64) -> Option<Rational64> {
    if b.is_zero() {
        return None;
    }
    let num = (*a.numer() as i128) * (*b.denom() as i128);
    let den = (*a.denom() as i128) * (*b.numer() as i128);
    rat_from_i128(num, den)
}

fn rat_pow(base: Rational64, exp: u32) -> Option<Rational64> {
    let mut acc = Rational64::one();
    for _ in 0..exp {
        acc = rat_mul(acc, base)?;
    }
    Some(acc)
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Integer(v)
    }

    /// Exact ratio `num/den`. Panics if `den == 0`.
    pub fn rational(num: i64, den: i64) -> Expr {
        assert!(den != 0, "rational constant with zero denominator");
        Expr::from_rational(Rational64::new(num, den))
    }

    pub fn from_rational(r: Rational64) -> Expr {
        if r.is_integer() {
            Expr::Integer(*r.numer())
        } else {
            Expr::Rational(r)
        }
    }

    pub fn n() -> Expr {
        Expr::N
    }

    pub fn u(k: usize) -> Expr {
        Expr::U(k)
    }

    pub fn pi() -> Expr {
        Expr::Pi
    }

    /// The exact constant value of this node, if it is one.
    pub fn as_rational(&self) -> Option<Rational64> {
        match self {
            Expr::Integer(v) => Some(Rational64::from_integer(*v)),
            Expr::Rational(r) => Some(*r),
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Expr::Integer(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, Expr::Integer(0))
    }

    pub fn is_one_const(&self) -> bool {
        matches!(self, Expr::Integer(1))
    }

    /// n-ary sum with flattening, exact constant accumulation and pairwise
    /// cancellation of `t` against `Neg(t)`. The accumulated constant, when
    /// nonzero, becomes the last term.
    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(terms.len());
        for t in terms {
            match t {
                Expr::Add(ts) => flat.extend(ts),
                other => flat.push(other),
            }
        }
        let mut constant = Rational64::zero();
        let mut rest: Vec<Expr> = Vec::with_capacity(flat.len());
        for t in flat {
            if let Some(r) = t.as_rational() {
                match rat_add(constant, r) {
                    Some(c) => constant = c,
                    None => rest.push(t),
                }
            } else {
                let mut cancelled = false;
                for i in 0..rest.len() {
                    if negates(&rest[i], &t) {
                        rest.remove(i);
                        cancelled = true;
                        break;
                    }
                }
                if !cancelled {
                    rest.push(t);
                }
            }
        }
        if !constant.is_zero() || rest.is_empty() {
            rest.push(Expr::from_rational(constant));
        }
        match rest.len() {
            1 => rest.pop().unwrap(),
            _ => Expr::Add(rest),
        }
    }

    /// n-ary product. Signs of `Neg` factors are pulled out front, exact
    /// constants are folded into a single leading coefficient, and a zero
    /// factor collapses the whole product.
    pub fn mul(factors: Vec<Expr>) -> Expr {
        // Unwrapping a sign can expose another product (`Neg(Mul(...))` is
        // the canonical form of a negative product), so flattening and sign
        // stripping have to recurse together.
        fn flatten(f: Expr, flat: &mut Vec<Expr>, negative: &mut bool) {
            match f {
                Expr::Mul(fs) => {
                    for x in fs {
                        flatten(x, flat, negative);
                    }
                }
                Expr::Neg(inner) => {
                    *negative = !*negative;
                    flatten(*inner, flat, negative);
                }
                other => flat.push(other),
            }
        }
        let mut negative = false;
        let mut flat = Vec::with_capacity(factors.len());
        for f in factors {
            flatten(f, &mut flat, &mut negative);
        }
        let mut constant = Rational64::one();
        let mut rest: Vec<Expr> = Vec::with_capacity(flat.len());
        for f in flat {
            if let Some(r) = f.as_rational() {
                match rat_mul(constant, r) {
                    Some(c) => constant = c,
                    None => rest.push(f),
                }
            } else {
                rest.push(f);
            }
        }
        if constant.is_zero() {
            return Expr::Integer(0);
        }
        if constant.is_negative() {
            negative = !negative;
            constant = -constant;
        }
        let core = if rest.is_empty() {
            Expr::from_rational(constant)
        } else if constant.is_one() {
            if rest.len() == 1 {
                rest.pop().unwrap()
            } else {
                Expr::Mul(rest)
            }
        } else {
            let mut out = Vec::with_capacity(rest.len() + 1);
            out.push(Expr::from_rational(constant));
            out.extend(rest);
            Expr::Mul(out)
        };
        if negative {
            Expr::neg(core)
        } else {
            core
        }
    }

    pub fn neg(e: Expr) -> Expr {
        match e {
            Expr::Integer(v) => match v.checked_neg() {
                Some(w) => Expr::Integer(w),
                None => Expr::Neg(Box::new(Expr::Integer(v))),
            },
            Expr::Rational(r) => Expr::Rational(-r),
            Expr::Neg(inner) => *inner,
            Expr::Add(ts) => Expr::add(ts.into_iter().map(Expr::neg).collect()),
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::add(vec![a, Expr::neg(b)])
    }

    /// Quotient. Signs are pulled out of both operands; a constant quotient
    /// of constants folds exactly; `x / 1` folds to `x`.
    pub fn div(a: Expr, b: Expr) -> Expr {
        let (mut negative, a) = strip_sign(a);
        let (neg_b, b) = strip_sign(b);
        if neg_b {
            negative = !negative;
        }
        if b.is_one_const() {
            return if negative { Expr::neg(a) } else { a };
        }
        if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
            if let Some(q) = rat_div(x, y) {
                let q = Expr::from_rational(q);
                return if negative { Expr::neg(q) } else { q };
            }
        }
        let core = Expr::Div(Box::new(a), Box::new(b));
        if negative {
            Expr::neg(core)
        } else {
            core
        }
    }

    /// Power. Folds `x^1` and exact constant bases raised to small
    /// non-negative integer exponents.
    pub fn pow(base: Expr, exp: Expr) -> Expr {
        if exp.is_one_const() {
            return base;
        }
        if let (Some(b), Some(k)) = (base.as_rational(), exp.as_integer()) {
            if (0..=16).contains(&k) {
                if let Some(r) = rat_pow(b, k as u32) {
                    return Expr::from_rational(r);
                }
            }
        }
        Expr::Pow(Box::new(base), Box::new(exp))
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    pub fn sin(e: Expr) -> Expr {
        Expr::call(Func::Sin, e)
    }

    pub fn cos(e: Expr) -> Expr {
        Expr::call(Func::Cos, e)
    }

    pub fn log(e: Expr) -> Expr {
        Expr::call(Func::Log, e)
    }

    pub fn abs(e: Expr) -> Expr {
        Expr::call(Func::Abs, e)
    }

    pub fn sqrt(e: Expr) -> Expr {
        Expr::call(Func::Sqrt, e)
    }

    pub fn exp(e: Expr) -> Expr {
        Expr::call(Func::Exp, e)
    }

    /// Largest `k` such that `u[k]` occurs, or `None` for u-free expressions.
    pub fn max_index(&self) -> Option<usize> {
        match self {
            Expr::Integer(_) | Expr::Rational(_) | Expr::Pi | Expr::N => None,
            Expr::U(k) => Some(*k),
            Expr::Add(ts) | Expr::Mul(ts) => ts.iter().filter_map(|t| t.max_index()).max(),
            Expr::Neg(e) | Expr::Call(_, e) => e.max_index(),
            Expr::Div(a, b) | Expr::Pow(a, b) => a.max_index().into_iter().chain(b.max_index()).max(),
        }
    }

    pub fn contains_n(&self) -> bool {
        match self {
            Expr::N => true,
            Expr::Integer(_) | Expr::Rational(_) | Expr::Pi | Expr::U(_) => false,
            Expr::Add(ts) | Expr::Mul(ts) => ts.iter().any(Expr::contains_n),
            Expr::Neg(e) | Expr::Call(_, e) => e.contains_n(),
            Expr::Div(a, b) | Expr::Pow(a, b) => a.contains_n() || b.contains_n(),
        }
    }

    /// Forward shift: `n -> n + k` and `u[j] -> u[j + k]`. Shifting commutes
    /// with evaluation along any orbit by construction.
    pub fn shift(&self, k: usize) -> Expr {
        if k == 0 {
            return self.clone();
        }
        self.shift_n_u(k as i64, k)
    }

    /// Shift only the index: `n -> n + d`, leaving `u[j]` untouched. Intended
    /// for u-free coefficient functions, where negative offsets are needed.
    pub fn shift_n(&self, d: i64) -> Expr {
        self.shift_n_u(d, 0)
    }

    fn shift_n_u(&self, dn: i64, du: usize) -> Expr {
        match self {
            Expr::Integer(_) | Expr::Rational(_) | Expr::Pi => self.clone(),
            Expr::N => {
                if dn == 0 {
                    Expr::N
                } else {
                    Expr::add(vec![Expr::N, Expr::Integer(dn)])
                }
            }
            Expr::U(j) => Expr::U(j + du),
            Expr::Add(ts) => Expr::add(ts.iter().map(|t| t.shift_n_u(dn, du)).collect()),
            Expr::Mul(ts) => Expr::mul(ts.iter().map(|t| t.shift_n_u(dn, du)).collect()),
            Expr::Neg(e) => Expr::neg(e.shift_n_u(dn, du)),
            Expr::Div(a, b) => Expr::div(a.shift_n_u(dn, du), b.shift_n_u(dn, du)),
            Expr::Pow(a, b) => Expr::pow(a.shift_n_u(dn, du), b.shift_n_u(dn, du)),
            Expr::Call(f, e) => Expr::call(*f, e.shift_n_u(dn, du)),
        }
    }

    /// Replace every occurrence of `u[k]` by `replacement`, rebuilding the
    /// tree through the folding constructors.
    pub fn substitute(&self, k: usize, replacement: &Expr) -> Expr {
        match self {
            Expr::Integer(_) | Expr::Rational(_) | Expr::Pi | Expr::N => self.clone(),
            Expr::U(j) => {
                if *j == k {
                    replacement.clone()
                } else {
                    self.clone()
                }
            }
            Expr::Add(ts) => Expr::add(ts.iter().map(|t| t.substitute(k, replacement)).collect()),
            Expr::Mul(ts) => Expr::mul(ts.iter().map(|t| t.substitute(k, replacement)).collect()),
            Expr::Neg(e) => Expr::neg(e.substitute(k, replacement)),
            Expr::Div(a, b) => Expr::div(a.substitute(k, replacement), b.substitute(k, replacement)),
            Expr::Pow(a, b) => Expr::pow(a.substitute(k, replacement), b.substitute(k, replacement)),
            Expr::Call(f, e) => Expr::call(*f, e.substitute(k, replacement)),
        }
    }
}

fn strip_sign(e: Expr) -> (bool, Expr) {
    match e {
        Expr::Neg(inner) => (true, *inner),
        Expr::Integer(v) if v < 0 => match v.checked_neg() {
            Some(w) => (true, Expr::Integer(w)),
            None => (false, Expr::Integer(v)),
        },
        Expr::Rational(r) if r.is_negative() => (true, Expr::Rational(-r)),
        other => (false, other),
    }
}

/// True when one argument is exactly the negation of the other.
fn negates(a: &Expr, b: &Expr) -> bool {
    match (a, b) {
        (Expr::Neg(x), y) => x.as_ref() == y,
        (x, Expr::Neg(y)) => x == y.as_ref(),
        _ => false,
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(vec![self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(vec![self, rhs])
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::div(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

// Printing. The output reparses to a structurally equal tree: every node is
// written at a precedence context that the parser maps back to the same
// shape, given that the constructors canonicalize signs and constants.

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    /// Top level or inside parentheses.
    Sum,
    /// Operand position of `*` or `/` (left side).
    Product,
    /// Right operand of `*` or `/`, or a lone factor.
    Factor,
    /// Base or exponent of `^`.
    Atom,
}

impl Expr {
    fn needs_parens(&self, ctx: Ctx) -> bool {
        match self {
            Expr::Add(_) => ctx != Ctx::Sum,
            Expr::Mul(_) => matches!(ctx, Ctx::Factor | Ctx::Atom),
            Expr::Div(_, _) => matches!(ctx, Ctx::Factor | Ctx::Atom),
            Expr::Neg(inner) => match ctx {
                // A leading minus reparses correctly at sum and product
                // level except around `^`, which binds tighter.
                Ctx::Sum | Ctx::Product | Ctx::Factor => matches!(inner.as_ref(), Expr::Pow(_, _)),
                Ctx::Atom => true,
            },
            Expr::Integer(v) => ctx == Ctx::Atom && *v < 0,
            // A rational's own `/` would reparse as a division operator when
            // it stands right of `*` or `/`: u[3]/(2/7) is not u[3]/2/7.
            Expr::Rational(_) => matches!(ctx, Ctx::Atom | Ctx::Factor),
            // `^` parses right-associatively, so a power appearing as the
            // base of another power must keep its own parentheses:
            // (a^3)^2 without them would reparse as a^(3^2).
            Expr::Pow(_, _) => ctx == Ctx::Atom,
            _ => false,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, ctx: Ctx) -> fmt::Result {
        if self.needs_parens(ctx) {
            write!(f, "(")?;
            self.write(f, Ctx::Sum)?;
            return write!(f, ")");
        }
        match self {
            Expr::Integer(v) => write!(f, "{v}"),
            Expr::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Expr::Pi => write!(f, "pi"),
            Expr::N => write!(f, "n"),
            Expr::U(k) => write!(f, "u[{k}]"),
            Expr::Add(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i == 0 {
                        t.write(f, Ctx::Sum)?;
                        continue;
                    }
                    match t {
                        Expr::Neg(inner) => {
                            write!(f, "-")?;
                            inner.write(f, Ctx::Product)?;
                        }
                        Expr::Integer(v) if *v < 0 => write!(f, "-{}", v.unsigned_abs())?,
                        Expr::Rational(r) if r.is_negative() => {
                            write!(f, "-{}/{}", r.numer().unsigned_abs(), r.denom())?
                        }
                        _ => {
                            write!(f, "+")?;
                            t.write(f, Ctx::Product)?;
                        }
                    }
                }
                Ok(())
            }
            Expr::Mul(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    t.write(f, if i == 0 { Ctx::Product } else { Ctx::Factor })?;
                }
                Ok(())
            }
            Expr::Neg(inner) => {
                write!(f, "-")?;
                inner.write(f, Ctx::Factor)
            }
            Expr::Div(a, b) => {
                a.write(f, Ctx::Product)?;
                write!(f, "/")?;
                b.write(f, Ctx::Factor)
            }
            Expr::Pow(a, b) => {
                a.write(f, Ctx::Atom)?;
                write!(f, "^")?;
                b.write(f, Ctx::Atom)
            }
            Expr::Call(func, arg) => {
                write!(f, "{}(", func.name())?;
                arg.write(f, Ctx::Sum)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, Ctx::Sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_folding_is_exact() {
        assert_eq!(Expr::add(vec![Expr::int(2), Expr::int(3)]), Expr::int(5));
        assert_eq!(
            Expr::div(Expr::int(1), Expr::int(3)),
            Expr::Rational(Rational64::new(1, 3))
        );
        assert_eq!(Expr::rational(4, 2), Expr::int(2));
        assert_eq!(
            Expr::mul(vec![Expr::rational(1, 3), Expr::int(3)]),
            Expr::int(1)
        );
        // A zero factor collapses the product even next to a singular term.
        let singular = Expr::div(Expr::int(1), Expr::int(0) * Expr::u(0));
        assert_eq!(singular * Expr::int(0), Expr::int(0));
    }

    #[test]
    fn additive_identities_fold() {
        let x = Expr::u(0);
        assert_eq!(x.clone() + Expr::int(0), x.clone());
        assert_eq!(x.clone() * Expr::int(1), x.clone());
        assert_eq!(x.clone() - x.clone(), Expr::int(0));
        let t = Expr::u(1) * Expr::n();
        assert_eq!(t.clone() - t.clone(), Expr::int(0));
    }

    #[test]
    fn negation_normalizes() {
        let x = Expr::u(0);
        assert_eq!(-(-x.clone()), x.clone());
        assert_eq!(-Expr::int(3), Expr::int(-3));
        // Signs pull out of products and quotients.
        let m = Expr::mul(vec![Expr::int(-2), x.clone()]);
        assert_eq!(m, Expr::neg(Expr::int(2) * x.clone()));
        let d = Expr::div(Expr::neg(Expr::u(1)), Expr::neg(Expr::u(2)));
        assert_eq!(d, Expr::div(Expr::u(1), Expr::u(2)));
    }

    #[test]
    fn shift_moves_index_and_variables() {
        let e = Expr::n() * Expr::u(0);
        let s = e.shift(2);
        assert_eq!(s, Expr::add(vec![Expr::n(), Expr::int(2)]) * Expr::u(2));
        assert_eq!(e.shift(0), e);
    }

    #[test]
    fn shift_n_leaves_variables_alone() {
        let k = Expr::add(vec![Expr::n(), Expr::int(3)]);
        assert_eq!(k.shift_n(-2), Expr::add(vec![Expr::n(), Expr::int(1)]));
        assert_eq!(k.shift_n(-3), Expr::n());
    }

    #[test]
    fn substitute_replaces_and_refolds() {
        let e = Expr::u(4) - Expr::u(0);
        assert_eq!(e.substitute(4, &Expr::u(0)), Expr::int(0));
        let e = Expr::u(1) * Expr::u(0);
        assert_eq!(e.substitute(2, &Expr::int(7)), e);
    }

    #[test]
    fn max_index_tracks_deepest_variable() {
        assert_eq!(Expr::n().max_index(), None);
        assert_eq!(Expr::u(3).max_index(), Some(3));
        let e = Expr::u(1) + Expr::sin(Expr::u(4)) / Expr::u(2);
        assert_eq!(e.max_index(), Some(4));
    }

    #[test]
    fn display_is_readable() {
        let e = Expr::add(vec![
            Expr::u(0),
            Expr::neg(Expr::u(1)),
            Expr::int(1),
        ]);
        assert_eq!(e.to_string(), "u[0]-u[1]+1");
        let p = Expr::pow(Expr::int(-1), Expr::n());
        assert_eq!(p.to_string(), "(-1)^n");
        let q = Expr::mul(vec![Expr::rational(1, 3), Expr::n(), Expr::u(0)]);
        assert_eq!(q.to_string(), "1/3*n*u[0]");
    }
}
