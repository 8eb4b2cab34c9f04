//! Ordinary difference equations `u[N] = omega(n, u[0], ..., u[N-1])` of
//! order 2 to 4, their sampling domains, and orbit iteration.

use crate::diff::diff;
use crate::eval::{eval, EvalError, Point};
use crate::expr::Expr;
use crate::zerotest::{is_zero, Domain, Sampler, ZeroTestConfig, ZeroVerdict};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EquationError {
    #[error("order must be between 2 and 4, got {0}")]
    UnsupportedOrder(usize),
    #[error("right-hand side references u[{index}] but the order is {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("right-hand side does not depend on u[0]; reduce the order instead")]
    DegenerateOmega,
    #[error("orbit left the finite domain at step {step}")]
    NonFiniteAtStep { step: usize },
    #[error("initial data needs {needed} values, got {got}")]
    BadInitialData { needed: usize, got: usize },
    #[error("could not parse right-hand side: {0}")]
    BadFormula(#[from] crate::parse::ParseError),
}

/// A difference equation `u[order] = omega`, with the sampling region used
/// by its probabilistic checks.
#[derive(Clone, Debug)]
pub struct DifferenceEquation {
    pub name: String,
    pub order: usize,
    pub omega: Expr,
    pub domain: Domain,
}

/// Serialized form: the right-hand side is kept as a formula string.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EquationSpec {
    pub name: String,
    pub order: usize,
    pub omega: String,
    #[serde(default)]
    pub domain: Option<Domain>,
}

impl DifferenceEquation {
    pub fn new(
        name: &str,
        order: usize,
        omega: Expr,
        domain: Domain,
    ) -> Result<DifferenceEquation, EquationError> {
        if !(2..=4).contains(&order) {
            return Err(EquationError::UnsupportedOrder(order));
        }
        if let Some(m) = omega.max_index() {
            if m >= order {
                return Err(EquationError::IndexOutOfRange { index: m, order });
            }
        }
        let eq = DifferenceEquation {
            name: name.to_string(),
            order,
            omega,
            domain,
        };
        // The map must genuinely involve u[0], otherwise it is a lower-order
        // equation in disguise and the shift structure below breaks down.
        let d0 = diff(&eq.omega, 0);
        let mut cfg = eq.zero_config();
        cfg.min_finite = 10;
        if is_zero(&d0, &cfg).verdict != ZeroVerdict::NonZero {
            return Err(EquationError::DegenerateOmega);
        }
        Ok(eq)
    }

    pub fn from_spec(spec: &EquationSpec) -> Result<DifferenceEquation, EquationError> {
        let omega = crate::parse::parse(&spec.omega)?;
        DifferenceEquation::new(
            &spec.name,
            spec.order,
            omega,
            spec.domain.clone().unwrap_or_default(),
        )
    }

    pub fn to_spec(&self) -> EquationSpec {
        EquationSpec {
            name: self.name.clone(),
            order: self.order,
            omega: self.omega.to_string(),
            domain: Some(self.domain.clone()),
        }
    }

    /// Zero-test configuration using this equation's sampling domain.
    pub fn zero_config(&self) -> ZeroTestConfig {
        ZeroTestConfig::with_domain(self.domain.clone())
    }

    /// Partial derivative of the right-hand side with respect to `u[k]`.
    pub fn omega_wrt(&self, k: usize) -> Expr {
        diff(&self.omega, k)
    }

    /// Rewrite an expression so it only involves `u[0]..u[order-1]`, by
    /// repeatedly replacing the highest shifted variable `u[m]` (`m >= order`)
    /// with the correspondingly shifted right-hand side.
    pub fn close_onshell(&self, e: &Expr) -> Expr {
        let mut cur = e.clone();
        while let Some(m) = cur.max_index() {
            if m < self.order {
                break;
            }
            let replacement = self.omega.shift(m - self.order);
            cur = cur.substitute(m, &replacement);
        }
        cur
    }

    /// Random on-shell sample points with `order` coordinates.
    pub fn sample_onshell(&self, count: usize, seed: u64) -> Vec<Point> {
        let mut sampler = Sampler::new(self.domain.clone(), seed);
        (0..count).map(|_| sampler.draw_point(self.order)).collect()
    }
}

/// A finite stretch of a solution: `values[k]` is `u(n0 + k)`.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub n0: i64,
    pub order: usize,
    pub values: Vec<f64>,
}

impl Orbit {
    /// The phase-space point `(n0 + k, u(n0+k), ..., u(n0+k+order-1))`.
    /// `None` once the window would run off the end of the stored values.
    pub fn point(&self, k: usize) -> Option<Point> {
        if k + self.order > self.values.len() {
            return None;
        }
        Some(Point::new(
            self.n0 + k as i64,
            self.values[k..k + self.order].to_vec(),
        ))
    }

    pub fn steps(&self) -> usize {
        self.values.len().saturating_sub(self.order)
    }
}

/// Iterate the equation forward from `order` initial values at base index
/// `n0`, producing `steps` new values.
pub fn iterate_orbit(
    eq: &DifferenceEquation,
    initial: &[f64],
    n0: i64,
    steps: usize,
) -> Result<Orbit, EquationError> {
    if initial.len() != eq.order {
        return Err(EquationError::BadInitialData {
            needed: eq.order,
            got: initial.len(),
        });
    }
    let mut values = initial.to_vec();
    for step in 0..steps {
        let p = Point::new(n0 + step as i64, values[step..step + eq.order].to_vec());
        let next = match eval(&eq.omega, &p) {
            Ok(v) if v.is_finite() => v,
            _ => return Err(EquationError::NonFiniteAtStep { step }),
        };
        values.push(next);
    }
    Ok(Orbit {
        n0,
        order: eq.order,
        values,
    })
}

/// Deterministic initial data for drift and flow tests: `count` orbits drawn
/// from the equation's own domain.
pub fn seed_orbits(eq: &DifferenceEquation, count: usize, seed: u64) -> Vec<(i64, Vec<f64>)> {
    let mut sampler = Sampler::new(eq.domain.clone(), seed ^ 0x0B17);
    (0..count)
        .map(|_| {
            let p = sampler.draw_point(eq.order);
            (p.n, p.u)
        })
        .collect()
}

/// Convenience: evaluate an expression at every early point of an orbit.
pub fn eval_along(
    e: &Expr,
    orbit: &Orbit,
    needed_dim: usize,
) -> Result<Vec<f64>, EvalError> {
    let mut out = Vec::new();
    let mut k = 0usize;
    while k + needed_dim <= orbit.values.len() {
        let p = Point::new(orbit.n0 + k as i64, orbit.values[k..k + needed_dim].to_vec());
        out.push(eval(e, &p)?);
        k += 1;
    }
    Ok(out)
}
