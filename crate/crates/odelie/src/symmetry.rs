//! Lie point symmetries of difference equations: verification, the reduced
//! determining equation, a nonlinear flow transport check, ansatz-based
//! discovery, and the classical eight-characteristic basis obtained from two
//! independent solutions of a second-order linear equation.
//!
//! A characteristic `Q(n, u0)` generates a symmetry of
//! `u[N] = ω(n, u0, .., u[N-1])` when the linearized condition
//!
//! ```text
//! S^N Q  =  Σ_{k<N}  (S^k Q) · ∂ω/∂u[k]        (on solutions)
//! ```
//!
//! holds, where `S` shifts `n` by one. [`symmetry_defect`] returns the
//! difference of the two sides with every out-of-window shift rewritten
//! on-shell, so a probabilistic zero test of the defect is exactly a test of
//! the condition on solutions.

use crate::diff::diff;
use crate::equations::{iterate_orbit, seed_orbits, DifferenceEquation};
use crate::eval::{eval, eval_scaled, EvalError, Point};
use crate::expr::Expr;
use crate::nullspace::{combination, sampled_nullspace, AnsatzConfig, NullspaceError};
use crate::report::Verdict;
use crate::zerotest::{is_zero, is_zero_eval, ZeroTestConfig, ZeroTestReport, ZeroVerdict};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SymmetryError {
    #[error("characteristic references u[{index}] but the equation window ends at u[{max}]")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("the reduced determining equation needs a right-hand side free of u[{0}]")]
    OmegaDependsOnHigherShifts(usize),
    #[error("expected a second-order equation, got order {0}")]
    WrongOrder(usize),
    #[error("candidate solution {which} may not reference window variables u[k]")]
    SolutionDependsOnU { which: usize },
    #[error("candidate solution {which} does not satisfy the equation")]
    NotASolution { which: usize },
    #[error("the two solutions have numerically zero Casoratian; they are not independent")]
    DegenerateCasoratian,
    #[error(transparent)]
    Nullspace(#[from] NullspaceError),
}

/// A labelled symmetry characteristic.
#[derive(Clone, Debug)]
pub struct Characteristic {
    pub label: String,
    pub q: Expr,
}

impl Characteristic {
    pub fn new(label: impl Into<String>, q: Expr) -> Characteristic {
        Characteristic {
            label: label.into(),
            q,
        }
    }
}

/// The prolonged characteristic `(Q, SQ, .., S^{order-1}Q)`.
pub fn prolong(q: &Expr, order: usize) -> Vec<Expr> {
    (0..order).map(|k| q.shift(k)).collect()
}

/// Apply the generator with characteristic `q` to `f`:
/// `Σ_{k<order} (S^k q) · ∂f/∂u[k]`.
pub fn apply_generator(q: &Expr, f: &Expr, order: usize) -> Expr {
    Expr::add(
        (0..order)
            .map(|k| Expr::mul(vec![q.shift(k), diff(f, k)]))
            .collect(),
    )
}

/// Residual of the linearized symmetry condition, expressed in window
/// variables: `S^N Q - Σ (S^k Q)·∂ω/∂u[k]`, rewritten on-shell. Identically
/// zero (as a function on solutions) iff `q` is a symmetry characteristic.
pub fn symmetry_defect(eq: &DifferenceEquation, q: &Expr) -> Expr {
    let n = eq.order;
    let lhs = eq.close_onshell(&q.shift(n));
    let rhs = Expr::add(
        (0..n)
            .map(|k| {
                Expr::mul(vec![
                    eq.close_onshell(&q.shift(k)),
                    eq.close_onshell(&eq.omega_wrt(k)),
                ])
            })
            .collect(),
    );
    Expr::sub(lhs, rhs)
}

/// Residual of the reduced determining equation for point characteristics
/// `Q(n, u0)` of equations whose right-hand side involves only `u0` and `u1`.
///
/// Eliminating the shifted unknown `S^N Q` from the linearized condition
/// (apply `∂/∂u0 - (ω,₀/ω,₁)·∂/∂u1`, which annihilates anything composed
/// with `ω`) and clearing the `ω,₁` denominator leaves
///
/// ```text
/// ω,₁·( ∂₀[Q·ω,₀] + ω,₀₁·SQ )  -  ω,₀·( ω,₀₁·Q + ∂₁[ω,₁·SQ] )
/// ```
///
/// which must vanish identically in `(n, u0, u1)`. When `ω,₁ ≡ 0` the
/// residual folds to the zero expression and the test is vacuous — the full
/// [`symmetry_defect`] is the authoritative check in that case.
pub fn deteq_residual(eq: &DifferenceEquation, q: &Expr) -> Result<Expr, SymmetryError> {
    if let Some(m) = q.max_index() {
        if m > 0 {
            return Err(SymmetryError::IndexOutOfRange { index: m, max: 0 });
        }
    }
    for k in 2..eq.order {
        let wk = eq.omega_wrt(k);
        if is_zero(&wk, &eq.zero_config()).verdict != ZeroVerdict::Zero {
            return Err(SymmetryError::OmegaDependsOnHigherShifts(k));
        }
    }
    let w0 = eq.omega_wrt(0);
    let w1 = eq.omega_wrt(1);
    let w01 = diff(&w0, 1);
    let sq = q.shift(1);
    let left = Expr::mul(vec![
        w1.clone(),
        Expr::add(vec![
            diff(&Expr::mul(vec![q.clone(), w0.clone()]), 0),
            Expr::mul(vec![w01.clone(), sq.clone()]),
        ]),
    ]);
    let right = Expr::mul(vec![
        w0,
        Expr::add(vec![
            Expr::mul(vec![w01, q.clone()]),
            diff(&Expr::mul(vec![w1, sq]), 1),
        ]),
    ]);
    Ok(Expr::sub(left, right))
}

/// Perturbation sizes for the flow transport test, largest first.
pub const FLOW_EPS: [f64; 3] = [1e-2, 1e-3, 1e-4];
/// Independent orbits tried by the flow transport test.
pub const FLOW_ORBITS: usize = 3;
/// Iteration steps carried out on each orbit.
pub const FLOW_STEPS: usize = 8;
/// Residual ratios `r/ε²` may spread by at most this factor across the grid.
const FLOW_SPREAD_LIMIT: f64 = 10.0;
/// Residuals below `1e-13·(1 + orbit scale)` count as rounding noise.
const FLOW_NEGLIGIBLE: f64 = 1e-13;

/// Flow transport result for one orbit.
#[derive(Clone, Debug)]
pub struct FlowOrbit {
    pub n0: i64,
    /// Transport residual per entry of [`FLOW_EPS`].
    pub residuals: Vec<f64>,
    /// Normalized step sizes actually used.
    pub eps_used: Vec<f64>,
    /// `max/min` of `r/ε²` over residuals above the noise floor.
    pub spread: Option<f64>,
    /// All residuals sat below the noise floor.
    pub negligible: bool,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct FlowReport {
    pub verdict: Verdict,
    pub orbits_used: usize,
    pub max_residual: f64,
    pub orbits: Vec<FlowOrbit>,
}

/// Nonlinear flow transport test with a symbolic characteristic.
pub fn flow_test(eq: &DifferenceEquation, q: &Expr, seed: u64) -> FlowReport {
    let q_dim = q.max_index().map_or(0, |m| m + 1);
    flow_test_with(eq, |p| eval(q, p), q_dim, seed)
}

/// Nonlinear flow transport test.
///
/// For a genuine symmetry, perturbing the initial window along `Q` and
/// re-iterating must agree with perturbing the whole orbit along `Q`, up to
/// `O(ε²)`. Each orbit compares the re-iterated orbit `w` with the
/// transported orbit `u + ε·Q` for three step sizes; the orbit passes when
/// the residuals either sit at rounding level or scale consistently as `ε²`
/// (ratio spread below 10). A defect linear in `ε` — the signature of a
/// non-symmetry — spreads by roughly 100 per decade and fails.
///
/// Step sizes are normalized by `1 + max|Q|` along the base orbit so that
/// rapidly growing characteristics still produce genuinely small
/// perturbations.
pub fn flow_test_with<F>(eq: &DifferenceEquation, q_eval: F, q_dim: usize, seed: u64) -> FlowReport
where
    F: Fn(&Point) -> Result<f64, EvalError>,
{
    let qd = q_dim.max(1);
    let window = eq.order + FLOW_STEPS;
    let mut orbits = Vec::new();
    let mut used = 0usize;
    let mut max_residual = 0.0f64;
    let mut all_pass = true;

    'orbit: for (n0, init) in seed_orbits(eq, FLOW_ORBITS, seed) {
        let base = match iterate_orbit(eq, &init, n0, FLOW_STEPS + qd - 1) {
            Ok(o) => o,
            Err(_) => continue,
        };
        // Q along the base orbit, one value per window slot.
        let mut qvals = Vec::with_capacity(window);
        for k in 0..window {
            let p = Point::new(n0 + k as i64, base.values[k..k + qd].to_vec());
            match q_eval(&p) {
                Ok(v) if v.is_finite() => qvals.push(v),
                _ => continue 'orbit,
            }
        }
        let qmax = qvals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let orbit_scale = base.values[..window]
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()));
        let floor = FLOW_NEGLIGIBLE * (1.0 + orbit_scale);

        let mut residuals = Vec::new();
        let mut eps_used = Vec::new();
        for eps in FLOW_EPS {
            let eps_n = eps / (1.0 + qmax);
            let perturbed: Vec<f64> = (0..eq.order)
                .map(|j| base.values[j] + eps_n * qvals[j])
                .collect();
            let w = match iterate_orbit(eq, &perturbed, n0, FLOW_STEPS) {
                Ok(o) => o,
                Err(_) => continue 'orbit,
            };
            let mut r = 0.0f64;
            for k in 0..window {
                let transported = base.values[k] + eps_n * qvals[k];
                r = r.max((w.values[k] - transported).abs());
            }
            if !r.is_finite() {
                continue 'orbit;
            }
            residuals.push(r);
            eps_used.push(eps_n);
        }

        let live: Vec<(f64, f64)> = residuals
            .iter()
            .zip(&eps_used)
            .filter(|(r, _)| **r > floor)
            .map(|(r, e)| (*r, *e))
            .collect();
        let negligible = live.is_empty();
        let (spread, pass) = if negligible || live.len() == 1 {
            // At or next to the rounding floor: nothing scales like ε.
            (None, true)
        } else {
            let ratios: Vec<f64> = live.iter().map(|(r, e)| r / (e * e)).collect();
            let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
            let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
            (Some(hi / lo), hi / lo < FLOW_SPREAD_LIMIT)
        };
        used += 1;
        all_pass &= pass;
        max_residual = residuals.iter().fold(max_residual, |a, r| a.max(*r));
        orbits.push(FlowOrbit {
            n0,
            residuals,
            eps_used,
            spread,
            negligible,
            pass,
        });
    }

    let verdict = if used == 0 {
        Verdict::Inconclusive
    } else if all_pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    FlowReport {
        verdict,
        orbits_used: used,
        max_residual,
        orbits,
    }
}

/// Combined verdict of the defect zero test and the flow transport test.
#[derive(Clone, Debug)]
pub struct SymmetryReport {
    pub verdict: Verdict,
    pub defect: ZeroTestReport,
    pub flow: FlowReport,
}

/// Verify that `q` is a symmetry characteristic of `eq`: the symbolic defect
/// must vanish on sampled solutions and the flow transport test must pass.
pub fn verify_symmetry(
    eq: &DifferenceEquation,
    q: &Expr,
    cfg: &ZeroTestConfig,
) -> Result<SymmetryReport, SymmetryError> {
    if let Some(m) = q.max_index() {
        if m >= eq.order {
            return Err(SymmetryError::IndexOutOfRange {
                index: m,
                max: eq.order - 1,
            });
        }
    }
    let defect = is_zero(&symmetry_defect(eq, q), cfg);
    let flow = flow_test(eq, q, cfg.seed);
    let verdict = Verdict::from(defect.verdict).combine(flow.verdict);
    Ok(SymmetryReport {
        verdict,
        defect,
        flow,
    })
}

/// Outcome of [`find_symmetries_ansatz`].
#[derive(Clone, Debug)]
pub struct SymmetryDiscovery {
    /// Coefficient vectors (over the basis) of re-verified characteristics.
    pub vectors: Vec<Vec<f64>>,
    /// Defect re-verification for each kept vector.
    pub defect_reports: Vec<ZeroTestReport>,
    /// Flow re-verification for each kept vector.
    pub flow_reports: Vec<FlowReport>,
    /// Coefficient vectors the nullspace produced but re-verification rejected.
    pub rejected: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    pub rows: usize,
}

impl SymmetryDiscovery {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }
}

/// Search the span of `basis` for symmetry characteristics of `eq`.
///
/// The defect is linear in the characteristic, so sampling each basis
/// defect and extracting the numeric nullspace finds every defect-free
/// combination at once. Each nullspace vector is then re-verified — defect
/// zero test plus flow transport — before it is reported.
pub fn find_symmetries_ansatz(
    eq: &DifferenceEquation,
    basis: &[Expr],
    cfg: &AnsatzConfig,
) -> Result<SymmetryDiscovery, SymmetryError> {
    for b in basis {
        if let Some(m) = b.max_index() {
            if m >= eq.order {
                return Err(SymmetryError::IndexOutOfRange {
                    index: m,
                    max: eq.order - 1,
                });
            }
        }
    }
    let defects: Vec<Expr> = basis.iter().map(|b| symmetry_defect(eq, b)).collect();
    let defect_cols: Vec<_> = defects
        .iter()
        .map(|d| move |p: &Point| eval_scaled(d, p))
        .collect();
    let target = cfg.samples.max(basis.len() + 5);
    let pool = eq.sample_onshell(4 * target, cfg.seed);
    let ns = sampled_nullspace(&defect_cols, &pool, cfg)?;

    let q_dim = basis
        .iter()
        .filter_map(|b| b.max_index().map(|m| m + 1))
        .max()
        .unwrap_or(0);
    let mut zcfg = ZeroTestConfig::with_domain(eq.domain.clone());
    zcfg.seed = cfg.seed;

    let mut vectors = Vec::new();
    let mut defect_reports = Vec::new();
    let mut flow_reports = Vec::new();
    let mut rejected = Vec::new();
    for c in ns.vectors {
        let (defect, flow) = {
            let combo = combination(&defect_cols, &c);
            let defect = is_zero_eval(&combo, eq.order, &zcfg);
            let q_eval = |p: &Point| {
                let mut v = 0.0;
                for (b, cj) in basis.iter().zip(&c) {
                    v += cj * eval(b, p)?;
                }
                Ok(v)
            };
            let flow = flow_test_with(eq, q_eval, q_dim, cfg.seed);
            (defect, flow)
        };
        if defect.is_zero() && flow.verdict != Verdict::Fail {
            vectors.push(c);
            defect_reports.push(defect);
            flow_reports.push(flow);
        } else {
            rejected.push(c);
        }
    }
    Ok(SymmetryDiscovery {
        vectors,
        defect_reports,
        flow_reports,
        rejected,
        singular_values: ns.singular_values,
        rows: ns.rows,
    })
}

/// The eight-characteristic symmetry basis of a second-order linear
/// equation, built from two independent solutions.
#[derive(Clone, Debug)]
pub struct Sl3Basis {
    /// Casoratian `U1·SU2 - U2·SU1` of the two solutions.
    pub casoratian: Expr,
    /// First-integral `(u0·SU2 - U2·u1) / W`.
    pub phi1: Expr,
    /// First-integral `(u1·U1 - u0·SU1) / W`.
    pub phi2: Expr,
    pub characteristics: Vec<Characteristic>,
    /// Defect zero test for each characteristic, same order.
    pub reports: Vec<ZeroTestReport>,
}

/// Construct the eight characteristics `U1, U2, φ¹U1, φ²U1, φ¹U2, φ²U2,
/// φ¹u0, φ²u0` that realize the maximal point-symmetry algebra of a
/// second-order linear difference equation.
///
/// `sol1` and `sol2` must be `n`-only expressions solving `eq`, with
/// numerically nonzero Casoratian. Every returned characteristic is checked
/// against the linearized symmetry condition; the reports are returned so
/// callers can assert on them.
pub fn sl3_characteristics(
    eq: &DifferenceEquation,
    sol1: &Expr,
    sol2: &Expr,
    cfg: &ZeroTestConfig,
) -> Result<Sl3Basis, SymmetryError> {
    if eq.order != 2 {
        return Err(SymmetryError::WrongOrder(eq.order));
    }
    for (which, sol) in [(1usize, sol1), (2, sol2)] {
        if sol.max_index().is_some() {
            return Err(SymmetryError::SolutionDependsOnU { which });
        }
        let residual = Expr::sub(
            sol.shift_n(2),
            eq.omega
                .substitute(0, sol)
                .substitute(1, &sol.shift_n(1)),
        );
        if !is_zero(&residual, cfg).is_zero() {
            return Err(SymmetryError::NotASolution { which });
        }
    }
    let w = Expr::sub(
        Expr::mul(vec![sol1.clone(), sol2.shift_n(1)]),
        Expr::mul(vec![sol2.clone(), sol1.shift_n(1)]),
    );
    if is_zero(&w, cfg).verdict != ZeroVerdict::NonZero {
        return Err(SymmetryError::DegenerateCasoratian);
    }
    let u0 = Expr::u(0);
    let u1 = Expr::u(1);
    let phi1 = Expr::div(
        Expr::sub(
            Expr::mul(vec![u0.clone(), sol2.shift_n(1)]),
            Expr::mul(vec![sol2.clone(), u1.clone()]),
        ),
        w.clone(),
    );
    let phi2 = Expr::div(
        Expr::sub(
            Expr::mul(vec![u1, sol1.clone()]),
            Expr::mul(vec![u0.clone(), sol1.shift_n(1)]),
        ),
        w.clone(),
    );
    let qs = vec![
        ("Q1", sol1.clone()),
        ("Q2", sol2.clone()),
        ("Q3", Expr::mul(vec![phi1.clone(), sol1.clone()])),
        ("Q4", Expr::mul(vec![phi2.clone(), sol1.clone()])),
        ("Q5", Expr::mul(vec![phi1.clone(), sol2.clone()])),
        ("Q6", Expr::mul(vec![phi2.clone(), sol2.clone()])),
        ("Q7", Expr::mul(vec![phi1.clone(), u0.clone()])),
        ("Q8", Expr::mul(vec![phi2.clone(), u0])),
    ];
    let mut characteristics = Vec::new();
    let mut reports = Vec::new();
    for (label, q) in qs {
        reports.push(is_zero(&symmetry_defect(eq, &q), cfg));
        characteristics.push(Characteristic::new(label, q));
    }
    Ok(Sl3Basis {
        casoratian: w,
        phi1,
        phi2,
        characteristics,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::zerotest::Domain;

    fn eq(name: &str, order: usize, omega: &str) -> DifferenceEquation {
        DifferenceEquation::new(name, order, parse(omega).unwrap(), Domain::default()).unwrap()
    }

    fn decaying_fourth() -> DifferenceEquation {
        eq("decay", 4, "n/(n+4)*u[0]")
    }

    fn tanh_sum() -> DifferenceEquation {
        eq("tanh-sum", 4, "(u[1]+u[0])/(u[0]*u[1]+1)")
    }

    #[test]
    fn periodic_sign_is_a_symmetry_of_the_periodic_equation() {
        let e = eq("periodic", 4, "u[0]");
        let q = parse("(-1)^n").unwrap();
        let r = verify_symmetry(&e, &q, &e.zero_config()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.defect.is_zero());
    }

    #[test]
    fn scaling_is_a_symmetry_and_a_random_function_is_not() {
        let e = decaying_fourth();
        let good = parse("u[0]").unwrap();
        let bad = parse("u[0]^2").unwrap();
        assert_eq!(
            verify_symmetry(&e, &good, &e.zero_config()).unwrap().verdict,
            Verdict::Pass
        );
        let r = verify_symmetry(&e, &bad, &e.zero_config()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.defect.verdict, ZeroVerdict::NonZero);
    }

    #[test]
    fn defect_is_linear_in_the_characteristic() {
        let e = tanh_sum();
        let q1 = parse("u[0]^2-1").unwrap();
        let q2 = parse("cos(n)*u[0]").unwrap();
        let combo = Expr::add(vec![
            Expr::mul(vec![Expr::rational(3, 2), q1.clone()]),
            Expr::mul(vec![Expr::int(-2), q2.clone()]),
        ]);
        let lhs = symmetry_defect(&e, &combo);
        let rhs = Expr::add(vec![
            Expr::mul(vec![Expr::rational(3, 2), symmetry_defect(&e, &q1)]),
            Expr::mul(vec![Expr::int(-2), symmetry_defect(&e, &q2)]),
        ]);
        let diff_report = is_zero(&Expr::sub(lhs, rhs), &e.zero_config());
        assert!(diff_report.is_zero(), "{diff_report:?}");
    }

    #[test]
    fn deteq_accepts_the_logarithmic_characteristic() {
        let e = tanh_sum();
        let q = parse("1/2*(u[0]^2-1)*log(abs((1-u[0])/(1+u[0])))").unwrap();
        let r = deteq_residual(&e, &q).unwrap();
        let report = is_zero(&r, &e.zero_config());
        assert!(report.is_zero(), "{report:?}");
    }

    #[test]
    fn deteq_accepts_the_exponential_characteristics() {
        let e = tanh_sum();
        for src in [
            "1.2207440846057596^n*(u[0]^2-1)",
            "(-0.7244919590005157)^n*(u[0]^2-1)",
        ] {
            let q = parse(src).unwrap();
            let report = is_zero(&deteq_residual(&e, &q).unwrap(), &e.zero_config());
            assert!(report.is_zero(), "{src}: {report:?}");
        }
    }

    #[test]
    fn deteq_rejects_identity_on_the_tanh_equation() {
        let e = tanh_sum();
        let q = parse("u[0]").unwrap();
        let report = is_zero(&deteq_residual(&e, &q).unwrap(), &e.zero_config());
        assert_eq!(report.verdict, ZeroVerdict::NonZero);
    }

    #[test]
    fn deteq_on_additive_equation_accepts_linear_family() {
        // u[4] = u[0] + u[1] exercises the nonzero-ω,₁ path with polynomial Q.
        let e = eq("additive", 4, "u[0]+u[1]");
        for src in ["u[0]", "3*u[0]-7", "cos(n)"] {
            let q = parse(src).unwrap();
            let report = is_zero(&deteq_residual(&e, &q).unwrap(), &e.zero_config());
            assert!(report.is_zero(), "{src}: {report:?}");
        }
        let quad = parse("u[0]^2").unwrap();
        let report = is_zero(&deteq_residual(&e, &quad).unwrap(), &e.zero_config());
        assert_eq!(report.verdict, ZeroVerdict::NonZero);
    }

    #[test]
    fn deteq_rejects_non_point_characteristics() {
        let e = tanh_sum();
        let q = parse("u[1]").unwrap();
        assert!(matches!(
            deteq_residual(&e, &q),
            Err(SymmetryError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn flow_distinguishes_symmetry_from_impostor() {
        let e = tanh_sum();
        let good = parse("1/2*(u[0]^2-1)*log(abs((1-u[0])/(1+u[0])))").unwrap();
        let bad = parse("u[0]^2").unwrap();
        let rg = flow_test(&e, &good, 7);
        let rb = flow_test(&e, &bad, 7);
        assert_eq!(rg.verdict, Verdict::Pass, "{rg:?}");
        assert_eq!(rb.verdict, Verdict::Fail, "{rb:?}");
    }

    #[test]
    fn discovery_recovers_the_scaling_direction() {
        let e = decaying_fourth();
        let basis = vec![
            parse("u[0]").unwrap(),
            parse("u[0]^2").unwrap(),
            parse("n*u[0]").unwrap(),
        ];
        let found = find_symmetries_ansatz(&e, &basis, &AnsatzConfig::default()).unwrap();
        assert_eq!(found.dimension(), 1, "{:?}", found.singular_values);
        let v = &found.vectors[0];
        assert!(v[0].abs() > 0.99, "{v:?}");
        assert!(v[1].abs() < 1e-6 && v[2].abs() < 1e-6, "{v:?}");
    }

    #[test]
    fn discovery_reports_empty_for_hopeless_basis() {
        let e = eq("periodic", 4, "u[0]");
        let basis = vec![parse("n").unwrap(), parse("n^2").unwrap()];
        let found = find_symmetries_ansatz(&e, &basis, &AnsatzConfig::default()).unwrap();
        assert_eq!(found.dimension(), 0);
    }

    #[test]
    fn sl3_basis_for_two_step_recurrence() {
        let e = eq("two-step", 2, "u[0]");
        let s1 = parse("1").unwrap();
        let s2 = parse("(-1)^n").unwrap();
        let b = sl3_characteristics(&e, &s1, &s2, &e.zero_config()).unwrap();
        assert_eq!(b.characteristics.len(), 8);
        for (c, r) in b.characteristics.iter().zip(&b.reports) {
            assert!(r.is_zero(), "{}: {r:?}", c.label);
        }
    }

    #[test]
    fn sl3_rejects_dependent_solutions() {
        let e = eq("two-step", 2, "u[0]");
        let s1 = parse("1").unwrap();
        let s2 = parse("1").unwrap();
        assert!(matches!(
            sl3_characteristics(&e, &s1, &s2, &e.zero_config()),
            Err(SymmetryError::DegenerateCasoratian)
        ));
    }

    #[test]
    fn sl3_rejects_non_solutions() {
        let e = eq("two-step", 2, "u[0]");
        let s1 = parse("1").unwrap();
        let s2 = parse("n").unwrap();
        assert!(matches!(
            sl3_characteristics(&e, &s1, &s2, &e.zero_config()),
            Err(SymmetryError::NotASolution { which: 2 })
        ));
    }
}
