//! First integrals of difference equations: verification by defect and by
//! orbit drift, the component recursion that characterizes conserved
//! quantities of fourth-order equations, a constructor for the integrals of
//! linear fourth-order equations, and ansatz-based discovery.
//!
//! A function `φ(n, u0..u3)` is a first integral when `Sφ = φ` on
//! solutions. Writing `P_k = ∂φ/∂u[k]`, applying `∂/∂u[k]` to `Sφ - φ = 0`
//! (with `u[4]` eliminated on-shell) yields the closed component recursion
//!
//! ```text
//! P0 = ω,₀·SP3      P1 = SP0 + ω,₁·SP3
//! P2 = SP1 + ω,₂·SP3      P3 = SP2 + ω,₃·SP3
//! ```
//!
//! and eliminating `P0..P2` leaves a single determining equation for `P3`.

use crate::diff::diff;
use crate::equations::{iterate_orbit, seed_orbits, DifferenceEquation};
use crate::eval::{eval, eval_scaled, EvalError, Point};
use crate::expr::Expr;
use crate::nullspace::{combination, sampled_nullspace, AnsatzConfig, NullspaceError};
use crate::report::Verdict;
use crate::zerotest::{is_zero, is_zero_eval, ZeroTestConfig, ZeroTestReport, ZeroVerdict};
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IntegralError {
    #[error("integral references u[{index}] but the equation window ends at u[{max}]")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("the component recursion is defined for fourth-order equations, got order {0}")]
    WrongOrder(usize),
    #[error("the reduced determining equation needs a right-hand side free of u[{0}]")]
    OmegaDependsOnHigherShifts(usize),
    #[error("linear coefficients must be functions of n only")]
    CoefficientDependsOnU,
    #[error("K(n) does not satisfy the required recurrence K(n) = a(n+3)K(n+4) + b(n+2)K(n+3)")]
    KRecurrenceFails,
    #[error("the equation is not of the linear homogeneous form u[4] = a(n)u[0] + b(n)u[1]")]
    NotLinearHomogeneous,
    #[error(transparent)]
    Nullspace(#[from] NullspaceError),
}

/// A labelled first-integral candidate.
#[derive(Clone, Debug)]
pub struct FirstIntegral {
    pub label: String,
    pub phi: Expr,
}

impl FirstIntegral {
    pub fn new(label: impl Into<String>, phi: Expr) -> FirstIntegral {
        FirstIntegral {
            label: label.into(),
            phi,
        }
    }
}

/// The gradient components `P_k = ∂φ/∂u[k]` of a fourth-order integral.
#[derive(Clone, Debug)]
pub struct PComponents {
    pub p0: Expr,
    pub p1: Expr,
    pub p2: Expr,
    pub p3: Expr,
}

pub fn p_components(phi: &Expr) -> PComponents {
    PComponents {
        p0: diff(phi, 0),
        p1: diff(phi, 1),
        p2: diff(phi, 2),
        p3: diff(phi, 3),
    }
}

/// Residuals of the four component-recursion identities, rewritten on-shell.
/// All four vanish identically iff the gradient of `φ` is consistent with
/// `Sφ = φ` on solutions.
pub fn p_recursion_residuals(
    eq: &DifferenceEquation,
    pc: &PComponents,
) -> Result<[Expr; 4], IntegralError> {
    if eq.order != 4 {
        return Err(IntegralError::WrongOrder(eq.order));
    }
    let sp3 = eq.close_onshell(&pc.p3.shift(1));
    let sp0 = eq.close_onshell(&pc.p0.shift(1));
    let sp1 = eq.close_onshell(&pc.p1.shift(1));
    let sp2 = eq.close_onshell(&pc.p2.shift(1));
    let w = |k: usize| eq.close_onshell(&eq.omega_wrt(k));
    Ok([
        Expr::sub(pc.p0.clone(), Expr::mul(vec![w(0), sp3.clone()])),
        Expr::sub(
            pc.p1.clone(),
            Expr::add(vec![sp0, Expr::mul(vec![w(1), sp3.clone()])]),
        ),
        Expr::sub(
            pc.p2.clone(),
            Expr::add(vec![sp1, Expr::mul(vec![w(2), sp3.clone()])]),
        ),
        Expr::sub(
            pc.p3.clone(),
            Expr::add(vec![sp2, Expr::mul(vec![w(3), sp3])]),
        ),
    ])
}

/// Residual of the full determining equation for the top component `P3`:
///
/// ```text
/// S³(ω,₀)·S⁴P3 + S²(ω,₁)·S³P3 + S(ω,₂)·S²P3 + ω,₃·SP3 - P3
/// ```
///
/// with every shift rewritten on-shell. Obtained by eliminating `P0..P2`
/// from the component recursion; a valid `P3 = ∂φ/∂u[3]` must satisfy it.
pub fn p3_determining_residual(
    eq: &DifferenceEquation,
    p3: &Expr,
) -> Result<Expr, IntegralError> {
    if eq.order != 4 {
        return Err(IntegralError::WrongOrder(eq.order));
    }
    let s = |e: &Expr, k: usize| eq.close_onshell(&e.shift(k));
    let terms = vec![
        Expr::mul(vec![s(&eq.omega_wrt(0), 3), s(p3, 4)]),
        Expr::mul(vec![s(&eq.omega_wrt(1), 2), s(p3, 3)]),
        Expr::mul(vec![s(&eq.omega_wrt(2), 1), s(p3, 2)]),
        Expr::mul(vec![eq.omega_wrt(3), s(p3, 1)]),
        Expr::neg(p3.clone()),
    ];
    Ok(Expr::add(terms))
}

/// Residual of the reduced `P3` determining equation
/// `S³(ω,₀)·S⁴P3 + S²(ω,₁)·S³P3 - P3` for right-hand sides free of `u2`
/// and `u3` (checked numerically; violations are an error).
pub fn p3_reduced_residual(eq: &DifferenceEquation, p3: &Expr) -> Result<Expr, IntegralError> {
    if eq.order != 4 {
        return Err(IntegralError::WrongOrder(eq.order));
    }
    for k in 2..eq.order {
        if is_zero(&eq.omega_wrt(k), &eq.zero_config()).verdict != ZeroVerdict::Zero {
            return Err(IntegralError::OmegaDependsOnHigherShifts(k));
        }
    }
    let s = |e: &Expr, k: usize| eq.close_onshell(&e.shift(k));
    Ok(Expr::add(vec![
        Expr::mul(vec![s(&eq.omega_wrt(0), 3), s(p3, 4)]),
        Expr::mul(vec![s(&eq.omega_wrt(1), 2), s(p3, 3)]),
        Expr::neg(p3.clone()),
    ]))
}

/// `Sφ - φ` rewritten on-shell: identically zero on solutions iff `φ` is a
/// first integral.
pub fn integral_defect(eq: &DifferenceEquation, phi: &Expr) -> Expr {
    Expr::sub(eq.close_onshell(&phi.shift(1)), phi.clone())
}

/// Orbits used by the drift check.
pub const DRIFT_ORBITS: usize = 3;
/// Steps iterated per drift orbit.
pub const DRIFT_STEPS: usize = 1000;
/// Allowed relative drift of `φ` along an orbit.
pub const DRIFT_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct DriftReport {
    pub verdict: Verdict,
    /// Largest `|φ(k) - φ(0)| / (1 + |φ(0)|)` over all usable orbits.
    pub max_rel_drift: f64,
    pub orbits_used: usize,
    pub steps: usize,
}

/// Numerically iterate orbits and check that `φ` stays constant along each.
pub fn drift_test_with<F>(eq: &DifferenceEquation, phi_eval: F, seed: u64) -> DriftReport
where
    F: Fn(&Point) -> Result<f64, EvalError>,
{
    let mut used = 0usize;
    let mut max_rel = 0.0f64;
    let mut all_pass = true;
    'orbit: for (n0, init) in seed_orbits(eq, DRIFT_ORBITS, seed) {
        let orbit = match iterate_orbit(eq, &init, n0, DRIFT_STEPS) {
            Ok(o) => o,
            Err(_) => continue,
        };
        let first = match orbit.point(0).map(|p| phi_eval(&p)) {
            Some(Ok(v)) if v.is_finite() => v,
            _ => continue,
        };
        let mut worst = 0.0f64;
        for k in 1..=orbit.steps() {
            let p = orbit.point(k).expect("within stored window");
            match phi_eval(&p) {
                Ok(v) if v.is_finite() => worst = worst.max((v - first).abs()),
                _ => continue 'orbit,
            }
        }
        let rel = worst / (1.0 + first.abs());
        used += 1;
        max_rel = max_rel.max(rel);
        all_pass &= rel <= DRIFT_TOL;
    }
    let verdict = if used == 0 {
        Verdict::Inconclusive
    } else if all_pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    DriftReport {
        verdict,
        max_rel_drift: max_rel,
        orbits_used: used,
        steps: DRIFT_STEPS,
    }
}

/// Combined verdict of the defect zero test and the orbit drift check.
#[derive(Clone, Debug)]
pub struct IntegralReport {
    pub verdict: Verdict,
    pub defect: ZeroTestReport,
    pub drift: DriftReport,
}

/// Verify that `φ` is a first integral of `eq`: the on-shell defect `Sφ - φ`
/// must test zero and `φ` must stay constant along iterated orbits.
pub fn verify_first_integral(
    eq: &DifferenceEquation,
    phi: &Expr,
    cfg: &ZeroTestConfig,
) -> Result<IntegralReport, IntegralError> {
    if let Some(m) = phi.max_index() {
        if m >= eq.order {
            return Err(IntegralError::IndexOutOfRange {
                index: m,
                max: eq.order - 1,
            });
        }
    }
    let defect = is_zero(&integral_defect(eq, phi), cfg);
    let drift = drift_test_with(eq, |p| eval(phi, p), cfg.seed);
    Ok(IntegralReport {
        verdict: Verdict::from(defect.verdict).combine(drift.verdict),
        defect,
        drift,
    })
}

/// Data for the linear-equation integral constructor: the equation
/// coefficients of `u[4] = a(n)·u[0] + b(n)·u[1]` and a kernel function
/// `K(n)` satisfying `K(n) = a(n+3)·K(n+4) + b(n+2)·K(n+3)`.
#[derive(Clone, Debug)]
pub struct LinearCoefficients {
    pub a: Expr,
    pub b: Expr,
    pub k: Expr,
}

impl LinearCoefficients {
    pub fn new(a: Expr, b: Expr, k: Expr) -> Result<LinearCoefficients, IntegralError> {
        if a.max_index().is_some() || b.max_index().is_some() || k.max_index().is_some() {
            return Err(IntegralError::CoefficientDependsOnU);
        }
        Ok(LinearCoefficients { a, b, k })
    }

    /// Residual of the kernel recurrence `K(n) - a(n+3)K(n+4) - b(n+2)K(n+3)`.
    pub fn k_residual(&self) -> Expr {
        Expr::sub(
            self.k.clone(),
            Expr::add(vec![
                Expr::mul(vec![self.a.shift_n(3), self.k.shift_n(4)]),
                Expr::mul(vec![self.b.shift_n(2), self.k.shift_n(3)]),
            ]),
        )
    }
}

/// Build the first integral of `u[4] = a(n)u[0] + b(n)u[1]` generated by a
/// kernel `K(n)`:
///
/// ```text
/// φ = a(n)·K(n+1)·u0 + K(n-2)·u1 + K(n-1)·u2 + K(n)·u3
/// ```
///
/// Fails if `eq` is not numerically of the stated linear form, or if `K`
/// does not satisfy its recurrence. The returned report re-verifies the
/// built integral against `eq`.
pub fn build_linear_integral(
    eq: &DifferenceEquation,
    lc: &LinearCoefficients,
    cfg: &ZeroTestConfig,
) -> Result<(FirstIntegral, IntegralReport), IntegralError> {
    if eq.order != 4 {
        return Err(IntegralError::WrongOrder(eq.order));
    }
    let linear_form = Expr::add(vec![
        Expr::mul(vec![lc.a.clone(), Expr::u(0)]),
        Expr::mul(vec![lc.b.clone(), Expr::u(1)]),
    ]);
    if !is_zero(&Expr::sub(eq.omega.clone(), linear_form), cfg).is_zero() {
        return Err(IntegralError::NotLinearHomogeneous);
    }
    if !is_zero(&lc.k_residual(), cfg).is_zero() {
        return Err(IntegralError::KRecurrenceFails);
    }
    let phi = Expr::add(vec![
        Expr::mul(vec![lc.a.clone(), lc.k.shift_n(1), Expr::u(0)]),
        Expr::mul(vec![lc.k.shift_n(-2), Expr::u(1)]),
        Expr::mul(vec![lc.k.shift_n(-1), Expr::u(2)]),
        Expr::mul(vec![lc.k.clone(), Expr::u(3)]),
    ]);
    let label = format!("K={}", lc.k);
    let report = verify_first_integral(eq, &phi, cfg)?;
    Ok((FirstIntegral::new(label, phi), report))
}

/// Relative distance of `b` from the line spanned by `a`, over sampled
/// values: `‖b - proj_a b‖ / ‖b‖`. Zero means `b` is a scalar multiple of
/// `a` on the sample; `None` means no usable points. A numerically zero `b`
/// counts as in-span; a zero `a` cannot span a nonzero `b`.
pub fn projection_residual(a: &Expr, b: &Expr, points: &[Point]) -> Option<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for p in points {
        if let (Ok(x), Ok(y)) = (eval(a, p), eval(b, p)) {
            if x.is_finite() && y.is_finite() {
                xs.push(x);
                ys.push(y);
            }
        }
    }
    if xs.is_empty() {
        return None;
    }
    let xx: f64 = xs.iter().map(|x| x * x).sum();
    let yy: f64 = ys.iter().map(|y| y * y).sum();
    if yy == 0.0 {
        return Some(0.0);
    }
    if xx == 0.0 {
        return Some(1.0);
    }
    let xy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let c = xy / xx;
    let res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let d = y - c * x;
            d * d
        })
        .sum();
    Some((res / yy).sqrt())
}

/// Candidate integrals whose sampled values are constant get projected out
/// when their centered singular value falls at or below this fraction of
/// `max(σ_max, 1)`.
const DEFLATION_TOL: f64 = 1e-7;

/// Outcome of [`find_integrals_ansatz`].
#[derive(Clone, Debug)]
pub struct IntegralDiscovery {
    /// Coefficient vectors (over the basis) of re-verified, non-constant
    /// integrals.
    pub vectors: Vec<Vec<f64>>,
    pub defect_reports: Vec<ZeroTestReport>,
    pub drift_reports: Vec<DriftReport>,
    /// Vectors the nullspace produced but re-verification rejected.
    pub rejected: Vec<Vec<f64>>,
    /// Singular values of the sampled defect matrix.
    pub singular_values: Vec<f64>,
    /// Centered singular values used to project out constant combinations.
    pub deflation_singular_values: Vec<f64>,
    pub rows: usize,
}

impl IntegralDiscovery {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }
}

/// Search the span of `basis` for first integrals of `eq`.
///
/// The defect `Sφ - φ` is linear in `φ`, so the numeric nullspace of the
/// sampled basis defects spans all conserved combinations. Constant
/// combinations (the trivial integrals) are projected out by a second,
/// column-centered SVD of the candidates' sampled values; what survives is
/// re-verified — defect zero test plus orbit drift — before it is reported.
pub fn find_integrals_ansatz(
    eq: &DifferenceEquation,
    basis: &[Expr],
    cfg: &AnsatzConfig,
) -> Result<IntegralDiscovery, IntegralError> {
    for b in basis {
        if let Some(m) = b.max_index() {
            if m >= eq.order {
                return Err(IntegralError::IndexOutOfRange {
                    index: m,
                    max: eq.order - 1,
                });
            }
        }
    }
    let defects: Vec<Expr> = basis.iter().map(|b| integral_defect(eq, b)).collect();
    let defect_cols: Vec<_> = defects
        .iter()
        .map(|d| move |p: &Point| eval_scaled(d, p))
        .collect();
    let target = cfg.samples.max(basis.len() + 5);
    let pool = eq.sample_onshell(4 * target, cfg.seed);
    let ns = sampled_nullspace(&defect_cols, &pool, cfg)?;

    // Project out the constant directions. Candidate values are sampled at
    // shared points, each column is centered, and only the directions with
    // genuinely varying values survive.
    let d = ns.vectors.len();
    let mut survivors: Vec<Vec<f64>> = Vec::new();
    let mut deflation_sigma = Vec::new();
    if d > 0 {
        let mut value_rows: Vec<Vec<f64>> = Vec::new();
        for p in &pool {
            if value_rows.len() >= cfg.samples.max(d + 5) {
                break;
            }
            let vals: Result<Vec<f64>, EvalError> = basis.iter().map(|b| eval(b, p)).collect();
            match vals {
                Ok(vs) if vs.iter().all(|v| v.is_finite()) => {
                    let row = ns
                        .vectors
                        .iter()
                        .map(|c| c.iter().zip(&vs).map(|(cj, vj)| cj * vj).sum())
                        .collect();
                    value_rows.push(row);
                }
                _ => {}
            }
        }
        if value_rows.len() < d + 5 {
            return Err(IntegralError::Nullspace(
                NullspaceError::InsufficientSamples {
                    rows: value_rows.len(),
                    cols: d,
                    needed: d + 5,
                },
            ));
        }
        let m = value_rows.len();
        let mut y = DMatrix::from_fn(m, d, |i, j| value_rows[i][j]);
        for j in 0..d {
            let mean = y.column(j).sum() / m as f64;
            for i in 0..m {
                y[(i, j)] -= mean;
            }
        }
        let svd = y.svd(false, true);
        deflation_sigma = svd.singular_values.iter().copied().collect();
        let v_t = svd.v_t.expect("SVD with compute_v");
        let sigma_max = deflation_sigma.first().copied().unwrap_or(0.0);
        let thresh = DEFLATION_TOL * sigma_max.max(1.0);
        for (i, sv) in deflation_sigma.iter().enumerate() {
            if *sv > thresh {
                // Map the surviving direction back to basis coefficients.
                let mut c = vec![0.0; basis.len()];
                for (l, cl) in ns.vectors.iter().enumerate() {
                    let w = v_t[(i, l)];
                    for (cj, clj) in c.iter_mut().zip(cl) {
                        *cj += w * clj;
                    }
                }
                survivors.push(c);
            }
        }
    }

    let value_cols: Vec<_> = basis
        .iter()
        .map(|b| move |p: &Point| eval_scaled(b, p))
        .collect();
    let mut zcfg = ZeroTestConfig::with_domain(eq.domain.clone());
    zcfg.seed = cfg.seed;
    let mut vectors = Vec::new();
    let mut defect_reports = Vec::new();
    let mut drift_reports = Vec::new();
    let mut rejected = Vec::new();
    for c in survivors {
        let (defect, drift) = {
            let defect_combo = combination(&defect_cols, &c);
            let defect = is_zero_eval(&defect_combo, eq.order, &zcfg);
            let value_combo = combination(&value_cols, &c);
            let drift =
                drift_test_with(eq, |p: &Point| value_combo(p).map(|(v, _)| v), cfg.seed);
            (defect, drift)
        };
        if defect.is_zero() && drift.verdict != Verdict::Fail {
            vectors.push(c);
            defect_reports.push(defect);
            drift_reports.push(drift);
        } else {
            rejected.push(c);
        }
    }
    Ok(IntegralDiscovery {
        vectors,
        defect_reports,
        drift_reports,
        rejected,
        singular_values: ns.singular_values,
        deflation_singular_values: deflation_sigma,
        rows: ns.rows,
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

    fn periodic() -> DifferenceEquation {
        eq("periodic", 4, "u[0]")
    }

    fn decaying() -> DifferenceEquation {
        eq("decay", 4, "n/(n+4)*u[0]")
    }

    #[test]
    fn window_sum_is_conserved_by_the_periodic_equation() {
        let e = periodic();
        let phi = parse("u[0]+u[1]+u[2]+u[3]").unwrap();
        let r = verify_first_integral(&e, &phi, &e.zero_config()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert!(r.drift.max_rel_drift <= DRIFT_TOL);
    }

    #[test]
    fn window_sum_is_not_conserved_by_the_tanh_equation() {
        let e = eq("tanh-sum", 4, "(u[1]+u[0])/(u[0]*u[1]+1)");
        let phi = parse("u[0]+u[1]+u[2]+u[3]").unwrap();
        let r = verify_first_integral(&e, &phi, &e.zero_config()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.defect.verdict, ZeroVerdict::NonZero);
    }

    #[test]
    fn component_recursion_vanishes_for_genuine_integrals() {
        let e = decaying();
        let phi = parse("1/3*(n*u[0]+(n+1)*u[1]+(n+2)*u[2]+(n+3)*u[3])").unwrap();
        let pc = p_components(&phi);
        for (i, r) in p_recursion_residuals(&e, &pc).unwrap().iter().enumerate() {
            let report = is_zero(r, &e.zero_config());
            assert!(report.is_zero(), "component {i}: {report:?}");
        }
    }

    #[test]
    fn component_recursion_flags_non_integrals() {
        let e = decaying();
        let pc = p_components(&parse("u[0]*u[3]").unwrap());
        let rs = p_recursion_residuals(&e, &pc).unwrap();
        let any_nonzero = rs
            .iter()
            .any(|r| is_zero(r, &e.zero_config()).verdict == ZeroVerdict::NonZero);
        assert!(any_nonzero);
    }

    #[test]
    fn p3_determining_equation_reduces_to_the_kernel_recurrence() {
        let e = decaying();
        // P3 of the conserved linear form is K(n) = (n+3)/3.
        let p3 = parse("(n+3)/3").unwrap();
        let full = p3_determining_residual(&e, &p3).unwrap();
        let reduced = p3_reduced_residual(&e, &p3).unwrap();
        assert!(is_zero(&full, &e.zero_config()).is_zero());
        assert!(is_zero(&reduced, &e.zero_config()).is_zero());
        // And a non-solution is flagged.
        let bad = parse("n").unwrap();
        let r = p3_determining_residual(&e, &bad).unwrap();
        assert_eq!(is_zero(&r, &e.zero_config()).verdict, ZeroVerdict::NonZero);
    }

    #[test]
    fn p_components_match_finite_differences() {
        let e = periodic();
        let phi = parse("(-1)^n*(-u[0]+u[1]-u[2]+u[3])+u[0]*u[2]").unwrap();
        let pc = p_components(&phi);
        let comps = [&pc.p0, &pc.p1, &pc.p2, &pc.p3];
        let h = 1e-5;
        for p in e.sample_onshell(20, 11) {
            for (k, comp) in comps.iter().enumerate() {
                let sym = eval(comp, &p).unwrap();
                let mut up = p.clone();
                let mut dn = p.clone();
                up.u[k] += h;
                dn.u[k] -= h;
                let fd = (eval(&phi, &up).unwrap() - eval(&phi, &dn).unwrap()) / (2.0 * h);
                assert!(
                    (sym - fd).abs() <= 1e-5 * (1.0 + sym.abs()),
                    "component {k} at {p:?}: sym {sym} vs fd {fd}"
                );
            }
        }
    }

    #[test]
    fn linear_constructor_builds_the_window_sum() {
        let e = periodic();
        let lc = LinearCoefficients::new(
            parse("1").unwrap(),
            parse("0").unwrap(),
            parse("1").unwrap(),
        )
        .unwrap();
        let (phi, report) = build_linear_integral(&e, &lc, &e.zero_config()).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        let target = parse("u[0]+u[1]+u[2]+u[3]").unwrap();
        assert!(is_zero(&Expr::sub(phi.phi.clone(), target), &e.zero_config()).is_zero());
    }

    #[test]
    fn linear_constructor_rejects_bad_kernels_and_wrong_equations() {
        let e = periodic();
        let bad_k = LinearCoefficients::new(
            parse("1").unwrap(),
            parse("0").unwrap(),
            parse("n").unwrap(),
        )
        .unwrap();
        assert!(matches!(
            build_linear_integral(&e, &bad_k, &e.zero_config()),
            Err(IntegralError::KRecurrenceFails)
        ));
        let tanh = eq("tanh-sum", 4, "(u[1]+u[0])/(u[0]*u[1]+1)");
        let lc = LinearCoefficients::new(
            parse("1").unwrap(),
            parse("0").unwrap(),
            parse("1").unwrap(),
        )
        .unwrap();
        assert!(matches!(
            build_linear_integral(&tanh, &lc, &e.zero_config()),
            Err(IntegralError::NotLinearHomogeneous)
        ));
    }

    #[test]
    fn discovery_finds_conserved_form_and_drops_constants() {
        let e = decaying();
        // Span contains the conserved form n·u0+(n+1)u1+(n+2)u2+(n+3)u3,
        // the constant function, and noise directions.
        let basis = vec![
            parse("1").unwrap(),
            parse("n*u[0]").unwrap(),
            parse("(n+1)*u[1]").unwrap(),
            parse("(n+2)*u[2]").unwrap(),
            parse("(n+3)*u[3]").unwrap(),
            parse("u[0]^2").unwrap(),
        ];
        let found = find_integrals_ansatz(&e, &basis, &AnsatzConfig::default()).unwrap();
        assert_eq!(found.dimension(), 1, "{:?}", found.singular_values);
        let c = &found.vectors[0];
        // The constant direction must not contribute.
        assert!(c[0].abs() < 1e-6, "{c:?}");
        assert!(c[5].abs() < 1e-6, "{c:?}");
        // Equal weights on the four conserved-slope columns.
        let w = c[1];
        assert!(w.abs() > 0.3, "{c:?}");
        for j in 2..=4 {
            assert!((c[j] - w).abs() < 1e-6, "{c:?}");
        }
    }

    #[test]
    fn logarithmic_kernel_solves_its_own_second_order_equation() {
        // The u-dependence of the top component for the tanh-sum equation is
        // pinned by (u0²-1)·P3'' + 2u0·P3' = 0, solved by
        // log(sqrt((1-u0)/(1+u0))).
        let p = parse("log(sqrt((1-u[0])/(1+u[0])))").unwrap();
        let d1 = diff(&p, 0);
        let d2 = diff(&d1, 0);
        let ode = Expr::add(vec![
            Expr::mul(vec![parse("u[0]^2-1").unwrap(), d2]),
            Expr::mul(vec![parse("2*u[0]").unwrap(), d1]),
        ]);
        let report = is_zero(&ode, &ZeroTestConfig::default());
        assert!(report.is_zero(), "{report:?}");
    }
}
