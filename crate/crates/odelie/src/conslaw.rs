//! Conservation-law multipliers and symmetry–integral associations.
//!
//! Writing the equation as `u[N] - ω = 0`, a first integral `φ` determines a
//! multiplier `λ` through `Sφ - φ = λ·(u[N] - ω)` identically in all of
//! `n, u0, .., u[N]` — off solutions too. Two integrals are equivalent (they
//! generate the same conservation law up to scale) iff their multipliers are
//! proportional.
//!
//! The association of a symmetry characteristic `Q` with an integral `φ` is
//! the function `X φ = Σ (S^k Q)·∂φ/∂u[k]` evaluated on solutions; when it
//! is constant the pair is recorded by that constant.

use crate::equations::DifferenceEquation;
use crate::eval::{eval, eval_scaled, Point};
use crate::expr::Expr;
use crate::integrals::FirstIntegral;
use crate::nullspace::{rank_of_rows, AnsatzConfig};
use crate::symmetry::{apply_generator, Characteristic};
use crate::zerotest::{is_zero, is_zero_eval, Sampler, ZeroTestConfig, ZeroTestReport};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConslawError {
    #[error("integral references u[{index}] but the equation window ends at u[{max}]")]
    IndexOutOfRange { index: usize, max: usize },
    #[error(
        "Sφ - φ is not proportional to (u[{order}] - ω): \
         the extracted factor varies with the off-shell coordinate \
         (max disagreement {max_disagreement:.3e})"
    )]
    NotAMultiplier {
        order: usize,
        max_disagreement: f64,
    },
    #[error("only {usable} of {tried} sample points were usable for multiplier extraction")]
    InsufficientSamples { usable: usize, tried: usize },
}

/// A conservation-law multiplier `λ` with its provenance.
#[derive(Clone, Debug)]
pub struct Multiplier {
    pub lambda: Expr,
    pub integral: String,
    pub equation: String,
}

/// Extract the multiplier of a first integral.
///
/// Since `Sφ - φ = λ·(u[N] - ω)` with `λ` independent of `u[N]`, evaluating
/// the left side at `u[N] = ω + 1` gives `λ` exactly. The construction only
/// holds when the difference really is linear in `u[N]`; that is checked by
/// sampling the ratio `(Sφ - φ)/(u[N] - ω)` at two well-separated values of
/// `u[N]` per point and insisting the results agree (and match the closed
/// form). Disagreement means `φ` is not a first integral of a single copy
/// of the equation, and extraction fails.
pub fn extract_multiplier(
    eq: &DifferenceEquation,
    phi: &FirstIntegral,
    cfg: &ZeroTestConfig,
) -> Result<Multiplier, ConslawError> {
    let n = eq.order;
    if let Some(m) = phi.phi.max_index() {
        if m >= n {
            return Err(ConslawError::IndexOutOfRange { index: m, max: n - 1 });
        }
    }
    let s_phi = phi.phi.shift(1);
    let lambda = Expr::sub(
        s_phi.substitute(n, &Expr::add(vec![eq.omega.clone(), Expr::int(1)])),
        phi.phi.clone(),
    );

    let mut sampler = Sampler::new(cfg.domain.clone(), cfg.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x0A17);
    let mut usable = 0usize;
    let mut max_disagreement = 0.0f64;
    for _ in 0..cfg.samples {
        let p = sampler.draw_point(n);
        let (omega_p, lam_closed) = match (eval(&eq.omega, &p), eval_scaled(&lambda, &p)) {
            (Ok(w), Ok(lc)) => (w, lc),
            _ => continue,
        };
        let phi_p = match eval(&phi.phi, &p) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let mut ratios = Vec::with_capacity(2);
        let mut scale = lam_closed.1;
        for _ in 0..2 {
            // Offsets at least 0.1·(1+|ω|) keep the difference quotient
            // well-conditioned.
            let mag = rng.gen_range(0.1..1.0) * (1.0 + omega_p.abs());
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let v = omega_p + sign * mag;
            let mut ext = p.u.clone();
            ext.push(v);
            let ext_point = Point::new(p.n, ext);
            match eval_scaled(&s_phi, &ext_point) {
                Ok((sv, ss)) => {
                    ratios.push((sv - phi_p) / (v - omega_p));
                    scale = scale.max(ss);
                }
                Err(_) => break,
            }
        }
        if ratios.len() < 2 {
            continue;
        }
        usable += 1;
        let tol = cfg.tol * (1.0 + scale);
        let d = (ratios[0] - ratios[1])
            .abs()
            .max((ratios[0] - lam_closed.0).abs());
        max_disagreement = max_disagreement.max(d / (1.0 + scale));
        if d > tol {
            return Err(ConslawError::NotAMultiplier {
                order: n,
                max_disagreement,
            });
        }
    }
    if usable < cfg.min_finite {
        return Err(ConslawError::InsufficientSamples {
            usable,
            tried: cfg.samples,
        });
    }
    Ok(Multiplier {
        lambda,
        integral: phi.label.clone(),
        equation: eq.name.clone(),
    })
}

/// Zero test of the defining identity `(Sφ - φ) - λ·(u[N] - ω)` with the
/// off-shell coordinate `u[N]` sampled independently — the identity must
/// hold off solutions.
pub fn verify_multiplier(
    eq: &DifferenceEquation,
    phi: &Expr,
    lambda: &Expr,
    cfg: &ZeroTestConfig,
) -> ZeroTestReport {
    let n = eq.order;
    let residual = Expr::sub(
        Expr::sub(phi.shift(1), phi.clone()),
        Expr::mul(vec![
            lambda.clone(),
            Expr::sub(Expr::u(n), eq.omega.clone()),
        ]),
    );
    is_zero(&residual, cfg)
}

/// The action of a symmetry on an integral, with constant detection.
#[derive(Clone, Debug)]
pub struct Association {
    pub q_label: String,
    pub phi_label: String,
    /// `X φ` rewritten on-shell.
    pub value: Expr,
    /// Set when the action is numerically constant on solutions.
    pub constant: Option<f64>,
    /// Zero test of `X φ - constant` (against the first sampled value).
    pub constancy: ZeroTestReport,
}

/// Apply the generator of `q` to `phi` on-shell and decide whether the
/// result is a constant of the motion's motion — i.e. the same number at
/// every sampled solution point.
pub fn association_value(
    eq: &DifferenceEquation,
    q: &Characteristic,
    phi: &FirstIntegral,
    cfg: &ZeroTestConfig,
) -> Association {
    let value = eq.close_onshell(&apply_generator(&q.q, &phi.phi, eq.order));
    // Anchor constant detection at the first finite sample.
    let anchor = eq
        .sample_onshell(cfg.samples, cfg.seed)
        .iter()
        .find_map(|p| eval(&value, p).ok().filter(|v| v.is_finite()));
    let (constancy, constant) = match anchor {
        Some(c0) => {
            let report = is_zero_eval(
                |p| {
                    let (v, s) = eval_scaled(&value, p)?;
                    Ok((v - c0, s.max(c0.abs())))
                },
                eq.order,
                cfg,
            );
            let constant = report.is_zero().then_some(c0);
            (report, constant)
        }
        None => (is_zero(&value, cfg), None),
    };
    Association {
        q_label: q.label.clone(),
        phi_label: phi.label.clone(),
        value,
        constant,
        constancy,
    }
}

/// Zero test of `X φ - expected` on solutions: the exact-value form of an
/// association claim.
pub fn association_matches(
    eq: &DifferenceEquation,
    q: &Expr,
    phi: &Expr,
    expected: &Expr,
    cfg: &ZeroTestConfig,
) -> ZeroTestReport {
    let value = eq.close_onshell(&apply_generator(q, phi, eq.order));
    is_zero(&Expr::sub(value, expected.clone()), cfg)
}

/// Full association table between a list of characteristics and a list of
/// integrals.
#[derive(Clone, Debug)]
pub struct AssociationTable {
    /// `entries[i][j]` is the action of characteristic `i` on integral `j`.
    pub entries: Vec<Vec<Association>>,
}

pub fn association_table(
    eq: &DifferenceEquation,
    qs: &[Characteristic],
    phis: &[FirstIntegral],
    cfg: &ZeroTestConfig,
) -> AssociationTable {
    let entries = qs
        .iter()
        .map(|q| {
            phis.iter()
                .map(|phi| association_value(eq, q, phi, cfg))
                .collect()
        })
        .collect();
    AssociationTable { entries }
}

/// Result of grouping integrals by multiplier proportionality.
#[derive(Clone, Debug)]
pub struct EquivalenceClasses {
    /// Indices into the input list, grouped; two integrals share a group iff
    /// their multipliers are numerically proportional.
    pub groups: Vec<Vec<usize>>,
    /// Indices whose multiplier is numerically zero (trivial laws); each is
    /// kept out of the proportionality groups.
    pub trivial: Vec<usize>,
    /// Numeric rank of the sampled multiplier matrix: the number of
    /// independent conservation laws in the list.
    pub rank: usize,
}

/// Group integrals into equivalence classes by multiplier proportionality
/// and report the rank of the whole multiplier family.
pub fn classify_equivalence(
    eq: &DifferenceEquation,
    phis: &[FirstIntegral],
    cfg: &ZeroTestConfig,
    rank_tol: f64,
) -> Result<EquivalenceClasses, ConslawError> {
    let mut lambdas = Vec::with_capacity(phis.len());
    for phi in phis {
        lambdas.push(extract_multiplier(eq, phi, cfg)?.lambda);
    }
    // Sampled multiplier values, one row per point, row-normalized.
    let ansatz = AnsatzConfig {
        samples: cfg.samples.max(phis.len() + 5),
        rank_tol,
        seed: cfg.seed,
    };
    let pool = eq.sample_onshell(4 * ansatz.samples, cfg.seed);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for p in &pool {
        if rows.len() >= ansatz.samples {
            break;
        }
        let vals: Result<Vec<(f64, f64)>, _> =
            lambdas.iter().map(|l| eval_scaled(l, p)).collect();
        if let Ok(vs) = vals {
            if vs.iter().all(|(v, _)| v.is_finite()) {
                let scale = vs.iter().fold(0.0f64, |a, (_, s)| a.max(*s));
                rows.push(vs.iter().map(|(v, _)| v / (1.0 + scale)).collect());
            }
        }
    }
    if rows.len() < phis.len() + 5 {
        return Err(ConslawError::InsufficientSamples {
            usable: rows.len(),
            tried: pool.len(),
        });
    }
    let rank = rank_of_rows(&rows, rank_tol);

    // A multiplier column is trivial when all its sampled values are noise.
    let m = rows.len() as f64;
    let col_norm = |j: usize| -> f64 {
        (rows.iter().map(|r| r[j] * r[j]).sum::<f64>() / m).sqrt()
    };
    let trivial: Vec<usize> = (0..phis.len()).filter(|j| col_norm(*j) <= rank_tol).collect();

    // Union-find over pairwise proportionality of the non-trivial columns.
    let mut parent: Vec<usize> = (0..phis.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    let live: Vec<usize> = (0..phis.len()).filter(|j| !trivial.contains(j)).collect();
    for (a, &i) in live.iter().enumerate() {
        for &j in &live[a + 1..] {
            let pair: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[i], r[j]]).collect();
            if rank_of_rows(&pair, rank_tol) == 1 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for &i in &live {
        let root = find(&mut parent, i);
        match roots.iter().position(|r| *r == root) {
            Some(gi) => groups[gi].push(i),
            None => {
                roots.push(root);
                groups.push(vec![i]);
            }
        }
    }
    Ok(EquivalenceClasses {
        groups,
        trivial,
        rank,
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

    fn integral(label: &str, src: &str) -> FirstIntegral {
        FirstIntegral::new(label, parse(src).unwrap())
    }

    #[test]
    fn window_sum_has_unit_multiplier() {
        let e = periodic();
        let phi = integral("sum", "u[0]+u[1]+u[2]+u[3]");
        let m = extract_multiplier(&e, &phi, &e.zero_config()).unwrap();
        let one = parse("1").unwrap();
        assert!(is_zero(&Expr::sub(m.lambda.clone(), one), &e.zero_config()).is_zero());
        let v = verify_multiplier(&e, &phi.phi, &m.lambda, &e.zero_config());
        assert!(v.is_zero(), "{v:?}");
    }

    #[test]
    fn alternating_sum_has_alternating_multiplier() {
        let e = periodic();
        let phi = integral("alt", "(-1)^n*(-u[0]+u[1]-u[2]+u[3])");
        let m = extract_multiplier(&e, &phi, &e.zero_config()).unwrap();
        let expected = parse("(-1)^(n+1)").unwrap();
        assert!(is_zero(&Expr::sub(m.lambda.clone(), expected), &e.zero_config()).is_zero());
        assert!(verify_multiplier(&e, &phi.phi, &m.lambda, &e.zero_config()).is_zero());
    }

    #[test]
    fn non_integral_is_rejected() {
        let e = periodic();
        let phi = integral("square", "u[0]^2");
        assert!(matches!(
            extract_multiplier(&e, &phi, &e.zero_config()),
            Err(ConslawError::NotAMultiplier { .. })
        ));
    }

    #[test]
    fn association_of_translation_with_window_sum_is_four() {
        let e = periodic();
        let q = Characteristic::new("translation", parse("1").unwrap());
        let phi = integral("sum", "u[0]+u[1]+u[2]+u[3]");
        let a = association_value(&e, &q, &phi, &e.zero_config());
        assert_eq!(a.constant, Some(4.0), "{a:?}");
        let four = parse("4").unwrap();
        assert!(association_matches(&e, &q.q, &phi.phi, &four, &e.zero_config()).is_zero());
    }

    #[test]
    fn scaling_association_reproduces_the_integral_itself() {
        let e = periodic();
        let q = Characteristic::new("scaling", parse("u[0]").unwrap());
        let phi = integral("sum", "u[0]+u[1]+u[2]+u[3]");
        let a = association_value(&e, &q, &phi, &e.zero_config());
        assert_eq!(a.constant, None);
        assert!(is_zero(&Expr::sub(a.value.clone(), phi.phi.clone()), &e.zero_config()).is_zero());
    }

    #[test]
    fn proportional_integrals_share_a_class() {
        let e = periodic();
        let phis = vec![
            integral("sum", "u[0]+u[1]+u[2]+u[3]"),
            integral("twice", "2*(u[0]+u[1]+u[2]+u[3])"),
            integral("alt", "(-1)^n*(-u[0]+u[1]-u[2]+u[3])"),
        ];
        let c = classify_equivalence(&e, &phis, &e.zero_config(), 1e-8).unwrap();
        assert_eq!(c.rank, 2, "{c:?}");
        assert_eq!(c.trivial, Vec::<usize>::new());
        let mut groups = c.groups.clone();
        for g in &mut groups {
            g.sort();
        }
        groups.sort();
        assert_eq!(groups, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn constant_integral_is_trivial() {
        let e = periodic();
        let phis = vec![
            integral("const", "1"),
            integral("sum", "u[0]+u[1]+u[2]+u[3]"),
        ];
        let c = classify_equivalence(&e, &phis, &e.zero_config(), 1e-8).unwrap();
        assert_eq!(c.trivial, vec![0]);
        assert_eq!(c.groups, vec![vec![1]]);
        assert_eq!(c.rank, 1);
    }
}
