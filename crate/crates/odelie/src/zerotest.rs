//! Probabilistic zero testing by randomized evaluation.
//!
//! An expression is declared ZERO when every finite sample satisfies
//! `|value| <= tol * (1 + scale)`, where `scale` is the largest intermediate
//! magnitude seen while evaluating that sample — the right yardstick when a
//! residual is a cancellation of large terms. A single finite sample above
//! the threshold is a counterexample and wins (NONZERO) regardless of how
//! many samples hit domain errors; too few finite samples without a
//! counterexample is INCONCLUSIVE.
//!
//! All sampling is driven by a seeded ChaCha stream, so reports are
//! deterministic for a given seed even if callers evaluate in parallel.

use crate::eval::{eval_scaled, EvalError, Point};
use crate::expr::Expr;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Default PRNG seed; `ODELIE_SEED` and `--seed` override it in the CLI.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Sampling region: integer `n` range plus a union of `u` intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Domain {
    pub n_min: i64,
    pub n_max: i64,
    pub u_intervals: Vec<(f64, f64)>,
}

impl Default for Domain {
    fn default() -> Domain {
        Domain {
            n_min: 5,
            n_max: 60,
            u_intervals: vec![(-0.9, -0.1), (0.1, 0.9)],
        }
    }
}

impl Domain {
    pub fn contains_u(&self, v: f64) -> bool {
        self.u_intervals.iter().any(|(lo, hi)| *lo <= v && v <= *hi)
    }
}

#[derive(Clone, Debug)]
pub struct ZeroTestConfig {
    pub samples: usize,
    pub tol: f64,
    pub min_finite: usize,
    pub seed: u64,
    pub domain: Domain,
}

impl Default for ZeroTestConfig {
    fn default() -> ZeroTestConfig {
        ZeroTestConfig {
            samples: 50,
            tol: 1e-9,
            min_finite: 30,
            seed: DEFAULT_SEED,
            domain: Domain::default(),
        }
    }
}

impl ZeroTestConfig {
    pub fn with_domain(domain: Domain) -> ZeroTestConfig {
        ZeroTestConfig {
            domain,
            ..ZeroTestConfig::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroVerdict {
    Zero,
    NonZero,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct ZeroTestReport {
    pub verdict: ZeroVerdict,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub mean_rel_residual: f64,
    pub samples: usize,
    pub finite: usize,
    pub skipped: usize,
    pub seed: u64,
    pub tol: f64,
}

impl ZeroTestReport {
    pub fn is_zero(&self) -> bool {
        self.verdict == ZeroVerdict::Zero
    }
}

/// Draws sample points from a domain using a seeded stream.
pub struct Sampler {
    rng: ChaCha8Rng,
    domain: Domain,
}

impl Sampler {
    pub fn new(domain: Domain, seed: u64) -> Sampler {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            domain,
        }
    }

    pub fn draw_u(&mut self) -> f64 {
        let total: f64 = self
            .domain
            .u_intervals
            .iter()
            .map(|(lo, hi)| hi - lo)
            .sum();
        let mut x = self.rng.gen_range(0.0..total);
        for (lo, hi) in &self.domain.u_intervals {
            let len = hi - lo;
            if x < len {
                return lo + x;
            }
            x -= len;
        }
        self.domain.u_intervals.last().map(|(_, hi)| *hi).unwrap_or(0.0)
    }

    /// A point with `dim` independent `u` coordinates.
    pub fn draw_point(&mut self, dim: usize) -> Point {
        let n = self.rng.gen_range(self.domain.n_min..=self.domain.n_max);
        let u = (0..dim).map(|_| self.draw_u()).collect();
        Point::new(n, u)
    }
}

/// Zero-test an expression; the point dimension is inferred from the highest
/// shifted variable present.
pub fn is_zero(e: &Expr, cfg: &ZeroTestConfig) -> ZeroTestReport {
    let dim = e.max_index().map_or(0, |m| m + 1);
    is_zero_eval(|p| eval_scaled(e, p), dim, cfg)
}

/// Zero-test an arbitrary scaled evaluator. `f` returns `(value, scale)`.
pub fn is_zero_eval<F>(f: F, dim: usize, cfg: &ZeroTestConfig) -> ZeroTestReport
where
    F: Fn(&Point) -> Result<(f64, f64), EvalError>,
{
    let mut sampler = Sampler::new(cfg.domain.clone(), cfg.seed);
    let mut finite = 0usize;
    let mut skipped = 0usize;
    let mut exceeded = false;
    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    let mut sum_rel = 0.0f64;
    for _ in 0..cfg.samples {
        let p = sampler.draw_point(dim);
        match f(&p) {
            Ok((v, scale)) => {
                finite += 1;
                let abs = v.abs();
                let rel = abs / (1.0 + scale);
                max_abs = max_abs.max(abs);
                max_rel = max_rel.max(rel);
                sum_rel += rel;
                if abs > cfg.tol * (1.0 + scale) {
                    exceeded = true;
                }
            }
            Err(_) => skipped += 1,
        }
    }
    let verdict = if exceeded {
        ZeroVerdict::NonZero
    } else if finite < cfg.min_finite {
        ZeroVerdict::Inconclusive
    } else {
        ZeroVerdict::Zero
    };
    ZeroTestReport {
        verdict,
        max_abs_residual: max_abs,
        max_rel_residual: max_rel,
        mean_rel_residual: if finite > 0 { sum_rel / finite as f64 } else { 0.0 },
        samples: cfg.samples,
        finite,
        skipped,
        seed: cfg.seed,
        tol: cfg.tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    #[test]
    fn pythagorean_identity_is_zero() {
        let e = parse("sin(n*u[0])^2+cos(n*u[0])^2-1").unwrap();
        let r = is_zero(&e, &ZeroTestConfig::default());
        assert_eq!(r.verdict, ZeroVerdict::Zero);
        assert!(r.max_abs_residual < 1e-12);
    }

    #[test]
    fn plain_variable_is_nonzero() {
        let e = parse("u[0]").unwrap();
        let r = is_zero(&e, &ZeroTestConfig::default());
        assert_eq!(r.verdict, ZeroVerdict::NonZero);
        assert!(r.max_abs_residual >= 0.1);
    }

    #[test]
    fn cancellation_with_large_terms_stays_zero() {
        // sqrt((n^7+u0)^2) - n^7 - u0 cancels big numbers at runtime; the
        // rounding noise left behind exceeds any absolute tolerance but is
        // tiny relative to the intermediate scale.
        let e = parse("sqrt((n^7+u[0])^2)-n^7-u[0]").unwrap();
        let r = is_zero(&e, &ZeroTestConfig::default());
        assert_eq!(r.verdict, ZeroVerdict::Zero);
        assert!(
            r.max_abs_residual > 1e-9,
            "expected visible rounding noise, got {}",
            r.max_abs_residual
        );
    }

    #[test]
    fn everywhere_singular_expression_is_inconclusive() {
        let e = parse("log(-1-u[0]^2)").unwrap();
        let r = is_zero(&e, &ZeroTestConfig::default());
        assert_eq!(r.verdict, ZeroVerdict::Inconclusive);
        assert_eq!(r.finite, 0);
    }

    #[test]
    fn reports_are_deterministic_for_a_seed() {
        let e = parse("u[0]*u[1]-u[2]").unwrap();
        let a = is_zero(&e, &ZeroTestConfig::default());
        let b = is_zero(&e, &ZeroTestConfig::default());
        assert_eq!(a.max_abs_residual, b.max_abs_residual);
        let mut other = ZeroTestConfig::default();
        other.seed = 99;
        let c = is_zero(&e, &other);
        assert_ne!(a.max_abs_residual, c.max_abs_residual);
    }

    #[test]
    fn sampler_respects_domain() {
        let mut s = Sampler::new(Domain::default(), 7);
        for _ in 0..200 {
            let p = s.draw_point(3);
            assert!((5..=60).contains(&p.n));
            for v in &p.u {
                assert!(Domain::default().contains_u(*v), "{v} outside domain");
            }
        }
    }
}
