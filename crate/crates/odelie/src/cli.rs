//! Command-line interface.
//!
//! Exit codes: `0` — the command ran and its claim PASSed (or it had no
//! claim to judge), `1` — the claim FAILed, was inconclusive, or the
//! computation could not finish, `2` — the invocation itself was unusable
//! (unknown equation, malformed formula, bad flags).
//!
//! The sampling seed is taken from `--seed`, else the `ODELIE_SEED`
//! environment variable, else a fixed default — so runs are reproducible by
//! default and overridable per invocation.

use crate::catalog::{default_catalog, find_equation, run_catalog, CatalogEntry};
use crate::conslaw::{association_value, classify_equivalence, extract_multiplier};
use crate::equations::{iterate_orbit, DifferenceEquation, EquationSpec};
use crate::expr::Expr;
use crate::integrals::{find_integrals_ansatz, verify_first_integral, FirstIntegral};
use crate::nullspace::AnsatzConfig;
use crate::parse::parse;
use crate::report::{seed_string, Report, Verdict};
use crate::symmetry::{deteq_residual, find_symmetries_ansatz, verify_symmetry, Characteristic};
use crate::zerotest::{is_zero, ZeroTestConfig, DEFAULT_SEED};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

/// `say!` that tolerates the reader going away: piping into `head`
/// closes stdout early, and the write error would otherwise panic. Exit
/// 141 mirrors death-by-SIGPIPE, which is what pipeline tools report.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(141);
        }
    }};
}

#[derive(Parser)]
#[command(
    name = "odelie",
    version,
    about = "Symmetries, first integrals, and conservation-law multipliers of difference equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Sample count for the probabilistic zero tests.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Relative tolerance for the probabilistic zero tests.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// RNG seed (decimal or 0x-hex). Falls back to $ODELIE_SEED, then a
    /// fixed default.
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Emit the result as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a characteristic generates a symmetry of an equation.
    VerifySymmetry {
        /// Catalog name (E1, E2, E3) or path to an equation JSON file.
        #[arg(long)]
        eq: String,
        /// Characteristic: formula in n and u[0..], or a catalog label (Q1..).
        #[arg(long)]
        q: String,
    },
    /// Check whether a function is a first integral of an equation.
    VerifyIntegral {
        #[arg(long)]
        eq: String,
        /// Integral: formula, or a catalog label (phi1..).
        #[arg(long)]
        phi: String,
    },
    /// Zero-test the reduced determining equation for a point characteristic.
    Deteq {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        q: String,
    },
    /// Find all symmetry characteristics in the span of a basis.
    FindSymmetries {
        #[arg(long)]
        eq: String,
        /// Comma-separated basis formulas.
        #[arg(long)]
        basis: String,
    },
    /// Find all first integrals in the span of a basis (constants excluded).
    FindIntegrals {
        #[arg(long)]
        eq: String,
        /// Comma-separated basis formulas.
        #[arg(long)]
        basis: String,
    },
    /// Extract the conservation-law multiplier of a first integral.
    Multiplier {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        phi: String,
    },
    /// Apply a symmetry generator to an integral and report the result.
    Associate {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        phi: String,
    },
    /// Group integrals into equivalence classes by multiplier.
    Classify {
        #[arg(long)]
        eq: String,
        /// Comma-separated integrals (formulas or catalog labels). Defaults
        /// to the equation's catalogued integrals.
        #[arg(long)]
        phis: Option<String>,
    },
    /// Iterate an orbit and print its values.
    Orbit {
        #[arg(long)]
        eq: String,
        /// Comma-separated initial window values.
        #[arg(long)]
        init: String,
        #[arg(long)]
        steps: usize,
        /// Base index (defaults to the equation's sampling minimum).
        #[arg(long)]
        n0: Option<i64>,
    },
    /// Re-verify every claim in the built-in catalog.
    Catalog {
        /// Restrict to one catalog equation.
        #[arg(long)]
        eq: Option<String>,
    },
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("odelie: {}", e.message);
            e.code
        }
    }
}

/// An error that already knows its exit code.
struct CliError {
    message: String,
    code: i32,
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        message: message.into(),
        code: 2,
    }
}

fn failure(message: impl Into<String>) -> CliError {
    CliError {
        message: message.into(),
        code: 1,
    }
}

fn parse_seed(s: &str) -> Option<u64> {
    let t = s.trim();
    if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16).ok()
    } else {
        t.parse().ok()
    }
}

fn resolve_seed(cli: &Cli) -> Result<u64, CliError> {
    if let Some(s) = &cli.seed {
        return parse_seed(s).ok_or_else(|| usage(format!("unreadable --seed value {s:?}")));
    }
    if let Ok(s) = std::env::var("ODELIE_SEED") {
        return parse_seed(&s)
            .ok_or_else(|| usage(format!("unreadable ODELIE_SEED value {s:?}")));
    }
    Ok(DEFAULT_SEED)
}

/// A resolved equation: the catalog entry too, when the name matched one.
struct EqContext {
    eq: DifferenceEquation,
    entry: Option<CatalogEntry>,
}

fn resolve_equation(name: &str) -> Result<EqContext, CliError> {
    if let Some(entry) = find_equation(name) {
        return Ok(EqContext {
            eq: entry.equation.clone(),
            entry: Some(entry),
        });
    }
    let text = std::fs::read_to_string(name).map_err(|e| {
        usage(format!(
            "--eq {name:?} is neither a catalog equation nor a readable file: {e}"
        ))
    })?;
    let spec: EquationSpec = serde_json::from_str(&text)
        .map_err(|e| usage(format!("equation file {name:?}: {e}")))?;
    let eq = DifferenceEquation::from_spec(&spec)
        .map_err(|e| usage(format!("equation file {name:?}: {e}")))?;
    Ok(EqContext { eq, entry: None })
}

fn make_cfg(ctx: &EqContext, cli: &Cli, seed: u64) -> ZeroTestConfig {
    let mut cfg = ctx.eq.zero_config();
    cfg.seed = seed;
    if let Some(s) = cli.samples {
        cfg.samples = s;
        cfg.min_finite = (s * 3 / 5).max(3).min(cfg.min_finite);
    }
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    cfg
}

/// Resolve a characteristic argument: catalog label first, then formula.
fn resolve_q(ctx: &EqContext, text: &str) -> Result<Characteristic, CliError> {
    if let Some(entry) = &ctx.entry {
        if let Some(c) = entry
            .symmetries
            .iter()
            .find(|c| c.label.eq_ignore_ascii_case(text))
        {
            return Ok(c.clone());
        }
    }
    let q = parse(text).map_err(|e| usage(format!("characteristic {text:?}: {e}")))?;
    Ok(Characteristic::new(text, q))
}

/// Resolve an integral argument: catalog label first, then formula.
fn resolve_phi(ctx: &EqContext, text: &str) -> Result<FirstIntegral, CliError> {
    if let Some(entry) = &ctx.entry {
        if let Some(phi) = entry
            .integrals
            .iter()
            .find(|p| p.label.eq_ignore_ascii_case(text))
        {
            return Ok(phi.clone());
        }
    }
    let phi = parse(text).map_err(|e| usage(format!("integral {text:?}: {e}")))?;
    Ok(FirstIntegral::new(text, phi))
}

fn parse_basis(text: &str) -> Result<Vec<Expr>, CliError> {
    let mut basis = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        basis.push(parse(part).map_err(|e| usage(format!("basis entry {part:?}: {e}")))?);
    }
    if basis.is_empty() {
        return Err(usage("--basis must contain at least one formula"));
    }
    Ok(basis)
}

fn emit(report: &Report, json: bool) -> i32 {
    if json {
        say!(
            "{}",
            serde_json::to_string_pretty(report).expect("reports serialize")
        );
    } else {
        say!("{}: {}", report.verdict, report.claim);
        if let Some(obj) = report.details.as_object() {
            for (k, v) in obj {
                say!("  {k}: {v}");
            }
        }
        say!("  maxResidual: {:.3e}  (samples: {}, seed: {})",
            report.max_residual, report.samples, report.seed);
    }
    if report.passed() {
        0
    } else {
        1
    }
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    let seed = resolve_seed(cli)?;
    match &cli.command {
        Command::VerifySymmetry { eq, q } => {
            let ctx = resolve_equation(eq)?;
            let cfg = make_cfg(&ctx, cli, seed);
            let q = resolve_q(&ctx, q)?;
            let r = verify_symmetry(&ctx.eq, &q.q, &cfg)
                .map_err(|e| usage(format!("verify-symmetry: {e}")))?;
            let report = Report::new(
                format!("{} generates a symmetry of {}", q.label, ctx.eq.name),
                r.verdict,
            )
            .with_zero_test(&r.defect)
            .with_detail("flowVerdict", r.flow.verdict.to_string())
            .with_detail("flowMaxResidual", r.flow.max_residual)
            .with_detail("flowOrbitsUsed", r.flow.orbits_used);
            Ok(emit(&report, cli.json))
        }
        Command::VerifyIntegral { eq, phi } => {
            let ctx = resolve_equation(eq)?;
            let cfg = make_cfg(&ctx, cli, seed);
            let phi = resolve_phi(&ctx, phi)?;
            let r = verify_first_integral(&ctx.eq, &phi.phi, &cfg)
                .map_err(|e| usage(format!("verify-integral: {e}")))?;
            let report = Report::new(
                format!("{} is a first integral of {}", phi.label, ctx.eq.name),
                r.verdict,
            )
            .with_zero_test(&r.defect)
            .with_detail("driftVerdict", r.drift.verdict.to_string())
            .with_detail("maxRelDrift", r.drift.max_rel_drift)
            .with_detail("driftOrbitsUsed", r.drift.orbits_used);
            Ok(emit(&report, cli.json))
        }
        Command::Deteq { eq, q } => {
            let ctx = resolve_equation(eq)?;
            let cfg = make_cfg(&ctx, cli, seed);
            let q = resolve_q(&ctx, q)?;
            let residual = deteq_residual(&ctx.eq, &q.q)
                .map_err(|e| usage(format!("deteq: {e}")))?;
            let zr = is_zero(&residual, &cfg);
            let report = Report::new(
                format!(
                    "{} satisfies the reduced determining equation of {}",
                    q.label, ctx.eq.name
                ),
                Verdict::from(zr.verdict),
            )
            .with_zero_test(&zr)
            .with_detail("residual", residual.to_string());
            Ok(emit(&report, cli.json))
        }
        Command::FindSymmetries { eq, basis } => {
            let ctx = resolve_equation(eq)?;
            let basis = parse_basis(basis)?;
            let cfg = AnsatzConfig {
                samples: cli.samples.unwrap_or(50),
                rank_tol: 1e-8,
                seed,
            };
            let found = find_symmetries_ansatz(&ctx.eq, &basis, &cfg)
                .map_err(|e| failure(format!("find-symmetries: {e}")))?;
            let report = Report::new(
                format!(
                    "symmetry span of the {}-element ansatz for {}",
                    basis.len(),
                    ctx.eq.name
                ),
                Verdict::Pass,
            )
            .with_detail("dimension", found.dimension())
            .with_detail("vectors", &found.vectors)
            .with_detail("singularValues", &found.singular_values)
            .with_detail("rows", found.rows)
            .with_detail("seed", seed_string(seed));
            if cli.json {
                return Ok(emit(&report, true));
            }
            say!(
                "{}: dimension {} (matrix {} rows x {} cols)",
                ctx.eq.name,
                found.dimension(),
                found.rows,
                basis.len()
            );
            for v in &found.vectors {
                say!("  {}", format_vector(v));
            }
            Ok(0)
        }
        Command::FindIntegrals { eq, basis } => {
            let ctx = resolve_equation(eq)?;
            let basis = parse_basis(basis)?;
            let cfg = AnsatzConfig {
                samples: cli.samples.unwrap_or(50),
                rank_tol: 1e-8,
                seed,
            };
            let found = find_integrals_ansatz(&ctx.eq, &basis, &cfg)
                .map_err(|e| failure(format!("find-integrals: {e}")))?;
            let report = Report::new(
                format!(
                    "first-integral span of the {}-element ansatz for {} (constants excluded)",
                    basis.len(),
                    ctx.eq.name
                ),
                Verdict::Pass,
            )
            .with_detail("dimension", found.dimension())
            .with_detail("vectors", &found.vectors)
            .with_detail("singularValues", &found.singular_values)
            .with_detail("rows", found.rows)
            .with_detail("seed", seed_string(seed));
            if cli.json {
                return Ok(emit(&report, true));
            }
            say!(
                "{}: dimension {} (matrix {} rows x {} cols)",
                ctx.eq.name,
                found.dimension(),
                found.rows,
                basis.len()
            );
            for v in &found.vectors {
                say!("  {}", format_vector(v));
            }
            Ok(0)
        }
        Command::Multiplier { eq, phi } => {
            let ctx = resolve_equation(eq)?;
            let cfg = make_cfg(&ctx, cli, seed);
            let phi = resolve_phi(&ctx, phi)?;
            let m = extract_multiplier(&ctx.eq, &phi, &cfg)
                .map_err(|e| failure(format!("multiplier: {e}")))?;
            // Prefer the catalog's simplified form when it matches.
            let pretty = ctx
                .entry
                .as_ref()
                .and_then(|entry| {
                    entry.multipliers.iter().find(|known| {
                        is_zero(&Expr::sub(m.lambda.clone(), (*known).clone()), &cfg).is_zero()
                    })
                })
                .map(|known| known.to_string())
                .unwrap_or_else(|| m.lambda.to_string());
            if cli.json {
                let report = Report::new(
                    format!("multiplier of {} for {}", phi.label, ctx.eq.name),
                    Verdict::Pass,
                )
                .with_detail("multiplier", &pretty)
                .with_detail("seed", seed_string(cfg.seed));
                return Ok(emit(&report, true));
            }
            say!("{pretty}");
            Ok(0)
        }
        Command::Associate { eq, q, phi } => {
            let ctx = resolve_equation(eq)?;
            let cfg = make_cfg(&ctx, cli, seed);
            let q = resolve_q(&ctx, q)?;
            let phi = resolve_phi(&ctx, phi)?;
            let a = association_value(&ctx.eq, &q, &phi, &cfg);
            if cli.json {
                let mut report = Report::new(
                    format!(
                        "action of {} on {} for {}",
                        a.q_label, a.phi_label, ctx.eq.name
                    ),
                    Verdict::Pass,
                )
                .with_detail("value", a.value.to_string())
                .with_detail("seed", seed_string(cfg.seed));
                report.detail("constant", a.constant);
                return Ok(emit(&report, true));
            }
            match a.constant {
                Some(c) => say!("constant: {c}"),
                None => say!("{}", a.value),
            }
            Ok(0)
        }
        Command::Classify { eq, phis } => {
            let ctx = resolve_equation(eq)?;
            let cfg = make_cfg(&ctx, cli, seed);
            let integrals: Vec<FirstIntegral> = match phis {
                Some(list) => {
                    let mut out = Vec::new();
                    for part in list.split(',') {
                        let part = part.trim();
                        if !part.is_empty() {
                            out.push(resolve_phi(&ctx, part)?);
                        }
                    }
                    out
                }
                None => ctx
                    .entry
                    .as_ref()
                    .map(|e| e.integrals.clone())
                    .unwrap_or_default(),
            };
            if integrals.is_empty() {
                return Err(usage(
                    "no integrals to classify: pass --phis or pick a catalog equation with integrals",
                ));
            }
            let classes = classify_equivalence(&ctx.eq, &integrals, &cfg, 1e-8)
                .map_err(|e| failure(format!("classify: {e}")))?;
            if cli.json {
                let report = Report::new(
                    format!("multiplier equivalence classes for {}", ctx.eq.name),
                    Verdict::Pass,
                )
                .with_detail("rank", classes.rank)
                .with_detail(
                    "groups",
                    classes
                        .groups
                        .iter()
                        .map(|g| {
                            g.iter()
                                .map(|i| integrals[*i].label.clone())
                                .collect::<Vec<_>>()
                        })
                        .collect::<Vec<_>>(),
                )
                .with_detail(
                    "trivial",
                    classes
                        .trivial
                        .iter()
                        .map(|i| integrals[*i].label.clone())
                        .collect::<Vec<_>>(),
                )
                .with_detail("seed", seed_string(cfg.seed));
                return Ok(emit(&report, true));
            }
            say!("rank: {}", classes.rank);
            for (gi, g) in classes.groups.iter().enumerate() {
                let labels: Vec<&str> = g.iter().map(|i| integrals[*i].label.as_str()).collect();
                say!("class {}: {}", gi + 1, labels.join(", "));
            }
            if !classes.trivial.is_empty() {
                let labels: Vec<&str> = classes
                    .trivial
                    .iter()
                    .map(|i| integrals[*i].label.as_str())
                    .collect();
                say!("trivial (zero multiplier): {}", labels.join(", "));
            }
            Ok(0)
        }
        Command::Orbit { eq, init, steps, n0 } => {
            let ctx = resolve_equation(eq)?;
            let mut values = Vec::new();
            for part in init.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                values.push(
                    part.parse::<f64>()
                        .map_err(|e| usage(format!("--init entry {part:?}: {e}")))?,
                );
            }
            let n0 = n0.unwrap_or(ctx.eq.domain.n_min);
            if ctx.eq.name.eq_ignore_ascii_case("E2") && n0 <= 0 {
                return Err(usage(
                    "E2 involves the factor n/(n+4): orbits need a base index n0 >= 1",
                ));
            }
            let orbit = iterate_orbit(&ctx.eq, &values, n0, *steps)
                .map_err(|e| failure(format!("orbit: {e}")))?;
            let rendered: Vec<String> = orbit.values.iter().map(|v| format!("{v}")).collect();
            if cli.json {
                say!(
                    "{}",
                    serde_json::json!({
                        "equation": ctx.eq.name,
                        "n0": orbit.n0,
                        "values": orbit.values,
                    })
                );
            } else {
                say!("{}", rendered.join(", "));
            }
            Ok(0)
        }
        Command::Catalog { eq } => {
            let entries = match eq {
                Some(name) => vec![find_equation(name)
                    .ok_or_else(|| usage(format!("{name:?} is not a catalog equation")))?],
                None => default_catalog(),
            };
            let reports = run_catalog(&entries);
            if cli.json {
                say!(
                    "{}",
                    serde_json::to_string_pretty(&reports).expect("reports serialize")
                );
            } else {
                for r in &reports {
                    say!("{}: {}", r.verdict, r.claim);
                }
                let failed = reports.iter().filter(|r| !r.passed()).count();
                say!(
                    "{} claims, {} passed, {} failed",
                    reports.len(),
                    reports.len() - failed,
                    failed
                );
            }
            Ok(if reports.iter().all(|r| r.passed()) { 0 } else { 1 })
        }
    }
}

fn format_vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:+.6}")).collect();
    format!("[{}]", parts.join(", "))
}
