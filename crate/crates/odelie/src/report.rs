//! Machine-readable verification reports.

use crate::zerotest::{ZeroTestReport, ZeroVerdict};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }

    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            (Pass, Pass) => Pass,
        }
    }
}

impl From<ZeroVerdict> for Verdict {
    fn from(v: ZeroVerdict) -> Verdict {
        match v {
            ZeroVerdict::Zero => Verdict::Pass,
            ZeroVerdict::NonZero => Verdict::Fail,
            ZeroVerdict::Inconclusive => Verdict::Inconclusive,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        f.write_str(s)
    }
}

/// One verified claim. `details` carries check-specific diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub claim: String,
    pub verdict: Verdict,
    pub max_residual: f64,
    pub samples: usize,
    pub seed: String,
    pub details: serde_json::Value,
}

impl Report {
    pub fn new(claim: impl Into<String>, verdict: Verdict) -> Report {
        Report {
            claim: claim.into(),
            verdict,
            max_residual: 0.0,
            samples: 0,
            seed: seed_string(crate::zerotest::DEFAULT_SEED),
            details: serde_json::json!({}),
        }
    }

    pub fn with_zero_test(mut self, r: &ZeroTestReport) -> Report {
        self.max_residual = r.max_rel_residual;
        self.samples = r.samples;
        self.seed = seed_string(r.seed);
        self.detail("meanResidual", r.mean_rel_residual);
        self.detail("finiteSamples", r.finite);
        self.detail("skippedSamples", r.skipped);
        self
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        if let serde_json::Value::Object(map) = &mut self.details {
            map.insert(
                key.to_string(),
                serde_json::to_value(value).unwrap_or(serde_json::Value::Null),
            );
        }
    }

    pub fn with_detail(mut self, key: &str, value: impl Serialize) -> Report {
        self.detail(key, value);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// Seeds are reported in hex so they can be pasted back into `--seed`.
pub fn seed_string(seed: u64) -> String {
    format!("0x{seed:X}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_serializes_uppercase() {
        assert_eq!(serde_json::to_string(&Verdict::Pass).unwrap(), "\"PASS\"");
        assert_eq!(
            serde_json::to_string(&Verdict::Inconclusive).unwrap(),
            "\"INCONCLUSIVE\""
        );
    }

    #[test]
    fn report_uses_camel_case_and_hex_seed() {
        let r = Report::new("demo", Verdict::Pass).with_detail("elapsedMs", 12);
        let json = serde_json::to_value(&r).unwrap();
        assert!(json.get("maxResidual").is_some());
        assert_eq!(json["seed"], "0x5EED");
        assert_eq!(json["details"]["elapsedMs"], 12);
    }

    #[test]
    fn combine_prefers_failure() {
        use Verdict::*;
        assert_eq!(Pass.combine(Fail), Fail);
        assert_eq!(Inconclusive.combine(Fail), Fail);
        assert_eq!(Pass.combine(Inconclusive), Inconclusive);
        assert_eq!(Pass.combine(Pass), Pass);
    }
}
