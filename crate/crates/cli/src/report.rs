//! The JSON report written by every subcommand.

use qheis_core::AxiomReport;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ConfigEcho;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Suite names, or the input word.
    pub args: Vec<String>,
    pub config: ConfigEcho,
    pub checks: Vec<AxiomReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coefficients: Option<Vec<GCoefficient>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub normal_form: Option<NormalForm>,
    pub passed: bool,
    /// Only with `--timing`; wall-clock data would break byte-identical reports.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<Timing>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cache: Option<CacheStats>,
}

/// Coefficient of `h^h u^u` in `G`, a polynomial in `C` as `[exponent, "p/q"]` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GCoefficient {
    pub h: usize,
    pub u: i32,
    pub value: Vec<(u32, String)>,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalForm {
    pub text: String,
    pub terms: Vec<NormalTerm>,
}

/// One ordered monomial with its central coefficient, encoded as
/// `{cap, terms: [[h_exponent, [[C_exponent, "p/q"], ...]], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalTerm {
    pub modes: Vec<String>,
    pub coeff: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timing {
    pub total_ms: u64,
    pub suites: Vec<SuiteTiming>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteTiming {
    pub suite: String,
    pub ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
}

impl Report {
    pub fn new(command: &str, args: Vec<String>, config: ConfigEcho) -> Self {
        Report {
            schema_version: REPORT_SCHEMA_VERSION,
            tool: "qheis".into(),
            version: crate::TOOL_VERSION.into(),
            command: command.into(),
            args,
            config,
            checks: Vec::new(),
            coefficients: None,
            normal_form: None,
            passed: true,
            timing: None,
            cache: None,
        }
    }

    pub fn push(&mut self, rep: AxiomReport) {
        self.passed &= rep.passed();
        self.checks.push(rep);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            let params: Vec<String> = c.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!("{status} {} [{}] checked={}", c.axiom, params.join(" "), c.checked));
            if let Some(e) = c.exponent {
                out.push_str(&format!(" exponent={e}"));
            }
            if let Some(w) = &c.witness {
                out.push_str(&format!(" witness: {w}"));
            }
            out.push('\n');
        }
        out
    }
}
