//! Outcome of one verification run.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiomReport {
    pub axiom: String,
    pub params: BTreeMap<String, String>,
    pub status: Status,
    /// Number of cases examined.
    pub checked: usize,
    /// First differing coefficient; always present on failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Exponent found by the `s`/`r` searches.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<u32>,
}

impl AxiomReport {
    pub fn pass(axiom: &str, checked: usize) -> Self {
        AxiomReport {
            axiom: axiom.to_string(),
            params: BTreeMap::new(),
            status: Status::Pass,
            checked,
            witness: None,
            exponent: None,
        }
    }

    pub fn fail(axiom: &str, checked: usize, witness: impl Into<String>) -> Self {
        AxiomReport {
            axiom: axiom.to_string(),
            params: BTreeMap::new(),
            status: Status::Fail,
            checked,
            witness: Some(witness.into()),
            exponent: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_exponent(mut self, e: u32) -> Self {
        self.exponent = Some(e);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Folds several reports on the same axiom into one; the first failure wins.
    pub fn merge(axiom: &str, parts: Vec<AxiomReport>) -> AxiomReport {
        let checked = parts.iter().map(|p| p.checked).sum();
        let mut out = match parts.iter().find(|p| !p.passed()) {
            Some(f) => AxiomReport::fail(axiom, checked, f.witness.clone().unwrap_or_default()),
            None => AxiomReport::pass(axiom, checked),
        };
        if let Some(first) = parts.first() {
            out.params = first.params.clone();
        }
        if out.passed() {
            out.exponent = parts.iter().filter_map(|p| p.exponent).max();
        }
        out
    }
}
