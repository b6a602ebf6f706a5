//! Verification certificates: canonical JSON with sorted keys and hex-encoded
//! interval endpoints.

use std::time::Duration;

use serde_json::{json, Map, Value};

use crate::ball::{Ball, CBall};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Operation anchors a certificate may cite.
pub const ANCHORS: &[&str] = &[
    "cyclo-core::torsion_test",
    "galois-algebra::annihilator_ideal",
    "galois-algebra::e_field",
    "lvalues::leading_term",
    "lvalues::log_gamma_oracle",
    "lvalues::cyclotomic_sum",
    "lvalues::l_order",
    "lvalues::theta_star",
    "lvalues::regulator",
    "lvalues::theta_map",
    "euler-systems::epsilon_system",
    "euler-systems::verify_distribution",
    "euler-systems::circular_axiom_check",
    "euler-systems::es_iso",
    "euler-systems::classical_to_rank_one",
    "euler-systems::a_twist",
    "euler-systems::coleman_reduction_check",
    "euler-systems::tau_kernel_projection_check",
    "euler-systems::norm_coherence_check",
    "bidual-lattice::dual_lattice",
    "bidual-lattice::bidual_membership",
    "bidual-lattice::xi_map",
    "bidual-lattice::rank_one_bidual",
    "kolyvagin::v_q",
    "kolyvagin::residue_log",
    "kolyvagin::derivative_op",
    "kolyvagin::s_membership",
    "kolyvagin::hypotheses_check",
];

/// One verified statement with its witnesses (non-empty on failure).
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub details: Value,
    pub witnesses: Vec<Value>,
}

impl Check {
    pub fn pass(name: impl Into<String>, details: Value) -> Self {
        Check { name: name.into(), passed: true, details, witnesses: Vec::new() }
    }

    pub fn fail(name: impl Into<String>, details: Value, witness: Value) -> Self {
        Check { name: name.into(), passed: false, details, witnesses: vec![witness] }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "passed": self.passed,
            "details": self.details,
            "witnesses": self.witnesses,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub command: String,
    pub inputs: Value,
    pub anchors: Vec<String>,
    pub oracles: Vec<String>,
    pub precision: Value,
    pub truncation: Value,
    pub checks: Vec<Check>,
    pub value: Value,
    /// omitted in deterministic mode
    pub wall_time: Option<Duration>,
}

impl Certificate {
    pub fn new(command: &str, inputs: Value) -> Self {
        Certificate {
            command: command.to_string(),
            inputs,
            anchors: Vec::new(),
            oracles: Vec::new(),
            precision: Value::Null,
            truncation: Value::Null,
            checks: Vec::new(),
            value: Value::Null,
            wall_time: None,
        }
    }

    pub fn anchor(mut self, a: &str) -> Self {
        debug_assert!(ANCHORS.contains(&a), "unknown anchor {a}");
        if !self.anchors.iter().any(|x| x == a) {
            self.anchors.push(a.to_string());
        }
        self
    }

    pub fn oracle(mut self, o: &str) -> Self {
        self.oracles.push(o.to_string());
        self
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> Value {
        let mut anchors = self.anchors.clone();
        anchors.sort();
        let mut m = Map::new();
        m.insert("tool_version".into(), json!(TOOL_VERSION));
        m.insert("command".into(), json!(self.command));
        m.insert("inputs".into(), self.inputs.clone());
        m.insert("anchors".into(), json!(anchors));
        m.insert("oracles".into(), json!(self.oracles));
        m.insert("precision".into(), self.precision.clone());
        m.insert("truncation".into(), self.truncation.clone());
        m.insert("result".into(), json!(if self.passed() { "pass" } else { "fail" }));
        m.insert("value".into(), self.value.clone());
        m.insert("checks".into(), Value::Array(self.checks.iter().map(Check::to_json).collect()));
        if let Some(t) = self.wall_time {
            m.insert("wall_time_ms".into(), json!(t.as_millis() as u64));
        }
        Value::Object(m)
    }

    /// Serialized with sorted keys; byte-stable for equal inputs.
    pub fn to_canonical_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("json")
    }
}

/// Anchors not listed in [`ANCHORS`].
pub fn unknown_anchors(cert: &Value) -> Vec<String> {
    cert["anchors"]
        .as_array()
        .map(|a| a.iter().filter_map(Value::as_str).filter(|s| !ANCHORS.contains(s)).map(str::to_string).collect())
        .unwrap_or_default()
}

pub fn ball_json(b: &Ball) -> Value {
    let (lo, hi) = b.hex_endpoints();
    json!({"lo": lo, "hi": hi, "approx": b.to_f64()})
}

pub fn cball_json(z: &CBall) -> Value {
    json!({"re": ball_json(&z.re), "im": ball_json(&z.im)})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_sorted_and_stable() {
        let mut c = Certificate::new("x", json!({"b": 1, "a": 2})).anchor("kolyvagin::v_q");
        c.push(Check::pass("ok", Value::Null));
        let s = c.to_canonical_string();
        assert_eq!(s, c.clone().to_canonical_string());
        assert!(s.find("\"anchors\"").unwrap() < s.find("\"checks\"").unwrap());
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(unknown_anchors(&c.to_json()).is_empty());
        c.push(Check::fail("bad", Value::Null, json!("w")));
        assert!(!c.passed());
        assert_eq!(c.to_json()["result"], "fail");
    }
}
