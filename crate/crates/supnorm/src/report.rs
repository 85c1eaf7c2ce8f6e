//! Machine-readable check records: one JSON object per check, plus a flat CSV.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    #[serde(rename = "ref")]
    pub reference: String,
    pub params: Value,
    pub observed: Value,
    pub bound: Value,
    pub status: Status,
}

impl Check {
    pub fn new(id: &str, reference: &str, params: Value, observed: Value, bound: Value, ok: bool) -> Self {
        Self {
            id: id.into(),
            reference: reference.into(),
            params,
            observed,
            bound,
            status: if ok { Status::Pass } else { Status::Fail },
        }
    }

    /// observed ≤ bound.
    pub fn at_most(id: &str, reference: &str, params: Value, observed: f64, bound: f64) -> Self {
        Self::new(id, reference, params, json!(observed), json!(bound), observed <= bound)
    }

    /// |observed − target| ≤ tol.
    pub fn near(id: &str, reference: &str, params: Value, observed: f64, target: f64, tol: f64) -> Self {
        Self::new(
            id,
            reference,
            params,
            json!(observed),
            json!({ "target": target, "tol": tol }),
            (observed - target).abs() <= tol,
        )
    }

    pub fn exact<T: Serialize + PartialEq>(id: &str, reference: &str, params: Value, observed: T, expected: T) -> Self {
        let ok = observed == expected;
        Self::new(id, reference, params, json!(observed), json!(expected), ok)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(suite: &str, seed: u64, checks: Vec<Check>) -> Self {
        Self { schema: SCHEMA_VERSION, suite: suite.into(), seed, checks }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are plain JSON")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(["suite", "id", "ref", "params", "observed", "bound", "status"]).unwrap();
        for c in &self.checks {
            let status = if c.passed() { "pass" } else { "fail" };
            w.write_record([
                self.suite.as_str(),
                &c.id,
                &c.reference,
                &c.params.to_string(),
                &c.observed.to_string(),
                &c.bound.to_string(),
                status,
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn summary(&self) -> String {
        let fails = self.failures();
        let mut s = format!("{}: {}/{} checks passed\n", self.suite, self.checks.len() - fails.len(), self.checks.len());
        for c in fails {
            s += &format!("  FAIL {} [{}] observed {} bound {}\n", c.id, c.reference, c.observed, c.bound);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_uses_ref_key() {
        let r = Report::new("x", 1, vec![Check::at_most("a", "lemma", json!({"p": 3}), 0.5, 1.0)]);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["checks"][0]["ref"], "lemma");
        assert_eq!(v["checks"][0]["status"], "pass");
        assert!(r.to_csv().lines().count() == 2);
    }

    #[test]
    fn near_and_exact() {
        assert!(!Check::near("b", "", Value::Null, 0.9, 0.75, 0.1).passed());
        assert!(Check::exact("c", "", Value::Null, "5/24", "5/24").passed());
    }
}
