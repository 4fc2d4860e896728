use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

/// Failing instances kept per check.
const KEEP_FAILURES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// Fails when the value drops below `-tolerance`.
    Gap,
    /// Fails when `|value|` exceeds the tolerance.
    Residual,
}

impl Kind {
    fn fails(self, value: f64, tol: f64) -> bool {
        match self {
            Self::Gap => !(value >= -tol),
            Self::Residual => !(value.abs() <= tol),
        }
    }

    fn worse(self, a: f64, b: f64) -> bool {
        match self {
            Self::Gap => a < b || a.is_nan(),
            Self::Residual => a.abs() > b.abs() || a.is_nan(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub instance: String,
    #[serde(with = "lossless")]
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub reference: String,
    pub kind: Kind,
    /// Smallest gap or largest residual seen.
    #[serde(with = "lossless")]
    pub worst: f64,
    pub tolerance: f64,
    pub instances: usize,
    pub failures: usize,
    pub pass: bool,
    pub first_failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub total_checks: usize,
    pub failed_checks: usize,
    pub checks: Vec<CheckRecord>,
    /// Informational values (fitted slopes, coefficients, counts).
    pub info: BTreeMap<String, serde_json::Value>,
}

/// One value for one check on one instance.
#[derive(Debug, Clone)]
pub struct Observation {
    pub check: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub message: Option<String>,
}

impl Observation {
    pub fn new(check: &'static str, value: f64, tolerance: f64) -> Self {
        Self {
            check,
            value,
            tolerance,
            message: None,
        }
    }

    pub fn with_message(mut self, message: impl Into<String>) -> Self {
        self.message = Some(message.into());
        self
    }
}

/// Static description of a check.
#[derive(Debug, Clone, Copy)]
pub struct CheckDef {
    pub name: &'static str,
    pub reference: &'static str,
    pub kind: Kind,
}

/// Folds observations into check records in the order they are fed, so
/// feeding instances by id gives worker-count independent output.
pub struct Aggregator {
    suite: String,
    seed: u64,
    order: Vec<&'static str>,
    records: BTreeMap<&'static str, CheckRecord>,
    info: BTreeMap<String, serde_json::Value>,
}

impl Aggregator {
    pub fn new(suite: &str, seed: u64, defs: &[CheckDef]) -> Self {
        let mut a = Self {
            suite: suite.to_string(),
            seed,
            order: Vec::new(),
            records: BTreeMap::new(),
            info: BTreeMap::new(),
        };
        for d in defs {
            a.define(*d);
        }
        a
    }

    pub fn define(&mut self, d: CheckDef) {
        if self.records.contains_key(d.name) {
            return;
        }
        self.order.push(d.name);
        self.records.insert(
            d.name,
            CheckRecord {
                name: d.name.to_string(),
                reference: d.reference.to_string(),
                kind: d.kind,
                worst: match d.kind {
                    Kind::Gap => f64::INFINITY,
                    Kind::Residual => 0.0,
                },
                tolerance: 0.0,
                instances: 0,
                failures: 0,
                pass: true,
                first_failures: Vec::new(),
            },
        );
    }

    pub fn observe(&mut self, instance: &str, o: Observation) {
        let r = self.records.get_mut(o.check).unwrap_or_else(|| panic!("undefined check {}", o.check));
        r.instances += 1;
        r.tolerance = r.tolerance.max(o.tolerance);
        if r.instances == 1 || r.kind.worse(o.value, r.worst) {
            r.worst = o.value;
        }
        if r.kind.fails(o.value, o.tolerance) {
            r.failures += 1;
            r.pass = false;
            if r.first_failures.len() < KEEP_FAILURES {
                r.first_failures.push(Failure {
                    instance: instance.to_string(),
                    value: o.value,
                    message: o.message,
                });
            }
        }
    }

    pub fn observe_all(&mut self, instance: &str, obs: Vec<Observation>) {
        for o in obs {
            self.observe(instance, o);
        }
    }

    pub fn info(&mut self, key: &str, value: impl Serialize) {
        self.info
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable info"));
    }

    pub fn finish(mut self) -> SuiteResult {
        let checks: Vec<CheckRecord> = self
            .order
            .iter()
            .map(|k| self.records.remove(k).expect("defined"))
            .map(|mut r| {
                if r.instances == 0 {
                    r.worst = 0.0;
                }
                r
            })
            .collect();
        let failed = checks.iter().filter(|c| !c.pass).count();
        SuiteResult {
            schema: SCHEMA,
            suite: self.suite,
            seed: self.seed,
            passed: failed == 0,
            total_checks: checks.len(),
            failed_checks: failed,
            checks,
            info: self.info,
        }
    }
}

impl SuiteResult {
    #[cfg(test)]
    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// One line per check for the terminal.
    pub fn summary_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                format!(
                    "{} {}/{} worst={:.6e} tol={:.1e} n={} failures={}",
                    if c.pass { "PASS" } else { "FAIL" },
                    self.suite,
                    c.name,
                    c.worst,
                    c.tolerance,
                    c.instances,
                    c.failures
                )
            })
            .collect();
        lines.push(format!(
            "{}: {} of {} checks passed",
            self.suite,
            self.total_checks - self.failed_checks,
            self.total_checks
        ));
        lines
    }
}

/// Non-finite floats round-trip as the strings `"NaN"`, `"inf"`, `"-inf"`
/// instead of collapsing to `null`.
mod lossless {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&x.to_string())
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}
