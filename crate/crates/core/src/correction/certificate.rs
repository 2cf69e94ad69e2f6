//! Named pass/fail records for every inequality a construction claims.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// How `achieved_value` is compared against `claimed_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "<=")]
    LessEq,
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = ">=")]
    GreaterEq,
    /// Exact equality of the two doubles.
    #[serde(rename = "==")]
    Equal,
}

impl Relation {
    pub fn holds(self, achieved: f64, bound: f64) -> bool {
        match self {
            Relation::Less => achieved < bound,
            Relation::LessEq => achieved <= bound,
            Relation::Greater => achieved > bound,
            Relation::GreaterEq => achieved >= bound,
            Relation::Equal => achieved == bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Less => "<",
            Relation::LessEq => "<=",
            Relation::Greater => ">",
            Relation::GreaterEq => ">=",
            Relation::Equal => "==",
        }
    }
}

/// One checked claim. `pass` may come from exact arithmetic even though the
/// two numbers are shown as doubles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conclusion {
    pub name: String,
    pub relation: Relation,
    pub claimed_bound: f64,
    pub achieved_value: f64,
    pub pass: bool,
}

impl Conclusion {
    /// Pass decided by comparing the two doubles.
    pub fn check(name: &str, achieved: f64, relation: Relation, bound: f64) -> Self {
        Conclusion {
            name: name.to_string(),
            relation,
            claimed_bound: bound,
            achieved_value: achieved,
            pass: relation.holds(achieved, bound),
        }
    }

    /// Pass decided elsewhere (typically on exact rationals).
    pub fn exact(name: &str, achieved: f64, relation: Relation, bound: f64, pass: bool) -> Self {
        Conclusion {
            name: name.to_string(),
            relation,
            claimed_bound: bound,
            achieved_value: achieved,
            pass,
        }
    }

    /// `|achieved - expected| <= tol`, reported as a deviation against `tol`.
    pub fn close(name: &str, achieved: f64, expected: f64, tol: f64) -> Self {
        let dev = (achieved - expected).abs();
        Conclusion::check(name, dev, Relation::LessEq, tol)
    }

    /// Signed room left: positive when the claim holds with margin.
    pub fn slack(&self) -> f64 {
        match self.relation {
            Relation::Less | Relation::LessEq => self.claimed_bound - self.achieved_value,
            Relation::Greater | Relation::GreaterEq => self.achieved_value - self.claimed_bound,
            Relation::Equal => -(self.achieved_value - self.claimed_bound).abs(),
        }
    }
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<28} {:.6e} {} {:.6e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.achieved_value,
            self.relation.symbol(),
            self.claimed_bound
        )
    }
}

/// A construction's full claim sheet plus the raw data needed to recheck it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: String,
    pub conclusions: Vec<Conclusion>,
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub trace: Vec<Value>,
    #[serde(default)]
    pub data: Value,
}

impl Certificate {
    pub fn new(kind: &str) -> Self {
        Certificate {
            kind: kind.to_string(),
            conclusions: Vec::new(),
            params: BTreeMap::new(),
            trace: Vec::new(),
            data: Value::Null,
        }
    }

    pub fn push(&mut self, c: Conclusion) {
        self.conclusions.push(c);
    }

    pub fn param<V: Into<Value>>(&mut self, key: &str, value: V) {
        self.params.insert(key.to_string(), value.into());
    }

    pub fn passed(&self) -> bool {
        self.conclusions.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Conclusion> {
        self.conclusions.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&Conclusion> {
        self.conclusions.iter().filter(|c| !c.pass).collect()
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} certificate", self.kind)?;
        for c in &self.conclusions {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_and_slack() {
        let c = Conclusion::check("x", 1.0, Relation::Less, 2.0);
        assert!(c.pass);
        assert_eq!(c.slack(), 1.0);
        let c = Conclusion::check("y", 2.0, Relation::Greater, 2.0);
        assert!(!c.pass);
        assert!(Conclusion::close("z", 1.0, 1.0 + 1e-12, 1e-10).pass);
    }

    #[test]
    fn certificate_collects() {
        let mut cert = Certificate::new("demo");
        cert.push(Conclusion::check("a", 0.0, Relation::LessEq, 0.0));
        cert.push(Conclusion::check("b", 1.0, Relation::Less, 0.0));
        assert!(!cert.passed());
        assert_eq!(cert.failures().len(), 1);
        assert!(cert.get("a").unwrap().pass);
        assert!(cert.to_string().contains("FAIL b"));
    }
}
