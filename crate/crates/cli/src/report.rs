//! Command reports and their text and JSON renderings.
//!
//! Every float is written as `{:.16e}`, which keeps 17 significant digits
//! and makes equal runs byte-identical.

use mdqec::numerics::{ComplexMatrix, Tolerance};
use serde_json::{Map, Value};

/// Whether a command produced a positive answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Positive,
    /// A computed negative answer (not correctable, not unitarily correctable).
    Negative,
    /// A certificate or regression check did not pass.
    Failed,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Positive => 0,
            Outcome::Negative => 2,
            Outcome::Failed => 1,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Outcome::Positive => "positive",
            Outcome::Negative => "negative",
            Outcome::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Map<String, Value>,
    pub tolerance: Tolerance,
    pub seed: u64,
    pub outcome: Outcome,
}

impl Report {
    pub fn new(command: &str, tolerance: Tolerance, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            inputs: Map::new(),
            results: Map::new(),
            tolerance,
            seed,
            outcome: Outcome::Positive,
        }
    }

    pub fn input(&mut self, key: &str, value: Value) -> &mut Self {
        self.inputs.insert(key.to_string(), value);
        self
    }

    pub fn result(&mut self, key: &str, value: Value) -> &mut Self {
        self.results.insert(key.to_string(), value);
        self
    }

    pub fn to_value(&self) -> Value {
        let mut root = Map::new();
        root.insert("command".into(), Value::String(self.command.clone()));
        root.insert("inputs".into(), Value::Object(self.inputs.clone()));
        root.insert("outcome".into(), Value::String(self.outcome.label().into()));
        root.insert("results".into(), Value::Object(self.results.clone()));
        root.insert("seed".into(), Value::from(self.seed));
        let mut tol = Map::new();
        tol.insert("abs_eps".into(), num(self.tolerance.abs_eps));
        tol.insert("rank_rel_eps".into(), num(self.tolerance.rank_rel_eps));
        root.insert("tolerances".into(), Value::Object(tol));
        Value::Object(root)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_value()).expect("report serialises");
        text.push('\n');
        text
    }

    /// One `path = value` line per leaf; arrays of scalars stay on one line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        flatten("", &self.to_value(), &mut out);
        out
    }
}

fn flatten(path: &str, value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let child = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                flatten(&child, v, out);
            }
        }
        Value::Array(items) if items.iter().any(|v| v.is_array() || v.is_object()) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{path}[{i}]"), v, out);
            }
        }
        leaf => {
            out.push_str(path);
            out.push_str(" = ");
            out.push_str(&leaf.to_string());
            out.push('\n');
        }
    }
}

/// A float as a JSON number with 17 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::from_str(&format!("{x:.16e}")).expect("formatted float is valid JSON")
    } else {
        Value::Null
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Row-major nested `[re, im]` pairs.
pub fn matrix(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| nums(&[m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

pub fn matrices(ms: &[ComplexMatrix]) -> Value {
    Value::Array(ms.iter().map(matrix).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use mdqec::numerics::identity;

    #[test]
    fn floats_keep_full_precision() {
        assert_eq!(num(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(num(f64::NAN), Value::Null);
        let back: f64 = serde_json::from_value(num(std::f64::consts::PI)).unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn text_lists_leaves() {
        let mut r = Report::new("demo", Tolerance::default(), 3);
        r.result("rank", Value::from(2)).result("unit", matrix(&identity(1)));
        let text = r.to_text();
        assert!(text.contains("results.rank = 2\n"));
        assert!(text.contains("results.unit[0][0] = [1.0000000000000000e+0,0.0000000000000000e+0]\n"));
        assert!(text.contains("seed = 3\n"));
        assert!(r.to_json().contains("\"outcome\": \"positive\""));
    }
}
