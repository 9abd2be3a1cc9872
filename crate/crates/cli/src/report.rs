use hypermatch::rational::{self, Rational};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use hypermatch::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotRun,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotRun => "not-run",
        }
    }
}

/// Machine-readable output of one subcommand. Timings are never included so
/// identical inputs give identical bytes.
pub struct RunReport {
    pub command: String,
    pub digest: String,
    pub seed: Option<u64>,
    pub float: bool,
    pub fields: Map<String, Value>,
    pub edges: Vec<Map<String, Value>>,
    pub verdicts: Vec<(&'static str, Verdict)>,
}

impl RunReport {
    pub fn new(command: &str, instance: &Instance, seed: Option<u64>, float: bool) -> Self {
        Self {
            command: command.to_string(),
            digest: digest(instance),
            seed,
            float,
            fields: Map::new(),
            edges: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.to_string(), value);
    }

    pub fn rational(&mut self, key: &str, value: &Rational) {
        put_rational(&mut self.fields, key, value, self.float);
    }

    pub fn verdict(&mut self, name: &'static str, verdict: Verdict) {
        self.verdicts.push((name, verdict));
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|(_, v)| *v != Verdict::Fail)
    }

    pub fn to_json(&self) -> String {
        let verdicts: Map<String, Value> = self
            .verdicts
            .iter()
            .map(|(k, v)| (k.to_string(), json!(v.as_str())))
            .collect();
        let mut out = Map::new();
        out.insert("command".into(), json!(self.command));
        out.insert("instance_digest".into(), json!(self.digest));
        out.insert("seed".into(), json!(self.seed));
        for (k, v) in &self.fields {
            out.insert(k.clone(), v.clone());
        }
        out.insert(
            "edges".into(),
            Value::Array(self.edges.iter().cloned().map(Value::Object).collect()),
        );
        out.insert("verdicts".into(), Value::Object(verdicts));
        serde_json::to_string_pretty(&Value::Object(out)).expect("report serializes") + "\n"
    }

    /// The per-edge table as CSV followed by `# name: verdict` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(first) = self.edges.first() {
            let header: Vec<&str> = first.keys().map(String::as_str).collect();
            out.push_str(&header.join(","));
            out.push('\n');
            for row in &self.edges {
                let cells: Vec<String> = header.iter().map(|k| cell(&row[*k])).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        for (k, v) in &self.verdicts {
            out.push_str(&format!("# {k}: {}\n", v.as_str()));
        }
        out
    }
}

fn cell(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Inserts `key` as a `"p/q"` string, plus `key_approx` as a float when asked.
pub fn put_rational(map: &mut Map<String, Value>, key: &str, value: &Rational, float: bool) {
    map.insert(key.to_string(), json!(rational::format(value)));
    if float {
        map.insert(format!("{key}_approx"), json!(rational::to_f64(value)));
    }
}

pub fn rationals(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(|v| json!(rational::format(v))).collect())
}

/// SHA-256 of the canonical instance serialization.
pub fn digest(instance: &Instance) -> String {
    hex::encode(Sha256::digest(instance.to_json().as_bytes()))
}
