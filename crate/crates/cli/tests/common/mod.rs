//! Shared helpers: running the binary and checking documents against the
//! shipped output schema.

#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::OnceLock;

use regex::Regex;
use serde_json::Value;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.stdout))
    }

    /// The error document on stderr, checked against the schema.
    pub fn error(&self) -> (String, String) {
        let doc: Value = serde_json::from_str(self.stderr.trim())
            .unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {}", self.stderr));
        validate("error", &doc);
        let code = doc["error"]["code"].as_str().unwrap().to_string();
        let message = doc["error"]["message"].as_str().unwrap().to_string();
        (code, message)
    }
}

pub fn run(args: &[&str]) -> Run {
    run_env(args, &[])
}

pub fn run_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gaugeint"));
    cmd.args(args).env_remove("GAUGEINT_DEPTH_CAP");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let Output { status, stdout, stderr } = cmd.output().expect("binary runs");
    Run {
        code: status.code().expect("exited normally"),
        stdout: String::from_utf8(stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(stderr).expect("utf-8 stderr"),
    }
}

/// Run a command expected to succeed and validate its JSON against `def`.
pub fn ok(def: &str, args: &[&str]) -> Value {
    let r = run(args);
    assert_eq!(r.code, 0, "{args:?} failed: {}", r.stderr);
    assert!(r.stderr.is_empty(), "unexpected stderr: {}", r.stderr);
    let v = r.json();
    validate(def, &v);
    v
}

fn schema() -> &'static Value {
    static SCHEMA: OnceLock<Value> = OnceLock::new();
    SCHEMA.get_or_init(|| {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/output-schema.json");
        serde_json::from_str(&std::fs::read_to_string(&path).expect("schema file")).expect("schema is JSON")
    })
}

pub fn validate(def: &str, doc: &Value) {
    if let Err(e) = conforms(def, doc) {
        panic!("document does not match $defs/{def}: {e}\n{doc:#}");
    }
}

pub fn conforms(def: &str, doc: &Value) -> Result<(), String> {
    let root = schema();
    let node = root["$defs"].get(def).ok_or_else(|| format!("no $defs/{def} in the schema"))?;
    check(root, node, doc, "$")
}

/// Check `doc` against an ad hoc schema node resolved against the shipped one.
pub fn conforms_to(node: &Value, doc: &Value) -> Result<(), String> {
    check(schema(), node, doc, "$")
}

/// A validator for the keywords the schema uses; any other keyword is an
/// error so that nothing is skipped silently.
fn check(root: &Value, schema: &Value, v: &Value, at: &str) -> Result<(), String> {
    let obj = schema.as_object().ok_or_else(|| format!("{at}: schema node is not an object"))?;
    for (key, arg) in obj {
        match key.as_str() {
            "description" | "title" => {}
            "$ref" => {
                let name = arg.as_str().and_then(|r| r.strip_prefix("#/$defs/")).ok_or("unsupported $ref")?;
                check(root, &root["$defs"][name], v, at)?;
            }
            "type" => {
                let allowed: Vec<&str> = match arg {
                    Value::String(s) => vec![s.as_str()],
                    Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
                    _ => return Err(format!("{at}: bad type keyword")),
                };
                if !allowed.iter().any(|t| has_type(v, t)) {
                    return Err(format!("{at}: {v} is not of type {allowed:?}"));
                }
            }
            "enum" => {
                if !arg.as_array().is_some_and(|a| a.contains(v)) {
                    return Err(format!("{at}: {v} not in {arg}"));
                }
            }
            "pattern" => {
                if let Value::String(s) = v {
                    let re = Regex::new(arg.as_str().ok_or("bad pattern")?).map_err(|e| e.to_string())?;
                    if !re.is_match(s) {
                        return Err(format!("{at}: {s:?} does not match {arg}"));
                    }
                }
            }
            "minimum" => {
                if let Some(x) = v.as_f64() {
                    if x < arg.as_f64().ok_or("bad minimum")? {
                        return Err(format!("{at}: {x} below {arg}"));
                    }
                }
            }
            "minItems" | "maxItems" => {
                if let Value::Array(a) = v {
                    let n = arg.as_u64().ok_or("bad item count")? as usize;
                    if (key == "minItems" && a.len() < n) || (key == "maxItems" && a.len() > n) {
                        return Err(format!("{at}: {} items violates {key} {n}", a.len()));
                    }
                }
            }
            "items" => {
                if let Value::Array(a) = v {
                    for (i, x) in a.iter().enumerate() {
                        check(root, arg, x, &format!("{at}[{i}]"))?;
                    }
                }
            }
            "required" => {
                if let Value::Object(o) = v {
                    for k in arg.as_array().ok_or("bad required")? {
                        let k = k.as_str().ok_or("bad required")?;
                        if !o.contains_key(k) {
                            return Err(format!("{at}: missing {k:?}"));
                        }
                    }
                }
            }
            "properties" => {
                if let Value::Object(o) = v {
                    for (k, sub) in arg.as_object().ok_or("bad properties")? {
                        if let Some(x) = o.get(k) {
                            check(root, sub, x, &format!("{at}.{k}"))?;
                        }
                    }
                }
            }
            "additionalProperties" => {
                if let (Value::Object(o), Value::Bool(false)) = (v, arg) {
                    let known = obj.get("properties").and_then(Value::as_object);
                    if let Some(k) = o.keys().find(|k| !known.is_some_and(|p| p.contains_key(*k))) {
                        return Err(format!("{at}: unexpected property {k:?}"));
                    }
                }
            }
            other => return Err(format!("{at}: validator does not implement {other:?}")),
        }
    }
    Ok(())
}

fn has_type(v: &Value, t: &str) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_u64() || v.is_i64(),
        _ => false,
    }
}
