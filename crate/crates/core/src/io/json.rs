//! JSON problem and pattern files.
//!
//! ```json
//! {"A": [[5, -7, 1], [7, -10, 1]], "b": [1, 0], "c": [12, -17, "3/2"],
//!  "form": "standard", "sense": "min",
//!  "pattern": {"dA": [[...]], "db": [...], "dc": [...]}}
//! ```
//!
//! Numbers may be JSON numbers or strings holding a decimal or `p/q`.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lp::{Form, LpProblem, Sense};
use crate::pattern::PerturbationPattern;
use crate::scalar::Scalar;

/// Contents of a problem file.
#[derive(Clone, Debug)]
pub struct ProblemFile<S> {
    pub name: Option<String>,
    pub problem: LpProblem<S>,
    pub pattern: Option<PerturbationPattern<S>>,
}

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| schema(&format!("{path}.{key}"), "missing field"))
}

fn scalar<S: Scalar>(v: &Value, path: &str) -> Result<S> {
    let parsed = match v {
        Value::Number(n) => S::parse_literal(&n.to_string()),
        Value::String(s) => S::parse_literal(s),
        _ => return Err(schema(path, "expected a number or a numeric string")),
    };
    parsed.ok_or_else(|| schema(path, format!("not a number: {v}")))
}

fn vector<S: Scalar>(v: &Value, path: &str) -> Result<Vec<S>> {
    let arr = v.as_array().ok_or_else(|| schema(path, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| scalar(x, &format!("{path}[{i}]")))
        .collect()
}

fn matrix<S: Scalar>(v: &Value, path: &str) -> Result<Matrix<S>> {
    let arr = v.as_array().ok_or_else(|| schema(path, "expected an array of rows"))?;
    let rows = arr
        .iter()
        .enumerate()
        .map(|(i, r)| vector(r, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(schema(path, "matrix has no rows"));
    }
    Matrix::from_rows(rows).ok_or_else(|| schema(path, "rows have different lengths"))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn pattern_object<S: Scalar>(obj: &Map<String, Value>, path: &str, m: usize, n: usize) -> Result<PerturbationPattern<S>> {
    let da = matrix(field(obj, "dA", path)?, &format!("{path}.dA"))?;
    let db = vector(field(obj, "db", path)?, &format!("{path}.db"))?;
    let dc = vector(field(obj, "dc", path)?, &format!("{path}.dc"))?;
    if da.rows() != m || da.cols() != n {
        return Err(schema(
            &format!("{path}.dA"),
            format!("is {}x{}, problem is {m}x{n}", da.rows(), da.cols()),
        ));
    }
    PerturbationPattern::custom(da, db, dc).map_err(|e| schema(path, e.to_string()))
}

pub fn parse_problem<S: Scalar>(text: &str) -> Result<ProblemFile<S>> {
    let root: Value = serde_json::from_str(text)?;
    let obj = object(&root, "$")?;
    let a = matrix(field(obj, "A", "$")?, "$.A")?;
    let b = vector(field(obj, "b", "$")?, "$.b")?;
    let c = vector(field(obj, "c", "$")?, "$.c")?;
    let form = match obj.get("form") {
        None => Form::Standard,
        Some(v) => serde_json::from_value(v.clone())
            .map_err(|_| schema("$.form", "expected standard, ineq_nonneg or ineq_free"))?,
    };
    let sense = match obj.get("sense") {
        None => Sense::Min,
        Some(v) => serde_json::from_value(v.clone()).map_err(|_| schema("$.sense", "expected min or max"))?,
    };
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(schema("$.b", format!("has length {}, A has {m} rows", b.len())));
    }
    if c.len() != n {
        return Err(schema("$.c", format!("has length {}, A has {n} columns", c.len())));
    }
    let pattern = match obj.get("pattern") {
        None | Some(Value::Null) => None,
        Some(p) => Some(pattern_object(object(p, "$.pattern")?, "$.pattern", m, n)?),
    };
    Ok(ProblemFile {
        name: obj.get("name").and_then(Value::as_str).map(str::to_string),
        problem: LpProblem::new(a, b, c, form, sense)?,
        pattern,
    })
}

/// A pattern file: either `{"dA", "db", "dc"}` or a problem file's `pattern` member.
pub fn parse_pattern<S: Scalar>(text: &str, m: usize, n: usize) -> Result<PerturbationPattern<S>> {
    let root: Value = serde_json::from_str(text)?;
    let obj = object(&root, "$")?;
    match obj.get("pattern") {
        Some(p) => pattern_object(object(p, "$.pattern")?, "$.pattern", m, n),
        None => pattern_object(obj, "$", m, n),
    }
}

fn encode<S: Scalar>(v: &S) -> Value {
    if S::EXACT {
        Value::String(v.to_string())
    } else {
        json!(v.as_f64())
    }
}

fn encode_vec<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(encode).collect())
}

fn encode_matrix<S: Scalar>(m: &Matrix<S>) -> Value {
    Value::Array((0..m.rows()).map(|i| encode_vec(m.row(i))).collect())
}

/// Inverse of [`parse_problem`]. Rational entries are written as strings.
pub fn problem_to_json<S: Scalar>(
    problem: &LpProblem<S>,
    pattern: Option<&PerturbationPattern<S>>,
) -> Value {
    let mut v = json!({
        "A": encode_matrix(problem.a()),
        "b": encode_vec(problem.b()),
        "c": encode_vec(problem.c()),
        "form": problem.form(),
        "sense": problem.sense(),
    });
    if let Some(p) = pattern {
        v["pattern"] = json!({
            "dA": encode_matrix(p.da()),
            "db": encode_vec(p.db()),
            "dc": encode_vec(p.dc()),
        });
    }
    v
}
