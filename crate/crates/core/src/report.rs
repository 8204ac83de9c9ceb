//! Residual reports and deterministic JSON output.

use rayon::prelude::*;
use serde_json::Value;

use crate::error::Result;
use crate::linalg::Tensor;
use crate::scalar::Scalar;

/// A named max-norm residual together with where it was attained.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport<S> {
    pub name: String,
    pub value: S,
    pub worst_point: Vec<S>,
    pub worst_indices: Vec<usize>,
}

impl<S: Scalar> ResidualReport<S> {
    pub fn zero(name: &str, point: &[S]) -> Self {
        Self {
            name: name.to_string(),
            value: S::zero(),
            worst_point: point.to_vec(),
            worst_indices: Vec::new(),
        }
    }

    /// Max-norm of a residual tensor evaluated at `point`.
    pub fn from_tensor(name: &str, tensor: &Tensor<S>, point: &[S]) -> Self {
        let (value, worst_indices) = tensor.max_abs_with_index();
        Self {
            name: name.to_string(),
            value,
            worst_point: point.to_vec(),
            worst_indices,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn value_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Keeps the larger of two reports; ties keep `self` (earlier in sweep order).
    pub fn max(self, other: Self) -> Self {
        if other.value > self.value {
            other
        } else {
            self
        }
    }
}

/// Evaluates `check` at every point (in parallel) and returns the worst report.
/// Reduction happens in point order so the argmax is deterministic.
pub fn sweep<S, F>(name: &str, points: &[Vec<S>], check: F) -> Result<ResidualReport<S>>
where
    S: Scalar,
    F: Fn(&[S]) -> Result<ResidualReport<S>> + Sync,
{
    let reports: Vec<ResidualReport<S>> = points
        .par_iter()
        .map(|p| check(p))
        .collect::<Result<_>>()?;
    let first = points.first().map(Vec::as_slice).unwrap_or(&[]);
    Ok(reports
        .into_iter()
        .fold(ResidualReport::zero(name, first), ResidualReport::max))
}

/// Formats a float with 17 significant digits (`d.dddddddddddddddde±x`).
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// Serializes a JSON value with two-space indentation, keys in insertion
/// order, and every non-integer number printed by [`format_f64`].
pub fn to_canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => {
            out.push_str(&serde_json::to_string(v).expect("scalar json"));
        }
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                out.push_str(&n.to_string());
            } else {
                out.push_str(&format_f64(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // numeric rows stay on one line
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, depth, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(x, depth + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&serde_json::to_string(k).expect("key"));
                out.push_str(": ");
                write_value(x, depth + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
    }
}

/// JSON number for a float (non-finite values become `null`).
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}
