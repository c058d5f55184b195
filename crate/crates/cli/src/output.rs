//! Report files. JSON is pretty-printed with sorted keys so identical runs give
//! identical bytes; non-finite numbers become `null`.

use std::fs;
use std::path::Path;

use cran_core::subset::Mask;
use serde::Serialize;
use serde_json::Value;

use crate::Failure;

pub fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::internal(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn write_compact_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string(value).map_err(|e| Failure::internal(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    let fail = |e: csv::Error| Failure::input(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(fail)?;
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    w.flush().map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Full precision, `inf`/`-inf`/`nan` spelled out.
pub fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// `T`/`S` masks as member lists (0-based) for JSON.
pub fn members(mask: Mask) -> Value {
    Value::Array(cran_core::subset::members(mask).map(|i| Value::from(i as u64)).collect())
}
