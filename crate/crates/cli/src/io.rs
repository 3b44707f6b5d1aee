use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nonclass_core::polyalg::{HermBivarPoly, PolyJson};
use serde_json::Value;

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {} as JSON", path.display()))
}

pub fn poly_from_value(v: Value) -> Result<HermBivarPoly> {
    let j: PolyJson = serde_json::from_value(v).context("not a polynomial (expected support, degree, terms)")?;
    Ok(HermBivarPoly::try_from(j)?)
}

pub fn read_poly(path: &Path) -> Result<HermBivarPoly> {
    poly_from_value(read_json(path)?).with_context(|| format!("in {}", path.display()))
}

/// Writes to `out`, or to stdout when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn emit_json(out: Option<&Path>, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    emit(out, &text)
}

/// A JSON object's `"kind"` field, if any.
pub fn kind_of(v: &Value) -> Option<&str> {
    v.get("kind").and_then(Value::as_str)
}

pub fn require_finite(name: &str, x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        bail!("{name} must be a positive number, got {x}");
    }
    Ok(x)
}
