//! JSON and CSV formats. Keys are sorted and every float is written with 17
//! significant digits, so emitted files are byte-stable.

use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use crate::adic::{CellSet, StepFunction};
use crate::correction::{Certificate, WalshPolynomial};
use crate::error::{Error, Result};
use crate::walsh::Spectrum;

/// A double as a JSON number in `d.dddddddddddddddde±x` form. Non-finite
/// values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Number::from_str(&format!("{x:.16e}"))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn read_f64(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .or_else(|| f64::from_str(&n.to_string()).ok())
            .ok_or_else(|| Error::Format(format!("not a double: {n}"))),
        Value::Null => Ok(f64::NAN),
        _ => Err(Error::Format(format!("expected a number, found {v}"))),
    }
}

fn read_u64(v: &Value) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| Error::Format(format!("expected an unsigned integer, found {v}")))
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Format(format!("missing field '{key}'")))
}

pub fn complex_pair(c: Complex64) -> Value {
    Value::Array(vec![num(c.re), num(c.im)])
}

fn read_pair(v: &Value) -> Result<Complex64> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => Ok(Complex64::new(read_f64(re)?, read_f64(im)?)),
        Some([re]) => Ok(Complex64::new(read_f64(re)?, 0.0)),
        _ => Ok(Complex64::new(read_f64(v)?, 0.0)),
    }
}

/// `{"n": …, "re": …, "im": …}`.
pub fn term(n: Value, c: Complex64) -> Value {
    serde_json::json!({ "n": n, "re": num(c.re), "im": num(c.im) })
}

fn read_term(v: &Value) -> Result<(u64, Complex64)> {
    Ok((
        read_u64(field(v, "n")?)?,
        Complex64::new(read_f64(field(v, "re")?)?, read_f64(field(v, "im")?)?),
    ))
}

pub fn step_to_json(f: &StepFunction) -> Value {
    serde_json::json!({
        "order": f.order(),
        "level": f.level(),
        "values": f.values().iter().map(|&c| complex_pair(c)).collect::<Vec<_>>(),
    })
}

/// Accepts `[re, im]` pairs or bare real numbers as values.
pub fn step_from_json(v: &Value) -> Result<StepFunction> {
    let order = read_u64(field(v, "order")?)? as u32;
    let level = read_u64(field(v, "level")?)? as u32;
    let values = field(v, "values")?
        .as_array()
        .ok_or_else(|| Error::Format("'values' must be an array".into()))?
        .iter()
        .map(read_pair)
        .collect::<Result<Vec<_>>>()?;
    StepFunction::new(order, level, values)
}

pub fn cellset_to_json(s: &CellSet) -> Value {
    serde_json::json!({ "order": s.order, "level": s.level, "members": s.members() })
}

pub fn cellset_from_json(v: &Value) -> Result<CellSet> {
    let members = field(v, "members")?
        .as_array()
        .ok_or_else(|| Error::Format("'members' must be an array".into()))?
        .iter()
        .map(read_u64)
        .collect::<Result<Vec<_>>>()?;
    CellSet::new(
        read_u64(field(v, "order")?)? as u32,
        read_u64(field(v, "level")?)? as u32,
        members,
    )
}

/// Only nonzero coefficients are listed.
pub fn spectrum_to_json(s: &Spectrum) -> Value {
    let coefficients: Vec<Value> = s
        .coefficients()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() != 0.0)
        .map(|(n, &c)| term(Value::from(n as u64), c))
        .collect();
    serde_json::json!({
        "order": s.order(),
        "source_level": s.source_level(),
        "coefficients": coefficients,
    })
}

pub fn spectrum_from_json(v: &Value) -> Result<Spectrum> {
    let terms = field(v, "coefficients")?
        .as_array()
        .ok_or_else(|| Error::Format("'coefficients' must be an array".into()))?
        .iter()
        .map(read_term)
        .collect::<Result<Vec<_>>>()?;
    Spectrum::from_pairs(
        read_u64(field(v, "order")?)? as u32,
        read_u64(field(v, "source_level")?)? as u32,
        terms,
    )
}

pub fn polynomial_to_json(p: &WalshPolynomial) -> Value {
    serde_json::json!({
        "order": p.order(),
        "terms": p.terms().iter().map(|&(n, c)| term(Value::from(n), c)).collect::<Vec<_>>(),
    })
}

pub fn polynomial_from_json(v: &Value) -> Result<WalshPolynomial> {
    let terms = field(v, "terms")?
        .as_array()
        .ok_or_else(|| Error::Format("'terms' must be an array".into()))?
        .iter()
        .map(read_term)
        .collect::<Result<Vec<_>>>()?;
    WalshPolynomial::new(read_u64(field(v, "order")?)? as u32, terms)
}

/// Pretty JSON with a trailing newline.
pub fn to_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_string(value)?)?;
    Ok(())
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Certificates round-trip through `Value` so their floats get the fixed format.
pub fn certificate_to_json(cert: &Certificate) -> Value {
    let conclusions: Vec<Value> = cert
        .conclusions
        .iter()
        .map(|c| {
            serde_json::json!({
                "name": c.name,
                "relation": c.relation,
                "claimed_bound": num(c.claimed_bound),
                "achieved_value": num(c.achieved_value),
                "pass": c.pass,
            })
        })
        .collect();
    serde_json::json!({
        "kind": cert.kind,
        "conclusions": conclusions,
        "params": cert.params,
        "trace": cert.trace,
        "data": cert.data,
    })
}

pub fn certificate_from_json(v: &Value) -> Result<Certificate> {
    #[derive(Deserialize)]
    struct Raw {
        kind: String,
        conclusions: Vec<Value>,
        #[serde(default)]
        params: std::collections::BTreeMap<String, Value>,
        #[serde(default)]
        trace: Vec<Value>,
        #[serde(default)]
        data: Value,
    }
    let raw: Raw = serde_json::from_value(v.clone())?;
    let mut cert = Certificate::new(&raw.kind);
    for c in &raw.conclusions {
        cert.push(crate::correction::Conclusion {
            name: field(c, "name")?
                .as_str()
                .ok_or_else(|| Error::Format("conclusion name must be a string".into()))?
                .to_string(),
            relation: serde_json::from_value(field(c, "relation")?.clone())?,
            claimed_bound: read_f64(field(c, "claimed_bound")?)?,
            achieved_value: read_f64(field(c, "achieved_value")?)?,
            pass: field(c, "pass")?
                .as_bool()
                .ok_or_else(|| Error::Format("'pass' must be a boolean".into()))?,
        });
    }
    cert.params = raw.params;
    cert.trace = raw.trace;
    cert.data = raw.data;
    Ok(cert)
}
