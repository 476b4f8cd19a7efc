//! JSON and CSV encodings for multi-indices, matrices, rationals, problem
//! specifications, expansion tables and exact polynomials.
//!
//! All JSON written by this crate goes through [`to_json_string`], which emits
//! floating-point numbers with 17 significant digits so that values round-trip
//! bit-for-bit.

use std::fmt::Write as _;
use std::str::FromStr;

use hermite_mult_core::coeffs::{CoeffVariant, ExpansionTerm};
use hermite_mult_core::{BigInt, BigRational, DenseMatrix, MPoly, MultiIndex, Scalar};
use num_traits::Zero;
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{0}` is missing")]
    Missing(&'static str),
    #[error("field `{field}`: {msg}")]
    Invalid { field: String, msg: String },
    #[error(transparent)]
    Core(#[from] hermite_mult_core::Error),
}

fn invalid(field: &str, msg: impl Into<String>) -> FormatError {
    FormatError::Invalid {
        field: field.to_string(),
        msg: msg.into(),
    }
}

/// Float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Rational as `"p/q"` (denominator always present).
pub fn fmt_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"`, an integer, or a decimal such as `"-1.25e-3"` exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = BigInt::from_str(&format!("0{int}{frac}")).ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(digits);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

/// Serializes a JSON value compactly, writing floats with 17 significant digits.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_json(v, &mut out);
    out
}

fn write_json(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                match n.as_f64() {
                    Some(f) if f.is_finite() => out.push_str(&fmt_f64(f)),
                    _ => out.push_str("null"),
                }
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_json(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("key serializes"));
                out.push(':');
                write_json(item, out);
            }
            out.push('}');
        }
    }
}

pub fn multi_index_to_json(k: &MultiIndex) -> Value {
    Value::from(k.parts().to_vec())
}

pub fn multi_index_from_json(v: &Value, field: &str) -> Result<MultiIndex, FormatError> {
    let arr = v.as_array().ok_or_else(|| invalid(field, "expected an array of naturals"))?;
    let parts = arr
        .iter()
        .map(|p| {
            p.as_u64()
                .and_then(|p| u32::try_from(p).ok())
                .ok_or_else(|| invalid(field, "entries must be naturals"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    MultiIndex::new(parts).map_err(|_| invalid(field, "multi-index must be nonempty"))
}

/// A scalar read from a JSON entry (number or string).
pub trait JsonScalar: Scalar {
    fn from_json(v: &Value, field: &str) -> Result<Self, FormatError>;
    fn to_json(&self) -> Value;
}

impl JsonScalar for f64 {
    fn from_json(v: &Value, field: &str) -> Result<Self, FormatError> {
        let x = match v {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => s
                .trim()
                .parse::<f64>()
                .ok()
                .or_else(|| parse_rational(s).map(|r| r.to_f64())),
            _ => None,
        }
        .ok_or_else(|| invalid(field, format!("not a number: {v}")))?;
        if !x.is_finite() {
            return Err(invalid(field, "entries must be finite"));
        }
        Ok(x)
    }

    fn to_json(&self) -> Value {
        json!(*self)
    }
}

impl JsonScalar for BigRational {
    fn from_json(v: &Value, field: &str) -> Result<Self, FormatError> {
        match v {
            Value::Number(n) => parse_rational(&n.to_string()),
            Value::String(s) => parse_rational(s),
            _ => None,
        }
        .ok_or_else(|| invalid(field, format!("not a rational: {v}")))
    }

    fn to_json(&self) -> Value {
        Value::String(fmt_rational(self))
    }
}

pub fn matrix_from_json<S: JsonScalar>(v: &Value, field: &str) -> Result<DenseMatrix<S>, FormatError> {
    let rows = v.as_array().ok_or_else(|| invalid(field, "expected an array of row arrays"))?;
    let rows = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| invalid(field, "each row must be an array"))?
                .iter()
                .map(|e| S::from_json(e, field))
                .collect::<Result<Vec<S>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    DenseMatrix::from_rows(rows).map_err(|e| invalid(field, e.to_string()))
}

pub fn matrix_to_json<S: JsonScalar>(m: &DenseMatrix<S>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(S::to_json).collect()))
            .collect(),
    )
}

pub fn vector_from_json<S: JsonScalar>(v: &Value, field: &str) -> Result<Vec<S>, FormatError> {
    v.as_array()
        .ok_or_else(|| invalid(field, "expected an array"))?
        .iter()
        .map(|e| S::from_json(e, field))
        .collect()
}

/// Inputs of one multiplication-theorem instance.
///
/// JSON: `{"k":[..], "Lambda":[[..]], "Sigma":[[..]], "Upsilon":[[..]], "rational": bool}`,
/// with `Lambda` of shape m×n.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec<S> {
    pub k: MultiIndex,
    pub lambda: DenseMatrix<S>,
    pub sigma: DenseMatrix<S>,
    pub upsilon: DenseMatrix<S>,
}

/// Reads the `rational` flag of a problem document (default `false`).
pub fn spec_is_rational(doc: &Value) -> Result<bool, FormatError> {
    match doc.get("rational") {
        None | Some(Value::Null) => Ok(false),
        Some(Value::Bool(b)) => Ok(*b),
        Some(_) => Err(invalid("rational", "expected a boolean")),
    }
}

impl<S: JsonScalar> ProblemSpec<S> {
    pub fn from_json(doc: &Value) -> Result<Self, FormatError> {
        let get = |name: &'static str| doc.get(name).ok_or(FormatError::Missing(name));
        let k = multi_index_from_json(get("k")?, "k")?;
        let lambda: DenseMatrix<S> = matrix_from_json(get("Lambda")?, "Lambda")?;
        let sigma: DenseMatrix<S> = matrix_from_json(get("Sigma")?, "Sigma")?;
        let upsilon: DenseMatrix<S> = matrix_from_json(get("Upsilon")?, "Upsilon")?;
        let (m, n) = (lambda.rows(), lambda.cols());
        if k.arity() != n {
            return Err(invalid("k", format!("arity {} does not match Lambda columns {n}", k.arity())));
        }
        if (sigma.rows(), sigma.cols()) != (n, n) {
            return Err(invalid("Sigma", format!("expected {n}×{n}")));
        }
        if (upsilon.rows(), upsilon.cols()) != (m, m) {
            return Err(invalid("Upsilon", format!("expected {m}×{m}")));
        }
        Ok(ProblemSpec {
            k,
            lambda,
            sigma,
            upsilon,
        })
    }

    pub fn to_json(&self, rational: bool) -> Value {
        json!({
            "k": multi_index_to_json(&self.k),
            "Lambda": matrix_to_json(&self.lambda),
            "Sigma": matrix_to_json(&self.sigma),
            "Upsilon": matrix_to_json(&self.upsilon),
            "rational": rational,
        })
    }
}

pub fn variant_name(v: CoeffVariant) -> &'static str {
    match v {
        CoeffVariant::Symmetrized => "symmetrized",
        CoeffVariant::SingleSelector => "paper-literal",
    }
}

/// `{"k":[..],"variant":..,"terms":[{"q":[..],"coeff":..}]}`.
pub fn expansion_to_json<S: JsonScalar>(k: &MultiIndex, variant: CoeffVariant, terms: &[ExpansionTerm<S>]) -> Value {
    let terms = terms
        .iter()
        .map(|t| {
            let mut m = Map::new();
            m.insert("q".into(), multi_index_to_json(&t.q));
            m.insert("coeff".into(), t.coeff.to_json());
            Value::Object(m)
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("k".into(), multi_index_to_json(k));
    doc.insert("variant".into(), Value::String(variant_name(variant).into()));
    doc.insert("terms".into(), Value::Array(terms));
    Value::Object(doc)
}

/// Reads an expansion document back; `coeff` may be a number or a `"p/q"` string.
pub fn expansion_from_json<S: JsonScalar>(doc: &Value) -> Result<(MultiIndex, Vec<ExpansionTerm<S>>), FormatError> {
    let k = multi_index_from_json(doc.get("k").ok_or(FormatError::Missing("k"))?, "k")?;
    let terms = doc
        .get("terms")
        .and_then(Value::as_array)
        .ok_or(FormatError::Missing("terms"))?
        .iter()
        .map(|t| {
            let q = multi_index_from_json(t.get("q").ok_or(FormatError::Missing("q"))?, "q")?;
            let coeff = S::from_json(t.get("coeff").ok_or(FormatError::Missing("coeff"))?, "coeff")?;
            Ok(ExpansionTerm { q, coeff })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    Ok((k, terms))
}

/// CSV with header `q_1,...,q_m,coeff`, one row per term.
pub fn expansion_to_csv<S: JsonScalar>(m: usize, terms: &[ExpansionTerm<S>]) -> String {
    let mut out = String::new();
    for j in 1..=m {
        let _ = write!(out, "q_{j},");
    }
    out.push_str("coeff\n");
    for t in terms {
        for p in t.q.parts() {
            let _ = write!(out, "{p},");
        }
        match t.coeff.to_json() {
            Value::String(s) => out.push_str(&s),
            v => out.push_str(&to_json_string(&v)),
        }
        out.push('\n');
    }
    out
}

/// `[{"mono":[..],"coeff":"p/q"}, ...]` in canonical monomial order.
pub fn mpoly_to_json(p: &MPoly) -> Value {
    Value::Array(
        p.terms()
            .map(|(mono, c)| json!({"mono": multi_index_to_json(mono), "coeff": fmt_rational(c)}))
            .collect(),
    )
}

pub fn mpoly_from_json(v: &Value, arity: usize) -> Result<MPoly, FormatError> {
    let arr = v.as_array().ok_or_else(|| invalid("poly", "expected an array of terms"))?;
    let terms = arr
        .iter()
        .map(|t| {
            let mono = multi_index_from_json(t.get("mono").ok_or(FormatError::Missing("mono"))?, "mono")?;
            let c = BigRational::from_json(t.get("coeff").ok_or(FormatError::Missing("coeff"))?, "coeff")?;
            Ok((mono, c))
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    Ok(MPoly::from_terms(arity, terms)?)
}

/// Parses a comma-separated list such as `"0.5,-1,2e-3"`.
pub fn parse_list<T: FromStr>(s: &str) -> Option<Vec<T>> {
    s.split(',').map(|p| p.trim().parse().ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/4"), Some(r(3, 4)));
        assert_eq!(parse_rational("-6/8"), Some(r(-3, 4)));
        assert_eq!(parse_rational("7"), Some(r(7, 1)));
        assert_eq!(parse_rational("0.1"), Some(r(1, 10)));
        assert_eq!(parse_rational("-1.25e-1"), Some(r(-1, 8)));
        assert_eq!(parse_rational("2E2"), Some(r(200, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
        assert_eq!(fmt_rational(&r(2, 1)), "2/1");
    }

    #[test]
    fn floats_round_trip_with_17_digits() {
        for &x in &[0.1f64, 1.0 / 3.0, -2.5e-300, 1e21, 123456789.12345679, 5e-324] {
            let s = to_json_string(&json!({ "v": x }));
            let back: Value = serde_json::from_str(&s).unwrap();
            assert_eq!(back["v"].as_f64().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn problem_spec_validation() {
        let doc = json!({
            "k": [1, 1],
            "Lambda": [[0, 1], [1, 0]],
            "Sigma": [[1, 0], [0, 1]],
            "Upsilon": [[1, 0], [0, 1]],
        });
        let spec = ProblemSpec::<f64>::from_json(&doc).unwrap();
        assert_eq!(spec.lambda.rows(), 2);
        let mut bad = doc.clone();
        bad["Sigma"] = json!([[1]]);
        assert!(ProblemSpec::<f64>::from_json(&bad).is_err());
        let mut bad = doc.clone();
        bad["k"] = json!([1]);
        assert!(ProblemSpec::<f64>::from_json(&bad).is_err());
        let mut rat = doc;
        rat["Lambda"] = json!([["1/2", 1], [1, "0"]]);
        let spec = ProblemSpec::<BigRational>::from_json(&rat).unwrap();
        assert_eq!(spec.lambda[(0, 0)], r(1, 2));
    }

    #[test]
    fn mpoly_json_round_trip() {
        let p = MPoly::from_terms(
            2,
            [
                (MultiIndex::new(vec![1, 1]).unwrap(), r(3, 2)),
                (MultiIndex::new(vec![0, 0]).unwrap(), r(-1, 1)),
            ],
        )
        .unwrap();
        let v = mpoly_to_json(&p);
        assert_eq!(
            to_json_string(&v),
            r#"[{"mono":[1,1],"coeff":"3/2"},{"mono":[0,0],"coeff":"-1/1"}]"#
        );
        assert_eq!(mpoly_from_json(&v, 2).unwrap(), p);
    }

    #[test]
    fn csv_layout() {
        let terms = vec![ExpansionTerm {
            q: MultiIndex::new(vec![1, 1]).unwrap(),
            coeff: 2.0,
        }];
        assert_eq!(expansion_to_csv(2, &terms), "q_1,q_2,coeff\n1,1,2.0000000000000000e0\n");
    }
}
