//! Canonical JSON forms: rationals as `"p/q"` strings, sparse data as
//! ordered lists with explicit exponents. Encoding is deterministic, so equal
//! values always produce identical bytes.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hseries::{HSeries, EXACT};
use crate::laurent::Laurent;
use crate::rmatrix::RMatrixBundle;
use crate::scalar::{parse_rational, CPoly, Coeff, Rational};
use crate::tensor::TensorOp;

pub trait Canonical: Sized {
    fn to_value(&self) -> Value;
    fn from_value(v: &Value) -> Result<Self>;
}

fn bad(what: &str, v: &Value) -> Error {
    Error::Parse(format!("expected {what}, got {v}"))
}

fn int(v: &Value) -> Result<i64> {
    v.as_i64().ok_or_else(|| bad("integer", v))
}

fn arr(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| bad("array", v))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

pub fn rational_string(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl Canonical for Rational {
    fn to_value(&self) -> Value {
        Value::String(rational_string(self))
    }
    fn from_value(v: &Value) -> Result<Self> {
        parse_rational(v.as_str().ok_or_else(|| bad("rational string", v))?)
    }
}

impl Canonical for CPoly {
    fn to_value(&self) -> Value {
        Value::Array(self.terms().map(|(e, q)| json!([e, rational_string(q)])).collect())
    }
    fn from_value(v: &Value) -> Result<Self> {
        let mut out = Vec::new();
        for t in arr(v)? {
            let t = arr(t)?;
            if t.len() != 2 {
                return Err(bad("[exponent, coefficient]", &Value::Array(t.clone())));
            }
            out.push((int(&t[0])? as u32, Rational::from_value(&t[1])?));
        }
        Ok(CPoly::from_coeffs(out))
    }
}

impl<T: Coeff + Canonical> Canonical for HSeries<T> {
    fn to_value(&self) -> Value {
        let cap = if self.cap() == EXACT { json!("exact") } else { json!(self.cap()) };
        let terms: Vec<Value> = self.iter().map(|(k, c)| json!([k, c.to_value()])).collect();
        json!({ "cap": cap, "terms": terms })
    }
    fn from_value(v: &Value) -> Result<Self> {
        let cap_v = field(v, "cap")?;
        let cap = if cap_v.as_str() == Some("exact") { EXACT } else { int(cap_v)? as usize };
        let mut coeffs: Vec<T> = Vec::new();
        for t in arr(field(v, "terms")?)? {
            let t = arr(t)?;
            let k = int(&t[0])? as usize;
            while coeffs.len() <= k {
                coeffs.push(T::zero());
            }
            coeffs[k] = T::from_value(&t[1])?;
        }
        Ok(HSeries::new(cap, coeffs))
    }
}

impl<T: Coeff + Canonical> Canonical for Laurent<T> {
    fn to_value(&self) -> Value {
        let terms: Vec<Value> = self.terms().iter().map(|(e, c)| json!([e, c.to_value()])).collect();
        json!({ "vars": self.vars(), "caps": self.caps(), "terms": terms })
    }
    fn from_value(v: &Value) -> Result<Self> {
        let vars: Vec<String> = arr(field(v, "vars")?)?
            .iter()
            .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad("variable name", x)))
            .collect::<Result<_>>()?;
        let caps: Vec<Option<i32>> = arr(field(v, "caps")?)?
            .iter()
            .map(|x| if x.is_null() { Ok(None) } else { int(x).map(|c| Some(c as i32)) })
            .collect::<Result<_>>()?;
        if caps.len() != vars.len() {
            return Err(Error::Parse("caps and vars differ in length".into()));
        }
        let mut terms = std::collections::BTreeMap::new();
        for t in arr(field(v, "terms")?)? {
            let t = arr(t)?;
            let e: Vec<i32> = arr(&t[0])?.iter().map(|x| int(x).map(|i| i as i32)).collect::<Result<_>>()?;
            if e.len() != vars.len() {
                return Err(Error::Parse("exponent vector has the wrong length".into()));
            }
            terms.insert(e, T::from_value(&t[1])?);
        }
        let names: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        Ok(Laurent::from_terms(&names, caps, terms))
    }
}

impl<E: Coeff + Canonical> Canonical for TensorOp<E> {
    fn to_value(&self) -> Value {
        let entries: Vec<Value> = self.entries().iter().map(|((r, c), e)| json!([r, c, e.to_value()])).collect();
        json!({ "dim": self.dim(), "arity": self.arity(), "entries": entries })
    }
    fn from_value(v: &Value) -> Result<Self> {
        let mut op = TensorOp::zero(int(field(v, "dim")?)? as usize, int(field(v, "arity")?)? as usize)?;
        for t in arr(field(v, "entries")?)? {
            let t = arr(t)?;
            let idx = |x: &Value| -> Result<Vec<u8>> { arr(x)?.iter().map(|i| int(i).map(|i| i as u8)).collect() };
            op.set(idx(&t[0])?, idx(&t[1])?, E::from_value(&t[2])?)?;
        }
        Ok(op)
    }
}

impl Canonical for RMatrixBundle {
    fn to_value(&self) -> Value {
        json!({
            "n": self.n,
            "k": self.k,
            "u_caps": self.u_caps,
            "r_u": self.r_u.to_value(),
            "r_shifted": self.r_shifted.to_value(),
            "g": self.g.to_value(),
            "s": self.s.to_value(),
        })
    }
    fn from_value(v: &Value) -> Result<Self> {
        Ok(RMatrixBundle {
            n: int(field(v, "n")?)? as usize,
            k: int(field(v, "k")?)? as usize,
            u_caps: int(field(v, "u_caps")?)? as i32,
            r_u: TensorOp::from_value(field(v, "r_u")?)?,
            r_shifted: TensorOp::from_value(field(v, "r_shifted")?)?,
            g: HSeries::from_value(field(v, "g")?)?,
            s: TensorOp::from_value(field(v, "s")?)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ri};

    #[test]
    fn rational_strings() {
        assert_eq!(rat(-3, 6).to_value(), json!("-1/2"));
        assert_eq!(ri(4).to_value(), json!("4"));
        assert_eq!(Rational::from_value(&json!("7/21")).unwrap(), rat(1, 3));
        assert!(Rational::from_value(&json!(3)).is_err());
    }

    #[test]
    fn bundle_round_trip() {
        let b = RMatrixBundle::build(2, 2).unwrap();
        let v = b.to_value();
        let back = RMatrixBundle::from_value(&v).unwrap();
        assert_eq!(back, b);
        assert_eq!(serde_json::to_string(&back.to_value()).unwrap(), serde_json::to_string(&v).unwrap());
    }
}
