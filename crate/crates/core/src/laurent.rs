//! Multivariate Laurent expressions with per-variable degree caps.
//!
//! A cap `Some(c)` on a variable means every coefficient whose exponent in
//! that variable is `<= c` is exact; higher exponents were dropped. `None`
//! means the expression is exact in that variable. Products track caps the
//! same way truncated power series track precision.
//!
//! Negative powers of a sum are only expanded inside an explicit [`Region`].

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{binomial, Coeff, Rational};

/// Expansion region: expand in nonnegative powers of the subordinate variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub dominant: String,
    pub subordinate: Vec<String>,
}

impl Region {
    pub fn new(dominant: &str, subordinate: &[&str]) -> Result<Self> {
        if subordinate.contains(&dominant) {
            return Err(Error::BadRegion(format!("{dominant} is both dominant and subordinate")));
        }
        Ok(Region { dominant: dominant.to_string(), subordinate: subordinate.iter().map(|s| s.to_string()).collect() })
    }
}

/// Per-variable positive degree caps, with an optional default.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Caps {
    pub default: Option<i32>,
    pub per_var: BTreeMap<String, i32>,
}

impl Caps {
    pub fn uniform(cap: i32) -> Self {
        Caps { default: Some(cap), per_var: BTreeMap::new() }
    }

    pub fn with(mut self, var: &str, cap: i32) -> Self {
        self.per_var.insert(var.to_string(), cap);
        self
    }

    pub fn get(&self, var: &str) -> Option<i32> {
        self.per_var.get(var).copied().or(self.default)
    }
}

#[derive(Clone)]
pub struct Laurent<T> {
    vars: Vec<String>,
    terms: BTreeMap<Vec<i32>, T>,
    caps: Vec<Option<i32>>,
}

fn cap_min(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<T: Coeff> Laurent<T> {
    /// Variable-free constant.
    pub fn constant(t: T) -> Self {
        let mut terms = BTreeMap::new();
        if !t.is_zero() {
            terms.insert(Vec::new(), t);
        }
        Laurent { vars: Vec::new(), terms, caps: Vec::new() }
    }

    /// Zero over the given variables.
    pub fn zero_in(vars: &[&str]) -> Self {
        Laurent {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
            caps: vec![None; vars.len()],
        }
    }

    /// `t * prod vars[i]^exps[i]`.
    pub fn monomial(vars: &[&str], exps: &[i32], t: T) -> Self {
        assert_eq!(vars.len(), exps.len());
        let mut out = Self::zero_in(vars);
        if !t.is_zero() {
            out.terms.insert(exps.to_vec(), t);
        }
        out
    }

    /// Builds from raw parts, dropping zeros and terms beyond the caps.
    pub fn from_terms(vars: &[&str], caps: Vec<Option<i32>>, terms: BTreeMap<Vec<i32>, T>) -> Self {
        assert_eq!(vars.len(), caps.len());
        let mut out = Laurent { vars: vars.iter().map(|s| s.to_string()).collect(), terms, caps };
        out.prune_caps();
        out
    }

    pub fn into_terms(self) -> BTreeMap<Vec<i32>, T> {
        self.terms
    }

    pub fn var(name: &str) -> Self {
        Self::monomial(&[name], &[1], T::one())
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn caps(&self) -> &[Option<i32>] {
        &self.caps
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i32>, T> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn index_of(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    pub fn cap_of(&self, var: &str) -> Option<i32> {
        self.index_of(var).and_then(|i| self.caps[i])
    }

    /// Lowers the cap on `var`, dropping terms above it.
    pub fn with_cap(&self, var: &str, cap: i32) -> Self {
        let mut out = self.align(&self.union_vars(&[var.to_string()]));
        let i = out.index_of(var).expect("aligned");
        out.caps[i] = cap_min(out.caps[i], Some(cap));
        out.prune_caps();
        out
    }

    fn prune_caps(&mut self) {
        let caps = self.caps.clone();
        self.terms.retain(|e, c| !c.is_zero() && e.iter().zip(&caps).all(|(x, cap)| cap.is_none_or(|m| *x <= m)));
    }

    fn union_vars(&self, other: &[String]) -> Vec<String> {
        let mut vars = self.vars.clone();
        for v in other {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars
    }

    /// Re-expresses over a superset of variables (in the given order).
    pub fn align(&self, vars: &[String]) -> Self {
        if vars == self.vars.as_slice() {
            return self.clone();
        }
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).expect("align target must contain all variables"))
            .collect();
        let mut caps = vec![None; vars.len()];
        for (i, &j) in map.iter().enumerate() {
            caps[j] = self.caps[i];
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut ne = vec![0; vars.len()];
                for (i, &j) in map.iter().enumerate() {
                    ne[j] = e[i];
                }
                (ne, c.clone())
            })
            .collect();
        Laurent { vars: vars.to_vec(), terms, caps }
    }

    pub fn min_exponent(&self, var: &str) -> Option<i32> {
        let i = self.index_of(var)?;
        self.terms.keys().map(|e| e[i]).min()
    }

    pub fn max_exponent(&self, var: &str) -> Option<i32> {
        let i = self.index_of(var)?;
        self.terms.keys().map(|e| e[i]).max()
    }

    pub fn add(&self, other: &Self) -> Self {
        let vars = self.union_vars(&other.vars);
        let mut out = self.align(&vars);
        let b = other.align(&vars);
        for i in 0..vars.len() {
            out.caps[i] = cap_min(out.caps[i], b.caps[i]);
        }
        for (e, c) in b.terms {
            match out.terms.get_mut(&e) {
                Some(x) => *x = x.add_ref(&c),
                None => {
                    out.terms.insert(e, c);
                }
            }
        }
        out.prune_caps();
        out
    }

    pub fn neg(&self) -> Self {
        Laurent {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg_ref())).collect(),
            caps: self.caps.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, t: &T) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.mul_ref(t);
        }
        out.prune_caps();
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let vars = self.union_vars(&other.vars);
        let a = self.align(&vars);
        let b = other.align(&vars);
        let mut caps = vec![None; vars.len()];
        for (i, cap) in caps.iter_mut().enumerate() {
            let amin = a.terms.keys().map(|e| e[i]).min();
            let bmin = b.terms.keys().map(|e| e[i]).min();
            let from_a = match (a.caps[i], bmin) {
                (Some(c), Some(m)) => Some(c + m),
                _ => None,
            };
            let from_b = match (b.caps[i], amin) {
                (Some(c), Some(m)) => Some(c + m),
                _ => None,
            };
            *cap = cap_min(from_a, from_b);
            // A truncated zero stays truncated at its own cap.
            if a.terms.is_empty() && b.terms.is_empty() {
                *cap = cap_min(a.caps[i], b.caps[i]);
            }
        }
        let mut terms: BTreeMap<Vec<i32>, T> = BTreeMap::new();
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Vec<i32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if e.iter().zip(&caps).any(|(x, cap)| cap.is_some_and(|m| *x > m)) {
                    continue;
                }
                let p = ca.mul_ref(cb);
                match terms.get_mut(&e) {
                    Some(x) => *x = x.add_ref(&p),
                    None => {
                        terms.insert(e, p);
                    }
                }
            }
        }
        let mut out = Laurent { vars, terms, caps };
        out.prune_caps();
        out
    }

    /// Multiplies by `var^e`, shifting its cap along.
    pub fn shift(&self, var: &str, e: i32) -> Self {
        let mut out = self.align(&self.union_vars(&[var.to_string()]));
        let i = out.index_of(var).expect("aligned");
        out.terms = out
            .terms
            .into_iter()
            .map(|(mut k, c)| {
                k[i] += e;
                (k, c)
            })
            .collect();
        out.caps[i] = out.caps[i].map(|c| c + e);
        out
    }

    /// Coefficient at the exponent vector (in this expression's variable order).
    pub fn coefficient(&self, exps: &[i32]) -> Result<T> {
        if exps.len() != self.vars.len() {
            return Err(Error::VariableMismatch(self.vars.clone(), vec![format!("{} exponents", exps.len())]));
        }
        for (i, (x, cap)) in exps.iter().zip(&self.caps).enumerate() {
            if let Some(m) = cap {
                if x > m {
                    return Err(Error::BeyondCap(format!("{}^{} above cap {}", self.vars[i], x, m)));
                }
            }
        }
        Ok(self.terms.get(exps).cloned().unwrap_or_else(T::zero))
    }

    /// Coefficient of a named monomial without cap checks; a variable this
    /// expression does not mention only matches exponent 0.
    pub fn coeff_at(&self, mono: &[(&str, i32)]) -> T {
        for (v, e) in mono {
            if *e != 0 && self.index_of(v).is_none() {
                return T::zero();
            }
        }
        let exps: Vec<i32> =
            self.vars.iter().map(|v| mono.iter().find(|(w, _)| w == v).map_or(0, |(_, e)| *e)).collect();
        self.terms.get(&exps).cloned().unwrap_or_else(T::zero)
    }

    /// Coefficient of a named monomial; unnamed variables get exponent 0.
    pub fn coefficient_of(&self, mono: &[(&str, i32)]) -> Result<T> {
        for (v, _) in mono {
            if self.index_of(v).is_none() {
                return Err(Error::UnknownVariable(v.to_string()));
            }
        }
        let exps: Vec<i32> =
            self.vars.iter().map(|v| mono.iter().find(|(w, _)| w == v).map_or(0, |(_, e)| *e)).collect();
        self.coefficient(&exps)
    }

    pub fn map_coeffs<U: Coeff, F: Fn(&T) -> U>(&self, f: F) -> Laurent<U> {
        let mut out = Laurent {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), f(c))).collect(),
            caps: self.caps.clone(),
        };
        out.prune_caps();
        out
    }

    /// Formal derivative in `var`.
    pub fn derivative(&self, var: &str) -> Self {
        let Some(i) = self.index_of(var) else {
            return Laurent { vars: self.vars.clone(), terms: BTreeMap::new(), caps: self.caps.clone() };
        };
        let mut out = Laurent { vars: self.vars.clone(), terms: BTreeMap::new(), caps: self.caps.clone() };
        out.caps[i] = out.caps[i].map(|c| c - 1);
        for (e, c) in &self.terms {
            if e[i] != 0 {
                let mut ne = e.clone();
                ne[i] -= 1;
                out.terms.insert(ne, c.scale(&crate::scalar::ri(e[i] as i64)));
            }
        }
        out.prune_caps();
        out
    }

    /// Compares on the box where both expressions are exact.
    pub fn agrees_within_caps(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }

    /// First exponent (within both caps) where the two expressions differ.
    pub fn first_difference(&self, other: &Self) -> Option<(Vec<String>, Vec<i32>)> {
        let vars = self.union_vars(&other.vars);
        let a = self.align(&vars);
        let b = other.align(&vars);
        let caps: Vec<Option<i32>> = a.caps.iter().zip(&b.caps).map(|(x, y)| cap_min(*x, *y)).collect();
        let inside = |e: &Vec<i32>| e.iter().zip(&caps).all(|(x, cap)| cap.is_none_or(|m| *x <= m));
        let zero = T::zero();
        for e in a.terms.keys().chain(b.terms.keys()) {
            if !inside(e) {
                continue;
            }
            let x = a.terms.get(e).unwrap_or(&zero);
            let y = b.terms.get(e).unwrap_or(&zero);
            if x != y {
                return Some((vars.clone(), e.clone()));
            }
        }
        None
    }
}

/// Equality of values: variable order and unused variables do not matter.
impl<T: Coeff> PartialEq for Laurent<T> {
    fn eq(&self, other: &Self) -> bool {
        if self.vars == other.vars {
            return self.terms == other.terms && self.caps == other.caps;
        }
        let vars = self.union_vars(&other.vars);
        let a = self.align(&vars);
        let b = other.align(&vars);
        a.terms == b.terms && a.caps == b.caps
    }
}

impl<T: Coeff> Coeff for Laurent<T> {
    fn zero() -> Self {
        Laurent { vars: Vec::new(), terms: BTreeMap::new(), caps: Vec::new() }
    }
    fn one() -> Self {
        Self::constant(T::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn from_rational(q: &Rational) -> Self {
        Self::constant(T::from_rational(q))
    }
    /// Monomials with unit coefficient are the only units.
    fn unit_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 || self.caps.iter().any(|c| c.is_some()) {
            return None;
        }
        let (e, c) = self.terms.iter().next()?;
        let inv = c.unit_inverse()?;
        let ne: Vec<i32> = e.iter().map(|x| -x).collect();
        let mut terms = BTreeMap::new();
        terms.insert(ne, inv);
        Some(Laurent { vars: self.vars.clone(), terms, caps: self.caps.clone() })
    }
}

impl<T: Coeff + fmt::Display> fmt::Display for Laurent<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (v, x) in self.vars.iter().zip(e) {
                match x {
                    0 => {}
                    1 => write!(f, "*{v}")?,
                    _ => write!(f, "*{v}^{x}")?,
                }
            }
        }
        Ok(())
    }
}

impl<T: Coeff> fmt::Debug for Laurent<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Laurent")
            .field("vars", &self.vars)
            .field("caps", &self.caps)
            .field("terms", &self.terms)
            .finish()
    }
}

/// Expands `(sum_i a_i x_i)^r`.
///
/// For `r >= 0` the expansion is exact. For `r < 0` a region is required:
/// the dominant variable carries the negative powers and every other
/// variable appears with nonnegative powers, truncated at its cap.
pub fn binomial_expand<T: Coeff>(
    form: &[(&str, Rational)],
    exponent: i64,
    region: Option<&Region>,
    caps: &Caps,
) -> Result<Laurent<T>> {
    let names: Vec<&str> = form.iter().map(|(v, _)| *v).collect();
    if exponent >= 0 {
        let mut base = Laurent::zero_in(&names);
        for (i, (_, a)) in form.iter().enumerate() {
            let mut e = vec![0; form.len()];
            e[i] = 1;
            base = base.add(&Laurent::monomial(&names, &e, T::from_rational(a)));
        }
        let mut out = Laurent::monomial(&names, &vec![0; names.len()], T::one());
        for _ in 0..exponent {
            out = out.mul(&base);
        }
        return Ok(out);
    }
    let region = region.ok_or(Error::MissingRegion(exponent))?;
    let d = names
        .iter()
        .position(|v| *v == region.dominant)
        .ok_or_else(|| Error::BadRegion(format!("dominant {} not in the expression", region.dominant)))?;
    let mut sub_caps = Vec::new();
    for (i, v) in names.iter().enumerate() {
        if i == d {
            continue;
        }
        if !region.subordinate.iter().any(|s| s == v) {
            return Err(Error::BadRegion(format!("{v} is neither dominant nor subordinate")));
        }
        let cap = caps.get(v).ok_or_else(|| Error::BadRegion(format!("no degree cap for {v}")))?;
        sub_caps.push((i, cap.max(-1)));
    }
    let a_d = &form[d].1;
    if num_traits::Zero::is_zero(a_d) {
        return Err(Error::BadRegion("dominant coefficient is zero".into()));
    }
    let a_inv = a_d.recip();
    let max_k: i64 = sub_caps.iter().map(|(_, c)| (*c).max(0) as i64).sum();
    let mut caps_vec = vec![None; names.len()];
    for (i, c) in &sub_caps {
        caps_vec[*i] = Some(*c);
    }
    // rest^k built incrementally, truncated at the subordinate caps.
    let mut rest = Laurent::zero_in(&names);
    for (i, (_, a)) in form.iter().enumerate() {
        if i != d {
            let mut e = vec![0; form.len()];
            e[i] = 1;
            rest = rest.add(&Laurent::monomial(&names, &e, T::from_rational(a)));
        }
    }
    let mut rest_pow = Laurent::monomial(&names, &vec![0; names.len()], T::one());
    let mut out = Laurent::zero_in(&names);
    out.caps = caps_vec.clone();
    rest_pow.caps = caps_vec.clone();
    rest.caps = caps_vec.clone();
    for k in 0..=max_k {
        if k > 0 {
            rest_pow = rest_pow.mul(&rest);
            rest_pow.caps = caps_vec.clone();
            rest_pow.prune_caps();
        }
        if rest_pow.terms.is_empty() {
            break;
        }
        // C(r, k) a_d^(r-k) x_d^(r-k)
        let p = exponent - k;
        let mut coef = binomial(exponent, k as u32);
        let base = if p < 0 { a_inv.clone() } else { a_d.clone() };
        for _ in 0..p.unsigned_abs() {
            coef *= &base;
        }
        let mut e = vec![0; names.len()];
        e[d] = p as i32;
        let lead = Laurent::monomial(&names, &e, T::from_rational(&coef));
        let mut term = lead.mul(&rest_pow);
        term.caps = caps_vec.clone();
        out = out.add(&term);
    }
    out.caps = caps_vec;
    out.prune_caps();
    Ok(out)
}

/// Substitutes `var -> sum_i a_i x_i`, re-expanding every power of `var`
/// in the declared region.
///
/// If `e` is truncated in `var` at `c`, the dominant variable of the result
/// is capped at `c` minus the subordinate caps. Form variables already
/// present in `e` must be exact there.
pub fn substitute_shift<T: Coeff>(
    e: &Laurent<T>,
    var: &str,
    form: &[(&str, Rational)],
    region: &Region,
    caps: &Caps,
) -> Result<Laurent<T>> {
    let vi = e.index_of(var).ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
    for (v, _) in form {
        if *v != var && e.cap_of(v).is_some() {
            return Err(Error::BadRegion(format!("{v} is truncated in the input")));
        }
    }
    let rest_vars: Vec<String> = e.vars.iter().filter(|v| *v != var).cloned().collect();
    let rest_names: Vec<&str> = rest_vars.iter().map(|s| s.as_str()).collect();
    let var_cap = e.caps[vi];
    let sub_total: i32 =
        form.iter().filter(|(v, _)| *v != region.dominant).map(|(v, _)| caps.get(v).unwrap_or(0).max(0)).sum();

    let mut cache: BTreeMap<i32, Laurent<T>> = BTreeMap::new();
    let mut out = Laurent::zero_in(&rest_names);
    out.caps = e.caps.iter().enumerate().filter(|(i, _)| *i != vi).map(|(_, c)| *c).collect();
    for (exps, c) in &e.terms {
        let p = exps[vi];
        if let std::collections::btree_map::Entry::Vacant(slot) = cache.entry(p) {
            let mut expanded: Laurent<T> = binomial_expand(form, p as i64, Some(region), caps)?;
            if let Some(cv) = var_cap {
                expanded = expanded.with_cap(&region.dominant, cv - sub_total);
            }
            slot.insert(expanded);
        }
        let rest_exps: Vec<i32> = exps.iter().enumerate().filter(|(i, _)| *i != vi).map(|(_, x)| *x).collect();
        let mut rest = Laurent::monomial(&rest_names, &rest_exps, c.clone());
        rest.caps = out.caps.clone();
        out = out.add(&rest.mul(&cache[&p]));
    }
    if let Some(cv) = var_cap {
        out = out.with_cap(&region.dominant, cv - sub_total);
    }
    for (v, _) in form {
        if *v != region.dominant {
            if let Some(c) = caps.get(v) {
                out = out.with_cap(v, c);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ri};

    type L = Laurent<Rational>;

    fn diff(a: &str, b: &str) -> Vec<(&'static str, Rational)> {
        let a: &'static str = Box::leak(a.to_string().into_boxed_str());
        let b: &'static str = Box::leak(b.to_string().into_boxed_str());
        vec![(a, ri(1)), (b, ri(-1))]
    }

    #[test]
    fn inverse_difference_dominant_first() {
        let reg = Region::new("u0", &["u1"]).unwrap();
        let e: L = binomial_expand(&diff("u0", "u1"), -1, Some(&reg), &Caps::uniform(2)).unwrap();
        let want = L::monomial(&["u0", "u1"], &[-1, 0], ri(1))
            .add(&L::monomial(&["u0", "u1"], &[-2, 1], ri(1)))
            .add(&L::monomial(&["u0", "u1"], &[-3, 2], ri(1)));
        assert_eq!(e.terms(), want.terms());
        assert_eq!(e.coefficient_of(&[("u0", -2), ("u1", 1)]).unwrap(), ri(1));
        assert!(e.coefficient_of(&[("u0", -4), ("u1", 3)]).is_err());
    }

    #[test]
    fn polynomial_power() {
        let e: L = binomial_expand(&diff("u0", "u1"), 2, None, &Caps::default()).unwrap();
        assert_eq!(e.coefficient_of(&[("u0", 2)]).unwrap(), ri(1));
        assert_eq!(e.coefficient_of(&[("u0", 1), ("u1", 1)]).unwrap(), ri(-2));
        assert_eq!(e.coefficient_of(&[("u1", 2)]).unwrap(), ri(1));
        assert_eq!(e.len(), 3);
    }

    #[test]
    fn inverse_square() {
        let reg = Region::new("u0", &["u1"]).unwrap();
        let e: L = binomial_expand(&diff("u0", "u1"), -2, Some(&reg), &Caps::uniform(1)).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.coefficient_of(&[("u0", -2)]).unwrap(), ri(1));
        assert_eq!(e.coefficient_of(&[("u0", -3), ("u1", 1)]).unwrap(), ri(2));
    }

    #[test]
    fn negative_power_requires_region() {
        let r: Result<L> = binomial_expand(&diff("u0", "u1"), -1, None, &Caps::uniform(2));
        assert_eq!(r.unwrap_err(), Error::MissingRegion(-1));
    }

    #[test]
    fn simple_extraction() {
        let e = L::monomial(&["u"], &[-1], ri(1)).add(&L::monomial(&["u"], &[-2], ri(3)));
        assert_eq!(e.coefficient_of(&[("u", -1)]).unwrap(), ri(1));
        assert_eq!(e.coefficient_of(&[("u", 0)]).unwrap(), ri(0));
    }

    #[test]
    fn shift_region_dependence() {
        let e = L::monomial(&["u"], &[-1], ri(1));
        let form = [("z", ri(1)), ("u1", ri(1))];
        let zdom = substitute_shift(&e, "u", &form, &Region::new("z", &["u1"]).unwrap(), &Caps::uniform(1)).unwrap();
        assert_eq!(zdom.coefficient_of(&[("z", -1)]).unwrap(), ri(1));
        assert_eq!(zdom.coefficient_of(&[("z", -2), ("u1", 1)]).unwrap(), ri(-1));
        assert_eq!(zdom.len(), 2);
        let udom = substitute_shift(&e, "u", &form, &Region::new("u1", &["z"]).unwrap(), &Caps::uniform(1)).unwrap();
        assert_eq!(udom.coefficient_of(&[("u1", -1)]).unwrap(), ri(1));
        assert_eq!(udom.coefficient_of(&[("u1", -2), ("z", 1)]).unwrap(), ri(-1));
        assert_ne!(zdom.align(udom.vars()).terms(), udom.terms());
    }

    #[test]
    fn shift_of_polynomial() {
        let e = L::monomial(&["u"], &[2], ri(1));
        let form = [("z", ri(1)), ("u1", ri(1))];
        let s = substitute_shift(&e, "u", &form, &Region::new("z", &["u1"]).unwrap(), &Caps::uniform(4)).unwrap();
        assert_eq!(s.coefficient_of(&[("z", 2)]).unwrap(), ri(1));
        assert_eq!(s.coefficient_of(&[("z", 1), ("u1", 1)]).unwrap(), ri(2));
        assert_eq!(s.coefficient_of(&[("u1", 2)]).unwrap(), ri(1));
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn product_caps_follow_precision_rule() {
        // (u^-1 + O(u^2)) * (u^-2 + u^-1) is exact up to u^0.
        let a = L::monomial(&["u"], &[-1], ri(1)).with_cap("u", 2);
        let b = L::monomial(&["u"], &[-2], ri(1)).add(&L::monomial(&["u"], &[-1], ri(1)));
        let p = a.mul(&b);
        assert_eq!(p.cap_of("u"), Some(0));
        assert_eq!(p.coefficient_of(&[("u", -3)]).unwrap(), ri(1));
        assert!(p.coefficient_of(&[("u", 1)]).is_err());
    }

    #[test]
    fn units_are_monomials() {
        let m = L::monomial(&["u"], &[-3], rat(2, 3));
        assert_eq!(m.unit_inverse().unwrap(), L::monomial(&["u"], &[3], rat(3, 2)));
        assert!(L::var("u").add(&L::one()).unit_inverse().is_none());
    }

    #[test]
    fn derivative_lowers_cap() {
        let e = L::monomial(&["z"], &[-2], ri(1)).add(&L::monomial(&["z"], &[3], ri(1))).with_cap("z", 3);
        let d = e.derivative("z");
        assert_eq!(d.coefficient_of(&[("z", -3)]).unwrap(), ri(-2));
        assert_eq!(d.coefficient_of(&[("z", 2)]).unwrap(), ri(3));
        assert_eq!(d.cap_of("z"), Some(2));
    }
}
