//! The kernel `S(u,c)` at a numeric level, flattened into contraction tables.
//!
//! Every table is built once through the generic Laurent machinery and then
//! cached as a list of `(h order, exponent, coefficient)` triples.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::hseries::HSeries;
use crate::laurent::{substitute_shift, Caps, Laurent, Region};
use crate::rmatrix::{build_t, entry_s, LSeries, RMatrixBundle, SeriesOp, U, Z};
use crate::scalar::{ri, Rational};

/// One monomial `coeff * h^h * var^exp`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub h: usize,
    pub exp: i32,
    pub coeff: Rational,
}

pub type Terms = Arc<Vec<Term>>;

type Key4 = (u8, u8, u8, u8);

/// Contraction data for fixed `N`, level `c` and order `K`.
#[derive(Debug)]
pub struct Kernel {
    n: usize,
    k: usize,
    c: Rational,
    s: SeriesOp<Rational>,
    t: SeriesOp<Rational>,
    s_flat: HashMap<Key4, Terms>,
    t_flat: HashMap<Key4, Terms>,
    ann: RwLock<HashMap<(Key4, u32), Terms>>,
    yann: RwLock<HashMap<(Key4, u32, u32), Terms>>,
    braid: RwLock<HashMap<(Key4, u32, u32), Terms>>,
}

fn flatten(l: &LSeries<Rational>, var: &str) -> Vec<Term> {
    let mut out = Vec::new();
    for (h, lau) in l.iter() {
        let i = lau.vars().iter().position(|v| v == var);
        for (e, c) in lau.terms() {
            out.push(Term { h, exp: i.map_or(0, |i| e[i]), coeff: c.clone() });
        }
    }
    out
}

fn unflatten(terms: &[Term], var: &str, k: usize) -> LSeries<Rational> {
    let mut coeffs: Vec<BTreeMap<Vec<i32>, Rational>> = vec![BTreeMap::new(); k + 1];
    for t in terms {
        *coeffs[t.h].entry(vec![t.exp]).or_insert_with(|| ri(0)) += &t.coeff;
    }
    HSeries::new(k, coeffs.into_iter().map(|m| Laurent::from_terms(&[var], vec![None], m)).collect())
}

/// Coefficient of `sub^j` in `l(var -> form)`, as a Laurent in `dom` only.
fn extract(
    l: &Laurent<Rational>,
    var: &str,
    form: &[(&str, Rational)],
    region: &Region,
    want: &[(&str, i32)],
) -> Result<Vec<(i32, Rational)>> {
    if l.is_empty() {
        return Ok(Vec::new());
    }
    let mut caps = Caps::default();
    for (v, j) in want {
        caps = caps.with(v, *j);
    }
    let e = substitute_shift(l, var, form, region, &caps)?;
    let di = e.vars().iter().position(|v| *v == region.dominant);
    let mut out = Vec::new();
    for (exps, c) in e.terms() {
        let hit = want.iter().all(|(v, j)| {
            let i = e.vars().iter().position(|w| w == v);
            i.map_or(*j == 0, |i| exps[i] == *j)
        });
        if hit {
            out.push((di.map_or(0, |i| exps[i]), c.clone()));
        }
    }
    Ok(out)
}

impl Kernel {
    pub fn new(bundle: &RMatrixBundle, c: &Rational) -> Result<Self> {
        let s = bundle.s_at(c);
        let t = build_t(&s)?;
        let n = bundle.n;
        let mut s_flat = HashMap::new();
        let mut t_flat = HashMap::new();
        for a in 1..=n as u8 {
            for b in 1..=n as u8 {
                for cc in 1..=n as u8 {
                    for d in 1..=n as u8 {
                        let key = (a, b, cc, d);
                        s_flat.insert(key, Arc::new(flatten(&entry_s(&s, a, b, cc, d)?, U)));
                        t_flat.insert(key, Arc::new(flatten(&entry_s(&t, a, b, cc, d)?, Z)));
                    }
                }
            }
        }
        Ok(Kernel {
            n,
            k: bundle.k,
            c: c.clone(),
            s,
            t,
            s_flat,
            t_flat,
            ann: RwLock::default(),
            yann: RwLock::default(),
            braid: RwLock::default(),
        })
    }

    /// Builds the bundle and the kernel in one go.
    pub fn build(n: usize, k: usize, c: &Rational) -> Result<Self> {
        Self::new(&RMatrixBundle::build(n, k)?, c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn level(&self) -> &Rational {
        &self.c
    }

    pub fn s(&self) -> &SeriesOp<Rational> {
        &self.s
    }

    pub fn t(&self) -> &SeriesOp<Rational> {
        &self.t
    }

    fn check(&self, idx: &[u8]) -> Result<()> {
        for &i in idx {
            if i == 0 || i as usize > self.n {
                return Err(Error::IndexOutOfRange(format!("{i} not in 1..={}", self.n)));
            }
        }
        Ok(())
    }

    /// Terms of `s_abcd(u)` in `u`.
    pub fn s_terms(&self, a: u8, b: u8, c: u8, d: u8) -> Result<Terms> {
        self.check(&[a, b, c, d])?;
        Ok(self.s_flat[&(a, b, c, d)].clone())
    }

    /// Terms of `t_abcd(z)` in `z`.
    pub fn t_terms(&self, a: u8, b: u8, c: u8, d: u8) -> Result<Terms> {
        self.check(&[a, b, c, d])?;
        Ok(self.t_flat[&(a, b, c, d)].clone())
    }

    /// `s_abcd` as an `h`-series of Laurent polynomials in `var`.
    pub fn s_series(&self, a: u8, b: u8, c: u8, d: u8, var: &str) -> Result<LSeries<Rational>> {
        Ok(unflatten(&self.s_terms(a, b, c, d)?, var, self.k))
    }

    fn cached<K: std::hash::Hash + Eq + Copy>(
        map: &RwLock<HashMap<K, Terms>>,
        key: K,
        fill: impl FnOnce() -> Result<Vec<Term>>,
    ) -> Result<Terms> {
        if let Some(v) = map.read().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let v = Arc::new(fill()?);
        map.write().expect("cache lock").entry(key).or_insert(v.clone());
        Ok(v)
    }

    /// Contraction of `x⁻_ab(u)` with `x_cd^(-q)`: the coefficient of
    /// `v^(q-1)` in `-s_abcd(u - v)`, expanded with `u` dominant.
    pub fn ann_terms(&self, a: u8, b: u8, c: u8, d: u8, q: u32) -> Result<Terms> {
        self.check(&[a, b, c, d])?;
        Self::cached(&self.ann, ((a, b, c, d), q), || {
            let s = self.s_series(a, b, c, d, U)?;
            let region = Region::new(U, &["v"])?;
            let mut out = Vec::new();
            for (h, l) in s.iter() {
                let form = [(U, ri(1)), ("v", ri(-1))];
                for (e, x) in extract(l, U, &form, &region, &[("v", q as i32 - 1)])? {
                    out.push(Term { h, exp: e, coeff: -x });
                }
            }
            Ok(out)
        })
    }

    /// The contraction above evaluated at `z + w`, `z` dominant, keeping the
    /// coefficient of `w^(r-1)`: a Laurent polynomial in `z` per order.
    pub fn yann_terms(&self, a: u8, b: u8, c: u8, d: u8, q: u32, r: u32) -> Result<Terms> {
        Self::cached(&self.yann, ((a, b, c, d), q, r), || {
            let base = unflatten(&self.ann_terms(a, b, c, d, q)?, U, self.k);
            let region = Region::new(Z, &["w"])?;
            let mut out = Vec::new();
            for (h, l) in base.iter() {
                let form = [(Z, ri(1)), ("w", ri(1))];
                for (e, x) in extract(l, U, &form, &region, &[("w", r as i32 - 1)])? {
                    out.push(Term { h, exp: e, coeff: x });
                }
            }
            Ok(out)
        })
    }

    /// Braiding contraction of `x_ab^(-r)` with `x_cd^(-q)`: the coefficient
    /// of `u^(r-1) v^(q-1)` in `t_abcd(z + u - v)`, `z` dominant.
    pub fn braid_terms(&self, a: u8, b: u8, c: u8, d: u8, r: u32, q: u32) -> Result<Terms> {
        self.check(&[a, b, c, d])?;
        Self::cached(&self.braid, ((a, b, c, d), r, q), || {
            let t = unflatten(&self.t_flat[&(a, b, c, d)], Z, self.k);
            let region = Region::new(Z, &["u", "v"])?;
            let mut out = Vec::new();
            for (h, l) in t.iter() {
                let form = [(Z, ri(1)), ("u", ri(1)), ("v", ri(-1))];
                let want = [("u", r as i32 - 1), ("v", q as i32 - 1)];
                for (e, x) in extract(l, Z, &form, &region, &want)? {
                    out.push(Term { h, exp: e, coeff: x });
                }
            }
            Ok(out)
        })
    }
}

/// `coeff * h^h` as a series capped at `k`.
pub fn term_series(t: &Term, k: usize) -> HSeries<Rational> {
    HSeries::monomial(k, t.h, t.coeff.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{binomial, rat};

    #[test]
    fn annihilation_table_matches_binomial_rule() {
        let ker = Kernel::build(2, 3, &ri(1)).unwrap();
        for q in 1..4u32 {
            let got = ker.ann_terms(1, 1, 1, 1, q).unwrap();
            let s = ker.s_terms(1, 1, 1, 1).unwrap();
            // [v^(q-1)] (u - v)^e = C(e, q-1) (-1)^(q-1) u^(e-q+1)
            let sign = if q % 2 == 1 { ri(1) } else { ri(-1) };
            let want: Vec<Term> = s
                .iter()
                .map(|t| Term {
                    h: t.h,
                    exp: t.exp - q as i32 + 1,
                    coeff: -(t.coeff.clone() * binomial(t.exp as i64, q - 1) * &sign),
                })
                .collect();
            assert_eq!(*got, want);
        }
    }

    #[test]
    fn leading_contraction() {
        // h^0 of -s_1111(u) at N=2, c=1 is -(1/2)(1-2)/u^2 = 1/(2u^2)
        let ker = Kernel::build(2, 2, &ri(1)).unwrap();
        let a = ker.ann_terms(1, 1, 1, 1, 1).unwrap();
        assert_eq!(a[0], Term { h: 0, exp: -2, coeff: rat(1, 2) });
    }

    #[test]
    fn braid_table_is_order_h() {
        let ker = Kernel::build(3, 3, &rat(1, 2)).unwrap();
        let b = ker.braid_terms(1, 2, 2, 1, 1, 2).unwrap();
        assert!(!b.is_empty());
        assert!(b.iter().all(|t| t.h >= 1));
    }
}
