//! The deformed Heisenberg algebras `H(C)` and `H(C)*`: modes `y_i^(r)`,
//! central brackets read off the kernel, and reduction to ordered monomials.
//!
//! Normal form uses the indices `1..N-1` only (`y_N = -(y_1 + ... + y_{N-1})`)
//! and orders modes by level, then index. Repeated modes are allowed.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hseries::HSeries;
use crate::laurent::{binomial_expand, Caps, Laurent, Region};
use crate::report::AxiomReport;
use crate::rmatrix::{RMatrixBundle, U};
use crate::sample::rng;
use crate::scalar::{ri, CPoly, Coeff, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mode {
    pub index: u8,
    pub level: i32,
}

impl Mode {
    pub fn new(index: u8, level: i32) -> Self {
        Mode { index, level }
    }
}

// level first, then index
impl Ord for Mode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.level, self.index).cmp(&(other.level, other.index))
    }
}

impl PartialOrd for Mode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y{}({})", self.index, self.level)
    }
}

/// Central coefficients: series in `h` over polynomials in `C`.
pub type Central = HSeries<CPoly>;

/// A product of modes with a central coefficient, in any order.
#[derive(Clone, Debug, PartialEq)]
pub struct Word {
    pub factors: Vec<Mode>,
    pub coeff: Central,
}

/// Linear combination of words; after reduction every key is ordered.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Element {
    terms: BTreeMap<Vec<Mode>, Central>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn from_word(w: &Word) -> Self {
        let mut e = Element::zero();
        e.add_term(w.factors.clone(), w.coeff.clone());
        e
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Mode>, Central> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, modes: Vec<Mode>, c: Central) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&modes) {
            Some(x) => {
                *x = x.add(&c);
                if x.is_zero() {
                    self.terms.remove(&modes);
                }
            }
            None => {
                self.terms.insert(modes, c);
            }
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    /// Concatenation product (no reduction).
    pub fn concat(&self, other: &Element) -> Element {
        let mut out = Element::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut m = a.clone();
                m.extend_from_slice(b);
                out.add_term(m, x.mul(y));
            }
        }
        out
    }

    pub fn is_ordered(&self) -> bool {
        self.terms.keys().all(|m| is_ordered(m))
    }

    /// Evaluates the central parameter: `C -> c`.
    pub fn specialize(&self, c: &Rational) -> BTreeMap<Vec<Mode>, HSeries<Rational>> {
        let mut out = BTreeMap::new();
        for (m, x) in &self.terms {
            let v = x.map(|p| p.eval(c));
            if !v.is_zero() {
                out.insert(m.clone(), v);
            }
        }
        out
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // scalar part last
        let mut items: Vec<_> = self.terms.iter().filter(|(m, _)| !m.is_empty()).collect();
        items.extend(self.terms.iter().filter(|(m, _)| m.is_empty()));
        for (idx, (m, c)) in items.into_iter().enumerate() {
            let word: Vec<String> = m.iter().map(|x| x.to_string()).collect();
            let word = word.join(" ");
            let is_one = c.coeffs().len() == 1 && c.coeff(0) == CPoly::one();
            let is_minus_one = c.coeffs().len() == 1 && c.coeff(0) == CPoly::one().neg_ref();
            let body = if m.is_empty() {
                format!("[{c}]")
            } else if is_one {
                word
            } else if is_minus_one {
                format!("-{word}")
            } else {
                format!("[{c}] {word}")
            };
            if idx == 0 {
                write!(f, "{body}")?;
            } else if let Some(rest) = body.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

pub fn is_ordered(m: &[Mode]) -> bool {
    m.windows(2).all(|w| w[0] <= w[1])
}

/// Order in which out-of-order adjacent pairs are resolved.
#[derive(Clone, Copy, Debug)]
pub enum Strategy {
    Leftmost,
    Rightmost,
    Random(u64),
}

/// `H(C)` (or `H(C)*` when `star`) for fixed `N` and order `K`.
#[derive(Debug)]
pub struct HeisAlgebra {
    bundle: Arc<RMatrixBundle>,
    star: bool,
    cache: RwLock<HashMap<(u8, i32, u8, i32), Central>>,
}

impl HeisAlgebra {
    pub fn new(bundle: Arc<RMatrixBundle>, star: bool) -> Self {
        HeisAlgebra { bundle, star, cache: RwLock::default() }
    }

    pub fn build(n: usize, k: usize, star: bool) -> Result<Self> {
        Ok(Self::new(Arc::new(RMatrixBundle::build(n, k)?), star))
    }

    pub fn n(&self) -> usize {
        self.bundle.n
    }

    pub fn k(&self) -> usize {
        self.bundle.k
    }

    pub fn is_star(&self) -> bool {
        self.star
    }

    pub fn mode(&self, index: u8, level: i32) -> Result<Mode> {
        if index == 0 || index as usize > self.n() {
            return Err(Error::IndexOutOfRange(format!("mode index {index} not in 1..={}", self.n())));
        }
        if self.star && level == 0 {
            return Err(Error::ZeroModeExcluded);
        }
        Ok(Mode::new(index, level))
    }

    fn check(&self, m: &Mode) -> Result<()> {
        self.mode(m.index, m.level).map(|_| ())
    }

    /// `[y_i^(r), y_j^(s)]`: coefficient of `u^(-r-1) v^(-s-1)` in
    /// `s_ij(v - u) - s_ij(u - v)`, the first expanded in nonnegative powers
    /// of `u`, the second in nonnegative powers of `v`.
    pub fn mode_bracket(&self, i: u8, r: i32, j: u8, s: i32) -> Result<Central> {
        self.check(&Mode::new(i, r))?;
        self.check(&Mode::new(j, s))?;
        let key = (i, r, j, s);
        if let Some(v) = self.cache.read().expect("bracket cache").get(&key) {
            return Ok(v.clone());
        }
        let v = self.compute_bracket(i, r, j, s)?;
        self.cache.write().expect("bracket cache").entry(key).or_insert(v.clone());
        Ok(v)
    }

    fn compute_bracket(&self, i: u8, r: i32, j: u8, s: i32) -> Result<Central> {
        let k = self.k();
        let sij = self.bundle.entry_s_diag(i, j)?;
        let mut coeffs = vec![CPoly::zero(); k + 1];
        // (dominant, subordinate, sign of the subordinate, extracted exponents)
        let mut parts: Vec<(&str, &str, i32, i32, Rational)> = Vec::new();
        if r <= -1 {
            parts.push(("v", "u", -r - 1, -s - 1, ri(1)));
        }
        if s <= -1 {
            parts.push(("u", "v", -s - 1, -r - 1, ri(-1)));
        }
        for (dom, sub, sub_exp, dom_exp, sign) in parts {
            let region = Region::new(dom, &[sub])?;
            let caps = Caps::default().with(sub, sub_exp);
            for (h, lau) in sij.iter() {
                for (e, c) in lau.terms() {
                    let ui = lau.vars().iter().position(|x| x == U);
                    let p = ui.map_or(0, |x| e[x]) as i64;
                    let form = [(dom, ri(1)), (sub, ri(-1))];
                    let ex: Laurent<Rational> = binomial_expand(&form, p, Some(&region), &caps)?;
                    let got = ex.coeff_at(&[(dom, dom_exp), (sub, sub_exp)]);
                    if got != ri(0) {
                        coeffs[h] = coeffs[h].add_ref(&c.scale(&(got * &sign)));
                    }
                }
            }
        }
        Ok(HSeries::new(k, coeffs))
    }

    /// Rewrites index-`N` modes through the trace relation.
    pub fn eliminate_last(&self, e: &Element) -> Element {
        let nn = self.n() as u8;
        let mut out = Element::zero();
        for (m, c) in e.terms() {
            let mut partial: Vec<(Vec<Mode>, bool)> = vec![(Vec::new(), false)];
            for x in m {
                if x.index == nn {
                    let mut next = Vec::new();
                    for (w, neg) in &partial {
                        for i in 1..nn {
                            let mut w2 = w.clone();
                            w2.push(Mode::new(i, x.level));
                            next.push((w2, !neg));
                        }
                    }
                    partial = next;
                } else {
                    for (w, _) in partial.iter_mut() {
                        w.push(*x);
                    }
                }
            }
            for (w, neg) in partial {
                out.add_term(w, if neg { c.neg() } else { c.clone() });
            }
        }
        out
    }

    /// Reduces to a combination of ordered monomials.
    pub fn reduce_with(&self, e: &Element, strategy: Strategy) -> Result<Element> {
        for m in e.terms().keys() {
            for x in m {
                self.check(x)?;
            }
        }
        let mut rand = match strategy {
            Strategy::Random(seed) => Some(rng(seed)),
            _ => None,
        };
        let mut pending = self.eliminate_last(e);
        let mut done = Element::zero();
        while let Some((m, c)) = pending.terms.pop_first() {
            let bad: Vec<usize> = (0..m.len().saturating_sub(1)).filter(|&p| m[p] > m[p + 1]).collect();
            if bad.is_empty() {
                done.add_term(m, c);
                continue;
            }
            let p = match strategy {
                Strategy::Leftmost => bad[0],
                Strategy::Rightmost => bad[bad.len() - 1],
                Strategy::Random(_) => *bad.choose(rand.as_mut().expect("seeded")).expect("nonempty"),
            };
            let (x, y) = (m[p], m[p + 1]);
            let mut swapped = m.clone();
            swapped.swap(p, p + 1);
            pending.add_term(swapped, c.clone());
            let br = self.mode_bracket(x.index, x.level, y.index, y.level)?;
            if !br.is_zero() {
                let mut shorter = m[..p].to_vec();
                shorter.extend_from_slice(&m[p + 2..]);
                pending.add_term(shorter, c.mul(&br));
            }
        }
        Ok(done)
    }

    pub fn pbw_reduce(&self, w: &Word) -> Result<Element> {
        self.reduce_with(&Element::from_word(w), Strategy::Leftmost)
    }

    pub fn reduce(&self, e: &Element) -> Result<Element> {
        self.reduce_with(e, Strategy::Leftmost)
    }

    /// Random word of length `1..=max_len` with levels in `-max_level..=max_level`.
    pub fn random_word<R: Rng>(&self, r: &mut R, max_len: usize, max_level: i32) -> Word {
        let len = r.gen_range(1..=max_len);
        let mut factors = Vec::with_capacity(len);
        while factors.len() < len {
            let level = r.gen_range(-max_level..=max_level);
            if self.star && level == 0 {
                continue;
            }
            factors.push(Mode::new(r.gen_range(1..=self.n() as u8), level));
        }
        Word { factors, coeff: HSeries::one_with_cap(self.k()) }
    }

    /// Confluence, idempotence and compatibility with products on one pair of words.
    pub fn confluence_witness(&self, w1: &Word, w2: &Word, seed: u64) -> Result<Option<String>> {
        let e = Element::from_word(w1);
        let left = self.reduce_with(&e, Strategy::Leftmost)?;
        if !left.is_ordered() {
            return Ok(Some(format!("{}: unordered output", word_string(w1))));
        }
        if self.reduce_with(&e, Strategy::Rightmost)? != left {
            return Ok(Some(format!("{}: rightmost strategy differs", word_string(w1))));
        }
        if self.reduce_with(&e, Strategy::Random(seed))? != left {
            return Ok(Some(format!("{}: random strategy differs", word_string(w1))));
        }
        if self.reduce(&left)? != left {
            return Ok(Some(format!("{}: not idempotent", word_string(w1))));
        }
        let e2 = Element::from_word(w2);
        let prod = self.reduce(&self.reduce(&e)?.concat(&self.reduce(&e2)?))?;
        if prod != self.reduce(&e.concat(&e2))? {
            return Ok(Some(format!("{} * {}: product mismatch", word_string(w1), word_string(w2))));
        }
        Ok(None)
    }

    /// Checks the bracket support law on `|r|, |s| <= bound` for all index pairs:
    /// zero unless `r + s >= 0`, divisible by `h^(r+s)`, antisymmetric, and at
    /// `h^0` equal to `r C (δ_ij - 1/N) δ_{r+s,0}`.
    pub fn support_witness(&self, bound: i32) -> Result<Option<String>> {
        let n = self.n() as u8;
        let n_inv = Rational::new(1.into(), (n as i64).into());
        for i in 1..=n {
            for j in 1..=n {
                for r in -bound..=bound {
                    for s in -bound..=bound {
                        if self.star && (r == 0 || s == 0) {
                            continue;
                        }
                        let b = self.mode_bracket(i, r, j, s)?;
                        let tag = format!("[y{i}({r}), y{j}({s})]");
                        if r + s < 0 && !b.is_zero() {
                            return Ok(Some(format!("{tag} nonzero below level zero")));
                        }
                        if r + s >= 0 && !b.divisible_by_h_power((r + s) as usize) {
                            return Ok(Some(format!("{tag} not divisible by h^{}", r + s)));
                        }
                        if b != self.mode_bracket(j, s, i, r)?.neg() {
                            return Ok(Some(format!("{tag} not antisymmetric")));
                        }
                        let delta = if i == j { ri(1) } else { ri(0) };
                        let want = if r + s == 0 {
                            CPoly::monomial(ri(r as i64) * (delta - &n_inv), 1)
                        } else {
                            CPoly::zero()
                        };
                        if b.coeff(0) != want {
                            return Ok(Some(format!("{tag} has h^0 part {} instead of {}", b.coeff(0), want)));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// At `C = 0` the reduction only permutes modes at `h^0`.
    pub fn commutative_at_zero_witness(&self, w: &Word) -> Result<Option<String>> {
        let red = self.reduce(&Element::from_word(w))?;
        let spec = red.specialize(&ri(0));
        let mut sorted = Element::zero();
        let start = Element::from_word(w);
        for (m, c) in self.eliminate_last(&start).terms() {
            let mut m = m.clone();
            m.sort();
            sorted.add_term(m, c.clone());
        }
        let want = sorted.specialize(&ri(0));
        let zero = HSeries::zero_with_cap(0);
        for key in spec.keys().chain(want.keys()) {
            let a = spec.get(key).map_or(zero.clone(), |x| x.truncate(0));
            let b = want.get(key).map_or(zero.clone(), |x| x.truncate(0));
            if a != b {
                return Ok(Some(format!("{} at C = 0", word_string(w))));
            }
        }
        Ok(None)
    }

    /// Runs the three PBW checks on `samples` seeded random words.
    pub fn verify_pbw(&self, samples: usize, max_len: usize, seed: u64, bracket_bound: i32) -> Result<AxiomReport> {
        let mut r = rng(seed);
        let params = |rep: AxiomReport| {
            rep.param("N", self.n()).param("K", self.k()).param("seed", seed).param("star", self.star)
        };
        if let Some(w) = self.support_witness(bracket_bound)? {
            return Ok(params(AxiomReport::fail("pbw", 0, w)));
        }
        for idx in 0..samples {
            let w1 = self.random_word(&mut r, max_len, 3);
            let w2 = self.random_word(&mut r, max_len.min(3), 3);
            let s = r.gen::<u64>();
            if let Some(w) = self.confluence_witness(&w1, &w2, s)? {
                return Ok(params(AxiomReport::fail("pbw", idx + 1, w)));
            }
            if let Some(w) = self.commutative_at_zero_witness(&w1)? {
                return Ok(params(AxiomReport::fail("pbw", idx + 1, w)));
            }
        }
        Ok(params(AxiomReport::pass("pbw", samples)))
    }
}

pub fn word_string(w: &Word) -> String {
    w.factors.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ")
}

/// Parses `"y1(1) y2(-3)"`; `yN` is accepted as the last index.
pub fn parse_word(s: &str, n: usize) -> Result<Vec<Mode>> {
    let mut out = Vec::new();
    for tok in s.split_whitespace() {
        let bad = || Error::Parse(format!("bad mode {tok:?}, expected like y1(-2)"));
        let body = tok.strip_prefix('y').ok_or_else(bad)?;
        let (idx, rest) = body.split_once('(').ok_or_else(bad)?;
        let lvl = rest.strip_suffix(')').ok_or_else(bad)?;
        let index: u8 = if idx == "N" { n as u8 } else { idx.parse().map_err(|_| bad())? };
        let level: i32 = lvl.parse().map_err(|_| bad())?;
        out.push(Mode::new(index, level));
    }
    if out.is_empty() {
        return Err(Error::Parse("empty word".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn single_swap() {
        let alg = HeisAlgebra::build(2, 2, false).unwrap();
        let w = Word { factors: parse_word("y1(1) y1(-1)", 2).unwrap(), coeff: HSeries::one_with_cap(2) };
        let red = alg.pbw_reduce(&w).unwrap();
        assert_eq!(red.terms().len(), 2);
        let scalar = &red.terms()[&Vec::new()];
        assert_eq!(scalar.coeff(0), CPoly::monomial(rat(1, 2), 1));
        assert!(scalar.coeff(1).is_zero() && scalar.coeff(2).is_zero());
        assert_eq!(red.to_string(), "y1(-1) y1(1) + [C/2 + O(h^3)]");
    }

    #[test]
    fn last_index_eliminated() {
        let alg = HeisAlgebra::build(3, 1, false).unwrap();
        let w = Word { factors: parse_word("yN(-1)", 3).unwrap(), coeff: HSeries::one_with_cap(1) };
        assert_eq!(alg.pbw_reduce(&w).unwrap().to_string(), "-y1(-1) - y2(-1)");
    }

    #[test]
    fn star_rejects_level_zero() {
        let alg = HeisAlgebra::build(2, 1, true).unwrap();
        assert!(matches!(alg.mode(1, 0), Err(Error::ZeroModeExcluded)));
    }

    #[test]
    fn parse_errors() {
        assert!(parse_word("x1(1)", 2).is_err());
        assert!(parse_word("y1(a)", 2).is_err());
        assert!(parse_word("", 2).is_err());
    }
}
