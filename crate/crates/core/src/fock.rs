//! The state algebra: polynomials in `x_ij^(-r)` modulo the diagonal trace
//! ideal, together with the creation and annihilation fields acting on it.
//!
//! Normal form removes `x_NN^(-r)` by substituting `-(x_11^(-r) + ... +
//! x_(N-1)(N-1)^(-r))`. Field results are [`Laurent`] expressions whose
//! coefficients are states.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::hseries::{HSeries, EXACT};
use crate::kernel::{term_series, Kernel};
use crate::laurent::{binomial_expand, Caps, Laurent, Region};
use crate::scalar::{binomial, ri, Coeff, Rational};

/// The generator `x_ij^(-r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub row: u8,
    pub col: u8,
    pub depth: u32,
}

impl Generator {
    pub fn new(row: u8, col: u8, depth: u32) -> Self {
        assert!(depth >= 1, "generator depth starts at 1");
        Generator { row, col, depth }
    }

    pub fn is_diagonal(&self) -> bool {
        self.row == self.col
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.row > 9 || self.col > 9 {
            write!(f, "x{}_{}(-{})", self.row, self.col, self.depth)
        } else {
            write!(f, "x{}{}(-{})", self.row, self.col, self.depth)
        }
    }
}

/// A commutative monomial, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<Generator>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(mut gens: Vec<Generator>) -> Self {
        gens.sort();
        Monomial(gens)
    }

    pub fn gens(&self) -> &[Generator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of depths; `x^(-r)` has weight `r`.
    pub fn weight(&self) -> u32 {
        self.0.iter().map(|g| g.depth).sum()
    }

    pub fn max_depth(&self) -> u32 {
        self.0.iter().map(|g| g.depth).max().unwrap_or(0)
    }

    pub fn is_diagonal(&self) -> bool {
        self.0.iter().all(|g| g.is_diagonal())
    }

    /// The monomial with the generator at position `i` removed.
    pub fn without(&self, i: usize) -> Self {
        let mut g = self.0.clone();
        g.remove(i);
        Monomial(g)
    }

    pub fn times(&self, g: Generator) -> Self {
        let mut v = self.0.clone();
        let at = v.partition_point(|x| *x <= g);
        v.insert(at, g);
        Monomial(v)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Monomial::new(v)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// A state: finite combination of monomials with `h`-series coefficients.
#[derive(Clone, Debug, Default)]
pub struct State {
    terms: BTreeMap<Monomial, HSeries<Rational>>,
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        let zero = HSeries::zero_with_cap(EXACT);
        self.terms
            .keys()
            .chain(other.terms.keys())
            .all(|m| self.terms.get(m).unwrap_or(&zero) == other.terms.get(m).unwrap_or(&zero))
    }
}

impl State {
    pub fn zero() -> Self {
        State::default()
    }

    /// The vacuum with an exact unit coefficient.
    pub fn vacuum() -> Self {
        Self::monomial(Monomial::one(), HSeries::one_with_cap(EXACT))
    }

    pub fn monomial(m: Monomial, c: HSeries<Rational>) -> Self {
        let mut s = State::zero();
        s.add_term(m, c);
        s
    }

    /// A single monomial with coefficient one.
    pub fn from_gens(gens: Vec<Generator>) -> Self {
        Self::monomial(Monomial::new(gens), HSeries::one_with_cap(EXACT))
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, HSeries<Rational>> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    pub fn add_term(&mut self, m: Monomial, c: HSeries<Rational>) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x = x.add(&c);
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add_assign(&mut self, other: &State) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &State) -> State {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn neg(&self) -> State {
        State { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, other: &State) -> State {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &HSeries<Rational>) -> State {
        let mut out = State::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x.mul(c));
        }
        out
    }

    pub fn scale_q(&self, q: &Rational) -> State {
        let mut out = State::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x.scale_rational(q));
        }
        out
    }

    /// Polynomial product.
    pub fn mul(&self, other: &State) -> State {
        let mut out = State::zero();
        for (m, x) in &self.terms {
            for (n, y) in &other.terms {
                out.add_term(m.mul(n), x.mul(y));
            }
        }
        out
    }

    /// Multiplies every monomial by one generator.
    pub fn times_gen(&self, g: Generator) -> State {
        State { terms: self.terms.iter().map(|(m, c)| (m.times(g), c.clone())).collect() }
    }

    /// Keeps `h^0 .. h^k`.
    pub fn truncate(&self, k: usize) -> State {
        let mut out = State::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.truncate(k));
        }
        out
    }

    /// The `h^k` coefficient as a state with exact coefficients.
    pub fn h_part(&self, k: usize) -> State {
        let mut out = State::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), HSeries::constant(EXACT, c.coeff(k)));
        }
        out
    }

    pub fn max_weight(&self) -> u32 {
        self.terms.keys().map(|m| m.weight()).max().unwrap_or(0)
    }

    pub fn max_depth(&self) -> u32 {
        self.terms.keys().map(|m| m.max_depth()).max().unwrap_or(0)
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(|m| m.is_diagonal())
    }

    /// Smallest `h` cap among the coefficients.
    pub fn cap(&self) -> usize {
        self.terms.values().map(|c| c.cap()).min().unwrap_or(EXACT)
    }
}

impl Coeff for State {
    fn zero() -> Self {
        State::zero()
    }
    fn one() -> Self {
        State::vacuum()
    }
    fn is_zero(&self) -> bool {
        State::is_zero(self)
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
        State::monomial(Monomial::one(), HSeries::constant(EXACT, q.clone()))
    }
    fn unit_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        if !m.is_empty() {
            return None;
        }
        Some(State::monomial(Monomial::one(), c.invert().ok()?))
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c}] {m}")?;
        }
        Ok(())
    }
}

/// Canonical representative modulo the trace ideal.
pub fn normalize(n: usize, s: &State) -> State {
    let nn = n as u8;
    let mut out = State::zero();
    for (m, c) in s.terms() {
        if !m.gens().iter().any(|g| g.row == nn && g.col == nn) {
            out.add_term(m.clone(), c.clone());
            continue;
        }
        // expand each x_NN^(-r) into -sum_{i<N} x_ii^(-r)
        let mut partial: Vec<(Vec<Generator>, bool)> = vec![(Vec::new(), false)];
        for g in m.gens() {
            if g.row == nn && g.col == nn {
                let mut next = Vec::with_capacity(partial.len() * (n - 1));
                for (gs, neg) in &partial {
                    for i in 1..nn {
                        let mut v = gs.clone();
                        v.push(Generator::new(i, i, g.depth));
                        next.push((v, !neg));
                    }
                }
                partial = next;
            } else {
                for (gs, _) in partial.iter_mut() {
                    gs.push(*g);
                }
            }
        }
        for (gs, neg) in partial {
            out.add_term(Monomial::new(gs), if neg { c.neg() } else { c.clone() });
        }
    }
    out
}

/// The translation operator: the derivation with `D x^(-r) = r x^(-r-1)`.
pub fn d_apply(s: &State) -> State {
    let mut out = State::zero();
    for (m, c) in s.terms() {
        for (i, g) in m.gens().iter().enumerate() {
            let bumped = m.without(i).times(Generator::new(g.row, g.col, g.depth + 1));
            out.add_term(bumped, c.scale_rational(&ri(g.depth as i64)));
        }
    }
    out
}

/// A set of disjoint ordered pairs plus the sorted unused indices (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub complement: Vec<usize>,
}

/// All sets of `k` disjoint pairs `(p, q)`, `p < q`, drawn from `1..=n`.
pub fn enumerate_matchings(n: usize, k: usize) -> Result<Vec<Matching>> {
    if 2 * k > n {
        return Err(Error::MatchingOutOfRange { n, k });
    }
    fn rec(free: &[usize], k: usize, pairs: &mut Vec<(usize, usize)>, rest: &mut Vec<usize>, out: &mut Vec<Matching>) {
        if k == 0 {
            let mut complement = rest.clone();
            complement.extend_from_slice(free);
            out.push(Matching { pairs: pairs.clone(), complement });
            return;
        }
        if free.len() < 2 * k {
            return;
        }
        let p = free[0];
        // p paired with some later q
        for j in 1..free.len() {
            let mut remaining = free[1..].to_vec();
            let q = remaining.remove(j - 1);
            pairs.push((p, q));
            rec(&remaining, k - 1, pairs, rest, out);
            pairs.pop();
        }
        // p left unpaired
        rest.push(p);
        rec(&free[1..], k, pairs, rest, out);
        rest.pop();
    }
    let free: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    rec(&free, k, &mut Vec::new(), &mut Vec::new(), &mut out);
    for m in &mut out {
        m.complement.sort_unstable();
        m.pairs.sort_unstable();
    }
    out.sort_by(|a, b| a.pairs.cmp(&b.pairs));
    Ok(out)
}

/// All sets of `k` disjoint pairs `(p, q)` with `p` in `1..=n` and `q` in
/// `n+1..=n+m`.
pub fn enumerate_bipartite(n: usize, m: usize, k: usize) -> Result<Vec<Matching>> {
    if k > n.min(m) {
        return Err(Error::MatchingOutOfRange { n: n + m, k });
    }
    fn rec(
        n: usize,
        m: usize,
        p: usize,
        k: usize,
        used: &mut Vec<bool>,
        pairs: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if pairs.len() == k {
            out.push(pairs.clone());
            return;
        }
        if p > n || n - p + 1 < k - pairs.len() {
            return;
        }
        for q in 1..=m {
            if !used[q] {
                used[q] = true;
                pairs.push((p, n + q));
                rec(n, m, p + 1, k, used, pairs, out);
                pairs.pop();
                used[q] = false;
            }
        }
        rec(n, m, p + 1, k, used, pairs, out);
    }
    let mut raw = Vec::new();
    rec(n, m, 1, k, &mut vec![false; m + 1], &mut Vec::new(), &mut raw);
    let mut out: Vec<Matching> = raw
        .into_iter()
        .map(|pairs| {
            let complement = (1..=n + m).filter(|i| !pairs.iter().any(|(p, q)| p == i || q == i)).collect();
            Matching { pairs, complement }
        })
        .collect();
    out.sort_by(|a, b| a.pairs.cmp(&b.pairs));
    Ok(out)
}

/// Field applications land here: Laurent expressions with state coefficients.
pub type FieldResult = Laurent<State>;

fn fr_const(s: &State) -> FieldResult {
    Laurent::constant(s.clone())
}

/// `x⁺_ab(u) s = sum_{r >= 1} x_ab^(-r) u^(r-1) s`, truncated at `u^cap`.
pub fn create(n: usize, a: u8, b: u8, s: &State, var: &str, cap: i32) -> FieldResult {
    let mut terms = BTreeMap::new();
    for r in 1..=(cap + 1).max(0) {
        let st = normalize(n, &s.times_gen(Generator::new(a, b, r as u32)));
        terms.insert(vec![r - 1], st);
    }
    Laurent::from_terms(&[var], vec![Some(cap)], terms)
}

/// `x⁻_ab(u) s` by the Wick rule, one generator at a time. Exact in `u`.
pub fn annihilate(kernel: &Kernel, a: u8, b: u8, s: &State, var: &str) -> Result<FieldResult> {
    let k = kernel.k();
    let mut terms: BTreeMap<Vec<i32>, State> = BTreeMap::new();
    for (m, c) in s.terms() {
        for (i, g) in m.gens().iter().enumerate() {
            let rest = m.without(i);
            for t in kernel.ann_terms(a, b, g.row, g.col, g.depth)?.iter() {
                let coeff = c.mul(&term_series(t, k));
                terms.entry(vec![t.exp]).or_default().add_term(rest.clone(), coeff);
            }
        }
    }
    let terms = terms.into_iter().map(|(e, st)| (e, normalize(kernel.n(), &st))).collect();
    Ok(Laurent::from_terms(&[var], vec![None], terms))
}

/// `x_ab(u) s = x⁺_ab(u) s + x⁻_ab(u) s`.
pub fn field_apply(kernel: &Kernel, a: u8, b: u8, s: &State, var: &str, cap: i32) -> Result<FieldResult> {
    Ok(create(kernel.n(), a, b, s, var, cap).add(&annihilate(kernel, a, b, s, var)?))
}

/// Applies `f` to every coefficient of `fr`, which must not mention `var`.
fn apply_coefficientwise(
    fr: &FieldResult,
    var: &str,
    var_cap: Option<i32>,
    f: impl Fn(&State) -> Result<FieldResult>,
) -> Result<FieldResult> {
    if fr.vars().iter().any(|v| v == var) {
        return Err(Error::BadRegion(format!("variable {var} already in use")));
    }
    let mut vars: Vec<&str> = fr.vars().iter().map(|s| s.as_str()).collect();
    vars.push(var);
    let mut caps = fr.caps().to_vec();
    caps.push(var_cap);
    let mut terms: BTreeMap<Vec<i32>, State> = BTreeMap::new();
    for (e, st) in fr.terms() {
        let r = f(st)?;
        for (x, out) in r.terms() {
            let mut key = e.clone();
            key.push(x.first().copied().unwrap_or(0));
            terms.entry(key).or_default().add_assign(out);
        }
    }
    Ok(Laurent::from_terms(&vars, caps, terms))
}

/// `x_ab(var)` applied to every coefficient of a field result.
pub fn apply_field(kernel: &Kernel, a: u8, b: u8, fr: &FieldResult, var: &str, cap: i32) -> Result<FieldResult> {
    apply_coefficientwise(fr, var, Some(cap), |s| field_apply(kernel, a, b, s, var, cap))
}

/// `x⁻_ab(var)` applied to every coefficient of a field result.
pub fn apply_annihilator(kernel: &Kernel, a: u8, b: u8, fr: &FieldResult, var: &str) -> Result<FieldResult> {
    apply_coefficientwise(fr, var, None, |s| annihilate(kernel, a, b, s, var))
}

/// `s_abcd(x - y)` expanded with `x` dominant and `y` capped, as a field
/// result with vacuum coefficients.
pub fn kernel_field(kernel: &Kernel, entry: (u8, u8, u8, u8), x: &str, y: &str, y_cap: i32) -> Result<FieldResult> {
    let (a, b, c, d) = entry;
    let region = Region::new(x, &[y])?;
    let caps = Caps::default().with(y, y_cap);
    let mut out: FieldResult = Laurent::zero_in(&[x, y]);
    for t in kernel.s_terms(a, b, c, d)?.iter() {
        let e: FieldResult = binomial_expand(&[(x, ri(1)), (y, ri(-1))], t.exp as i64, Some(&region), &caps)?;
        let scalar = State::monomial(Monomial::one(), term_series(t, kernel.k()));
        out = out.add(&e.map_coeffs(|st| st.mul(&scalar)));
    }
    Ok(out.with_cap(y, y_cap))
}

/// Matrix entry `(a_1 b_1, ..., a_n b_n)` of `x_[n](u_1, ..., u_n)` applied
/// to `s`, as the sum over matchings of kernel products times ordered fields.
pub fn normal_ordered_apply(
    kernel: &Kernel,
    entries: &[(u8, u8)],
    vars: &[&str],
    s: &State,
    cap: i32,
) -> Result<FieldResult> {
    let n = entries.len();
    if n == 0 || vars.len() != n {
        return Err(Error::VariableMismatch(
            vars.iter().map(|s| s.to_string()).collect(),
            vec![format!("{n} entries")],
        ));
    }
    let mut total: Option<FieldResult> = None;
    for k in 0..=n / 2 {
        for mt in enumerate_matchings(n, k)? {
            // fields on the complement, rightmost applied first
            let mut fr = fr_const(s);
            for &l in mt.complement.iter().rev() {
                let (a, b) = entries[l - 1];
                fr = apply_field(kernel, a, b, &fr, vars[l - 1], cap)?;
            }
            for &(p, q) in &mt.pairs {
                let (a, b) = entries[p - 1];
                let (c, d) = entries[q - 1];
                fr = fr.mul(&kernel_field(kernel, (a, b, c, d), vars[p - 1], vars[q - 1], cap)?);
            }
            total = Some(match total {
                None => fr,
                Some(t) => t.add(&fr),
            });
        }
    }
    Ok(total.expect("at least the empty matching"))
}

/// Substitutes `u_i -> z + u_i` (or `u_i + z`) in a field result.
///
/// With `z` dominant the `u_i` are kept up to `u_cap`; otherwise `z` is kept
/// up to `z_cap`. `floor` is a lower bound for the exponents of every `u_i`
/// over the whole (untruncated) series; it bounds how far truncation in one
/// variable leaks into the `z` exponents.
pub fn shift_substitute(
    fr: &FieldResult,
    vars: &[&str],
    z: &str,
    z_dominant: bool,
    u_cap: i32,
    z_cap: i32,
    floor: i32,
) -> Result<FieldResult> {
    if fr.vars().iter().any(|v| v == z) {
        return Err(Error::BadRegion(format!("variable {z} already in use")));
    }
    let idx: Vec<usize> = vars
        .iter()
        .map(|v| fr.vars().iter().position(|w| w == v).ok_or_else(|| Error::UnknownVariable(v.to_string())))
        .collect::<Result<_>>()?;
    let mut out_vars: Vec<&str> = fr.vars().iter().map(|s| s.as_str()).collect();
    out_vars.push(z);
    let zi = out_vars.len() - 1;

    // expansion of (z + u)^p as (z exponent, u exponent, coefficient)
    let expand = |p: i32| -> Vec<(i32, i32, Rational)> {
        let mut v = Vec::new();
        if z_dominant {
            for j in 0..=u_cap.max(-1) {
                if p >= 0 && j > p {
                    break;
                }
                v.push((p - j, j, binomial(p as i64, j as u32)));
            }
        } else {
            for j in 0..=z_cap.max(-1) {
                if p >= 0 && j > p {
                    break;
                }
                v.push((j, p - j, binomial(p as i64, j as u32)));
            }
        }
        v
    };

    let mut terms: BTreeMap<Vec<i32>, State> = BTreeMap::new();
    for (e, st) in fr.terms() {
        let mut partial: Vec<(Vec<i32>, Rational)> = vec![(
            {
                let mut k = e.clone();
                k.push(0);
                k
            },
            ri(1),
        )];
        for &i in &idx {
            let mut next = Vec::new();
            for (key, c) in &partial {
                for (ze, ue, b) in expand(e[i]) {
                    let mut k2 = key.clone();
                    k2[i] = ue;
                    k2[zi] += ze;
                    next.push((k2, c * &b));
                }
            }
            partial = next;
        }
        for (key, c) in partial {
            terms.entry(key).or_default().add_assign(&st.scale_q(&c));
        }
    }
    let mut caps = fr.caps().to_vec();
    caps.push(None);
    if z_dominant {
        for &i in &idx {
            caps[i] = Some(u_cap);
        }
        // an unknown term with u_i beyond its cap lands at z exponent at least
        // cap_i + 1 + sum_{j != i} floor - n u_cap
        let n = idx.len() as i32;
        let mut zc: Option<i32> = None;
        for &i in &idx {
            if let Some(ci) = fr.caps()[i] {
                let bound = ci + (n - 1) * floor - n * u_cap.max(0);
                zc = Some(zc.map_or(bound, |x: i32| x.min(bound)));
            }
        }
        caps[zi] = zc;
    } else {
        caps[zi] = Some(z_cap);
        // u_i exponents stay complete only below the original caps
        for &i in &idx {
            caps[i] = fr.caps()[i];
        }
    }
    Ok(Laurent::from_terms(&out_vars, caps, terms))
}

/// Lower bound on the exponents of the field variables in `x_[n](u) s`.
pub fn normal_ordered_floor(kernel: &Kernel, s: &State) -> i32 {
    -(kernel.k() as i32) - s.max_depth() as i32 - 2
}

/// Location of the first coefficient where two field results disagree.
pub type Witness = (Vec<String>, Vec<i32>);

/// Checks `x_ab(u1) x_cd(u2) + s_abcd(u1-u2) = x_cd(u2) x_ab(u1) + s_abcd(u2-u1)`
/// on `w`, each side in its own region, on the box of common caps.
pub fn commutator_witness(kernel: &Kernel, ab: (u8, u8), cd: (u8, u8), w: &State, cap: i32) -> Result<Option<Witness>> {
    let (a, b) = ab;
    let (c, d) = cd;
    let w_fr = fr_const(w);
    let left = apply_field(kernel, a, b, &apply_field(kernel, c, d, &w_fr, "u2", cap)?, "u1", cap)?;
    let right = apply_field(kernel, c, d, &apply_field(kernel, a, b, &w_fr, "u1", cap)?, "u2", cap)?;
    let s12 = kernel_field(kernel, (a, b, c, d), "u1", "u2", cap)?.map_coeffs(|st| st.mul(w));
    let s21 = kernel_field(kernel, (a, b, c, d), "u2", "u1", cap)?.map_coeffs(|st| st.mul(w));
    let lhs = left.add(&s12).with_cap("u1", cap).with_cap("u2", cap);
    let rhs = right.add(&s21).with_cap("u1", cap).with_cap("u2", cap);
    Ok(lhs.first_difference(&rhs))
}

/// Checks that `sum_i x_ii(u)` annihilates `w`.
pub fn trace_field_witness(kernel: &Kernel, w: &State, cap: i32) -> Result<Option<Witness>> {
    let mut total: FieldResult = Laurent::zero_in(&["u"]);
    for i in 1..=kernel.n() as u8 {
        total = total.add(&field_apply(kernel, i, i, w, "u", cap)?);
    }
    Ok(total.first_difference(&Laurent::zero_in(&["u"])))
}
