//! Restricted modules `V_H(c, α)` on diagonal states: modes act by
//! multiplication, by the character, or by contraction with the kernel.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fock::{normalize, Generator, Monomial, State};
use crate::heis::{HeisAlgebra, Mode};
use crate::hseries::HSeries;
use crate::kernel::Kernel;
use crate::report::AxiomReport;
use crate::sample::{self, small_rational};
use crate::scalar::{binomial, ri, Rational};
use crate::vertex::{weight_pairing, y_map, ZMap};

/// The values `<a_i, α>` for `i = 1..N`; they always sum to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroModeCharacter {
    values: Vec<HSeries<Rational>>,
}

impl ZeroModeCharacter {
    /// From the pairings directly; rejects data that does not sum to zero.
    pub fn new(values: Vec<HSeries<Rational>>) -> Result<Self> {
        let k = values.iter().map(|v| v.cap()).min().unwrap_or(0);
        let mut sum = HSeries::zero_with_cap(k);
        for v in &values {
            sum = sum.add(v);
        }
        if !sum.is_zero() {
            return Err(Error::BadCharacter(format!("pairings sum to {sum}")));
        }
        Ok(ZeroModeCharacter { values })
    }

    /// `α = sum_j α_j a_j`, so `<a_i, α> = α_i - mean(α)`.
    pub fn from_weights(alpha: &[HSeries<Rational>]) -> Result<Self> {
        let n = alpha.len();
        if n < 2 {
            return Err(Error::BadDimension(n));
        }
        let k = alpha.iter().map(|v| v.cap()).min().unwrap_or(0);
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = HSeries::zero_with_cap(k);
            for (j, a) in alpha.iter().enumerate() {
                v = v.add(&a.scale_rational(&weight_pairing(n, i as u8 + 1, j as u8 + 1)));
            }
            values.push(v);
        }
        Self::new(values)
    }

    pub fn trivial(n: usize, k: usize) -> Self {
        ZeroModeCharacter { values: vec![HSeries::zero_with_cap(k); n] }
    }

    /// Random weights with `h`-degree at most 2.
    pub fn random<R: Rng>(r: &mut R, n: usize, k: usize) -> Self {
        let alpha: Vec<HSeries<Rational>> =
            (0..n).map(|_| HSeries::new(k, (0..3.min(k + 1)).map(|_| small_rational(r)).collect())).collect();
        Self::from_weights(&alpha).expect("pairings of a weight sum to zero")
    }

    pub fn values(&self) -> &[HSeries<Rational>] {
        &self.values
    }
}

/// `V_H(c, α)` for the level of the kernel.
#[derive(Debug, Clone)]
pub struct HeisModule {
    kernel: Arc<Kernel>,
    algebra: Arc<HeisAlgebra>,
    character: ZeroModeCharacter,
}

impl HeisModule {
    pub fn new(kernel: Arc<Kernel>, algebra: Arc<HeisAlgebra>, character: ZeroModeCharacter) -> Result<Self> {
        if kernel.n() != algebra.n() || character.values.len() != kernel.n() {
            return Err(Error::BadDimension(character.values.len()));
        }
        Ok(HeisModule { kernel, algebra, character })
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn algebra(&self) -> &HeisAlgebra {
        &self.algebra
    }

    pub fn character(&self) -> &ZeroModeCharacter {
        &self.character
    }

    fn check_state(&self, w: &State) -> Result<()> {
        if !w.is_diagonal() {
            return Err(Error::NonDiagonal(w.to_string()));
        }
        Ok(())
    }

    /// `y_i^(r) w`.
    pub fn act_mode(&self, i: u8, r: i32, w: &State) -> Result<State> {
        self.check_state(w)?;
        let n = self.kernel.n();
        if i == 0 || i as usize > n {
            return Err(Error::IndexOutOfRange(format!("mode index {i}")));
        }
        if r <= -1 {
            return Ok(normalize(n, &w.times_gen(Generator::new(i, i, (-r) as u32))));
        }
        if r == 0 {
            return Ok(w.scale(&self.character.values[i as usize - 1]));
        }
        // [v^(q-1)] of -c (u - v)^e is -c C(e, q-1) (-1)^(q-1) u^(e-q+1); keep u^(-r-1)
        let k = self.kernel.k();
        let mut out = State::zero();
        for (m, c) in w.terms() {
            for (t, g) in m.gens().iter().enumerate() {
                let q = g.depth as i32;
                let want_e = q - r - 2;
                let sign = if q % 2 == 1 { ri(1) } else { ri(-1) };
                let mut acc = HSeries::zero_with_cap(k);
                for term in self.kernel.s_terms(i, i, g.row, g.row)?.iter() {
                    if term.exp == want_e {
                        let x = -(term.coeff.clone() * binomial(term.exp as i64, (q - 1) as u32) * &sign);
                        acc = acc.add(&HSeries::monomial(k, term.h, x));
                    }
                }
                if !acc.is_zero() {
                    out.add_term(m.without(t), c.mul(&acc));
                }
            }
        }
        Ok(normalize(n, &out))
    }

    pub fn act_word(&self, modes: &[Mode], w: &State) -> Result<State> {
        let mut cur = w.clone();
        for m in modes.iter().rev() {
            cur = self.act_mode(m.index, m.level, &cur)?;
        }
        Ok(cur)
    }

    /// `Y_W(v, z) w` up to `z^z_cap` for a diagonal monomial `v`.
    pub fn y_w(&self, v: &Monomial, w: &State, z_cap: i32) -> Result<ZMap> {
        if !v.is_diagonal() {
            return Err(Error::NonDiagonal(v.to_string()));
        }
        self.check_state(w)?;
        y_map(&self.kernel, v, w, z_cap, Some(&self.character.values))
    }

    /// `[y_i^(r), y_j^(s)] w` against the central bracket at this level, for all
    /// `|r|, |s| <= bound`, plus `sum_i y_i^(r) w = 0`.
    pub fn relations_witness(&self, w: &State, bound: i32) -> Result<Option<String>> {
        let n = self.kernel.n() as u8;
        let c = self.kernel.level();
        let zero = State::zero();
        for r in -bound..=bound {
            let mut trace = State::zero();
            for i in 1..=n {
                trace.add_assign(&self.act_mode(i, r, w)?);
            }
            if normalize(n as usize, &trace) != zero {
                return Ok(Some(format!("sum_i y_i({r}) on {w}")));
            }
            for s in -bound..=bound {
                for i in 1..=n {
                    for j in 1..=n {
                        let lhs = self.act_mode(i, r, &self.act_mode(j, s, w)?)?.sub(&self.act_mode(
                            j,
                            s,
                            &self.act_mode(i, r, w)?,
                        )?);
                        let br = self.algebra.mode_bracket(i, r, j, s)?.map(|p| p.eval(c));
                        let rhs = normalize(n as usize, &w.scale(&br));
                        if normalize(n as usize, &lhs) != rhs {
                            return Ok(Some(format!("[y{i}({r}), y{j}({s})] on {w}")));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// The `h^0` part of `y_i^(r)`, `r >= 1`, is `r c sum_j <a_i, a_j> d/dx_jj^(-r)`.
    pub fn classical_annihilation_witness(&self, w: &State, bound: i32) -> Result<Option<String>> {
        let n = self.kernel.n();
        let c = self.kernel.level();
        let w0 = w.h_part(0);
        for i in 1..=n as u8 {
            for r in 1..=bound {
                let got = self.act_mode(i, r, &w0)?.h_part(0);
                let mut want = State::zero();
                for (m, x) in w0.terms() {
                    for (t, g) in m.gens().iter().enumerate() {
                        if g.depth as i32 == r {
                            let f = ri(r as i64) * c * weight_pairing(n, i, g.row);
                            want.add_term(m.without(t), x.scale_rational(&f));
                        }
                    }
                }
                if got != normalize(n, &want).h_part(0) {
                    return Ok(Some(format!("y{i}({r}) on {w} at h^0")));
                }
            }
        }
        Ok(None)
    }

    /// Reads the modes back from `Y_W(x_ii^(-1), z)`, together with the level
    /// and the character.
    pub fn roundtrip_witness(&self, w: &State, bound: i32) -> Result<Option<String>> {
        let n = self.kernel.n();
        for i in 1..=n as u8 {
            let y = self.y_w(&Monomial::new(vec![Generator::new(i, i, 1)]), w, bound - 1)?;
            for r in -bound..=bound {
                let got = y.get(&(-r - 1)).cloned().unwrap_or_default();
                if got != self.act_mode(i, r, w)? {
                    return Ok(Some(format!("z^{} of Y_W(x{i}{i}(-1), z) on {w}", -r - 1)));
                }
            }
            // zero mode on the vacuum
            let vac = self.y_w(&Monomial::new(vec![Generator::new(i, i, 1)]), &State::vacuum(), 0)?;
            let got = vac.get(&-1).cloned().unwrap_or_default();
            let want = State::vacuum().scale(&self.character.values[i as usize - 1]);
            if got != normalize(n, &want) {
                return Ok(Some(format!("zero mode y{i}(0) readback")));
            }
        }
        // level: [y_1(1), y_1(-1)] acts by c (1 - 1/N) at h^0
        let probe = State::vacuum();
        let a = self.act_mode(1, 1, &self.act_mode(1, -1, &probe)?)?;
        let b = self.act_mode(1, -1, &self.act_mode(1, 1, &probe)?)?;
        let lam = a.sub(&b).terms().get(&Monomial::one()).map(|s| s.coeff(0)).unwrap_or_else(|| ri(0));
        let level = lam / weight_pairing(n, 1, 1);
        if &level != self.kernel.level() {
            return Ok(Some(format!("level read back as {level}")));
        }
        Ok(None)
    }
}

/// Random diagonal state in normal form.
pub fn random_state<R: Rng>(r: &mut R, n: usize, max_weight: u32, max_terms: usize) -> State {
    sample::state(r, n, max_weight, max_terms, true)
}

/// Rank of a list of sparse rational vectors.
pub fn rank<K: Ord + Clone>(vectors: &[BTreeMap<K, Rational>]) -> usize {
    let mut rows: Vec<BTreeMap<K, Rational>> = vectors.iter().filter(|v| !v.is_empty()).cloned().collect();
    let mut rank = 0;
    while let Some(pivot_row) = rows.pop() {
        let Some((key, pv)) = pivot_row.iter().next().map(|(k, v)| (k.clone(), v.clone())) else { continue };
        rank += 1;
        for row in rows.iter_mut() {
            if let Some(x) = row.get(&key).cloned() {
                let f = x / &pv;
                for (k2, v2) in &pivot_row {
                    let e = row.entry(k2.clone()).or_insert_with(|| ri(0));
                    *e -= &f * v2;
                }
                row.retain(|_, v| *v != ri(0));
            }
        }
        rows.retain(|r| !r.is_empty());
    }
    rank
}

/// All ordered monomials of length `1..=max_len` in the modes `y_i^(r)`,
/// `i < N`, `0 < |r| <= max_level`.
pub fn normal_monomials(n: usize, max_len: usize, max_level: i32) -> Vec<Vec<Mode>> {
    let mut modes = Vec::new();
    for r in -max_level..=max_level {
        if r == 0 {
            continue;
        }
        for i in 1..n as u8 {
            modes.push(Mode::new(i, r));
        }
    }
    let mut out: Vec<Vec<Mode>> = vec![Vec::new()];
    let mut frontier: Vec<(Vec<Mode>, usize)> = vec![(Vec::new(), 0)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (w, start) in &frontier {
            for (idx, m) in modes.iter().enumerate().skip(*start) {
                let mut w2 = w.clone();
                w2.push(*m);
                out.push(w2.clone());
                next.push((w2, idx));
            }
        }
        frontier = next;
    }
    out
}

/// Every sub-monomial of `m`, including `1` and `m` itself.
fn divisors(m: &Monomial) -> Vec<Monomial> {
    let mut out: Vec<Vec<Generator>> = vec![Vec::new()];
    let gens = m.gens();
    let mut i = 0;
    while i < gens.len() {
        let mut j = i;
        while j < gens.len() && gens[j] == gens[i] {
            j += 1;
        }
        let mut next = Vec::new();
        for d in &out {
            for e in 0..=(j - i) {
                let mut d2 = d.clone();
                d2.extend(std::iter::repeat_n(gens[i], e));
                next.push(d2);
            }
        }
        out = next;
        i = j;
    }
    out.into_iter().map(Monomial::new).collect()
}

/// Distinct ordered monomials act as independent operators at `h^0`. The
/// image of each monomial is collected on every divisor of a state rich
/// enough to absorb all annihilators; one probe vector alone is not enough,
/// since e.g. `y(-1) y(1)` acts on a monomial by a scalar.
pub fn verify_linear_independence(module: &HeisModule, max_len: usize, max_level: i32) -> Result<AxiomReport> {
    let n = module.kernel().n();
    let mut gens = Vec::new();
    for i in 1..n as u8 {
        for q in 1..=max_level as u32 {
            for _ in 0..max_len {
                gens.push(Generator::new(i, i, q));
            }
        }
    }
    let probes = divisors(&Monomial::new(gens));
    let words = normal_monomials(n, max_len, max_level);
    let mut vecs = Vec::with_capacity(words.len());
    for w in &words {
        let mut v = BTreeMap::new();
        for (pi, p) in probes.iter().enumerate() {
            let img = module.act_word(w, &State::from_gens(p.gens().to_vec()))?.h_part(0);
            for (m, c) in img.terms() {
                v.insert((pi, m.clone()), c.coeff(0));
            }
        }
        vecs.push(v);
    }
    let rk = rank(&vecs);
    let rep = if rk == words.len() {
        AxiomReport::pass("linear_independence", words.len())
    } else {
        AxiomReport::fail("linear_independence", words.len(), format!("rank {rk} for {} monomials", words.len()))
    };
    Ok(rep.param("N", n).param("c", module.kernel().level()).param("max_len", max_len).param("max_level", max_level))
}
