//! The braiding map `𝒮(z)` on pairs of monomials and the checks of its axioms.
//!
//! A pair `m1 ⊗ m2` is read as the coefficient of `x⁺_[n](u) ⊗ x⁺_[m](v)`.
//! Each bipartite matching contracts a generator of `m1` with one of `m2`
//! through the coefficient of `u^(r-1) v^(s-1)` in `t(z + u - v)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use crate::error::Result;
use crate::fock::{d_apply, enumerate_bipartite, Monomial, State};
use crate::hseries::{HSeries, EXACT};
use crate::kernel::{term_series, Kernel};
use crate::laurent::{substitute_shift, Caps, Laurent, Region};
use crate::report::AxiomReport;
use crate::rmatrix::Z;
use crate::scalar::{ri, Rational};

/// Laurent coefficient in the spectral variables with `h`-series coefficients.
pub type ZCoeff = Laurent<HSeries<Rational>>;
/// Element of a tensor power of the state space: legs to coefficient.
pub type Tensor = BTreeMap<Vec<Monomial>, ZCoeff>;
/// `𝒮(z)(m1 ⊗ m2)` as a list of output pairs with coefficients in `z`.
pub type BraidResult = Vec<((Monomial, Monomial), ZCoeff)>;

fn one() -> ZCoeff {
    Laurent::constant(HSeries::one_with_cap(EXACT))
}

pub fn tensor_add(t: &mut Tensor, legs: Vec<Monomial>, c: ZCoeff) {
    match t.get_mut(&legs) {
        Some(x) => *x = x.add(&c),
        None => {
            t.insert(legs, c);
        }
    }
}

/// Tensor product of states.
pub fn tensor_of(states: &[&State]) -> Tensor {
    let mut out: Tensor = BTreeMap::new();
    out.insert(Vec::new(), one());
    for s in states {
        let mut next = BTreeMap::new();
        for (legs, c) in &out {
            for (m, x) in s.terms() {
                let mut l = legs.clone();
                l.push(m.clone());
                tensor_add(&mut next, l, c.scale(x));
            }
        }
        out = next;
    }
    out
}

/// Braiding with a cache of monomial pairs.
#[derive(Debug)]
pub struct Braider<'a> {
    kernel: &'a Kernel,
    cache: RwLock<HashMap<(Monomial, Monomial), Arc<BraidResult>>>,
}

impl<'a> Braider<'a> {
    pub fn new(kernel: &'a Kernel) -> Self {
        Braider { kernel, cache: RwLock::default() }
    }

    pub fn kernel(&self) -> &Kernel {
        self.kernel
    }

    /// `𝒮(z)(m1 ⊗ m2)` in the variable `z`.
    pub fn braid(&self, m1: &Monomial, m2: &Monomial) -> Result<Arc<BraidResult>> {
        let key = (m1.clone(), m2.clone());
        if let Some(v) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let v = Arc::new(self.compute(m1, m2)?);
        self.cache.write().expect("cache lock").insert(key, v.clone());
        Ok(v)
    }

    fn compute(&self, m1: &Monomial, m2: &Monomial) -> Result<BraidResult> {
        let k = self.kernel.k();
        let (g1, g2) = (m1.gens(), m2.gens());
        let n = g1.len();
        let mut acc: BTreeMap<(Monomial, Monomial), ZCoeff> = BTreeMap::new();
        for kk in 0..=n.min(g2.len()) {
            for mt in enumerate_bipartite(n, g2.len(), kk)? {
                let mut coeff = one();
                for &(p, q) in &mt.pairs {
                    let a = g1[p - 1];
                    let b = g2[q - n - 1];
                    let mut factor = BTreeMap::new();
                    for t in self.kernel.braid_terms(a.row, a.col, b.row, b.col, a.depth, b.depth)?.iter() {
                        let x: &mut HSeries<Rational> =
                            factor.entry(vec![t.exp]).or_insert_with(|| HSeries::zero_with_cap(k));
                        *x = x.add(&term_series(t, k));
                    }
                    coeff = coeff.mul(&Laurent::from_terms(&[Z], vec![None], factor));
                    if coeff.is_empty() {
                        break;
                    }
                }
                if coeff.is_empty() {
                    continue;
                }
                let keep1: Vec<_> = (1..=n).filter(|i| mt.complement.contains(i)).map(|i| g1[i - 1]).collect();
                let keep2: Vec<_> =
                    (1..=g2.len()).filter(|i| mt.complement.contains(&(n + i))).map(|i| g2[i - 1]).collect();
                let key = (Monomial::new(keep1), Monomial::new(keep2));
                match acc.get_mut(&key) {
                    Some(x) => *x = x.add(&coeff),
                    None => {
                        acc.insert(key, coeff);
                    }
                }
            }
        }
        Ok(acc.into_iter().filter(|(_, c)| !c.is_empty()).collect())
    }

    /// Applies `𝒮_ij` with `z` replaced by `form` (expanded in `region`).
    pub fn apply(
        &self,
        t: &Tensor,
        i: usize,
        j: usize,
        form: &[(&str, Rational)],
        region: &Region,
        caps: &Caps,
    ) -> Result<Tensor> {
        let mut subst: HashMap<(Monomial, Monomial), BraidResult> = HashMap::new();
        let mut out: Tensor = BTreeMap::new();
        for (legs, c) in t {
            let key = (legs[i].clone(), legs[j].clone());
            if !subst.contains_key(&key) {
                let mut v = Vec::new();
                for (pair, coeff) in self.braid(&key.0, &key.1)?.iter() {
                    let sub = if coeff.vars().iter().any(|x| x == Z) {
                        substitute_shift(coeff, Z, form, region, caps)?
                    } else {
                        coeff.clone()
                    };
                    v.push((pair.clone(), sub));
                }
                subst.insert(key.clone(), v);
            }
            for ((a, b), coeff) in &subst[&key] {
                let mut l = legs.clone();
                l[i] = a.clone();
                l[j] = b.clone();
                tensor_add(&mut out, l, c.mul(coeff));
            }
        }
        Ok(out)
    }
}

/// First leg tuple where the two tensors disagree inside the common caps.
pub fn tensor_difference(a: &Tensor, b: &Tensor) -> Option<String> {
    let zero: ZCoeff = Laurent::zero_in(&[]);
    for key in a.keys().chain(b.keys()) {
        let x = a.get(key).unwrap_or(&zero);
        let y = b.get(key).unwrap_or(&zero);
        if let Some((vars, exps)) = x.first_difference(y) {
            let legs: Vec<String> = key.iter().map(|m| m.to_string()).collect();
            return Some(format!("legs ({}) at {:?}^{:?}", legs.join(" | "), vars, exps));
        }
    }
    None
}

fn rename(var: &str) -> ([(&str, Rational); 1], Region) {
    ([(var, ri(1))], Region::new(var, &[]).expect("valid region"))
}

/// `𝒮12(z1) 𝒮13(z1+z2) 𝒮23(z2) = 𝒮23(z2) 𝒮13(z1+z2) 𝒮12(z1)` on one triple,
/// with `z1` dominant in `z1 + z2` and `z2` kept up to `z_cap`.
pub fn yang_baxter_witness(br: &Braider, triple: [&Monomial; 3], z_cap: i32) -> Result<Option<String>> {
    let mut start: Tensor = BTreeMap::new();
    start.insert(triple.iter().map(|m| (*m).clone()).collect(), one());
    let (f1, r1) = rename("z1");
    let (f2, r2) = rename("z2");
    let f13 = [("z1", ri(1)), ("z2", ri(1))];
    let r13 = Region::new("z1", &["z2"])?;
    let caps = Caps::default().with("z2", z_cap);
    let none = Caps::default();
    let lhs = br.apply(&start, 1, 2, &f2, &r2, &none)?;
    let lhs = br.apply(&lhs, 0, 2, &f13, &r13, &caps)?;
    let lhs = br.apply(&lhs, 0, 1, &f1, &r1, &none)?;
    let rhs = br.apply(&start, 0, 1, &f1, &r1, &none)?;
    let rhs = br.apply(&rhs, 0, 2, &f13, &r13, &caps)?;
    let rhs = br.apply(&rhs, 1, 2, &f2, &r2, &none)?;
    Ok(tensor_difference(&lhs, &rhs))
}

/// `𝒮21(-z) 𝒮(z) = 1` on one pair, where `𝒮21(z)(a ⊗ b) = flip 𝒮(z)(b ⊗ a)`.
pub fn unitarity_witness(br: &Braider, pair: [&Monomial; 2]) -> Result<Option<String>> {
    let mut start: Tensor = BTreeMap::new();
    start.insert(vec![pair[0].clone(), pair[1].clone()], one());
    let (fz, rz) = rename(Z);
    let first = br.apply(&start, 0, 1, &fz, &rz, &Caps::default())?;
    // flip, braid at -z, flip back
    let flipped: Tensor = first.into_iter().map(|(l, c)| (vec![l[1].clone(), l[0].clone()], c)).collect();
    let neg = [(Z, ri(-1))];
    let second = br.apply(&flipped, 0, 1, &neg, &rz, &Caps::default())?;
    let back: Tensor = second.into_iter().map(|(l, c)| (vec![l[1].clone(), l[0].clone()], c)).collect();
    Ok(tensor_difference(&back, &start))
}

/// `(D ⊗ 1) 𝒮(z) x - 𝒮(z) (D ⊗ 1) x = -d/dz 𝒮(z) x` on one pair.
pub fn shift_witness(br: &Braider, pair: [&Monomial; 2]) -> Result<Option<String>> {
    let (fz, rz) = rename(Z);
    let none = Caps::default();
    let x = tensor_of(&[&State::from_gens(pair[0].gens().to_vec()), &State::from_gens(pair[1].gens().to_vec())]);
    let sx = br.apply(&x, 0, 1, &fz, &rz, &none)?;
    let d_left = |t: &Tensor| -> Tensor {
        let mut out = BTreeMap::new();
        for (legs, c) in t {
            let ds = d_apply(&State::from_gens(legs[0].gens().to_vec()));
            for (m, q) in ds.terms() {
                tensor_add(&mut out, vec![m.clone(), legs[1].clone()], c.scale(q));
            }
        }
        out
    };
    let lhs_a = d_left(&sx);
    let lhs_b = br.apply(&d_left(&x), 0, 1, &fz, &rz, &none)?;
    let mut lhs = lhs_a;
    for (legs, c) in lhs_b {
        tensor_add(&mut lhs, legs, c.neg());
    }
    let rhs: Tensor = sx.into_iter().map(|(l, c)| (l, c.derivative(Z).neg())).collect();
    Ok(tensor_difference(&lhs, &rhs))
}

/// `𝒮(z)` equals the identity modulo `h`.
pub fn identity_mod_h_witness(br: &Braider, pair: [&Monomial; 2]) -> Result<Option<String>> {
    let res = br.braid(pair[0], pair[1])?;
    let mut t: Tensor = BTreeMap::new();
    for ((a, b), c) in res.iter() {
        t.insert(vec![a.clone(), b.clone()], c.map_coeffs(|s| s.truncate(0)));
    }
    let mut want: Tensor = BTreeMap::new();
    want.insert(vec![pair[0].clone(), pair[1].clone()], Laurent::constant(HSeries::one_with_cap(0)));
    Ok(tensor_difference(&t, &want))
}

fn run<F>(axiom: &str, kernel: &Kernel, cases: usize, f: F) -> Result<AxiomReport>
where
    F: Fn(usize) -> Result<Option<String>>,
{
    for i in 0..cases {
        if let Some(w) = f(i)? {
            return Ok(AxiomReport::fail(axiom, i + 1, w)
                .param("N", kernel.n())
                .param("c", kernel.level())
                .param("K", kernel.k()));
        }
    }
    Ok(AxiomReport::pass(axiom, cases).param("N", kernel.n()).param("c", kernel.level()).param("K", kernel.k()))
}

pub fn verify_yang_baxter(br: &Braider, triples: &[[Monomial; 3]], z_cap: i32) -> Result<AxiomReport> {
    let t = |i: usize| {
        let [a, b, c] = &triples[i];
        yang_baxter_witness(br, [a, b, c], z_cap)
    };
    Ok(run("yang_baxter", br.kernel, triples.len(), t)?.param("z_cap", z_cap))
}

pub fn verify_unitarity(br: &Braider, pairs: &[[Monomial; 2]]) -> Result<AxiomReport> {
    run("unitarity", br.kernel, pairs.len(), |i| unitarity_witness(br, [&pairs[i][0], &pairs[i][1]]))
}

pub fn verify_shift(br: &Braider, pairs: &[[Monomial; 2]]) -> Result<AxiomReport> {
    run("shift", br.kernel, pairs.len(), |i| shift_witness(br, [&pairs[i][0], &pairs[i][1]]))
}
