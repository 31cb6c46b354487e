//! Sparse operators on `(C^N)^{⊗n}` with ring-valued entries.
//!
//! Entries are keyed by (row multi-index, column multi-index), 1-based, so
//! `e_ij ⊗ e_kl` sits at row `(i,k)` and column `(j,l)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::{Coeff, Rational};

pub type MultiIndex = Vec<u8>;

#[derive(Clone, PartialEq, Debug)]
pub struct TensorOp<E> {
    dim: usize,
    arity: usize,
    entries: BTreeMap<(MultiIndex, MultiIndex), E>,
}

/// All multi-indices in `{1..dim}^len`, lexicographic.
pub fn all_indices(dim: usize, len: usize) -> Vec<MultiIndex> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * dim);
        for v in &out {
            for i in 1..=dim as u8 {
                let mut w = v.clone();
                w.push(i);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

impl<E: Coeff> TensorOp<E> {
    pub fn zero(dim: usize, arity: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::BadDimension(dim));
        }
        Ok(TensorOp { dim, arity, entries: BTreeMap::new() })
    }

    pub fn identity_with(dim: usize, arity: usize, one: E) -> Result<Self> {
        let mut op = Self::zero(dim, arity)?;
        for v in all_indices(dim, arity) {
            op.entries.insert((v.clone(), v), one.clone());
        }
        Ok(op)
    }

    /// `P = sum_ij e_ij ⊗ e_ji` scaled by `one`.
    pub fn perm_with(dim: usize, one: E) -> Result<Self> {
        let mut op = Self::zero(dim, 2)?;
        for i in 1..=dim as u8 {
            for j in 1..=dim as u8 {
                op.entries.insert((vec![i, j], vec![j, i]), one.clone());
            }
        }
        Ok(op)
    }

    /// Single matrix unit `e_ij` on one leg.
    pub fn unit(dim: usize, i: u8, j: u8, value: E) -> Result<Self> {
        let mut op = Self::zero(dim, 1)?;
        op.set(vec![i], vec![j], value)?;
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn entries(&self) -> &BTreeMap<(MultiIndex, MultiIndex), E> {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    fn check_index(&self, v: &[u8]) -> Result<()> {
        if v.len() != self.arity || v.iter().any(|&i| i == 0 || i as usize > self.dim) {
            return Err(Error::IndexOutOfRange(format!("{v:?} for N={} arity={}", self.dim, self.arity)));
        }
        Ok(())
    }

    pub fn set(&mut self, row: MultiIndex, col: MultiIndex, value: E) -> Result<()> {
        self.check_index(&row)?;
        self.check_index(&col)?;
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
        Ok(())
    }

    fn accumulate(&mut self, row: MultiIndex, col: MultiIndex, value: E) {
        if value.is_zero() {
            return;
        }
        let key = (row, col);
        let sum = match self.entries.get(&key) {
            Some(x) => x.add_ref(&value),
            None => value,
        };
        if sum.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, sum);
        }
    }

    pub fn entry(&self, row: &[u8], col: &[u8]) -> Result<E> {
        self.check_index(row)?;
        self.check_index(col)?;
        Ok(self.entries.get(&(row.to_vec(), col.to_vec())).cloned().unwrap_or_else(E::zero))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.arity != other.arity {
            return Err(Error::BadLegs(format!(
                "shape N={} n={} vs N={} n={}",
                self.dim, self.arity, other.dim, other.arity
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for ((r, c), v) in &other.entries {
            out.accumulate(r.clone(), c.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.map(|e| e.neg_ref())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &E) -> Self {
        self.map(|e| e.mul_ref(s))
    }

    pub fn map<F: Fn(&E) -> E>(&self, f: F) -> Self {
        self.map_into(f)
    }

    pub fn map_into<U: Coeff, F: Fn(&E) -> U>(&self, f: F) -> TensorOp<U> {
        let mut out = TensorOp { dim: self.dim, arity: self.arity, entries: BTreeMap::new() };
        for ((r, c), v) in &self.entries {
            let w = f(v);
            if !w.is_zero() {
                out.entries.insert((r.clone(), c.clone()), w);
            }
        }
        out
    }

    /// Operator product `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut by_row: BTreeMap<&MultiIndex, Vec<(&MultiIndex, &E)>> = BTreeMap::new();
        for ((r, c), v) in &other.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut out = TensorOp { dim: self.dim, arity: self.arity, entries: BTreeMap::new() };
        for ((r, m), a) in &self.entries {
            if let Some(row) = by_row.get(m) {
                for (c, b) in row {
                    out.accumulate(r.clone(), (*c).clone(), a.mul_ref(b));
                }
            }
        }
        Ok(out)
    }

    /// Places `self` on the given (1-based) legs of an arity-`n` operator,
    /// identity on the remaining legs.
    pub fn embed_legs(&self, legs: &[usize], n: usize) -> Result<Self> {
        if legs.len() != self.arity {
            return Err(Error::BadLegs(format!("{} legs for arity {}", legs.len(), self.arity)));
        }
        for (i, &l) in legs.iter().enumerate() {
            if l == 0 || l > n || legs[..i].contains(&l) {
                return Err(Error::BadLegs(format!("{legs:?} in arity {n}")));
            }
        }
        let others: Vec<usize> = (1..=n).filter(|l| !legs.contains(l)).collect();
        let fillers = all_indices(self.dim, others.len());
        let mut out = TensorOp { dim: self.dim, arity: n, entries: BTreeMap::new() };
        for ((r, c), v) in &self.entries {
            for f in &fillers {
                let mut row = vec![0u8; n];
                let mut col = vec![0u8; n];
                for (k, &l) in legs.iter().enumerate() {
                    row[l - 1] = r[k];
                    col[l - 1] = c[k];
                }
                for (k, &l) in others.iter().enumerate() {
                    row[l - 1] = f[k];
                    col[l - 1] = f[k];
                }
                out.entries.insert((row, col), v.clone());
            }
        }
        Ok(out)
    }

    /// Trace over the given (1-based) leg.
    pub fn partial_trace(&self, leg: usize) -> Result<Self> {
        if leg == 0 || leg > self.arity {
            return Err(Error::BadLegs(format!("leg {leg} of arity {}", self.arity)));
        }
        let mut out = TensorOp { dim: self.dim, arity: self.arity - 1, entries: BTreeMap::new() };
        for ((r, c), v) in &self.entries {
            if r[leg - 1] == c[leg - 1] {
                let mut r2 = r.clone();
                let mut c2 = c.clone();
                r2.remove(leg - 1);
                c2.remove(leg - 1);
                out.accumulate(r2, c2, v.clone());
            }
        }
        Ok(out)
    }

    /// Keeps only the entries whose row and column multi-indices coincide.
    pub fn diag_part(&self) -> Self {
        let mut out = TensorOp { dim: self.dim, arity: self.arity, entries: BTreeMap::new() };
        for ((r, c), v) in &self.entries {
            if r == c {
                out.entries.insert((r.clone(), c.clone()), v.clone());
            }
        }
        out
    }

    /// Conjugation by the leg permutation swapping legs `a` and `b`.
    pub fn swap_legs(&self, a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 || a > self.arity || b > self.arity {
            return Err(Error::BadLegs(format!("swap {a},{b} in arity {}", self.arity)));
        }
        let mut out = TensorOp { dim: self.dim, arity: self.arity, entries: BTreeMap::new() };
        for ((r, c), v) in &self.entries {
            let mut r2 = r.clone();
            let mut c2 = c.clone();
            r2.swap(a - 1, b - 1);
            c2.swap(a - 1, b - 1);
            out.entries.insert((r2, c2), v.clone());
        }
        Ok(out)
    }

    /// Tensor product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::BadLegs("dimension mismatch".into()));
        }
        let mut out = TensorOp { dim: self.dim, arity: self.arity + other.arity, entries: BTreeMap::new() };
        for ((r1, c1), a) in &self.entries {
            for ((r2, c2), b) in &other.entries {
                let mut r = r1.clone();
                r.extend(r2);
                let mut c = c1.clone();
                c.extend(c2);
                out.accumulate(r, c, a.mul_ref(b));
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Identity on `(C^N)^{⊗n}` with rational entries.
pub fn identity(dim: usize, arity: usize) -> Result<TensorOp<Rational>> {
    TensorOp::identity_with(dim, arity, crate::scalar::ri(1))
}

/// The flip `P` on `C^N ⊗ C^N` with rational entries.
pub fn perm_p(dim: usize) -> Result<TensorOp<Rational>> {
    TensorOp::perm_with(dim, crate::scalar::ri(1))
}
