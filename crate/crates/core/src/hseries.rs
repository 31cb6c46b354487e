//! Truncated power series in the deformation parameter `h`.
//!
//! An `HSeries` with cap `K` stores the coefficients of `h^0 .. h^K` and
//! represents its value modulo `h^(K+1)`. Combining two series keeps the
//! smaller cap. The cap [`EXACT`] marks a polynomial in `h` known exactly.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Coeff, Rational};

/// Cap used for exactly known (finite) series.
pub const EXACT: usize = usize::MAX;

#[derive(Clone)]
pub struct HSeries<T> {
    cap: usize,
    // trailing zeros trimmed; len <= cap + 1
    coeffs: Vec<T>,
}

impl<T: Coeff> HSeries<T> {
    pub fn new(cap: usize, mut coeffs: Vec<T>) -> Self {
        if cap != EXACT && coeffs.len() > cap + 1 {
            coeffs.truncate(cap + 1);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        HSeries { cap, coeffs }
    }

    pub fn zero_with_cap(cap: usize) -> Self {
        HSeries { cap, coeffs: Vec::new() }
    }

    pub fn constant(cap: usize, t: T) -> Self {
        Self::new(cap, vec![t])
    }

    pub fn one_with_cap(cap: usize) -> Self {
        Self::constant(cap, T::one())
    }

    /// `t * h^k` with the given cap.
    pub fn monomial(cap: usize, k: usize, t: T) -> Self {
        if cap != EXACT && k > cap {
            return Self::zero_with_cap(cap);
        }
        let mut coeffs = vec![T::zero(); k];
        coeffs.push(t);
        Self::new(cap, coeffs)
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Coefficient of `h^k` (zero past the stored terms).
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn get(&self, k: usize) -> Option<&T> {
        self.coeffs.get(k).filter(|c| !c.is_zero())
    }

    /// Nonzero coefficients with their `h` exponents.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &T)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lowest `h` exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, cap: usize) -> Self {
        Self::new(cap.min(self.cap), self.coeffs.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        let cap = self.cap.min(other.cap);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(match (self.coeffs.get(k), other.coeffs.get(k)) {
                (Some(a), Some(b)) => a.add_ref(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => T::zero(),
            });
        }
        Self::new(cap, out)
    }

    pub fn neg(&self) -> Self {
        HSeries { cap: self.cap, coeffs: self.coeffs.iter().map(|c| c.neg_ref()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let cap = self.cap.min(other.cap);
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero_with_cap(cap);
        }
        let mut len = self.coeffs.len() + other.coeffs.len() - 1;
        if cap != EXACT {
            len = len.min(cap + 1);
        }
        let mut out = vec![T::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
                }
            }
        }
        Self::new(cap, out)
    }

    /// Multiplies every coefficient by the scalar `t`.
    pub fn scale(&self, t: &T) -> Self {
        Self::new(self.cap, self.coeffs.iter().map(|c| c.mul_ref(t)).collect())
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        self.scale(&T::from_rational(q))
    }

    /// Inverse modulo `h^(cap+1)`; the `h^0` coefficient must be a unit.
    pub fn invert(&self) -> Result<Self> {
        let a0 = self.coeffs.first().ok_or(Error::NotInvertible)?;
        let inv0 = a0.unit_inverse().ok_or(Error::NotInvertible)?;
        if self.cap == EXACT {
            if self.coeffs.len() == 1 {
                return Ok(Self::constant(EXACT, inv0));
            }
            return Err(Error::NotInvertible);
        }
        let mut out: Vec<T> = Vec::with_capacity(self.cap + 1);
        out.push(inv0.clone());
        for k in 1..=self.cap {
            let mut acc = T::zero();
            for j in 1..=k {
                if let Some(a) = self.coeffs.get(j) {
                    if !a.is_zero() {
                        acc = acc.add_ref(&a.mul_ref(&out[k - j]));
                    }
                }
            }
            out.push(acc.mul_ref(&inv0).neg_ref());
        }
        Ok(Self::new(self.cap, out))
    }

    /// Divides by `h^s`; the dropped low coefficients must vanish.
    pub fn shift_down(&self, s: usize) -> Result<Self> {
        for k in 0..s.min(self.coeffs.len()) {
            if !self.coeffs[k].is_zero() {
                return Err(Error::NonVanishingLowOrder(k));
            }
        }
        let cap = if self.cap == EXACT { EXACT } else { self.cap.saturating_sub(s) };
        Ok(Self::new(cap, self.coeffs.iter().skip(s).cloned().collect()))
    }

    /// Multiplies by `h^s`.
    pub fn shift_up(&self, s: usize) -> Self {
        let cap = if self.cap == EXACT { EXACT } else { self.cap + s };
        let mut coeffs = vec![T::zero(); s];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(cap, coeffs)
    }

    pub fn map<U: Coeff, F: Fn(&T) -> U>(&self, f: F) -> HSeries<U> {
        HSeries::new(self.cap, self.coeffs.iter().map(f).collect())
    }

    /// True when the coefficients of `h^0 .. h^(order-1)` agree.
    pub fn eq_mod(&self, other: &Self, order: usize) -> bool {
        (0..order).all(|k| self.coeff(k) == other.coeff(k))
    }

    /// True when the series vanishes modulo `h^p`.
    pub fn divisible_by_h_power(&self, p: usize) -> bool {
        self.coeffs.iter().take(p).all(|c| c.is_zero())
    }
}

/// Two series are equal when they agree up to the smaller cap.
impl<T: Coeff> PartialEq for HSeries<T> {
    fn eq(&self, other: &Self) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        let cap = self.cap.min(other.cap);
        (0..n).take_while(|&k| cap == EXACT || k <= cap).all(|k| match (self.coeffs.get(k), other.coeffs.get(k)) {
            (Some(a), Some(b)) => a == b,
            (Some(a), None) | (None, Some(a)) => a.is_zero(),
            (None, None) => true,
        })
    }
}

impl<T: Coeff> Coeff for HSeries<T> {
    fn zero() -> Self {
        Self::zero_with_cap(EXACT)
    }
    fn one() -> Self {
        Self::one_with_cap(EXACT)
    }
    fn is_zero(&self) -> bool {
        HSeries::is_zero(self)
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
        Self::constant(EXACT, T::from_rational(q))
    }
    fn unit_inverse(&self) -> Option<Self> {
        self.invert().ok()
    }
}

impl<T: Coeff + fmt::Display> fmt::Display for HSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})h")?,
                _ => write!(f, "({c})h^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if self.cap != EXACT {
            match self.cap + 1 {
                1 => write!(f, " + O(h)")?,
                n => write!(f, " + O(h^{n})")?,
            }
        }
        Ok(())
    }
}

impl<T: Coeff> fmt::Debug for HSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HSeries").field("cap", &self.cap).field("coeffs", &self.coeffs).finish()
    }
}
