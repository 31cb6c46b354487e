//! Coefficient rings: exact rationals and polynomials in the central parameter `C`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// A commutative ring with unit used as a payload for series and operators.
///
/// Values are immutable; all operations return fresh values.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn from_rational(q: &Rational) -> Self;
    /// Inverse if `self` is a unit of the ring.
    fn unit_inverse(&self) -> Option<Self>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    fn scale(&self, q: &Rational) -> Self {
        self.mul_ref(&Self::from_rational(q))
    }
}

impl Coeff for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn unit_inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// `n/d` as a rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a rational.
pub fn ri(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
    }
}

/// Generalized binomial coefficient `C(r, k)` for any integer `r` and `k >= 0`.
pub fn binomial(r: i64, k: u32) -> Rational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k as i64 {
        num *= BigInt::from(r - i);
        den *= BigInt::from(i + 1);
    }
    let g = num.gcd(&den);
    Rational::new(num / &g, den / g)
}

/// Polynomial in the central parameter `C` with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CPoly {
    coeffs: BTreeMap<u32, Rational>,
}

impl CPoly {
    pub fn constant(q: Rational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !Zero::is_zero(&q) {
            coeffs.insert(0, q);
        }
        CPoly { coeffs }
    }

    /// The monomial `q * C^e`.
    pub fn monomial(q: Rational, e: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        if !Zero::is_zero(&q) {
            coeffs.insert(e, q);
        }
        CPoly { coeffs }
    }

    /// The polynomial `C`.
    pub fn c() -> Self {
        Self::monomial(ri(1), 1)
    }

    pub fn from_coeffs<I: IntoIterator<Item = (u32, Rational)>>(it: I) -> Self {
        let mut p = CPoly::default();
        for (e, q) in it {
            p.add_term(e, &q);
        }
        p
    }

    pub fn coeff(&self, e: u32) -> Rational {
        self.coeffs.get(&e).cloned().unwrap_or_else(Zero::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.coeffs.iter().map(|(e, q)| (*e, q))
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    fn add_term(&mut self, e: u32, q: &Rational) {
        if Zero::is_zero(q) {
            return;
        }
        let entry = self.coeffs.entry(e).or_insert_with(Zero::zero);
        *entry += q;
        if Zero::is_zero(entry) {
            self.coeffs.remove(&e);
        }
    }

    /// Evaluates at `C = c`.
    pub fn eval(&self, c: &Rational) -> Rational {
        let mut acc: Rational = Zero::zero();
        let mut last = self.degree().unwrap_or(0);
        // Horner from the top degree down.
        for (&e, q) in self.coeffs.iter().rev() {
            for _ in e..last {
                acc *= c;
            }
            acc += q;
            last = e;
        }
        for _ in 0..last {
            acc *= c;
        }
        acc
    }
}

impl Coeff for CPoly {
    fn zero() -> Self {
        CPoly::default()
    }
    fn one() -> Self {
        CPoly::constant(ri(1))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, q) in &other.coeffs {
            out.add_term(*e, q);
        }
        out
    }
    fn sub_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, q) in &other.coeffs {
            out.add_term(*e, &-q);
        }
        out
    }
    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = CPoly::default();
        for (e1, q1) in &self.coeffs {
            for (e2, q2) in &other.coeffs {
                out.add_term(e1 + e2, &(q1 * q2));
            }
        }
        out
    }
    fn neg_ref(&self) -> Self {
        CPoly { coeffs: self.coeffs.iter().map(|(e, q)| (*e, -q)).collect() }
    }
    fn from_rational(q: &Rational) -> Self {
        CPoly::constant(q.clone())
    }
    fn unit_inverse(&self) -> Option<Self> {
        match self.degree() {
            Some(0) => Some(CPoly::constant(self.coeff(0).recip())),
            _ => None,
        }
    }
}

impl fmt::Debug for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Writes a rational with a symbolic factor, e.g. `C/2`, `-3C^2/4`, `5/2`.
pub(crate) fn fmt_scaled(q: &Rational, sym: &str, out: &mut String) {
    let num = q.numer();
    let den = q.denom();
    if sym.is_empty() {
        out.push_str(&num.to_string());
    } else if num.is_one() {
        out.push_str(sym);
    } else if (-num).is_one() {
        out.push('-');
        out.push_str(sym);
    } else {
        out.push_str(&num.to_string());
        out.push_str(sym);
    }
    if !den.is_one() {
        out.push('/');
        out.push_str(&den.to_string());
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut s = String::new();
        for (idx, (&e, q)) in self.coeffs.iter().rev().enumerate() {
            let sym = match e {
                0 => String::new(),
                1 => "C".to_string(),
                _ => format!("C^{e}"),
            };
            if idx > 0 {
                s.push_str(if q.is_negative() { " - " } else { " + " });
                fmt_scaled(&q.abs(), &sym, &mut s);
            } else {
                fmt_scaled(q, &sym, &mut s);
            }
        }
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), ri(10));
        assert_eq!(binomial(-1, 3), ri(-1));
        assert_eq!(binomial(-2, 2), ri(3));
        assert_eq!(binomial(3, 5), ri(0));
        assert_eq!(binomial(7, 0), ri(1));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-2").unwrap(), ri(-2));
        assert_eq!(parse_rational("4/-6").unwrap(), rat(-2, 3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn cpoly_display_and_eval() {
        let p = CPoly::from_coeffs([(1, rat(1, 2))]);
        assert_eq!(p.to_string(), "C/2");
        let q = CPoly::from_coeffs([(2, rat(-1, 2)), (1, ri(-1))]);
        assert_eq!(q.to_string(), "-C^2/2 - C");
        assert_eq!(q.eval(&ri(2)), ri(-4));
        assert_eq!(CPoly::from_coeffs([(0, ri(3)), (3, ri(1))]).eval(&ri(2)), ri(11));
        assert_eq!(CPoly::zero().to_string(), "0");
    }

    #[test]
    fn cpoly_units() {
        assert!(CPoly::c().unit_inverse().is_none());
        assert_eq!(CPoly::constant(ri(4)).unit_inverse(), Some(CPoly::constant(rat(1, 4))));
    }
}
