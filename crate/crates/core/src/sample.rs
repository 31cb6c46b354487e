//! Seeded samplers for monomials, states and words.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::fock::{normalize, Generator, Monomial, State};
use crate::hseries::{HSeries, EXACT};
use crate::scalar::{rat, Rational};

pub use rand::SeedableRng;
pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A generator of the given depth, never `x_NN`.
pub fn generator<R: Rng>(rng: &mut R, n: usize, depth: u32, diagonal: bool) -> Generator {
    let n = n as u8;
    loop {
        let (a, b) = if diagonal {
            let i = rng.gen_range(1..n);
            (i, i)
        } else {
            (rng.gen_range(1..=n), rng.gen_range(1..=n))
        };
        if !(a == n && b == n) {
            return Generator::new(a, b, depth);
        }
    }
}

/// Random split of `weight` into positive parts.
pub fn composition<R: Rng>(rng: &mut R, weight: u32) -> Vec<u32> {
    let mut parts = Vec::new();
    let mut left = weight;
    while left > 0 {
        let p = rng.gen_range(1..=left);
        parts.push(p);
        left -= p;
    }
    parts
}

/// A monomial of exactly the given weight.
pub fn monomial<R: Rng>(rng: &mut R, n: usize, weight: u32, diagonal: bool) -> Monomial {
    let gens = composition(rng, weight).into_iter().map(|d| generator(rng, n, d, diagonal)).collect();
    Monomial::new(gens)
}

/// Small nonzero rational.
pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let p: i64 = rng.gen_range(-3..=3);
        let q: i64 = rng.gen_range(1..=3);
        if p != 0 {
            return rat(p, q);
        }
    }
}

/// Coefficient `a + b h` with `b` possibly zero.
pub fn coefficient<R: Rng>(rng: &mut R) -> HSeries<Rational> {
    let a = small_rational(rng);
    if rng.gen_bool(0.5) {
        HSeries::new(EXACT, vec![a, small_rational(rng)])
    } else {
        HSeries::constant(EXACT, a)
    }
}

/// A normalized state with up to `max_terms` monomials of weight at most
/// `max_weight`.
pub fn state<R: Rng>(rng: &mut R, n: usize, max_weight: u32, max_terms: usize, diagonal: bool) -> State {
    let terms = rng.gen_range(1..=max_terms.max(1));
    let mut s = State::zero();
    for _ in 0..terms {
        let w = rng.gen_range(0..=max_weight);
        s.add_term(monomial(rng, n, w, diagonal), coefficient(rng));
    }
    normalize(n, &s)
}

/// All normal-form monomials of exactly the given weight.
pub fn all_monomials(n: usize, weight: u32, diagonal: bool) -> Vec<Monomial> {
    let nn = n as u8;
    let mut gens = Vec::new();
    for d in 1..=weight {
        for a in 1..=nn {
            for b in 1..=nn {
                if (diagonal && a != b) || (a == nn && b == nn) {
                    continue;
                }
                gens.push(Generator::new(a, b, d));
            }
        }
    }
    // multisets of generators with total depth = weight, in sorted order
    fn rec(gens: &[Generator], start: usize, left: u32, cur: &mut Vec<Generator>, out: &mut Vec<Monomial>) {
        if left == 0 {
            out.push(Monomial::new(cur.clone()));
            return;
        }
        for i in start..gens.len() {
            if gens[i].depth <= left {
                cur.push(gens[i]);
                rec(gens, i, left - gens[i].depth, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&gens, 0, weight, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_counts() {
        // N=3: 8 generators per depth
        assert_eq!(all_monomials(3, 1, false).len(), 8);
        assert_eq!(all_monomials(3, 2, false).len(), 8 + 36);
        assert_eq!(all_monomials(2, 0, false), vec![Monomial::one()]);
        assert_eq!(all_monomials(3, 2, true).len(), 2 + 3);
    }

    #[test]
    fn seeded_states_repeat() {
        let a = state(&mut rng(9), 3, 3, 3, false);
        let b = state(&mut rng(9), 3, 3, 3, false);
        assert_eq!(a, b);
        assert!(a.terms().keys().all(|m| m.weight() <= 3));
    }
}
