//! Property tests for the state algebra and its fields.

use std::sync::OnceLock;

use proptest::prelude::*;
use qheis_core::fock::{
    annihilate, apply_annihilator, commutator_witness, enumerate_bipartite, enumerate_matchings, normal_ordered_apply,
    normalize, trace_field_witness, FieldResult, Generator, Monomial, State,
};
use qheis_core::sample::{self, rng};
use qheis_core::{rat, ri, Kernel, Laurent, Rational};

fn kernel(n: usize, c: i64) -> &'static Kernel {
    static K: OnceLock<Vec<((usize, i64), Kernel)>> = OnceLock::new();
    let all = K.get_or_init(|| {
        let mut v = Vec::new();
        for n in [2, 3] {
            for c in [1, -2] {
                v.push(((n, c), Kernel::build(n, 3, &ri(c)).unwrap()));
            }
        }
        v
    });
    &all.iter().find(|(k, _)| *k == (n, c)).unwrap().1
}

/// A state that may still contain `x_NN` generators.
fn raw_state(seed: u64, n: usize) -> State {
    use rand::Rng;
    let mut r = rng(seed);
    let mut s = State::zero();
    for _ in 0..r.gen_range(1..=3) {
        let wt = r.gen_range(0..=3);
        let parts = sample::composition(&mut r, wt);
        let gens =
            parts.into_iter().map(|d| Generator::new(r.gen_range(1..=n as u8), r.gen_range(1..=n as u8), d)).collect();
        s.add_term(Monomial::new(gens), sample::coefficient(&mut r));
    }
    s
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

#[test]
fn matching_counts_match_formula() {
    for n in 0..=6usize {
        for k in 0..=n / 2 {
            let want = factorial(n) / (2u64.pow(k as u32) * factorial(k) * factorial(n - 2 * k));
            let got = enumerate_matchings(n, k).unwrap();
            assert_eq!(got.len() as u64, want, "n={n} k={k}");
            // brute force over all pair sets
            let mut brute = 0;
            let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|p| (p + 1..=n).map(move |q| (p, q))).collect();
            for mask in 0u32..(1 << pairs.len()) {
                if mask.count_ones() as usize != k {
                    continue;
                }
                let chosen: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).collect();
                let mut seen = vec![false; n + 1];
                let ok = chosen.iter().all(|(_, (p, q))| {
                    let fresh = !seen[*p] && !seen[*q];
                    seen[*p] = true;
                    seen[*q] = true;
                    fresh
                });
                if ok {
                    brute += 1;
                }
            }
            assert_eq!(brute, got.len(), "brute force n={n} k={k}");
        }
    }
    for (n, m) in [(2, 2), (3, 2), (3, 3), (1, 4)] {
        for k in 0..=n.min(m) {
            let want = (factorial(n) / (factorial(k) * factorial(n - k))) * (factorial(m) / factorial(m - k));
            assert_eq!(enumerate_bipartite(n, m, k).unwrap().len() as u64, want);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn annihilation_respects_the_quotient(seed in any::<u64>(), a in 1u8..=3, b in 1u8..=3) {
        let ker = kernel(3, 1);
        let s = raw_state(seed, 3);
        let x = annihilate(ker, a, b, &s, "u").unwrap();
        let y = annihilate(ker, a, b, &normalize(3, &s), "u").unwrap();
        prop_assert!(x.first_difference(&y).is_none());
    }

    #[test]
    fn commutation_relation(seed in any::<u64>(), n in 2usize..=3, c in prop_oneof![Just(1i64), Just(-2)], e in any::<[u8; 4]>()) {
        let ker = kernel(n, c);
        let w = sample::state(&mut rng(seed), n, 3, 2, false);
        let idx = |x: u8| x % n as u8 + 1;
        let wit = commutator_witness(ker, (idx(e[0]), idx(e[1])), (idx(e[2]), idx(e[3])), &w, 2).unwrap();
        prop_assert!(wit.is_none(), "{wit:?} on {w}");
    }

    #[test]
    fn trace_of_field_vanishes(seed in any::<u64>(), n in 2usize..=3) {
        let ker = kernel(n, -2);
        let w = sample::state(&mut rng(seed), n, 3, 3, false);
        prop_assert!(trace_field_witness(ker, &w, 3).unwrap().is_none());
    }

    #[test]
    fn annihilators_commute(seed in any::<u64>(), e in any::<[u8; 4]>()) {
        let ker = kernel(2, 1);
        let w = sample::state(&mut rng(seed), 2, 3, 3, false);
        let idx = |x: u8| x % 2 + 1;
        let fr: FieldResult = Laurent::constant(w);
        let (a, b, c, d) = (idx(e[0]), idx(e[1]), idx(e[2]), idx(e[3]));
        let l = apply_annihilator(ker, a, b, &apply_annihilator(ker, c, d, &fr, "u2").unwrap(), "u1").unwrap();
        let r = apply_annihilator(ker, c, d, &apply_annihilator(ker, a, b, &fr, "u1").unwrap(), "u2").unwrap();
        prop_assert!(l.first_difference(&r).is_none());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn normal_ordering_is_symmetric(seed in any::<u64>(), e in any::<[u8; 6]>(), j in 0usize..2) {
        let ker = kernel(2, 1);
        let w = sample::state(&mut rng(seed), 2, 2, 2, false);
        let idx = |x: u8| x % 2 + 1;
        let entries = vec![(idx(e[0]), idx(e[1])), (idx(e[2]), idx(e[3])), (idx(e[4]), idx(e[5]))];
        let vars = ["u1", "u2", "u3"];
        let mut e2 = entries.clone();
        e2.swap(j, j + 1);
        let mut v2 = vars;
        v2.swap(j, j + 1);
        let x = normal_ordered_apply(ker, &entries, &vars, &w, 1).unwrap();
        let y = normal_ordered_apply(ker, &e2, &v2, &w, 1).unwrap();
        prop_assert!(x.first_difference(&y).is_none());
    }
}

#[test]
fn four_point_symmetry_on_small_states() {
    let ker = kernel(2, 1);
    let w = State::from_gens(vec![Generator::new(1, 2, 1)]);
    let entries = [(1, 2), (2, 1), (1, 1), (2, 1)];
    let vars = ["u1", "u2", "u3", "u4"];
    let base = normal_ordered_apply(ker, &entries, &vars, &w, 1).unwrap();
    for j in 0..3 {
        let mut e2 = entries;
        e2.swap(j, j + 1);
        let mut v2 = vars;
        v2.swap(j, j + 1);
        let other = normal_ordered_apply(ker, &e2, &v2, &w, 1).unwrap();
        assert!(base.first_difference(&other).is_none(), "swap {j}");
    }
}

#[test]
fn three_point_expansion_structure() {
    // x_[3] = x1 x2 x3 + S12 x3 + S13 x2 + S23 x1: on the vacuum only creation survives
    let ker = kernel(3, 1);
    let fr = normal_ordered_apply(ker, &[(1, 2), (2, 3), (3, 1)], &["u1", "u2", "u3"], &State::vacuum(), 1).unwrap();
    for e in fr.terms().keys() {
        assert!(e.iter().all(|x| *x >= 0));
    }
    let st = fr.coefficient_of(&[("u1", 0), ("u2", 0), ("u3", 0)]).unwrap();
    let want = State::from_gens(vec![Generator::new(1, 2, 1), Generator::new(2, 3, 1), Generator::new(3, 1, 1)]);
    assert_eq!(st, want);
}

#[test]
fn contraction_against_kernel_entry() {
    // x⁻_ab(u) x_cd^(-1) = -s_abcd(u) for every entry
    let ker = kernel(3, -2);
    for (a, b, c, d) in [(1u8, 2u8, 2u8, 1u8), (1, 1, 2, 2), (2, 2, 2, 2), (1, 2, 1, 2)] {
        let fr = annihilate(ker, a, b, &State::from_gens(vec![Generator::new(c, d, 1)]), "u").unwrap();
        for t in ker.s_terms(a, b, c, d).unwrap().iter() {
            let st = fr.coefficient_of(&[("u", t.exp)]).unwrap();
            let got: Rational = st.terms().get(&Monomial::one()).unwrap().coeff(t.h);
            assert_eq!(got, -t.coeff.clone());
        }
    }
    let _ = rat(1, 2);
}

#[test]
fn commutator_without_kernel_terms_differs() {
    use qheis_core::fock::apply_field;
    let ker = kernel(2, 1);
    let w: FieldResult = Laurent::constant(State::from_gens(vec![Generator::new(2, 1, 1)]));
    let l = apply_field(ker, 1, 2, &apply_field(ker, 2, 1, &w, "u2", 2).unwrap(), "u1", 2).unwrap();
    let r = apply_field(ker, 2, 1, &apply_field(ker, 1, 2, &w, "u1", 2).unwrap(), "u2", 2).unwrap();
    assert!(l.first_difference(&r).is_some());
    assert!(l.len() > 10);
}
