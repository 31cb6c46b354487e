use std::collections::BTreeMap;
use std::sync::OnceLock;

use proptest::prelude::*;
use qheis_core::braiding::{
    identity_mod_h_witness, shift_witness, tensor_difference, unitarity_witness, yang_baxter_witness, Braider, Tensor,
};
use qheis_core::fock::{normal_ordered_apply, normal_ordered_floor, shift_substitute};
use qheis_core::sample::{all_monomials, monomial, rng, state};
use qheis_core::vertex::{
    creation_witness, s_locality_exponent, translation_witness, vacuum_identity_witness, weak_assoc_exponent, y_map,
    SearchWindow,
};
use qheis_core::*;

fn kernel(n: usize) -> &'static Kernel {
    static K2: OnceLock<Kernel> = OnceLock::new();
    static K3: OnceLock<Kernel> = OnceLock::new();
    let cell = if n == 2 { &K2 } else { &K3 };
    cell.get_or_init(|| Kernel::build(n, 3, &rat(1, 2)).unwrap())
}

fn g(a: u8, b: u8, r: u32) -> Generator {
    Generator::new(a, b, r)
}

fn monos_up_to(n: usize, w: u32) -> Vec<Vec<Monomial>> {
    (0..=w).map(|x| all_monomials(n, x, false)).collect()
}

#[test]
fn braiding_axioms_exhaustive_degree_two() {
    let ker = kernel(2);
    let br = Braider::new(ker);
    let ms = monos_up_to(2, 2);
    let mut pairs = 0;
    for w1 in 0..=2 {
        for w2 in 0..=2 - w1 {
            for a in &ms[w1] {
                for b in &ms[w2] {
                    pairs += 1;
                    assert_eq!(identity_mod_h_witness(&br, [a, b]).unwrap(), None);
                    assert_eq!(unitarity_witness(&br, [a, b]).unwrap(), None, "{a} | {b}");
                    assert_eq!(shift_witness(&br, [a, b]).unwrap(), None, "{a} | {b}");
                    for c in ms.iter().take(3 - w1 - w2).flatten() {
                        assert_eq!(yang_baxter_witness(&br, [a, b, c], 3).unwrap(), None, "{a} | {b} | {c}");
                    }
                }
            }
        }
    }
    assert!(pairs > 20);
}

#[test]
fn yang_baxter_detects_wrong_argument() {
    // Both sides sum over the same sets of disjoint contractions, so the order
    // of the factors alone cannot break the identity; a wrong 𝒮13 argument on
    // one side must.
    let ker = kernel(2);
    let br = Braider::new(ker);
    let ms = monos_up_to(2, 2);
    let r1 = Region::new("z1", &[]).unwrap();
    let r2 = Region::new("z2", &[]).unwrap();
    let r13 = Region::new("z1", &["z2"]).unwrap();
    let caps = Caps::default().with("z2", 3);
    let none = Caps::default();
    let f1 = [("z1", ri(1))];
    let f2 = [("z2", ri(1))];
    let good = [("z1", ri(1)), ("z2", ri(1))];
    let bad = [("z1", ri(1)), ("z2", ri(-1))];
    let mut found = false;
    for a in &ms[2] {
        for b in &ms[1] {
            for c in &ms[1] {
                let mut start: Tensor = BTreeMap::new();
                start.insert(vec![a.clone(), b.clone(), c.clone()], Laurent::constant(HSeries::one_with_cap(EXACT)));
                let l = br.apply(&start, 1, 2, &f2, &r2, &none).unwrap();
                let l = br.apply(&l, 0, 2, &good, &r13, &caps).unwrap();
                let l = br.apply(&l, 0, 1, &f1, &r1, &none).unwrap();
                let r = br.apply(&start, 0, 1, &f1, &r1, &none).unwrap();
                let r = br.apply(&r, 0, 2, &bad, &r13, &caps).unwrap();
                let r = br.apply(&r, 1, 2, &f2, &r2, &none).unwrap();
                found |= tensor_difference(&l, &r).is_some();
            }
        }
    }
    assert!(found);
}

#[test]
fn vacuum_in_any_slot() {
    let ker = kernel(3);
    let br = Braider::new(ker);
    let one = Monomial::one();
    let a = Monomial::new(vec![g(1, 2, 1), g(3, 1, 2)]);
    assert_eq!(yang_baxter_witness(&br, [&one, &a, &one], 4).unwrap(), None);
    assert_eq!(yang_baxter_witness(&br, [&a, &one, &one], 4).unwrap(), None);
    let r = br.braid(&a, &one).unwrap();
    assert_eq!(r.len(), 1);
}

#[test]
fn vertex_on_vacuum_is_creation_series() {
    let ker = kernel(2);
    let y = y_map(ker, &Monomial::new(vec![g(1, 1, 1)]), &State::vacuum(), 4, None).unwrap();
    assert_eq!(y.len(), 5);
    for (e, st) in y {
        assert!(e >= 0);
        assert_eq!(st, State::from_gens(vec![g(1, 1, e as u32 + 1)]));
    }
}

fn window(order: usize) -> SearchWindow {
    SearchWindow { a: 2, b: 2, max_exponent: 12, order_target: order }
}

#[test]
fn trivial_exponents() {
    let ker = kernel(2);
    let br = Braider::new(ker);
    let one = Monomial::one();
    let v = Monomial::new(vec![g(1, 2, 1)]);
    let w = State::from_gens(vec![g(2, 1, 2)]);
    assert_eq!(weak_assoc_exponent(ker, &one, &v, &w, window(3), None).unwrap().exponent, Some(0));
    let vac = State::vacuum();
    assert_eq!(weak_assoc_exponent(ker, &v, &one, &vac, window(3), None).unwrap().exponent, Some(0));
    // with v = 1 both sides are (z0+z2)^s Y(u, z0+z2) w in opposite regions, so
    // s is the pole order of Y(u, z) w modulo h^3
    let pole = y_map(ker, &v, &w, 0, None)
        .unwrap()
        .into_iter()
        .filter(|(_, st)| !st.truncate(2).is_zero())
        .map(|(e, _)| -e)
        .max()
        .unwrap()
        .max(0);
    assert!(pole > 0);
    assert_eq!(weak_assoc_exponent(ker, &v, &one, &w, window(3), None).unwrap().exponent, Some(pole as u32));
    assert_eq!(s_locality_exponent(&br, &one, &one, &w, window(3)).unwrap().exponent, Some(0));
}

#[test]
fn classical_locality_needs_double_pole() {
    // at h^0 the fields x11(z1), x11(z2) commute up to c<a1,a1>/(z1-z2)^2
    let ker = kernel(2);
    let br = Braider::new(ker);
    let u = Monomial::new(vec![g(1, 1, 1)]);
    let res = s_locality_exponent(&br, &u, &u, &State::vacuum(), window(1)).unwrap();
    assert_eq!(res.exponent, Some(2));
    assert!(res.compared > 0);
}

#[test]
fn exponent_searches_on_degree_one() {
    let ker = kernel(2);
    let br = Braider::new(ker);
    let u = Monomial::new(vec![g(1, 1, 1)]);
    let v = Monomial::new(vec![g(1, 2, 1)]);
    for w in [State::vacuum(), State::from_gens(vec![g(2, 1, 1)])] {
        let s = weak_assoc_exponent(ker, &u, &v, &w, window(3), None).unwrap();
        let r = s_locality_exponent(&br, &u, &v, &w, window(3)).unwrap();
        assert!(s.exponent.is_some() && r.exponent.is_some(), "{s:?} {r:?}");
    }
}

fn n_and_seed() -> impl Strategy<Value = (usize, u64)> {
    (prop_oneof![Just(2usize), Just(3usize)], any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn vacuum_and_translation((n, seed) in n_and_seed()) {
        let ker = kernel(n);
        let mut r = rng(seed);
        let v = monomial(&mut r, n, 2, false);
        let w = state(&mut r, n, 2, 3, false);
        prop_assert_eq!(vacuum_identity_witness(ker, &w, 3).unwrap(), None);
        prop_assert_eq!(creation_witness(ker, &v, 3).unwrap(), None);
        prop_assert_eq!(translation_witness(ker, &v, &w, 2).unwrap(), None);
    }

    #[test]
    fn fast_field_matches_matching_sum((n, seed) in n_and_seed()) {
        let ker = kernel(n);
        let mut r = rng(seed);
        let v = loop {
            let m = monomial(&mut r, n, 3, false);
            if m.len() == 2 { break m; }
        };
        let w = state(&mut r, n, 2, 2, false);
        let z_cap = 1;
        let fast = y_map(ker, &v, &w, z_cap, None).unwrap();
        let entries: Vec<(u8, u8)> = v.gens().iter().map(|x| (x.row, x.col)).collect();
        let u_cap = v.max_depth() as i32;
        let floor = normal_ordered_floor(ker, &w);
        let big = u_cap + z_cap + 2 * (ker.k() as i32 + w.max_weight() as i32 + 4);
        let fr = normal_ordered_apply(ker, &entries, &["u1", "u2"], &w, big).unwrap();
        let sub = shift_substitute(&fr, &["u1", "u2"], "z", true, u_cap, z_cap, floor).unwrap();
        prop_assert!(sub.cap_of("z").unwrap() >= z_cap);
        let d = [v.gens()[0].depth as i32 - 1, v.gens()[1].depth as i32 - 1];
        let lo = fast.keys().next().copied().unwrap_or(0).min(-12);
        for e in lo..=z_cap {
            let slow = sub.coeff_at(&[("u1", d[0]), ("u2", d[1]), ("z", e)]);
            let quick = fast.get(&e).cloned().unwrap_or_default();
            prop_assert_eq!(slow, quick, "z^{}", e);
        }
    }
}
