//! The vertex map `Y(v, z)` on the state space and the checks built on it.
//!
//! For a monomial `v = x_{a1b1}^(-r1) ... x_{anbn}^(-rn)` the field
//! `Y(v, z)` is the coefficient of `u1^(r1-1) ... un^(rn-1)` in the normally
//! ordered product `x_[n](z + u1, ..., z + un)`. Expanding the normal order
//! as a sum over subsets of annihilators gives the formula used here: every
//! annihilator contracts one generator of the target through the shifted
//! kernel table, every creator contributes `sum_m C(m-1, r-1) x^(-m) z^(m-r)`.

use std::collections::BTreeMap;

use crate::braiding::Braider;
use crate::error::{Error, Result};
use crate::fock::{d_apply, normalize, FieldResult, Generator, Monomial, State};
use crate::hseries::HSeries;
use crate::kernel::{term_series, Kernel};
use crate::laurent::Laurent;
use crate::report::AxiomReport;
use crate::scalar::{binomial, ri, Rational};

/// Coefficients of a field result in one variable, keyed by exponent.
pub type ZMap = BTreeMap<i32, State>;

fn add_into(map: &mut ZMap, e: i32, s: State) {
    if s.is_zero() {
        return;
    }
    map.entry(e).or_default().add_assign(&s);
}

fn annihilate_shifted(kernel: &Kernel, g: Generator, cur: &ZMap) -> Result<ZMap> {
    let k = kernel.k();
    let mut out = ZMap::new();
    for (&e, st) in cur {
        for (m, c) in st.terms() {
            for (i, t) in m.gens().iter().enumerate() {
                let rest = m.without(i);
                for term in kernel.yann_terms(g.row, g.col, t.row, t.col, t.depth, g.depth)?.iter() {
                    let coeff = c.mul(&term_series(term, k));
                    out.entry(e + term.exp).or_default().add_term(rest.clone(), coeff);
                }
            }
        }
    }
    Ok(out)
}

fn create_shifted(g: Generator, cur: &ZMap, budget: i32, zero_mode: Option<&[HSeries<Rational>]>) -> ZMap {
    let mut out = ZMap::new();
    let r = g.depth as i32;
    for (&e, st) in cur {
        if let Some(a0) = zero_mode {
            if g.is_diagonal() {
                let sign = if r % 2 == 1 { ri(1) } else { ri(-1) };
                add_into(&mut out, e - r, st.scale(&a0[g.row as usize - 1].scale_rational(&sign)));
            }
        }
        for j in 0..=(budget - e) {
            let m = r + j;
            let b = binomial(m as i64 - 1, (r - 1) as u32);
            add_into(&mut out, e + j, st.times_gen(Generator::new(g.row, g.col, m as u32)).scale_q(&b));
        }
    }
    out
}

/// `Y(v, z) w` up to `z^z_cap`, optionally with zero modes acting by the
/// given character values (indexed by the diagonal entry).
pub fn y_map(
    kernel: &Kernel,
    v: &Monomial,
    w: &State,
    z_cap: i32,
    zero_mode: Option<&[HSeries<Rational>]>,
) -> Result<ZMap> {
    if let Some(a0) = zero_mode {
        if a0.len() != kernel.n() {
            return Err(Error::IndexOutOfRange(format!("{} zero-mode values for N = {}", a0.len(), kernel.n())));
        }
    }
    let gens = v.gens();
    let n = gens.len();
    if n > 20 {
        return Err(Error::IndexOutOfRange(format!("{n} generators")));
    }
    let mut total = ZMap::new();
    for mask in 0u32..(1 << n) {
        let mut cur = ZMap::new();
        cur.insert(0, w.clone());
        for (q, g) in gens.iter().enumerate() {
            if mask & (1 << q) != 0 {
                cur = annihilate_shifted(kernel, *g, &cur)?;
            }
        }
        // zero modes can still lower the exponent by the remaining depths
        let creators: Vec<Generator> = (0..n).filter(|p| mask & (1 << p) == 0).map(|p| gens[p]).collect();
        let mut slack: Vec<i32> = vec![0; creators.len() + 1];
        if zero_mode.is_some() {
            for i in (0..creators.len()).rev() {
                let drop = if creators[i].is_diagonal() { creators[i].depth as i32 } else { 0 };
                slack[i] = slack[i + 1] + drop;
            }
        }
        for (i, g) in creators.iter().enumerate() {
            cur = create_shifted(*g, &cur, z_cap + slack[i + 1], zero_mode);
            cur.retain(|&e, _| e <= z_cap + slack[i + 1]);
        }
        for (e, st) in cur {
            if e <= z_cap {
                add_into(&mut total, e, st);
            }
        }
    }
    let mut out = ZMap::new();
    for (e, st) in total {
        let st = normalize(kernel.n(), &st);
        if !st.is_zero() {
            out.insert(e, st);
        }
    }
    Ok(out)
}

/// Linear extension of [`y_map`] in the first argument.
pub fn y_map_state(
    kernel: &Kernel,
    v: &State,
    w: &State,
    z_cap: i32,
    zero_mode: Option<&[HSeries<Rational>]>,
) -> Result<ZMap> {
    let mut out = ZMap::new();
    for (m, c) in v.terms() {
        for (e, st) in y_map(kernel, m, w, z_cap, zero_mode)? {
            add_into(&mut out, e, st.scale(c));
        }
    }
    out.retain(|_, s| !s.is_zero());
    Ok(out)
}

pub fn zmap_to_field(map: ZMap, var: &str, cap: i32) -> FieldResult {
    let terms = map.into_iter().map(|(e, s)| (vec![e], s)).collect();
    Laurent::from_terms(&[var], vec![Some(cap)], terms)
}

/// `Y(v, z) w` as a field result in `z`, kept up to `z^z_cap`.
pub fn y_apply(kernel: &Kernel, v: &Monomial, w: &State, z: &str, z_cap: i32) -> Result<FieldResult> {
    Ok(zmap_to_field(y_map(kernel, v, w, z_cap, None)?, z, z_cap))
}

fn first_zmap_difference(a: &ZMap, b: &ZMap, order: usize) -> Option<i32> {
    let zero = State::zero();
    for e in a.keys().chain(b.keys()) {
        let x = a.get(e).unwrap_or(&zero).truncate(order);
        let y = b.get(e).unwrap_or(&zero).truncate(order);
        if x != y {
            return Some(*e);
        }
    }
    None
}

/// `Y(1, z) w = w`.
pub fn vacuum_identity_witness(kernel: &Kernel, w: &State, z_cap: i32) -> Result<Option<i32>> {
    let got = y_map(kernel, &Monomial::one(), w, z_cap, None)?;
    let mut want = ZMap::new();
    let w = normalize(kernel.n(), w);
    if !w.is_zero() {
        want.insert(0, w);
    }
    Ok(first_zmap_difference(&got, &want, kernel.k()))
}

/// `Y(v, z) 1 = exp(z D) v`: regular at `z = 0` with `z^j` coefficient `D^j v / j!`.
pub fn creation_witness(kernel: &Kernel, v: &Monomial, z_cap: i32) -> Result<Option<i32>> {
    let got = y_map(kernel, v, &State::vacuum(), z_cap, None)?;
    let mut want = ZMap::new();
    let mut cur = normalize(kernel.n(), &State::from_gens(v.gens().to_vec()));
    let mut fact = ri(1);
    for j in 0..=z_cap {
        if j > 0 {
            cur = normalize(kernel.n(), &d_apply(&cur));
            fact *= ri(j as i64);
        }
        let term = cur.scale_q(&(ri(1) / &fact));
        if !term.is_zero() {
            want.insert(j, term);
        }
    }
    Ok(first_zmap_difference(&got, &want, kernel.k()))
}

/// `[D, Y(v, z)] = d/dz Y(v, z)` on `w`.
pub fn translation_witness(kernel: &Kernel, v: &Monomial, w: &State, z_cap: i32) -> Result<Option<i32>> {
    let n = kernel.n();
    let dy = y_map(kernel, v, &normalize(n, &d_apply(w)), z_cap, None)?;
    let y = y_map(kernel, v, w, z_cap + 1, None)?;
    let mut lhs = ZMap::new();
    for (e, st) in &y {
        if *e <= z_cap {
            add_into(&mut lhs, *e, normalize(n, &d_apply(st)));
        }
    }
    for (e, st) in dy {
        add_into(&mut lhs, e, st.neg());
    }
    let mut rhs = ZMap::new();
    for (e, st) in y {
        if e != 0 && e - 1 <= z_cap {
            add_into(&mut rhs, e - 1, st.scale_q(&ri(e as i64)));
        }
    }
    Ok(first_zmap_difference(&lhs, &rhs, kernel.k()))
}

type Grid = BTreeMap<(i32, i32), State>;
/// Coefficients of one braid output, keyed by the power of `z`.
type ZTerms = Vec<(i32, HSeries<Rational>)>;

fn grid_add(g: &mut Grid, key: (i32, i32), s: State) {
    if s.is_zero() {
        return;
    }
    g.entry(key).or_default().add_assign(&s);
}

fn grid_difference(a: &Grid, b: &Grid, order: usize) -> Option<(i32, i32)> {
    let zero = State::zero();
    for key in a.keys().chain(b.keys()) {
        let x = a.get(key).unwrap_or(&zero).truncate(order);
        let y = b.get(key).unwrap_or(&zero).truncate(order);
        if x != y {
            return Some(*key);
        }
    }
    None
}

/// Outcome of an exponent search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentSearch {
    /// Smallest exponent that makes both sides agree, if one was found.
    pub exponent: Option<u32>,
    /// Number of nonzero coefficients compared at that exponent (or at the
    /// largest exponent tried).
    pub compared: usize,
    /// First mismatch at the largest exponent tried.
    pub mismatch: Option<(i32, i32)>,
}

fn support(a: &Grid, b: &Grid) -> usize {
    a.keys().chain(b.keys()).collect::<std::collections::BTreeSet<_>>().len()
}

/// Window and search range shared by the two exponent searches.
#[derive(Clone, Copy, Debug)]
pub struct SearchWindow {
    /// Largest exponent of the first variable compared.
    pub a: i32,
    /// Largest exponent of the second variable compared.
    pub b: i32,
    /// Largest exponent tried.
    pub max_exponent: u32,
    /// Compare modulo `h^order_target`.
    pub order_target: usize,
}

fn check_order(kernel: &Kernel, win: &SearchWindow) -> Result<()> {
    if win.order_target == 0 || win.order_target > kernel.k() + 1 {
        return Err(Error::BeyondCap(format!(
            "order target {} needs kernel order at least {}",
            win.order_target,
            win.order_target.saturating_sub(1)
        )));
    }
    Ok(())
}

/// Smallest `s` with
/// `(z0 + z2)^s Y(u, z0 + z2) Y(v, z2) w = (z2 + z0)^s Y(Y(u, z0) v, z2) w`
/// modulo `h^order_target`, compared on `z0^a z2^b` for `a <= A`, `b <= B`.
/// The left side is expanded with `z0` dominant, the right with `z2` dominant.
///
/// With `zero_mode` the outer fields act on a module through that character;
/// the inner `Y(u, z0) v` is always the algebra map.
pub fn weak_assoc_exponent(
    kernel: &Kernel,
    u: &Monomial,
    v: &Monomial,
    w: &State,
    win: SearchWindow,
    zero_mode: Option<&[HSeries<Rational>]>,
) -> Result<ExponentSearch> {
    check_order(kernel, &win)?;
    let (aa, bb) = (win.a, win.b);
    let k = win.order_target - 1;
    // left: w_j = [z2^j] Y(v, z2) w, then Y(u, Z) w_j
    let yv = y_map(kernel, v, w, bb, zero_mode)?;
    let j_min = yv.keys().next().copied().unwrap_or(0);
    let cap_z = aa + bb - j_min;
    let mut left_parts: Vec<(i32, ZMap)> = Vec::new();
    for (&j, wj) in &yv {
        left_parts.push((j, y_map(kernel, u, wj, cap_z, zero_mode)?));
    }
    // right: v_i = [z0^i] Y(u, z0) v, then Y(v_i, z2) w
    let yu_v = y_map(kernel, u, &State::from_gens(v.gens().to_vec()), aa, None)?;
    let mut right_parts: Vec<(i32, ZMap)> = Vec::new();
    for (&i, vi) in &yu_v {
        right_parts.push((i, y_map_state(kernel, vi, w, bb, zero_mode)?));
    }
    let mut last = ExponentSearch { exponent: None, compared: 0, mismatch: None };
    for s in 0..=win.max_exponent as i32 {
        let mut lhs = Grid::new();
        for (j, part) in &left_parts {
            for (&e, st) in part {
                // (z0 + z2)^(e + s) with z0 dominant
                for t in 0..=(bb - j) {
                    let p = e + s;
                    if p >= 0 && t > p {
                        break;
                    }
                    let a = e + s - t;
                    if a > aa {
                        continue;
                    }
                    grid_add(&mut lhs, (a, j + t), st.truncate(k).scale_q(&binomial(p as i64, t as u32)));
                }
            }
        }
        let mut rhs = Grid::new();
        for (i, part) in &right_parts {
            for (&beta, st) in part {
                for t in 0..=s {
                    let (a, b) = (i + s - t, beta + t);
                    if a > aa || b > bb {
                        continue;
                    }
                    grid_add(&mut rhs, (a, b), st.truncate(k).scale_q(&binomial(s as i64, t as u32)));
                }
            }
        }
        let compared = support(&lhs, &rhs);
        match grid_difference(&lhs, &rhs, k) {
            None => return Ok(ExponentSearch { exponent: Some(s as u32), compared, mismatch: None }),
            Some(d) => last = ExponentSearch { exponent: None, compared, mismatch: Some(d) },
        }
    }
    Ok(last)
}

/// Smallest `r` with
/// `(z1 - z2)^r Y(z1)(1 ⊗ Y(z2)) (𝒮(z1 - z2)(u ⊗ v) ⊗ w) = (z1 - z2)^r Y(v, z2) Y(u, z1) w`
/// modulo `h^order_target` on `z1^a z2^b`, `a <= A`, `b <= B`. The left side
/// is expanded with `z1` dominant, the right with `z2` dominant.
pub fn s_locality_exponent(
    br: &Braider,
    u: &Monomial,
    v: &Monomial,
    w: &State,
    win: SearchWindow,
) -> Result<ExponentSearch> {
    let kernel = br.kernel();
    check_order(kernel, &win)?;
    let (aa, bb) = (win.a, win.b);
    let k = win.order_target - 1;
    let kk = kernel.k();
    let braid = br.braid(u, v)?;
    // per braid output: h-series coefficients by z exponent, plus F(alpha, beta)
    let mut left_parts: Vec<(ZTerms, Grid)> = Vec::new();
    for ((u2, v2), coeff) in braid.iter() {
        let terms: ZTerms =
            coeff.terms().iter().map(|(e, c)| (e.first().copied().unwrap_or(0), c.truncate(k.min(kk)))).collect();
        let m = terms.iter().map(|(e, _)| -*e).max().unwrap_or(0).max(0);
        let yv = y_map(kernel, v2, w, bb, None)?;
        let beta_min = yv.keys().next().copied().unwrap_or(0);
        let cap1 = aa + m + bb - beta_min;
        let mut f = Grid::new();
        for (&beta, wb) in &yv {
            for (alpha, st) in y_map(kernel, u2, wb, cap1, None)? {
                grid_add(&mut f, (alpha, beta), st.truncate(k));
            }
        }
        left_parts.push((terms, f));
    }
    let yu = y_map(kernel, u, w, aa, None)?;
    let mut g = Grid::new();
    for (&alpha, wa) in &yu {
        for (beta, st) in y_map(kernel, v, wa, bb, None)? {
            grid_add(&mut g, (alpha, beta), st.truncate(k));
        }
    }
    let sign = |t: i32| if t % 2 == 0 { ri(1) } else { ri(-1) };
    let mut last = ExponentSearch { exponent: None, compared: 0, mismatch: None };
    for r in 0..=win.max_exponent as i32 {
        let mut lhs = Grid::new();
        for (terms, f) in &left_parts {
            for (e, hs) in terms {
                let p = r + e;
                for ((alpha, beta), st) in f {
                    let scaled = st.scale(hs);
                    for t in 0..=(bb - beta) {
                        if p >= 0 && t > p {
                            break;
                        }
                        let a = alpha + p - t;
                        if a > aa {
                            continue;
                        }
                        let c = binomial(p as i64, t as u32) * sign(t);
                        grid_add(&mut lhs, (a, beta + t), scaled.scale_q(&c));
                    }
                }
            }
        }
        let mut rhs = Grid::new();
        for ((alpha, beta), st) in &g {
            for t in 0..=r {
                let (a, b) = (alpha + r - t, beta + t);
                if a > aa || b > bb {
                    continue;
                }
                grid_add(&mut rhs, (a, b), st.scale_q(&(binomial(r as i64, t as u32) * sign(t))));
            }
        }
        let compared = support(&lhs, &rhs);
        match grid_difference(&lhs, &rhs, k) {
            None => return Ok(ExponentSearch { exponent: Some(r as u32), compared, mismatch: None }),
            Some(d) => last = ExponentSearch { exponent: None, compared, mismatch: Some(d) },
        }
    }
    Ok(last)
}

/// `<a_i, a_j>` for the weights of the diagonal generators: `δ_ij - 1/N`.
pub fn weight_pairing(n: usize, i: u8, j: u8) -> Rational {
    let d = if i == j { ri(1) } else { ri(0) };
    d - Rational::new(1.into(), (n as i64).into())
}

/// The `h^0` part of `Y(x_ii^(-1), z) m` for a diagonal monomial `m`, against
/// the free-boson formula with pairing `c <a_i, a_j>`.
pub fn classical_limit_witness(kernel: &Kernel, i: u8, m: &Monomial, z_cap: i32) -> Result<Option<i32>> {
    if !m.is_diagonal() {
        return Err(Error::NonDiagonal(m.to_string()));
    }
    let n = kernel.n();
    let w = State::from_gens(m.gens().to_vec());
    let got: ZMap = y_map(kernel, &Monomial::new(vec![Generator::new(i, i, 1)]), &w, z_cap, None)?
        .into_iter()
        .map(|(e, s)| (e, s.h_part(0)))
        .filter(|(_, s)| !s.is_zero())
        .collect();
    let mut want = ZMap::new();
    for mm in 1..=(z_cap + 1) {
        add_into(&mut want, mm - 1, w.times_gen(Generator::new(i, i, mm as u32)));
    }
    for (idx, g) in m.gens().iter().enumerate() {
        let c = kernel.level() * weight_pairing(n, i, g.row) * ri(g.depth as i64);
        let e = -(g.depth as i32) - 1;
        add_into(&mut want, e, State::from_gens(m.without(idx).gens().to_vec()).scale_q(&c));
    }
    let want: ZMap =
        want.into_iter().map(|(e, s)| (e, normalize(n, &s).h_part(0))).filter(|(_, s)| !s.is_zero()).collect();
    Ok(first_zmap_difference(&got, &want, 0))
}

/// Runs the classical check on every diagonal monomial up to `max_weight`.
pub fn verify_classical_limit(kernel: &Kernel, max_weight: u32, z_cap: i32) -> Result<AxiomReport> {
    let mut checked = 0;
    for wt in 0..=max_weight {
        for m in crate::sample::all_monomials(kernel.n(), wt, true) {
            for i in 1..=kernel.n() as u8 {
                checked += 1;
                if let Some(e) = classical_limit_witness(kernel, i, &m, z_cap)? {
                    return Ok(AxiomReport::fail("classical", checked, format!("Y(x{i}{i}(-1), z) on {m} at z^{e}"))
                        .param("N", kernel.n())
                        .param("c", kernel.level()));
                }
            }
        }
    }
    Ok(AxiomReport::pass("classical", checked).param("N", kernel.n()).param("c", kernel.level()))
}
