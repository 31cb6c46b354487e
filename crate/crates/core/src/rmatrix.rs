//! Yang R-matrix, the normalizing series `G(u,C)`, the kernel `S(u,C)` and
//! its odd part `T(z) = S(z) - S(-z)`.
//!
//! Operator entries are `h`-series whose coefficients are Laurent
//! polynomials in `u` with coefficients in `C[C]`. The central parameter
//! stays formal here; [`RMatrixBundle::s_at`] evaluates it.

use crate::error::{Error, Result};
use crate::hseries::HSeries;
use crate::laurent::{substitute_shift, Caps, Laurent, Region};
use crate::scalar::{ri, CPoly, Coeff, Rational};
use crate::tensor::TensorOp;

/// Series in `h` of Laurent polynomials.
pub type LSeries<T> = HSeries<Laurent<T>>;
/// Operator with [`LSeries`] entries.
pub type SeriesOp<T> = TensorOp<LSeries<T>>;

pub const U: &str = "u";
pub const Z: &str = "z";

/// Central parameter: formal `C` or a rational value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Central {
    Formal,
    Value(Rational),
}

fn lconst<T: Coeff>(t: T) -> Laurent<T> {
    Laurent::constant(t)
}

fn upow<T: Coeff>(e: i32, t: T) -> Laurent<T> {
    Laurent::monomial(&[U], &[e], t)
}

/// `R(u) = I - (h/u) P`, to order `k`.
pub fn build_r(n: usize, k: usize) -> Result<SeriesOp<CPoly>> {
    let one = HSeries::constant(k, lconst(CPoly::one()));
    let i = TensorOp::identity_with(n, 2, one)?;
    let h_over_u = HSeries::monomial(k, 1, upow(-1, CPoly::one()));
    let p = TensorOp::perm_with(n, h_over_u)?;
    i.sub(&p)
}

/// `R(-u-hC)`, expanding `1/(-u-hC)` in powers of `hC/u` to order `k`.
///
/// `u_caps` bounds the retained negative powers of `u`.
pub fn build_r_shifted(n: usize, k: usize, u_caps: i32) -> Result<SeriesOp<CPoly>> {
    let arg = HSeries::new(k, vec![upow(1, CPoly::constant(ri(-1))), lconst(CPoly::c().neg_ref())]);
    let inv = arg.invert()?;
    let coeff = inv.shift_up(1).truncate(k).map(|l| drop_below(l, -u_caps));
    let one = HSeries::constant(k, lconst(CPoly::one()));
    let i = TensorOp::identity_with(n, 2, one)?;
    let p = TensorOp::perm_with(n, coeff)?;
    i.sub(&p)
}

fn drop_below<T: Coeff>(l: &Laurent<T>, min_u: i32) -> Laurent<T> {
    let mut out = Laurent::zero_in(&[U]);
    for (e, c) in l.terms() {
        let x = l.vars().iter().position(|v| v == U).map_or(0, |i| e[i]);
        if x >= min_u {
            out = out.add(&upow(x, c.clone()));
        }
    }
    out
}

/// `R(u) R(-u-hC)` to order `k`.
pub fn rr_product(n: usize, k: usize, u_caps: i32) -> Result<SeriesOp<CPoly>> {
    build_r(n, k)?.compose(&build_r_shifted(n, k, u_caps)?)
}

/// Solves `tr_1(G R(u)R(-u-hC) - I) = 0` for `G` order by order in `h`.
pub fn solve_g(n: usize, k: usize) -> Result<LSeries<CPoly>> {
    let m = rr_product(n, k, k as i32 + 3)?;
    solve_g_from(&m, n, k)
}

fn solve_g_from(m: &SeriesOp<CPoly>, n: usize, k: usize) -> Result<LSeries<CPoly>> {
    let tr = m.partial_trace(1)?;
    let nn = CPoly::constant(ri(n as i64));
    let inv_n = CPoly::constant(Rational::new(1.into(), (n as i64).into()));
    let mut g: Vec<Laurent<CPoly>> = vec![lconst(CPoly::one())];
    for order in 1..=k {
        // g_order * N * I = -sum_{j<order} g_j (tr_1 M)_{order-j}
        let mut rhs: TensorOp<Laurent<CPoly>> = TensorOp::zero(n, 1)?;
        for (j, gj) in g.iter().enumerate() {
            let part = tr.map_into(|e| e.coeff(order - j)).scale(gj);
            rhs = rhs.sub(&part)?;
        }
        let gk = rhs.entry(&[1], &[1])?.scale(&inv_n);
        for i in 1..=n as u8 {
            for j in 1..=n as u8 {
                let want = if i == j { gk.scale(&nn) } else { Laurent::zero() };
                if rhs.entry(&[i], &[j])? != want {
                    return Err(Error::InconsistentSystem(order));
                }
            }
        }
        g.push(gk);
    }
    Ok(HSeries::new(k, g))
}

/// Everything derived from the R-matrix for fixed `N` and order `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct RMatrixBundle {
    pub n: usize,
    pub k: usize,
    pub u_caps: i32,
    pub r_u: SeriesOp<CPoly>,
    pub r_shifted: SeriesOp<CPoly>,
    /// Solved to order `k + 2`.
    pub g: LSeries<CPoly>,
    /// `S(u,C)` to order `k`.
    pub s: SeriesOp<CPoly>,
}

impl RMatrixBundle {
    /// Builds `S(u,C) = h^{-2}(G R(u)R(-u-hC) - I)` with formal `C`.
    pub fn build(n: usize, k: usize) -> Result<Self> {
        Self::build_with_caps(n, k, k as i32 + 3)
    }

    pub fn build_with_caps(n: usize, k: usize, u_caps: i32) -> Result<Self> {
        let kk = k + 2;
        let r_u = build_r(n, kk)?;
        let r_shifted = build_r_shifted(n, kk, u_caps + 2)?;
        let m = r_u.compose(&r_shifted)?;
        let g = solve_g_from(&m, n, kk)?;
        let gm = m.scale(&g);
        let one = HSeries::constant(kk, lconst(CPoly::one()));
        let diff = gm.sub(&TensorOp::identity_with(n, 2, one)?)?;
        let mut s = TensorOp::zero(n, 2)?;
        for ((r, c), v) in diff.entries() {
            let shifted = v.shift_down(2)?.map(|l| drop_below(l, -u_caps));
            s.set(r.clone(), c.clone(), shifted)?;
        }
        Ok(RMatrixBundle { n, k, u_caps, r_u, r_shifted, g, s })
    }

    /// `S(u,c)` with the central parameter evaluated.
    pub fn s_at(&self, c: &Rational) -> SeriesOp<Rational> {
        specialize_op(&self.s, c)
    }

    /// `s_ijkl(u,C)`: coefficient of `e_ij ⊗ e_kl`.
    pub fn entry_s(&self, i: u8, j: u8, k: u8, l: u8) -> Result<LSeries<CPoly>> {
        entry_s(&self.s, i, j, k, l)
    }

    /// `s_ij(u,C) = s_iijj(u,C)`.
    pub fn entry_s_diag(&self, i: u8, j: u8) -> Result<LSeries<CPoly>> {
        entry_s(&self.s, i, i, j, j)
    }

    /// Residuals `tr_1(GRR - I)`, `tr_2(GRR - I)` to order `k`.
    pub fn trace_residuals(&self) -> Result<(SeriesOp<CPoly>, SeriesOp<CPoly>)> {
        let m = self.r_u.compose(&self.r_shifted)?;
        let one = HSeries::constant(self.k + 2, lconst(CPoly::one()));
        let x = m.scale(&self.g).sub(&TensorOp::identity_with(self.n, 2, one)?)?;
        let x = x.map(|e| e.truncate(self.k));
        Ok((x.partial_trace(1)?, x.partial_trace(2)?))
    }
}

/// Entry `s_ijkl` of an arity-2 operator.
pub fn entry_s<T: Coeff>(s: &TensorOp<LSeries<T>>, i: u8, j: u8, k: u8, l: u8) -> Result<LSeries<T>> {
    s.entry(&[i, k], &[j, l])
}

pub fn specialize_op(op: &SeriesOp<CPoly>, c: &Rational) -> SeriesOp<Rational> {
    op.map_into(|e| e.map(|l| l.map_coeffs(|p| p.eval(c))))
}

/// Applies `u -> -u` to every entry.
pub fn reflect<T: Coeff>(op: &TensorOp<LSeries<T>>, var: &str) -> Result<TensorOp<LSeries<T>>> {
    let reg = Region::new(var, &[])?;
    let mut out = TensorOp::zero(op.dim(), op.arity())?;
    for ((r, c), v) in op.entries() {
        let mut coeffs = Vec::new();
        for k in 0..=v.cap().min(v.coeffs().len()) {
            let l = v.coeff(k);
            if l.is_zero() {
                coeffs.push(l);
            } else {
                coeffs.push(substitute_shift(&l, var, &[(var, ri(-1))], &reg, &Caps::default())?);
            }
        }
        out.set(r.clone(), c.clone(), HSeries::new(v.cap(), coeffs))?;
    }
    Ok(out)
}

/// Renames the single Laurent variable of every entry.
pub fn rename_var<T: Coeff>(op: &TensorOp<LSeries<T>>, from: &str, to: &str) -> TensorOp<LSeries<T>> {
    op.map(|e| {
        e.map(|l| {
            let mut out = Laurent::zero_in(&[to]);
            for (ex, c) in l.terms() {
                let x = l.vars().iter().position(|v| v == from).map_or(0, |i| ex[i]);
                out = out.add(&Laurent::monomial(&[to], &[x], c.clone()));
            }
            out
        })
    })
}

/// `T(z) = S(z) - S(-z)`.
pub fn build_t<T: Coeff>(s: &TensorOp<LSeries<T>>) -> Result<TensorOp<LSeries<T>>> {
    let sz = rename_var(s, U, Z);
    sz.sub(&reflect(&sz, Z)?)
}

/// Coefficient of `u^{-1}` summed over the entries (as an `h`-series per entry).
pub fn residue<T: Coeff>(s: &TensorOp<LSeries<T>>) -> Result<TensorOp<HSeries<T>>> {
    let mut out = TensorOp::zero(s.dim(), s.arity())?;
    for ((r, c), v) in s.entries() {
        let res = v.map(|l| l.coeff_at(&[(U, -1)]));
        out.set(r.clone(), c.clone(), res)?;
    }
    Ok(out)
}
