//! Exact checks on the normalizing series and the kernel, as reports.

use crate::error::Result;
use crate::hseries::HSeries;
use crate::laurent::Laurent;
use crate::report::AxiomReport;
use crate::rmatrix::{build_t, entry_s, reflect, residue, solve_g, RMatrixBundle, U, Z};
use crate::scalar::{ri, CPoly, Coeff, Rational};

/// Coefficients of `(h/u)^j`, `j = 0..=k`, in `G`.
pub fn g_coefficients(n: usize, k: usize) -> Result<Vec<CPoly>> {
    let g = solve_g(n, k)?;
    Ok((0..=k).map(|j| g.coeff(j).coeff_at(&[(U, -(j as i32))])).collect())
}

/// The first four coefficients of `G`: `1, 0, (C+N)/N, -C(C+N)/N`.
pub fn g_expected_head(n: usize) -> Vec<CPoly> {
    let nn = Rational::new(1.into(), (n as i64).into());
    vec![
        CPoly::one(),
        CPoly::zero(),
        CPoly::from_coeffs([(0, ri(1)), (1, nn.clone())]),
        CPoly::from_coeffs([(1, ri(-1)), (2, -nn)]),
    ]
}

pub fn check_gseries(n: usize, k: usize) -> Result<AxiomReport> {
    let got = g_coefficients(n, k)?;
    let want = g_expected_head(n);
    for (j, (g, w)) in got.iter().zip(want.iter()).enumerate() {
        if g != w {
            return Ok(AxiomReport::fail("gseries", j + 1, format!("coefficient {j} is {g}, expected {w}"))
                .param("N", n)
                .param("K", k));
        }
    }
    Ok(AxiomReport::pass("gseries", got.len().min(4)).param("N", n).param("K", k))
}

fn named(rep: AxiomReport, b: &RMatrixBundle) -> AxiomReport {
    rep.param("N", b.n).param("K", b.k)
}

/// Both partial traces of `G R(u) R(-u-hC) - I` vanish to order `K`.
pub fn check_trace(b: &RMatrixBundle) -> Result<AxiomReport> {
    let (t1, t2) = b.trace_residuals()?;
    for (leg, t) in [(1, &t1), (2, &t2)] {
        if let Some(((r, c), v)) = t.entries().iter().find(|(_, v)| !v.is_zero()) {
            return Ok(named(
                AxiomReport::fail("trace_normalization", leg, format!("tr_{leg} entry {r:?},{c:?} = {v}")),
                b,
            ));
        }
    }
    Ok(named(AxiomReport::pass("trace_normalization", 2), b))
}

/// Leading term `(C/(N u^2))(I - NP)` and oddness of `T(z) = S(z) - S(-z)`.
pub fn check_leading_term(b: &RMatrixBundle) -> Result<AxiomReport> {
    let n = b.n;
    let pref = Rational::new(1.into(), (n as i64).into());
    let mut checked = 0;
    for i in 1..=n as u8 {
        for j in 1..=n as u8 {
            for k in 1..=n as u8 {
                for l in 1..=n as u8 {
                    checked += 1;
                    let mut pat = ri(0);
                    if i == j && k == l {
                        pat += ri(1);
                    }
                    if i == l && j == k {
                        pat -= ri(n as i64);
                    }
                    let want = Laurent::monomial(&[U], &[-2], CPoly::monomial(&pref * pat, 1));
                    let got = b.entry_s(i, j, k, l)?.coeff(0);
                    if got != want {
                        return Ok(named(
                            AxiomReport::fail("leading_term", checked, format!("h^0 of s_{i}{j}{k}{l} is {got}")),
                            b,
                        ));
                    }
                }
            }
        }
    }
    let t = build_t(&b.s)?;
    let odd = t.add(&reflect(&t, Z)?)?;
    if !odd.is_zero() {
        return Ok(named(AxiomReport::fail("leading_term", checked, "T(z) + T(-z) is nonzero"), b));
    }
    if let Some(((r, c), _)) = t.entries().iter().find(|(_, v)| !v.coeff(0).is_zero()) {
        return Ok(named(
            AxiomReport::fail("leading_term", checked, format!("T entry {r:?},{c:?} has an h^0 part")),
            b,
        ));
    }
    Ok(named(AxiomReport::pass("leading_term", checked + 1), b))
}

/// No `u^-1` term in any entry of `S`.
pub fn check_residue(b: &RMatrixBundle) -> Result<AxiomReport> {
    let res = residue(&b.s)?;
    if let Some(((r, c), v)) = res.entries().iter().find(|(_, v)| !v.is_zero()) {
        return Ok(named(AxiomReport::fail("residue", 1, format!("entry {r:?},{c:?} has residue {v}")), b));
    }
    Ok(named(AxiomReport::pass("residue", b.s.nnz()), b))
}

/// `s_ij = s_ji` and `sum_k s_iikk = 0`.
pub fn check_symmetry(b: &RMatrixBundle) -> Result<AxiomReport> {
    let n = b.n as u8;
    let mut checked = 0;
    for i in 1..=n {
        let mut row: HSeries<Laurent<CPoly>> = HSeries::zero_with_cap(b.k);
        for j in 1..=n {
            checked += 1;
            let sij = entry_s(&b.s, i, i, j, j)?;
            if sij != entry_s(&b.s, j, j, i, i)? {
                return Ok(named(AxiomReport::fail("symmetry", checked, format!("s_{i}{j} != s_{j}{i}")), b));
            }
            row = row.add(&sij);
        }
        if !row.is_zero() {
            return Ok(named(AxiomReport::fail("symmetry", checked, format!("sum_k s_{i}{i}kk = {row}")), b));
        }
    }
    Ok(named(AxiomReport::pass("symmetry", checked), b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_checks_pass() {
        let b = RMatrixBundle::build(3, 4).unwrap();
        assert!(check_trace(&b).unwrap().passed());
        assert!(check_leading_term(&b).unwrap().passed());
        assert!(check_residue(&b).unwrap().passed());
        assert!(check_symmetry(&b).unwrap().passed());
        assert!(check_gseries(3, 3).unwrap().passed());
    }

    #[test]
    fn gseries_at_order_zero() {
        assert_eq!(g_coefficients(3, 0).unwrap(), vec![CPoly::one()]);
    }
}
