//! Acceptance suite: one line per criterion, with its runtime and limit.
//! Runs without the libtest harness so that the lines show in `cargo test`.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qheis_cli::config::{ClassCaps, RunConfig};
use qheis_cli::suites::{Session, Suite};
use qheis_core::checks::{check_leading_term, check_residue, check_symmetry, g_coefficients};
use qheis_core::fock::Generator;
use qheis_core::rmatrix::{build_t, RMatrixBundle, U};
use qheis_core::vertex::y_map;
use qheis_core::{rat, ri, AxiomReport, CPoly, Coeff, Kernel, Laurent, Monomial, Rational, State};

type Outcome = Result<String, String>;

/// 1/D = sum phi_k t^k with D = 1 + Ct - ((N+C)/N) t², t = h/u.
fn phi(n: i64, k: usize) -> Vec<CPoly> {
    let c = CPoly::c();
    let a = CPoly::from_coeffs([(0, ri(1)), (1, rat(1, n))]);
    let mut out = vec![CPoly::one(), c.neg_ref()];
    for j in 2..=k {
        let next = c.neg_ref().mul_ref(&out[j - 1]).add_ref(&a.mul_ref(&out[j - 2]));
        out.push(next);
    }
    out.truncate(k + 1);
    out
}

/// G = (1 + Ct)/D.
fn oracle_g(n: i64, k: usize) -> Vec<CPoly> {
    let p = phi(n, k);
    (0..=k).map(|j| if j == 0 { p[0].clone() } else { p[j].add_ref(&CPoly::c().mul_ref(&p[j - 1])) }).collect()
}

/// Coefficient of h^k u^{-2-k} in s_ijkl: (C/N)(δ_ij δ_kl - N δ_il δ_jk) phi_k.
fn oracle_s(n: i64, k: usize, i: u8, j: u8, kk: u8, l: u8) -> Vec<CPoly> {
    let mut pattern = ri(0);
    if i == j && kk == l {
        pattern += ri(1);
    }
    if i == l && j == kk {
        pattern -= ri(n);
    }
    let pref = CPoly::monomial(rat(1, n), 1).mul_ref(&CPoly::constant(pattern));
    phi(n, k).into_iter().map(|p| p.mul_ref(&pref)).collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_pass(reps: &[AxiomReport]) -> Result<usize, String> {
    for r in reps {
        if !r.passed() {
            return Err(format!("{} {:?}: {}", r.axiom, r.params, r.witness.clone().unwrap_or_default()));
        }
    }
    Ok(reps.iter().map(|r| r.checked).sum())
}

fn session(n: usize, c: Option<Rational>, k: usize, samples: Option<usize>, seed: u64) -> Session {
    Session::new(RunConfig { n, c, k, samples, seed, ..RunConfig::default() }).unwrap()
}

fn g_series() -> Outcome {
    for n in 2..=4i64 {
        let got = g_coefficients(n as usize, 3).map_err(|e| e.to_string())?;
        let a = CPoly::from_coeffs([(0, ri(1)), (1, rat(1, n))]);
        let want = [CPoly::one(), CPoly::zero(), a.clone(), CPoly::c().mul_ref(&a).neg_ref()];
        ensure(got == want, || format!("N={n}: got {got:?}"))?;
        let deep = g_coefficients(n as usize, 8).map_err(|e| e.to_string())?;
        ensure(deep == oracle_g(n, 8), || format!("N={n}: order 8 differs from closed form"))?;
    }
    Ok("N=2,3,4; first four exact, closed form to order 8".into())
}

fn trace_normalization() -> Outcome {
    for n in 2..=4 {
        let b = RMatrixBundle::build(n, 12).map_err(|e| e.to_string())?;
        let (t1, t2) = b.trace_residuals().map_err(|e| e.to_string())?;
        ensure(t1.is_zero() && t2.is_zero(), || format!("N={n}: partial trace nonzero"))?;
    }
    Ok("K=12, N=2,3,4, both partial traces".into())
}

fn kernel_shape() -> Outcome {
    let mut checked = 0;
    for n in 2..=4 {
        let b = RMatrixBundle::build(n, 8).map_err(|e| e.to_string())?;
        let reps = vec![
            check_leading_term(&b).map_err(|e| e.to_string())?,
            check_residue(&b).map_err(|e| e.to_string())?,
            check_symmetry(&b).map_err(|e| e.to_string())?,
        ];
        checked += all_pass(&reps)?;
        // independently: only odd powers of z survive in T, and none at h^0
        let t = build_t(&b.s).map_err(|e| e.to_string())?;
        for v in t.entries().values() {
            ensure(v.coeff(0).is_zero(), || format!("N={n}: T has an h^0 part"))?;
            for (_, l) in v.iter() {
                ensure(l.terms().keys().all(|e| e[0] % 2 != 0), || format!("N={n}: even power of z in T"))?;
            }
        }
    }
    Ok(format!("K=8, N=2,3,4, {checked} cases"))
}

fn oracle_equivalence() -> Outcome {
    let mut coeffs = 0;
    for n in 2..=4i64 {
        let b = RMatrixBundle::build(n as usize, 8).map_err(|e| e.to_string())?;
        for i in 1..=n as u8 {
            for j in 1..=n as u8 {
                for kk in 1..=n as u8 {
                    for l in 1..=n as u8 {
                        let got = b.entry_s(i, j, kk, l).map_err(|e| e.to_string())?;
                        for (ord, w) in oracle_s(n, 8, i, j, kk, l).into_iter().enumerate() {
                            let want = Laurent::monomial(&[U], &[-2 - ord as i32], w);
                            ensure(got.coeff(ord) == want, || format!("N={n} s_{i}{j}{kk}{l} at h^{ord}"))?;
                            coeffs += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("K=8, N=2,3,4, {coeffs} coefficients"))
}

fn levels() -> [Rational; 3] {
    [ri(1), ri(-2), rat(1, 2)]
}

fn field_relations() -> Outcome {
    let mut checked = 0;
    for n in [2, 3] {
        for c in levels() {
            let s = session(n, Some(c), 4, Some(50), 1);
            checked += all_pass(&s.run(Suite::Commutation).map_err(|e| e.to_string())?)?;
        }
    }
    Ok(format!("50 states per (N, c), {checked} cases"))
}

/// Number of monomials of weight `w` in `g` generator colours per depth:
/// the coefficient of q^w in prod_d (1 - q^d)^(-g).
fn monomial_count(g: usize, w: usize) -> usize {
    let mut poly = vec![0usize; w + 1];
    poly[0] = 1;
    for d in 1..=w {
        for _ in 0..g {
            for e in d..=w {
                poly[e] += poly[e - d];
            }
        }
    }
    poly[w]
}

fn tuple_count(g: usize, parts: usize, max: usize) -> usize {
    if parts == 0 {
        return 1;
    }
    (0..=max).map(|w| monomial_count(g, w) * tuple_count(g, parts - 1, max - w)).sum()
}

fn braiding_axioms() -> Outcome {
    let mut counts = Vec::new();
    let mut want = Vec::new();
    for n in [2, 3] {
        let s = session(n, Some(rat(1, 2)), 4, None, 0);
        for suite in [Suite::Ybe, Suite::Unitarity, Suite::Shift] {
            let reps = s.run(suite).map_err(|e| e.to_string())?;
            counts.push(all_pass(&reps)?);
        }
        let g = n * n - 1;
        want.extend([tuple_count(g, 3, 3), tuple_count(g, 2, 3), tuple_count(g, 2, 3)]);
    }
    // every pair and triple of total weight <= 3 was seen
    ensure(counts == want, || format!("case counts {counts:?}, expected {want:?}"))?;
    Ok(format!("all pairs and triples of degree <= 3, counts {counts:?}"))
}

/// Exponents found for the 20 seeded samples at seed 0, c = 1, K = 4,
/// window 2, compared modulo h^3.
const PINNED: [(usize, &str, [u32; 20]); 4] = [
    (2, "weak_assoc", [0, 0, 0, 0, 4, 5, 0, 4, 4, 0, 0, 0, 0, 0, 0, 0, 4, 0, 0, 0]),
    (2, "locality", [0, 0, 0, 0, 0, 5, 0, 4, 0, 4, 0, 5, 4, 0, 0, 4, 4, 0, 0, 0]),
    (3, "weak_assoc", [0, 0, 0, 0, 0, 0, 5, 0, 0, 0, 0, 0, 0, 0, 0, 0, 5, 0, 0, 0]),
    (3, "locality", [0, 5, 5, 0, 0, 0, 0, 0, 0, 0, 4, 4, 0, 0, 0, 0, 5, 0, 0, 0]),
];

fn qva_axioms() -> Outcome {
    for (n, axiom, want) in PINNED {
        let s = session(n, Some(ri(1)), 4, Some(20), 0);
        let suite = if axiom == "weak_assoc" { Suite::Assoc } else { Suite::Locality };
        let reps = s.run(suite).map_err(|e| e.to_string())?;
        all_pass(&reps)?;
        ensure(reps.iter().all(|r| r.checked > 0), || format!("N={n} {axiom}: empty comparison"))?;
        let got: Vec<u32> = reps.iter().map(|r| r.exponent.unwrap_or(u32::MAX)).collect();
        ensure(got == want, || format!("N={n} {axiom}: exponents {got:?}, pinned {want:?}"))?;
        let bound = s.scan_bound();
        ensure(got.iter().all(|&e| e <= bound), || format!("exponent beyond scan bound {bound}"))?;
    }
    Ok("20 samples, degree <= 2, n_target 3; exponents match the pinned values".into())
}

fn classical_limit() -> Outcome {
    let mut checked = 0;
    for n in [2usize, 3] {
        for c in levels() {
            let s = session(n, Some(c.clone()), 2, None, 0);
            checked += all_pass(&s.run(Suite::Classical).map_err(|e| e.to_string())?)?;
            // double pole of Y(x11(-1), z) x11(-1) at h^0 is c <a1, a1> = c (1 - 1/N)
            let ker = Kernel::build(n, 2, &c).map_err(|e| e.to_string())?;
            let x = Monomial::new(vec![Generator::new(1, 1, 1)]);
            let y = y_map(&ker, &x, &State::from_gens(vec![Generator::new(1, 1, 1)]), 0, None)
                .map_err(|e| e.to_string())?;
            let pole = y.get(&-2).and_then(|st| st.terms().get(&Monomial::one()).map(|q| q.coeff(0)));
            let want = &c * (ri(1) - rat(1, n as i64));
            ensure(pole == Some(want.clone()), || format!("N={n} c={c}: pole {pole:?}, want {want}"))?;
        }
    }
    Ok(format!("diagonal states of degree <= 3, {checked} cases"))
}

fn pbw() -> Outcome {
    let mut checked = 0;
    for n in [2, 3] {
        let s = session(n, None, 4, Some(500), 3);
        checked += all_pass(&s.run(Suite::Pbw).map_err(|e| e.to_string())?)?;
    }
    Ok(format!("500 words of length <= 5, brackets for |r|,|s| <= 4, {checked} words"))
}

fn modules() -> Outcome {
    let mut checked = 0;
    for n in [2, 3] {
        for c in levels() {
            let s = session(n, Some(c), 4, Some(20), 2);
            checked += all_pass(&s.run(Suite::Module).map_err(|e| e.to_string())?)?;
            checked += all_pass(&s.run(Suite::Roundtrip).map_err(|e| e.to_string())?)?;
        }
    }
    Ok(format!("relations, zero mode, h^0 annihilation, roundtrip; {checked} cases"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str, jobs: &str| -> Result<Vec<u8>, String> {
        let p = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_qheis"))
            .args(["verify", "commutation", "ybe", "assoc", "locality", "pbw", "module", "roundtrip"])
            .args(["--N", "2", "--c", "1/2", "--K", "3", "--samples", "8", "--seed", "11", "--jobs", jobs])
            .arg("--json")
            .arg(&p)
            .env_remove("QHEIS_CACHE_DIR")
            .output()
            .map_err(|e| e.to_string())?
            .status;
        ensure(status.success(), || format!("run exited with {status}"))?;
        std::fs::read(&p).map_err(|e| e.to_string())
    };
    let a = run("a.json", "2")?;
    let b = run("b.json", "2")?;
    ensure(a == b, || "reports differ".into())?;
    // in-process reports agree with each other as well
    let mk = || {
        let mut cfg = RunConfig { n: 3, c: Some(ri(-2)), k: 3, samples: Some(5), seed: 4, ..RunConfig::default() };
        cfg.caps = ClassCaps::parse("degree=2").unwrap();
        let s = Session::new(cfg).unwrap();
        qheis_cli::commands::verify(&s, &[Suite::Commutation, Suite::Assoc], false).unwrap().to_json()
    };
    ensure(mk() == mk(), || "in-process reports differ".into())?;
    Ok(format!("two runs, {} identical bytes", a.len()))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("G-series", Duration::from_secs(1), g_series),
        ("trace normalization", Duration::from_secs(5), trace_normalization),
        ("kernel shape", Duration::from_secs(5), kernel_shape),
        ("oracle equivalence", Duration::from_secs(60), oracle_equivalence),
        ("field relations", Duration::from_secs(30), field_relations),
        ("braiding axioms", Duration::from_secs(120), braiding_axioms),
        ("QVA axioms", Duration::from_secs(120), qva_axioms),
        ("classical limit", Duration::from_secs(30), classical_limit),
        ("PBW", Duration::from_secs(60), pbw),
        ("modules", Duration::from_secs(60), modules),
        ("determinism", Duration::from_secs(60), determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let ms = took.as_millis();
        let line = match out {
            Ok(detail) if took <= limit => {
                format!("PASS criterion {:>2} {name}: {detail} ({ms} ms, limit {} ms)", i + 1, limit.as_millis())
            }
            Ok(detail) => format!(
                "FAIL criterion {:>2} {name}: over time, {detail} ({ms} ms, limit {} ms)",
                i + 1,
                limit.as_millis()
            ),
            Err(why) => format!("FAIL criterion {:>2} {name}: {why} ({ms} ms)", i + 1),
        };
        if line.starts_with("FAIL") {
            failed += 1;
        }
        println!("{line}");
    }
    println!("acceptance: {} of 11 criteria pass", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
