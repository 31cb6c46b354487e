use std::time::Instant;

use qheis_core::checks::{g_coefficients, g_expected_head};
use qheis_core::codec::{rational_string, Canonical};
use qheis_core::heis::{parse_word, HeisAlgebra, Word};
use qheis_core::{AxiomReport, HSeries};

use crate::error::CliResult;
use crate::report::{CacheStats, GCoefficient, NormalForm, NormalTerm, Report, SuiteTiming, Timing};
use crate::suites::{Session, Suite};

/// Exit status of a finished report.
pub fn exit_code(report: &Report) -> i32 {
    if report.passed {
        0
    } else {
        2
    }
}

fn finish(session: &Session, mut report: Report, start: Instant, suites: Vec<SuiteTiming>, timing: bool) -> Report {
    if timing {
        report.timing = Some(Timing { total_ms: start.elapsed().as_millis() as u64, suites });
        let (hits, misses) = session.cache_stats();
        report.cache = Some(CacheStats { hits, misses });
    }
    report
}

/// Coefficients of `G` to order `K`, checked against the known first four.
pub fn gseries(session: &Session, timing: bool) -> CliResult<Report> {
    let start = Instant::now();
    let cfg = &session.cfg;
    let mut report = Report::new("gseries", Vec::new(), cfg.echo());
    let got = g_coefficients(cfg.n, cfg.k)?;
    let want = g_expected_head(cfg.n);
    let mut rep = AxiomReport::pass("gseries", got.len().min(want.len()));
    for (j, (g, w)) in got.iter().zip(want.iter()).enumerate() {
        if g != w {
            rep = AxiomReport::fail("gseries", j + 1, format!("coefficient of (h/u)^{j} is {g}, expected {w}"));
            break;
        }
    }
    report.push(rep.param("N", cfg.n).param("K", cfg.k));
    report.coefficients = Some(
        got.iter()
            .enumerate()
            .map(|(j, p)| GCoefficient {
                h: j,
                u: -(j as i32),
                value: p.terms().map(|(e, q)| (e, rational_string(q))).collect(),
                text: p.to_string(),
            })
            .collect(),
    );
    Ok(finish(session, report, start, Vec::new(), timing))
}

pub fn verify(session: &Session, suites: &[Suite], timing: bool) -> CliResult<Report> {
    let start = Instant::now();
    let names = suites.iter().map(|s| s.name().to_string()).collect();
    let mut report = Report::new("verify", names, session.cfg.echo());
    let mut times = Vec::new();
    for &s in suites {
        let t = Instant::now();
        for rep in session.run(s)? {
            report.push(rep);
        }
        times.push(SuiteTiming { suite: s.name().into(), ms: t.elapsed().as_millis() as u64 });
    }
    Ok(finish(session, report, start, times, timing))
}

/// Normal form of a word in the formal algebra.
pub fn pbw_reduce(session: &Session, word: &str, timing: bool) -> CliResult<Report> {
    let start = Instant::now();
    let cfg = &session.cfg;
    let mut report = Report::new("pbw-reduce", vec![word.to_string()], cfg.echo());
    let factors = parse_word(word, cfg.n)?;
    let alg = HeisAlgebra::new(session.bundle()?, false);
    let w = Word { factors, coeff: HSeries::one_with_cap(cfg.k) };
    let red = alg.pbw_reduce(&w)?;
    let rep = if red.is_ordered() {
        AxiomReport::pass("pbw_reduce", 1)
    } else {
        AxiomReport::fail("pbw_reduce", 1, format!("result {red} is not ordered"))
    };
    report.push(rep.param("N", cfg.n).param("K", cfg.k));
    report.normal_form = Some(NormalForm {
        text: red.to_string(),
        terms: red
            .terms()
            .iter()
            .map(|(m, c)| NormalTerm { modes: m.iter().map(|x| x.to_string()).collect(), coeff: c.to_value() })
            .collect(),
    });
    Ok(finish(session, report, start, Vec::new(), timing))
}
