//! Verification suites. Samples are drawn sequentially from the seeded
//! generator, then checked on the pool; results are read back in sample
//! order, so the report does not depend on `--jobs`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use qheis_core::braiding::{shift_witness, unitarity_witness, yang_baxter_witness, Braider};
use qheis_core::checks;
use qheis_core::fock::{commutator_witness, trace_field_witness};
use qheis_core::heis::HeisAlgebra;
use qheis_core::heis_module::{random_state, verify_linear_independence, HeisModule, ZeroModeCharacter};
use qheis_core::rmatrix::RMatrixBundle;
use qheis_core::sample::{all_monomials, monomial, rng, state};
use qheis_core::vertex::{s_locality_exponent, verify_classical_limit, weak_assoc_exponent, SearchWindow};
use qheis_core::{AxiomReport, Kernel, Monomial, Rational, State};
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use crate::cache::{BundleKey, Cache};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    #[value(name = "tr34")]
    TraceNormalization,
    #[value(name = "esform")]
    LeadingTerm,
    Residue,
    Symmetry,
    Commutation,
    Ybe,
    Unitarity,
    Shift,
    Assoc,
    Locality,
    Classical,
    Pbw,
    Module,
    Roundtrip,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Suite::TraceNormalization,
        Suite::LeadingTerm,
        Suite::Residue,
        Suite::Symmetry,
        Suite::Commutation,
        Suite::Ybe,
        Suite::Unitarity,
        Suite::Shift,
        Suite::Assoc,
        Suite::Locality,
        Suite::Classical,
        Suite::Pbw,
        Suite::Module,
        Suite::Roundtrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::TraceNormalization => "tr34",
            Suite::LeadingTerm => "esform",
            Suite::Residue => "residue",
            Suite::Symmetry => "symmetry",
            Suite::Commutation => "commutation",
            Suite::Ybe => "ybe",
            Suite::Unitarity => "unitarity",
            Suite::Shift => "shift",
            Suite::Assoc => "assoc",
            Suite::Locality => "locality",
            Suite::Classical => "classical",
            Suite::Pbw => "pbw",
            Suite::Module => "module",
            Suite::Roundtrip => "roundtrip",
        }
    }

    pub fn parse(s: &str) -> CliResult<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| CliError::Usage(format!("unknown suite {s:?}")))
    }
}

/// Order of `h` to which the exponent searches compare.
pub const ORDER_TARGET: usize = 3;

/// Shared state of one run: configuration, pool, cache and built bundles.
pub struct Session {
    pub cfg: RunConfig,
    cache: Option<Cache>,
    pool: rayon::ThreadPool,
    bundles: Mutex<HashMap<(usize, usize), Arc<RMatrixBundle>>>,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl Session {
    pub fn new(cfg: RunConfig) -> CliResult<Self> {
        cfg.validate()?;
        let cache = Cache::from_flag_or_env(cfg.cache_dir.as_deref());
        let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build()?;
        Ok(Session {
            cfg,
            cache,
            pool,
            bundles: Mutex::default(),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
        })
    }

    pub fn cache_stats(&self) -> (usize, usize) {
        (self.hits.load(Ordering::Relaxed), self.misses.load(Ordering::Relaxed))
    }

    /// The bundle at order `K`, from memory, the cache, or built.
    pub fn bundle(&self) -> CliResult<Arc<RMatrixBundle>> {
        let (n, k) = (self.cfg.n, self.cfg.k);
        if let Some(b) = self.bundles.lock().unwrap().get(&(n, k)) {
            return Ok(b.clone());
        }
        let b = match &self.cache {
            Some(cache) => {
                let (b, hit) = cache.load_or_build(&BundleKey::new(n, k), || RMatrixBundle::build(n, k))?;
                if hit {
                    self.hits.fetch_add(1, Ordering::Relaxed);
                } else {
                    self.misses.fetch_add(1, Ordering::Relaxed);
                }
                b
            }
            None => RMatrixBundle::build(n, k)?,
        };
        let b = Arc::new(b);
        self.bundles.lock().unwrap().insert((n, k), b.clone());
        Ok(b)
    }

    fn kernel(&self, suite: Suite) -> CliResult<Kernel> {
        let c = self.cfg.level(suite.name())?;
        Ok(Kernel::new(&*self.bundle()?, &c)?)
    }

    /// Runs `check` on every case in parallel; the first failure in case
    /// order wins, and so does the first error.
    fn run_cases<T, F>(&self, axiom: &str, cases: &[T], check: F) -> CliResult<AxiomReport>
    where
        T: Sync,
        F: Fn(&T) -> qheis_core::Result<Option<String>> + Sync,
    {
        let out: Vec<_> = self.pool.install(|| cases.par_iter().map(&check).collect());
        for (i, r) in out.into_iter().enumerate() {
            if let Some(w) = r? {
                return Ok(AxiomReport::fail(axiom, i + 1, w));
            }
        }
        Ok(AxiomReport::pass(axiom, cases.len()))
    }

    fn params(&self, rep: AxiomReport, c: Option<&Rational>) -> AxiomReport {
        let rep = rep.param("N", self.cfg.n).param("K", self.cfg.k);
        match c {
            Some(c) => rep.param("c", c),
            None => rep,
        }
    }

    pub fn run(&self, suite: Suite) -> CliResult<Vec<AxiomReport>> {
        match suite {
            Suite::TraceNormalization => Ok(vec![checks::check_trace(&*self.bundle()?)?]),
            Suite::LeadingTerm => Ok(vec![checks::check_leading_term(&*self.bundle()?)?]),
            Suite::Residue => Ok(vec![checks::check_residue(&*self.bundle()?)?]),
            Suite::Symmetry => Ok(vec![checks::check_symmetry(&*self.bundle()?)?]),
            Suite::Commutation => self.commutation(),
            Suite::Ybe | Suite::Unitarity | Suite::Shift => self.braiding(suite),
            Suite::Assoc | Suite::Locality => self.exponents(suite),
            Suite::Classical => {
                let ker = self.kernel(suite)?;
                let deg = self.cfg.caps.degree.unwrap_or(3);
                let z = self.cfg.caps.z.unwrap_or(3);
                let rep = verify_classical_limit(&ker, deg, z)?.param("K", self.cfg.k).param("degree", deg);
                Ok(vec![rep])
            }
            Suite::Pbw => self.pbw(),
            Suite::Module | Suite::Roundtrip => self.module(suite),
        }
    }

    fn commutation(&self) -> CliResult<Vec<AxiomReport>> {
        let ker = self.kernel(Suite::Commutation)?;
        let n = self.cfg.n;
        let deg = self.cfg.caps.degree.unwrap_or(3);
        let cap = self.cfg.caps.z.unwrap_or(2);
        let samples = self.cfg.samples.unwrap_or(50);
        let mut r = rng(self.cfg.seed);
        let nn = n as u8;
        let states: Vec<State> = (0..samples).map(|_| state(&mut r, n, deg, 3, false)).collect();
        // every ordered pair of fields on every state
        let mut cases = Vec::new();
        for w in &states {
            for a in 1..=nn {
                for b in 1..=nn {
                    for c in 1..=nn {
                        for d in 1..=nn {
                            cases.push((w, (a, b), (c, d)));
                        }
                    }
                }
            }
        }
        let com = self.run_cases("commutator", &cases, |(w, ab, cd)| {
            Ok(commutator_witness(&ker, *ab, *cd, w, cap)?
                .map(|(vars, e)| format!("x{}{}(u1) x{}{}(u2) on {w} at {vars:?}^{e:?}", ab.0, ab.1, cd.0, cd.1)))
        })?;
        let tr = self.run_cases("trace_field", &states, |w| {
            Ok(trace_field_witness(&ker, w, cap)?.map(|(vars, e)| format!("sum_i x_ii(u) on {w} at {vars:?}^{e:?}")))
        })?;
        let c = ker.level().clone();
        Ok(vec![
            self.params(com, Some(&c)).param("degree", deg).param("seed", self.cfg.seed),
            self.params(tr, Some(&c)).param("degree", deg).param("seed", self.cfg.seed),
        ])
    }

    /// Draws `samples` of `items` without replacement, in their original order;
    /// all of them when no sample count is set.
    fn subsample<T: Clone>(&self, items: Vec<T>) -> Vec<T> {
        match self.cfg.samples {
            Some(s) if s < items.len() => {
                let mut r = rng(self.cfg.seed);
                let mut idx = index::sample(&mut r, items.len(), s).into_vec();
                idx.sort_unstable();
                idx.into_iter().map(|i| items[i].clone()).collect()
            }
            _ => items,
        }
    }

    fn braiding(&self, suite: Suite) -> CliResult<Vec<AxiomReport>> {
        let ker = self.kernel(suite)?;
        let br = Braider::new(&ker);
        let deg = self.cfg.caps.degree.unwrap_or(3);
        let z_cap = self.cfg.caps.z.unwrap_or(3);
        let by_weight: Vec<Vec<Monomial>> = (0..=deg).map(|w| all_monomials(self.cfg.n, w, false)).collect();
        let mut pairs = Vec::new();
        let mut triples = Vec::new();
        for w1 in 0..=deg as usize {
            for w2 in 0..=deg as usize - w1 {
                for a in &by_weight[w1] {
                    for b in &by_weight[w2] {
                        pairs.push([a.clone(), b.clone()]);
                        for c in by_weight.iter().take(deg as usize - w1 - w2 + 1).flatten() {
                            triples.push([a.clone(), b.clone(), c.clone()]);
                        }
                    }
                }
            }
        }
        let rep = match suite {
            Suite::Ybe => {
                let cases = self.subsample(triples);
                self.run_cases("yang_baxter", &cases, |[a, b, c]| yang_baxter_witness(&br, [a, b, c], z_cap))?
                    .param("z_cap", z_cap)
            }
            Suite::Unitarity => {
                let cases = self.subsample(pairs);
                self.run_cases("unitarity", &cases, |[a, b]| unitarity_witness(&br, [a, b]))?
            }
            _ => {
                let cases = self.subsample(pairs);
                self.run_cases("shift", &cases, |[a, b]| shift_witness(&br, [a, b]))?
            }
        };
        Ok(vec![self.params(rep, Some(ker.level())).param("degree", deg)])
    }

    /// The seeded `(u, v, w)` samples of the exponent searches.
    pub fn exponent_samples(&self) -> Vec<(Monomial, Monomial, State)> {
        let n = self.cfg.n;
        let deg = self.cfg.caps.degree.unwrap_or(2);
        let mut r = rng(self.cfg.seed);
        (0..self.cfg.samples.unwrap_or(20))
            .map(|_| {
                let wu = r.gen_range(1..=deg);
                let u = monomial(&mut r, n, wu, false);
                let wv = r.gen_range(1..=deg);
                let v = monomial(&mut r, n, wv, false);
                let w = state(&mut r, n, deg, 2, false);
                (u, v, w)
            })
            .collect()
    }

    /// Largest exponent tried; no effective bound is known, so the default
    /// grows with the weights involved and with `K`.
    pub fn scan_bound(&self) -> u32 {
        let deg = self.cfg.caps.degree.unwrap_or(2);
        self.cfg.caps.scan.unwrap_or(4 * deg + self.cfg.k as u32)
    }

    fn exponents(&self, suite: Suite) -> CliResult<Vec<AxiomReport>> {
        let ker = self.kernel(suite)?;
        let br = Braider::new(&ker);
        let window = self.cfg.caps.window.unwrap_or(2);
        let win = SearchWindow { a: window, b: window, max_exponent: self.scan_bound(), order_target: ORDER_TARGET };
        let samples = self.exponent_samples();
        let axiom = if suite == Suite::Assoc { "weak_assoc" } else { "locality" };
        let found: Vec<_> = self.pool.install(|| {
            samples
                .par_iter()
                .map(|(u, v, w)| match suite {
                    Suite::Assoc => weak_assoc_exponent(&ker, u, v, w, win, None),
                    _ => s_locality_exponent(&br, u, v, w, win),
                })
                .collect()
        });
        let mut out = Vec::new();
        for (i, (res, (u, v, w))) in found.into_iter().zip(samples.iter()).enumerate() {
            let res = res?;
            let rep = match res.exponent {
                Some(e) => AxiomReport::pass(axiom, res.compared).with_exponent(e),
                None => AxiomReport::fail(
                    axiom,
                    res.compared,
                    format!("no exponent up to {}; mismatch at {:?}", win.max_exponent, res.mismatch),
                ),
            };
            out.push(
                self.params(rep, Some(ker.level()))
                    .param("sample", i)
                    .param("u", u)
                    .param("v", v)
                    .param("w", w)
                    .param("window", window)
                    .param("order", ORDER_TARGET),
            );
        }
        Ok(out)
    }

    fn pbw(&self) -> CliResult<Vec<AxiomReport>> {
        let bundle = self.bundle()?;
        let samples = self.cfg.samples.unwrap_or(500);
        let seed = self.cfg.seed;
        let algebras = [HeisAlgebra::new(bundle.clone(), false), HeisAlgebra::new(bundle, true)];
        let out: Vec<_> =
            self.pool.install(|| algebras.par_iter().map(|a| a.verify_pbw(samples, 5, seed, 4)).collect());
        out.into_iter().map(|r| Ok(r?)).collect()
    }

    fn module(&self, suite: Suite) -> CliResult<Vec<AxiomReport>> {
        let ker = Arc::new(self.kernel(suite)?);
        let n = self.cfg.n;
        let c = ker.level().clone();
        let alg = Arc::new(HeisAlgebra::new(self.bundle()?, false));
        let mut r = rng(self.cfg.seed);
        let character = ZeroModeCharacter::random(&mut r, n, self.cfg.k);
        let module = HeisModule::new(ker, alg, character)?;
        let deg = self.cfg.caps.degree.unwrap_or(3);
        let bound = self.cfg.caps.window.unwrap_or(3);
        let states: Vec<State> = (0..self.cfg.samples.unwrap_or(20)).map(|_| random_state(&mut r, n, deg, 3)).collect();
        let tag = |rep: AxiomReport| self.params(rep, Some(&c)).param("degree", deg).param("bound", bound);
        if suite == Suite::Roundtrip {
            let rt = self.run_cases("roundtrip", &states, |w| module.roundtrip_witness(w, bound))?;
            return Ok(vec![tag(rt)]);
        }
        let rel = self.run_cases("relations", &states, |w| module.relations_witness(w, bound))?;
        let zero = self.run_cases("zero_mode", &states, |w| {
            for i in 1..=n as u8 {
                let want = w.scale(&module.character().values()[i as usize - 1]);
                if module.act_mode(i, 0, w)? != want {
                    return Ok(Some(format!("y{i}(0) on {w}")));
                }
            }
            Ok(None)
        })?;
        let ann =
            self.run_cases("classical_annihilation", &states, |w| module.classical_annihilation_witness(w, bound))?;
        let (len, level) = if n == 2 { (2, 2) } else { (2, 1) };
        let li = verify_linear_independence(&module, len, level)?;
        Ok(vec![tag(rel), tag(zero), tag(ann), li.param("K", self.cfg.k)])
    }
}
