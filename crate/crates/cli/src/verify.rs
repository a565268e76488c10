//! Seeded verification suites.
//!
//! Each suite draws its corpus from a fixed schedule: case `i` uses prime
//! `primes[i % primes.len()]`, a size taken from the suite's grid at
//! `i / primes.len()`, and a per-case seed mixed from `--seed` and `i`.
//! Passing `--p` replaces the prime list with that single prime.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use hyperlab::counts::{self, CountConfig, RichMode};
use hyperlab::oracle;
use hyperlab::prelude::*;
use hyperlab::sets::{random_scalars, random_translates};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Suite;

pub const SCHEDULE_PRIMES: [u64; 4] = [61, 101, 499, 1009];

#[derive(Clone, Debug)]
pub struct VerifyParams {
    pub p: Option<PrimeModulus>,
    pub seed: u64,
    pub trials: Option<usize>,
    pub count: CountConfig,
}

impl VerifyParams {
    pub fn seeded(seed: u64) -> Self {
        VerifyParams {
            p: None,
            seed,
            trials: None,
            count: CountConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseResult {
    pub label: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub cases: Vec<CaseResult>,
}

impl SuiteOutcome {
    pub fn violations(&self) -> usize {
        self.cases.iter().filter(|c| !c.ok).count()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (i, c) in self.cases.iter().enumerate() {
            let status = if c.ok { "ok" } else { "VIOLATION" };
            let _ = writeln!(s, "case {i:>4} {status:<9} {}: {}", c.label, c.detail);
        }
        let _ = writeln!(
            s,
            "{}: {} cases, {} violations, {}",
            suite_name(self.suite),
            self.cases.len(),
            self.violations(),
            if self.passed() { "PASS" } else { "FAIL" }
        );
        s
    }
}

pub fn suite_name(suite: Suite) -> &'static str {
    match suite {
        Suite::OracleEquivalence => "oracle-equivalence",
        Suite::AlgebraicIdentities => "algebraic-identities",
        Suite::LemmaT3 => "lemma-t3",
        Suite::LemmaShCartesian => "lemma-sh-cartesian",
        Suite::Borel => "borel",
        Suite::Charsum => "charsum",
        Suite::MinkowskiRotation => "minkowski-rotation",
        Suite::T4Chain => "t4-chain",
        Suite::CrossAlgorithmMk => "cross-algorithm-mk",
    }
}

struct Schedule {
    primes: Vec<PrimeModulus>,
    seed: u64,
}

impl Schedule {
    fn new(params: &VerifyParams, default_primes: &[u64]) -> Self {
        let primes = match params.p {
            Some(p) => vec![p],
            None => default_primes
                .iter()
                .map(|&p| check_prime(p as i128).expect("schedule primes are prime"))
                .collect(),
        };
        Schedule {
            primes,
            seed: params.seed,
        }
    }

    fn prime(&self, i: usize) -> PrimeModulus {
        self.primes[i % self.primes.len()]
    }

    fn size(&self, i: usize, grid: &[usize]) -> usize {
        grid[(i / self.primes.len()) % grid.len()]
    }

    fn seed(&self, i: usize) -> u64 {
        self.seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add((i as u64).wrapping_mul(0xD1B5_4A32_D192_ED03))
            .rotate_left(17)
    }
}

fn case(ok: bool, label: String, detail: String) -> CaseResult {
    CaseResult { label, ok, detail }
}

pub fn run_suite(suite: Suite, params: &VerifyParams) -> Result<SuiteOutcome> {
    let cases = match suite {
        Suite::OracleEquivalence => oracle_equivalence(params)?,
        Suite::AlgebraicIdentities => algebraic_identities(params)?,
        Suite::LemmaT3 => lemma_t3(params)?,
        Suite::LemmaShCartesian => lemma_sh_cartesian(params)?,
        Suite::Borel => borel(params)?,
        Suite::Charsum => charsum(params)?,
        Suite::MinkowskiRotation => minkowski_rotation(params)?,
        Suite::T4Chain => t4_chain(params)?,
        Suite::CrossAlgorithmMk => cross_algorithm_mk(params)?,
    };
    Ok(SuiteOutcome { suite, cases })
}

fn grid(range: std::ops::RangeInclusive<usize>) -> Vec<usize> {
    range.collect()
}

fn oracle_equivalence(params: &VerifyParams) -> Result<Vec<CaseResult>> {
    let sched = Schedule::new(params, &[61, 101]);
    let a_grid = grid(1..=12);
    let h_grid = [1, 2, 3, 4, 6, 8, 11, 14, 17, 20, 24, 28, 32];
    let t3_grid = grid(1..=10);
    let mut out = Vec::new();
    for i in 0..params.trials.unwrap_or(100) {
        let (p, seed) = (sched.prime(i), sched.seed(i));
        let a = random_scalars(p, sched.size(i, &a_grid).min(p.get() as usize), seed)?;
        let h = random_translates(p, sched.size(i, &h_grid), seed ^ 1)?;
        let small = random_translates(p, sched.size(i, &t3_grid), seed ^ 2)?;
        let lambda = Lambda::new(p, if i % 2 == 0 { -1 } else { 1 + (seed % (p.get() - 1)) as i128 })?;
        let pairs = [
            ("sigma", sigma(&a, &h, &lambda) as u128, oracle::sigma_naive(&a, &h, &lambda) as u128),
            ("energy", t_k(&h, 2, &params.count)?, oracle::energy_naive(&h)?),
            ("t3", t_k(&small, 3, &params.count)?, oracle::t3_naive(&small)?),
            ("q", q_rect(&h), oracle::q_naive(&h)?),
        ];
        let ok = pairs.iter().all(|(_, x, y)| x == y);
        let mut detail: Vec<String> = pairs.iter().map(|(n, x, y)| format!("{n} {x}/{y}")).collect();
        if !ok {
            detail.push(format!("A={} H={} H3={}", a.render(), h.render(), small.render()));
        }
        out.push(case(
            ok,
            format!("p={} |A|={} |H|={} |H3|={} λ={}", p.get(), a.len(), h.len(), small.len(), lambda.value()),
            detail.join(" "),
        ));
    }
    Ok(out)
}

fn random_translate(p: PrimeModulus, rng: &mut ChaCha8Rng) -> Translate {
    Translate::new(rng.random_range(0..p.get()), rng.random_range(0..p.get()))
}

fn small_primes() -> Vec<PrimeModulus> {
    (3..=31)
        .filter_map(|n| check_prime(n as i128).ok())
        .collect()
}

fn algebraic_identities(params: &VerifyParams) -> Result<Vec<CaseResult>> {
    let mut primes: Vec<u64> = SCHEDULE_PRIMES.to_vec();
    primes.push(hyperlab::field::MAX_MODULUS);
    let sched = Schedule::new(params, &primes);
    let trials = params.trials.unwrap_or(100_000);
    let mut out = Vec::new();
    // Random closed-form checks, one summary case per prime.
    for (j, &p) in sched.primes.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(sched.seed(j));
        let n = trials / sched.primes.len() + usize::from(j < trials % sched.primes.len());
        let mut bad = None;
        for _ in 0..n {
            let (h1, h2, h3) = (random_translate(p, &mut rng), random_translate(p, &mut rng), random_translate(p, &mut rng));
            let (m1, m2, m3) = (MoebiusMap::embed(p, h1), MoebiusMap::embed(p, h2), MoebiusMap::embed(p, h3));
            let quotient = m1.compose(&m2.invert())?;
            let triple = quotient.compose(&m3)?;
            if MoebiusMap::pair_quotient(p, h1, h2) != quotient || MoebiusMap::triple_product(p, h1, h2, h3) != triple {
                bad = Some(format!("h1={h1:?} h2={h2:?} h3={h3:?}"));
                break;
            }
        }
        out.push(case(
            bad.is_none(),
            format!("p={} closed forms on {n} random triples", p.get()),
            bad.unwrap_or_else(|| "entry-exact".into()),
        ));
    }
    // Exhaustive checks over every translate pair and every point of the projective line.
    let exhaustive: Vec<PrimeModulus> = match params.p {
        Some(p) if p.get() <= 31 => vec![p],
        Some(_) => Vec::new(),
        None => small_primes(),
    };
    for p in exhaustive {
        let n = p.get();
        let maps: Vec<MoebiusMap> = (0..n)
            .flat_map(|a| (0..n).map(move |b| Translate::new(a, b)))
            .map(|t| MoebiusMap::embed(p, t))
            .collect();
        let unit_det = maps.iter().all(|m| m.det().value() == 1);
        let points: Vec<ProjectiveValue> = (0..n)
            .map(ProjectiveValue::Finite)
            .chain([ProjectiveValue::Infinity])
            .collect();
        let mut bad = None;
        'outer: for f in &maps {
            let images: Vec<ProjectiveValue> = points.iter().map(|&x| f.evaluate(x)).collect();
            for g in &maps {
                let gf = g.compose(f)?;
                for (&x, &fx) in points.iter().zip(&images) {
                    if gf.evaluate(x) != g.evaluate(fx) {
                        bad = Some(format!("f={f} g={g} x={x}"));
                        break 'outer;
                    }
                }
            }
        }
        out.push(case(
            unit_det && bad.is_none(),
            format!("p={n} exhaustive: det = 1 and action homomorphism over {} pairs", maps.len().pow(2)),
            bad.unwrap_or_else(|| format!("unit determinant: {unit_det}")),
        ));
    }
    Ok(out)
}

/// The random-plus-Cartesian corpus shared by the T₃ and Borel suites.
fn t3_corpus(params: &VerifyParams) -> Result<Vec<(String, TranslateSet)>> {
    let sched = Schedule::new(params, &[101, 499]);
    let h_grid = grid(1..=24);
    let b_grid = grid(1..=5);
    let trials = params.trials.unwrap_or(200);
    let mut corpus = Vec::new();
    for i in 0..trials {
        let p = sched.prime(i);
        let h = random_translates(p, sched.size(i, &h_grid), sched.seed(i))?;
        corpus.push((format!("p={} random |H|={}", p.get(), h.len()), h));
    }
    for i in 0..trials.div_ceil(4) {
        let p = sched.prime(i);
        let b = random_scalars(p, sched.size(i, &b_grid), sched.seed(i) ^ 0xB)?;
        let h = TranslateSet::cartesian(&b, &b)?;
        corpus.push((format!("p={} cartesian |B|={}", p.get(), b.len()), h));
    }
    Ok(corpus)
}

fn lemma_t3(params: &VerifyParams) -> Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    for (label, h) in t3_corpus(params)? {
        let t3 = t_k(&h, 3, &params.count)?;
        let bound = hyperlab::bounds::t3_exact_bound(h.len() as u64, q_rect(&h));
        let mut detail = format!("T3={t3} 2|H|Q+2|H|^4={bound}");
        if t3 > bound {
            detail.push_str(&format!(" H={}", h.render()));
        }
        out.push(case(t3 <= bound, label, detail));
    }
    Ok(out)
}

fn borel(params: &VerifyParams) -> Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    for (label, h) in t3_corpus(params)? {
        let n = h.len() as u128;
        let mass = borel_coset_mass(&h);
        let yb = borel_t3_mass(&h, &params.count)?;
        let e = energy(&h);
        let ok = mass.max_non_borel <= n * n && yb <= n.pow(4) && mass.total() == e;
        let mut detail = format!(
            "X_B={} |H|^2={} Y_B={} |H|^4={} coset total={} E={}",
            mass.max_non_borel,
            n * n,
            yb,
            n.pow(4),
            mass.total(),
            e
        );
        if !ok {
            detail.push_str(&format!(" H={}", h.render()));
        }
        out.push(case(ok, label, detail));
    }
    Ok(out)
}

fn lemma_sh_cartesian(params: &VerifyParams) -> Result<Vec<CaseResult>> {
    let sched = Schedule::new(params, &SCHEDULE_PRIMES);
    let b_grid = grid(1..=8);
    let mut out = Vec::new();
    for i in 0..params.trials.unwrap_or(100) {
        let p = sched.prime(i);
        let b = random_scalars(p, sched.size(i, &b_grid), sched.seed(i))?;
        let h = TranslateSet::cartesian(&b, &b)?;
        let n = b.len() as u128;
        let e = energy(&h);
        let e_bound = n * n * additive_energy(&b);
        let t3 = t_k(&h, 3, &params.count)?;
        let t3_bound = n * n * product_rep_energy(&b) + n.pow(8);
        let ok = e <= e_bound && t3 <= t3_bound;
        let mut detail = format!("E={e} |B|^2E+={e_bound} T3={t3} |B|^2R+|B|^8={t3_bound}");
        if !ok {
            detail.push_str(&format!(" B={}", b.render()));
        }
        out.push(case(ok, format!("p={} |B|={}", p.get(), b.len()), detail));
    }
    Ok(out)
}

fn charsum(params: &VerifyParams) -> Result<Vec<CaseResult>> {
    let sched = Schedule::new(params, &[101, 499, 1009]);
    let h_grid = [1, 2, 5, 10, 30, 100, 300];
    let mut out = Vec::new();
    for i in 0..params.trials.unwrap_or(200) {
        let (p, seed) = (sched.prime(i), sched.seed(i));
        let q = p.get() as usize;
        let a_grid = [1, 2, 3, 10, 30, q / 4, q / 2, q - 1];
        let a_size = a_grid[i % a_grid.len()];
        let a = random_scalars(p, a_size, seed)?;
        let h = random_translates(p, sched.size(i, &h_grid), seed ^ 7)?;
        let s = sigma(&a, &h, &Lambda::standard(p));
        let bound = hyperlab::bounds::eval_charsum(a.len() as u64, h.len() as u64, p.get());
        let ok = (s as f64) <= bound;
        let mut detail = format!("sigma={s} bound={bound:.6}");
        if !ok {
            detail.push_str(&format!(" A={} H={}", a.render(), h.render()));
        }
        out.push(case(ok, format!("p={} |A|={} |H|={}", p.get(), a.len(), h.len()), detail));
    }
    Ok(out)
}

fn minkowski_rotation(params: &VerifyParams) -> Result<Vec<CaseResult>> {
    let sched = Schedule::new(params, &[101, 499]);
    let a_grid = grid(1..=10);
    let mut out = Vec::new();
    for i in 0..params.trials.unwrap_or(50) {
        let (p, seed) = (sched.prime(i), sched.seed(i));
        let a = random_scalars(p, sched.size(i, &a_grid), seed)?;
        let lambda = Lambda::new(p, 1 + (seed % (p.get() - 1)) as i128)?;
        let m = minkowski_realisations(&a, &lambda);
        let rotated = counts::minkowski_rotated_incidences(&a, &lambda);
        let rect = counts::minkowski_rectangle_incidences(&a, &lambda);
        let mut detail = format!("realisations={m} rotated={rotated} rectangle={rect}");
        if m != rotated {
            detail.push_str(&format!(" A={}", a.render()));
        }
        out.push(case(m == rotated, format!("p={} |A|={} λ={}", p.get(), a.len(), lambda.value()), detail));
    }
    Ok(out)
}

fn t4_chain(params: &VerifyParams) -> Result<Vec<CaseResult>> {
    let sched = Schedule::new(params, &SCHEDULE_PRIMES);
    let h_grid = grid(1..=16);
    let mut out = Vec::new();
    for i in 0..params.trials.unwrap_or(50) {
        let p = sched.prime(i);
        let h = random_translates(p, sched.size(i, &h_grid), sched.seed(i))?;
        let n = h.len() as u128;
        let t4 = t_k(&h, 4, &params.count)?;
        let t3 = t_k(&h, 3, &params.count)?;
        let ok = t4 <= n * n * t3;
        let mut detail = format!("T4={t4} |H|^2T3={}", n * n * t3);
        if !ok {
            detail.push_str(&format!(" H={}", h.render()));
        }
        out.push(case(ok, format!("p={} |H|={}", p.get(), h.len()), detail));
    }
    Ok(out)
}

fn cross_algorithm_mk(params: &VerifyParams) -> Result<Vec<CaseResult>> {
    if let Some(p) = params.p {
        if p.get() > oracle::MK_MAX_P {
            bail!("cross-algorithm-mk scans all p² translates and needs p ≤ {}", oracle::MK_MAX_P);
        }
    }
    let sched = Schedule::new(params, &[61]);
    let a_grid = grid(2..=8);
    let mut out = Vec::new();
    for i in 0..params.trials.unwrap_or(20) {
        let (p, seed) = (sched.prime(i), sched.seed(i));
        let a = random_scalars(p, sched.size(i, &a_grid).min(p.get() as usize), seed)?;
        let lambda = Lambda::new(p, if i % 2 == 0 { -1 } else { 1 + (seed % (p.get() - 1)) as i128 })?;
        let pairs = counts::richness_profile(&a, &lambda, RichMode::Pairs, None, &params.count)?;
        let dense = counts::richness_profile(&a, &lambda, RichMode::Exhaustive, None, &params.count)?;
        let mut ok = true;
        let mut detail = Vec::new();
        for k in 2..=a.len() {
            let naive = oracle::mk_exhaustive(&a, k, &lambda)?;
            let (x, y) = (pairs.m_k(k), dense.m_k(k));
            ok &= x == naive && y == naive;
            detail.push(format!("m{k}={x}/{y}/{naive}"));
        }
        if !ok {
            detail.push(format!("A={}", a.render()));
        }
        out.push(case(ok, format!("p={} |A|={} λ={}", p.get(), a.len(), lambda.value()), detail.join(" ")));
    }
    Ok(out)
}
