//! Exact counting kernels.
//!
//! Every quantity here is an integer count computed exactly. Energy-type
//! quantities key their counting tables by the SL₂ entries of the product
//! matrix unless a [`KeyMode::Projective`] variant is requested.
//!
//! Enumerations that can be large (T₃, T₄, rich hyperbolae) are sharded over
//! `CountConfig::workers` threads by index range; partial tables are merged
//! by integer addition, so results do not depend on the worker count.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;
use std::ops::Range;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::moebius::{Lambda, MoebiusMap, ProjectiveValue, Translate};
use crate::sets::{ScalarSet, TranslateSet};

/// Approximate bytes per counting-table entry, used to turn a memory cap into an entry cap.
const BYTES_PER_ENTRY: u128 = 64;

/// Associative table `key → multiplicity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountHistogram<K: Hash + Eq> {
    table: HashMap<K, u64>,
}

impl<K: Hash + Eq> Default for CountHistogram<K> {
    fn default() -> Self {
        CountHistogram {
            table: HashMap::new(),
        }
    }
}

impl<K: Hash + Eq> CountHistogram<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        CountHistogram {
            table: HashMap::with_capacity(n),
        }
    }

    #[inline]
    pub fn add(&mut self, key: K, n: u64) {
        *self.table.entry(key).or_insert(0) += n;
    }

    pub fn get(&self, key: &K) -> u64 {
        self.table.get(key).copied().unwrap_or(0)
    }

    /// Number of distinct keys.
    pub fn support(&self) -> usize {
        self.table.len()
    }

    pub fn total_mass(&self) -> u128 {
        self.table.values().map(|&v| v as u128).sum()
    }

    /// `Σ_x r(x)²`.
    pub fn sum_of_squares(&self) -> u128 {
        self.table.values().map(|&v| (v as u128) * (v as u128)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, u64)> {
        self.table.iter().map(|(k, &v)| (k, v))
    }

    pub fn merge(&mut self, other: CountHistogram<K>) {
        if self.table.is_empty() {
            self.table = other.table;
            return;
        }
        for (k, v) in other.table {
            self.add(k, v);
        }
    }
}

impl<K: Hash + Eq + Ord + Clone> CountHistogram<K> {
    /// Entries in key order.
    pub fn sorted(&self) -> Vec<(K, u64)> {
        let mut v: Vec<(K, u64)> = self.table.iter().map(|(k, &n)| (k.clone(), n)).collect();
        v.sort_unstable_by(|x, y| x.0.cmp(&y.0));
        v
    }
}

/// Limits that keep desk-scale runs bounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest |H| accepted by the |H|³ enumeration behind T₃.
    pub max_t3_translates: usize,
    /// Largest support of the quotient histogram accepted by the T₄ convolution.
    pub max_t4_support: usize,
    /// Largest p² accepted by the dense exhaustive rich-hyperbola table.
    pub max_dense_cells: u128,
    /// Optional cap on counting-table entries (derived from a memory cap).
    pub max_table_entries: Option<u128>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_t3_translates: 512,
            max_t4_support: 2048,
            max_dense_cells: 1 << 26,
            max_table_entries: None,
        }
    }
}

impl Budget {
    /// Caps table memory at `mb` megabytes.
    pub fn with_table_mb(mut self, mb: u64) -> Self {
        self.max_table_entries = Some((mb as u128) * (1 << 20) / BYTES_PER_ENTRY);
        self
    }

    fn check(&self, what: &'static str, required: u128, limit: u128) -> Result<()> {
        if required > limit {
            return Err(Error::ResourceLimit {
                what,
                required,
                limit,
            });
        }
        Ok(())
    }

    fn check_entries(&self, what: &'static str, entries: u128) -> Result<()> {
        match self.max_table_entries {
            Some(limit) => self.check(what, entries, limit),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountConfig {
    pub workers: usize,
    pub budget: Budget,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            workers: 1,
            budget: Budget::default(),
        }
    }
}

impl CountConfig {
    pub fn with_workers(workers: usize) -> Self {
        CountConfig {
            workers: workers.max(1),
            ..Default::default()
        }
    }
}

/// Runs `f` over `workers` contiguous shards of `0..len`, returning results in shard order.
fn sharded<T, F>(len: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync,
{
    let workers = workers.max(1).min(len.max(1));
    if workers == 1 {
        return vec![f(0..len)];
    }
    let chunk = len.div_ceil(workers);
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let range = (w * chunk).min(len)..((w + 1) * chunk).min(len);
                let f = &f;
                s.spawn(move || f(range))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("counting worker panicked"))
            .collect()
    })
}

fn merge_all<K: Hash + Eq>(parts: Vec<CountHistogram<K>>) -> CountHistogram<K> {
    let mut it = parts.into_iter();
    let mut acc = it.next().unwrap_or_default();
    for part in it {
        acc.merge(part);
    }
    acc
}

fn same_field(x: PrimeModulus, y: PrimeModulus) -> Result<()> {
    if x != y {
        return Err(Error::ModulusMismatch {
            left: x.get(),
            right: y.get(),
        });
    }
    Ok(())
}

/// σ(A, H): pairs `(h, x) ∈ H × A` with `h(x) ∈ A`; poles never count.
pub fn sigma(a: &ScalarSet, h: &TranslateSet, lambda: &Lambda) -> u64 {
    sigma_rect(a, a, h, lambda)
}

/// Pairs `(h, x)` with `x ∈ domain` and `h(x) ∈ range`: incidences with `domain × range`.
pub fn sigma_rect(domain: &ScalarSet, range: &ScalarSet, h: &TranslateSet, lambda: &Lambda) -> u64 {
    let member = range.membership();
    let mut count = 0;
    for &t in h.elements() {
        for &x in domain.elements() {
            if let Some(y) = lambda.apply(t, x) {
                if member.contains(y) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Incidences between an arbitrary point set and the curves of `H`.
pub fn sigma_points(points: &[(u64, u64)], h: &TranslateSet, lambda: &Lambda) -> u64 {
    let mut count = 0;
    for &t in h.elements() {
        for &(x, y) in points {
            if lambda.incident(t, x, y) {
                count += 1;
            }
        }
    }
    count
}

/// Which equality the energy tables use for their keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KeyMode {
    /// Entry equality of SL₂ matrices.
    #[default]
    Sl2,
    /// Equality up to scalars (the projective action).
    Projective,
}

impl KeyMode {
    #[inline]
    fn key(self, m: MoebiusMap) -> MoebiusMap {
        match self {
            KeyMode::Sl2 => m,
            KeyMode::Projective => m.canonicalize(),
        }
    }
}

/// `r_{HH⁻¹}(u)` over all |H|² ordered pairs.
pub fn quotient_histogram(h: &TranslateSet) -> CountHistogram<MoebiusMap> {
    quotient_histogram_with(h, KeyMode::Sl2)
}

pub fn quotient_histogram_with(h: &TranslateSet, mode: KeyMode) -> CountHistogram<MoebiusMap> {
    let p = h.modulus();
    let e = h.elements();
    let mut hist = CountHistogram::with_capacity(e.len() * e.len());
    for &h1 in e {
        for &h2 in e {
            hist.add(mode.key(MoebiusMap::pair_quotient(p, h1, h2)), 1);
        }
    }
    hist
}

/// `r_{HH⁻¹H}(x)` by direct enumeration of the |H|³ triple products.
pub fn triple_histogram(h: &TranslateSet, cfg: &CountConfig) -> Result<CountHistogram<MoebiusMap>> {
    triple_histogram_with(h, KeyMode::Sl2, cfg)
}

pub fn triple_histogram_with(
    h: &TranslateSet,
    mode: KeyMode,
    cfg: &CountConfig,
) -> Result<CountHistogram<MoebiusMap>> {
    let n = h.len();
    cfg.budget
        .check("t3 enumeration (|H|)", n as u128, cfg.budget.max_t3_translates as u128)?;
    cfg.budget.check_entries("t3 table", (n as u128).pow(3))?;
    let p = h.modulus();
    let e = h.elements();
    let parts = sharded(n, cfg.workers, |range| {
        let mut hist = CountHistogram::with_capacity(range.len() * n * n);
        for &h1 in &e[range] {
            for &h2 in e {
                for &h3 in e {
                    hist.add(mode.key(MoebiusMap::triple_product(p, h1, h2, h3)), 1);
                }
            }
        }
        hist
    });
    Ok(merge_all(parts))
}

/// `r_{HH⁻¹HH⁻¹}` as the self-convolution of the quotient histogram.
pub fn quadruple_histogram_with(
    h: &TranslateSet,
    mode: KeyMode,
    cfg: &CountConfig,
) -> Result<CountHistogram<MoebiusMap>> {
    let quotient = quotient_histogram_with(h, mode).sorted();
    let s = quotient.len();
    cfg.budget
        .check("t4 convolution (support)", s as u128, cfg.budget.max_t4_support as u128)?;
    cfg.budget.check_entries("t4 table", (s as u128) * (s as u128))?;
    let parts = sharded(s, cfg.workers, |range| {
        let mut hist = CountHistogram::new();
        for (u, ru) in &quotient[range] {
            for (v, rv) in &quotient {
                hist.add(mode.key(u.mul_unchecked(v)), ru * rv);
            }
        }
        hist
    });
    Ok(merge_all(parts))
}

/// T_k(H) for k ∈ {2, 3, 4}: `Σ_x r²(x)` over alternating products of length k.
pub fn t_k(h: &TranslateSet, k: usize, cfg: &CountConfig) -> Result<u128> {
    t_k_with(h, k, KeyMode::Sl2, cfg)
}

pub fn t_k_with(h: &TranslateSet, k: usize, mode: KeyMode, cfg: &CountConfig) -> Result<u128> {
    match k {
        2 => Ok(quotient_histogram_with(h, mode).sum_of_squares()),
        3 => Ok(triple_histogram_with(h, mode, cfg)?.sum_of_squares()),
        4 => Ok(quadruple_histogram_with(h, mode, cfg)?.sum_of_squares()),
        _ => Err(Error::InvalidArgument(format!("t_k needs k in {{2,3,4}}, got {k}"))),
    }
}

/// E(H) = T₂(H).
pub fn energy(h: &TranslateSet) -> u128 {
    quotient_histogram(h).sum_of_squares()
}

/// `D(h, h') = (a - a')(b - b')` over ordered pairs.
pub fn d_histogram(h: &TranslateSet) -> CountHistogram<u64> {
    let p = h.modulus();
    let e = h.elements();
    let mut hist = CountHistogram::new();
    for &x in e {
        for &y in e {
            hist.add(p.mul(p.sub(x.a, y.a), p.sub(x.b, y.b)), 1);
        }
    }
    hist
}

/// Q(H): rectangular quadruples, `D(h₁, h₁') = D(h₂, h₂')`.
pub fn q_rect(h: &TranslateSet) -> u128 {
    d_histogram(h).sum_of_squares()
}

/// Ordered pairs `(q, q') ∈ (A×A)²` with `(x - x')² - (y - y')² = λ`.
pub fn minkowski_realisations(a: &ScalarSet, lambda: &Lambda) -> u64 {
    let p = a.modulus();
    let e = a.elements();
    let mut squares: CountHistogram<u64> = CountHistogram::new();
    for &x in e {
        for &y in e {
            let d = p.sub(x, y);
            squares.add(p.mul(d, d), 1);
        }
    }
    // dy² = dx² - λ
    squares
        .iter()
        .map(|(&u, r)| r * squares.get(&p.sub(u, lambda.value())))
        .sum()
}

/// The translates `H_c` through the rotated points `(x' + y', x' - y')`, stored as
/// `(a, b) = (x' - y', x' + y')` so their curves are `(X - s')(Y - d') = λ`.
pub fn minkowski_translates(a: &ScalarSet) -> TranslateSet {
    let p = a.modulus();
    let e = a.elements();
    TranslateSet::from_translates(
        p,
        e.iter()
            .flat_map(|&x| e.iter().map(move |&y| Translate::new(p.sub(x, y), p.add(x, y)))),
    )
}

/// Points `(x + y, x - y)` for `(x, y) ∈ A × A`.
pub fn rotated_points(a: &ScalarSet) -> Vec<(u64, u64)> {
    let p = a.modulus();
    let e = a.elements();
    e.iter()
        .flat_map(|&x| e.iter().map(move |&y| (p.add(x, y), p.sub(x, y))))
        .collect()
}

/// Incidences between `(A+A) × (A-A)` and `H_c`; an upper bound for the Minkowski count.
pub fn minkowski_rectangle_incidences(a: &ScalarSet, lambda: &Lambda) -> u64 {
    sigma_rect(&a.sumset(a), &a.diffset(a), &minkowski_translates(a), lambda)
}

/// Incidences between the rotated image of `A × A` and `H_c`; equals the Minkowski count.
pub fn minkowski_rotated_incidences(a: &ScalarSet, lambda: &Lambda) -> u64 {
    sigma_points(&rotated_points(a), &minkowski_translates(a), lambda)
}

/// How candidate k-rich translates are found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RichMode {
    /// Solve for the (at most two) translates through each pair of points of `A × A`.
    Pairs,
    /// Accumulate incidences into a dense table over all p² translates.
    Exhaustive,
}

/// Number of curves carrying at least `k` points, with optional witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RichCount<W> {
    pub k: usize,
    pub count: u64,
    pub witnesses: Option<Vec<W>>,
}

/// `richness → number of translates with exactly that richness`, for richness ≥ 2.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RichProfile {
    pub by_richness: BTreeMap<usize, u64>,
    /// Translates of richness ≥ 2, sorted.
    pub rich: Vec<(Translate, usize)>,
}

impl RichProfile {
    /// m_k: translates with at least `k` points.
    pub fn m_k(&self, k: usize) -> u64 {
        self.by_richness.range(k..).map(|(_, &n)| n).sum()
    }

    pub fn at_least(&self, k: usize) -> RichCount<Translate> {
        let witnesses: Vec<Translate> =
            self.rich.iter().filter(|(_, r)| *r >= k).map(|(t, _)| *t).collect();
        RichCount {
            k,
            count: witnesses.len() as u64,
            witnesses: Some(witnesses),
        }
    }
}

/// Points of `A × A` on the curve of `t`.
pub fn richness(a: &ScalarSet, t: Translate, lambda: &Lambda) -> usize {
    let member = a.membership();
    richness_with(a, &member, t, lambda)
}

fn richness_with(
    a: &ScalarSet,
    member: &crate::sets::Membership,
    t: Translate,
    lambda: &Lambda,
) -> usize {
    a.elements()
        .iter()
        .filter(|&&x| lambda.apply(t, x).is_some_and(|y| member.contains(y)))
        .count()
}

/// Richness of every translate with at least two points of `A × A`.
///
/// With `restrict`, only translates of that set are considered.
pub fn richness_profile(
    a: &ScalarSet,
    lambda: &Lambda,
    mode: RichMode,
    restrict: Option<&TranslateSet>,
    cfg: &CountConfig,
) -> Result<RichProfile> {
    if let Some(h) = restrict {
        same_field(a.modulus(), h.modulus())?;
    }
    let rich = match mode {
        RichMode::Pairs => pairs_richness(a, lambda, cfg),
        RichMode::Exhaustive => dense_richness(a, lambda, cfg)?,
    };
    let mut profile = RichProfile::default();
    for (t, r) in rich {
        if restrict.is_some_and(|h| !h.contains(t)) {
            continue;
        }
        *profile.by_richness.entry(r).or_insert(0) += 1;
        profile.rich.push((t, r));
    }
    Ok(profile)
}

/// m_k together with its witnesses.
pub fn rich_hyperbolae(
    a: &ScalarSet,
    k: usize,
    lambda: &Lambda,
    mode: RichMode,
    cfg: &CountConfig,
) -> Result<RichCount<Translate>> {
    if k < 2 {
        return Err(Error::InvalidArgument(
            "k-rich hyperbolae need k ≥ 2 (one point does not pin a translate)".into(),
        ));
    }
    Ok(richness_profile(a, lambda, mode, None, cfg)?.at_least(k))
}

fn pairs_richness(a: &ScalarSet, lambda: &Lambda, cfg: &CountConfig) -> Vec<(Translate, usize)> {
    let p = a.modulus();
    let lam = lambda.value();
    let e = a.elements();
    let points: Vec<(u64, u64)> = e.iter().flat_map(|&x| e.iter().map(move |&y| (x, y))).collect();
    // A translate through r points of A × A is found once per pair of them.
    let parts = sharded(points.len(), cfg.workers, |range| {
        let mut found: HashMap<Translate, u64> = HashMap::new();
        for i in range {
            let (x1, y1) = points[i];
            for &(x2, y2) in &points[i + 1..] {
                if x1 == x2 || y1 == y2 {
                    continue;
                }
                // With u = x1 - b: u² + dx·u + λ·dx/dy = 0.
                let dx = p.sub(x2, x1);
                let dy = p.sub(y2, y1);
                let c = p.mul(lam, p.div(dx, dy).expect("dy ≠ 0"));
                let disc = p.sub(p.mul(dx, dx), p.mul(4 % p.get(), c));
                let Some(r) = p.sqrt(disc) else { continue };
                let roots = if r == 0 { &[r][..] } else { &[r, p.neg(r)][..] };
                for &root in roots {
                    let u = p.mul(p.sub(root, dx), p.half());
                    let b = p.sub(x1, u);
                    let a = p.sub(y1, p.mul(lam, p.inv(u).expect("u ≠ 0")));
                    let t = Translate::new(a, b);
                    debug_assert!(lambda.incident(t, x1, y1) && lambda.incident(t, x2, y2));
                    *found.entry(t).or_insert(0) += 1;
                }
            }
        }
        found
    });
    let mut pairs: BTreeMap<Translate, u64> = BTreeMap::new();
    for part in parts {
        for (t, n) in part {
            *pairs.entry(t).or_insert(0) += n;
        }
    }
    pairs
        .into_iter()
        .map(|(t, n)| (t, points_from_pairs(n) as usize))
        .collect()
}

fn dense_richness(
    a: &ScalarSet,
    lambda: &Lambda,
    cfg: &CountConfig,
) -> Result<Vec<(Translate, usize)>> {
    let p = a.modulus();
    let q = p.get() as usize;
    cfg.budget
        .check("dense translate table (p²)", (q as u128).pow(2), cfg.budget.max_dense_cells)?;
    let lam = lambda.value();
    // λ / d for every nonzero d.
    let mut lam_over = vec![0u64; q];
    for (d, slot) in lam_over.iter_mut().enumerate().skip(1) {
        *slot = p.mul(lam, p.inv(d as u64).expect("nonzero"));
    }
    let e = a.elements();
    // Row b of the table holds the counts of translates (a, b) for every a.
    let parts = sharded(q, cfg.workers, |rows| {
        let mut table = vec![0u32; rows.len() * q];
        for (r, b) in rows.clone().enumerate() {
            let row = &mut table[r * q..(r + 1) * q];
            for &x in e {
                let d = p.sub(x, b as u64);
                if d == 0 {
                    continue;
                }
                for &y in e {
                    row[p.sub(y, lam_over[d as usize]) as usize] += 1;
                }
            }
        }
        let mut rich = Vec::new();
        for (r, b) in rows.enumerate() {
            for (av, &count) in table[r * q..(r + 1) * q].iter().enumerate() {
                if count >= 2 {
                    rich.push((Translate::new(av as u64, b as u64), count as usize));
                }
            }
        }
        rich
    });
    let mut rich: Vec<(Translate, usize)> = parts.into_iter().flatten().collect();
    rich.sort_unstable();
    Ok(rich)
}

/// An affine line of F_p².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Line {
    /// `x = c`.
    Vertical(u64),
    /// `y = slope·x + intercept`.
    Sloped { slope: u64, intercept: u64 },
}

impl Line {
    pub fn is_axis_parallel(&self) -> bool {
        matches!(self, Line::Vertical(_) | Line::Sloped { slope: 0, .. })
    }
}

/// l_k: lines with at least `k` points of `B × C`, by bucketing point pairs by line.
///
/// With `include_axis_parallel = false`, horizontal and vertical lines are skipped.
pub fn rich_lines(
    b: &ScalarSet,
    c: &ScalarSet,
    k: usize,
    include_axis_parallel: bool,
) -> Result<RichCount<Line>> {
    same_field(b.modulus(), c.modulus())?;
    if k < 2 {
        return Err(Error::InvalidArgument("k-rich lines need k ≥ 2".into()));
    }
    let p = b.modulus();
    let points: Vec<(u64, u64)> = b
        .elements()
        .iter()
        .flat_map(|&x| c.elements().iter().map(move |&y| (x, y)))
        .collect();
    let mut pairs: CountHistogram<Line> = CountHistogram::new();
    for (i, &(x1, y1)) in points.iter().enumerate() {
        for &(x2, y2) in &points[i + 1..] {
            let line = if x1 == x2 {
                Line::Vertical(x1)
            } else {
                let slope = p.div(p.sub(y2, y1), p.sub(x2, x1)).expect("x1 ≠ x2");
                Line::Sloped {
                    slope,
                    intercept: p.sub(y1, p.mul(slope, x1)),
                }
            };
            pairs.add(line, 1);
        }
    }
    let mut witnesses: Vec<Line> = pairs
        .iter()
        .filter(|(line, _)| include_axis_parallel || !line.is_axis_parallel())
        .filter(|&(_, n_pairs)| points_from_pairs(n_pairs) >= k as u64)
        .map(|(line, _)| *line)
        .collect();
    witnesses.sort_unstable();
    Ok(RichCount {
        k,
        count: witnesses.len() as u64,
        witnesses: Some(witnesses),
    })
}

// Inverts n(n-1)/2 = pairs.
fn points_from_pairs(pairs: u64) -> u64 {
    let mut n = ((1.0 + (1.0 + 8.0 * pairs as f64).sqrt()) / 2.0).round() as u64;
    while n * (n.saturating_sub(1)) / 2 > pairs {
        n -= 1;
    }
    while (n + 1) * n / 2 <= pairs {
        n += 1;
    }
    debug_assert_eq!(n * (n - 1) / 2, pairs);
    n
}

/// `r_{B-B}`.
pub fn difference_histogram(b: &ScalarSet) -> CountHistogram<u64> {
    let p = b.modulus();
    let mut hist = CountHistogram::new();
    for &x in b.elements() {
        for &y in b.elements() {
            hist.add(p.sub(x, y), 1);
        }
    }
    hist
}

/// E₊(B) = `Σ_x r²_{B-B}(x)`.
pub fn additive_energy(b: &ScalarSet) -> u128 {
    difference_histogram(b).sum_of_squares()
}

/// `r_{(B-B)(B-B)}`, weighting each product `d₁d₂` by `r_{B-B}(d₁)·r_{B-B}(d₂)`.
pub fn product_rep_histogram(b: &ScalarSet) -> CountHistogram<u64> {
    let p = b.modulus();
    let diffs = difference_histogram(b).sorted();
    let mut hist = CountHistogram::new();
    for &(d1, r1) in &diffs {
        for &(d2, r2) in &diffs {
            hist.add(p.mul(d1, d2), r1 * r2);
        }
    }
    hist
}

pub fn product_rep_energy(b: &ScalarSet) -> u128 {
    product_rep_histogram(b).sum_of_squares()
}

/// The four sum-product equations, in their usual order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumProductVariant {
    /// `(a₁ + a₂)(a₃ + a₄) = 1`
    SumTimesSum,
    /// `(a₁ + a₂ - a₄)(a₃ + a₂ + a₄) = 1`
    ShiftedSums,
    /// `(a₁ + a₂)(a₃ + a₂a₄) = 1`
    SumTimesAffine,
    /// `(a₁ + a₂ + a₄)(a₃ + a₂a₄) = 1`
    TripleSumTimesAffine,
}

impl SumProductVariant {
    pub const ALL: [SumProductVariant; 4] = [
        SumProductVariant::SumTimesSum,
        SumProductVariant::ShiftedSums,
        SumProductVariant::SumTimesAffine,
        SumProductVariant::TripleSumTimesAffine,
    ];

    /// 1-based index in the listed order.
    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL
            .get(i.wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("sum-product variant {i} not in 1..=4")))
    }
}

/// Solutions in A⁴ of the chosen sum-product equation.
pub fn sumprod_quadruples(a: &ScalarSet, variant: SumProductVariant) -> u64 {
    let p = a.modulus();
    let e = a.elements();
    let member = a.membership();
    match variant {
        SumProductVariant::SumTimesSum => {
            let mut sums: CountHistogram<u64> = CountHistogram::new();
            for &x in e {
                for &y in e {
                    sums.add(p.add(x, y), 1);
                }
            }
            sums.iter()
                .filter(|(&s, _)| s != 0)
                .map(|(&s, r)| r * sums.get(&p.inv(s).expect("nonzero")))
                .sum()
        }
        _ => {
            // For each (a₂, a₄), a₁ fixes the left factor L and then a₃ = L⁻¹ - shift.
            let mut count = 0;
            for &a2 in e {
                for &a4 in e {
                    let (left_shift, right_shift) = match variant {
                        SumProductVariant::ShiftedSums => (p.sub(a2, a4), p.add(a2, a4)),
                        SumProductVariant::SumTimesAffine => (a2, p.mul(a2, a4)),
                        SumProductVariant::TripleSumTimesAffine => (p.add(a2, a4), p.mul(a2, a4)),
                        SumProductVariant::SumTimesSum => unreachable!(),
                    };
                    for &a1 in e {
                        let left = p.add(a1, left_shift);
                        if left == 0 {
                            continue;
                        }
                        let a3 = p.sub(p.inv(left).expect("nonzero"), right_shift);
                        if member.contains(a3) {
                            count += 1;
                        }
                    }
                }
            }
            count
        }
    }
}

/// `r²_{HH⁻¹}` mass bucketed by left cosets of the Borel subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorelCosetMass {
    /// Coset label `g(∞)` → `Σ_{x ∈ gB} r²(x)`; label ∞ is B itself.
    pub per_coset: BTreeMap<ProjectiveValue, u128>,
    /// Largest mass over the non-Borel cosets (finite labels), 0 if there are none.
    pub max_non_borel: u128,
}

impl BorelCosetMass {
    pub fn borel(&self) -> u128 {
        self.per_coset
            .get(&ProjectiveValue::Infinity)
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self) -> u128 {
        self.per_coset.values().sum()
    }
}

pub fn borel_coset_mass(h: &TranslateSet) -> BorelCosetMass {
    let mut per_coset = BTreeMap::new();
    for (x, r) in quotient_histogram(h).iter() {
        *per_coset.entry(x.coset_label()).or_insert(0) += (r as u128) * (r as u128);
    }
    let max_non_borel = per_coset
        .iter()
        .filter(|(label, _)| **label != ProjectiveValue::Infinity)
        .map(|(_, &m)| m)
        .max()
        .unwrap_or(0);
    BorelCosetMass {
        per_coset,
        max_non_borel,
    }
}

/// T₃ split into its Borel-supported part `Y_B` and the rest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct T3Split {
    pub total: u128,
    pub borel: u128,
    pub non_borel: u128,
}

pub fn t3_split(h: &TranslateSet, cfg: &CountConfig) -> Result<T3Split> {
    let hist = triple_histogram(h, cfg)?;
    let (mut borel, mut non_borel) = (0u128, 0u128);
    for (x, r) in hist.iter() {
        let sq = (r as u128) * (r as u128);
        if x.is_borel() {
            borel += sq;
        } else {
            non_borel += sq;
        }
    }
    Ok(T3Split {
        total: borel + non_borel,
        borel,
        non_borel,
    })
}

/// `Y_B = Σ_{x ∈ B} r²_{HH⁻¹H}(x)`.
pub fn borel_t3_mass(h: &TranslateSet, cfg: &CountConfig) -> Result<u128> {
    Ok(t3_split(h, cfg)?.borel)
}

/// The two coordinate systems that govern `E(H)`, counted directly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnergySystems {
    pub energy: u128,
    /// `a₁ = a₁'`, `b₁ - b₂ = b₁' - b₂'`, `a₂ = a₂'`.
    pub n1: u128,
    /// `b₁ = b₁'`, `a₁ - a₂ = a₁' - a₂'`, `b₂ = b₂'`.
    pub n2: u128,
    /// Solutions of the first system with `b₁ = b₂` (and so `b₁' = b₂'`).
    pub n1_unipotent: u128,
    /// Quadruples with `b₁ = b₂`, `b₁' = b₂'`, `a₁ - a₂ = a₁' - a₂'` (the `w₁ = 0` branch).
    pub unipotent: u128,
}

impl EnergySystems {
    /// `E(H)` reassembled from the systems: off-unipotent part of N₁ plus the unipotent branch.
    pub fn reassembled(&self) -> u128 {
        self.n1 - self.n1_unipotent + self.unipotent
    }
}

pub fn energy_systems(h: &TranslateSet) -> EnergySystems {
    let p = h.modulus();
    let mut rows: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut cols: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for t in h.elements() {
        rows.entry(t.a).or_default().push(t.b);
        cols.entry(t.b).or_default().push(t.a);
    }
    // Σ over ordered pairs of lines of the difference energy between them.
    let cross = |lines: &BTreeMap<u64, Vec<u64>>| -> (u128, u128) {
        let (mut total, mut zero) = (0u128, 0u128);
        for l1 in lines.values() {
            for l2 in lines.values() {
                let mut diffs: CountHistogram<u64> = CountHistogram::new();
                for &x in l1 {
                    for &y in l2 {
                        diffs.add(p.sub(x, y), 1);
                    }
                }
                total += diffs.sum_of_squares();
                let z = diffs.get(&0) as u128;
                zero += z * z;
            }
        }
        (total, zero)
    };
    let (n1, n1_unipotent) = cross(&rows);
    let (n2, _) = cross(&cols);
    let mut within: CountHistogram<u64> = CountHistogram::new();
    for col in cols.values() {
        for &x in col {
            for &y in col {
                within.add(p.sub(x, y), 1);
            }
        }
    }
    EnergySystems {
        energy: energy(h),
        n1,
        n2,
        n1_unipotent,
        unipotent: within.sum_of_squares(),
    }
}

/// The first Cauchy–Schwarz step on σ(A, H) and the pigeonhole split behind it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsChainReport {
    pub sigma: u64,
    /// σ².
    pub lhs_sq: u128,
    /// `|A| · Σ_u r_{HH⁻¹}(u) σ_u(A)` with `σ_u(A) = #{a ∈ A : u(a) ∈ A}`.
    pub rhs_cs: u128,
    /// Δ = σ² / (3|A||H|²); zero for empty inputs.
    pub delta: Ratio<u128>,
    /// |Ω| where Ω = {u : σ_u(A) ≥ Δ}.
    pub omega_size: usize,
    /// Share of `Σ_u r(u) σ_u(A)` carried by Ω; zero when that sum is zero.
    pub omega_incidence_share: Ratio<u128>,
}

impl CsChainReport {
    pub fn cauchy_schwarz_holds(&self) -> bool {
        self.rhs_cs >= self.lhs_sq
    }
}

/// Runs the Cauchy–Schwarz step with the standard curve constant λ = -1.
pub fn cs_chain_report(a: &ScalarSet, h: &TranslateSet) -> Result<CsChainReport> {
    same_field(a.modulus(), h.modulus())?;
    let p = a.modulus();
    let s = sigma(a, h, &Lambda::standard(p));
    let member = a.membership();
    let quotient = quotient_histogram(h);
    let mut weighted_total = 0u128;
    let mut per_u = Vec::with_capacity(quotient.support());
    for (u, r) in quotient.iter() {
        let sigma_u = a
            .elements()
            .iter()
            .filter(|&&x| u.eval_finite(x).is_some_and(|y| member.contains(y)))
            .count() as u128;
        weighted_total += r as u128 * sigma_u;
        per_u.push((r as u128, sigma_u));
    }
    let lhs_sq = (s as u128) * (s as u128);
    let denom = 3 * (a.len() as u128) * (h.len() as u128).pow(2);
    let delta = if denom == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(lhs_sq, denom)
    };
    let in_omega = |sigma_u: u128| Ratio::from_integer(sigma_u) >= delta;
    let omega: Vec<&(u128, u128)> = per_u.iter().filter(|(_, su)| in_omega(*su)).collect();
    let omega_weight: u128 = omega.iter().map(|(r, su)| r * su).sum();
    let share = if weighted_total == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(omega_weight, weighted_total)
    };
    Ok(CsChainReport {
        sigma: s,
        lhs_sq,
        rhs_cs: a.len() as u128 * weighted_total,
        delta,
        omega_size: omega.len(),
        omega_incidence_share: share,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::check_prime;

    fn f(p: u64) -> PrimeModulus {
        check_prime(p as i128).unwrap()
    }

    fn cfg() -> CountConfig {
        CountConfig::default()
    }

    #[test]
    fn sigma_examples() {
        let p = f(7);
        let lam = Lambda::standard(p);
        let a = ScalarSet::new(p, [1, 6]);
        assert_eq!(sigma(&a, &TranslateSet::new(p, [(0, 0)]), &lam), 2);
        assert_eq!(sigma(&a, &TranslateSet::empty(p), &lam), 0);
        let h = TranslateSet::new(p, [(0, 0), (3, 1), (2, 5)]);
        assert_eq!(sigma_rect(&a, &a, &h, &lam), sigma(&a, &h, &lam));
        assert_eq!(sigma_rect(&a, &ScalarSet::empty(p), &h, &lam), 0);
    }

    #[test]
    fn quotient_histogram_examples() {
        let p = f(7);
        let one = TranslateSet::new(p, [(3, 4)]);
        assert_eq!(quotient_histogram(&one).sorted(), vec![(MoebiusMap::identity(p), 1)]);
        let h = TranslateSet::new(p, [(1, 0), (2, 0)]);
        let hist = quotient_histogram(&h);
        let unipotent = |t: i128| MoebiusMap::new(p, 1, t, 0, 1).unwrap();
        assert_eq!(hist.get(&unipotent(-1)), 1);
        assert_eq!(hist.get(&unipotent(0)), 2);
        assert_eq!(hist.get(&unipotent(1)), 1);
        assert_eq!(hist.total_mass(), 4);
        assert_eq!(t_k(&h, 2, &cfg()).unwrap(), 6);
    }

    #[test]
    fn t_k_singletons() {
        let p = f(11);
        let h = TranslateSet::new(p, [(5, 2)]);
        for k in 2..=4 {
            assert_eq!(t_k(&h, k, &cfg()).unwrap(), 1);
        }
        assert!(t_k(&h, 5, &cfg()).is_err());
    }

    #[test]
    fn t3_pinned_value() {
        // Brute force over H⁶ gives 20 for p = 7 and p = 101.
        for n in [7, 101] {
            let h = TranslateSet::new(f(n), [(0, 0), (1, 1)]);
            assert_eq!(t_k(&h, 3, &cfg()).unwrap(), 20);
        }
    }

    #[test]
    fn t3_budget() {
        let p = f(101);
        let h = crate::sets::random_translates(p, 40, 1).unwrap();
        let mut c = cfg();
        c.budget.max_t3_translates = 39;
        assert!(matches!(
            t_k(&h, 3, &c),
            Err(Error::ResourceLimit { required: 40, limit: 39, .. })
        ));
        let c = CountConfig {
            workers: 1,
            budget: Budget::default().with_table_mb(4),
        };
        assert!(t_k(&h, 3, &c).is_ok());
        let big = crate::sets::random_translates(p, 200, 1).unwrap();
        assert!(matches!(t_k(&big, 3, &c), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn d_and_q_examples() {
        let p = f(7);
        let h = TranslateSet::new(p, [(0, 0), (1, 1)]);
        assert_eq!(d_histogram(&h).sorted(), vec![(0, 2), (1, 2)]);
        assert_eq!(q_rect(&h), 8);
        assert_eq!(q_rect(&TranslateSet::new(p, [(4, 4)])), 1);
        let line = TranslateSet::new(p, (0..5).map(|b| (3, b)));
        assert_eq!(d_histogram(&line).sorted(), vec![(0, 25)]);
    }

    #[test]
    fn minkowski_examples() {
        let p = f(7);
        let lam = Lambda::new(p, 1).unwrap();
        let a = ScalarSet::new(p, [0, 1]);
        assert_eq!(minkowski_realisations(&a, &lam), 4);
        assert_eq!(minkowski_rotated_incidences(&a, &lam), 4);
        assert_eq!(minkowski_rectangle_incidences(&a, &lam), 4);
        let single = ScalarSet::new(p, [3]);
        for l in 1..7 {
            assert_eq!(minkowski_realisations(&single, &Lambda::new(p, l).unwrap()), 0);
        }
    }

    #[test]
    fn rich_hyperbola_examples() {
        let p = f(7);
        let lam = Lambda::standard(p);
        let a = ScalarSet::new(p, [1, 6]);
        for mode in [RichMode::Pairs, RichMode::Exhaustive] {
            let rc = rich_hyperbolae(&a, 2, &lam, mode, &cfg()).unwrap();
            assert!(rc.witnesses.unwrap().contains(&Translate::new(0, 0)));
            assert_eq!(rich_hyperbolae(&a, 3, &lam, mode, &cfg()).unwrap().count, 0);
        }
        assert!(rich_hyperbolae(&a, 1, &lam, RichMode::Pairs, &cfg()).is_err());
    }

    #[test]
    fn dense_budget() {
        let p = f(10007);
        let a = ScalarSet::new(p, [1, 2, 3]);
        let r = rich_hyperbolae(&a, 2, &Lambda::standard(p), RichMode::Exhaustive, &cfg());
        assert!(matches!(r, Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn rich_line_examples() {
        let p = f(7);
        let b = ScalarSet::new(p, [0, 1]);
        let lines = rich_lines(&b, &b, 2, true).unwrap();
        assert_eq!(lines.count, 6);
        assert_eq!(rich_lines(&b, &b, 2, false).unwrap().count, 2);
        assert_eq!(rich_lines(&b, &b, 3, true).unwrap().count, 0);
        assert!(rich_lines(&b, &b, 1, true).is_err());
        let c = ScalarSet::new(p, [0, 1, 2, 3]);
        let mut last = u64::MAX;
        for k in 2..=5 {
            let n = rich_lines(&c, &c, k, true).unwrap().count;
            assert!(n <= last);
            last = n;
        }
        // The full field: every line carries exactly p points.
        let all = ScalarSet::new(p, 0..7);
        assert_eq!(rich_lines(&all, &all, 7, true).unwrap().count, 7 * 7 + 7);
    }

    #[test]
    fn pair_inversion() {
        for n in 2..200u64 {
            assert_eq!(points_from_pairs(n * (n - 1) / 2), n);
        }
    }

    #[test]
    fn energy_examples() {
        let p = f(5);
        let single = ScalarSet::new(p, [2]);
        assert_eq!(additive_energy(&single), 1);
        assert_eq!(product_rep_histogram(&single).sorted(), vec![(0, 1)]);
        assert_eq!(product_rep_energy(&single), 1);
        let b = ScalarSet::new(p, [0, 1]);
        assert_eq!(additive_energy(&b), 6);
        assert_eq!(product_rep_energy(&b), 152);
        assert_eq!(product_rep_histogram(&b).total_mass(), 16);
    }

    #[test]
    fn sumprod_examples() {
        let p = f(5);
        let one = ScalarSet::new(p, [1]);
        assert_eq!(sumprod_quadruples(&one, SumProductVariant::SumTimesSum), 0);
        let a = ScalarSet::new(p, [0, 1]);
        let got: Vec<u64> = SumProductVariant::ALL
            .iter()
            .map(|&v| sumprod_quadruples(&a, v))
            .collect();
        assert_eq!(got, vec![4, 2, 4, 4]);
        let a = ScalarSet::new(f(11), [1, 2, 3, 7]);
        let got: Vec<u64> = SumProductVariant::ALL
            .iter()
            .map(|&v| sumprod_quadruples(&a, v))
            .collect();
        assert_eq!(got, vec![32, 16, 25, 25]);
        assert_eq!(SumProductVariant::from_index(2).unwrap(), SumProductVariant::ShiftedSums);
        assert!(SumProductVariant::from_index(0).is_err());
        assert!(SumProductVariant::from_index(5).is_err());
    }

    #[test]
    fn borel_examples() {
        let p = f(7);
        let one = TranslateSet::new(p, [(0, 0)]);
        let mass = borel_coset_mass(&one);
        assert_eq!(mass.max_non_borel, 0);
        assert_eq!(mass.borel(), 1);
        // h h⁻¹ h = h is not upper triangular.
        assert_eq!(borel_t3_mass(&one, &cfg()).unwrap(), 0);
        let h = TranslateSet::new(p, [(0, 0), (1, 1), (2, 5), (6, 3)]);
        assert_eq!(borel_coset_mass(&h).total(), energy(&h));
    }

    #[test]
    fn cs_chain_example() {
        let p = f(7);
        let a = ScalarSet::new(p, [1, 6]);
        let h = TranslateSet::new(p, [(0, 0)]);
        let r = cs_chain_report(&a, &h).unwrap();
        assert_eq!(r.sigma, 2);
        assert_eq!(r.lhs_sq, 4);
        assert_eq!(r.rhs_cs, 4);
        assert_eq!(r.delta, Ratio::new(4, 6));
        assert_eq!(r.omega_size, 1);
        assert_eq!(r.omega_incidence_share, Ratio::from_integer(1));
        assert!(r.cauchy_schwarz_holds());
    }

    #[test]
    fn energy_systems_reassemble() {
        let p = f(13);
        for seed in 0..30 {
            let h = crate::sets::random_translates(p, 1 + seed as usize % 25, seed).unwrap();
            let s = energy_systems(&h);
            assert_eq!(s.reassembled(), s.energy);
            let m = h.max_line_multiplicity().unwrap() as u128;
            let n = h.len() as u128;
            assert!(s.n1 <= n * n * m && s.n2 <= n * n * m);
            assert!(s.energy <= 2 * n * n * m);
        }
    }

    #[test]
    fn projective_keys_dominate() {
        let p = f(31);
        for seed in 0..10 {
            let h = crate::sets::random_translates(p, 12, seed).unwrap();
            for k in 2..=4 {
                let sl2 = t_k_with(&h, k, KeyMode::Sl2, &cfg()).unwrap();
                let proj = t_k_with(&h, k, KeyMode::Projective, &cfg()).unwrap();
                assert!(proj >= sl2, "k = {k}");
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let p = f(61);
        let h = crate::sets::random_translates(p, 20, 4).unwrap();
        let a = crate::sets::random_scalars(p, 9, 4).unwrap();
        let lam = Lambda::standard(p);
        let one = CountConfig::with_workers(1);
        for w in [2, 3, 8, 64] {
            let c = CountConfig::with_workers(w);
            assert_eq!(
                triple_histogram(&h, &one).unwrap().sorted(),
                triple_histogram(&h, &c).unwrap().sorted()
            );
            assert_eq!(t_k(&h, 4, &one).unwrap(), t_k(&h, 4, &c).unwrap());
            for mode in [RichMode::Pairs, RichMode::Exhaustive] {
                assert_eq!(
                    richness_profile(&a, &lam, mode, None, &one).unwrap(),
                    richness_profile(&a, &lam, mode, None, &c).unwrap()
                );
            }
        }
    }
}
