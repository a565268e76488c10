//! Scalar sets `A, B ⊂ F_p`, translate sets `H ⊂ F_p²`, and the set-spec
//! mini-language used to describe them on the command line.
//!
//! ```text
//! scalar := "ap:" int "," int "," count
//!         | "gp:" int "," int "," count
//!         | "random:" count ["," seed]
//!         | "list:" int ("," int)*
//!         | "invunion:" scalar
//! hspec  := "cart:" scalar ";" scalar
//!         | "randomh:" count ["," seed]
//!         | "listh:" pair (";" pair)*        pair := int "," int
//! ```
//!
//! Integers are signed decimals reduced mod p. Every set is canonical
//! (sorted, deduplicated) from construction on.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::moebius::Translate;

/// Universes at most this large are sampled by index shuffling; larger ones by rejection.
const SHUFFLE_LIMIT: u128 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScalarSet {
    elems: Vec<u64>,
    p: PrimeModulus,
}

impl ScalarSet {
    pub fn new<I: IntoIterator<Item = i128>>(p: PrimeModulus, items: I) -> Self {
        Self::from_residues(p, items.into_iter().map(|n| p.reduce(n)))
    }

    pub fn from_residues<I: IntoIterator<Item = u64>>(p: PrimeModulus, items: I) -> Self {
        let mut elems: Vec<u64> = items.into_iter().collect();
        debug_assert!(elems.iter().all(|&x| x < p.get()));
        elems.sort_unstable();
        elems.dedup();
        ScalarSet { elems, p }
    }

    pub fn empty(p: PrimeModulus) -> Self {
        ScalarSet { elems: Vec::new(), p }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn elements(&self) -> &[u64] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    /// A constant-time membership table for this set.
    pub fn membership(&self) -> Membership {
        Membership::new(self)
    }

    /// `A + A`.
    pub fn sumset(&self, other: &ScalarSet) -> ScalarSet {
        let p = self.p;
        ScalarSet::from_residues(
            p,
            self.elems
                .iter()
                .flat_map(|&x| other.elems.iter().map(move |&y| p.add(x, y))),
        )
    }

    /// `A - B`.
    pub fn diffset(&self, other: &ScalarSet) -> ScalarSet {
        let p = self.p;
        ScalarSet::from_residues(
            p,
            self.elems
                .iter()
                .flat_map(|&x| other.elems.iter().map(move |&y| p.sub(x, y))),
        )
    }

    /// `S ∪ S⁻¹`; zero stays in the set but has no inverse to add.
    pub fn inverse_union(&self) -> ScalarSet {
        let p = self.p;
        let inverses = self.elems.iter().filter_map(|&x| p.inv(x).ok());
        ScalarSet::from_residues(p, self.elems.iter().copied().chain(inverses))
    }

    /// Renders as a `list:` spec that parses back to the same set.
    pub fn render(&self) -> String {
        let body: Vec<String> = self.elems.iter().map(u64::to_string).collect();
        format!("list:{}", body.join(","))
    }

    /// One integer literal per line; blank lines and `#` comments are skipped.
    pub fn from_lines<R: BufRead>(p: PrimeModulus, reader: R) -> Result<Self> {
        let mut items = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::InvalidSpec(e.to_string()))?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let v: i128 = t
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("line {}: bad integer {t:?}", i + 1)))?;
            items.push(v);
        }
        Ok(ScalarSet::new(p, items))
    }
}

/// Membership test over a scalar set: a bitmap for small p, a hash set otherwise.
pub enum Membership {
    Dense(Vec<bool>),
    Sparse(HashSet<u64>),
}

impl Membership {
    const DENSE_LIMIT: u64 = 1 << 24;

    fn new(set: &ScalarSet) -> Self {
        let p = set.p.get();
        if p <= Self::DENSE_LIMIT {
            let mut table = vec![false; p as usize];
            for &x in &set.elems {
                table[x as usize] = true;
            }
            Membership::Dense(table)
        } else {
            Membership::Sparse(set.elems.iter().copied().collect())
        }
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        match self {
            Membership::Dense(t) => t[x as usize],
            Membership::Sparse(s) => s.contains(&x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TranslateSet {
    elems: Vec<Translate>,
    p: PrimeModulus,
}

impl TranslateSet {
    pub fn new<I: IntoIterator<Item = (i128, i128)>>(p: PrimeModulus, items: I) -> Self {
        Self::from_translates(
            p,
            items.into_iter().map(|(a, b)| Translate::reduced(p, a, b)),
        )
    }

    pub fn from_translates<I: IntoIterator<Item = Translate>>(p: PrimeModulus, items: I) -> Self {
        let mut elems: Vec<Translate> = items.into_iter().collect();
        debug_assert!(elems.iter().all(|h| h.a < p.get() && h.b < p.get()));
        elems.sort_unstable();
        elems.dedup();
        TranslateSet { elems, p }
    }

    pub fn empty(p: PrimeModulus) -> Self {
        TranslateSet { elems: Vec::new(), p }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn elements(&self) -> &[Translate] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, h: Translate) -> bool {
        self.elems.binary_search(&h).is_ok()
    }

    /// All pairs `(a, b)` with `a ∈ rows`, `b ∈ cols`.
    pub fn cartesian(rows: &ScalarSet, cols: &ScalarSet) -> Result<Self> {
        if rows.p != cols.p {
            return Err(Error::ModulusMismatch {
                left: rows.p.get(),
                right: cols.p.get(),
            });
        }
        // Row-major enumeration of two sorted sets is already lexicographic.
        let elems = rows
            .elems
            .iter()
            .flat_map(|&a| cols.elems.iter().map(move |&b| Translate::new(a, b)))
            .collect();
        Ok(TranslateSet { elems, p: rows.p })
    }

    fn line_counts(&self) -> (HashMap<u64, usize>, HashMap<u64, usize>) {
        let mut by_a = HashMap::new();
        let mut by_b = HashMap::new();
        for h in &self.elems {
            *by_a.entry(h.a).or_insert(0) += 1;
            *by_b.entry(h.b).or_insert(0) += 1;
        }
        (by_a, by_b)
    }

    /// M: the largest number of translates sharing an abscissa or an ordinate.
    pub fn max_line_multiplicity(&self) -> Result<usize> {
        if self.elems.is_empty() {
            return Err(Error::EmptyInput("translate set"));
        }
        let (by_a, by_b) = self.line_counts();
        Ok(by_a.values().chain(by_b.values()).copied().max().unwrap_or(0))
    }

    /// Splits off every translate lying on a horizontal or vertical line that
    /// carries at least `threshold` translates of the original set.
    pub fn prune_rich_lines(&self, threshold: usize) -> Result<(TranslateSet, TranslateSet)> {
        if threshold == 0 {
            return Err(Error::InvalidArgument("pruning threshold must be ≥ 1".into()));
        }
        let (by_a, by_b) = self.line_counts();
        let (removed, kept): (Vec<Translate>, Vec<Translate>) = self
            .elems
            .iter()
            .partition(|h| by_a[&h.a] >= threshold || by_b[&h.b] >= threshold);
        Ok((
            TranslateSet { elems: kept, p: self.p },
            TranslateSet { elems: removed, p: self.p },
        ))
    }

    /// Image under `(x, y) ↦ ((x + y)/2, (x - y)/2)` applied to `(a, b)`.
    pub fn rotate_coordinates(&self) -> TranslateSet {
        let p = self.p;
        let half = p.half();
        TranslateSet::from_translates(
            p,
            self.elems.iter().map(|h| {
                Translate::new(p.mul(p.add(h.a, h.b), half), p.mul(p.sub(h.a, h.b), half))
            }),
        )
    }

    /// Inverse of [`rotate_coordinates`](Self::rotate_coordinates): `(x, y) ↦ (x + y, x - y)`.
    pub fn unrotate_coordinates(&self) -> TranslateSet {
        let p = self.p;
        TranslateSet::from_translates(
            p,
            self.elems
                .iter()
                .map(|h| Translate::new(p.add(h.a, h.b), p.sub(h.a, h.b))),
        )
    }

    pub fn render(&self) -> String {
        let body: Vec<String> = self.elems.iter().map(|h| format!("{},{}", h.a, h.b)).collect();
        format!("listh:{}", body.join(";"))
    }

    /// One `a,b` pair per line; blank lines and `#` comments are skipped.
    pub fn from_lines<R: BufRead>(p: PrimeModulus, reader: R) -> Result<Self> {
        let mut items = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::InvalidSpec(e.to_string()))?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let bad = || Error::InvalidSpec(format!("line {}: bad pair {t:?}", i + 1));
            let (a, b) = t.split_once(',').ok_or_else(bad)?;
            let a: i128 = a.trim().parse().map_err(|_| bad())?;
            let b: i128 = b.trim().parse().map_err(|_| bad())?;
            items.push((a, b));
        }
        Ok(TranslateSet::new(p, items))
    }
}

/// Seeded uniform sample of `count` distinct indices below `universe`.
fn sample_distinct(universe: u128, count: usize, seed: u64) -> Result<Vec<u128>> {
    if count as u128 > universe {
        return Err(Error::InvalidSpec(format!(
            "cannot draw {count} distinct elements from {universe}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if universe <= SHUFFLE_LIMIT {
        Ok(index::sample(&mut rng, universe as usize, count)
            .into_iter()
            .map(|i| i as u128)
            .collect())
    } else {
        let mut seen = HashSet::with_capacity(count);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let i = rng.random_range(0..universe);
            if seen.insert(i) {
                out.push(i);
            }
        }
        Ok(out)
    }
}

/// `count` distinct residues drawn uniformly with the given seed.
pub fn random_scalars(p: PrimeModulus, count: usize, seed: u64) -> Result<ScalarSet> {
    let idx = sample_distinct(p.get() as u128, count, seed)?;
    Ok(ScalarSet::from_residues(p, idx.into_iter().map(|i| i as u64)))
}

/// `count` distinct translates drawn uniformly from F_p² with the given seed.
pub fn random_translates(p: PrimeModulus, count: usize, seed: u64) -> Result<TranslateSet> {
    let q = p.get() as u128;
    let idx = sample_distinct(q * q, count, seed)?;
    Ok(TranslateSet::from_translates(
        p,
        idx.into_iter()
            .map(|i| Translate::new((i / q) as u64, (i % q) as u64)),
    ))
}

/// Field and default seed a spec is interpreted against.
#[derive(Clone, Copy, Debug)]
pub struct SpecContext {
    pub p: PrimeModulus,
    /// Seed used by `random:`/`randomh:` specs that do not name their own.
    pub seed: u64,
}

impl SpecContext {
    pub fn new(p: PrimeModulus, seed: u64) -> Self {
        SpecContext { p, seed }
    }
}

/// Result of parsing a spec whose kind is not known in advance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParsedSet {
    Scalars(ScalarSet),
    Translates(TranslateSet),
}

pub fn parse_setspec(text: &str, ctx: SpecContext) -> Result<ParsedSet> {
    let t = text.trim_start();
    if ["cart:", "randomh:", "listh:"].iter().any(|k| t.starts_with(k)) {
        parse_translates(text, ctx).map(ParsedSet::Translates)
    } else {
        parse_scalars(text, ctx).map(ParsedSet::Scalars)
    }
}

pub fn parse_scalars(text: &str, ctx: SpecContext) -> Result<ScalarSet> {
    let mut parser = Parser::new(text, ctx);
    let set = parser.scalar()?;
    parser.finish()?;
    Ok(set)
}

pub fn parse_translates(text: &str, ctx: SpecContext) -> Result<TranslateSet> {
    let mut parser = Parser::new(text, ctx);
    let set = parser.hspec()?;
    parser.finish()?;
    Ok(set)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    ctx: SpecContext,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, ctx: SpecContext) -> Self {
        Parser { src, pos: 0, ctx }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos != self.src.len() {
            return self.err("unexpected trailing input");
        }
        Ok(())
    }

    fn int(&mut self) -> Result<i128> {
        self.skip_ws();
        let rest = self.rest();
        let sign_len = usize::from(rest.starts_with(['+', '-']));
        let digits = rest[sign_len..].bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return self.err("expected an integer");
        }
        let lit = &rest[..sign_len + digits];
        match lit.parse::<i128>() {
            Ok(v) => {
                self.pos += lit.len();
                Ok(v)
            }
            Err(_) => self.err("integer out of range"),
        }
    }

    fn count(&mut self) -> Result<usize> {
        let start = self.pos;
        let v = self.int()?;
        if v < 0 || v > usize::MAX as i128 {
            self.pos = start;
            return self.err("expected a non-negative count");
        }
        if v == 0 {
            return Err(Error::InvalidSpec("element count must be positive".into()));
        }
        Ok(v as usize)
    }

    fn seed(&mut self) -> Result<u64> {
        let start = self.pos;
        let v = self.int()?;
        u64::try_from(v).or_else(|_| {
            self.pos = start;
            self.err("seed must fit in u64")
        })
    }

    fn scalar(&mut self) -> Result<ScalarSet> {
        let p = self.ctx.p;
        if self.eat("ap:") {
            let start = self.int()?;
            self.expect(",")?;
            let step = p.reduce(self.int()?);
            self.expect(",")?;
            let n = self.count()?;
            if step == 0 {
                return Err(Error::InvalidSpec("progression step is 0 mod p".into()));
            }
            let mut x = p.reduce(start);
            let mut items = Vec::with_capacity(n.min(p.get() as usize));
            for _ in 0..n.min(p.get() as usize) {
                items.push(x);
                x = p.add(x, step);
            }
            Ok(ScalarSet::from_residues(p, items))
        } else if self.eat("gp:") {
            let start = p.reduce(self.int()?);
            self.expect(",")?;
            let ratio = p.reduce(self.int()?);
            self.expect(",")?;
            let n = self.count()?;
            if ratio == 0 {
                return Err(Error::InvalidSpec("geometric ratio is 0 mod p".into()));
            }
            let mut x = start;
            let mut items = Vec::with_capacity(n.min(p.get() as usize));
            for _ in 0..n.min(p.get() as usize) {
                items.push(x);
                x = p.mul(x, ratio);
            }
            Ok(ScalarSet::from_residues(p, items))
        } else if self.eat("random:") {
            let n = self.count()?;
            let seed = if self.eat(",") { self.seed()? } else { self.ctx.seed };
            random_scalars(p, n, seed)
        } else if self.eat("list:") {
            let mut items = vec![self.int()?];
            while self.eat(",") {
                items.push(self.int()?);
            }
            Ok(ScalarSet::new(p, items))
        } else if self.eat("invunion:") {
            Ok(self.scalar()?.inverse_union())
        } else {
            self.err("expected one of ap:, gp:, random:, list:, invunion:")
        }
    }

    fn hspec(&mut self) -> Result<TranslateSet> {
        let p = self.ctx.p;
        if self.eat("cart:") {
            let rows = self.scalar()?;
            self.expect(";")?;
            let cols = self.scalar()?;
            TranslateSet::cartesian(&rows, &cols)
        } else if self.eat("randomh:") {
            let n = self.count()?;
            let seed = if self.eat(",") { self.seed()? } else { self.ctx.seed };
            random_translates(p, n, seed)
        } else if self.eat("listh:") {
            let mut items = vec![self.pair()?];
            while self.eat(";") {
                items.push(self.pair()?);
            }
            Ok(TranslateSet::new(p, items))
        } else {
            self.err("expected one of cart:, randomh:, listh:")
        }
    }

    fn pair(&mut self) -> Result<(i128, i128)> {
        let a = self.int()?;
        self.expect(",")?;
        let b = self.int()?;
        Ok((a, b))
    }
}
