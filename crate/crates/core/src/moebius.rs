//! Möbius transformations of the projective line over F_p.
//!
//! A translate `h = (a, b)` of the hyperbola is the map `x ↦ a + 1/(b - x)`,
//! embedded in SL₂ as the matrix `((-a, ab + 1), (-1, b))`. Two notions of
//! equality are in play:
//!
//! * entry equality of [`MoebiusMap`] (the derived `Eq`), used as the key of
//!   every energy count, and
//! * projective equality, comparing [`MoebiusMap::canonicalize`] images, which
//!   is what the action on `F_p ∪ {∞}` sees.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{check_prime, FieldElement, PrimeModulus};

/// A point of the projective line `F_p ∪ {∞}`; finite values are canonical residues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProjectiveValue {
    Finite(u64),
    Infinity,
}

impl fmt::Display for ProjectiveValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectiveValue::Finite(v) => write!(f, "{v}"),
            ProjectiveValue::Infinity => write!(f, "inf"),
        }
    }
}

/// A translate `(a, b)` of the hyperbola: vertical offset `a`, horizontal offset `b`.
///
/// Components are canonical residues of the field the owning set lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Translate {
    pub a: u64,
    pub b: u64,
}

impl Translate {
    pub const fn new(a: u64, b: u64) -> Self {
        Translate { a, b }
    }

    pub fn reduced(p: PrimeModulus, a: i128, b: i128) -> Self {
        Translate {
            a: p.reduce(a),
            b: p.reduce(b),
        }
    }
}

/// The nonzero constant λ of the curve family `(x - b)(y - a) = λ`.
///
/// A translate maps `x ↦ a + λ'/(b - x)` with `λ' = -λ`. The default
/// `λ = -1` is the only value for which translates embed in SL₂.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lambda {
    p: PrimeModulus,
    value: u64,
    numerator: u64,
}

impl Lambda {
    pub fn new(p: PrimeModulus, lambda: i128) -> Result<Self> {
        let value = p.reduce(lambda);
        if value == 0 {
            return Err(Error::ZeroLambda);
        }
        Ok(Lambda {
            p,
            value,
            numerator: p.neg(value),
        })
    }

    /// `λ = -1`, the curve `xy = -1` and its translates.
    pub fn standard(p: PrimeModulus) -> Self {
        Lambda::new(p, -1).expect("-1 is nonzero")
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_standard(&self) -> bool {
        self.numerator == 1
    }

    /// Fails unless this is the group-compatible `λ = -1`.
    pub fn require_standard(&self) -> Result<()> {
        if self.is_standard() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "group-structured counts need λ = -1, got λ = {}",
                self.value
            )))
        }
    }

    /// `h(x) = a + λ'/(b - x)`, or `None` at the pole `x = b`.
    #[inline]
    pub fn apply(&self, h: Translate, x: u64) -> Option<u64> {
        let p = self.p;
        let den = p.sub(h.b, x);
        if den == 0 {
            return None;
        }
        let q = p.inv(den).ok()?;
        Some(p.add(h.a, p.mul(self.numerator, q)))
    }

    /// Whether the point `(x, y)` lies on the curve of `h`.
    #[inline]
    pub fn incident(&self, h: Translate, x: u64, y: u64) -> bool {
        let p = self.p;
        p.mul(p.sub(x, h.b), p.sub(y, h.a)) == self.value
    }
}

/// An invertible 2×2 matrix `((a, b), (c, d))` over F_p acting by `x ↦ (ax + b)/(cx + d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoebiusMap {
    e: [u64; 4],
    p: PrimeModulus,
}

impl MoebiusMap {
    /// Builds a map from arbitrary-sign entries; fails on a singular matrix.
    pub fn new(p: PrimeModulus, a: i128, b: i128, c: i128, d: i128) -> Result<Self> {
        Self::from_entries(p, [p.reduce(a), p.reduce(b), p.reduce(c), p.reduce(d)])
    }

    /// Builds a map from canonical residues `[a, b, c, d]`.
    pub fn from_entries(p: PrimeModulus, e: [u64; 4]) -> Result<Self> {
        debug_assert!(e.iter().all(|&x| x < p.get()));
        let m = MoebiusMap { e, p };
        if m.det_raw() == 0 {
            return Err(Error::InvalidArgument(format!("singular matrix {m}")));
        }
        Ok(m)
    }

    pub fn identity(p: PrimeModulus) -> Self {
        MoebiusMap { e: [1, 0, 0, 1], p }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    /// Entries `[a, b, c, d]` as canonical residues.
    pub fn entries(&self) -> [u64; 4] {
        self.e
    }

    pub fn entry(&self, i: usize) -> FieldElement {
        self.p.elem(self.e[i] as i128)
    }

    fn det_raw(&self) -> u64 {
        let p = self.p;
        let [a, b, c, d] = self.e;
        p.sub(p.mul(a, d), p.mul(b, c))
    }

    pub fn det(&self) -> FieldElement {
        self.p.elem(self.det_raw() as i128)
    }

    /// The SL₂ matrix `((-a, ab + 1), (-1, b))` of the translate `h(x) = a + 1/(b - x)`.
    pub fn embed(p: PrimeModulus, h: Translate) -> Self {
        let e = [p.neg(h.a), p.add(p.mul(h.a, h.b), 1), p.neg(1), h.b];
        MoebiusMap { e, p }
    }

    fn check_same_field(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch {
                left: self.p.get(),
                right: other.p.get(),
            });
        }
        Ok(())
    }

    /// Matrix product `self · other`; as maps, `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same_field(other)?;
        Ok(self.mul_unchecked(other))
    }

    #[inline]
    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let p = self.p;
        let [a, b, c, d] = self.e;
        let [e, f, g, h] = other.e;
        let e = [
            p.add(p.mul(a, e), p.mul(b, g)),
            p.add(p.mul(a, f), p.mul(b, h)),
            p.add(p.mul(c, e), p.mul(d, g)),
            p.add(p.mul(c, f), p.mul(d, h)),
        ];
        MoebiusMap { e, p: self.p }
    }

    /// Group inverse in GL₂; for `det = 1` this is the adjugate `((d, -b), (-c, a))`.
    pub fn invert(&self) -> Self {
        let p = self.p;
        let [a, b, c, d] = self.e;
        let adj = [d, p.neg(b), p.neg(c), a];
        let det = self.det_raw();
        if det == 1 {
            return MoebiusMap { e: adj, p };
        }
        let s = p.inv(det).expect("det is nonzero");
        MoebiusMap {
            e: adj.map(|x| p.mul(x, s)),
            p,
        }
    }

    /// Multiplies every entry by the nonzero scalar `s`.
    pub fn scale(&self, s: u64) -> Result<Self> {
        let p = self.p;
        let s = s % p.get();
        if s == 0 {
            return Err(Error::DivisionByZero(p.get()));
        }
        Ok(MoebiusMap {
            e: self.e.map(|x| p.mul(x, s)),
            p,
        })
    }

    /// Projective normal form: the first nonzero entry in reading order becomes 1.
    pub fn canonicalize(&self) -> Self {
        let p = self.p;
        let lead = *self.e.iter().find(|&&x| x != 0).expect("nonsingular matrix");
        if lead == 1 {
            return *self;
        }
        let s = p.inv(lead).expect("nonzero");
        MoebiusMap {
            e: self.e.map(|x| p.mul(x, s)),
            p,
        }
    }

    pub fn projectively_equal(&self, other: &Self) -> bool {
        self.p == other.p && self.canonicalize().e == other.canonicalize().e
    }

    /// Action on the projective line.
    pub fn evaluate(&self, x: ProjectiveValue) -> ProjectiveValue {
        let p = self.p;
        let [a, b, c, d] = self.e;
        let (num, den) = match x {
            ProjectiveValue::Finite(x) => (p.add(p.mul(a, x), b), p.add(p.mul(c, x), d)),
            ProjectiveValue::Infinity => (a, c),
        };
        if den == 0 {
            ProjectiveValue::Infinity
        } else {
            ProjectiveValue::Finite(p.mul(num, p.inv(den).expect("nonzero")))
        }
    }

    /// Evaluation at a finite point; `None` stands for ∞.
    #[inline]
    pub fn eval_finite(&self, x: u64) -> Option<u64> {
        match self.evaluate(ProjectiveValue::Finite(x)) {
            ProjectiveValue::Finite(y) => Some(y),
            ProjectiveValue::Infinity => None,
        }
    }

    /// `h1 h2⁻¹` from the closed form
    /// `((1 + a₁w₁, a₁ - a₂ - a₁a₂w₁), (w₁, 1 - a₂w₁))` with `w₁ = b₁ - b₂`.
    pub fn pair_quotient(p: PrimeModulus, h1: Translate, h2: Translate) -> Self {
        let w1 = p.sub(h1.b, h2.b);
        let a1w1 = p.mul(h1.a, w1);
        let a2w1 = p.mul(h2.a, w1);
        let e = [
            p.add(1, a1w1),
            p.sub(p.sub(h1.a, h2.a), p.mul(h1.a, a2w1)),
            w1,
            p.sub(1, a2w1),
        ];
        MoebiusMap { e, p }
    }

    /// `h1 h2⁻¹ h3` from its closed form, with `w₁ = b₁ - b₂`, `w₂ = a₃ - a₂`.
    pub fn triple_product(p: PrimeModulus, h1: Translate, h2: Translate, h3: Translate) -> Self {
        let w1 = p.sub(h1.b, h2.b);
        let w2 = p.sub(h3.a, h2.a);
        let s = p.add(1, p.mul(w1, w2)); // 1 + w₁w₂
        let a1 = h1.a;
        let b3 = h3.b;
        let e = [
            p.sub(p.neg(p.mul(a1, s)), w2),
            p.add(p.add(1, p.mul(a1, w1)), p.mul(b3, p.add(w2, p.mul(a1, s)))),
            p.neg(s),
            p.add(w1, p.mul(b3, s)),
        ];
        MoebiusMap { e, p }
    }

    /// Membership in the Borel subgroup of upper-triangular maps.
    pub fn is_borel(&self) -> bool {
        self.e[2] == 0
    }

    /// Label of the left coset `mB`: the image `m(∞)`, which is ∞ exactly on B.
    pub fn coset_label(&self) -> ProjectiveValue {
        self.evaluate(ProjectiveValue::Infinity)
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "[[{a},{b}],[{c},{d}]] mod {}", self.p)
    }
}

impl FromStr for MoebiusMap {
    type Err = Error;

    /// Parses `[[a,b],[c,d]] mod p`; entries may be signed and are reduced mod p.
    fn from_str(s: &str) -> Result<Self> {
        let syntax = |pos: usize, msg: &str| Error::Syntax {
            pos,
            msg: msg.to_string(),
        };
        let (matrix, modulus) = s
            .split_once("mod")
            .ok_or_else(|| syntax(0, "expected `[[a,b],[c,d]] mod p`"))?;
        let offset = matrix.len() + 3;
        let p: i128 = modulus
            .trim()
            .parse()
            .map_err(|_| syntax(offset, "bad modulus"))?;
        let p = check_prime(p)?;
        let compact: String = matrix.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix("[[")
            .and_then(|r| r.strip_suffix("]]"))
            .ok_or_else(|| syntax(0, "expected `[[`...`]]`"))?;
        let (row0, row1) = inner
            .split_once("],[")
            .ok_or_else(|| syntax(0, "expected two rows"))?;
        let mut nums = Vec::with_capacity(4);
        for part in row0.split(',').chain(row1.split(',')) {
            let v: i128 = part.parse().map_err(|_| syntax(0, "bad entry"))?;
            nums.push(v);
        }
        if nums.len() != 4 {
            return Err(syntax(0, "expected four entries"));
        }
        MoebiusMap::new(p, nums[0], nums[1], nums[2], nums[3])
    }
}
