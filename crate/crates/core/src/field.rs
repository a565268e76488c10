//! Arithmetic in the prime field F_p for odd primes below 2^61.
//!
//! Residues are plain `u64` values kept canonical in `[0, p)`. The hot
//! counting loops work directly on residues through [`PrimeModulus`];
//! [`FieldElement`] bundles a residue with its modulus for the public API and
//! checks that both operands of a binary operation live in the same field.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported modulus, the Mersenne prime 2^61 - 1.
pub const MAX_MODULUS: u64 = (1 << 61) - 1;

/// Witness bases that make Miller-Rabin deterministic for every `n < 2^64`.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// A verified odd prime `p` with `3 <= p <= 2^61 - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeModulus(u64);

impl TryFrom<u64> for PrimeModulus {
    type Error = Error;

    fn try_from(n: u64) -> Result<Self> {
        check_prime(n as i128)
    }
}

impl From<PrimeModulus> for u64 {
    fn from(p: PrimeModulus) -> u64 {
        p.0
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Validates `n` as an odd prime in the supported range.
///
/// Even numbers (including 2) are rejected: several constructions need the
/// inverse of 2.
pub fn check_prime(n: i128) -> Result<PrimeModulus> {
    if n < 3 || n > MAX_MODULUS as i128 || n % 2 == 0 || !is_prime_u64(n as u64) {
        return Err(Error::NotAPrime(n));
    }
    Ok(PrimeModulus(n as u64))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &MR_BASES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl PrimeModulus {
    pub fn get(self) -> u64 {
        self.0
    }

    /// Reduces an arbitrary-sign integer to its canonical residue.
    pub fn reduce(self, n: i128) -> u64 {
        n.rem_euclid(self.0 as i128) as u64
    }

    pub fn elem(self, n: i128) -> FieldElement {
        FieldElement {
            value: self.reduce(n),
            p: self,
        }
    }

    pub fn zero(self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(self) -> FieldElement {
        self.elem(1)
    }

    #[inline]
    pub fn add(self, x: u64, y: u64) -> u64 {
        let s = x + y;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, x: u64, y: u64) -> u64 {
        if x >= y {
            x - y
        } else {
            x + self.0 - y
        }
    }

    #[inline]
    pub fn neg(self, x: u64) -> u64 {
        if x == 0 {
            0
        } else {
            self.0 - x
        }
    }

    #[inline]
    pub fn mul(self, x: u64, y: u64) -> u64 {
        mul_mod(x, y, self.0)
    }

    pub fn pow(self, x: u64, e: u64) -> u64 {
        pow_mod(x, e, self.0)
    }

    /// Inverse by the extended Euclidean algorithm.
    pub fn inv(self, x: u64) -> Result<u64> {
        if x == 0 {
            return Err(Error::DivisionByZero(self.0));
        }
        let (mut r0, mut r1) = (self.0 as i128, x as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce(t0))
    }

    pub fn div(self, x: u64, y: u64) -> Result<u64> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// Euler's criterion; zero counts as a square.
    pub fn is_square(self, x: u64) -> bool {
        x == 0 || self.pow(x, (self.0 - 1) / 2) == 1
    }

    /// A square root of `x` by Tonelli-Shanks, or `None` for non-residues.
    pub fn sqrt(self, x: u64) -> Option<u64> {
        let p = self.0;
        if x == 0 {
            return Some(0);
        }
        if !self.is_square(x) {
            return None;
        }
        if p % 4 == 3 {
            return Some(self.pow(x, (p + 1) / 4));
        }
        let s = (p - 1).trailing_zeros();
        let q = (p - 1) >> s;
        let z = (2..p).find(|&z| !self.is_square(z)).expect("odd prime has a non-residue");
        let mut m = s;
        let mut c = self.pow(z, q);
        let mut t = self.pow(x, q);
        let mut r = self.pow(x, q.div_ceil(2));
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let b = self.pow(c, 1 << (m - i - 1));
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        Some(r)
    }

    /// The inverse of 2, i.e. `(p + 1) / 2`.
    pub fn half(self) -> u64 {
        self.0.div_ceil(2)
    }
}

/// Binary operations accepted by [`FieldElement::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// A canonical residue together with the field it lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement {
    value: u64,
    p: PrimeModulus,
}

impl FieldElement {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> PrimeModulus {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_field(self, other: Self) -> Result<PrimeModulus> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch {
                left: self.p.0,
                right: other.p.0,
            });
        }
        Ok(self.p)
    }

    /// Checked binary arithmetic; fails when the operands live in different fields.
    pub fn arith(self, op: ArithOp, rhs: Self) -> Result<Self> {
        let p = self.same_field(rhs)?;
        let value = match op {
            ArithOp::Add => p.add(self.value, rhs.value),
            ArithOp::Sub => p.sub(self.value, rhs.value),
            ArithOp::Mul => p.mul(self.value, rhs.value),
        };
        Ok(FieldElement { value, p })
    }

    pub fn inv(self) -> Result<Self> {
        Ok(FieldElement {
            value: self.p.inv(self.value)?,
            p: self.p,
        })
    }

    pub fn pow(self, e: u64) -> Self {
        FieldElement {
            value: self.p.pow(self.value, e),
            p: self.p,
        }
    }

    pub fn is_square(self) -> bool {
        self.p.is_square(self.value)
    }

    pub fn sqrt(self) -> Option<Self> {
        self.p.sqrt(self.value).map(|value| FieldElement { value, p: self.p })
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.p, self.value).cmp(&(other.p, other.value))
    }
}

// The operator impls panic on a modulus mismatch; use `arith` for the checked form.
macro_rules! binop {
    ($tr:ident, $method:ident, $op:expr) => {
        impl $tr for FieldElement {
            type Output = FieldElement;

            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.arith($op, rhs).expect("operands from different fields")
            }
        }
    };
}

binop!(Add, add, ArithOp::Add);
binop!(Sub, sub, ArithOp::Sub);
binop!(Mul, mul, ArithOp::Mul);

impl Neg for FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        FieldElement {
            value: self.p.neg(self.value),
            p: self.p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f7() -> PrimeModulus {
        check_prime(7).unwrap()
    }

    // Independent inverse: search for y with x * y = 1 by enumeration.
    fn inv_by_search(p: u64, x: u64) -> u64 {
        (1..p).find(|y| (x * y) % p == 1).unwrap()
    }

    #[test]
    fn arith_examples() {
        let p = f7();
        assert_eq!((p.elem(6) + p.elem(3)).value(), 2);
        assert_eq!((p.elem(0) - p.elem(1)).value(), 6);
        assert_eq!((p.elem(3) * p.elem(5)).value(), 1);
        assert_eq!((-p.elem(0)).value(), 0);
        assert_eq!(p.elem(-15).value(), 6);
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = f7().elem(1);
        let b = check_prime(11).unwrap().elem(1);
        assert_eq!(
            a.arith(ArithOp::Add, b),
            Err(Error::ModulusMismatch { left: 7, right: 11 })
        );
    }

    #[test]
    fn inverse_examples() {
        let p = f7();
        assert_eq!(p.elem(6).inv().unwrap().value(), 6);
        assert_eq!(p.elem(3).inv().unwrap().value(), inv_by_search(7, 3));
        assert_eq!(p.elem(3).inv().unwrap().value(), 5);
        assert_eq!(p.elem(0).inv(), Err(Error::DivisionByZero(7)));
    }

    #[test]
    fn squares() {
        let f5 = check_prime(5).unwrap();
        assert!(f5.elem(-1).is_square());
        assert!(!f7().elem(-1).is_square());
        assert!(f7().zero().is_square());
        for n in (3..=101u64).filter(|&n| is_prime_u64(n)) {
            let p = check_prime(n as i128).unwrap();
            let squares: std::collections::HashSet<u64> = (1..n).map(|y| (y * y) % n).collect();
            let reported = (1..n).filter(|&x| p.is_square(x)).count() as u64;
            assert_eq!(reported, (n - 1) / 2, "p = {n}");
            for x in 0..n {
                assert_eq!(p.is_square(x), x == 0 || squares.contains(&x));
                if let Some(r) = p.sqrt(x) {
                    assert_eq!(p.mul(r, r), x);
                }
            }
        }
    }

    #[test]
    fn tonelli_shanks_on_p_1_mod_8() {
        // 17 and 41 and 97 exercise the non-trivial branch (p ≡ 1 mod 8).
        for n in [17u64, 41, 97, 257, 65537] {
            let p = check_prime(n as i128).unwrap();
            for x in 1..n.min(2000) {
                match p.sqrt(x) {
                    Some(r) => assert_eq!(p.mul(r, r), x),
                    None => assert!(!p.is_square(x)),
                }
            }
        }
    }

    #[test]
    fn prime_checks() {
        assert_eq!(check_prime(7).unwrap().get(), 7);
        assert_eq!(check_prime(9), Err(Error::NotAPrime(9)));
        assert_eq!(check_prime(2), Err(Error::NotAPrime(2)));
        assert_eq!(check_prime(1), Err(Error::NotAPrime(1)));
        assert!(check_prime(MAX_MODULUS as i128).is_ok());
        assert!(check_prime((1i128 << 61) + 1).is_err());
        // Strong pseudoprimes to several small bases.
        for n in [2047u64, 1373653, 25326001, 3215031751, 3825123056546413051] {
            assert!(!is_prime_u64(n), "{n}");
        }
        let sieve_limit = 10_000usize;
        let mut sieve = vec![true; sieve_limit];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..sieve_limit {
            if sieve[i] {
                for j in (i * i..sieve_limit).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (n, &prime) in sieve.iter().enumerate() {
            assert_eq!(is_prime_u64(n as u64), prime, "{n}");
        }
    }

    #[test]
    fn large_modulus_no_overflow() {
        let p = check_prime(MAX_MODULUS as i128).unwrap();
        let x = MAX_MODULUS - 1;
        assert_eq!(p.mul(x, x), 1);
        assert_eq!(p.mul(x, p.inv(x).unwrap()), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn inverse_round_trip(x in 1u64..MAX_MODULUS) {
            let p = check_prime(MAX_MODULUS as i128).unwrap();
            let y = p.inv(x).unwrap();
            prop_assert_eq!(p.mul(x, y), 1);
            prop_assert_eq!(p.inv(y).unwrap(), x);
        }

        #[test]
        fn ring_axioms(a in 0u64..1_000_003, b in 0u64..1_000_003, c in 0u64..1_000_003) {
            let p = check_prime(1_000_003).unwrap();
            let (a, b, c) = (p.elem(a as i128), p.elem(b as i128), p.elem(c as i128));
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!(a * b, b * a);
            prop_assert_eq!(a * (b + c), a * b + a * c);
            prop_assert_eq!(a - a, p.zero());
        }
    }
}
