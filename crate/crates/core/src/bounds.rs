//! Bound evaluators and the report record that pairs them with exact counts.
//!
//! Asymptotic bounds are evaluated with implicit constant 1 and are never
//! asserted. Exact-constant bounds are compared against the integer count;
//! the `f64` comparison is exact while the count stays below 2⁵³.
//!
//! Regime thresholds are decided in integer arithmetic (for example
//! `|H| ≤ |A|^{3/2}` as `|H|² ≤ |A|³`), so boundary cases fall on the
//! documented side regardless of rounding.

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

/// Largest empirical value for which `empirical as f64 ≤ bound` is an exact test.
pub const EXACT_COMPARISON_LIMIT: u128 = 1 << 53;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Sigma,
    Energy,
    T3,
    T4,
    Q,
    Mk,
    Lk,
    Charsum,
    Eplus,
    Sumprod,
    Minkowski,
    Cschain,
    Borel,
}

impl Quantity {
    pub const ALL: [Quantity; 13] = [
        Quantity::Sigma,
        Quantity::Energy,
        Quantity::T3,
        Quantity::T4,
        Quantity::Q,
        Quantity::Mk,
        Quantity::Lk,
        Quantity::Charsum,
        Quantity::Eplus,
        Quantity::Sumprod,
        Quantity::Minkowski,
        Quantity::Cschain,
        Quantity::Borel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Sigma => "sigma",
            Quantity::Energy => "energy",
            Quantity::T3 => "t3",
            Quantity::T4 => "t4",
            Quantity::Q => "q",
            Quantity::Mk => "mk",
            Quantity::Lk => "lk",
            Quantity::Charsum => "charsum",
            Quantity::Eplus => "eplus",
            Quantity::Sumprod => "sumprod",
            Quantity::Minkowski => "minkowski",
            Quantity::Cschain => "cschain",
            Quantity::Borel => "borel",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Quantity {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| crate::Error::InvalidArgument(format!("unknown quantity '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    /// A bound with explicit constants; exceeding it is a failure.
    ExactConstant,
    /// A bound stated up to an unspecified constant; reported, never asserted.
    Asymptotic,
}

impl fmt::Display for Exactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Exactness::ExactConstant => "exact-constant",
            Exactness::Asymptotic => "asymptotic",
        })
    }
}

/// Sizes a bound was evaluated at; absent entries do not apply to the quantity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ReportInputs {
    pub p: u64,
    pub card_A: Option<u64>,
    pub card_H: Option<u64>,
    pub M: Option<u64>,
    pub k: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub quantity: Quantity,
    pub inputs: ReportInputs,
    pub empirical: u128,
    pub bound: f64,
    /// `empirical / bound`, absent when the bound is zero.
    pub ratio: Option<f64>,
    pub regime: String,
    pub exactness: Exactness,
}

impl BoundReport {
    pub const CSV_HEADER: [&'static str; 11] = [
        "quantity",
        "p",
        "card_A",
        "card_H",
        "M",
        "k",
        "empirical",
        "bound",
        "ratio",
        "regime",
        "exactness",
    ];

    /// `Some(ok)` for exact-constant reports, `None` for asymptotic ones.
    pub fn passed(&self) -> Option<bool> {
        match self.exactness {
            Exactness::Asymptotic => None,
            Exactness::ExactConstant => Some((self.empirical as f64) <= self.bound),
        }
    }

    /// True unless this is an exact-constant report whose bound is exceeded.
    pub fn is_violation(&self) -> bool {
        self.passed() == Some(false)
    }

    /// Fields in [`Self::CSV_HEADER`] order; reals use 12 significant digits.
    pub fn csv_record(&self) -> Vec<String> {
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.quantity.to_string(),
            self.inputs.p.to_string(),
            opt(self.inputs.card_A),
            opt(self.inputs.card_H),
            opt(self.inputs.M),
            opt(self.inputs.k),
            self.empirical.to_string(),
            format_sig12(self.bound),
            self.ratio.map(format_sig12).unwrap_or_default(),
            self.regime.clone(),
            self.exactness.to_string(),
        ]
    }
}

/// Formats with 12 significant digits and a '.' separator; scientific outside [1e-5, 1e12).
pub fn format_sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.00000000000".into();
    }
    let e = x.abs().log10().floor() as i32;
    if !(-5..12).contains(&e) {
        return format!("{x:.11e}");
    }
    let s = format!("{:.*}", (11 - e) as usize, x);
    // Rounding can carry into a new leading digit (9.99… → 10.0…); drop the extra digit.
    if s.trim_start_matches('-').split('.').next().map_or(0, |int| int.trim_start_matches('0').len())
        > (e + 1).max(0) as usize
        && e < 11
    {
        return format!("{:.*}", (10 - e).max(0) as usize, x);
    }
    s
}

pub fn make_report(
    quantity: Quantity,
    inputs: ReportInputs,
    empirical: u128,
    bound: f64,
    regime: impl Into<String>,
    exactness: Exactness,
) -> BoundReport {
    let ratio = (bound > 0.0).then(|| empirical as f64 / bound);
    BoundReport {
        quantity,
        inputs,
        empirical,
        bound,
        ratio,
        regime: regime.into(),
        exactness,
    }
}

/// An evaluated bound: its value, which case fired, and whether its hypotheses hold.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    pub regime: String,
    pub applicable: bool,
}

impl Evaluated {
    fn new(value: f64, regime: impl Into<String>, applicable: bool) -> Self {
        Evaluated {
            value,
            regime: regime.into(),
            applicable,
        }
    }

    /// Regime tag with a marker appended when the hypotheses fail.
    pub fn tag(&self) -> String {
        if self.applicable {
            self.regime.clone()
        } else {
            format!("{};outside-hypotheses", self.regime)
        }
    }
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// `x^e ≤ y^f` in exact integer arithmetic.
fn pow_le(x: u64, e: u32, y: u64, f: u32) -> bool {
    big(x).pow(e) <= big(y).pow(f)
}

fn pw(x: u64, e: f64) -> f64 {
    (x as f64).powf(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MainBound {
    Sigma1,
    Sigma2,
    Sigma2Cartesian,
}

/// The two-term incidence bounds for σ(A, H) with the rich-line parameter `m`.
///
/// `p` (when known) feeds the `|A| < √p` hypothesis into the applicability flag,
/// together with `|H| > |A|`.
pub fn eval_main_theorem(card_a: u64, card_h: u64, m: u64, p: Option<u64>, which: MainBound) -> Evaluated {
    let applicable = card_h > card_a && p.is_none_or(|p| (card_a as u128).pow(2) < p as u128);
    let (a, h) = (card_a, card_h);
    match which {
        MainBound::Sigma1 => {
            let (m1, regime) = if pow_le(h, 2, a, 3) {
                (m as f64, "M1=M")
            } else {
                (pw(h, 2.0 / 11.0) * pw(a, 8.0 / 11.0), "M1=H^(2/11)A^(8/11)")
            };
            let value = pw(a, 0.5) * h as f64 + pw(a, 1.2) * pw(h, 0.8) * m1.powf(0.1);
            Evaluated::new(value, regime, applicable)
        }
        MainBound::Sigma2 => {
            let (m2, regime) = if pow_le(h, 3, a, 4) {
                (m as f64, "M2=M")
            } else {
                (pw(h, 3.0 / 22.0) * pw(a, 9.0 / 11.0), "M2=H^(3/22)A^(9/11)")
            };
            let value = pw(a, 0.75) * h as f64
                + pw(a, 1.1) * pw(h, 0.85) * (m2.powf(0.1) + pw(h, 1.0 / 15.0));
            Evaluated::new(value, regime, applicable)
        }
        MainBound::Sigma2Cartesian => {
            let value = pw(a, 0.75) * h as f64 + pw(a, 1.1) * pw(h, 0.85) * pw(h, 1.0 / 16.0);
            Evaluated::new(value, "cartesian", applicable)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FpExtra {
    Sigma1Ext,
    Sigma2Ext,
}

/// The extra term that lifts the `|A| < √p` restriction, with its validity condition.
pub fn eval_fp_extras(card_a: u64, card_h: u64, p: u64, which: FpExtra) -> (bool, f64) {
    match which {
        FpExtra::Sigma1Ext => {
            let valid = big(card_a) * big(card_h).pow(2) <= big(p).pow(3);
            (valid, pw(card_a, 1.25) * card_h as f64 / pw(p, 0.25))
        }
        FpExtra::Sigma2Ext => {
            let valid = big(card_a) * big(card_h).pow(4) <= big(p).pow(5);
            (valid, pw(card_a, 1.125) * card_h as f64 / pw(p, 0.125))
        }
    }
}

/// Incidences between `A × A` and `H` over F_p: `|H||A|²/p + |A|^{1/2}|H| + min(…)`.
pub fn eval_incidence_hb(card_a: u64, card_h: u64, p: u64) -> Evaluated {
    let (a, h) = (card_a, card_h);
    let first = pw(a, 1.4) * pw(h, 0.8);
    let second = pw(p, 1.0 / 3.0) * pw(a, 4.0 / 3.0) * pw(h, 2.0 / 3.0);
    // first ≤ second  ⇔  A^{1/15} H^{2/15} ≤ p^{1/3}  ⇔  A H² ≤ p⁵
    let (min, regime) = if big(a) * big(h).pow(2) <= big(p).pow(5) {
        (first, "A^(7/5)H^(4/5)")
    } else {
        (second, "p^(1/3)A^(4/3)H^(2/3)")
    };
    let value = h as f64 * (a as f64).powi(2) / p as f64 + pw(a, 0.5) * h as f64 + min;
    Evaluated::new(value, regime, true)
}

/// Rich hyperbolae: `min(|A|⁷/k⁵, p|A|⁴/k³)`; applicable (the sharper claim) when `k > √|A|`.
pub fn eval_mk_bb(card_a: u64, k: u64, p: u64) -> Evaluated {
    let k = k.max(1);
    let sparse = pw(card_a, 7.0) / pw(k, 5.0);
    let dense = p as f64 * pw(card_a, 4.0) / pw(k, 3.0);
    // sparse ≤ dense  ⇔  |A|³ ≤ p k²
    let (value, regime) = if big(card_a).pow(3) <= big(p) * big(k).pow(2) {
        (sparse, "A^7/k^5")
    } else {
        (dense, "pA^4/k^3")
    };
    let applicable = (k as u128).pow(2) > card_a as u128;
    Evaluated::new(value, regime, applicable)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineBound {
    /// Point-line incidences for `A × A` and a set of `card_l` lines; valid when `|A||L| < p²`.
    Sdz { card_a: u64, card_l: u64 },
    /// Rich lines in `A × A`: `min(p|A|²/k², |A|⁵/k⁴)`.
    Lk { card_a: u64, k: u64 },
}

pub fn eval_lines(which: LineBound, p: u64) -> Evaluated {
    match which {
        LineBound::Sdz { card_a, card_l } => {
            let value = pw(card_a, 1.25) * pw(card_l, 0.75) + card_l as f64 + (card_a as f64).powi(2);
            let valid = (card_a as u128) * (card_l as u128) < (p as u128).pow(2);
            Evaluated::new(value, "sdz", valid)
        }
        LineBound::Lk { card_a, k } => {
            let k = k.max(1);
            let dense = p as f64 * (card_a as f64).powi(2) / (k as f64).powi(2);
            let sparse = pw(card_a, 5.0) / pw(k, 4.0);
            // sparse ≤ dense  ⇔  |A|³ ≤ p k²
            let (value, regime) = if big(card_a).pow(3) <= big(p) * big(k).pow(2) {
                (sparse, "A^5/k^4")
            } else {
                (dense, "pA^2/k^2")
            };
            Evaluated::new(value, regime, true)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum T3Bound {
    /// `|H|³M² +` the three-case term.
    LemmaT3bd,
    /// Nonzero-distance rectangular quadruples.
    Qstar,
}

/// Case split on `|H|` against `p` and `p^{5/4}`.
fn t3_case(card_h: u64, p: u64) -> u8 {
    if big(card_h).pow(4) > big(p).pow(5) {
        2
    } else if card_h >= p {
        1
    } else {
        0
    }
}

pub fn eval_t3_bounds(card_h: u64, m: u64, p: u64, which: T3Bound) -> Evaluated {
    let h = card_h as f64;
    let case = t3_case(card_h, p);
    let regime = ["H<p", "p<=H<=p^(5/4)", "H>p^(5/4)"][case as usize];
    match which {
        T3Bound::LemmaT3bd => {
            let tail = match case {
                2 => h.powi(5) / p as f64,
                1 => pw(p, 2.0 / 3.0) * h.powf(3.0 + 2.0 / 3.0),
                _ => h.powf(4.0 + 1.0 / 3.0),
            };
            Evaluated::new(h.powi(3) * (m as f64).powi(2) + tail, regime, true)
        }
        T3Bound::Qstar => {
            let value = match case {
                2 => h.powi(4) / p as f64,
                1 => pw(p, 2.0 / 3.0) * h.powf(8.0 / 3.0),
                _ => h.powf(10.0 / 3.0),
            };
            Evaluated::new(value, regime, true)
        }
    }
}

/// The character-sum incidence bound `|A|²|H|/p + 2|A|√(p|H|)`; exact constants.
pub fn eval_charsum(card_a: u64, card_h: u64, p: u64) -> f64 {
    let (a, h, p) = (card_a as f64, card_h as f64, p as f64);
    a * a * h / p + 2.0 * a * (p * h).sqrt()
}

/// `2|H|Q(H) + 2|H|⁴`, the exact-constant bound on T₃.
pub fn t3_exact_bound(card_h: u64, q: u128) -> u128 {
    let h = card_h as u128;
    2 * h * q + 2 * h.pow(4)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: f64, y: f64) -> bool {
        (x - y).abs() <= 1e-9 * y.abs().max(1.0)
    }

    #[test]
    fn main_theorem_examples() {
        let e = eval_main_theorem(1, 1, 1, None, MainBound::Sigma1);
        assert!(close(e.value, 2.0));
        assert_eq!(e.regime, "M1=M");
        assert!(!e.applicable);
        let e = eval_main_theorem(16, 64, 3, Some(1009), MainBound::Sigma1);
        assert_eq!(e.regime, "M1=M");
        assert!(e.applicable);
        assert_eq!(eval_main_theorem(16, 65, 3, None, MainBound::Sigma1).regime, "M1=H^(2/11)A^(8/11)");
        // |H| = |A|²: M₁ = |A|^{12/11}.
        let a = 10u64;
        let e = eval_main_theorem(a, a * a, 1, None, MainBound::Sigma1);
        let m1 = (a as f64).powf(12.0 / 11.0);
        let expect = (a as f64).sqrt() * (a * a) as f64
            + (a as f64).powf(1.2) * ((a * a) as f64).powf(0.8) * m1.powf(0.1);
        assert!(close(e.value, expect));
        // |H| ≤ |A|^{4/3}: 16 = 8^{4/3} boundary is inclusive.
        assert_eq!(eval_main_theorem(8, 16, 1, None, MainBound::Sigma2).regime, "M2=M");
        assert_eq!(eval_main_theorem(8, 17, 1, None, MainBound::Sigma2).regime, "M2=H^(3/22)A^(9/11)");
        assert_eq!(eval_main_theorem(8, 64, 1, Some(101), MainBound::Sigma2Cartesian).regime, "cartesian");
    }

    #[test]
    fn fp_extras_examples() {
        for p in [3, 101, 1009] {
            let (valid, extra) = eval_fp_extras(1, 1, p, FpExtra::Sigma1Ext);
            assert!(valid);
            assert!(close(extra, (p as f64).powf(-0.25)));
        }
        assert!(!eval_fp_extras(8, 100, 7, FpExtra::Sigma1Ext).0);
        assert!(eval_fp_extras(10, 100, 101, FpExtra::Sigma1Ext).0);
        assert!(eval_fp_extras(10, 100, 101, FpExtra::Sigma2Ext).0);
        assert!(!eval_fp_extras(10, 200, 101, FpExtra::Sigma2Ext).0);
    }

    #[test]
    fn incidence_hb_examples() {
        let p = 101;
        assert!(close(eval_incidence_hb(1, 1, p).value, 1.0 / 101.0 + 2.0));
        let mut last = 0.0;
        for h in 1..500 {
            let v = eval_incidence_hb(20, h, p).value;
            assert!(v >= last);
            last = v;
        }
        // Branch switch where A H² = p⁵.
        let p = 7u64;
        let a = 7u64;
        let h = 7u64.pow(2);
        assert_eq!(eval_incidence_hb(a, h, p).regime, "A^(7/5)H^(4/5)");
        assert_eq!(eval_incidence_hb(a, h + 1, p).regime, "p^(1/3)A^(4/3)H^(2/3)");
    }

    #[test]
    fn mk_examples() {
        let (a, p) = (20u64, 1009u64);
        let e = eval_mk_bb(a, a, p);
        assert!(close(e.value, ((a * a) as f64).min((p * a) as f64)));
        assert!(!eval_mk_bb(16, 4, p).applicable);
        assert!(eval_mk_bb(16, 5, p).applicable);
        // Crossover at k² = |A|³/p.
        let (a, p) = (16u64, 4u64);
        assert_eq!(eval_mk_bb(a, 32, p).regime, "A^7/k^5");
        assert_eq!(eval_mk_bb(a, 31, p).regime, "pA^4/k^3");
    }

    #[test]
    fn line_examples() {
        let e = eval_lines(LineBound::Sdz { card_a: 1, card_l: 1 }, 7);
        assert!(close(e.value, 3.0) && e.applicable);
        assert!(!eval_lines(LineBound::Sdz { card_a: 7, card_l: 7 }, 7).applicable);
        for (a, p) in [(5u64, 101u64), (50, 7)] {
            let e = eval_lines(LineBound::Lk { card_a: a, k: a }, p);
            assert!(close(e.value, (p as f64).min(a as f64)));
        }
        assert_eq!(eval_lines(LineBound::Lk { card_a: 16, k: 32 }, 4).regime, "A^5/k^4");
        assert_eq!(eval_lines(LineBound::Lk { card_a: 16, k: 31 }, 4).regime, "pA^2/k^2");
    }

    #[test]
    fn t3_examples() {
        let e = eval_t3_bounds(1, 3, 101, T3Bound::LemmaT3bd);
        assert!(close(e.value, 10.0));
        assert_eq!(e.regime, "H<p");
        assert_eq!(eval_t3_bounds(100, 1, 101, T3Bound::Qstar).regime, "H<p");
        assert_eq!(eval_t3_bounds(101, 1, 101, T3Bound::Qstar).regime, "p<=H<=p^(5/4)");
        // 16⁴ = 2¹⁶ vs 8⁵ = 2¹⁵: 16 > 8^{5/4}.
        assert_eq!(eval_t3_bounds(16, 1, 8, T3Bound::Qstar).regime, "H>p^(5/4)");
        assert_eq!(eval_t3_bounds(13, 1, 11, T3Bound::Qstar).regime, "p<=H<=p^(5/4)");
        let e = eval_t3_bounds(10, 1, 101, T3Bound::Qstar);
        assert!(close(e.value, 10f64.powf(10.0 / 3.0)));
    }

    #[test]
    fn charsum_example() {
        let v = eval_charsum(2, 1, 7);
        assert!(close(v, 4.0 / 7.0 + 4.0 * 7f64.sqrt()));
        assert!(v > 11.1 && v < 11.2);
    }

    #[test]
    fn reports() {
        let inputs = ReportInputs {
            p: 7,
            card_A: Some(2),
            card_H: Some(1),
            ..Default::default()
        };
        let r = make_report(Quantity::Charsum, inputs, 2, eval_charsum(2, 1, 7), "", Exactness::ExactConstant);
        assert_eq!(r.passed(), Some(true));
        let r = make_report(Quantity::Mk, inputs, 50, 1.0, "x", Exactness::Asymptotic);
        assert_eq!(r.passed(), None);
        assert!(!r.is_violation());
        let r = make_report(Quantity::Sigma, inputs, 3, 0.0, "", Exactness::ExactConstant);
        assert_eq!(r.ratio, None);
        assert!(r.is_violation());
    }

    #[test]
    fn sig12() {
        assert_eq!(format_sig12(0.465), "0.465000000000");
        assert_eq!(format_sig12(1.0), "1.00000000000");
        assert_eq!(format_sig12(11.1534), "11.1534000000");
        assert_eq!(format_sig12(9.9999999999999), "10.0000000000");
        assert_eq!(format_sig12(123456789012.0), "123456789012");
        assert_eq!(format_sig12(1.5e13), "1.50000000000e13");
        assert_eq!(format_sig12(0.0), "0.00000000000");
        for x in [0.123, 4.56e-3, 7.0, 98765.4321] {
            let s = format_sig12(x);
            assert!(!s.contains(','));
            let digits = s.chars().filter(|c| c.is_ascii_digit()).collect::<String>();
            assert_eq!(digits.trim_start_matches('0').len(), 12, "{s}");
        }
    }

    #[test]
    fn quantity_names_round_trip() {
        for q in Quantity::ALL {
            assert_eq!(q.name().parse::<Quantity>().unwrap(), q);
            assert_eq!(serde_json::to_string(&q).unwrap(), format!("\"{q}\""));
        }
        assert_eq!(serde_json::to_string(&Exactness::ExactConstant).unwrap(), "\"exact-constant\"");
    }
}
