//! Brute-force reference counts for small inputs.
//!
//! These share no code with [`crate::counts`] beyond set storage: matrices are
//! plain `i128` arrays multiplied by hand, incidence is tested from the curve
//! equation, and energies are counted tuple by tuple. Each function refuses
//! inputs outside its size budget with [`Error::ResourceLimit`].

use crate::error::{Error, Result};
use crate::moebius::Lambda;
use crate::sets::{ScalarSet, TranslateSet};

pub const ENERGY_MAX_H: usize = 32;
pub const T3_MAX_H: usize = 10;
pub const Q_MAX_H: usize = 32;
pub const MK_MAX_P: u64 = 61;
pub const ADDITIVE_MAX: usize = 24;
pub const PRODREP_MAX: usize = 6;
pub const SUMPROD_MAX: usize = 16;
pub const MINKOWSKI_MAX: usize = 12;

type Mat = [i128; 4];

fn limit(what: &'static str, required: usize, max: usize) -> Result<()> {
    if required > max {
        return Err(Error::ResourceLimit {
            what,
            required: required as u128,
            limit: max as u128,
        });
    }
    Ok(())
}

fn md(x: i128, p: i128) -> i128 {
    x.rem_euclid(p)
}

fn mat_mul(x: &Mat, y: &Mat, p: i128) -> Mat {
    [
        md(x[0] * y[0] + x[1] * y[2], p),
        md(x[0] * y[1] + x[1] * y[3], p),
        md(x[2] * y[0] + x[3] * y[2], p),
        md(x[2] * y[1] + x[3] * y[3], p),
    ]
}

/// The determinant-one matrix of `x ↦ a - 1/(x - b)`.
fn translate_matrix(a: i128, b: i128, p: i128) -> Mat {
    [md(a, p), md(-a * b - 1, p), 1, md(-b, p)]
}

fn adjugate(x: &Mat, p: i128) -> Mat {
    [x[3], md(-x[1], p), md(-x[2], p), x[0]]
}

fn matrices(h: &TranslateSet) -> Vec<Mat> {
    let p = h.modulus().get() as i128;
    h.elements()
        .iter()
        .map(|t| translate_matrix(t.a as i128, t.b as i128, p))
        .collect()
}

/// `#{(x, y) ∈ A², h ∈ H : (x - b)(y - a) = λ}`.
pub fn sigma_naive(a: &ScalarSet, h: &TranslateSet, lambda: &Lambda) -> u64 {
    let p = a.modulus().get() as i128;
    let lam = lambda.value() as i128;
    let mut count = 0;
    for t in h.elements() {
        for &x in a.elements() {
            for &y in a.elements() {
                let lhs = (x as i128 - t.b as i128) * (y as i128 - t.a as i128);
                if md(lhs - lam, p) == 0 {
                    count += 1;
                }
            }
        }
    }
    count
}

/// `#{h₁h₂⁻¹ = h₁'h₂'⁻¹}` over H⁴.
pub fn energy_naive(h: &TranslateSet) -> Result<u128> {
    limit("naive energy (|H|)", h.len(), ENERGY_MAX_H)?;
    let p = h.modulus().get() as i128;
    let m = matrices(h);
    let quotients: Vec<Mat> = m
        .iter()
        .flat_map(|x| m.iter().map(move |y| mat_mul(x, &adjugate(y, p), p)))
        .collect();
    let mut count = 0u128;
    for x in &quotients {
        for y in &quotients {
            if x == y {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// `#{h₁h₂⁻¹h₃ = h₄h₅⁻¹h₆}` over H⁶.
pub fn t3_naive(h: &TranslateSet) -> Result<u128> {
    limit("naive t3 (|H|)", h.len(), T3_MAX_H)?;
    let p = h.modulus().get() as i128;
    let m = matrices(h);
    let mut triples = Vec::with_capacity(m.len().pow(3));
    for x in &m {
        for y in &m {
            let xy = mat_mul(x, &adjugate(y, p), p);
            for z in &m {
                triples.push(mat_mul(&xy, z, p));
            }
        }
    }
    let mut count = 0u128;
    for x in &triples {
        for y in &triples {
            if x == y {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// `#{(a₁ - a₁')(b₁ - b₁') = (a₂ - a₂')(b₂ - b₂')}` over H⁴.
pub fn q_naive(h: &TranslateSet) -> Result<u128> {
    limit("naive Q (|H|)", h.len(), Q_MAX_H)?;
    let p = h.modulus().get() as i128;
    let e = h.elements();
    let d = |i: usize, j: usize| {
        md((e[i].a as i128 - e[j].a as i128) * (e[i].b as i128 - e[j].b as i128), p)
    };
    let n = e.len();
    let mut count = 0u128;
    for i in 0..n {
        for j in 0..n {
            let left = d(i, j);
            for k in 0..n {
                for l in 0..n {
                    if d(k, l) == left {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// m_k by scanning all p² translates; needs p ≤ 61.
pub fn mk_exhaustive(a: &ScalarSet, k: usize, lambda: &Lambda) -> Result<u64> {
    let p = a.modulus().get();
    limit("exhaustive m_k (p)", p as usize, MK_MAX_P as usize)?;
    let (pi, lam) = (p as i128, lambda.value() as i128);
    let mut count = 0;
    for ta in 0..pi {
        for tb in 0..pi {
            let mut on = 0;
            for &x in a.elements() {
                for &y in a.elements() {
                    if md((x as i128 - tb) * (y as i128 - ta) - lam, pi) == 0 {
                        on += 1;
                    }
                }
            }
            if on >= k {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// l_k over all p² + p lines of F_p²; needs p ≤ 61.
pub fn lk_exhaustive(b: &ScalarSet, c: &ScalarSet, k: usize, include_axis_parallel: bool) -> Result<u64> {
    let p = b.modulus().get();
    limit("exhaustive l_k (p)", p as usize, MK_MAX_P as usize)?;
    let pi = p as i128;
    let mut count = 0;
    // Vertical lines x = v.
    if include_axis_parallel && c.len() >= k {
        count += b.len() as u64;
    }
    for m in 0..pi {
        if m == 0 && !include_axis_parallel {
            continue;
        }
        for q in 0..pi {
            let mut on = 0;
            for &x in b.elements() {
                let y = md(m * x as i128 + q, pi) as u64;
                if c.contains(y) {
                    on += 1;
                }
            }
            if on >= k {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// `#{b₁ - b₂ = b₃ - b₄}` over B⁴.
pub fn additive_energy_naive(b: &ScalarSet) -> Result<u128> {
    limit("naive additive energy (|B|)", b.len(), ADDITIVE_MAX)?;
    let p = b.modulus().get() as i128;
    let e: Vec<i128> = b.elements().iter().map(|&x| x as i128).collect();
    let mut count = 0;
    for &x1 in &e {
        for &x2 in &e {
            for &x3 in &e {
                for &x4 in &e {
                    if md(x1 - x2 - x3 + x4, p) == 0 {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// `#{(b₁ - b₂)(b₃ - b₄) = (b₅ - b₆)(b₇ - b₈)}` over B⁸.
pub fn product_rep_energy_naive(b: &ScalarSet) -> Result<u128> {
    limit("naive product energy (|B|)", b.len(), PRODREP_MAX)?;
    let p = b.modulus().get() as i128;
    let e: Vec<i128> = b.elements().iter().map(|&x| x as i128).collect();
    let mut products = Vec::new();
    for &x1 in &e {
        for &x2 in &e {
            for &x3 in &e {
                for &x4 in &e {
                    products.push(md((x1 - x2) * (x3 - x4), p));
                }
            }
        }
    }
    let mut count = 0;
    for x in &products {
        for y in &products {
            if x == y {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Solutions in A⁴ of sum-product variant `variant` (1..=4).
pub fn sumprod_naive(a: &ScalarSet, variant: usize) -> Result<u64> {
    limit("naive sum-product (|A|)", a.len(), SUMPROD_MAX)?;
    let p = a.modulus().get() as i128;
    let e: Vec<i128> = a.elements().iter().map(|&x| x as i128).collect();
    let mut count = 0;
    for &a1 in &e {
        for &a2 in &e {
            for &a3 in &e {
                for &a4 in &e {
                    let value = match variant {
                        1 => (a1 + a2) * (a3 + a4),
                        2 => (a1 + a2 - a4) * (a3 + a2 + a4),
                        3 => (a1 + a2) * (a3 + a2 * a4),
                        4 => (a1 + a2 + a4) * (a3 + a2 * a4),
                        _ => return Err(Error::InvalidArgument(format!("variant {variant}"))),
                    };
                    if md(value - 1, p) == 0 {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// `#{((x, y), (x', y')) : (x - x')² - (y - y')² = λ}` over (A × A)².
pub fn minkowski_naive(a: &ScalarSet, lambda: &Lambda) -> Result<u64> {
    limit("naive Minkowski (|A|)", a.len(), MINKOWSKI_MAX)?;
    let p = a.modulus().get() as i128;
    let lam = lambda.value() as i128;
    let e: Vec<i128> = a.elements().iter().map(|&x| x as i128).collect();
    let mut count = 0;
    for &x in &e {
        for &y in &e {
            for &x2 in &e {
                for &y2 in &e {
                    let (dx, dy) = (x - x2, y - y2);
                    if md(dx * dx - dy * dy - lam, p) == 0 {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// `Σ_{x upper triangular} r²_{HH⁻¹H}(x)` by enumeration over H⁶.
pub fn borel_t3_naive(h: &TranslateSet) -> Result<u128> {
    limit("naive Borel t3 (|H|)", h.len(), T3_MAX_H)?;
    let p = h.modulus().get() as i128;
    let m = matrices(h);
    let mut triples = Vec::new();
    for x in &m {
        for y in &m {
            let xy = mat_mul(x, &adjugate(y, p), p);
            for z in &m {
                let t = mat_mul(&xy, z, p);
                if t[2] == 0 {
                    triples.push(t);
                }
            }
        }
    }
    let mut count = 0u128;
    for x in &triples {
        for y in &triples {
            if x == y {
                count += 1;
            }
        }
    }
    Ok(count)
}
