//! One quantity on one instance, paired with every bound that applies to it.
//!
//! The first report of each list is the headline row used by scans.

use anyhow::{Context, Result};
use hyperlab::bounds::{
    self, eval_charsum, eval_fp_extras, eval_incidence_hb, eval_lines, eval_main_theorem, eval_mk_bb,
    eval_t3_bounds, make_report, Evaluated, FpExtra, LineBound, MainBound, ReportInputs, T3Bound,
};
use hyperlab::counts::{self, KeyMode, Line, SumProductVariant};
use hyperlab::prelude::*;

use crate::config::{Instance, RunOptions};

fn need<'a, T>(set: &'a Option<T>, flag: &str, quantity: Quantity) -> Result<&'a T> {
    set.as_ref()
        .with_context(|| format!("compute {quantity} needs {flag}"))
}

/// ⌈n^{3/4}⌉, at least 2.
pub fn default_k(n: usize) -> usize {
    let mut k = (n as f64).powf(0.75).ceil() as usize;
    // Exact correction for floating error: smallest k with k⁴ ≥ n³.
    while k > 0 && (k as u128 - 1).pow(4) >= (n as u128).pow(3) {
        k -= 1;
    }
    while (k as u128).pow(4) < (n as u128).pow(3) {
        k += 1;
    }
    k.max(2)
}

fn line_multiplicity(h: &TranslateSet) -> u64 {
    h.max_line_multiplicity().unwrap_or(0) as u64
}

fn tagged(name: &str, e: &Evaluated) -> String {
    format!("{name};{}", e.tag())
}

/// `H = B × B` for some B.
fn is_square_cartesian(h: &TranslateSet) -> bool {
    let mut a: Vec<u64> = h.elements().iter().map(|t| t.a).collect();
    let mut b: Vec<u64> = h.elements().iter().map(|t| t.b).collect();
    a.sort_unstable();
    a.dedup();
    b.sort_unstable();
    b.dedup();
    a == b && a.len() * b.len() == h.len()
}

pub fn compute(quantity: Quantity, inst: &Instance, opts: &RunOptions) -> Result<Vec<BoundReport>> {
    let p = inst.p;
    let lambda = Lambda::new(p, opts.lambda)?;
    let pv = p.get();
    let group_structured = || {
        lambda
            .require_standard()
            .with_context(|| format!("{quantity} is defined through the group action and needs --lambda -1"))
    };
    let mut out = Vec::new();
    match quantity {
        Quantity::Sigma | Quantity::Charsum => {
            let a = need(&inst.a, "--A", quantity)?;
            let h = need(&inst.h, "--H", quantity)?;
            let s = sigma(a, h, &lambda) as u128;
            let (na, nh, m) = (a.len() as u64, h.len() as u64, line_multiplicity(h));
            let inputs = ReportInputs {
                p: pv,
                card_A: Some(a.len() as u64),
                card_H: Some(h.len() as u64),
                M: Some(m),
                k: None,
            };
            let s1 = eval_main_theorem(na, nh, m.max(1), Some(pv), MainBound::Sigma1);
            out.push(make_report(Quantity::Sigma, inputs, s, s1.value, tagged("sigma1", &s1), Exactness::Asymptotic));
            let s2 = eval_main_theorem(na, nh, m.max(1), Some(pv), MainBound::Sigma2);
            out.push(make_report(Quantity::Sigma, inputs, s, s2.value, tagged("sigma2", &s2), Exactness::Asymptotic));
            if is_square_cartesian(h) {
                let sc = eval_main_theorem(na, nh, m.max(1), Some(pv), MainBound::Sigma2Cartesian);
                out.push(make_report(Quantity::Sigma, inputs, s, sc.value, tagged("sigma2", &sc), Exactness::Asymptotic));
            }
            for (which, base, name) in [(FpExtra::Sigma1Ext, &s1, "sigma1+fp-extra"), (FpExtra::Sigma2Ext, &s2, "sigma2+fp-extra")] {
                let (valid, extra) = eval_fp_extras(na, nh, pv, which);
                let regime = if valid { name.to_string() } else { format!("{name};outside-hypotheses") };
                out.push(make_report(Quantity::Sigma, inputs, s, base.value + extra, regime, Exactness::Asymptotic));
            }
            let hb = eval_incidence_hb(na, nh, pv);
            out.push(make_report(Quantity::Sigma, inputs, s, hb.value, tagged("incidence-hb", &hb), Exactness::Asymptotic));
            out.push(make_report(Quantity::Charsum, inputs, s, eval_charsum(na, nh, pv), "charsum", Exactness::ExactConstant));
            out.push(make_report(Quantity::Sigma, inputs, s, (na * nh) as f64, "trivial", Exactness::ExactConstant));
        }
        Quantity::Energy => {
            group_structured()?;
            let h = need(&inst.h, "--H", quantity)?;
            let (n, m) = (h.len() as u128, line_multiplicity(h));
            let e = t_k_with(h, 2, opts.keys, &opts.count)?;
            let inputs = ReportInputs {
                p: pv,
                card_H: Some(h.len() as u64),
                M: Some(m),
                ..Default::default()
            };
            let keys = match opts.keys {
                KeyMode::Sl2 => "sl2",
                KeyMode::Projective => "projective",
            };
            out.push(make_report(
                quantity,
                inputs,
                e,
                (n * n * m as u128) as f64,
                format!("H^2M;{keys}"),
                Exactness::Asymptotic,
            ));
            if opts.keys == KeyMode::Sl2 {
                out.push(make_report(quantity, inputs, e, (2 * n * n * m as u128) as f64, "2H^2M", Exactness::ExactConstant));
                out.push(make_report(quantity, inputs, e, n.pow(3) as f64, "trivial", Exactness::ExactConstant));
            }
        }
        Quantity::T3 => {
            group_structured()?;
            let h = need(&inst.h, "--H", quantity)?;
            let (n, m) = (h.len() as u64, line_multiplicity(h));
            let t3 = t_k_with(h, 3, opts.keys, &opts.count)?;
            let inputs = ReportInputs {
                p: pv,
                card_H: Some(n),
                M: Some(m),
                ..Default::default()
            };
            if opts.keys == KeyMode::Sl2 {
                let exact = bounds::t3_exact_bound(n, q_rect(h));
                out.push(make_report(quantity, inputs, t3, exact as f64, "2HQ+2H^4", Exactness::ExactConstant));
            }
            let e = eval_t3_bounds(n, m, pv, T3Bound::LemmaT3bd);
            out.push(make_report(quantity, inputs, t3, e.value, tagged("t3-cases", &e), Exactness::Asymptotic));
        }
        Quantity::T4 => {
            group_structured()?;
            let h = need(&inst.h, "--H", quantity)?;
            let n = h.len() as u128;
            let t4 = t_k_with(h, 4, opts.keys, &opts.count)?;
            let t3 = t_k_with(h, 3, opts.keys, &opts.count)?;
            let inputs = ReportInputs {
                p: pv,
                card_H: Some(n as u64),
                M: Some(line_multiplicity(h)),
                ..Default::default()
            };
            out.push(make_report(quantity, inputs, t4, (n * n * t3) as f64, "H^2T3", Exactness::ExactConstant));
        }
        Quantity::Q => {
            let h = need(&inst.h, "--H", quantity)?;
            let n = h.len() as u64;
            let d = counts::d_histogram(h);
            let q = d.sum_of_squares();
            let zero = d.get(&0) as u128;
            let inputs = ReportInputs {
                p: pv,
                card_H: Some(n),
                M: Some(line_multiplicity(h)),
                ..Default::default()
            };
            let e = eval_t3_bounds(n, 1, pv, T3Bound::Qstar);
            out.push(make_report(quantity, inputs, q - zero * zero, e.value, tagged("qstar", &e), Exactness::Asymptotic));
            out.push(make_report(quantity, inputs, q, (n as f64).powi(4), "trivial", Exactness::ExactConstant));
        }
        Quantity::Mk => {
            let a = need(&inst.a, "--A", quantity)?;
            let k = opts.k.unwrap_or_else(|| default_k(a.len()));
            let rc = rich_hyperbolae(a, k, &lambda, opts.mode, &opts.count)?;
            let e = eval_mk_bb(a.len() as u64, k as u64, pv);
            let inputs = ReportInputs {
                p: pv,
                card_A: Some(a.len() as u64),
                k: Some(k as u64),
                ..Default::default()
            };
            out.push(make_report(quantity, inputs, rc.count as u128, e.value, tagged("rich-hyperbolae", &e), Exactness::Asymptotic));
        }
        Quantity::Lk => {
            let b = inst
                .b
                .as_ref()
                .or(inst.a.as_ref())
                .context("compute lk needs --B (or --A)")?;
            let c = inst.c.as_ref().unwrap_or(b);
            let n = b.len().max(c.len());
            let k = opts.k.unwrap_or_else(|| default_k(n));
            let rc = rich_lines(b, c, k, opts.include_axis_parallel)?;
            let inputs = ReportInputs {
                p: pv,
                card_A: Some(n as u64),
                k: Some(k as u64),
                ..Default::default()
            };
            let e = eval_lines(LineBound::Lk { card_a: n as u64, k: k as u64 }, pv);
            out.push(make_report(quantity, inputs, rc.count as u128, e.value, tagged("rich-lines", &e), Exactness::Asymptotic));
            let lines = rc.witnesses.unwrap_or_default();
            let incidences: u128 = lines.iter().map(|l| points_on_line(b, c, l) as u128).sum();
            let e = eval_lines(
                LineBound::Sdz {
                    card_a: n as u64,
                    card_l: lines.len() as u64,
                },
                pv,
            );
            out.push(make_report(quantity, inputs, incidences, e.value, tagged("rich-line-incidences", &e), Exactness::Asymptotic));
        }
        Quantity::Eplus => {
            let b = inst
                .b
                .as_ref()
                .or(inst.a.as_ref())
                .context("compute eplus needs --B (or --A)")?;
            let n = b.len() as u128;
            let inputs = ReportInputs {
                p: pv,
                card_A: Some(n as u64),
                ..Default::default()
            };
            out.push(make_report(quantity, inputs, additive_energy(b), n.pow(3) as f64, "trivial", Exactness::ExactConstant));
        }
        Quantity::Sumprod => {
            let a = need(&inst.a, "--A", quantity)?;
            let n = a.len() as u128;
            let inputs = ReportInputs {
                p: pv,
                card_A: Some(n as u64),
                ..Default::default()
            };
            for (i, v) in SumProductVariant::ALL.into_iter().enumerate() {
                let count = sumprod_quadruples(a, v) as u128;
                out.push(make_report(quantity, inputs, count, n.pow(3) as f64, format!("variant-{}", i + 1), Exactness::ExactConstant));
            }
        }
        Quantity::Minkowski => {
            let a = need(&inst.a, "--A", quantity)?;
            let m = minkowski_realisations(a, &lambda) as u128;
            let inputs = ReportInputs {
                p: pv,
                card_A: Some(a.len() as u64),
                ..Default::default()
            };
            let rotated = counts::minkowski_rotated_incidences(a, &lambda);
            let rect = counts::minkowski_rectangle_incidences(a, &lambda);
            out.push(make_report(quantity, inputs, m, rotated as f64, "rotated-incidences", Exactness::ExactConstant));
            out.push(make_report(quantity, inputs, m, rect as f64, "rectangle-incidences", Exactness::ExactConstant));
        }
        Quantity::Cschain => {
            group_structured()?;
            let a = need(&inst.a, "--A", quantity)?;
            let h = need(&inst.h, "--H", quantity)?;
            let r = cs_chain_report(a, h)?;
            let inputs = ReportInputs {
                p: pv,
                card_A: Some(a.len() as u64),
                card_H: Some(h.len() as u64),
                M: Some(line_multiplicity(h)),
                k: None,
            };
            let regime = format!(
                "sigma={};delta={}/{};omega={};share={}/{}",
                r.sigma,
                r.delta.numer(),
                r.delta.denom(),
                r.omega_size,
                r.omega_incidence_share.numer(),
                r.omega_incidence_share.denom()
            );
            out.push(make_report(quantity, inputs, r.lhs_sq, r.rhs_cs as f64, regime, Exactness::ExactConstant));
        }
        Quantity::Borel => {
            group_structured()?;
            let h = need(&inst.h, "--H", quantity)?;
            let n = h.len() as u128;
            let inputs = ReportInputs {
                p: pv,
                card_H: Some(n as u64),
                M: Some(line_multiplicity(h)),
                ..Default::default()
            };
            let mass = borel_coset_mass(h);
            out.push(make_report(quantity, inputs, mass.max_non_borel, (n * n) as f64, "X_B", Exactness::ExactConstant));
            let yb = borel_t3_mass(h, &opts.count)?;
            out.push(make_report(quantity, inputs, yb, n.pow(4) as f64, "Y_B", Exactness::ExactConstant));
            out.push(make_report(quantity, inputs, mass.total(), energy(h) as f64, "coset-total", Exactness::ExactConstant));
        }
    }
    Ok(out)
}

fn points_on_line(b: &ScalarSet, c: &ScalarSet, line: &Line) -> usize {
    let p = b.modulus();
    match *line {
        Line::Vertical(x) => {
            if b.contains(x) {
                c.len()
            } else {
                0
            }
        }
        Line::Sloped { slope, intercept } => b
            .elements()
            .iter()
            .filter(|&&x| c.contains(p.add(p.mul(slope, x), intercept)))
            .count(),
    }
}
