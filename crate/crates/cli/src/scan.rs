//! Parameter-family scans: one headline row per (instance, quantity).

use std::fs;

use anyhow::{bail, Context, Result};
use hyperlab::prelude::*;

use crate::compute::{compute, default_k};
use crate::config::{load_scalars, load_translates, Instance, RunOptions};
use crate::emit::Row;

pub const DEFAULT_SCAN_PRIME: i128 = 1009;

/// A family entry: a parsed instance, or the reason it could not be built.
type Entry = std::result::Result<Instance, (u64, String)>;

/// `ap:n1,n2,...` builds A = {1, …, n} and H = A × A over `p`;
/// `rows:<path>` reads `p A-spec H-spec` per line (`-` for an absent set, `#` comments).
pub fn family(spec: &str, p: Option<PrimeModulus>, seed: u64) -> Result<Vec<Entry>> {
    if let Some(sizes) = spec.strip_prefix("ap:") {
        let p = match p {
            Some(p) => p,
            None => check_prime(DEFAULT_SCAN_PRIME)?,
        };
        let mut out = Vec::new();
        for n in sizes.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let n: usize = n.parse().with_context(|| format!("AP length '{n}'"))?;
            if n == 0 || n as u64 >= p.get() {
                out.push(Err((p.get(), format!("AP length {n} must lie in 1..p"))));
                continue;
            }
            let a = ScalarSet::new(p, 1..=n as i128);
            let h = TranslateSet::cartesian(&a, &a)?;
            let mut inst = Instance::new(p);
            inst.a = Some(a);
            inst.h = Some(h);
            out.push(Ok(inst));
        }
        Ok(out)
    } else if let Some(path) = spec.strip_prefix("rows:") {
        let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        Ok(text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|line| row_instance(line, seed))
            .collect())
    } else {
        bail!("unknown family '{spec}': expected ap:<n>,... or rows:<path>")
    }
}

fn row_instance(line: &str, seed: u64) -> Entry {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let raw_p = fields.first().and_then(|s| s.parse::<u64>().ok()).unwrap_or(0);
    let build = || -> Result<Instance> {
        if fields.len() != 3 {
            bail!("expected 'p A-spec H-spec', got '{line}'");
        }
        let p = check_prime(fields[0].parse::<i128>().with_context(|| format!("prime '{}'", fields[0]))?)?;
        let ctx = SpecContext::new(p, seed);
        let mut inst = Instance::new(p);
        if fields[1] != "-" {
            inst.a = Some(load_scalars(fields[1], &ctx)?);
        }
        if fields[2] != "-" {
            inst.h = Some(load_translates(fields[2], &ctx)?);
        }
        Ok(inst)
    };
    build().map_err(|e| (raw_p, format!("{e:#}")))
}

pub fn scan(quantities: &[Quantity], entries: &[Entry], opts: &RunOptions) -> Vec<Row> {
    let mut rows = Vec::new();
    for entry in entries {
        for &q in quantities {
            rows.push(match entry {
                Err((p, msg)) => Row::Failed {
                    quantity: q,
                    p: *p,
                    card_a: None,
                    card_h: None,
                    k: None,
                    error: msg.clone(),
                },
                Ok(inst) => headline(q, inst, opts),
            });
        }
    }
    rows
}

fn headline(q: Quantity, inst: &Instance, opts: &RunOptions) -> Row {
    let mut opts = opts.clone();
    if let (None, Some(a)) = (opts.k, &inst.a) {
        opts.k = Some(default_k(a.len()));
    }
    match compute(q, inst, &opts) {
        Ok(reports) if !reports.is_empty() => Row::Report(reports.into_iter().next().expect("nonempty")),
        Ok(_) => failed(q, inst, &opts, "no report".into()),
        Err(e) => failed(q, inst, &opts, format!("{e:#}")),
    }
}

fn failed(q: Quantity, inst: &Instance, opts: &RunOptions, error: String) -> Row {
    Row::Failed {
        quantity: q,
        p: inst.p.get(),
        card_a: inst.a.as_ref().map(|a| a.len() as u64),
        card_h: inst.h.as_ref().map(|h| h.len() as u64),
        k: opts.k.map(|k| k as u64),
        error,
    }
}
