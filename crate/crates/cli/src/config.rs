//! Command-line flags and their resolution into a validated experiment.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperlab::counts::{Budget, CountConfig, KeyMode, RichMode};
use hyperlab::prelude::*;

pub const BUDGET_ENV: &str = "HYPERLAB_BUDGET_MB";

#[derive(Debug, Parser)]
#[command(name = "hyperlab", version, about = "Exact incidence counts for translates of xy = λ over F_p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one quantity and report it against every applicable bound.
    Compute {
        #[arg(value_enum)]
        quantity: QuantityArg,
        #[command(flatten)]
        args: ExperimentArgs,
    },
    /// Run a seeded verification suite; exits nonzero on any violation.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        args: ExperimentArgs,
    },
    /// Evaluate quantities over a family of instances, one CSV/JSON row each.
    Scan {
        /// Comma-separated quantities.
        #[arg(long, value_delimiter = ',', default_value = "mk,sigma")]
        quantity: Vec<QuantityArg>,
        /// `ap:<n>,<n>,...` (A = {1..n}, H = A×A) or `rows:<path>` (lines of `p A-spec H-spec`).
        #[arg(long, default_value = "ap:8,16,32,64")]
        family: String,
        #[command(flatten)]
        args: ExperimentArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QuantityArg {
    Sigma,
    Energy,
    T3,
    T4,
    Q,
    Mk,
    Lk,
    Eplus,
    Sumprod,
    Minkowski,
    Cschain,
    Borel,
}

impl QuantityArg {
    pub fn quantity(self) -> Quantity {
        match self {
            QuantityArg::Sigma => Quantity::Sigma,
            QuantityArg::Energy => Quantity::Energy,
            QuantityArg::T3 => Quantity::T3,
            QuantityArg::T4 => Quantity::T4,
            QuantityArg::Q => Quantity::Q,
            QuantityArg::Mk => Quantity::Mk,
            QuantityArg::Lk => Quantity::Lk,
            QuantityArg::Eplus => Quantity::Eplus,
            QuantityArg::Sumprod => Quantity::Sumprod,
            QuantityArg::Minkowski => Quantity::Minkowski,
            QuantityArg::Cschain => Quantity::Cschain,
            QuantityArg::Borel => Quantity::Borel,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    OracleEquivalence,
    AlgebraicIdentities,
    LemmaT3,
    LemmaShCartesian,
    Borel,
    Charsum,
    MinkowskiRotation,
    T4Chain,
    CrossAlgorithmMk,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    #[default]
    Pairs,
    Exhaustive,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum KeysArg {
    #[default]
    Sl2,
    Projective,
}

#[derive(Clone, Debug, Default, Args)]
pub struct ExperimentArgs {
    /// Field characteristic (odd prime).
    #[arg(long)]
    pub p: Option<i128>,
    /// Curve constant λ in (x - b)(y - a) = λ.
    #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
    pub lambda: i128,
    #[arg(long = "A")]
    pub a: Option<String>,
    #[arg(long = "H")]
    pub h: Option<String>,
    #[arg(long = "B")]
    pub b: Option<String>,
    #[arg(long = "C")]
    pub c: Option<String>,
    /// Richness threshold; defaults to ⌈|A|^{3/4}⌉ (at least 2).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
    /// Largest |H| accepted by the T₃ enumeration.
    #[arg(long = "budget-t3")]
    pub budget_t3: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Rich-hyperbola search strategy.
    #[arg(long, value_enum, default_value_t = ModeArg::Pairs)]
    pub mode: ModeArg,
    /// Key equality for energy tables.
    #[arg(long, value_enum, default_value_t = KeysArg::Sl2)]
    pub keys: KeysArg,
    /// Skip horizontal and vertical lines when counting rich lines.
    #[arg(long)]
    pub skip_axis_parallel: bool,
}

/// Shared run options that do not depend on the instance.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub lambda: i128,
    pub k: Option<usize>,
    pub seed: u64,
    pub trials: Option<usize>,
    pub count: CountConfig,
    pub mode: RichMode,
    pub keys: KeyMode,
    pub include_axis_parallel: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl ExperimentArgs {
    pub fn options(&self) -> Result<RunOptions> {
        let mut budget = Budget::default();
        if let Ok(mb) = std::env::var(BUDGET_ENV) {
            let mb: u64 = mb
                .trim()
                .parse()
                .with_context(|| format!("{BUDGET_ENV} must be a whole number of megabytes, got '{mb}'"))?;
            budget = budget.with_table_mb(mb);
        }
        if let Some(t3) = self.budget_t3 {
            budget.max_t3_translates = t3;
        }
        Ok(RunOptions {
            lambda: self.lambda,
            k: self.k,
            seed: self.seed,
            trials: self.trials,
            count: CountConfig {
                workers: self.workers as usize,
                budget,
            },
            mode: match self.mode {
                ModeArg::Pairs => RichMode::Pairs,
                ModeArg::Exhaustive => RichMode::Exhaustive,
            },
            keys: match self.keys {
                KeysArg::Sl2 => KeyMode::Sl2,
                KeysArg::Projective => KeyMode::Projective,
            },
            include_axis_parallel: !self.skip_axis_parallel,
            out: self.out.clone(),
            format: self.format,
        })
    }

    pub fn prime(&self) -> Result<Option<PrimeModulus>> {
        self.p
            .map(|p| check_prime(p).with_context(|| format!("--p {p}")))
            .transpose()
    }

    /// Parses every provided set against `--p`, which is then required.
    pub fn instance(&self) -> Result<Instance> {
        let p = self.prime()?.context("--p is required")?;
        let ctx = SpecContext::new(p, self.seed);
        Ok(Instance {
            p,
            a: self.a.as_deref().map(|s| load_scalars(s, &ctx).with_context(|| format!("--A {s}"))).transpose()?,
            h: self.h.as_deref().map(|s| load_translates(s, &ctx).with_context(|| format!("--H {s}"))).transpose()?,
            b: self.b.as_deref().map(|s| load_scalars(s, &ctx).with_context(|| format!("--B {s}"))).transpose()?,
            c: self.c.as_deref().map(|s| load_scalars(s, &ctx).with_context(|| format!("--C {s}"))).transpose()?,
        })
    }
}

/// One fully parsed input: a field and whichever sets were given.
#[derive(Clone, Debug)]
pub struct Instance {
    pub p: PrimeModulus,
    pub a: Option<ScalarSet>,
    pub h: Option<TranslateSet>,
    pub b: Option<ScalarSet>,
    pub c: Option<ScalarSet>,
}

impl Instance {
    pub fn new(p: PrimeModulus) -> Self {
        Instance {
            p,
            a: None,
            h: None,
            b: None,
            c: None,
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    Ok(BufReader::new(file))
}

/// A set spec, or `file:<path>` holding one literal per line.
pub fn load_scalars(spec: &str, ctx: &SpecContext) -> Result<ScalarSet> {
    match spec.strip_prefix("file:") {
        Some(path) => Ok(ScalarSet::from_lines(ctx.p, open(Path::new(path))?)?),
        None => Ok(parse_scalars(spec, *ctx)?),
    }
}

/// A translate spec, or `file:<path>` holding one `a,b` pair per line.
pub fn load_translates(spec: &str, ctx: &SpecContext) -> Result<TranslateSet> {
    match spec.strip_prefix("file:") {
        Some(path) => Ok(TranslateSet::from_lines(ctx.p, open(Path::new(path))?)?),
        None => Ok(parse_translates(spec, *ctx)?),
    }
}
