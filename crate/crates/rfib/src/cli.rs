use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use rfib_core::counting::CountingContext;
use rfib_core::entropy::{entropy_estimate, DEFAULT_N_CAP};
use rfib_core::{Budget, Error, FactorTable, GenerationTable, Params, Sampler};

use crate::config::{Format, RunConfig};
use crate::report::{self, EnumerationHeader, FactorHeader, SampleRow};
use crate::verify::{self, CheckKind, SuiteConfig};
use crate::UsageError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "rfib", version, about = "Exact enumeration, counting and entropy for the random Fibonacci substitution")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write every word of A_n, sorted
    Enumerate,
    /// Table of l_n, d_n and |A_n| for n = 1..=N
    Count,
    /// F_n with --n, or the length-t factors of the language with --t
    Factors,
    /// Entropy sequences and the converged estimate
    Entropy,
    /// Run the verification suite (standard grid unless the config lists checks)
    Verify,
    /// Sample inflated words r_n
    Sample,
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    #[arg(long, global = true)]
    pub m: Option<u32>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub t: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Maximum number of words any single enumeration may allocate
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Probabilities p_0..p_m, comma separated
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    pub p: Option<Vec<f64>>,
    /// JSON file with any of the above; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Add wall-clock timings to verify reports
    #[arg(long, global = true)]
    pub timing: bool,
}

impl Flags {
    fn into_config(self) -> anyhow::Result<RunConfig> {
        let base = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            m: self.m,
            n: self.n,
            k: self.k,
            t: self.t,
            tol: self.tol,
            trials: self.trials,
            seed: self.seed,
            budget: self.budget,
            format: self.format,
            out: self.out,
            p: self.p,
            timing: self.timing,
            checks: None,
        };
        let merged = base.overridden_by(flags);
        merged.validate()?;
        Ok(merged)
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code(&e);
            if code == EXIT_BUDGET {
                eprintln!("rfib: refused: {}", budget_message(&e));
            } else {
                eprintln!("rfib: {e:#}");
            }
            code
        }
    }
}

fn exit_code(e: &anyhow::Error) -> i32 {
    if e.is::<UsageError>() {
        return EXIT_USAGE;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. } | Error::DigitCapExceeded { .. }) => EXIT_BUDGET,
        Some(
            Error::InvalidParams(_)
            | Error::GenerationTooSmall { .. }
            | Error::FactorTooLong { .. }
            | Error::ImageIndex { .. }
            | Error::SliceOutOfRange { .. },
        ) => EXIT_USAGE,
        _ => EXIT_CHECK_FAILED,
    }
}

fn budget_message(e: &anyhow::Error) -> String {
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { predicted, budget }) => {
            let digits = predicted.to_string();
            let shown = if digits.len() <= 60 {
                digits
            } else {
                format!("{}.{}e{} ({} digits)", &digits[..1], &digits[1..6], digits.len() - 1, digits.len())
            };
            format!("predicted count {shown} exceeds the budget of {budget} words")
        }
        _ => format!("{e:#}"),
    }
}

struct Ctx {
    config: RunConfig,
}

impl Ctx {
    fn m(&self) -> u32 {
        self.config.m.unwrap_or(1)
    }

    fn budget(&self) -> Budget {
        self.config.budget.map(Budget).unwrap_or_default()
    }

    fn format(&self) -> Format {
        self.config.format.unwrap_or_default()
    }

    fn require_n(&self, command: &str) -> anyhow::Result<usize> {
        self.config
            .n
            .ok_or_else(|| UsageError(format!("{command} needs --n")).into())
    }

    fn params(&self) -> anyhow::Result<Params> {
        let params = match &self.config.p {
            Some(p) => Params::new(self.m(), p.clone()),
            None => Params::uniform(self.m()),
        };
        params.map_err(|e| UsageError(e.to_string()).into())
    }

    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.config.out {
            Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()?;
                Ok(())
            }
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<i32> {
    let ctx = Ctx {
        config: cli.flags.into_config()?,
    };
    match cli.command {
        Command::Enumerate => enumerate(&ctx),
        Command::Count => count(&ctx),
        Command::Factors => factors(&ctx),
        Command::Entropy => entropy(&ctx),
        Command::Verify => run_verify(&ctx),
        Command::Sample => sample(&ctx),
    }
}

fn enumerate(ctx: &Ctx) -> anyhow::Result<i32> {
    let n = ctx.require_n("enumerate")?;
    let mut table = GenerationTable::new(ctx.m(), ctx.budget());
    let set = table.build(n)?;
    let header = EnumerationHeader {
        m: ctx.m(),
        n,
        l_n: set.word_len(),
        count: set.len(),
    };
    ctx.emit(&report::render_set(&header, set, ctx.format())?)?;
    Ok(EXIT_OK)
}

fn count(ctx: &Ctx) -> anyhow::Result<i32> {
    let n = ctx.require_n("count")?;
    let mut counting = CountingContext::new(ctx.m());
    let rows = report::count_rows(&mut counting, n)?;
    ctx.emit(&report::render_table(&rows, ctx.format())?)?;
    Ok(EXIT_OK)
}

fn factors(ctx: &Ctx) -> anyhow::Result<i32> {
    let mut table = FactorTable::new(ctx.m(), ctx.budget());
    let (header, set) = match (ctx.config.t, ctx.config.n) {
        (Some(0), _) => return Err(UsageError("--t must be at least 1".into()).into()),
        (Some(t), _) => {
            let set = table.any(t)?;
            let header = FactorHeader {
                m: ctx.m(),
                n: None,
                t: Some(t),
                length: t,
                count: set.len(),
            };
            (header, set)
        }
        (None, Some(n)) => {
            let set = table.f_n(n)?;
            let header = FactorHeader {
                m: ctx.m(),
                n: Some(n),
                t: None,
                length: set.word_len(),
                count: set.len(),
            };
            (header, set)
        }
        (None, None) => return Err(UsageError("factors needs --n or --t".into()).into()),
    };
    ctx.emit(&report::render_set(&header, set, ctx.format())?)?;
    Ok(EXIT_OK)
}

fn entropy(ctx: &Ctx) -> anyhow::Result<i32> {
    let tol = ctx.config.tol.unwrap_or(DEFAULT_TOL);
    let cap = ctx.config.n.unwrap_or(DEFAULT_N_CAP);
    let mut report = entropy_estimate(ctx.m(), tol, cap)?;
    report.fill_h_f(&mut FactorTable::new(ctx.m(), ctx.budget()))?;
    ctx.emit(&report::render_entropy(&report, ctx.format())?)?;
    Ok(EXIT_OK)
}

fn sample(ctx: &Ctx) -> anyhow::Result<i32> {
    let n = ctx.require_n("sample")?;
    let trials = ctx.config.trials.unwrap_or(1);
    let sampler = Sampler::new(ctx.params()?, ctx.config.seed.unwrap_or(0));
    // sampling is budgeted in letters: trials · l_n
    let letters = CountingContext::new(ctx.m()).length(n) * trials;
    if letters > ctx.budget().words().into() {
        return Err(Error::BudgetExceeded {
            predicted: letters,
            budget: ctx.budget().words(),
        }
        .into());
    }
    let rows = (0..trials)
        .map(|t| sampler.sample(n, t).map(|s| SampleRow::from(&s)))
        .collect::<Result<Vec<_>, _>>()?;
    ctx.emit(&report::render_samples(&rows, ctx.format())?)?;
    Ok(EXIT_OK)
}

/// The suite from the config (or the standard one), with flags applied:
/// `--m` keeps only that `m` (dropping sampler checks set up for another), `--n`/`--k` replace the grids of the checks
/// that accept them, and the sampler settings replace those of every sampler check.
fn suite_config(config: &RunConfig) -> anyhow::Result<SuiteConfig> {
    let mut suite = match &config.checks {
        Some(checks) => SuiteConfig {
            checks: checks.clone(),
            ..SuiteConfig::empty()
        },
        None => SuiteConfig::standard(),
    };
    if let Some(b) = config.budget {
        suite.budget = Budget(b);
    }
    if let Some(seed) = config.seed {
        suite.seed = seed;
        for spec in &mut suite.checks {
            if spec.check == CheckKind::Sampler {
                spec.seed = Some(seed);
            }
        }
    }
    suite.timing = config.timing;

    if let Some(m) = config.m {
        // sampler configurations are tied to their own m
        suite
            .checks
            .retain(|s| s.check != CheckKind::Sampler || s.m.contains(&m));
        for spec in &mut suite.checks {
            spec.m = vec![m];
        }
    }
    if let Some(n) = config.n {
        suite.checks.retain(|s| n >= s.check.min_n());
        for spec in &mut suite.checks {
            spec.n = Some(vec![n]);
        }
    }
    if let Some(k) = config.k {
        for spec in suite.checks.iter_mut().filter(|s| s.check.uses_k()) {
            spec.k = Some(vec![k]);
        }
    }
    for spec in suite.checks.iter_mut().filter(|s| s.check == CheckKind::Sampler) {
        if let Some(t) = config.trials {
            spec.trials = Some(t);
        }
        if let Some(p) = &config.p {
            spec.p = Some(p.clone());
        }
    }
    suite.validate().map_err(UsageError)?;
    Ok(suite)
}

fn run_verify(ctx: &Ctx) -> anyhow::Result<i32> {
    let suite = suite_config(&ctx.config)?;
    let report = verify::run_suite(&suite);
    ctx.emit(&report::render_suite(&report, ctx.format())?)?;
    Ok(if report.success { EXIT_OK } else { EXIT_CHECK_FAILED })
}
