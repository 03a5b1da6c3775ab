//! Exhaustive checks of the set identities behind the counting formulas.
//!
//! Every check is evaluated by building the sets involved and comparing them
//! word for word (or cardinality for cardinality), on a grid of `(m, n, k)`
//! points. Points whose predicted size exceeds the budget are reported as
//! skipped rather than attempted.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use rfib_core::counting::CountingContext;
use rfib_core::{Budget, Error, FactorTable, Params, Relation, Sampler, SupersetB, WindowSlicer, WordSet};

/// Witness words kept per failing point.
pub const MAX_WITNESSES: usize = 10;
/// Two-sided significance level of the sampler's chi-square test.
pub const SIGNIFICANCE: f64 = 0.001;
/// The chi-square test is skipped when any expected cell count is below this.
pub const MIN_EXPECTED_COUNT: f64 = 5.0;
pub const DEFAULT_TRIALS: u64 = 10_000;
/// Default suite budget. Lower than the enumeration default because a check
/// holds several sets of size comparable to `|A_n|` at once; under this
/// budget the closed form puts the frontier at `n = 9, 5, 4` for `m = 1, 2, 3`.
pub const SUITE_BUDGET: Budget = Budget(1 << 22);
pub const DEFAULT_SEED: u64 = 0;

// auto grids stop long before this; it only guards a pathological budget
const AUTO_N_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    UnionProduct,
    Overlap,
    PrefixStability,
    Superset,
    Stabilization,
    SplitBound,
    FactorBound,
    Sampler,
}

impl CheckKind {
    pub const ALL: [CheckKind; 8] = [
        CheckKind::UnionProduct,
        CheckKind::Overlap,
        CheckKind::PrefixStability,
        CheckKind::Superset,
        CheckKind::Stabilization,
        CheckKind::SplitBound,
        CheckKind::FactorBound,
        CheckKind::Sampler,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::UnionProduct => "union_product",
            CheckKind::Overlap => "overlap",
            CheckKind::PrefixStability => "prefix_stability",
            CheckKind::Superset => "superset",
            CheckKind::Stabilization => "stabilization",
            CheckKind::SplitBound => "split_bound",
            CheckKind::FactorBound => "factor_bound",
            CheckKind::Sampler => "sampler",
        }
    }

    pub fn expectation(self) -> Expectation {
        match self {
            CheckKind::Superset | CheckKind::Sampler => Expectation::Subset,
            CheckKind::SplitBound | CheckKind::FactorBound => Expectation::Bound,
            _ => Expectation::Equal,
        }
    }

    pub fn uses_k(self) -> bool {
        matches!(
            self,
            CheckKind::UnionProduct | CheckKind::Overlap | CheckKind::PrefixStability | CheckKind::Stabilization
        )
    }

    pub fn min_n(self) -> usize {
        match self {
            CheckKind::UnionProduct | CheckKind::Overlap => 2,
            CheckKind::Superset => 4,
            CheckKind::Sampler => 1,
            _ => 3,
        }
    }

    pub fn min_k(self) -> usize {
        match self {
            CheckKind::PrefixStability => 0,
            _ => 1,
        }
    }

    fn default_k(self) -> Vec<usize> {
        if self.uses_k() {
            vec![1, 2, 3]
        } else {
            Vec::new()
        }
    }
}

/// What a passing point looks like.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Equal,
    Subset,
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GridPoint {
    pub m: u32,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

/// One check over a parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub check: CheckKind,
    pub m: Vec<u32>,
    /// Explicit generations. Absent: every generation from the smallest valid
    /// one up to the last one whose predicted size fits the budget.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    /// Absent: `1, 2, 3` for the checks that take a `k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<usize>>,
    /// Points whose failure is known and reported as an expected exception.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exceptions: Vec<GridPoint>,
    /// Sampler only; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CheckSpec {
    pub fn new(check: CheckKind, m: Vec<u32>) -> Self {
        CheckSpec {
            check,
            m,
            n: None,
            k: None,
            exceptions: Vec::new(),
            p: None,
            trials: None,
            seed: None,
        }
    }

    pub fn with_n(mut self, n: Vec<usize>) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_k(mut self, k: Vec<usize>) -> Self {
        self.k = Some(k);
        self
    }

    fn k_values(&self) -> Vec<Option<usize>> {
        if self.check.uses_k() {
            self.k.clone().unwrap_or_else(|| self.check.default_k()).into_iter().map(Some).collect()
        } else {
            vec![None]
        }
    }

    fn validate(&self) -> Result<(), String> {
        let name = self.check.name();
        if let Some(&m) = self.m.iter().find(|&&m| m == 0) {
            return Err(format!("{name}: m must be at least 1, got {m}"));
        }
        if let Some(ns) = &self.n {
            if let Some(n) = ns.iter().find(|&&n| n < self.check.min_n()) {
                return Err(format!("{name}: n must be at least {}, got {n}", self.check.min_n()));
            }
        }
        if let Some(ks) = &self.k {
            if !self.check.uses_k() {
                return Err(format!("{name} takes no k"));
            }
            if let Some(k) = ks.iter().find(|&&k| k < self.check.min_k()) {
                return Err(format!("{name}: k must be at least {}, got {k}", self.check.min_k()));
            }
        }
        if self.check == CheckKind::Sampler {
            if self.trials == Some(0) {
                return Err("sampler: trials must be at least 1".into());
            }
            if let Some(p) = &self.p {
                for &m in &self.m {
                    Params::new(m, p.clone()).map_err(|e| format!("sampler: {e}"))?;
                }
            }
        } else if self.p.is_some() || self.trials.is_some() || self.seed.is_some() {
            return Err(format!("{name}: p, trials and seed apply to the sampler only"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default = "suite_budget")]
    pub budget: Budget,
    /// Seed for sampler checks that do not set their own.
    #[serde(default)]
    pub seed: u64,
    /// Record wall-clock time per point. Off by default so reports are reproducible byte for byte.
    #[serde(default)]
    pub timing: bool,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

fn suite_budget() -> Budget {
    SUITE_BUDGET
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig::standard()
    }
}

impl SuiteConfig {
    pub fn empty() -> Self {
        SuiteConfig {
            budget: SUITE_BUDGET,
            seed: DEFAULT_SEED,
            timing: false,
            checks: Vec::new(),
        }
    }

    /// Every check on `m = 1, 2, 3` up to the budget frontier, with the one
    /// known stabilization exception and four sampler configurations.
    pub fn standard() -> Self {
        let ms = vec![1, 2, 3];
        let mut checks: Vec<CheckSpec> = CheckKind::ALL[..7]
            .iter()
            .map(|&kind| CheckSpec::new(kind, ms.clone()))
            .collect();
        checks[4].exceptions.push(GridPoint { m: 1, n: 3, k: Some(1) });

        let sampler = |m: u32, n: usize, p: Option<Vec<f64>>, trials: u64| CheckSpec {
            p,
            trials: Some(trials),
            ..CheckSpec::new(CheckKind::Sampler, vec![m]).with_n(vec![n])
        };
        checks.push(sampler(1, 5, Some(vec![1.0, 0.0]), 1_000));
        checks.push(sampler(1, 6, None, DEFAULT_TRIALS));
        checks.push(sampler(2, 4, None, DEFAULT_TRIALS));
        checks.push(sampler(3, 4, None, DEFAULT_TRIALS));
        SuiteConfig {
            checks,
            ..SuiteConfig::empty()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.budget.words() == 0 {
            return Err("budget must be at least 1".into());
        }
        self.checks.iter().try_for_each(CheckSpec::validate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    ExpectedException,
    SkippedOverBudget,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::ExpectedException => "expected_exception",
            Outcome::SkippedOverBudget => "skipped_over_budget",
        }
    }
}

/// A word that separates the two sides of a failed comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub word: String,
    /// Which side the word belongs to, e.g. `left_only`.
    pub side: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResult {
    #[serde(flatten)]
    pub point: GridPoint,
    pub outcome: Outcome,
    /// Exact cardinalities and other numbers behind the verdict.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl PointResult {
    pub fn value(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: usize,
    pub spec: CheckSpec,
    pub expect: Expectation,
    pub points: Vec<PointResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl CheckResult {
    pub fn find(&self, m: u32, n: usize, k: Option<usize>) -> Option<&PointResult> {
        self.points.iter().find(|p| p.point == GridPoint { m, n, k })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub expected_exception: usize,
    pub skipped_over_budget: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub budget: u64,
    pub seed: u64,
    pub summary: Tally,
    /// No point failed unexpectedly.
    pub success: bool,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn points(&self) -> impl Iterator<Item = (&CheckResult, &PointResult)> {
        self.checks.iter().flat_map(|c| c.points.iter().map(move |p| (c, p)))
    }

    pub fn check(&self, kind: CheckKind) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(move |c| c.spec.check == kind)
    }
}

/// Runs every check. Groups of `(check, m)` run in parallel, each with its
/// own set tables; the report keeps configuration order.
pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    let jobs: Vec<(usize, u32)> = config
        .checks
        .iter()
        .enumerate()
        .flat_map(|(i, spec)| spec.m.iter().map(move |&m| (i, m)))
        .collect();
    let mut outputs: Vec<(usize, Vec<PointResult>, f64)> = jobs
        .par_iter()
        .map(|&(i, m)| {
            let start = Instant::now();
            let points = run_group(&config.checks[i], m, config);
            (i, points, start.elapsed().as_secs_f64() * 1e3)
        })
        .collect();

    let mut checks: Vec<CheckResult> = config
        .checks
        .iter()
        .enumerate()
        .map(|(id, spec)| CheckResult {
            id,
            spec: spec.clone(),
            expect: spec.check.expectation(),
            points: Vec::new(),
            elapsed_ms: config.timing.then_some(0.0),
        })
        .collect();
    for (i, points, ms) in outputs.drain(..) {
        checks[i].points.extend(points);
        if let Some(total) = checks[i].elapsed_ms.as_mut() {
            *total += ms;
        }
    }

    let mut summary = Tally::default();
    for p in checks.iter().flat_map(|c| &c.points) {
        match p.outcome {
            Outcome::Pass => summary.pass += 1,
            Outcome::Fail => summary.fail += 1,
            Outcome::ExpectedException => summary.expected_exception += 1,
            Outcome::SkippedOverBudget => summary.skipped_over_budget += 1,
        }
    }
    SuiteReport {
        budget: config.budget.words(),
        seed: config.seed,
        success: summary.fail == 0,
        summary,
        checks,
    }
}

/// Runs a single check at one point with a fresh workspace.
pub fn run_point(spec: &CheckSpec, point: GridPoint, config: &SuiteConfig) -> PointResult {
    let mut ws = Workspace::new(point.m, config.budget);
    evaluate(spec, point, config, &mut ws)
}

pub fn verify_union_product(m: u32, n: usize, k: usize, budget: Budget) -> PointResult {
    single(CheckKind::UnionProduct, m, n, Some(k), budget)
}

pub fn verify_overlap(m: u32, n: usize, k: usize, budget: Budget) -> PointResult {
    single(CheckKind::Overlap, m, n, Some(k), budget)
}

pub fn verify_prefix_stability(m: u32, n: usize, k: usize, budget: Budget) -> PointResult {
    single(CheckKind::PrefixStability, m, n, Some(k), budget)
}

pub fn verify_superset(m: u32, n: usize, budget: Budget) -> PointResult {
    single(CheckKind::Superset, m, n, None, budget)
}

pub fn verify_stabilization(m: u32, n: usize, k: usize, budget: Budget) -> PointResult {
    single(CheckKind::Stabilization, m, n, Some(k), budget)
}

pub fn verify_split_bound(m: u32, n: usize, budget: Budget) -> PointResult {
    single(CheckKind::SplitBound, m, n, None, budget)
}

pub fn verify_factor_bound(m: u32, n: usize, budget: Budget) -> PointResult {
    single(CheckKind::FactorBound, m, n, None, budget)
}

pub fn verify_sampler(params: &Params, n: usize, trials: u64, seed: u64, budget: Budget) -> PointResult {
    let spec = CheckSpec {
        p: Some(params.p().to_vec()),
        trials: Some(trials),
        seed: Some(seed),
        ..CheckSpec::new(CheckKind::Sampler, vec![params.m()]).with_n(vec![n])
    };
    let config = SuiteConfig { budget, ..SuiteConfig::empty() };
    run_point(&spec, GridPoint { m: params.m(), n, k: None }, &config)
}

fn single(kind: CheckKind, m: u32, n: usize, k: Option<usize>, budget: Budget) -> PointResult {
    let config = SuiteConfig { budget, ..SuiteConfig::empty() };
    run_point(&CheckSpec::new(kind, vec![m]), GridPoint { m, n, k }, &config)
}

struct Workspace {
    m: u32,
    budget: Budget,
    counting: CountingContext,
    factors: FactorTable,
}

impl Workspace {
    fn new(m: u32, budget: Budget) -> Self {
        Workspace {
            m,
            budget,
            counting: CountingContext::new(m),
            factors: FactorTable::new(m, budget),
        }
    }

    fn length(&mut self, n: usize) -> usize {
        self.counting.length_usize(n)
    }

    fn a(&mut self, n: usize) -> Result<&WordSet, Error> {
        self.factors.generations().build(n)
    }

    /// `⋃_{i=0}^{k} ∏_{j=0}^{k} A_{n-δ_ij}`.
    fn union_product(&mut self, n: usize, k: usize) -> Result<WordSet, Error> {
        let long = self.a(n)?.clone();
        let short = self.a(n - 1)?.clone();
        let terms: Vec<WordSet> = (0..=k)
            .map(|i| WordSet::product_all((0..=k).map(|j| if i == j { &short } else { &long })))
            .collect();
        let len = k * long.word_len() + short.word_len();
        WordSet::union_all(len, terms)
    }

    /// Largest number of words the check allocates at once, from closed forms.
    fn predicted_cost(&mut self, kind: CheckKind, n: usize, k: Option<usize>) -> Result<BigUint, Error> {
        let a = self.counting.count_a_closed(n)?;
        let union_terms = |c: &mut CountingContext, k: usize| -> Result<BigUint, Error> {
            Ok(BigUint::from(k + 1) * a.pow(k as u32) * c.count_a_closed(n - 1)?)
        };
        Ok(match kind {
            CheckKind::UnionProduct => union_terms(&mut self.counting, k.unwrap_or(1))?.max(a.clone()),
            CheckKind::Overlap => union_terms(&mut self.counting, k.unwrap_or(1))? * &a,
            CheckKind::FactorBound | CheckKind::Stabilization => {
                // the cut decomposition generates roughly l_n·|A_n| words
                self.counting.length(n).clone() * &a
            }
            _ => a,
        })
    }
}

fn run_group(spec: &CheckSpec, m: u32, config: &SuiteConfig) -> Vec<PointResult> {
    let mut ws = Workspace::new(m, config.budget);
    let mut results = Vec::new();
    for point in plan(spec, m, &mut ws) {
        results.push(evaluate(spec, point, config, &mut ws));
    }
    results
}

fn plan(spec: &CheckSpec, m: u32, ws: &mut Workspace) -> Vec<GridPoint> {
    let ks = spec.k_values();
    let mut points = Vec::new();
    match &spec.n {
        Some(ns) => {
            for &n in ns {
                points.extend(ks.iter().map(|&k| GridPoint { m, n, k }));
            }
        }
        None => {
            for &k in &ks {
                for n in spec.check.min_n()..AUTO_N_LIMIT {
                    let fits = ws
                        .predicted_cost(spec.check, n, k)
                        .is_ok_and(|cost| cost <= BigUint::from(ws.budget.words()));
                    if !fits {
                        break;
                    }
                    points.push(GridPoint { m, n, k });
                }
            }
            points.sort();
        }
    }
    points
}

fn evaluate(spec: &CheckSpec, point: GridPoint, config: &SuiteConfig, ws: &mut Workspace) -> PointResult {
    let start = Instant::now();
    let mut result = PointResult {
        point,
        outcome: Outcome::Pass,
        values: BTreeMap::new(),
        witnesses: Vec::new(),
        note: None,
        elapsed_ms: None,
    };

    let budget = BigUint::from(ws.budget.words());
    let run = match ws.predicted_cost(spec.check, point.n, point.k) {
        Ok(cost) if cost > budget => Err(Error::BudgetExceeded {
            predicted: cost,
            budget: ws.budget.words(),
        }),
        Err(e) => Err(e),
        Ok(_) => dispatch(spec, point, config, ws, &mut result),
    };
    match run {
        Ok(true) => {}
        Ok(false) => result.outcome = Outcome::Fail,
        Err(Error::BudgetExceeded { predicted, budget }) => {
            result.outcome = Outcome::SkippedOverBudget;
            result.values.insert("predicted".into(), predicted.to_string());
            result.values.insert("budget".into(), budget.to_string());
        }
        Err(e @ Error::DigitCapExceeded { .. }) => {
            result.outcome = Outcome::SkippedOverBudget;
            result.note = Some(e.to_string());
        }
        Err(e) => {
            result.outcome = Outcome::Fail;
            result.note = Some(e.to_string());
        }
    }

    if spec.exceptions.contains(&point) {
        match result.outcome {
            Outcome::Fail => result.outcome = Outcome::ExpectedException,
            Outcome::Pass => result.note = Some("listed as an exception but the identity held".into()),
            _ => {}
        }
    }
    if config.timing {
        result.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    result
}

fn dispatch(
    spec: &CheckSpec,
    point: GridPoint,
    config: &SuiteConfig,
    ws: &mut Workspace,
    out: &mut PointResult,
) -> Result<bool, Error> {
    let GridPoint { n, k, .. } = point;
    let k = k.unwrap_or(0);
    match spec.check {
        CheckKind::UnionProduct => union_product(ws, n, k, out),
        CheckKind::Overlap => overlap(ws, n, k, out),
        CheckKind::PrefixStability => prefix_stability(ws, n, k, out),
        CheckKind::Superset => superset(ws, n, out),
        CheckKind::Stabilization => stabilization(ws, n, k, out),
        CheckKind::SplitBound => split_bound(ws, n, out),
        CheckKind::FactorBound => factor_bound(ws, n, out),
        CheckKind::Sampler => {
            let params = match &spec.p {
                Some(p) => Params::new(ws.m, p.clone())?,
                None => Params::uniform(ws.m)?,
            };
            let trials = spec.trials.unwrap_or(DEFAULT_TRIALS);
            let seed = spec.seed.unwrap_or(config.seed);
            sampler(ws, &params, n, trials, seed, out)
        }
    }
}

fn put(out: &mut PointResult, key: &str, value: impl ToString) {
    out.values.insert(key.to_string(), value.to_string());
}

/// Records both cardinalities and up to [`MAX_WITNESSES`] words of the
/// symmetric difference; true when the sets are equal.
fn compare(out: &mut PointResult, label: &str, left: &WordSet, right: &WordSet) -> bool {
    put(out, &format!("{label}left_count"), left.len());
    put(out, &format!("{label}right_count"), right.len());
    let room = MAX_WITNESSES.saturating_sub(out.witnesses.len());
    let left_only = left.difference(right).map(|w| (w, "left_only"));
    let right_only = right.difference(left).map(|w| (w, "right_only"));
    out.witnesses.extend(left_only.chain(right_only).take(room).map(|(w, side)| Witness {
        word: format!("{w:#}"),
        side: format!("{label}{side}"),
    }));
    left == right
}

fn union_product(ws: &mut Workspace, n: usize, k: usize, out: &mut PointResult) -> Result<bool, Error> {
    let enumerated = BigUint::from(ws.union_product(n, k)?.len());
    put(out, "enumerated", &enumerated);
    match ws.counting.count_union_product(n, k as u32) {
        Ok(formula) => {
            put(out, "formula", &formula);
            Ok(formula == enumerated)
        }
        Err(Error::InexactDivision { numerator, denominator }) => {
            put(out, "formula", format!("{numerator}/{denominator}"));
            Ok(false)
        }
        Err(e) => Err(e),
    }
}

fn overlap(ws: &mut Workspace, n: usize, k: usize, out: &mut PointResult) -> Result<bool, Error> {
    let u = ws.union_product(n, k)?;
    let u_prev = ws.union_product(n, k - 1)?;
    let a = ws.a(n)?;
    let left = a.product(&u).intersection(&u.product(a))?;
    let right = WordSet::product_all([a, &u_prev, a]);
    Ok(compare(out, "", &left, &right))
}

fn prefix_stability(ws: &mut Workspace, n: usize, k: usize, out: &mut PointResult) -> Result<bool, Error> {
    let l = ws.length(n);
    let big = ws.length(n + k);
    let a = ws.a(n)?;
    let prefix = a.slice(1, l - 1)?;
    let suffix = a.slice(2, l)?;
    // separate slicers so the two memo tables never coexist
    let big_prefix = WindowSlicer::new(ws.m, ws.budget).window(n + k, 1, l - 1)?;
    let p = compare(out, "prefix_", &prefix, &big_prefix);
    drop(big_prefix);
    let big_suffix = WindowSlicer::new(ws.m, ws.budget).window(n + k, big - l + 2, big)?;
    let s = compare(out, "suffix_", &suffix, &big_suffix);
    Ok(p && s)
}

fn superset(ws: &mut Workspace, n: usize, out: &mut PointResult) -> Result<bool, Error> {
    let b = SupersetB::new(ws.factors.generations(), n)?;
    let a = ws.a(n)?;
    put(out, "a_count", a.len());
    put(out, "b_count", b.cardinality());
    let outside: Vec<_> = a.iter().filter(|w| !b.contains(w)).collect();
    put(out, "outside_count", outside.len());
    out.witnesses.extend(outside.iter().take(MAX_WITNESSES).map(|w| Witness {
        word: w.to_string(),
        side: "outside_superset".into(),
    }));
    Ok(outside.is_empty())
}

fn stabilization(ws: &mut Workspace, n: usize, k: usize, out: &mut PointResult) -> Result<bool, Error> {
    let report = ws.factors.stabilization(n, k)?;
    put(out, "relation", report.relation.as_str());
    put(out, "left_count", report.left_count);
    put(out, "right_count", report.right_count);
    let extra = report.extra_in_left.iter().map(|w| (w, "left_only"));
    let missing = report.missing_from_left.iter().map(|w| (w, "right_only"));
    out.witnesses.extend(extra.chain(missing).take(MAX_WITNESSES).map(|(w, side)| Witness {
        word: w.to_string(),
        side: side.into(),
    }));
    Ok(report.relation == Relation::Equal)
}

fn four_pow(m: u32, n: usize) -> BigUint {
    BigUint::from(4u32).pow(m * n as u32)
}

fn split_bound(ws: &mut Workspace, n: usize, out: &mut PointResult) -> Result<bool, Error> {
    let m = ws.m;
    let a = ws.a(n)?;
    let l = a.word_len();
    let size = BigUint::from(a.len());
    let bound = four_pow(m, n) * &size;
    // |A_n[1, k]| and |A_n[k + 1, l_n]| for every cut, without materialising slices
    let prefixes = a.prefix_counts();
    let suffixes = a.reversed().prefix_counts();
    let mut best: Option<(f64, usize)> = None;
    let mut ok = true;
    for k in 1..l {
        let product = BigUint::from(prefixes[k]) * BigUint::from(suffixes[l - k]);
        let ratio = rfib_core::counting::ratio_to_f64(&product, &size);
        if best.is_none_or(|(r, _)| ratio > r) {
            best = Some((ratio, k));
        }
        if product > bound && ok {
            ok = false;
            put(out, "violating_k", k);
            put(out, "violating_product", &product);
        }
    }
    put(out, "a_count", &size);
    put(out, "bound", &bound);
    if let Some((ratio, k)) = best {
        put(out, "max_ratio", format!("{ratio:.6}"));
        put(out, "argmax_k", k);
    }
    Ok(ok)
}

fn factor_bound(ws: &mut Workspace, n: usize, out: &mut PointResult) -> Result<bool, Error> {
    let f = BigUint::from(ws.factors.count_f(n)?);
    let a = BigUint::from(ws.a(n)?.len());
    let l = ws.counting.length(n).clone();
    let bound = four_pow(ws.m, n) * &l * &a;
    put(out, "f_count", &f);
    put(out, "a_count", &a);
    put(out, "bound", &bound);
    Ok(f <= bound)
}

struct Draw {
    stream: u64,
    member: bool,
    first_choice: Option<u32>,
    offending: Option<(String, Vec<u32>)>,
}

fn sampler(
    ws: &mut Workspace,
    params: &Params,
    n: usize,
    trials: u64,
    seed: u64,
    out: &mut PointResult,
) -> Result<bool, Error> {
    let m = ws.m;
    let a = ws.a(n)?;
    let sampler = Sampler::new(params.clone(), seed);
    let draws: Vec<Draw> = (0..trials)
        .into_par_iter()
        .map(|stream| {
            let s = sampler.sample(n, stream)?;
            let member = a.contains(&s.word);
            Ok(Draw {
                stream,
                member,
                first_choice: s.third_generation_choice(),
                offending: (!member).then(|| (s.word.to_string(), s.choice_log.clone())),
            })
        })
        .collect::<Result<_, Error>>()?;

    put(out, "a_count", a.len());
    put(out, "samples", trials);
    put(out, "seed", seed);
    let outside: Vec<&Draw> = draws.iter().filter(|d| !d.member).collect();
    put(out, "outside_count", outside.len());
    if let Some(first) = outside.first() {
        let (word, log) = first.offending.clone().expect("recorded for non-members");
        let log: Vec<String> = log.iter().map(u32::to_string).collect();
        put(out, "offending_stream", first.stream);
        put(out, "offending_choices", log.join(","));
        out.witnesses.push(Witness {
            word,
            side: "outside_a_n".into(),
        });
        return Ok(false);
    }
    if n < 3 {
        out.note = Some("no substitution choice before generation 3; chi-square not applicable".into());
        return Ok(true);
    }

    let mut counts = vec![0u64; m as usize + 1];
    for d in &draws {
        counts[d.first_choice.expect("n >= 3") as usize] += 1;
    }
    put(
        out,
        "r3_counts",
        counts.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
    );
    Ok(chi_square(params.p(), &counts, trials, out))
}

/// Two-sided goodness-of-fit test of the observed first choices against `p`.
fn chi_square(p: &[f64], counts: &[u64], trials: u64, out: &mut PointResult) -> bool {
    if let Some(i) = (0..p.len()).find(|&i| p[i] == 0.0 && counts[i] > 0) {
        put(out, "impossible_choice", i);
        return false;
    }
    let support: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0).collect();
    if support.len() < 2 {
        out.note = Some("single possible outcome; chi-square not applicable".into());
        return true;
    }
    let expected: Vec<f64> = support.iter().map(|&i| p[i] * trials as f64).collect();
    if expected.iter().any(|&e| e < MIN_EXPECTED_COUNT) {
        out.note = Some(format!("chi-square skipped: an expected count is below {MIN_EXPECTED_COUNT}"));
        return true;
    }
    let stat: f64 = support
        .iter()
        .zip(&expected)
        .map(|(&i, &e)| (counts[i] as f64 - e).powi(2) / e)
        .sum();
    let df = (support.len() - 1) as f64;
    let dist = ChiSquared::new(df).expect("df >= 1");
    let lower = dist.inverse_cdf(SIGNIFICANCE / 2.0);
    let upper = dist.inverse_cdf(1.0 - SIGNIFICANCE / 2.0);
    put(out, "chi_square", format!("{stat:.6}"));
    put(out, "df", df);
    put(out, "chi_square_lower", format!("{lower:.6}"));
    put(out, "chi_square_upper", format!("{upper:.6}"));
    (lower..=upper).contains(&stat)
}
