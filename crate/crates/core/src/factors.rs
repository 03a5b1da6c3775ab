//! Factor sets of the inflated words.
//!
//! `F(A_n², l_n)` is formed through its cut decomposition: a window of length
//! `l_n` in a word of `A_n A_n` starting after `k` letters is a suffix of
//! length `l_n - k` followed by a prefix of length `k`, so
//!
//! ```text
//! F(A_n², l_n) = ⋃_{k=0}^{l_n-1} A_n[k+1, l_n] · A_n[1, k]
//! ```
//!
//! and `A_n²` itself is never built. For `n >= 3` this set is `F_n`, the
//! length-`l_n` factors of the whole limit language.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::inflation::{GenerationTable, WindowSlicer};
use crate::word::{Word, WordSet};
use crate::Budget;

/// Witnesses kept per side of a set comparison.
pub const MAX_WITNESSES: usize = 10;

/// How `F(A_{n+k}, l_n)` relates to `F(A_n², l_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Relation {
    Equal,
    LeftProperSubset,
    LeftProperSuperset,
    Incomparable,
}

impl Relation {
    pub fn between(left: &WordSet, right: &WordSet) -> Relation {
        match (left.is_subset(right), right.is_subset(left)) {
            (true, true) => Relation::Equal,
            (true, false) => Relation::LeftProperSubset,
            (false, true) => Relation::LeftProperSuperset,
            (false, false) => Relation::Incomparable,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Equal => "equal",
            Relation::LeftProperSubset => "left_proper_subset",
            Relation::LeftProperSuperset => "left_proper_superset",
            Relation::Incomparable => "incomparable",
        }
    }
}

/// Outcome of comparing `F(A_{n+k}, l_n)` (left) with `F(A_n², l_n)` (right).
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StabilizationReport {
    pub m: u32,
    pub n: usize,
    pub k: usize,
    pub relation: Relation,
    pub left_count: usize,
    pub right_count: usize,
    /// In the right set but not the left one.
    pub missing_from_left: Vec<Word>,
    /// In the left set but not the right one.
    pub extra_in_left: Vec<Word>,
}

/// `F(A_n², l_n)` and `F(A, t)` for one `m`, memoised.
#[derive(Debug, Clone)]
pub struct FactorTable {
    generations: GenerationTable,
    slicer: WindowSlicer,
    by_generation: BTreeMap<usize, WordSet>,
    by_length: BTreeMap<usize, WordSet>,
}

impl FactorTable {
    pub fn new(m: u32, budget: Budget) -> Self {
        FactorTable::from_generations(GenerationTable::new(m, budget))
    }

    pub fn from_generations(generations: GenerationTable) -> Self {
        let slicer = WindowSlicer::new(generations.m(), generations.budget());
        FactorTable {
            generations,
            slicer,
            by_generation: BTreeMap::new(),
            by_length: BTreeMap::new(),
        }
    }

    pub fn m(&self) -> u32 {
        self.generations.m()
    }

    pub fn generations(&mut self) -> &mut GenerationTable {
        &mut self.generations
    }

    /// `F(A_n², l_n)` by cut decomposition; equals `F_n` for `n >= 3`.
    ///
    /// The budget bounds `Σ_k |A_n[k+1, l_n]|·|A_n[1, k]|`, the number of
    /// words generated before deduplication.
    pub fn f_n(&mut self, n: usize) -> Result<&WordSet> {
        if !self.by_generation.contains_key(&n) {
            let set = self.cut_decomposition(n)?;
            self.by_generation.insert(n, set);
        }
        Ok(&self.by_generation[&n])
    }

    fn cut_decomposition(&mut self, n: usize) -> Result<WordSet> {
        let budget = self.generations.budget();
        let a = self.generations.build(n)?;
        let l = a.word_len();
        let mut cuts = Vec::with_capacity(l);
        let mut total: u128 = 0;
        for k in 0..l {
            let suffix = a.slice(k + 1, l)?;
            let prefix = a.slice(1, k)?;
            total += suffix.len() as u128 * prefix.len() as u128;
            cuts.push((suffix, prefix));
        }
        budget.check_u128(total)?;
        let mut acc = WordSet::empty(l);
        for (suffix, prefix) in cuts {
            acc = acc.union(&suffix.product(&prefix))?;
        }
        Ok(acc)
    }

    pub fn count_f(&mut self, n: usize) -> Result<usize> {
        Ok(self.f_n(n)?.len())
    }

    /// Smallest `n >= 3` with `l_n >= t`.
    pub fn minimal_generation(&mut self, t: usize) -> usize {
        let mut n = 3;
        while self.generations.length(n) < t {
            n += 1;
        }
        n
    }

    /// `F(A, t) = F(F_n, t)` for the smallest `n >= 3` with `l_n >= t`.
    pub fn any(&mut self, t: usize) -> Result<&WordSet> {
        if !self.by_length.contains_key(&t) {
            let n = self.minimal_generation(t);
            let set = self.any_at(t, n)?;
            self.by_length.insert(t, set);
        }
        Ok(&self.by_length[&t])
    }

    /// `F(F_n, t)` for an explicit `n`; any `n` at or above
    /// [`FactorTable::minimal_generation`] gives the same set.
    pub fn any_at(&mut self, t: usize, n: usize) -> Result<WordSet> {
        if n < 3 {
            return Err(Error::GenerationTooSmall { n, min: 3 });
        }
        self.f_n(n)?.factors(t)
    }

    /// `F(A_N, t)` by scanning every window of `A_N`. Uses the materialised
    /// generation when it fits the budget and recursive window slices otherwise.
    pub fn window_scan(&mut self, big_n: usize, t: usize) -> Result<WordSet> {
        match self.generations.build(big_n) {
            Ok(a) => a.factors(t),
            Err(Error::BudgetExceeded { .. }) | Err(Error::DigitCapExceeded { .. }) => {
                self.slicer.factors(big_n, t)
            }
            Err(e) => Err(e),
        }
    }

    /// Compares `F(A_{n+k}, l_n)` with `F(A_n², l_n)`, reporting up to
    /// [`MAX_WITNESSES`] words from each side of the symmetric difference.
    pub fn stabilization(&mut self, n: usize, k: usize) -> Result<StabilizationReport> {
        let l = self.generations.length(n);
        let left = self.window_scan(n + k, l)?;
        let m = self.m();
        let right = self.f_n(n)?;
        Ok(StabilizationReport {
            m,
            n,
            k,
            relation: Relation::between(&left, right),
            left_count: left.len(),
            right_count: right.len(),
            missing_from_left: right.difference(&left).take(MAX_WITNESSES).cloned().collect(),
            extra_in_left: left.difference(right).take(MAX_WITNESSES).cloned().collect(),
        })
    }
}

/// `F(A_n², l_n)` for parameter `m`.
pub fn factor_set_f(m: u32, n: usize, budget: Budget) -> Result<WordSet> {
    FactorTable::new(m, budget).f_n(n).cloned()
}

pub fn count_f(m: u32, n: usize, budget: Budget) -> Result<usize> {
    FactorTable::new(m, budget).count_f(n)
}

pub fn factor_set_any(m: u32, t: usize, budget: Budget) -> Result<WordSet> {
    FactorTable::new(m, budget).any(t).cloned()
}

pub fn stabilization_check(m: u32, n: usize, k: usize, budget: Budget) -> Result<StabilizationReport> {
    FactorTable::new(m, budget).stabilization(n, k)
}
