//! Exact enumeration of the inflated-word sets
//!
//! ```text
//! A_0 = ∅,  A_1 = {0},  A_2 = {1},
//! A_n = ⋃_{i=0}^{m} ∏_{j=0}^{m} A_{n-1-δ_ij}     (n >= 3)
//! ```
//!
//! plus window slices `A_N[a, b]` computed from the same recursion without
//! materialising `A_N`, and the product superset `B_n ⊇ A_n`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::counting::CountingContext;
use crate::error::{Error, Result};
use crate::word::{Word, WordSet};
use crate::Budget;

/// Memoised `A_1, A_2, ...` for one `m`, built bottom-up.
#[derive(Debug, Clone)]
pub struct GenerationTable {
    m: u32,
    budget: Budget,
    counting: CountingContext,
    sets: Vec<Option<WordSet>>,
}

impl GenerationTable {
    pub fn new(m: u32, budget: Budget) -> Self {
        GenerationTable {
            m,
            budget,
            counting: CountingContext::new(m),
            sets: Vec::new(),
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn counting(&mut self) -> &mut CountingContext {
        &mut self.counting
    }

    pub fn length(&mut self, n: usize) -> usize {
        self.counting.length_usize(n)
    }

    /// `|A_n|` as predicted by the closed form.
    pub fn predicted_count(&mut self, n: usize) -> Result<BigUint> {
        self.counting.count_a_closed(n)
    }

    /// Errors with the predicted size when `A_n` would not fit the budget.
    pub fn check_feasible(&mut self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::GenerationTooSmall { n, min: 1 });
        }
        let predicted = self.counting.count_a_closed(n)?;
        self.budget.check(&predicted)
    }

    /// Whether `A_n` is already materialised.
    pub fn get(&self, n: usize) -> Option<&WordSet> {
        self.sets.get(n).and_then(Option::as_ref)
    }

    /// `A_n`, refusing before any allocation when the predicted `|A_n|`
    /// exceeds the budget. `A_0 = ∅` is never produced.
    pub fn build(&mut self, n: usize) -> Result<&WordSet> {
        self.check_feasible(n)?;
        if self.sets.len() <= n {
            self.sets.resize(n + 1, None);
        }
        for k in 1..=n {
            if self.sets[k].is_none() {
                let set = self.next_generation(k);
                self.sets[k] = Some(set);
            }
        }
        Ok(self.sets[n].as_ref().expect("built above"))
    }

    fn next_generation(&mut self, k: usize) -> WordSet {
        match k {
            1 => return WordSet::singleton(Word::from_u64(0, 1)),
            2 => return WordSet::singleton(Word::from_u64(1, 1)),
            _ => {}
        }
        let m = self.m as usize;
        let len = self.length(k);
        let prev = self.sets[k - 1].as_ref().expect("built bottom-up");
        let prev2 = self.sets[k - 2].as_ref().expect("built bottom-up");
        // term i: A_{k-1}^i A_{k-2} A_{k-1}^{m-i}
        let terms = crate::par::map_collect(0..m + 1, |i| {
            let factors = (0..=m).map(|j| if i == j { prev2 } else { prev });
            WordSet::product_all(factors)
        });
        WordSet::union_all(len, terms).expect("every term has length l_k")
    }

    pub fn member(&mut self, w: &Word, n: usize) -> Result<bool> {
        Ok(self.build(n)?.contains(w))
    }

    /// Common number of zeros in the words of `A_n`:
    /// `z_1 = 1`, `z_2 = 0`, `z_n = l_{n-1} - z_{n-1}`.
    pub fn zero_count(&mut self, n: usize) -> usize {
        assert!(n >= 1);
        let mut z = 1;
        for k in 2..=n {
            z = self.length(k - 1) - z;
        }
        z
    }
}

/// `A_n` for parameter `m`.
pub fn build_a(m: u32, n: usize, budget: Budget) -> Result<WordSet> {
    GenerationTable::new(m, budget).build(n).cloned()
}

/// Whether `w ∈ A_n`.
pub fn member(w: &Word, m: u32, n: usize, budget: Budget) -> Result<bool> {
    GenerationTable::new(m, budget).member(w, n)
}

/// `B_n = P_{n-1} C_{n-1}^{m-1} S_{n-2}` with
///
/// ```text
/// P = A_{n-1}[1, l_{n-1}-1] {0,1}
/// C = {0,1} A_{n-1}[2, l_{n-1}-1] {0,1}
/// S = {0,1} A_{n-2}[2, l_{n-2}]
/// ```
///
/// held as its three factors; the product itself is never formed.
#[derive(Debug, Clone)]
pub struct SupersetB {
    m: u32,
    n: usize,
    block_len: usize,
    prefix: WordSet,
    center: WordSet,
    suffix: WordSet,
}

impl SupersetB {
    pub fn new(table: &mut GenerationTable, n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::GenerationTooSmall { n, min: 4 });
        }
        let l1 = table.length(n - 1);
        let l2 = table.length(n - 2);
        let bits = WordSet::letters();
        let a1 = table.build(n - 1)?.clone();
        let a2 = table.build(n - 2)?;
        let suffix = bits.product(&a2.slice(2, l2)?);
        let prefix = a1.slice(1, l1 - 1)?.product(&bits);
        let center = bits.product(&a1.slice(2, l1 - 1)?).product(&bits);
        Ok(SupersetB {
            m: table.m(),
            n,
            block_len: l1,
            prefix,
            center,
            suffix,
        })
    }

    pub fn generation(&self) -> usize {
        self.n
    }

    pub fn prefix(&self) -> &WordSet {
        &self.prefix
    }

    pub fn center(&self) -> &WordSet {
        &self.center
    }

    pub fn suffix(&self) -> &WordSet {
        &self.suffix
    }

    pub fn word_len(&self) -> usize {
        self.block_len * self.m as usize + self.suffix.word_len()
    }

    /// `|P|·|C|^{m-1}·|S|`; exact because products of uniform-length sets are injective.
    pub fn cardinality(&self) -> BigUint {
        BigUint::from(self.prefix.len())
            * BigUint::from(self.center.len()).pow(self.m - 1)
            * BigUint::from(self.suffix.len())
    }

    pub fn contains(&self, w: &Word) -> bool {
        if w.len() != self.word_len() {
            return false;
        }
        let l = self.block_len;
        if !self.prefix.contains(&w.extract(0, l)) {
            return false;
        }
        for block in 1..self.m as usize {
            if !self.center.contains(&w.extract(block * l, l)) {
                return false;
            }
        }
        self.suffix
            .contains(&w.extract(self.m as usize * l, self.suffix.word_len()))
    }
}

/// Window slices `A_N[a, b]` derived directly from the recursion.
///
/// A window of `A_N` is the union over `i` of the windows of the products
/// `∏_j A_{N-1-δ_ij}`, and a window of a product is the product of the
/// windows of the factors it overlaps. Only sets of window width are ever
/// formed, so short windows of generations far beyond enumeration range are
/// cheap.
#[derive(Debug, Clone)]
pub struct WindowSlicer {
    m: u32,
    budget: Budget,
    counting: CountingContext,
    memo: BTreeMap<(usize, usize, usize), WordSet>,
}

impl WindowSlicer {
    pub fn new(m: u32, budget: Budget) -> Self {
        WindowSlicer {
            m,
            budget,
            counting: CountingContext::new(m),
            memo: BTreeMap::new(),
        }
    }

    pub fn length(&mut self, n: usize) -> usize {
        self.counting.length_usize(n)
    }

    /// `A_n[a, b]`, 1-based inclusive, same bounds rules as [`WordSet::slice`].
    pub fn window(&mut self, n: usize, a: usize, b: usize) -> Result<WordSet> {
        if n == 0 {
            return Err(Error::GenerationTooSmall { n, min: 1 });
        }
        let len = self.length(n);
        if !(a >= 1 && a <= b + 1 && b <= len) {
            return Err(Error::SliceOutOfRange { a, b, len });
        }
        self.window0(n, a - 1, b + 1 - a)
    }

    /// All length-`t` factors of `A_n`, as the union of its windows.
    pub fn factors(&mut self, n: usize, t: usize) -> Result<WordSet> {
        let len = self.length(n);
        if t > len {
            return Err(Error::FactorTooLong { k: t, len });
        }
        let mut acc = WordSet::empty(t);
        for start in 0..=len - t {
            let w = self.window0(n, start, t)?;
            acc = acc.union(&w)?;
        }
        Ok(acc)
    }

    fn window0(&mut self, n: usize, start: usize, width: usize) -> Result<WordSet> {
        if width == 0 {
            return Ok(WordSet::epsilon());
        }
        if n <= 2 {
            return Ok(WordSet::singleton(Word::from_u64(n as u64 - 1, 1)));
        }
        if let Some(hit) = self.memo.get(&(n, start, width)) {
            return Ok(hit.clone());
        }
        let m = self.m as usize;
        let long = self.length(n - 1);
        let short = self.length(n - 2);
        let end = start + width;
        let mut terms = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let mut parts = Vec::new();
            let mut offset = 0;
            for j in 0..=m {
                let (g, l) = if i == j { (n - 2, short) } else { (n - 1, long) };
                let lo = start.max(offset);
                let hi = end.min(offset + l);
                if lo < hi {
                    parts.push(self.window0(g, lo - offset, hi - lo)?);
                }
                offset += l;
                if offset >= end {
                    break;
                }
            }
            let size = parts.iter().fold(1u128, |acc, p| acc.saturating_mul(p.len() as u128));
            self.budget.check_u128(size)?;
            terms.push(WordSet::product_all(parts.iter()));
        }
        let set = WordSet::union_all(width, terms)?;
        self.memo.insert((n, start, width), set.clone());
        Ok(set)
    }
}
