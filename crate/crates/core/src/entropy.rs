//! Entropy sequences `h_A(n) = ln|A_n| / l_n`, `h_F(n) = ln|F_n| / l_n`
//! and the gap bound `(m·n·ln 4 + ln l_n) / l_n` that squeezes them together.
//!
//! Natural logarithms throughout.

use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::counting::{ln_biguint, ratio_to_f64, CountingContext};
use crate::error::{Error, Result};
use crate::factors::FactorTable;
use crate::family::Params;

/// Default generation cap for [`entropy_estimate`].
pub const DEFAULT_N_CAP: usize = 200;

/// `h_A(n)` as `Σ_{i=2}^{n-1} (d_{i-1}/l_n)·ln(m(n-i)+1)`, each ratio formed
/// from the exact integers before conversion so nothing overflows.
pub fn h_a(ctx: &mut CountingContext, n: usize) -> f64 {
    if n < 3 {
        return 0.0;
    }
    let m = u64::from(ctx.m());
    let l = ctx.length(n).clone();
    (2..n)
        .map(|i| {
            let base = (m * (n - i) as u64 + 1) as f64;
            ratio_to_f64(ctx.d(i - 1), &l) * libm::log(base)
        })
        .sum()
}

/// `ln|A_n| / l_n` through the big-integer value of `|A_n|`.
pub fn h_a_from_count(ctx: &mut CountingContext, n: usize) -> Result<f64> {
    let count = ctx.count_a_closed(n)?;
    let l = ctx.length(n).clone();
    Ok(ln_biguint(&count) / big_to_f64(&l))
}

/// `ln|F_n| / l_n` with `F_n` enumerated.
pub fn h_f(table: &mut FactorTable, n: usize) -> Result<f64> {
    let count = table.count_f(n)?;
    let l = table.generations().length(n);
    Ok(libm::log(count as f64) / l as f64)
}

/// `(m·n·ln 4 + ln l_n) / l_n`, the room left between `h_A(n)` and `h_F(n)`.
pub fn gap_bound(ctx: &mut CountingContext, n: usize) -> f64 {
    let l = ctx.length(n).clone();
    let numerator = f64::from(ctx.m()) * n as f64 * libm::log(4.0) + ln_biguint(&l);
    numerator / big_to_f64(&l)
}

fn big_to_f64(x: &BigUint) -> f64 {
    crate::counting::biguint_to_f64(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyRow {
    pub n: usize,
    pub l_n: BigUint,
    pub log_count_a: f64,
    pub h_a: f64,
    pub h_f: Option<f64>,
    pub gap_bound: f64,
}

impl EntropyRow {
    pub fn h_a_log2(&self) -> f64 {
        self.h_a / core::f64::consts::LN_2
    }

    pub fn h_f_log2(&self) -> Option<f64> {
        self.h_f.map(|h| h / core::f64::consts::LN_2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    pub m: u32,
    pub tol: f64,
    pub n_cap: usize,
    pub rows: Vec<EntropyRow>,
    /// Last `h_A(n)` computed.
    pub estimate: f64,
    pub n_reached: usize,
    /// `|h_A(n) - h_A(n-1)| < tol` was reached before the cap.
    pub converged: bool,
    /// `h_A` never decreased across the rows.
    pub monotone: bool,
}

impl EntropyReport {
    pub fn estimate_log2(&self) -> f64 {
        self.estimate / core::f64::consts::LN_2
    }

    /// Fills `h_F` for every row whose `F_n` fits the table's budget.
    pub fn fill_h_f(&mut self, table: &mut FactorTable) -> Result<()> {
        for row in &mut self.rows {
            match h_f(table, row.n) {
                Ok(h) => row.h_f = Some(h),
                Err(Error::BudgetExceeded { .. }) | Err(Error::DigitCapExceeded { .. }) => break,
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }
}

/// Iterates `h_A(n)` from `n = 3` until two successive values differ by less
/// than `tol`, or `n_cap` is reached (then `converged` is false and the last
/// value is still reported).
pub fn entropy_estimate(m: u32, tol: f64, n_cap: usize) -> Result<EntropyReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(alloc::format!("tolerance must be positive, got {tol}")));
    }
    if m == 0 {
        return Err(Error::InvalidParams("m must be at least 1".into()));
    }
    let mut ctx = CountingContext::new(m);
    let mut rows: Vec<EntropyRow> = Vec::new();
    let mut converged = false;
    for n in 3..=n_cap.max(3) {
        let h = h_a(&mut ctx, n);
        let l_n = ctx.length(n).clone();
        let row = EntropyRow {
            n,
            log_count_a: h * big_to_f64(&l_n),
            l_n,
            h_a: h,
            h_f: None,
            gap_bound: gap_bound(&mut ctx, n),
        };
        let done = rows.last().is_some_and(|prev| (h - prev.h_a).abs() < tol);
        rows.push(row);
        if done {
            converged = true;
            break;
        }
    }
    let last = rows.last().expect("at least n = 3");
    let monotone = rows.windows(2).all(|p| p[1].h_a >= p[0].h_a);
    Ok(EntropyReport {
        m,
        tol,
        n_cap,
        estimate: last.h_a,
        n_reached: last.n,
        converged,
        monotone,
        rows,
    })
}

/// Same as [`entropy_estimate`]; the probabilities play no part in
/// topological entropy and are not read.
pub fn entropy_estimate_for(params: &Params, tol: f64, n_cap: usize) -> Result<EntropyReport> {
    entropy_estimate(params.m(), tol, n_cap)
}
