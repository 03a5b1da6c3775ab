//! Exact counting sequences.
//!
//! * `l_n`: common length of the words of `A_n`, `l_1 = l_2 = 1`,
//!   `l_n = m·l_{n-1} + l_{n-2}`.
//! * `d_i`: exponents of the product formula, `d_1 = 1`, `d_2 = m - 1`,
//!   `d_i = m·d_{i-1} + d_{i-2}`.
//! * `|A_n| = ∏_{i=2}^{n-1} (m(n-i)+1)^{d_{i-1}}` for `n >= 3`, together with
//!   the rational recursion it unwinds from and its union-product
//!   generalisation.
//!
//! All integer values are arbitrary precision.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default cap on the decimal size of a cardinality, in digits.
pub const DEFAULT_DIGIT_CAP: u64 = 1_000_000;

/// Memoised `l`, `d` and `|A_n|` for one value of `m`.
#[derive(Debug, Clone)]
pub struct CountingContext {
    m: u32,
    digit_cap: u64,
    /// `l[n]`, with `l[0]` an unused placeholder.
    l: Vec<BigUint>,
    /// `d[i]`, with `d[0]` an unused placeholder.
    d: Vec<BigUint>,
    /// `|A_n|` from the closed form.
    a_closed: Vec<Option<BigUint>>,
    /// `|A_n|` from the rational recursion, always a prefix `1..a_rec.len()`.
    a_rec: Vec<BigUint>,
}

impl CountingContext {
    pub fn new(m: u32) -> Self {
        assert!(m >= 1, "m must be at least 1");
        CountingContext {
            m,
            digit_cap: DEFAULT_DIGIT_CAP,
            l: vec![BigUint::zero(), BigUint::one(), BigUint::one()],
            d: vec![BigUint::zero(), BigUint::one(), BigUint::from(m - 1)],
            a_closed: Vec::new(),
            a_rec: vec![BigUint::zero(), BigUint::one(), BigUint::one()],
        }
    }

    pub fn with_digit_cap(mut self, cap: u64) -> Self {
        self.digit_cap = cap;
        self
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn digit_cap(&self) -> u64 {
        self.digit_cap
    }

    /// `l_n` for `n >= 1`.
    pub fn length(&mut self, n: usize) -> &BigUint {
        assert!(n >= 1, "l_n is defined for n >= 1");
        while self.l.len() <= n {
            let k = self.l.len();
            let next = &self.l[k - 1] * self.m + &self.l[k - 2];
            self.l.push(next);
        }
        &self.l[n]
    }

    /// `l_n` as a machine integer, for lengths of enumerable words.
    pub fn length_usize(&mut self, n: usize) -> usize {
        self.length(n).to_usize().expect("word length exceeds usize")
    }

    /// `d_i` for `i >= 1`.
    pub fn d(&mut self, i: usize) -> &BigUint {
        assert!(i >= 1, "d_i is defined for i >= 1");
        while self.d.len() <= i {
            let k = self.d.len();
            let next = &self.d[k - 1] * self.m + &self.d[k - 2];
            self.d.push(next);
        }
        &self.d[i]
    }

    /// Base of the `i`-th factor of the product formula at generation `n`.
    fn base(&self, n: usize, i: usize) -> u64 {
        u64::from(self.m) * (n - i) as u64 + 1
    }

    /// `ln |A_n|` from the product formula without forming `|A_n|`.
    pub fn log_count_a(&mut self, n: usize) -> f64 {
        if n < 3 {
            return if n == 0 { f64::NEG_INFINITY } else { 0.0 };
        }
        (2..n)
            .map(|i| {
                let b = self.base(n, i) as f64;
                biguint_to_f64(self.d(i - 1)) * libm::log(b)
            })
            .sum()
    }

    /// Decimal digit estimate of `|A_n|`, checked against the cap.
    fn check_digits(&mut self, n: usize) -> Result<()> {
        let digits = self.log_count_a(n) / core::f64::consts::LN_10;
        let digits = if digits.is_finite() { digits as u64 + 1 } else { u64::MAX };
        if digits > self.digit_cap {
            Err(Error::DigitCapExceeded {
                digits,
                cap: self.digit_cap,
            })
        } else {
            Ok(())
        }
    }

    /// `|A_n|` from the closed product formula. `|A_0| = 0`, `|A_1| = |A_2| = 1`.
    pub fn count_a_closed(&mut self, n: usize) -> Result<BigUint> {
        if n == 0 {
            return Ok(BigUint::zero());
        }
        if n < 3 {
            return Ok(BigUint::one());
        }
        if let Some(Some(v)) = self.a_closed.get(n) {
            return Ok(v.clone());
        }
        self.check_digits(n)?;
        let mut acc = BigUint::one();
        for i in 2..n {
            let exp = self.d(i - 1).to_u32().ok_or(Error::DigitCapExceeded {
                digits: u64::MAX,
                cap: self.digit_cap,
            })?;
            acc *= BigUint::from(self.base(n, i)).pow(exp);
        }
        if self.a_closed.len() <= n {
            self.a_closed.resize(n + 1, None);
        }
        self.a_closed[n] = Some(acc.clone());
        Ok(acc)
    }

    /// `|A_n|` by iterating
    /// `|A_{k+1}| = (m(k-1)+1)/(m(k-2)+1) · |A_k|^m · |A_{k-1}|` from `k = 2`,
    /// asserting every division is exact.
    pub fn count_a_rec(&mut self, n: usize) -> Result<BigUint> {
        if n == 0 {
            return Ok(BigUint::zero());
        }
        if n >= 3 {
            self.check_digits(n)?;
        }
        while self.a_rec.len() <= n {
            let k = self.a_rec.len() - 1;
            let num = BigUint::from(self.base(k + 1, 2))
                * self.a_rec[k].pow(self.m)
                * &self.a_rec[k - 1];
            let den = BigUint::from(self.base(k, 2));
            let next = exact_div(num, den)?;
            self.a_rec.push(next);
        }
        Ok(self.a_rec[n].clone())
    }

    /// `|⋃_{i=0}^{k} ∏_{j=0}^{k} A_{n-δ_ij}| = (m(n-2)+k+1)/(m(n-2)+1) · |A_n|^k · |A_{n-1}|`.
    ///
    /// Defined for `n >= 2`; `k = 0` gives `|A_{n-1}|` and `k = m` gives `|A_{n+1}|`.
    pub fn count_union_product(&mut self, n: usize, k: u32) -> Result<BigUint> {
        if n < 2 {
            return Err(Error::GenerationTooSmall { n, min: 2 });
        }
        let an = self.count_a_closed(n)?;
        let an1 = self.count_a_closed(n - 1)?;
        let base = u64::from(self.m) * (n - 2) as u64;
        let num = BigUint::from(base + u64::from(k) + 1) * an.pow(k) * an1;
        exact_div(num, BigUint::from(base + 1))
    }
}

fn exact_div(numerator: BigUint, denominator: BigUint) -> Result<BigUint> {
    let (q, r) = numerator.div_rem(&denominator);
    if r.is_zero() {
        Ok(q)
    } else {
        Err(Error::InexactDivision {
            numerator,
            denominator,
        })
    }
}

/// Nearest `f64`, `inf` when out of range.
pub fn biguint_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// `(top 64 bits, shift)` with `x ≈ top · 2^shift`.
fn split_mantissa(x: &BigUint) -> (f64, i32) {
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_u64().expect("at most 64 bits remain");
    (top as f64, shift as i32)
}

/// `num / den` to within a few ulps, for operands of any size.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "division by zero");
    if num.is_zero() {
        return 0.0;
    }
    let (a, sa) = split_mantissa(num);
    let (b, sb) = split_mantissa(den);
    libm::scalbn(a / b, sa - sb)
}

/// Natural logarithm of a positive integer of any size.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (a, s) = split_mantissa(x);
    libm::log(a) + f64::from(s) * core::f64::consts::LN_2
}

/// `l_n` for parameter `m`.
pub fn length_l(m: u32, n: usize) -> BigUint {
    CountingContext::new(m).length(n).clone()
}

/// `d_i` for parameter `m`.
pub fn d_seq(m: u32, i: usize) -> BigUint {
    CountingContext::new(m).d(i).clone()
}

pub fn count_a_closed(m: u32, n: usize) -> Result<BigUint> {
    CountingContext::new(m).count_a_closed(n)
}

pub fn count_a_rec(m: u32, n: usize) -> Result<BigUint> {
    CountingContext::new(m).count_a_rec(n)
}

pub fn count_union_product(m: u32, n: usize, k: u32) -> Result<BigUint> {
    CountingContext::new(m).count_union_product(n, k)
}

pub fn log_count_a(m: u32, n: usize) -> f64 {
    CountingContext::new(m).log_count_a(n)
}

/// Roots `α = (m + √(m²+4))/2` and `β = (m − √(m²+4))/2` of `x² = m·x + 1`.
pub fn metallic_roots(m: u32) -> (f64, f64) {
    let m = f64::from(m);
    let s = libm::sqrt(m * m + 4.0);
    ((m + s) / 2.0, (m - s) / 2.0)
}

/// Closed form of `l_n` in floating point:
///
/// `l_n = (α^{n-1}(α − m + 1) − β^{n-1}(β − m + 1)) / √(m²+4)`.
///
/// The coefficients are fixed by `l_1 = l_2 = 1`. For `m = 1` this is the
/// usual `(α^n − β^n)/√5`. Rounding the result reproduces `l_n` exactly while
/// `l_n` stays well inside the 53-bit mantissa: through `n = 70` for `m = 1`,
/// `n = 39` for `m = 2` and `n = 29` for `m = 3`. Use
/// [`length_l_binet_exact`] beyond that.
pub fn length_l_binet(m: u32, n: usize) -> f64 {
    assert!(n >= 1);
    let (alpha, beta) = metallic_roots(m);
    let c = f64::from(m) - 1.0;
    let s = libm::sqrt(f64::from(m) * f64::from(m) + 4.0);
    let e = (n - 1) as f64;
    (libm::pow(alpha, e) * (alpha - c) - libm::pow(beta, e) * (beta - c)) / s
}

/// `(α^n − β^n)/√(m²+4)` in floating point.
///
/// This is the metallic Fibonacci sequence `P_0 = 0, P_1 = 1,
/// P_n = m·P_{n-1} + P_{n-2}`. It equals `l_n` only for `m = 1`; in general
/// `l_n = P_n − (m − 1)·P_{n-1}`.
pub fn metallic_binet(m: u32, n: usize) -> f64 {
    let (alpha, beta) = metallic_roots(m);
    let s = libm::sqrt(f64::from(m) * f64::from(m) + 4.0);
    (libm::pow(alpha, n as f64) - libm::pow(beta, n as f64)) / s
}

/// [`length_l_binet`] evaluated in binary fixed point with enough guard bits
/// that rounding to the nearest integer is exact for every `n`.
pub fn length_l_binet_exact(m: u32, n: usize) -> BigUint {
    assert!(n >= 1);
    FixedBinet::new(m, n).length()
}

/// [`metallic_binet`] in exact-rounding fixed point.
pub fn metallic_binet_exact(m: u32, n: usize) -> BigUint {
    FixedBinet::new(m, n).metallic()
}

/// Real arithmetic on `BigInt` scaled by `2^prec`.
struct FixedBinet {
    m: u32,
    n: usize,
    prec: u64,
    sqrt_d: BigInt,
    alpha: BigInt,
    beta: BigInt,
}

impl FixedBinet {
    fn new(m: u32, n: usize) -> Self {
        let (alpha_f, _) = metallic_roots(m);
        let magnitude = libm::ceil(n as f64 * libm::log2(alpha_f)) as u64;
        let prec = magnitude + 64 + 2 * u64::from(usize::BITS - n.leading_zeros());
        let d = BigUint::from(u64::from(m) * u64::from(m) + 4);
        let sqrt_d = BigInt::from((d << (2 * prec)).sqrt());
        let m_fixed = BigInt::from(m) << prec;
        let alpha = (&m_fixed + &sqrt_d) >> 1;
        let beta = (&m_fixed - &sqrt_d) >> 1;
        FixedBinet {
            m,
            n,
            prec,
            sqrt_d,
            alpha,
            beta,
        }
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.prec
    }

    fn pow(&self, x: &BigInt, mut e: usize) -> BigInt {
        let mut acc = BigInt::one() << self.prec;
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn round_div_sqrt_d(&self, numerator: BigInt) -> BigUint {
        let value = (numerator << self.prec) / &self.sqrt_d;
        let half = BigInt::one() << (self.prec - 1);
        let rounded: BigInt = (value + half) >> self.prec;
        match rounded.sign() {
            Sign::Minus => BigUint::zero(),
            _ => rounded.magnitude().clone(),
        }
    }

    fn length(&self) -> BigUint {
        let c = BigInt::from(self.m - 1) << self.prec;
        let lhs = self.mul(&self.pow(&self.alpha, self.n - 1), &(&self.alpha - &c));
        let rhs = self.mul(&self.pow(&self.beta, self.n - 1), &(&self.beta - &c));
        self.round_div_sqrt_d(lhs - rhs)
    }

    fn metallic(&self) -> BigUint {
        let lhs = self.pow(&self.alpha, self.n);
        let rhs = self.pow(&self.beta, self.n);
        self.round_div_sqrt_d(lhs - rhs)
    }
}
