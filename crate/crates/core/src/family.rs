//! The random substitution `0 ↦ 1`, `1 ↦ 1^i 0 1^(m-i)` (probability `p_i`)
//! and a reproducible sampler of the chain `r_1 = 0, r_{k+1} = θ(r_k)`.
//!
//! Randomness comes from ChaCha8 seeded with a 64-bit seed through
//! `SeedableRng::seed_from_u64`. Independent samples drawn under one seed use
//! distinct ChaCha stream ids (`set_stream(trial)`), so trial `t` is the same
//! word no matter how trials are scheduled across threads.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::word::Word;

/// Allowed deviation of `Σ p_i` from 1.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Family parameter `m >= 1` and the probabilities `p_0..p_m`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Params {
    m: u32,
    p: Vec<f64>,
}

impl Params {
    /// Validates without renormalising: a vector that does not sum to 1 is an error.
    pub fn new(m: u32, p: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParams("m must be at least 1".into()));
        }
        if p.len() != m as usize + 1 {
            return Err(Error::InvalidParams(format!(
                "expected {} probabilities for m = {m}, got {}",
                m + 1,
                p.len()
            )));
        }
        if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0 && **v <= 1.0)) {
            return Err(Error::InvalidParams(format!("p_{i} = {v} is not in [0, 1]")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::InvalidParams(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Params { m, p })
    }

    /// All mass on the single image `1^i 0 1^(m-i)`.
    pub fn deterministic(m: u32, i: u32) -> Result<Self> {
        if i > m {
            return Err(Error::ImageIndex { m, i });
        }
        let mut p = alloc::vec![0.0; m as usize + 1];
        p[i as usize] = 1.0;
        Params::new(m, p)
    }

    pub fn uniform(m: u32) -> Result<Self> {
        let q = 1.0 / f64::from(m + 1);
        let mut p = alloc::vec![q; m as usize + 1];
        // absorb rounding in the last entry
        let head: f64 = p[..m as usize].iter().sum();
        p[m as usize] = 1.0 - head;
        Params::new(m, p)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, &pi) in self.p.iter().enumerate() {
            acc += pi;
            if u < acc {
                return i as u32;
            }
        }
        // u landed in the rounding gap above the cumulative sum
        self.p.iter().rposition(|&pi| pi > 0.0).unwrap_or(0) as u32
    }
}

/// `1^i 0 1^(m-i)`, the image of `1` under choice `i`.
pub fn image_of_one(m: u32, i: u32) -> Result<Word> {
    if i > m {
        return Err(Error::ImageIndex { m, i });
    }
    Ok(Word::from_letters((0..=m).map(|pos| pos != i)))
}

/// One application of the substitution, drawing an independent choice for
/// every `1` in `w`. Choices are appended to `log` in left-to-right order.
pub fn substitute<R: Rng>(params: &Params, w: &Word, rng: &mut R, log: &mut Vec<u32>) -> Word {
    let m = params.m;
    let images: Vec<Word> = (0..=m).map(|i| image_of_one(m, i).expect("i <= m")).collect();
    let one = Word::from_u64(1, 1);
    let mut out = Word::empty();
    for bit in w.letters() {
        if bit {
            let i = params.draw(rng);
            log.push(i);
            out = out.concat(&images[i as usize]);
        } else {
            out = out.concat(&one);
        }
    }
    out
}

/// A sampled inflated word `r_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ChainSample {
    pub generation: usize,
    pub word: Word,
    pub seed: u64,
    pub stream: u64,
    /// Choice index for every substituted `1`, generation by generation.
    pub choice_log: Vec<u32>,
}

impl ChainSample {
    /// The choice made when `r_2 = 1` was substituted, i.e. `r_3 = 1^i 0 1^(m-i)`.
    pub fn third_generation_choice(&self) -> Option<u32> {
        (self.generation >= 3).then(|| self.choice_log[0])
    }
}

/// Owns the RNG configuration for one parameter set and seed.
#[derive(Debug, Clone)]
pub struct Sampler {
    params: Params,
    seed: u64,
}

impl Sampler {
    pub fn new(params: Params, seed: u64) -> Self {
        Sampler { params, seed }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// `r_n` on ChaCha stream `stream`.
    pub fn sample(&self, n: usize, stream: u64) -> Result<ChainSample> {
        if n == 0 {
            return Err(Error::GenerationTooSmall { n, min: 1 });
        }
        let mut rng = self.rng(stream);
        let mut word = Word::from_u64(0, 1);
        let mut choice_log = Vec::new();
        for _ in 1..n {
            word = substitute(&self.params, &word, &mut rng, &mut choice_log);
        }
        Ok(ChainSample {
            generation: n,
            word,
            seed: self.seed,
            stream,
            choice_log,
        })
    }
}

/// `r_n` for `seed` on stream 0.
pub fn sample_chain(params: &Params, n: usize, seed: u64) -> Result<ChainSample> {
    Sampler::new(params.clone(), seed).sample(n, 0)
}
