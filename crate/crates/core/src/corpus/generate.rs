//! Seeded random CNF instances.
//!
//! The stream is SplitMix64 started at the seed. Integers below `b` come from
//! rejection sampling on whole 64-bit words, so a seed reproduces the same
//! formula on every platform and every version of this crate.

use std::collections::HashSet;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::cnf::{oracle_bounds, CnfFormula};
use crate::error::{FsosError, Result};

const MAX_RESAMPLES: usize = 10_000;

/// The mixed-width recipe: `m1` unit and `m2` binary clauses over
/// `x_kappa..x_n`, and `m3` ternary clauses over `x_1..x_core`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structured {
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
    pub kappa: usize,
    pub core: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub k: usize,
    pub n: usize,
    /// Clauses drawn before duplicates are removed; `3 k n` by default.
    pub m: usize,
    pub seed: u64,
    pub require_unsat: bool,
    pub structured: Option<Structured>,
}

impl GenSpec {
    pub fn new(k: usize, n: usize, seed: u64) -> GenSpec {
        GenSpec {
            k,
            n,
            m: 3 * k * n,
            seed,
            require_unsat: false,
            structured: None,
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(FsosError::InvalidArgument(m));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        match &self.structured {
            None => {
                if self.m == 0 {
                    return bad("m must be positive".into());
                }
                if self.k == 0 || self.k > self.n {
                    return bad(format!("clause width {} must lie in 1..={}", self.k, self.n));
                }
            }
            Some(s) => {
                if s.m1 + s.m2 + s.m3 == 0 {
                    return bad("structured recipe draws no clauses".into());
                }
                if s.kappa == 0 || s.kappa > self.n {
                    return bad(format!("kappa {} must lie in 1..={}", s.kappa, self.n));
                }
                if s.m2 > 0 && self.n - s.kappa + 1 < 2 {
                    return bad("binary clauses need two variables in x_kappa..x_n".into());
                }
                if s.m3 > 0 && (s.core < 3 || s.core > self.n) {
                    return bad(format!("ternary core {} must lie in 3..={}", s.core, self.n));
                }
            }
        }
        Ok(())
    }
}

/// Word stream with unbiased bounded draws.
pub struct Stream(SplitMix64);

impl Stream {
    pub fn new(seed: u64) -> Stream {
        Stream(SplitMix64::from_seed(seed.to_le_bytes()))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `0..bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        // largest multiple of bound that fits, as a rejection threshold
        let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }
}

/// `width` distinct variables from `lo..=hi`, uniform signs.
fn clause(rng: &mut Stream, width: usize, lo: usize, hi: usize) -> Vec<i64> {
    let span = (hi - lo + 1) as u64;
    let mut vars: Vec<usize> = Vec::with_capacity(width);
    while vars.len() < width {
        let v = lo + rng.below(span) as usize;
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    vars.into_iter()
        .map(|v| if rng.coin() { -(v as i64) } else { v as i64 })
        .collect()
}

fn draw(spec: &GenSpec, rng: &mut Stream) -> Vec<Vec<i64>> {
    let mut raw = Vec::new();
    match &spec.structured {
        None => {
            for _ in 0..spec.m {
                raw.push(clause(rng, spec.k, 1, spec.n));
            }
        }
        Some(s) => {
            for _ in 0..s.m1 {
                raw.push(clause(rng, 1, s.kappa, spec.n));
            }
            for _ in 0..s.m2 {
                raw.push(clause(rng, 2, s.kappa, spec.n));
            }
            for _ in 0..s.m3 {
                raw.push(clause(rng, 3, 1, s.core));
            }
        }
    }
    // drop repeated clauses, keeping first occurrences
    let mut seen = HashSet::new();
    raw.into_iter()
        .filter(|c| {
            let mut key = c.clone();
            key.sort_unstable();
            seen.insert(key)
        })
        .collect()
}

/// Draws a formula; with `require_unsat`, whole clause sets are redrawn from
/// the continuing stream until the oracle finds no satisfying assignment.
pub fn gen_random(spec: &GenSpec, oracle_limit: usize) -> Result<CnfFormula> {
    spec.check()?;
    if spec.require_unsat && spec.n > oracle_limit {
        return Err(FsosError::AboveExhaustiveLimit {
            n: spec.n,
            limit: oracle_limit,
        });
    }
    let mut rng = Stream::new(spec.seed);
    for _ in 0..MAX_RESAMPLES {
        let phi = CnfFormula::new(spec.n, &draw(spec, &mut rng))?;
        if !spec.require_unsat || oracle_bounds(&phi, oracle_limit)?.l_min > 0 {
            return Ok(phi);
        }
    }
    Err(FsosError::InvalidArgument(format!(
        "no unsatisfiable formula after {MAX_RESAMPLES} draws"
    )))
}
