//! Shared-randomness index coding.
//!
//! Picking uniformly among eligible indices is the same as drawing a random
//! permutation and taking the first eligible element in permuted order. The
//! permuted rank of that element is geometric when eligibility is i.i.d.,
//! so it can be Golomb coded. Encoder and decoder draw the permutation from
//! the same seeded stream.
//!
//! The permutation is forward Fisher-Yates generated lazily: position `k`
//! takes the element at `k + below(n - k)`. Only the prefix up to the
//! selected rank is ever materialized, so one lookup costs `O(rank)`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::rng::DetRng;

#[derive(Debug)]
pub struct LazyPermutation<'r> {
    n: u64,
    k: u64,
    displaced: HashMap<u64, u64>,
    rng: &'r mut DetRng,
}

impl<'r> LazyPermutation<'r> {
    pub fn new(n: u64, rng: &'r mut DetRng) -> Self {
        Self {
            n,
            k: 0,
            displaced: HashMap::new(),
            rng,
        }
    }

    fn at(&self, pos: u64) -> u64 {
        self.displaced.get(&pos).copied().unwrap_or(pos)
    }
}

impl Iterator for LazyPermutation<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.k == self.n {
            return None;
        }
        let j = self.k + self.rng.below(self.n - self.k);
        let picked = self.at(j);
        let current = self.at(self.k);
        self.displaced.insert(j, current);
        self.displaced.remove(&self.k);
        self.k += 1;
        Some(picked)
    }
}

/// Rank (1-based) and original index of the first eligible element under a
/// fresh permutation drawn from `rng`.
pub fn permuted_rank_encode(
    n: usize,
    mut eligible: impl FnMut(usize) -> bool,
    rng: &mut DetRng,
) -> Result<(u64, usize)> {
    for (pos, idx) in LazyPermutation::new(n as u64, rng).enumerate() {
        if eligible(idx as usize) {
            return Ok((pos as u64 + 1, idx as usize));
        }
    }
    Err(Error::param("no eligible element"))
}

/// Variant taking explicit flags.
pub fn permuted_rank_encode_flags(flags: &[bool], rng: &mut DetRng) -> Result<(u64, usize)> {
    permuted_rank_encode(flags.len(), |i| flags[i], rng)
}

/// Inverse of [`permuted_rank_encode`] for a decoder holding the same stream.
pub fn permuted_rank_decode(n: usize, rank: u64, rng: &mut DetRng) -> Result<usize> {
    if rank == 0 || rank > n as u64 {
        return Err(Error::param(format!("rank {rank} outside 1..={n}")));
    }
    let idx = LazyPermutation::new(n as u64, rng)
        .nth((rank - 1) as usize)
        .expect("rank within range");
    Ok(idx as usize)
}
