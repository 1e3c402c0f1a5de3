//! Maximum-weight perfect matching on the complete Euclidean graph.
//!
//! Exact mode is a subset dynamic program over the `2^n` sets of still
//! unmatched points: the lowest unmatched index is always paired next, so
//! each state has at most `n - 1` transitions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{dist, Configuration};
use crate::stars::min_star;

/// Largest point count accepted by the exact solver.
pub const MAX_EXACT_POINTS: usize = 20;

/// Relative tolerance under which two matching weights are treated as tied.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchingMode {
    #[default]
    Exact,
    /// Greedy longest-edge-first. Not optimal; never use it to check bounds.
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchingResult {
    /// Pairs `(i, j)` with `i < j`, sorted by `i`.
    pub pairs: Vec<(usize, usize)>,
    pub total_weight: f64,
    pub exact: bool,
}

pub fn max_matching(c: &Configuration) -> Result<MatchingResult> {
    max_matching_with(c, MatchingMode::Exact)
}

pub fn max_matching_with(c: &Configuration, mode: MatchingMode) -> Result<MatchingResult> {
    let n = c.len();
    if n % 2 == 1 {
        return Err(Error::OddCardinality(n));
    }
    let w = weights(c);
    let pairs = match mode {
        MatchingMode::Exact => {
            if n > MAX_EXACT_POINTS {
                return Err(Error::TooLarge {
                    n,
                    max: MAX_EXACT_POINTS,
                });
            }
            exact_pairs(&w, n)
        }
        MatchingMode::Greedy => greedy_pairs(&w, n),
    };
    let total_weight = pairs.iter().map(|&(i, j)| w[i][j]).sum();
    Ok(MatchingResult {
        pairs,
        total_weight,
        exact: mode == MatchingMode::Exact,
    })
}

fn weights(c: &Configuration) -> Vec<Vec<f64>> {
    let pts = c.points();
    pts.iter()
        .map(|p| pts.iter().map(|q| dist(p.coords(), q.coords())).collect())
        .collect()
}

fn exact_pairs(w: &[Vec<f64>], n: usize) -> Vec<(usize, usize)> {
    let full = (1usize << n) - 1;
    // best[mask] = heaviest perfect matching of the points whose bits are set.
    // Only even-popcount masks are ever read.
    let mut best = vec![0.0f64; 1 << n];
    for mask in 1..=full {
        if mask.count_ones() % 2 == 1 {
            continue;
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut value = f64::NEG_INFINITY;
        let mut bits = rest;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            value = value.max(w[i][j] + best[rest & !(1 << j)]);
        }
        best[mask] = value;
    }

    // Walk down from the full set, taking the smallest partner that is
    // optimal up to rounding; this yields the lexicographically smallest
    // optimal pair list.
    let mut pairs = Vec::with_capacity(n / 2);
    let mut mask = full;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let target = best[mask];
        let slack = TIE_TOLERANCE * target.abs().max(f64::MIN_POSITIVE);
        let mut bits = rest;
        let mut chosen = None;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if w[i][j] + best[rest & !(1 << j)] >= target - slack {
                chosen = Some(j);
                break;
            }
        }
        let j = chosen.expect("some partner attains the optimum");
        pairs.push((i, j));
        mask = rest & !(1 << j);
    }
    pairs
}

fn greedy_pairs(w: &[Vec<f64>], n: usize) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    edges.sort_by(|a, b| w[b.0][b.1].total_cmp(&w[a.0][a.1]).then(a.cmp(b)));
    let mut used = vec![false; n];
    let mut pairs = Vec::with_capacity(n / 2);
    for (i, j) in edges {
        if !used[i] && !used[j] {
            used[i] = true;
            used[j] = true;
            pairs.push((i, j));
        }
    }
    pairs.sort_unstable();
    pairs
}

/// `min S / max M` with an exact maximum matching.
pub fn eta_ratio(c: &Configuration) -> Result<f64> {
    let m = max_matching(c)?;
    Ok(min_star(c).min_length / m.total_weight)
}
