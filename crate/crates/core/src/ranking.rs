//! Automatic state prioritization: ranks automaton states by the average
//! length of simple paths to acceptance, and derives category priorities
//! and shaping potentials from the ranks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dfa::Dfa;

/// Hard cap on enumerated simple paths per state.
pub const MAX_PATHS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankError {
    #[error("state q{} cannot reach an accepting state", .0 + 1)]
    NoPathToAccepting(usize),
    #[error("category count {n} must lie in [3, {states}]")]
    InvalidN { n: usize, states: usize },
    #[error("more than {MAX_PATHS} simple paths from q{}", .0 + 1)]
    EnumerationOverflow(usize),
    #[error("priority constant must be positive and finite, got {0}")]
    InvalidC(String),
}

/// Lengths (edge counts) of every simple path from `q` to the accepting
/// set. Paths end at the first accepting state they enter.
pub fn simple_path_lengths(d: &Dfa, q: usize) -> Result<Vec<usize>, RankError> {
    if d.is_error(q) || d.is_accepting(q) {
        return Err(RankError::NoPathToAccepting(q));
    }
    let succ: Vec<Vec<usize>> = (0..d.num_states())
        .map(|p| d.successors(p).into_iter().filter(|&t| !d.is_error(t)).collect())
        .collect();
    let mut lengths = Vec::new();
    let mut on_path = vec![false; d.num_states()];
    // iterative DFS: (state, next successor index)
    let mut stack: Vec<(usize, usize)> = vec![(q, 0)];
    on_path[q] = true;
    while let Some(top) = stack.last_mut() {
        let (p, i) = *top;
        if i == succ[p].len() {
            on_path[p] = false;
            stack.pop();
            continue;
        }
        top.1 += 1;
        let t = succ[p][i];
        if on_path[t] {
            continue;
        }
        if d.is_accepting(t) {
            lengths.push(stack.len());
            if lengths.len() > MAX_PATHS {
                return Err(RankError::EnumerationOverflow(q));
            }
            continue;
        }
        on_path[t] = true;
        stack.push((t, 0));
    }
    if lengths.is_empty() {
        return Err(RankError::NoPathToAccepting(q));
    }
    Ok(lengths)
}

/// Mean simple-path length from `q` to acceptance.
pub fn expected_length(d: &Dfa, q: usize) -> Result<f64, RankError> {
    let l = simple_path_lengths(d, q)?;
    Ok(l.iter().sum::<usize>() as f64 / l.len() as f64)
}

/// Default category count: `min(4, |Q|)`, or `None` when the automaton is
/// too small to classify (fewer than three states).
pub fn default_categories(num_states: usize) -> Option<usize> {
    (num_states >= 3).then(|| num_states.min(4))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "C")]
    pub c: f64,
    /// Per state, indexed by state.
    pub rank: Vec<usize>,
    /// Per category `i`, `C / (N - i)`.
    pub priority: Vec<f64>,
    /// Per state shaping potential.
    pub potential: Vec<f64>,
    /// Per state mean path length; `None` for accepting and error states.
    #[serde(rename = "pathLength")]
    pub path_length: Vec<Option<f64>>,
}

impl RankTable {
    pub fn rank_of(&self, q: usize) -> usize {
        self.rank[q]
    }

    pub fn potential_of(&self, q: usize) -> f64 {
        self.potential[q]
    }

    /// Shaping term `γ·ρ(q') − ρ(q)`.
    pub fn shaping(&self, q: usize, q_next: usize, gamma: f64) -> f64 {
        gamma * self.potential[q_next] - self.potential[q]
    }
}

/// Ranks every state into `n` categories.
///
/// Accepting states get `n-1`, error states `n-2`, and the rest are spread
/// over `0..=n-3` by their mean path length, shortest highest.
pub fn rank_states(d: &Dfa, n: usize, c: f64) -> Result<RankTable, RankError> {
    let states = d.num_states();
    if n < 3 || n > states {
        return Err(RankError::InvalidN { n, states });
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(RankError::InvalidC(c.to_string()));
    }
    let mut path_length = vec![None; states];
    for q in 0..states {
        if !d.is_accepting(q) && !d.is_error(q) {
            path_length[q] = Some(expected_length(d, q)?);
        }
    }
    let known = path_length.iter().flatten().copied();
    let l_min = known.clone().fold(f64::INFINITY, f64::min);
    let l_max = known.fold(f64::NEG_INFINITY, f64::max);
    let top = (n - 3) as f64;
    let rank: Vec<usize> = (0..states)
        .map(|q| {
            if d.is_accepting(q) {
                n - 1
            } else if d.is_error(q) {
                n - 2
            } else {
                let l = path_length[q].expect("intermediate state has a length");
                if l_max > l_min {
                    let r = (top - (l - l_min) * top / (l_max - l_min) + 0.5).floor();
                    r.clamp(0.0, top) as usize
                } else {
                    n - 3
                }
            }
        })
        .collect();
    let priority: Vec<f64> = (0..n).map(|i| c / (n - i) as f64).collect();
    let potential = (0..states)
        .map(|q| {
            if d.is_error(q) {
                c / n as f64
            } else {
                priority[rank[q]]
            }
        })
        .collect();
    Ok(RankTable {
        n,
        c,
        rank,
        priority,
        potential,
        path_length,
    })
}
