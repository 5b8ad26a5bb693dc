use serde::Serialize;

use crate::circle::{Clock, PhaseIndex};
use crate::error::{Error, Result};

/// Minimal path energy on a one-dimensional chain and one optimal path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSolution {
    pub energy: f64,
    /// `M + 1` states from `k_start` to `k_end`.
    pub path: Vec<PhaseIndex>,
}

/// Minimizes `Σ_{m=1..M} 4 sin²(Δ_m θ_N / 2)` over index paths of `M` steps
/// from `k_start` to `k_end` by dynamic programming over the `N` states.
pub fn chain_dp(n: u32, k_start: PhaseIndex, k_end: PhaseIndex, m: usize) -> Result<ChainSolution> {
    let clock = Clock::new(n)?;
    PhaseIndex::new(k_start.0, n)?;
    PhaseIndex::new(k_end.0, n)?;
    if m == 0 {
        return Err(Error::param("M", "the chain needs at least one step"));
    }
    let states = n as usize;
    let cost = |a: usize, b: usize| {
        clock.bond_cost(clock.index_distance(PhaseIndex(a as u32), PhaseIndex(b as u32)))
    };

    let mut best = vec![f64::INFINITY; states];
    best[k_start.0 as usize] = 0.0;
    let mut back = vec![vec![0u32; states]; m];
    for step in back.iter_mut() {
        let mut next = vec![f64::INFINITY; states];
        for (b, slot) in next.iter_mut().enumerate() {
            for (a, &prev) in best.iter().enumerate() {
                let e = prev + cost(a, b);
                // strict comparison keeps the lowest predecessor on ties
                if e < *slot {
                    *slot = e;
                    step[b] = a as u32;
                }
            }
        }
        best = next;
    }
    let mut path = vec![k_end; m + 1];
    let mut cur = k_end.0;
    for t in (0..m).rev() {
        cur = back[t][cur as usize];
        path[t] = PhaseIndex(cur);
    }
    Ok(ChainSolution {
        energy: best[k_end.0 as usize],
        path,
    })
}
