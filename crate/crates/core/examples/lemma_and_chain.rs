//! Checks `sin²(kθ/2) ≥ k sin²(θ/2)` on a grid and compares the 1D chain
//! minimum with `k·4 sin²(π/N)`.

use clocklat::circle::Clock;
use clocklat::experiments::run_lemma_sweep;
use clocklat::solvers::chain_dp;
use clocklat::PhaseIndex;

fn main() -> clocklat::Result<()> {
    let report = run_lemma_sweep(64, 10_000)?;
    println!(
        "min gap {:e} at k = {}, θ = {}",
        report.min_gap, report.min_k, report.min_theta
    );
    for (k, theta, gap) in &report.equality_nodes {
        println!("equality at k = {k}, θ = {theta} (gap {gap:e})");
    }

    let n = 12;
    let clock = Clock::new(n)?;
    for k in 0..=n / 2 {
        let sol = chain_dp(n, PhaseIndex(0), PhaseIndex(k), (k as usize).max(1) + 2)?;
        println!(
            "N = {n}, k = {k}: chain minimum {:.12}, k·4sin²(π/N) = {:.12}",
            sol.energy,
            k as f64 * clock.bond_cost(1)
        );
    }
    Ok(())
}
