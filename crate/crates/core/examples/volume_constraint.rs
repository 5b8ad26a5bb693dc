//! Minimal energy at fixed phase fractions: exhaustive on 4×4, Kawasaki
//! annealing on 16×16.

use std::f64::consts::PI;
use std::sync::Arc;

use clocklat::solvers::{
    anneal_kawasaki, enumerate_min_with_counts, random_with_counts, AnnealSchedule,
};
use clocklat::{LatticeDomain, PhaseIndex, SpinField};

fn main() -> clocklat::Result<()> {
    let small = Arc::new(LatticeDomain::grid(0.25, &[0, 0], &[4, 4], &[])?);
    let start = random_with_counts(&SpinField::constant(small, 2, PhaseIndex(0))?, &[8, 8], 1)?;
    let exact = enumerate_min_with_counts(&start, &[8, 8])?;
    println!(
        "4x4: minimum {:.12} over {} feasible configurations (4/π = {:.12})",
        exact.energy,
        exact.feasible,
        4.0 / PI
    );

    let big = Arc::new(LatticeDomain::grid(1.0 / 16.0, &[0, 0], &[16, 16], &[])?);
    let start = random_with_counts(&SpinField::constant(big, 2, PhaseIndex(0))?, &[128, 128], 7)?;
    let schedule = AnnealSchedule {
        sweeps: 4000,
        chains: 32,
        seed: 7,
        ..Default::default()
    };
    let r = anneal_kawasaki(&start, &[128, 128], &schedule)?;
    println!(
        "16x16: best of {} chains {:.12}, ratio to 4/π {:.4}",
        schedule.chains,
        r.energy,
        r.energy / (4.0 / PI)
    );
    Ok(())
}
