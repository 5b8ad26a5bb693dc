//! Cell-problem ladder: bond lower bound, minimum and staircase upper bound
//! against the anisotropic interface density.

use clocklat::experiments::run_gamma_sandwich;
use clocklat::solvers::{AnnealSchedule, CellMethod};
use clocklat::{Direction, PhaseIndex};

fn main() -> clocklat::Result<()> {
    let nu = Direction::axis(2, 1)?;
    let anneal = CellMethod::Anneal(AnnealSchedule {
        sweeps: 256,
        chains: 32,
        ..Default::default()
    });
    let table = run_gamma_sandwich(
        PhaseIndex(1),
        PhaseIndex(0),
        &nu,
        2,
        &[0.125, 0.0625, 0.03125],
        &[CellMethod::Enumerate, anneal.clone(), anneal],
    )?;
    print!("{}", table.to_csv(&[], true));
    println!("fitted exponent {:?}", table.rate.exponent);
    Ok(())
}
