//! Builds the staircase recovery sequence on a periodic slab and on the
//! unit cube, and compares its energy with the closed form.

use std::sync::Arc;

use clocklat::constructions::{staircase_energy, staircase_recovery, StaircaseSpec};
use clocklat::{Direction, LatticeDomain, PhaseIndex};

fn main() -> clocklat::Result<()> {
    let nu = Direction::axis(2, 1)?;
    let (n, m, eps) = (8, 8, 0.125);
    // periodic across, 16 rows along ν
    let slab = Arc::new(LatticeDomain::grid(
        eps,
        &[0, -8],
        &[m, 16],
        &[true, false],
    )?);
    let spec = StaircaseSpec::new(slab, n, PhaseIndex(3), PhaseIndex(0), nu.clone())?;
    let e = staircase_energy(&spec)?;
    let clock = spec.clock();
    let expected = clock.prefactor() * spec.steps() as f64 * clock.theta() * m as f64 * eps;
    println!(
        "slab: energy {:.15}, closed form {:.15}",
        e.total.scaled, expected
    );

    let cube = Arc::new(LatticeDomain::unit_cube(1.0 / 16.0, &nu)?);
    let spec = StaircaseSpec::new(cube, 6, PhaseIndex(5), PhaseIndex(1), nu)?;
    let field = staircase_recovery(&spec)?;
    let e = staircase_energy(&spec)?;
    println!(
        "cube: {} sites, {} rotation steps (orientation {}), interior {:.6}, boundary {:.6}",
        field.domain().num_sites(),
        spec.steps(),
        spec.orientation(),
        e.interior,
        e.boundary
    );
    Ok(())
}
