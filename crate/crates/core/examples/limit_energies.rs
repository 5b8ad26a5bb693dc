//! Jump energy of grid partitions (direct and by slicing), its clock
//! version, and the total-variation energy of a vortex.

use clocklat::constructions::discretize_field;
use clocklat::continuum::{
    jump_energy_direct, jump_energy_sliced, limit_energy_e, limit_energy_en, GridPartitionField,
    LimitInput, SmoothFieldSpec, SmoothPart,
};
use clocklat::CircleValue;

fn main() -> clocklat::Result<()> {
    let disc = GridPartitionField::from_fn(1.0 / 32.0, &[32, 32], |x| {
        let r2 = (x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2);
        CircleValue::new(if r2 < 0.09 { 2.0 } else { 0.3 })
    })?;
    println!(
        "disc: direct {:.12}, sliced {:.12}",
        jump_energy_direct(&disc),
        jump_energy_sliced(&disc)
    );
    for n in [3, 8, 64] {
        let projected = discretize_field(&disc, n)?;
        println!(
            "N = {n}: projected jump {:.6}, E_N {:.6}",
            jump_energy_direct(&projected),
            limit_energy_en(&projected, n)?
        );
    }

    let vortex = SmoothFieldSpec::vortex([0.5, 0.5], 0.02)?;
    for m in [64, 256] {
        let e = limit_energy_e(&LimitInput::Smooth(SmoothPart {
            spec: &vortex,
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.0],
            quadrature: m,
        }))?;
        let g = e.gradient.expect("smooth part");
        println!(
            "vortex M = {m}: {:.6} ({} of {} nodes skipped)",
            e.total, g.skipped_nodes, g.nodes
        );
    }
    Ok(())
}
