//! Samples a partition at lattice sites, freezes a boundary layer, anneals
//! the interior and round-trips the result through JSON.

use std::sync::Arc;

use clocklat::constructions::{pointwise_sample, SampleSource};
use clocklat::continuum::GridPartitionField;
use clocklat::lattice::io::{field_from_json, field_to_json};
use clocklat::lattice::{discrete_energy, Shape};
use clocklat::solvers::{anneal_glauber, AnnealSchedule};
use clocklat::{CircleValue, LatticeDomain};

fn main() -> clocklat::Result<()> {
    let datum = GridPartitionField::from_fn(0.125, &[8, 8], |x| {
        CircleValue::new(if x[0] + 0.5 * x[1] > 0.7 { 3.0 } else { 0.5 })
    })?;
    let dom = Arc::new(LatticeDomain::new(
        1.0 / 32.0,
        Shape::Box {
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.0],
        },
        vec![false, false],
    )?);
    let mut field = pointwise_sample(SampleSource::Partition(&datum), 6, dom.clone())?;
    field.set_frozen(dom.boundary_layer(2.0 * dom.eps()))?;
    let before = discrete_energy(&field, None).scaled;
    let r = anneal_glauber(
        &field,
        &AnnealSchedule {
            chains: 8,
            ..Default::default()
        },
    )?;
    println!(
        "sampled {before:.6}, annealed {:.6} (chain {})",
        r.energy, r.chain
    );

    let text = field_to_json(&r.field)?;
    let back = field_from_json(&text)?;
    println!(
        "round trip: {} bytes, energy {:.6}",
        text.len(),
        discrete_energy(&back, None).scaled
    );
    Ok(())
}
