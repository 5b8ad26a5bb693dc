//! Convergence tables with fitted rates: the prefactor as N grows and
//! rasterized oblique interfaces as λ shrinks.

use std::f64::consts::PI;

use clocklat::experiments::{run_oblique_raster, run_prefactor_limit};
use clocklat::{CircleValue, Direction};

fn main() -> clocklat::Result<()> {
    let ladder: Vec<u32> = (3..=13).map(|p| 1 << p).collect();
    let pre = run_prefactor_limit(&ladder)?;
    print!("{}", pre.table.to_csv(&[], false));
    println!(
        "monotone {}, exponent {:?}\n",
        pre.monotone, pre.table.rate.exponent
    );

    let nu = Direction::rational(&[1, 1])?;
    let lambdas: Vec<f64> = (3..=7).map(|p| 0.5f64.powi(p)).collect();
    let t = run_oblique_raster(&nu, CircleValue::new(PI), CircleValue::e1(), &lambdas)?;
    print!("{}", t.to_csv(&[], false));
    println!("exponent {:?}", t.rate.exponent);
    Ok(())
}
