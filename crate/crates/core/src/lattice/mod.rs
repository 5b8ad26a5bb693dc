//! Lattice domains `Ω ∩ εℤ^d`, spin fields and the discrete energy `E_ε^N`.

mod domain;
mod field;
pub mod io;

pub use domain::{
    boundary_layer, enumerate_bonds, LatticeDomain, Region, Shape, SiteSet, MEMBERSHIP_INSET,
};
pub(crate) use field::raw_from_histogram;
pub use field::{
    apply_jump_datum, discrete_energy, energy_scale, jump_datum_value, EnergyReport,
    RegionDescriptor, SpinField,
};
