//! N-clock spin energies on cubic lattices and their continuum limits.

pub mod circle;
pub mod cli;
pub mod constructions;
pub mod continuum;
pub mod error;
pub mod experiments;
pub mod lattice;
pub mod rng;
pub mod solvers;
pub mod sum;

pub use circle::{CircleValue, Clock, Direction, PhaseIndex};
pub use error::{Error, Result};
pub use lattice::{LatticeDomain, SiteSet, SpinField};
