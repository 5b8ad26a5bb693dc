//! Minimization engines for constrained clock-model energies.

mod anneal;
mod cell;
mod chain;
mod enumerate;
mod state;

pub(crate) use anneal::check_counts;
pub use anneal::{
    anneal_glauber, anneal_kawasaki, counts_from_fractions, random_with_counts, randomize_free,
    AnnealSchedule, Annealed,
};
pub use cell::{
    bond_lower_bound_energy, cell_formula_estimate, layered_minimum, CellEstimate, CellMethod,
    CellProblemSpec,
};
pub use chain::{chain_dp, ChainSolution};
pub use enumerate::{enumerate_min, enumerate_min_with_counts, Enumerated, MAX_SEARCH_BITS};
