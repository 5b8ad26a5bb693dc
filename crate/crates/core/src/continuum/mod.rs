//! Limit functionals `E_N` and `E` on grid partitions and smooth fields.

mod partition;
mod smooth;

pub use partition::{
    jump_energy_direct, jump_energy_sliced, limit_energy_en, partition_from_json,
    partition_to_json, CellValues, GridPartitionField, PartitionRecord, ValueMode,
};
pub use smooth::{
    gradient_energy, limit_energy_e, GradientEnergy, LimitEnergy, LimitInput, SingularPiece,
    SmoothFieldSpec, SmoothPart,
};
