//! Discontinuous Galerkin spectral elements on uniform Cartesian meshes with
//! entropy-conservative flux differencing, subcell finite-volume blending
//! and positivity limiting.

pub mod field;
pub mod indicator;
pub mod lgl;
pub mod limiter;
pub mod mesh;
pub mod rhs;
pub mod solver;
pub mod time;

pub use field::{node_coordinates, node_index, node_weight, DgField};
pub use indicator::{blending_coefficient, BlendingParams};
pub use lgl::{lgl_operator, LglOperator};
pub use limiter::{positivity_limit, PRESSURE_FLOOR};
pub use mesh::CartesianMesh;
pub use rhs::{
    cfl_dt, total_entropy_and_rate, Boundary, EcVolumeFlux, NodeData, RhsOutput, Semidiscretization,
    TwoPointFlux,
};
pub use solver::{run_simulation, EntropyRecord, Simulation, SimulationOutput, SolverConfig, Snapshot};
pub use time::{ssprk43_stability, ssprk43_step, LinearCombination};
