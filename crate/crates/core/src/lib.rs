//! Solvers for the ultra-relativistic Euler equations.

pub mod dgsem;
pub mod error;
pub mod fluxes;
pub mod radial;
pub mod real;
pub mod selfsim;
pub mod state;

pub use error::{Error, Result};
pub use real::Real;

pub type Prim2 = state::PrimState<f64, 2>;
pub type Prim3 = state::PrimState<f64, 3>;
pub type Cons2 = state::ConsState<f64, 2>;
pub type Cons3 = state::ConsState<f64, 3>;
pub type Mesh2 = dgsem::CartesianMesh<f64, 2>;
pub type Mesh3 = dgsem::CartesianMesh<f64, 3>;
pub type Field2 = dgsem::DgField<f64, 2>;
pub type Field3 = dgsem::DgField<f64, 3>;
pub type Simulation2 = dgsem::Simulation<f64, 2>;
pub type Simulation3 = dgsem::Simulation<f64, 3>;
pub type SolverConfig64 = dgsem::SolverConfig<f64>;
pub type RadialGrid64 = radial::RadialGrid<f64>;
pub type RadialRun64 = radial::RadialRun<f64>;
pub type SelfSimilar64 = selfsim::SelfSimilarSolution<f64>;
