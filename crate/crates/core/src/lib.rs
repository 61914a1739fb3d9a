//! First-order invariant-domain-preserving IMEX solver for the
//! one-dimensional nonequilibrium gray radiation-hydrodynamics equations.
//!
//! The hyperbolic part is advanced explicitly with two graph-viscosity
//! stages blended additively; the stiff energy exchange and radiation
//! diffusion are advanced with a linearized backward-Euler step.

mod bracket;
pub mod conservation;
pub mod driver;
pub mod error;
pub mod grid;
pub mod hyperbolic;
pub mod linalg;
pub mod parabolic;
pub mod riemann_euler;
pub mod riemann_rad;
pub mod scenarios;
pub mod thermo;

pub use conservation::Conserved;
pub use driver::{ReferenceSource, RunConfig, RunOutput, RunOverrides, StepDiagnostics};
pub use error::{Error, Result};
pub use grid::{build_ops, DiscreteOps, Mesh1D, StiffnessMatrix};
pub use scenarios::{ReferenceProfile, Scenario, ScenarioId, ShockCase};
pub use thermo::{FullState, OpacityLaw, OracleParams, ReducedState};
