//! Shared fixtures for the solver benchmarks.

use radhydro_core::scenarios::build_scenario;
use radhydro_core::{Scenario, ScenarioId, ShockCase};

/// Mesh sizes exercised by the per-step benchmarks.
pub const SIZES: [usize; 3] = [257, 1025, 4097];

/// Mach 3 radiative shock on `n` points, a field with a nontrivial
/// hydrodynamic and radiative structure.
pub fn shock_fixture(n: usize) -> Scenario {
    build_scenario(ScenarioId::Shock(ShockCase::Mach3), n, None).expect("shock scenario builds")
}

/// Marshak wave on `n` points, a stiff pure-diffusion problem.
pub fn marshak_fixture(n: usize) -> Scenario {
    build_scenario(ScenarioId::Marshak, n, None).expect("marshak scenario builds")
}
