//! Shared fixtures for the benchmarks.

use dirac_qca::evolve::gaussian_packet;
use dirac_qca::linalg::c;
use dirac_qca::params::params_from_mass_ratio;
use dirac_qca::{FieldState, PhysicalUnits, SimulationParams, StepOperator};

pub fn params(mu: f64, cells: usize) -> SimulationParams {
    params_from_mass_ratio(mu, cells, PhysicalUnits::natural()).expect("valid benchmark parameters")
}

/// A moving packet on a ring of `cells` cells with its step operator.
pub fn packet(mu: f64, cells: usize) -> (StepOperator, FieldState) {
    let p = params(mu, cells);
    let n = cells as f64;
    let state = gaussian_packet(&p, n / 2.0, n / 32.0, 0.3, [c(1.0, 0.0), c(0.0, 0.5)])
        .expect("valid benchmark packet");
    (StepOperator::from_params(&p), state)
}
