//! Simulation of a homogeneous 1+1-dimensional quantum circuit whose
//! single-particle sector obeys a discrete Dirac equation.
//!
//! Each cell of the periodic ring carries two wires, the right mover `φ⁺`
//! and the left mover `φ⁻`. One time step applies a row of intra-cell `B`
//! gates followed by a row of inter-cell `A` gates coupling `φ⁺ₙ` with
//! `φ⁻ₙ₋₁`. The mass enters through the dimensionless ratio `μ = 2a/λ`,
//! and unitarity forces the effective propagation speed down to `ζc` with
//! `ζ = √(1 − μ²)`.
//!
//! Modules:
//!
//! * [`params`]: units, simulation parameters, field state, momentum grid.
//! * [`gates`]: the solved `A`/`B` gate pair and its algebraic identities.
//! * [`evolve`]: the two-step kernel, wavepackets and trajectory observables.
//! * [`pathsum`]: exhaustive path-sum oracle for forward and backward evolution.
//! * [`spectral`]: Bloch matrix, gate Hamiltonian, dispersion and norm bound.
//! * [`manybody`]: dense Jordan-Wigner oracle on a handful of qubits.

pub mod error;
pub mod evolve;
pub mod gates;
pub mod linalg;
pub mod manybody;
pub mod params;
pub mod pathsum;
pub mod spectral;

pub use error::{Error, Result};
pub use evolve::{StepOperator, TrajectorySample};
pub use gates::{GatePair, IdentityReport};
pub use params::{FieldState, PhysicalUnits, SimulationParams};
pub use pathsum::PathRecord;
pub use spectral::SpectralPoint;

pub use num_complex::Complex64;
