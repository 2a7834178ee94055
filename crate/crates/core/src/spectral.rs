//! Momentum-space view of the circuit.
//!
//! On the homogeneous ring a plane wave `e^{iκn}` with `κ = 2a·k` is an
//! eigenvector of the shifts, so one two-step reduces to the 2×2 Bloch matrix
//!
//! ```text
//! M(k) = [[A₂₁B₂₁ e^{−iκ}, A₂₂B₁₂],
//!         [A₁₁B₂₁,         A₁₂B₁₂ e^{iκ}]]
//! ```
//!
//! (the `B₁₁`, `B₂₂` terms vanish). The gate Hamiltonian is the symmetric
//! time derivative over `4τ`, `H(k) = i(M − M†)/(4τ)`. In the solved gauge
//! `H(k) = (1/2τ)[[−ζ sin κ, μ], [μ, ζ sin κ]]`, whose norm peaks at
//! `κ = π/2` with value `1/(2τ)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::GatePair;
use crate::linalg::{eigenvalues2, op_norm2, Mat2, I};
use crate::params::SimulationParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub k: f64,
    /// Bloch phase per cell, `2a·k`.
    pub kappa: f64,
    pub bloch: Mat2,
    pub hamiltonian: Mat2,
    /// Effective energy `Ẽ(k)` from the folded eigenphases of `M(k)`.
    pub energy: f64,
    /// Positive eigenvalue of `H(k)`.
    pub h_energy: f64,
    /// Centered finite difference of `energy` along the grid.
    pub group_velocity: f64,
    /// Operator norm of `H(k)`.
    pub hnorm: f64,
}

/// Two-step Bloch matrix at wavenumber `k` (cell spacing `2a`).
pub fn bloch_matrix(gp: &GatePair, k: f64, a: f64) -> Mat2 {
    let kappa = 2.0 * a * k;
    let fwd = Complex64::from_polar(1.0, kappa);
    let bwd = fwd.conj();
    Mat2::new(
        gp.a(2, 1) * gp.b(2, 1) * bwd + gp.a(2, 2) * gp.b(1, 1),
        gp.a(2, 1) * gp.b(2, 2) * bwd + gp.a(2, 2) * gp.b(1, 2),
        gp.a(1, 1) * gp.b(2, 1) + gp.a(1, 2) * gp.b(1, 1) * fwd,
        gp.a(1, 1) * gp.b(2, 2) + gp.a(1, 2) * gp.b(1, 2) * fwd,
    )
}

/// `H(k) = i(M(k) − M(k)†)/(4τ)`.
pub fn extract_hamiltonian(gp: &GatePair, k: f64, a: f64, tau: f64) -> Mat2 {
    let m = bloch_matrix(gp, k, a);
    (m - m.adjoint()) * (I / (4.0 * tau))
}

/// Effective energy from the eigenphases of a two-step matrix.
///
/// The two-step carries a stroboscopic sign, so eigenphases `±α` sit near `π`
/// for small mass. Folding `α ↦ π − α` gives `Ẽ ∈ [0, π/(2τ)]` with
/// `cos(2τẼ) = ζ cos κ` in the solved gauge.
pub fn folded_energy(bloch: &Mat2, tau: f64) -> f64 {
    let [l1, l2] = eigenvalues2(bloch);
    // both phases have the same magnitude for det = 1; average away rounding
    let alpha = 0.5 * (l1.arg().abs() + l2.arg().abs());
    (PI - alpha) / (2.0 * tau)
}

/// Spectral record for every wavenumber of an ascending grid.
///
/// Group velocities are centered differences; the grid is treated as periodic
/// when it spans the whole zone `(−π/(2a), π/(2a)]` and one-sided differences
/// are used at the ends otherwise.
pub fn dispersion(
    gp: &GatePair,
    params: &SimulationParams,
    k_grid: &[f64],
) -> Result<Vec<SpectralPoint>> {
    if k_grid.is_empty() {
        return Err(Error::domain("dispersion needs a nonempty k grid"));
    }
    let a = params.units().a();
    let tau = params.units().tau();
    let mut points: Vec<SpectralPoint> = k_grid
        .iter()
        .map(|&k| {
            let bloch = bloch_matrix(gp, k, a);
            let hamiltonian = extract_hamiltonian(gp, k, a, tau);
            let hnorm = op_norm2(&hamiltonian);
            let [e1, e2] = eigenvalues2(&hamiltonian);
            SpectralPoint {
                k,
                kappa: 2.0 * a * k,
                bloch,
                hamiltonian,
                energy: folded_energy(&bloch, tau),
                h_energy: e1.re.max(e2.re),
                group_velocity: 0.0,
                hnorm,
            }
        })
        .collect();

    let n = points.len();
    if n == 1 {
        return Ok(points);
    }
    let zone = PI / a;
    let spacing = (k_grid[n - 1] - k_grid[0]) / (n - 1) as f64;
    let periodic = ((k_grid[n - 1] - k_grid[0] + spacing) - zone).abs() < 1e-9 * zone;
    let energies: Vec<f64> = points.iter().map(|p| p.energy).collect();
    for i in 0..n {
        let (lo, hi, dk) = if i > 0 && i + 1 < n {
            (i - 1, i + 1, k_grid[i + 1] - k_grid[i - 1])
        } else if periodic {
            let lo = (i + n - 1) % n;
            let hi = (i + 1) % n;
            (lo, hi, 2.0 * spacing)
        } else if i == 0 {
            (0, 1, k_grid[1] - k_grid[0])
        } else {
            (n - 2, n - 1, k_grid[n - 1] - k_grid[n - 2])
        };
        points[i].group_velocity = (energies[hi] - energies[lo]) / dk;
    }
    Ok(points)
}

/// `ζ = √(1 − μ²)` for each mass ratio.
pub fn zeta_curve(mu_samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    mu_samples
        .iter()
        .map(|&mu| {
            if !(0.0..=1.0).contains(&mu) {
                return Err(Error::domain(format!("mass ratio {mu} outside [0, 1]")));
            }
            Ok((mu, ((1.0 - mu) * (1.0 + mu)).sqrt()))
        })
        .collect()
}

/// `count` evenly spaced mass ratios from 0 to 1 inclusive.
pub fn mu_samples(count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::domain(format!(
            "need at least 2 samples, got {count}"
        )));
    }
    let last = (count - 1) as f64;
    Ok((0..count).map(|i| i as f64 / last).collect())
}

/// Default slack on [`simulability_bound_check`].
pub const BOUND_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub pass: bool,
    pub bound: f64,
    /// `1/(nτ) − ‖H‖`; negative when violated.
    pub margin: f64,
}

/// Tests `‖H⁽²ⁿ⁾‖ ≤ 1/(nτ)` allowing `tolerance` of rounding slack.
pub fn simulability_bound_check(
    h_gate_norm: f64,
    n: u32,
    tau: f64,
    tolerance: f64,
) -> Result<BoundCheck> {
    if n == 0 {
        return Err(Error::domain("bound order n must be at least 1"));
    }
    let bound = 1.0 / (n as f64 * tau);
    let margin = bound - h_gate_norm;
    Ok(BoundCheck {
        pass: margin >= -tolerance,
        bound,
        margin,
    })
}

/// Largest `‖H(k)‖` over the grid, with the wavenumber attaining it.
pub fn max_hnorm(points: &[SpectralPoint]) -> Option<(f64, f64)> {
    points
        .iter()
        .map(|p| (p.k, p.hnorm))
        .max_by(|x, y| x.1.total_cmp(&y.1))
}
