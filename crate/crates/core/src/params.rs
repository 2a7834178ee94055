//! Units, mass parametrization and the field amplitude container.
//!
//! The canonical mass input is the dimensionless ratio `μ = 2a/λ = m/M`,
//! where `λ` is the Compton wavelength and `M = ħ/(2ac)` the mass at which
//! propagation stops. Everything else (ζ, θ, ω, m) is derived from it.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Lattice constants: gate spacing `a`, gate step `tau` and the action unit `hbar`.
///
/// The circuit speed `c = a/τ` is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalUnits {
    a: f64,
    tau: f64,
    hbar: f64,
}

impl PhysicalUnits {
    pub fn new(a: f64, tau: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("tau", tau), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { a, tau, hbar })
    }

    /// a = τ = ħ = 1.
    pub const fn natural() -> Self {
        Self {
            a: 1.0,
            tau: 1.0,
            hbar: 1.0,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Maximal information speed, one gate per step.
    pub fn c(&self) -> f64 {
        self.a / self.tau
    }

    /// Mass scale `M = ħ/(2ac)` at which `ζ` vanishes.
    pub fn planck_mass(&self) -> f64 {
        self.hbar / (2.0 * self.a * self.c())
    }
}

impl Default for PhysicalUnits {
    fn default() -> Self {
        Self::natural()
    }
}

/// Converts the informational mass `ω` (inverse time) into a mass: `m = (τ²/a²)ħω = ħω/c²`.
pub fn mass_conversion(omega: f64, units: &PhysicalUnits) -> f64 {
    let ratio = units.tau() / units.a();
    ratio * ratio * units.hbar() * omega
}

/// Immutable simulation parameters for a periodic ring of `n_cells` two-wire cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationParams {
    units: PhysicalUnits,
    n_cells: usize,
    mu: f64,
    zeta: f64,
}

impl SimulationParams {
    pub fn units(&self) -> &PhysicalUnits {
        &self.units
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Dimensionless mass ratio `μ = 2a/λ = m/M`, in `[0, 1]`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Inverse vacuum refraction index `ζ = √(1 − μ²)`.
    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Gate mixing angle with `sin θ = ζ` and `cos θ = μ`.
    pub fn theta(&self) -> f64 {
        self.zeta.atan2(self.mu)
    }

    pub fn is_massless(&self) -> bool {
        self.mu == 0.0
    }

    /// Compton wavelength `λ = 2a/μ`; `None` stands for the infinite wavelength at `μ = 0`.
    pub fn lambda(&self) -> Option<f64> {
        if self.is_massless() {
            None
        } else {
            Some(2.0 * self.units.a() / self.mu)
        }
    }

    /// Zitterbewegung angular frequency `ω = c/λ = μc/(2a)`.
    pub fn omega(&self) -> f64 {
        self.mu * self.units.c() / (2.0 * self.units.a())
    }

    pub fn planck_mass(&self) -> f64 {
        self.units.planck_mass()
    }

    pub fn mass(&self) -> f64 {
        self.mu * self.planck_mass()
    }

    /// Same parameters on a ring of a different length.
    pub fn with_cells(&self, n_cells: usize) -> Result<Self> {
        params_from_mass_ratio(self.mu, n_cells, self.units)
    }
}

/// Builds parameters from the mass ratio `μ ∈ [0, 1]`.
pub fn params_from_mass_ratio(
    mu: f64,
    n_cells: usize,
    units: PhysicalUnits,
) -> Result<SimulationParams> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::domain(format!(
            "mass ratio mu must lie in [0, 1], got {mu}"
        )));
    }
    if n_cells < 2 {
        return Err(Error::domain(format!(
            "n_cells must be at least 2, got {n_cells}"
        )));
    }
    // (1 - μ)(1 + μ) keeps full relative precision near μ = 1.
    let zeta = ((1.0 - mu) * (1.0 + mu)).sqrt();
    Ok(SimulationParams {
        units,
        n_cells,
        mu,
        zeta,
    })
}

/// Wavenumbers `k_j = 2πj/(N·2a)` for `j ∈ (−N/2, N/2]`, covering `(−π/(2a), π/(2a)]`.
///
/// Cells are spaced `2a` apart, so the Bloch phase per cell is `κ = 2a·k`.
pub fn momentum_grid(params: &SimulationParams) -> Vec<f64> {
    let n = params.n_cells() as i64;
    let spacing = 2.0 * params.units().a();
    let lo = n / 2 + 1 - n;
    (lo..=n / 2)
        .map(|j| 2.0 * PI * j as f64 / (n as f64 * spacing))
        .collect()
}

/// Which wire of a cell an amplitude lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mover {
    /// `φ⁺`, wire `2n`.
    Right,
    /// `φ⁻`, wire `2n + 1`.
    Left,
}

/// Single-particle amplitudes of the field pair over the ring, stored as
/// two contiguous arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub plus: Vec<Complex64>,
    pub minus: Vec<Complex64>,
    /// Elapsed gate steps `τ`; one two-step advances it by 2.
    pub step_count: i64,
}

impl FieldState {
    pub fn zeros(n_cells: usize) -> Self {
        Self {
            plus: vec![Complex64::new(0.0, 0.0); n_cells],
            minus: vec![Complex64::new(0.0, 0.0); n_cells],
            step_count: 0,
        }
    }

    pub fn from_components(plus: Vec<Complex64>, minus: Vec<Complex64>) -> Result<Self> {
        if plus.len() != minus.len() {
            return Err(Error::Dimension {
                expected: plus.len(),
                got: minus.len(),
            });
        }
        Ok(Self {
            plus,
            minus,
            step_count: 0,
        })
    }

    /// Unit amplitude on one wire.
    pub fn delta(n_cells: usize, cell: usize, mover: Mover) -> Result<Self> {
        if cell >= n_cells {
            return Err(Error::domain(format!(
                "cell {cell} outside ring of {n_cells}"
            )));
        }
        let mut s = Self::zeros(n_cells);
        match mover {
            Mover::Right => s.plus[cell] = Complex64::new(1.0, 0.0),
            Mover::Left => s.minus[cell] = Complex64::new(1.0, 0.0),
        }
        Ok(s)
    }

    /// Builds a state from a wire-ordered vector (`[φ⁺₀, φ⁻₀, φ⁺₁, φ⁻₁, …]`).
    pub fn from_wires(wires: &[Complex64]) -> Result<Self> {
        if !wires.len().is_multiple_of(2) {
            return Err(Error::Dimension {
                expected: wires.len() + 1,
                got: wires.len(),
            });
        }
        let plus = wires.iter().step_by(2).copied().collect();
        let minus = wires.iter().skip(1).step_by(2).copied().collect();
        Self::from_components(plus, minus)
    }

    /// Wire-ordered copy of the amplitudes.
    pub fn to_wires(&self) -> Vec<Complex64> {
        self.plus
            .iter()
            .zip(&self.minus)
            .flat_map(|(p, m)| [*p, *m])
            .collect()
    }

    pub fn n_cells(&self) -> usize {
        self.plus.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.plus
            .iter()
            .chain(&self.minus)
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Per-cell probability `|φ⁺ₙ|² + |φ⁻ₙ|²`.
    pub fn cell_weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.plus
            .iter()
            .zip(&self.minus)
            .map(|(p, m)| p.norm_sqr() + m.norm_sqr())
    }

    /// `Σₙ |φ⁺ₙ|² − |φ⁻ₙ|²`.
    pub fn sigma3(&self) -> f64 {
        self.plus
            .iter()
            .zip(&self.minus)
            .map(|(p, m)| p.norm_sqr() - m.norm_sqr())
            .sum()
    }

    /// Translates the state by `by` cells around the ring.
    pub fn shifted(&self, by: isize) -> Self {
        let n = self.n_cells() as isize;
        let shift = by.rem_euclid(n) as usize;
        let mut plus = self.plus.clone();
        let mut minus = self.minus.clone();
        plus.rotate_right(shift);
        minus.rotate_right(shift);
        Self {
            plus,
            minus,
            step_count: self.step_count,
        }
    }

    /// Largest componentwise distance to another state of the same size.
    pub fn max_abs_diff(&self, other: &FieldState) -> f64 {
        self.plus
            .iter()
            .zip(&other.plus)
            .chain(self.minus.iter().zip(&other.minus))
            .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
    }

    pub(crate) fn check_len(&self, n_cells: usize) -> Result<()> {
        if self.plus.len() != n_cells || self.minus.len() != n_cells {
            return Err(Error::Dimension {
                expected: n_cells,
                got: self.plus.len().min(self.minus.len()),
            });
        }
        Ok(())
    }
}
