//! Single-particle evolution on the ring.
//!
//! Wires are laid out left to right as `φ⁺₀, φ⁻₀, φ⁺₁, φ⁻₁, …`. A `B` gate
//! acts inside cell `n` on `(φ⁺ₙ, φ⁻ₙ)`; an `A` gate straddles the cell
//! boundary and acts on `(φ⁻ₙ₋₁, φ⁺ₙ)`, the pair at `n = 0` closing the ring.
//! One two-step applies the `B` row and then the `A` row, which reproduces
//!
//! ```text
//! φ⁺ₙ ← A₂₁B₂₁ φ⁺ₙ₋₁ + A₂₁B₂₂ φ⁻ₙ₋₁ + A₂₂B₁₁ φ⁺ₙ + A₂₂B₁₂ φ⁻ₙ
//! φ⁻ₙ ← A₁₁B₂₁ φ⁺ₙ  + A₁₁B₂₂ φ⁻ₙ  + A₁₂B₁₁ φ⁺ₙ₊₁ + A₁₂B₁₂ φ⁻ₙ₊₁
//! ```
//!
//! Amplitudes here are `⟨0|φⱼ|ψ⟩`, so they transform with the same matrix as
//! the field operators in the Heisenberg picture.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::gates::{solve_gates, GatePair};
use crate::linalg::{DenseMatrix, Mat2};
use crate::params::{FieldState, SimulationParams};

/// Rings at least this long are swept with rayon by default.
pub const PARALLEL_THRESHOLD: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    Serial,
    Parallel,
    /// Serial below [`PARALLEL_THRESHOLD`] cells, parallel above.
    Auto,
}

/// The homogeneous two-row circuit on a ring of `n_cells` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOperator {
    gates: GatePair,
    n_cells: usize,
}

impl StepOperator {
    pub fn new(gates: GatePair, n_cells: usize) -> Result<Self> {
        if n_cells < 2 {
            return Err(Error::domain(format!(
                "n_cells must be at least 2, got {n_cells}"
            )));
        }
        Ok(Self { gates, n_cells })
    }

    pub fn from_params(params: &SimulationParams) -> Self {
        Self {
            gates: solve_gates(params),
            n_cells: params.n_cells(),
        }
    }

    pub fn gates(&self) -> &GatePair {
        &self.gates
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Forward evolution by `2τ`.
    pub fn two_step(&self, state: &FieldState) -> Result<FieldState> {
        let mut out = state.clone();
        self.two_step_in_place(&mut out)?;
        Ok(out)
    }

    /// Backward evolution by `2τ`: the adjoint `A` row, then the adjoint `B` row.
    pub fn backward_two_step(&self, state: &FieldState) -> Result<FieldState> {
        let mut out = state.clone();
        self.backward_two_step_in_place(&mut out)?;
        Ok(out)
    }

    pub fn two_step_in_place(&self, state: &mut FieldState) -> Result<()> {
        self.two_step_with(state, Kernel::Auto)
    }

    pub fn two_step_with(&self, state: &mut FieldState, kernel: Kernel) -> Result<()> {
        state.check_len(self.n_cells)?;
        let parallel = self.use_parallel(kernel);
        cell_row(&self.gates.b, state, parallel);
        boundary_row(&self.gates.a, state, parallel);
        state.step_count += 2;
        Ok(())
    }

    pub fn backward_two_step_in_place(&self, state: &mut FieldState) -> Result<()> {
        self.backward_with(state, Kernel::Auto)
    }

    pub fn backward_with(&self, state: &mut FieldState, kernel: Kernel) -> Result<()> {
        state.check_len(self.n_cells)?;
        let parallel = self.use_parallel(kernel);
        boundary_row(&self.gates.a.adjoint(), state, parallel);
        cell_row(&self.gates.b.adjoint(), state, parallel);
        state.step_count -= 2;
        Ok(())
    }

    /// Applies `count` forward two-steps.
    pub fn evolve(&self, state: &mut FieldState, count: usize) -> Result<()> {
        for _ in 0..count {
            self.two_step_in_place(state)?;
        }
        Ok(())
    }

    /// The `2N × 2N` two-step matrix in wire order, built column by column.
    pub fn dense_matrix(&self) -> DenseMatrix {
        self.dense_from(|s| self.two_step_with(s, Kernel::Serial))
    }

    pub fn dense_backward_matrix(&self) -> DenseMatrix {
        self.dense_from(|s| self.backward_with(s, Kernel::Serial))
    }

    fn dense_from(&self, apply: impl Fn(&mut FieldState) -> Result<()>) -> DenseMatrix {
        let dim = 2 * self.n_cells;
        let mut m = DenseMatrix::zeros(dim, dim);
        let mut basis = vec![Complex64::new(0.0, 0.0); dim];
        for col in 0..dim {
            basis[col] = Complex64::new(1.0, 0.0);
            let mut s = FieldState::from_wires(&basis).expect("even dimension");
            apply(&mut s).expect("matching length");
            for (row, z) in s.to_wires().into_iter().enumerate() {
                m[(row, col)] = z;
            }
            basis[col] = Complex64::new(0.0, 0.0);
        }
        m
    }

    fn use_parallel(&self, kernel: Kernel) -> bool {
        match kernel {
            Kernel::Serial => false,
            Kernel::Parallel => true,
            Kernel::Auto => self.n_cells >= PARALLEL_THRESHOLD,
        }
    }
}

#[inline(always)]
fn apply2(g: &Mat2, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
    (g[(0, 0)] * x + g[(0, 1)] * y, g[(1, 0)] * x + g[(1, 1)] * y)
}

/// Gate on `(φ⁺ₙ, φ⁻ₙ)` in every cell.
fn cell_row(g: &Mat2, state: &mut FieldState, parallel: bool) {
    let g = *g;
    let update = move |(p, m): (&mut Complex64, &mut Complex64)| {
        (*p, *m) = apply2(&g, *p, *m);
    };
    if parallel {
        state
            .plus
            .par_iter_mut()
            .zip(state.minus.par_iter_mut())
            .for_each(update);
    } else {
        state
            .plus
            .iter_mut()
            .zip(state.minus.iter_mut())
            .for_each(update);
    }
}

/// Gate on `(φ⁻ₙ₋₁, φ⁺ₙ)` for every `n`, with the pair `(φ⁻_{N−1}, φ⁺₀)` across the seam.
fn boundary_row(g: &Mat2, state: &mut FieldState, parallel: bool) {
    let g = *g;
    let n = state.plus.len();
    let update = move |(m, p): (&mut Complex64, &mut Complex64)| {
        (*m, *p) = apply2(&g, *m, *p);
    };
    let (plus, minus) = (&mut state.plus, &mut state.minus);
    if parallel {
        minus[..n - 1]
            .par_iter_mut()
            .zip(plus[1..].par_iter_mut())
            .for_each(update);
    } else {
        minus[..n - 1]
            .iter_mut()
            .zip(plus[1..].iter_mut())
            .for_each(update);
    }
    update((&mut minus[n - 1], &mut plus[0]));
}

/// Normalized Gaussian wavepacket
/// `exp(−(n−center)²/(4σ²)) · exp(i k0·2a·n) · mix`, with `n − center` taken
/// as the nearest-image displacement on the ring.
pub fn gaussian_packet(
    params: &SimulationParams,
    center: f64,
    width_sigma: f64,
    k0: f64,
    mix: [Complex64; 2],
) -> Result<FieldState> {
    let n = params.n_cells();
    let nf = n as f64;
    if !(width_sigma > 0.0 && width_sigma < nf / 8.0) {
        return Err(Error::domain(format!(
            "packet width must lie in (0, {}), got {width_sigma}",
            nf / 8.0
        )));
    }
    if !(center >= 0.0 && center < nf) {
        return Err(Error::domain(format!(
            "packet center {center} outside [0, {nf})"
        )));
    }
    if !k0.is_finite() {
        return Err(Error::domain("packet wavenumber must be finite"));
    }
    let mix_norm = (mix[0].norm_sqr() + mix[1].norm_sqr()).sqrt();
    if !(mix_norm > 0.0 && mix_norm.is_finite()) {
        return Err(Error::domain("component mix must be a nonzero 2-vector"));
    }
    let mix = [mix[0] / mix_norm, mix[1] / mix_norm];

    let kappa0 = 2.0 * params.units().a() * k0;
    let envelope: Vec<Complex64> = (0..n)
        .map(|cell| {
            let d = nearest_image(cell as f64, center, nf) - center;
            let amp = (-(d * d) / (4.0 * width_sigma * width_sigma)).exp();
            Complex64::from_polar(amp, kappa0 * (center + d))
        })
        .collect();
    let norm = envelope.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    let plus = envelope.iter().map(|e| e * mix[0] / norm).collect();
    let minus = envelope.iter().map(|e| e * mix[1] / norm).collect();
    FieldState::from_components(plus, minus)
}

/// The image `x + jN` closest to `reference`.
#[inline]
fn nearest_image(x: f64, reference: f64, n: f64) -> f64 {
    x + n * ((reference - x) / n).round()
}

/// Circular mean position of the cell weights, in `[0, N)`.
pub fn circular_mean_x(state: &FieldState) -> f64 {
    let n = state.n_cells() as f64;
    let (s, c) = state
        .cell_weights()
        .enumerate()
        .fold((0.0, 0.0), |(s, c), (i, w)| {
            let ang = 2.0 * PI * i as f64 / n;
            (s + w * ang.sin(), c + w * ang.cos())
        });
    (s.atan2(c) / (2.0 * PI) * n).rem_euclid(n)
}

/// Mean position with every cell mapped to its image nearest `reference`.
///
/// A cell diametrically opposite `reference` has two equally near images and
/// contributes half its weight to each.
pub fn mean_x_near(state: &FieldState, reference: f64) -> f64 {
    let n = state.n_cells() as f64;
    let (num, den) = state
        .cell_weights()
        .enumerate()
        .fold((0.0, 0.0), |(num, den), (i, w)| {
            let x = nearest_image(i as f64, reference, n);
            let x = if ((x - reference).abs() - n / 2.0).abs() < 1e-9 {
                reference
            } else {
                x
            };
            (num + w * x, den + w)
        });
    num / den
}

/// Observables recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    /// Elapsed gate steps `τ`.
    pub step: i64,
    /// Unwrapped mean position in cells.
    pub mean_x: f64,
    pub norm: f64,
    pub sigma3: f64,
}

/// Evolves `state` by `n_two_steps` two-steps, sampling the initial state and
/// the state after every two-step.
///
/// The position is unwrapped across the seam: each sample is measured with
/// cells mapped to the image nearest the previous mean (refined once against
/// the new estimate), starting from the rounded circular mean of the initial
/// state.
pub fn run_trajectory(
    state: &mut FieldState,
    op: &StepOperator,
    n_two_steps: usize,
) -> Result<Vec<TrajectorySample>> {
    if n_two_steps == 0 {
        return Err(Error::domain("trajectory needs at least one two-step"));
    }
    state.check_len(op.n_cells())?;
    let mut reference = circular_mean_x(state).round();
    let mut samples = Vec::with_capacity(n_two_steps + 1);
    let mut record = |s: &FieldState, reference: &mut f64| {
        // second pass centres the image window on the packet itself
        let mean_x = mean_x_near(s, mean_x_near(s, *reference));
        *reference = mean_x;
        samples.push(TrajectorySample {
            step: s.step_count,
            mean_x,
            norm: s.norm_sqr().sqrt(),
            sigma3: s.sigma3(),
        });
    };
    record(state, &mut reference);
    for _ in 0..n_two_steps {
        op.two_step_in_place(state)?;
        record(state, &mut reference);
    }
    Ok(samples)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

/// Ordinary least squares of `ys` against `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    LinearFit {
        slope,
        intercept,
        max_residual,
    }
}

/// Fitted drift of `mean_x`, converted to a speed: cells are `2a` apart and steps last `τ`.
pub fn fit_speed(samples: &[TrajectorySample], params: &SimulationParams) -> LinearFit {
    let xs: Vec<f64> = samples.iter().map(|s| s.step as f64).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.mean_x).collect();
    let fit = linear_fit(&xs, &ys);
    let scale = 2.0 * params.units().a() / params.units().tau();
    LinearFit {
        slope: fit.slope * scale,
        intercept: fit.intercept,
        max_residual: fit.max_residual,
    }
}

/// Dominant angular frequency of a uniformly sampled real series.
///
/// The mean and the period-2 alternation `(−1)ᵗ` are projected out first,
/// then the peak of the Hann-windowed, zero-padded spectrum is refined by a
/// parabola through the three largest neighbouring bins.
pub fn dominant_frequency(series: &[f64], sample_dt: f64) -> Result<f64> {
    let n = series.len();
    if n < 8 {
        return Err(Error::domain(format!("need at least 8 samples, got {n}")));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let alt = series
        .iter()
        .enumerate()
        .map(|(t, x)| if t % 2 == 0 { *x } else { -*x })
        .sum::<f64>()
        / n as f64;

    let padded = (4 * n).next_power_of_two();
    let mut buf: Vec<Complex64> = series
        .iter()
        .enumerate()
        .map(|(t, x)| {
            let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
            let hann = 0.5 - 0.5 * (2.0 * PI * t as f64 / (n - 1) as f64).cos();
            Complex64::new((x - mean - sign * alt) * hann, 0.0)
        })
        .collect();
    buf.resize(padded, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(padded).process(&mut buf);

    let mag: Vec<f64> = buf[..padded / 2 + 1].iter().map(|z| z.norm()).collect();
    let peak = (1..mag.len() - 1)
        .max_by(|&i, &j| mag[i].total_cmp(&mag[j]))
        .expect("nonempty spectrum");
    let (l, m, r) = (mag[peak - 1], mag[peak], mag[peak + 1]);
    let denom = l - 2.0 * m + r;
    let offset = if denom != 0.0 {
        0.5 * (l - r) / denom
    } else {
        0.0
    };
    let cycles_per_sample = (peak as f64 + offset) / padded as f64;
    Ok(2.0 * PI * cycles_per_sample / sample_dt)
}
