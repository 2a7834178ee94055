//! Dense second-quantized oracle.
//!
//! Each wire is a qubit; wire `w` is bit `w` of the basis index and a set bit
//! means the mode is occupied. With `σ⁻ = |0⟩⟨1|` and `σ³ = +1` on occupied,
//! `−1` on empty qubits, the Jordan-Wigner fields are
//! `φⱼ = σ⁻ⱼ ∏_{k<j} σ³ₖ`; even wires `2n` play `φ⁺ₙ`, odd wires `2n+1` play
//! `φ⁻ₙ`. The string runs from wire 0, so on a closed ring the `A` gate across
//! the seam couples wire `2q−1` to wire 0 through the parity of every wire in
//! between.
//!
//! Gate unitaries are built twice, from the field bilinears
//! `exp{iθ(φ†φ′ + φ′†φ)}` and from the equivalent Pauli exponentials
//! `exp[−iθ(σ⁻σ⁺ + σ⁺σ⁻)]`. Both generators `G` satisfy `G³ = G`, so
//! `exp(iθG) = I + i sin θ G + (cos θ − 1) G²` exactly.
//!
//! Matrices are stored densely. Products skip zero entries of both factors,
//! which keeps the monomial field operators and two-wire gates cheap.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolve::StepOperator;
use crate::linalg::{max_diff, max_diff_phase_aligned, DenseMatrix, Mat2};
use crate::params::SimulationParams;

pub type DenseOperator = DenseMatrix;

/// Largest qubit count the dense oracle accepts (4096-dimensional).
pub const MAX_QUBITS: usize = 12;
/// Largest ring for [`single_excitation_crosscheck`].
pub const MAX_CROSSCHECK_CELLS: usize = 5;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Single-qubit factor of a Pauli product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    /// `σ⁻`, empties an occupied qubit.
    Lower,
    /// `σ⁺`, fills an empty qubit.
    Raise,
    /// `σ³`.
    Z,
}

/// Dense matrix of the ordered product `ops[0] · ops[1] · …` on `q` qubits.
pub fn pauli_product(q: usize, ops: &[(usize, Pauli)]) -> DenseOperator {
    let dim = 1usize << q;
    let mut m = DenseOperator::zeros(dim, dim);
    for col in 0..dim {
        let mut state = col;
        let mut coeff = 1.0;
        for &(wire, op) in ops.iter().rev() {
            let bit = 1usize << wire;
            let occupied = state & bit != 0;
            match op {
                Pauli::Lower if occupied => state ^= bit,
                Pauli::Raise if !occupied => state ^= bit,
                Pauli::Z => coeff *= if occupied { 1.0 } else { -1.0 },
                _ => {
                    coeff = 0.0;
                    break;
                }
            }
        }
        if coeff != 0.0 {
            m[(state, col)] += Complex64::new(coeff, 0.0);
        }
    }
    m
}

/// `a · b`, skipping zero entries of both factors.
pub fn mul(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    assert_eq!(a.ncols(), b.nrows());
    let a_nonzero: Vec<Vec<(usize, Complex64)>> = a
        .column_iter()
        .map(|col| {
            col.iter()
                .enumerate()
                .filter(|(_, x)| **x != ZERO)
                .map(|(i, x)| (i, *x))
                .collect()
        })
        .collect();
    let mut out = DenseOperator::zeros(a.nrows(), b.ncols());
    for (c, b_col) in b.column_iter().enumerate() {
        let mut out_col = out.column_mut(c);
        for (j, y) in b_col.iter().enumerate() {
            if *y == ZERO {
                continue;
            }
            for &(i, x) in &a_nonzero[j] {
                out_col[i] += x * y;
            }
        }
    }
    out
}

/// Jordan-Wigner annihilation operators for every wire.
#[derive(Debug, Clone)]
pub struct FieldOperatorSet {
    q: usize,
    fields: Vec<DenseOperator>,
}

impl FieldOperatorSet {
    pub fn qubits(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        1 << self.q
    }

    pub fn field(&self, wire: usize) -> &DenseOperator {
        &self.fields[wire]
    }

    pub fn iter(&self) -> impl Iterator<Item = &DenseOperator> {
        self.fields.iter()
    }

    /// `φᵢ†φⱼ + φⱼ†φᵢ`.
    pub fn hopping(&self, i: usize, j: usize) -> DenseOperator {
        let (fi, fj) = (&self.fields[i], &self.fields[j]);
        let ij = mul(&fi.adjoint(), fj);
        &ij + ij.adjoint()
    }

    /// Conventional occupation `Σⱼ φⱼ†φⱼ`.
    pub fn occupation(&self) -> DenseOperator {
        self.fields
            .iter()
            .fold(DenseOperator::zeros(self.dim(), self.dim()), |acc, f| {
                acc + mul(&f.adjoint(), f)
            })
    }

    /// `N = Σₙ σ³ₙ`.
    pub fn sigma3_total(&self) -> DenseOperator {
        (0..self.q).fold(DenseOperator::zeros(self.dim(), self.dim()), |acc, w| {
            acc + pauli_product(self.q, &[(w, Pauli::Z)])
        })
    }

    /// `φⱼ†|0…0⟩` as a column vector.
    pub fn excitation(&self, wire: usize) -> DenseOperator {
        let col = self.fields[wire].adjoint().column(0).into_owned();
        DenseOperator::from_column_slice(self.dim(), 1, col.as_slice())
    }
}

/// Builds `φⱼ = σ⁻ⱼ ∏_{k<j} σ³ₖ` for `q` wires.
pub fn build_jw_fields(q: usize) -> Result<FieldOperatorSet> {
    if q > MAX_QUBITS {
        return Err(Error::Budget {
            what: "qubit count",
            requested: q,
            limit: MAX_QUBITS,
        });
    }
    if q < 2 {
        return Err(Error::domain(format!("need at least 2 qubits, got {q}")));
    }
    let fields = (0..q)
        .map(|j| {
            let mut ops = vec![(j, Pauli::Lower)];
            ops.extend((0..j).map(|k| (k, Pauli::Z)));
            pauli_product(q, &ops)
        })
        .collect();
    Ok(FieldOperatorSet { q, fields })
}

/// Largest deviation from `{φₘ, φₙ†} = δₘₙ` and `{φₘ, φₙ} = 0`.
pub fn car_residual(fields: &FieldOperatorSet) -> f64 {
    let dim = fields.dim();
    let id = DenseOperator::identity(dim, dim);
    let zero = DenseOperator::zeros(dim, dim);
    let mut worst = 0.0f64;
    for (m, fm) in fields.iter().enumerate() {
        for (n, fn_) in fields.iter().enumerate() {
            let fn_dag = fn_.adjoint();
            let anti_dag = mul(fm, &fn_dag) + mul(&fn_dag, fm);
            let target = if m == n { &id } else { &zero };
            worst = worst.max(max_diff(&anti_dag, target));
            let anti = mul(fm, fn_) + mul(fn_, fm);
            worst = worst.max(max_diff(&anti, &zero));
        }
    }
    worst
}

/// `exp(iθG)` for a generator with `G³ = G`, given `cos θ` and `sin θ`.
pub fn rotation_exp(generator: &DenseOperator, cos_theta: f64, sin_theta: f64) -> DenseOperator {
    let dim = generator.nrows();
    let g2 = mul(generator, generator);
    DenseOperator::identity(dim, dim)
        + generator * Complex64::new(0.0, sin_theta)
        + g2 * Complex64::new(cos_theta - 1.0, 0.0)
}

/// `‖G³ − G‖`, zero when [`rotation_exp`] is exact.
pub fn cube_residual(generator: &DenseOperator) -> f64 {
    let g3 = mul(generator, &mul(generator, generator));
    max_diff(&g3, generator)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    A,
    B,
}

/// One gate of the ring as a dense unitary, in both constructions.
#[derive(Debug, Clone)]
pub struct GateOperator {
    pub kind: GateKind,
    pub cell: usize,
    /// Wires in left-to-right order at the gate.
    pub wires: [usize; 2],
    pub field_form: DenseOperator,
    pub pauli_form: DenseOperator,
}

impl GateOperator {
    pub fn form_mismatch(&self) -> f64 {
        max_diff(&self.field_form, &self.pauli_form)
    }
}

#[derive(Debug, Clone)]
pub struct GateUnitaries {
    pub a_ops: Vec<GateOperator>,
    pub b_ops: Vec<GateOperator>,
}

impl GateUnitaries {
    /// Product of every gate of one row, field form.
    pub fn row_product(&self, kind: GateKind) -> DenseOperator {
        let ops = match kind {
            GateKind::A => &self.a_ops,
            GateKind::B => &self.b_ops,
        };
        let dim = ops[0].field_form.nrows();
        ops.iter()
            .fold(DenseOperator::identity(dim, dim), |acc, g| {
                mul(&g.field_form, &acc)
            })
    }
}

/// Builds every `A` and `B` gate on a ring of `q/2` cells.
///
/// `A` at cell `n` is `exp{iθ(φ⁺ₙ†φ⁻ₙ₋₁ + h.c.)}` on wires `(2n−1, 2n)`;
/// `B` at cell `n` is `exp{iπ/2 (φ⁺ₙ†φ⁻ₙ + h.c.)}` on wires `(2n, 2n+1)`.
pub fn build_gate_unitaries(
    params: &SimulationParams,
    fields: &FieldOperatorSet,
) -> Result<GateUnitaries> {
    let q = fields.qubits();
    if !q.is_multiple_of(2) || q < 4 {
        return Err(Error::domain(format!(
            "gate ring needs an even number of at least 4 wires, got {q}"
        )));
    }
    let cells = q / 2;
    let (cos_a, sin_a) = (params.mu(), params.zeta());

    let mut a_ops = Vec::with_capacity(cells);
    let mut b_ops = Vec::with_capacity(cells);
    for n in 0..cells {
        let left = (2 * n + q - 1) % q;
        let right = 2 * n;
        let field_form = rotation_exp(&fields.hopping(right, left), cos_a, sin_a);
        let pauli_gen = if n == 0 {
            // seam: the string between wire 0 and wire q−1 stays attached
            let mut ops = vec![(0, Pauli::Raise), (q - 1, Pauli::Lower)];
            ops.extend((1..q - 1).map(|k| (k, Pauli::Z)));
            let fwd = pauli_product(q, &ops);
            &fwd + fwd.adjoint()
        } else {
            hop_pauli(q, left, right)
        };
        let pauli_form = rotation_exp(&pauli_gen, cos_a, -sin_a);
        a_ops.push(GateOperator {
            kind: GateKind::A,
            cell: n,
            wires: [left, right],
            field_form,
            pauli_form,
        });

        let (l, r) = (2 * n, 2 * n + 1);
        let field_form = rotation_exp(&fields.hopping(l, r), 0.0, 1.0);
        let pauli_form = rotation_exp(&hop_pauli(q, l, r), 0.0, -1.0);
        b_ops.push(GateOperator {
            kind: GateKind::B,
            cell: n,
            wires: [l, r],
            field_form,
            pauli_form,
        });
    }
    Ok(GateUnitaries { a_ops, b_ops })
}

/// `σ⁻ᵢσ⁺ⱼ + σ⁺ᵢσ⁻ⱼ`.
fn hop_pauli(q: usize, i: usize, j: usize) -> DenseOperator {
    pauli_product(q, &[(i, Pauli::Lower), (j, Pauli::Raise)])
        + pauli_product(q, &[(i, Pauli::Raise), (j, Pauli::Lower)])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergFit {
    /// `coefficients[(a, b)]` is the weight of `φ_{wires[b]}` in `U φ_{wires[a]} U†`.
    pub coefficients: Mat2,
    /// Largest coefficient error against the expected gate matrix.
    pub coefficient_residual: f64,
    /// Largest entry of `U φ U† − Σ c φ`, nonzero if the image leaves the two-mode span.
    pub fit_residual: f64,
}

impl HeisenbergFit {
    pub fn residual(&self) -> f64 {
        self.coefficient_residual.max(self.fit_residual)
    }
}

/// Projects `U φ_w U†` for both gate wires onto `{φ_{w₀}, φ_{w₁}}` with the trace inner product.
pub fn heisenberg_check(
    u: &DenseOperator,
    fields: &FieldOperatorSet,
    wires: [usize; 2],
    expected: &Mat2,
) -> HeisenbergFit {
    let u_dag = u.adjoint();
    // Tr(φ†φ) = 2^{q−1}
    let weight = (fields.dim() / 2) as f64;
    let mut coefficients = Mat2::zeros();
    let mut fit_residual = 0.0f64;
    for (a, &wa) in wires.iter().enumerate() {
        let image = mul(u, &mul(fields.field(wa), &u_dag));
        let mut fitted = DenseOperator::zeros(fields.dim(), fields.dim());
        for (b, &wb) in wires.iter().enumerate() {
            let fb = fields.field(wb);
            let overlap: Complex64 = fb.iter().zip(image.iter()).map(|(x, y)| x.conj() * y).sum();
            coefficients[(a, b)] = overlap / weight;
            fitted += fb * coefficients[(a, b)];
        }
        fit_residual = fit_residual.max(max_diff(&image, &fitted));
    }
    let coefficient_residual = (coefficients - expected)
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()));
    HeisenbergFit {
        coefficients,
        coefficient_residual,
        fit_residual,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationReport {
    /// Max entry of `[U, N]` with `N = Σσ³`.
    pub sigma3_commutator: f64,
    /// Max entry of `[U, Σφ†φ]`.
    pub occupation_commutator: f64,
    /// `‖U|0…0⟩ − |0…0⟩‖`.
    pub vacuum_residual: f64,
}

impl ConservationReport {
    pub fn max_residual(&self) -> f64 {
        self.sigma3_commutator
            .max(self.occupation_commutator)
            .max(self.vacuum_residual)
    }
}

pub fn conservation_checks(u: &DenseOperator, fields: &FieldOperatorSet) -> ConservationReport {
    let commutator = |n: &DenseOperator| {
        let diff = mul(u, n) - mul(n, u);
        diff.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    };
    let mut vac_delta = u.column(0).into_owned();
    vac_delta[0] -= ONE;
    ConservationReport {
        sigma3_commutator: commutator(&fields.sigma3_total()),
        occupation_commutator: commutator(&fields.occupation()),
        vacuum_residual: vac_delta.norm(),
    }
}

/// Max entry of `Σσ³ − (2Σφ†φ − q)`.
pub fn number_shift_residual(fields: &FieldOperatorSet) -> f64 {
    let dim = fields.dim();
    let shifted = fields.occupation() * Complex64::new(2.0, 0.0)
        - DenseOperator::identity(dim, dim) * Complex64::new(fields.qubits() as f64, 0.0);
    max_diff(&fields.sigma3_total(), &shifted)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistics {
    Fermi,
    /// Two truncated oscillators with `cutoff` levels each.
    Bose {
        cutoff: usize,
    },
}

/// Checks `e^{α*z′†z − αz†z′} z e^{αz†z′ − α*z′†z} = cos|α| z + (α/|α|) sin|α| z′`.
///
/// Fermions use Jordan-Wigner fields on the wires of `mode_pair`. Bosons use
/// two oscillators truncated at `cutoff` levels (`mode_pair` must be `(0, 1)`
/// or `(1, 0)`); the residual is then measured only on states with total
/// occupation at most `cutoff/2`, where truncation does not act.
pub fn displacement_identity_check(
    alpha: Complex64,
    mode_pair: (usize, usize),
    statistics: Statistics,
) -> Result<f64> {
    let (zi, zj) = mode_pair;
    if zi == zj {
        return Err(Error::domain("displacement needs two distinct modes"));
    }
    let (z, zp, safe_columns): (DenseOperator, DenseOperator, Vec<usize>) = match statistics {
        Statistics::Fermi => {
            let fields = build_jw_fields(zi.max(zj).max(1) + 1)?;
            let cols = (0..fields.dim()).collect();
            (fields.field(zi).clone(), fields.field(zj).clone(), cols)
        }
        Statistics::Bose { cutoff } => {
            if cutoff < 4 {
                return Err(Error::domain(format!(
                    "Bose cutoff must be at least 4, got {cutoff}"
                )));
            }
            if zi.max(zj) > 1 {
                return Err(Error::domain("Bose check uses modes 0 and 1"));
            }
            let modes = [truncated_mode(cutoff, 0), truncated_mode(cutoff, 1)];
            // basis index = n0 + cutoff·n1
            let cols = (0..cutoff * cutoff)
                .filter(|idx| idx % cutoff + idx / cutoff <= cutoff / 2)
                .collect();
            (modes[zi].clone(), modes[zj].clone(), cols)
        }
    };

    let x = mul(&zp.adjoint(), &z) * alpha.conj() - mul(&z.adjoint(), &zp) * alpha;
    let lhs = mul(&x.clone().exp(), &mul(&z, &(-x).exp()));
    let r = alpha.norm();
    let phase_sin = if r == 0.0 { ZERO } else { alpha / r * r.sin() };
    let rhs = &z * Complex64::new(r.cos(), 0.0) + &zp * phase_sin;

    let diff = lhs - rhs;
    Ok(safe_columns
        .iter()
        .flat_map(|&col| {
            diff.column(col)
                .iter()
                .map(|z| z.norm())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max))
}

/// Annihilation operator of oscillator `which` in a two-mode truncated Fock space.
fn truncated_mode(cutoff: usize, which: usize) -> DenseOperator {
    let dim = cutoff * cutoff;
    let mut m = DenseOperator::zeros(dim, dim);
    for n0 in 0..cutoff {
        for n1 in 0..cutoff {
            let col = n0 + cutoff * n1;
            let (n, row) = if which == 0 {
                (n0, (n0 > 0).then(|| col - 1))
            } else {
                (n1, (n1 > 0).then(|| col - cutoff))
            };
            if let Some(row) = row {
                m[(row, col)] = Complex64::new((n as f64).sqrt(), 0.0);
            }
        }
    }
    m
}

#[derive(Debug, Clone)]
pub struct CrosscheckReport {
    /// Max entry deviation between the two sector matrices after phase alignment.
    pub residual: f64,
    pub vacuum_residual: f64,
    /// `⟨k|V|j⟩` with `|j⟩ = φⱼ†|0…0⟩`.
    pub sector: DenseMatrix,
    /// The single-particle two-step matrix.
    pub reference: DenseMatrix,
}

/// Compares the one-particle sector of the dense two-step circuit with the
/// single-particle evolution matrix on `q_cells` cells.
///
/// Field gates act as `UφU† = Gφ`, so a state evolved by `U` carries the
/// amplitudes `G†`. Amplitudes that follow the field (`⟨0|φ|ψ⟩`) therefore
/// come from the adjoint circuit `V = U_A† U_B†`: every `B` gate, then every
/// `A` gate, each inverted.
pub fn single_excitation_crosscheck(
    params: &SimulationParams,
    q_cells: usize,
) -> Result<CrosscheckReport> {
    if q_cells > MAX_CROSSCHECK_CELLS {
        return Err(Error::Budget {
            what: "crosscheck cells",
            requested: q_cells,
            limit: MAX_CROSSCHECK_CELLS,
        });
    }
    if q_cells < 2 {
        return Err(Error::domain(format!(
            "need at least 2 cells, got {q_cells}"
        )));
    }
    let fields = build_jw_fields(2 * q_cells)?;
    let gates = build_gate_unitaries(params, &fields)?;
    let step = mul(
        &gates.row_product(GateKind::A).adjoint(),
        &gates.row_product(GateKind::B).adjoint(),
    );

    let wires = 2 * q_cells;
    let kets: Vec<DenseOperator> = (0..wires).map(|w| fields.excitation(w)).collect();
    let mut sector = DenseMatrix::zeros(wires, wires);
    for (j, ket) in kets.iter().enumerate() {
        let evolved = mul(&step, ket);
        for (k, bra) in kets.iter().enumerate() {
            sector[(k, j)] = bra
                .iter()
                .zip(evolved.iter())
                .map(|(b, e)| b.conj() * e)
                .sum();
        }
    }

    let reference = StepOperator::from_params(&params.with_cells(q_cells)?).dense_matrix();
    let mut vac = step.column(0).into_owned();
    vac[0] -= ONE;
    Ok(CrosscheckReport {
        residual: max_diff_phase_aligned(&reference, &sector),
        vacuum_residual: vac.norm(),
        sector,
        reference,
    })
}
