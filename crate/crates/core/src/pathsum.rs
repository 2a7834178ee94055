//! Path-sum oracle: evolution as an explicit sum over routes through the gates.
//!
//! Rows are counted from the input side. Row `r` is a `B` row for even `r`
//! and an `A` row for odd `r`, so two rows make one two-step. Each gate
//! numbers its two input wires and its two output wires left to right
//! (local index 0 and 1). In a `B` row gate `n` holds wires `(2n, 2n+1)`; in
//! an `A` row gate `n` holds `(2n−1, 2n)`, wrapping to `(2N−1, 0)` at `n = 0`.
//!
//! A forward path starts at an output wire on the top slice and descends one
//! row at a time to an input wire; its amplitude is the product of the
//! crossed matrix elements `U[out][in]`. A backward path climbs from an input
//! wire to an output wire and multiplies the adjoint elements `U†[in][out]`.
//! Nothing is memoized.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolve::StepOperator;
use crate::linalg::{DenseMatrix, Mat2};
use crate::params::FieldState;

/// Exhaustive enumeration budget in rows.
pub const MAX_DEPTH: usize = 16;
/// Largest ring accepted by [`evolve_by_paths`].
pub const MAX_PATH_CELLS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

/// One wire of a path, identified through the gate it enters or leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WireHop {
    pub gate: usize,
    pub row: usize,
    /// Left-to-right index of the wire at that gate (0 or 1).
    pub local: usize,
    /// Global wire number on the ring.
    pub wire: usize,
}

/// A path `i₁ … iₙ₊₁` and the product of matrix elements along it.
///
/// Hops come in pairs, one pair per crossed gate: the wire where the path
/// enters the gate and the wire where it leaves, each with its local index at
/// that gate. A wire between two rows therefore appears twice, once for the
/// gate on each side. Forward paths start on an output wire of the top row
/// and end on an input wire of row 0; backward paths run the other way.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub wires: Vec<WireHop>,
    pub amplitude: Complex64,
}

impl PathRecord {
    pub fn start_wire(&self) -> usize {
        self.wires[0].wire
    }

    pub fn end_wire(&self) -> usize {
        self.wires[self.wires.len() - 1].wire
    }

    /// Number of gates crossed.
    pub fn depth(&self) -> usize {
        self.wires.len() / 2
    }
}

/// Row geometry of the circuit.
#[derive(Debug, Clone, Copy)]
struct Layout {
    n_cells: usize,
}

impl Layout {
    fn n_wires(&self) -> usize {
        2 * self.n_cells
    }

    fn is_b_row(row: usize) -> bool {
        row.is_multiple_of(2)
    }

    /// The gate in `row` touching `wire`, and the wire's local index there.
    fn locate(&self, row: usize, wire: usize) -> (usize, usize) {
        if Self::is_b_row(row) {
            (wire / 2, wire % 2)
        } else if wire.is_multiple_of(2) {
            (wire / 2, 1)
        } else {
            ((wire / 2 + 1) % self.n_cells, 0)
        }
    }

    fn wires_of(&self, row: usize, gate: usize) -> [usize; 2] {
        if Self::is_b_row(row) {
            [2 * gate, 2 * gate + 1]
        } else {
            [(2 * gate + self.n_wires() - 1) % self.n_wires(), 2 * gate]
        }
    }
}

fn row_matrix(op: &StepOperator, row: usize) -> Mat2 {
    if Layout::is_b_row(row) {
        op.gates().b
    } else {
        op.gates().a
    }
}

fn check_request(op: &StepOperator, wire: usize, depth: usize) -> Result<Layout> {
    if depth > MAX_DEPTH {
        return Err(Error::Budget {
            what: "path depth",
            requested: depth,
            limit: MAX_DEPTH,
        });
    }
    if depth == 0 {
        return Err(Error::domain("path depth must be at least one row"));
    }
    let layout = Layout {
        n_cells: op.n_cells(),
    };
    if wire >= layout.n_wires() {
        return Err(Error::domain(format!(
            "wire {wire} outside ring of {} wires",
            layout.n_wires()
        )));
    }
    Ok(layout)
}

/// Every path from output wire `target_wire` down through `depth` rows.
pub fn enumerate_forward(
    op: &StepOperator,
    target_wire: usize,
    depth: usize,
) -> Result<Vec<PathRecord>> {
    let layout = check_request(op, target_wire, depth)?;
    let top = depth - 1;
    let (gate, out_local) = layout.locate(top, target_wire);
    let mut paths = Vec::with_capacity(1 << depth);
    let mut stack = vec![WireHop {
        gate,
        row: top,
        local: out_local,
        wire: target_wire,
    }];
    descend(
        op,
        layout,
        top,
        gate,
        out_local,
        Complex64::new(1.0, 0.0),
        &mut stack,
        &mut paths,
    );
    Ok(paths)
}

#[allow(clippy::too_many_arguments)]
fn descend(
    op: &StepOperator,
    layout: Layout,
    row: usize,
    gate: usize,
    out_local: usize,
    amp: Complex64,
    stack: &mut Vec<WireHop>,
    paths: &mut Vec<PathRecord>,
) {
    let u = row_matrix(op, row);
    let wires = layout.wires_of(row, gate);
    for (in_local, &wire) in wires.iter().enumerate() {
        let next_amp = amp * u[(out_local, in_local)];
        if row == 0 {
            stack.push(WireHop {
                gate,
                row,
                local: in_local,
                wire,
            });
            paths.push(PathRecord {
                wires: stack.clone(),
                amplitude: next_amp,
            });
            stack.pop();
        } else {
            let (below, below_local) = layout.locate(row - 1, wire);
            stack.push(WireHop {
                gate,
                row,
                local: in_local,
                wire,
            });
            stack.push(WireHop {
                gate: below,
                row: row - 1,
                local: below_local,
                wire,
            });
            descend(
                op,
                layout,
                row - 1,
                below,
                below_local,
                next_amp,
                stack,
                paths,
            );
            stack.pop();
            stack.pop();
        }
    }
}

/// Every path from input wire `source_wire` up through `depth` rows, weighted by adjoint elements.
pub fn enumerate_backward(
    op: &StepOperator,
    source_wire: usize,
    depth: usize,
) -> Result<Vec<PathRecord>> {
    let layout = check_request(op, source_wire, depth)?;
    let mut paths = Vec::with_capacity(1 << depth);
    let mut stack = Vec::with_capacity(2 * depth + 1);
    ascend(
        op,
        layout,
        depth,
        0,
        source_wire,
        Complex64::new(1.0, 0.0),
        &mut stack,
        &mut paths,
    );
    Ok(paths)
}

#[allow(clippy::too_many_arguments)]
fn ascend(
    op: &StepOperator,
    layout: Layout,
    depth: usize,
    row: usize,
    wire: usize,
    amp: Complex64,
    stack: &mut Vec<WireHop>,
    paths: &mut Vec<PathRecord>,
) {
    let (gate, in_local) = layout.locate(row, wire);
    let u = row_matrix(op, row);
    let wires = layout.wires_of(row, gate);
    stack.push(WireHop {
        gate,
        row,
        local: in_local,
        wire,
    });
    for (out_local, &out_wire) in wires.iter().enumerate() {
        let next_amp = amp * u[(out_local, in_local)].conj();
        if row + 1 == depth {
            stack.push(WireHop {
                gate,
                row,
                local: out_local,
                wire: out_wire,
            });
            paths.push(PathRecord {
                wires: stack.clone(),
                amplitude: next_amp,
            });
            stack.pop();
        } else {
            stack.push(WireHop {
                gate,
                row,
                local: out_local,
                wire: out_wire,
            });
            ascend(op, layout, depth, row + 1, out_wire, next_amp, stack, paths);
            stack.pop();
        }
    }
    stack.pop();
}

/// Recomputes a path's amplitude from its hops alone.
///
/// Hops come in (enter, leave) pairs per crossed gate; the pair's local
/// indices select the matrix element.
pub fn path_amplitude(op: &StepOperator, path: &PathRecord, direction: Direction) -> Complex64 {
    path.wires
        .chunks_exact(2)
        .map(|pair| {
            let (first, second) = (pair[0], pair[1]);
            debug_assert_eq!(first.gate, second.gate);
            debug_assert_eq!(first.row, second.row);
            let u = row_matrix(op, first.row);
            match direction {
                Direction::Forward => u[(first.local, second.local)],
                Direction::Backward => u[(second.local, first.local)].conj(),
            }
        })
        .product()
}

/// Forward amplitude matrix `F`: output wire `k` at depth equals `Σ_l F[k, l]` times input wire `l`.
pub fn forward_matrix(op: &StepOperator, depth: usize) -> Result<DenseMatrix> {
    let dim = 2 * op.n_cells();
    let mut f = DenseMatrix::zeros(dim, dim);
    for k in 0..dim {
        for p in enumerate_forward(op, k, depth)? {
            f[(k, p.end_wire())] += p.amplitude;
        }
    }
    Ok(f)
}

/// Backward amplitude matrix `G`: input wire `l` evolved back by `depth` rows is `Σ_k G[l, k]` times wire `k`.
pub fn backward_matrix(op: &StepOperator, depth: usize) -> Result<DenseMatrix> {
    let dim = 2 * op.n_cells();
    let mut g = DenseMatrix::zeros(dim, dim);
    for l in 0..dim {
        for p in enumerate_backward(op, l, depth)? {
            g[(l, p.end_wire())] += p.amplitude;
        }
    }
    Ok(g)
}

/// Evolves a state by `depth` rows by summing path amplitudes.
pub fn evolve_by_paths(state: &FieldState, op: &StepOperator, depth: usize) -> Result<FieldState> {
    state.check_len(op.n_cells())?;
    if op.n_cells() > MAX_PATH_CELLS {
        return Err(Error::Budget {
            what: "path-sum ring size",
            requested: op.n_cells(),
            limit: MAX_PATH_CELLS,
        });
    }
    let input = state.to_wires();
    let output = (0..input.len())
        .map(|k| {
            Ok(enumerate_forward(op, k, depth)?
                .iter()
                .map(|p| p.amplitude * input[p.end_wire()])
                .sum())
        })
        .collect::<Result<Vec<Complex64>>>()?;
    let mut out = FieldState::from_wires(&output)?;
    out.step_count = state.step_count + depth as i64;
    Ok(out)
}
