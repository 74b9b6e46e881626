//! Structured finite-volume machinery shared by the stochastic Galerkin and
//! moment-method solvers: grids, numerical fluxes, CFL control, boundary
//! handling and the forward-Euler update of moment fields.

mod deterministic;
mod field;
mod flux;
mod grid;

pub use deterministic::{advance_deterministic, run_deterministic, DeterministicRun};
pub use field::{CellElementField, MomentField, NodeField};
pub use flux::{hll_wave_speeds, numerical_flux_hll, numerical_flux_lax_friedrichs, NumericalFlux};
pub use grid::{Axis, BoundaryCondition, Neighbor, Side, StructuredGrid};

use rayon::prelude::*;

use crate::basis::GpcBasis;
use crate::error::{Error, Result};
use crate::euler::{ConservedState, Direction, GasModel};

/// Everything needed to advance a moment field except the method itself.
#[derive(Debug, Clone)]
pub struct Discretization<const N: usize> {
    pub grid: StructuredGrid<N>,
    pub basis: GpcBasis,
    pub model: GasModel,
    pub flux: NumericalFlux,
    pub cfl: f64,
}

/// Admissible time step and the directional maximal wave speeds it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStep {
    pub dt: f64,
    pub lambda: [f64; 2],
}

/// `Δt = C / Σ_d (λ_d / Δ_d)` with `λ_d` the largest `|v_d| + c` over `states`
/// and any Dirichlet boundary states.
pub fn cfl_time_step<'a, const N: usize>(
    states: impl IntoIterator<Item = &'a ConservedState<N>>,
    grid: &StructuredGrid<N>,
    model: &GasModel,
    cfl: f64,
) -> Result<TimeStep> {
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::invalid(format!("CFL number {cfl} outside (0, 1]")));
    }
    let dirs = Direction::all(grid.dims());
    let mut lambda = [0.0f64; 2];
    let mut visit = |u: &ConservedState<N>| -> Result<()> {
        if !model.is_admissible(u) {
            return Err(Error::inadmissible(u, "time-step estimate"));
        }
        for &d in dirs {
            lambda[d.index()] = lambda[d.index()].max(model.max_wave_speed_unchecked(u, d));
        }
        Ok(())
    };
    for u in states {
        visit(u)?;
    }
    for &d in dirs {
        for side in [Side::Low, Side::High] {
            if let BoundaryCondition::Dirichlet(u) = grid.boundary(d, side) {
                visit(u)?;
            }
        }
    }
    let rate: f64 = dirs.iter().map(|&d| lambda[d.index()] / grid.spacing(d)).sum();
    if !(rate > 0.0) {
        return Err(Error::ZeroWaveSpeed);
    }
    Ok(TimeStep { dt: cfl / rate, lambda })
}

/// Wall-clock time spent in the phases of a moment-method run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub flux: std::time::Duration,
    pub limiter_filter: std::time::Duration,
    pub dual_solve: std::time::Duration,
}

impl PhaseTimings {
    pub fn total(&self) -> std::time::Duration {
        self.flux + self.limiter_filter + self.dual_solve
    }
}

/// Shortens `step` so that it ends exactly at `t_end` when it would overshoot.
/// The flag is true for the final step.
pub fn truncate_to_end(step: TimeStep, t: f64, t_end: f64) -> (TimeStep, bool) {
    let remaining = t_end - t;
    if step.dt >= remaining || remaining - step.dt <= 1e-12 * t_end.abs().max(1.0) {
        (TimeStep { dt: remaining, ..step }, true)
    } else {
        (step, false)
    }
}

/// Moment field padded with one layer of ghost cells per side.
#[derive(Debug, Clone)]
pub struct GhostedField<const N: usize> {
    /// Padded extents `(nx + 2, ny + 2)`; `ny + 2 = 1` in 1D.
    pub shape: (usize, usize),
    pub field: MomentField<N>,
}

impl<const N: usize> GhostedField<N> {
    /// Block of padded cell `(i, j)`, where interior cells start at index 1
    /// (and `j = 0` in 1D).
    pub fn block(&self, i: usize, j: usize, l: usize) -> &[ConservedState<N>] {
        self.field.block(i * self.shape.1 + j, l)
    }
}

/// Builds the ghost-extended field: transmissive copies the boundary cell, periodic
/// wraps, Dirichlet inserts the moments `(u*, 0, ..., 0)` of the prescribed state.
pub fn apply_boundary<const N: usize>(field: &MomentField<N>, grid: &StructuredGrid<N>) -> GhostedField<N> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let two_d = grid.dims() == 2;
    let (px, py) = (nx + 2, if two_d { ny + 2 } else { 1 });
    let (ne, nm) = (field.n_elements(), field.n_modes());
    let mut out = MomentField::zeros(px * py, ne, nm);

    let fill = |out: &mut MomentField<N>, dst: usize, src: Neighbor<N>| {
        for l in 0..ne {
            let block = out.block_mut(dst, l);
            match src {
                Neighbor::Cell(c) => block.copy_from_slice(field.block(c, l)),
                Neighbor::Fixed(u) => {
                    block.iter_mut().for_each(|b| *b = ConservedState::zero());
                    block[0] = u;
                }
            }
        }
    };
    let jo = usize::from(two_d);
    for i in 0..nx {
        for j in 0..ny {
            fill(&mut out, (i + 1) * py + j + jo, Neighbor::Cell(grid.index(i, j)));
        }
    }
    for j in 0..ny {
        fill(&mut out, j + jo, grid.neighbor(grid.index(0, j), Direction::X, Side::Low));
        fill(&mut out, (nx + 1) * py + j + jo, grid.neighbor(grid.index(nx - 1, j), Direction::X, Side::High));
    }
    if two_d {
        for i in 0..nx {
            fill(&mut out, (i + 1) * py, grid.neighbor(grid.index(i, 0), Direction::Y, Side::Low));
            fill(&mut out, (i + 1) * py + ny + 1, grid.neighbor(grid.index(i, ny - 1), Direction::Y, Side::High));
        }
        // Corners never enter a face stencil; copy the nearest interior cell.
        for (ci, cj, src) in [
            (0, 0, grid.index(0, 0)),
            (0, ny + 1, grid.index(0, ny - 1)),
            (nx + 1, 0, grid.index(nx - 1, 0)),
            (nx + 1, ny + 1, grid.index(nx - 1, ny - 1)),
        ] {
            fill(&mut out, ci * py + cj, Neighbor::Cell(src));
        }
    }
    GhostedField {
        shape: (px, py),
        field: out,
    }
}

/// Number of faces normal to `dir`.
fn face_layout<const N: usize>(grid: &StructuredGrid<N>, dir: Direction) -> usize {
    match dir {
        Direction::X => (grid.nx() + 1) * grid.ny(),
        Direction::Y => grid.nx() * (grid.ny() + 1),
    }
}

fn face_neighbors<const N: usize>(grid: &StructuredGrid<N>, dir: Direction, face: usize) -> (Neighbor<N>, Neighbor<N>) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let (pos, n, at): (usize, usize, Box<dyn Fn(usize) -> usize + '_>) = match dir {
        Direction::X => {
            let (i, j) = (face / ny, face % ny);
            (i, nx, Box::new(move |p| grid.index(p, j)))
        }
        Direction::Y => {
            let (i, j) = (face / (ny + 1), face % (ny + 1));
            (j, ny, Box::new(move |p| grid.index(i, p)))
        }
    };
    let left = if pos > 0 {
        Neighbor::Cell(at(pos - 1))
    } else {
        grid.neighbor(at(0), dir, Side::Low)
    };
    let right = if pos < n {
        Neighbor::Cell(at(pos))
    } else {
        grid.neighbor(at(n - 1), dir, Side::High)
    };
    (left, right)
}

/// Projected numerical fluxes `⟨F̂(u_L(ξ), u_R(ξ)) φ_k⟩_l` on every face normal to `dir`,
/// laid out `[face][element][mode]`.
fn face_flux_moments<const N: usize>(
    nodes: &NodeField<N>,
    disc: &Discretization<N>,
    dir: Direction,
    lambda_max: f64,
) -> Vec<ConservedState<N>> {
    let basis = &disc.basis;
    let (ne, nm, nq) = (basis.n_elements(), basis.n_modes(), basis.n_nodes());
    let n_faces = face_layout(&disc.grid, dir);
    let mut out = vec![ConservedState::zero(); n_faces * ne * nm];
    let weights = basis.weights();
    out.par_chunks_mut(ne * nm).enumerate().for_each(|(face, chunk)| {
        let (left, right) = face_neighbors(&disc.grid, dir, face);
        for l in 0..ne {
            let proj = &mut chunk[l * nm..(l + 1) * nm];
            for q in 0..nq {
                let ul = match left {
                    Neighbor::Cell(c) => nodes.block(c, l)[q],
                    Neighbor::Fixed(u) => u,
                };
                let ur = match right {
                    Neighbor::Cell(c) => nodes.block(c, l)[q],
                    Neighbor::Fixed(u) => u,
                };
                let f = disc.flux.eval_unchecked(&disc.model, &ul, &ur, dir, lambda_max);
                let w = weights[q];
                for (p, &phi) in proj.iter_mut().zip(basis.phi_at_node(q)) {
                    p.add_scaled(w * phi, &f);
                }
            }
        }
    });
    out
}

/// One forward-Euler finite-volume step of the moment system: the numerical flux is
/// evaluated pointwise at the quadrature nodes from `nodes` (admissible states of every
/// cell and element) and projected onto the local basis.
pub fn advance_moments<const N: usize>(
    moments: &MomentField<N>,
    nodes: &NodeField<N>,
    disc: &Discretization<N>,
    step: &TimeStep,
) -> MomentField<N> {
    let grid = &disc.grid;
    let (ne, nm) = (moments.n_elements(), moments.n_modes());
    let dirs = Direction::all(grid.dims());
    let faces: Vec<Vec<ConservedState<N>>> = dirs
        .iter()
        .map(|&d| face_flux_moments(nodes, disc, d, step.lambda[d.index()]))
        .collect();
    let ny = grid.ny();
    let mut next = moments.clone();
    next.as_mut_slice()
        .par_chunks_mut(ne * nm)
        .enumerate()
        .for_each(|(cell, block)| {
            let (i, j) = grid.ij(cell);
            for (&d, face) in dirs.iter().zip(&faces) {
                let ratio = step.dt / grid.spacing(d);
                let (lo, hi) = match d {
                    Direction::X => (i * ny + j, (i + 1) * ny + j),
                    Direction::Y => (i * (ny + 1) + j, i * (ny + 1) + j + 1),
                };
                let f_lo = &face[lo * ne * nm..(lo + 1) * ne * nm];
                let f_hi = &face[hi * ne * nm..(hi + 1) * ne * nm];
                for ((u, a), b) in block.iter_mut().zip(f_hi).zip(f_lo) {
                    let diff = *a - *b;
                    u.add_scaled(-ratio, &diff);
                }
            }
        });
    next
}

/// Total of the zeroth density moment weighted by element probability and cell volume.
pub fn total_mass<const N: usize>(moments: &MomentField<N>, basis: &GpcBasis, grid: &StructuredGrid<N>) -> f64 {
    let probs = basis.element_probabilities();
    let mut total = 0.0;
    for cell in 0..moments.n_cells() {
        for (l, p) in probs.iter().enumerate() {
            total += p * moments.block(cell, l)[0][0];
        }
    }
    total * grid.cell_volume()
}
