//! Plain first-order finite-volume solver for one realization of ξ.

use rayon::prelude::*;

use super::{cfl_time_step, truncate_to_end, Neighbor, NumericalFlux, Side, StructuredGrid, TimeStep};
use crate::error::{Error, Result};
use crate::euler::{ConservedState, Direction, GasModel};

#[derive(Debug, Clone)]
pub struct DeterministicRun<const N: usize> {
    pub states: Vec<ConservedState<N>>,
    pub steps: usize,
    pub time: f64,
}

fn state_of<const N: usize>(states: &[ConservedState<N>], n: Neighbor<N>) -> ConservedState<N> {
    match n {
        Neighbor::Cell(c) => states[c],
        Neighbor::Fixed(u) => u,
    }
}

/// One forward-Euler step on cell means.
pub fn advance_deterministic<const N: usize>(
    states: &[ConservedState<N>],
    grid: &StructuredGrid<N>,
    model: &GasModel,
    flux: NumericalFlux,
    step: &TimeStep,
) -> Vec<ConservedState<N>> {
    let dirs = Direction::all(grid.dims());
    states
        .par_iter()
        .enumerate()
        .map(|(cell, u)| {
            let mut next = *u;
            for &d in dirs {
                let lam = step.lambda[d.index()];
                let lo = state_of(states, grid.neighbor(cell, d, Side::Low));
                let hi = state_of(states, grid.neighbor(cell, d, Side::High));
                let f_hi = flux.eval_unchecked(model, u, &hi, d, lam);
                let f_lo = flux.eval_unchecked(model, &lo, u, d, lam);
                next.add_scaled(-step.dt / grid.spacing(d), &(f_hi - f_lo));
            }
            next
        })
        .collect()
}

/// Advances `initial` to `t_end` with CFL-controlled steps; the last step is
/// shortened to land on `t_end`.
pub fn run_deterministic<const N: usize>(
    initial: Vec<ConservedState<N>>,
    grid: &StructuredGrid<N>,
    model: &GasModel,
    flux: NumericalFlux,
    cfl: f64,
    t_end: f64,
) -> Result<DeterministicRun<N>> {
    if initial.len() != grid.n_cells() {
        return Err(Error::invalid("initial data does not match grid"));
    }
    let mut states = initial;
    let mut time = 0.0;
    let mut steps = 0;
    while time < t_end {
        let (ts, last) = truncate_to_end(cfl_time_step(&states, grid, model, cfl)?, time, t_end);
        states = advance_deterministic(&states, grid, model, flux, &ts);
        if let Some(bad) = states.iter().find(|u| !model.is_admissible(u)) {
            return Err(Error::inadmissible(bad, format!("deterministic step {steps}")));
        }
        time = if last { t_end } else { time + ts.dt };
        steps += 1;
    }
    Ok(DeterministicRun { states, steps, time })
}
