//! Multi-element stochastic Galerkin with the hyperbolicity-preserving limiter and
//! optional modal filtering.

mod filter;
mod limiter;

pub use filter::{apply_filter, filter_gain, FilterConfig, FilterKind};
pub use limiter::{apply_limiter, limit_block, limiter_theta, theta_star, LimiterConfig, LimiterStats};

use std::time::Instant;

use rayon::prelude::*;

use crate::basis::GpcBasis;
use crate::error::{Error, Result};
use crate::euler::GasModel;
use crate::fv::{
    advance_moments, cfl_time_step, truncate_to_end, Discretization, MomentField, NodeField, PhaseTimings,
    TimeStep,
};

/// Point values of every (cell, element) polynomial at the quadrature nodes.
pub fn reconstruct_nodes<const N: usize>(moments: &MomentField<N>, basis: &GpcBasis) -> NodeField<N> {
    let nm = moments.n_modes();
    let nq = basis.n_nodes();
    let mut nodes = NodeField::zeros(moments.n_cells(), moments.n_elements(), nq);
    nodes
        .as_mut_slice()
        .par_chunks_exact_mut(nq)
        .zip(moments.as_slice().par_chunks_exact(nm))
        .for_each(|(out, coeffs)| basis.reconstruct_into(coeffs, out));
    nodes
}

/// One forward-Euler step of the SG moment system. Node states must be admissible.
pub fn sg_rhs<const N: usize>(
    moments: &MomentField<N>,
    disc: &Discretization<N>,
    step: &TimeStep,
) -> Result<MomentField<N>> {
    let nodes = reconstruct_nodes(moments, &disc.basis);
    check_nodes(&nodes, &disc.model)?;
    Ok(advance_moments(moments, &nodes, disc, step))
}

fn check_nodes<const N: usize>(nodes: &NodeField<N>, model: &GasModel) -> Result<()> {
    let nq = nodes.stride();
    let ne = nodes.n_elements();
    match nodes.as_slice().iter().position(|u| !model.is_admissible(u)) {
        None => Ok(()),
        Some(pos) => {
            let block = pos / nq;
            Err(Error::inadmissible(
                &nodes.as_slice()[pos],
                format!("quadrature node {} of cell {}, element {}", pos % nq, block / ne, block % ne),
            ))
        }
    }
}

pub(crate) fn check_means<const N: usize>(moments: &MomentField<N>, model: &GasModel, step: usize) -> Result<()> {
    let ne = moments.n_elements();
    for (idx, block) in moments.blocks().enumerate() {
        if !model.is_admissible(&block[0]) {
            return Err(Error::inadmissible(
                &block[0],
                format!("cell mean of cell {}, element {} after step {step}", idx / ne, idx % ne),
            ));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgConfig {
    pub limiter: LimiterConfig,
    pub filter: FilterConfig,
    pub t_end: f64,
    /// Stop after this many steps even if `t_end` is not reached.
    pub max_steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SgStats {
    pub steps: usize,
    pub limited_blocks: usize,
    pub max_theta: f64,
    pub timings: PhaseTimings,
}

#[derive(Debug, Clone)]
pub struct SgOutcome<const N: usize> {
    pub moments: MomentField<N>,
    pub time: f64,
    pub stats: SgStats,
}

/// Callback invoked after every completed step with `(step, time, moments)`.
pub type Observer<'a, const N: usize> = dyn FnMut(usize, f64, &MomentField<N>) + 'a;

/// Time loop: filter, limit, FV update, with CFL-controlled steps landing exactly on `t_end`.
///
/// The filter strength depends on `Δt`, which in turn depends on the limited states,
/// so with filtering enabled the step is estimated on a limited copy first and then
/// re-checked on the states actually fed to the fluxes.
pub fn run_fhsg<const N: usize>(
    initial: MomentField<N>,
    disc: &Discretization<N>,
    config: &SgConfig,
    mut observer: Option<&mut Observer<'_, N>>,
) -> Result<SgOutcome<N>> {
    config.filter.validate()?;
    let basis = &disc.basis;
    if initial.n_modes() != basis.n_modes() || initial.n_elements() != basis.n_elements() {
        return Err(Error::invalid("initial moments do not match the basis"));
    }
    if initial.n_cells() != disc.grid.n_cells() {
        return Err(Error::invalid("initial moments do not match the grid"));
    }
    check_means(&initial, &disc.model, 0)?;

    let filtering = config.filter.kind != FilterKind::None;
    let mut moments = initial;
    let mut stats = SgStats::default();
    let mut time = 0.0;
    while time < config.t_end && config.max_steps.is_none_or(|m| stats.steps < m) {
        let t0 = Instant::now();
        let (nodes, step, last) = if filtering {
            let mut probe = moments.clone();
            apply_limiter(&mut probe, basis, &disc.model, &config.limiter)?;
            let probe_nodes = reconstruct_nodes(&probe, basis);
            let estimate = cfl_time_step(probe_nodes.as_slice(), &disc.grid, &disc.model, disc.cfl)?;
            let (estimate, _) = truncate_to_end(estimate, time, config.t_end);

            apply_filter(&mut moments, &config.filter, estimate.dt);
            let ls = apply_limiter(&mut moments, basis, &disc.model, &config.limiter)?;
            stats.limited_blocks += ls.limited_blocks;
            stats.max_theta = stats.max_theta.max(ls.max_theta);
            let nodes = reconstruct_nodes(&moments, basis);
            check_nodes(&nodes, &disc.model)?;
            let actual = cfl_time_step(nodes.as_slice(), &disc.grid, &disc.model, disc.cfl)?;
            let merged = TimeStep {
                dt: estimate.dt.min(actual.dt),
                lambda: [
                    estimate.lambda[0].max(actual.lambda[0]),
                    estimate.lambda[1].max(actual.lambda[1]),
                ],
            };
            let (step, last) = truncate_to_end(merged, time, config.t_end);
            (nodes, step, last)
        } else {
            let ls = apply_limiter(&mut moments, basis, &disc.model, &config.limiter)?;
            stats.limited_blocks += ls.limited_blocks;
            stats.max_theta = stats.max_theta.max(ls.max_theta);
            let nodes = reconstruct_nodes(&moments, basis);
            check_nodes(&nodes, &disc.model)?;
            let ts = cfl_time_step(nodes.as_slice(), &disc.grid, &disc.model, disc.cfl)?;
            let (step, last) = truncate_to_end(ts, time, config.t_end);
            (nodes, step, last)
        };
        stats.timings.limiter_filter += t0.elapsed();

        let t1 = Instant::now();
        moments = advance_moments(&moments, &nodes, disc, &step);
        stats.timings.flux += t1.elapsed();

        stats.steps += 1;
        check_means(&moments, &disc.model, stats.steps)?;
        time = if last { config.t_end } else { time + step.dt };
        if let Some(obs) = observer.as_mut() {
            obs(stats.steps, time, &moments);
        }
    }
    Ok(SgOutcome { moments, time, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::ElementPartition;
    use crate::euler::State1;
    use crate::fv::{run_deterministic, BoundaryCondition, NumericalFlux, StructuredGrid};

    const GAS: GasModel = GasModel { gamma: 1.4 };

    fn disc(cells: usize, ne: usize, k: usize, bc: BoundaryCondition<3>) -> Discretization<3> {
        Discretization {
            grid: StructuredGrid::new_1d(cells, 0.0, 1.0, bc, bc).unwrap(),
            basis: GpcBasis::with_default_quadrature(ElementPartition::uniform(-1.0, 1.0, ne).unwrap(), k).unwrap(),
            model: GAS,
            flux: NumericalFlux::Hll,
            cfl: 0.9,
        }
    }

    fn sod_means(cells: usize) -> Vec<State1> {
        (0..cells)
            .map(|i| {
                if (i as f64 + 0.5) / cells as f64 <= 0.5 {
                    State1::new_1d(1.0, 0.0, 2.5)
                } else {
                    State1::new_1d(0.125, 0.0, 0.25)
                }
            })
            .collect()
    }

    fn no_filter(t_end: f64) -> SgConfig {
        SgConfig {
            limiter: LimiterConfig::default(),
            filter: FilterConfig::none(),
            t_end,
            max_steps: None,
        }
    }

    #[test]
    fn degree_zero_single_element_is_deterministic_fv() {
        let d = disc(50, 1, 0, BoundaryCondition::Transmissive);
        let means = sod_means(50);
        let mut m = MomentField::zeros(50, 1, 1);
        for (c, u) in means.iter().enumerate() {
            m.block_mut(c, 0)[0] = *u;
        }
        let sg = run_fhsg(m, &d, &no_filter(0.1), None).unwrap();
        let det = run_deterministic(means, &d.grid, &GAS, NumericalFlux::Hll, 0.9, 0.1).unwrap();
        assert_eq!(sg.stats.steps, det.steps);
        for (c, u) in det.states.iter().enumerate() {
            assert!((sg.moments.block(c, 0)[0] - *u).max_abs() < 1e-13);
        }
    }

    #[test]
    fn zero_end_time_returns_initial() {
        let d = disc(10, 2, 2, BoundaryCondition::Transmissive);
        let mut m = MomentField::zeros(10, 2, 3);
        for b in m.blocks_mut() {
            b[0] = State1::new_1d(1.0, 0.1, 2.5);
            b[1] = State1::new_1d(0.5, 0.0, 0.1);
        }
        let cfg = SgConfig {
            filter: FilterConfig::default(),
            ..no_filter(0.0)
        };
        let out = run_fhsg(m.clone(), &d, &cfg, None).unwrap();
        assert_eq!(out.moments, m);
        assert_eq!(out.stats.steps, 0);
    }

    #[test]
    fn observer_sees_every_step_and_final_time() {
        let d = disc(20, 1, 1, BoundaryCondition::Transmissive);
        let mut m = MomentField::zeros(20, 1, 2);
        for (c, u) in sod_means(20).iter().enumerate() {
            m.block_mut(c, 0)[0] = *u;
        }
        let mut seen = Vec::new();
        let mut obs = |s: usize, t: f64, _: &MomentField<3>| seen.push((s, t));
        let out = run_fhsg(m, &d, &no_filter(0.05), Some(&mut obs)).unwrap();
        assert_eq!(seen.len(), out.stats.steps);
        assert_eq!(seen.last().unwrap().1, 0.05);
    }

    #[test]
    fn disabled_limiter_reports_inadmissible_nodes() {
        let d = disc(4, 1, 1, BoundaryCondition::Periodic);
        let mut m = MomentField::zeros(4, 1, 2);
        for b in m.blocks_mut() {
            b[0] = State1::new_1d(1.0, 0.0, 2.5);
            b[1] = State1::new_1d(2.0, 0.0, 0.0);
        }
        let cfg = SgConfig {
            limiter: LimiterConfig {
                enabled: false,
                epsilon: 1e-10,
            },
            ..no_filter(0.1)
        };
        assert!(matches!(run_fhsg(m.clone(), &d, &cfg, None), Err(Error::Inadmissible { .. })));
        let out = run_fhsg(m, &d, &no_filter(0.1), None).unwrap();
        assert!(out.stats.limited_blocks > 0);
    }
}
