//! Runs a [`RunConfig`]: projects the initial data, advances the selected method,
//! computes statistics and reference errors, and writes the output files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::basis::{ElementPartition, GpcBasis};
use crate::config::{BoundaryKind, Method, ReferenceKind, RunConfig};
use crate::error::{Error, Result};
use crate::euler::{ConservedState, GasModel};
use crate::fv::{Axis, BoundaryCondition, Discretization, MomentField, NodeField, PhaseTimings, StructuredGrid};
use crate::ipm::{run_meipm, IpmConfig};
use crate::reference::{collocation_reference, sod_reference_statistics, ReferenceOptions};
use crate::sg::{run_fhsg, FilterConfig, SgConfig};
use crate::stats::{moment_statistics, relative_errors, FieldStatistics};

/// Pointwise initial values at the quadrature nodes of every (cell, element) and
/// their projection onto the basis.
pub fn project_initial_data<const N: usize>(
    initial: impl Fn(usize, f64) -> ConservedState<N> + Sync,
    basis: &GpcBasis,
    n_cells: usize,
    model: &GasModel,
) -> Result<(MomentField<N>, NodeField<N>)> {
    let ne = basis.n_elements();
    let nq = basis.n_nodes();
    let nm = basis.n_modes();
    let mut samples = NodeField::zeros(n_cells, ne, nq);
    samples
        .as_mut_slice()
        .par_chunks_exact_mut(nq)
        .enumerate()
        .for_each(|(idx, out)| {
            let (cell, l) = (idx / ne, idx % ne);
            for (o, &xi) in out.iter_mut().zip(basis.nodes(l)) {
                *o = initial(cell, xi);
            }
        });
    let mut moments = MomentField::zeros(n_cells, ne, nm);
    moments
        .as_mut_slice()
        .par_chunks_exact_mut(nm)
        .zip(samples.as_slice().par_chunks_exact(nq))
        .for_each(|(m, s)| basis.project_into(s, m));
    for (idx, block) in moments.blocks().enumerate() {
        if !model.is_admissible(&block[0]) {
            return Err(Error::inadmissible(
                &block[0],
                format!("projected initial mean of cell {}, element {}", idx / ne, idx % ne),
            ));
        }
    }
    Ok((moments, samples))
}

/// Basis described by the configuration (one element for collocation).
pub fn build_basis(config: &RunConfig) -> Result<GpcBasis> {
    let (lo, hi) = config.problem.xi_range();
    let partition = ElementPartition::uniform(lo, hi, config.basis.elements)?;
    GpcBasis::new(partition, config.basis.degree, config.basis.quadrature)
}

pub fn build_grid_1d(config: &RunConfig) -> Result<StructuredGrid<3>> {
    let bc = match config.grid.boundary {
        BoundaryKind::Transmissive => BoundaryCondition::Transmissive,
        BoundaryKind::Periodic => BoundaryCondition::Periodic,
    };
    StructuredGrid::new_1d(config.grid.nx, config.grid.x.0, config.grid.x.1, bc, bc)
}

pub fn build_grid_2d(config: &RunConfig) -> Result<StructuredGrid<4>> {
    let bc = match config.grid.boundary {
        BoundaryKind::Transmissive => BoundaryCondition::Transmissive,
        BoundaryKind::Periodic => BoundaryCondition::Periodic,
    };
    let x = Axis::new(config.grid.nx, config.grid.x.0, config.grid.x.1)?;
    let y = Axis::new(config.grid.ny, config.grid.y.0, config.grid.y.1)?;
    Ok(StructuredGrid::new_2d(x, y, bc))
}

/// Everything a run reports.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub statistics: FieldStatistics,
    pub reference: Option<FieldStatistics>,
    /// Relative L2 errors of `E[ρ]` and `Var[ρ]` against the reference.
    pub errors: Option<(f64, f64)>,
    pub final_time: f64,
    pub steps: usize,
    pub wall: Duration,
    pub timings: PhaseTimings,
    pub newton_iterations: usize,
    pub max_dual_residual: f64,
    pub limited_blocks: usize,
    pub max_theta: f64,
}

struct MethodResult {
    statistics: FieldStatistics,
    final_time: f64,
    steps: usize,
    timings: PhaseTimings,
    newton_iterations: usize,
    max_dual_residual: f64,
    limited_blocks: usize,
    max_theta: f64,
}

fn run_method<const N: usize>(
    config: &RunConfig,
    grid: StructuredGrid<N>,
    initial: impl Fn(usize, f64) -> ConservedState<N> + Sync,
) -> Result<MethodResult> {
    let model = config.problem.model();
    if config.method == Method::Collocation {
        let (lo, hi) = config.problem.xi_range();
        let t0 = Instant::now();
        let statistics = collocation_reference(
            &initial,
            &ElementPartition::uniform(lo, hi, 1)?,
            &grid,
            &model,
            config.flux,
            config.cfl,
            config.t_end,
            config.collocation_nodes,
        )?;
        return Ok(MethodResult {
            statistics,
            final_time: config.t_end,
            steps: 0,
            timings: PhaseTimings {
                flux: t0.elapsed(),
                ..PhaseTimings::default()
            },
            newton_iterations: 0,
            max_dual_residual: 0.0,
            limited_blocks: 0,
            max_theta: 0.0,
        });
    }

    let basis = build_basis(config)?;
    let (moments, samples) = project_initial_data(initial, &basis, grid.n_cells(), &model)?;
    let disc = Discretization {
        grid,
        basis,
        model,
        flux: config.flux,
        cfl: config.cfl,
    };
    if config.method.is_ipm() {
        let out = run_meipm(
            moments,
            &samples,
            &disc,
            &IpmConfig {
                newton: config.newton,
                t_end: config.t_end,
                max_steps: None,
                variable_map: config.variable_map,
            },
            None,
        )?;
        Ok(MethodResult {
            statistics: moment_statistics(&out.moments, &disc.basis, &disc.grid),
            final_time: out.time,
            steps: out.stats.steps,
            timings: out.stats.timings,
            newton_iterations: out.stats.newton_iterations,
            max_dual_residual: out.stats.max_residual,
            limited_blocks: 0,
            max_theta: 0.0,
        })
    } else {
        let filter = if config.method.is_filtered() {
            config.filter
        } else {
            FilterConfig::none()
        };
        let out = run_fhsg(
            moments,
            &disc,
            &SgConfig {
                limiter: config.limiter,
                filter,
                t_end: config.t_end,
                max_steps: None,
            },
            None,
        )?;
        Ok(MethodResult {
            statistics: moment_statistics(&out.moments, &disc.basis, &disc.grid),
            final_time: out.time,
            steps: out.stats.steps,
            timings: out.stats.timings,
            newton_iterations: 0,
            max_dual_residual: 0.0,
            limited_blocks: out.stats.limited_blocks,
            max_theta: out.stats.max_theta,
        })
    }
}

fn reference_for<const N: usize>(
    config: &RunConfig,
    grid: &StructuredGrid<N>,
    initial: impl Fn(usize, f64) -> ConservedState<N> + Sync,
    exact: impl FnOnce(usize, usize) -> Result<FieldStatistics>,
) -> Result<Option<FieldStatistics>> {
    match config.reference.kind {
        ReferenceKind::None => Ok(None),
        ReferenceKind::Exact {
            nodes_per_piece,
            subcells,
        } => exact(nodes_per_piece, subcells).map(Some),
        ReferenceKind::Collocation { nodes } => {
            let (lo, hi) = config.problem.xi_range();
            collocation_reference(
                initial,
                &ElementPartition::uniform(lo, hi, 1)?,
                grid,
                &config.problem.model(),
                config.flux,
                config.cfl,
                config.t_end,
                nodes,
            )
            .map(Some)
        }
    }
}

/// Runs the configured method and, if configured, the reference.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let problem = config.problem;
    let t0 = Instant::now();
    let (result, reference) = if problem.dims() == 1 {
        let grid = build_grid_1d(config)?;
        let centers: Vec<f64> = (0..grid.n_cells()).map(|c| grid.center(c).0).collect();
        let initial = |cell: usize, xi: f64| problem.initial_1d(centers[cell], xi);
        let result = run_method(config, grid.clone(), initial)?;
        let wall = t0.elapsed();
        let reference = reference_for(config, &grid, initial, |nodes_per_piece, subcells| {
            let rp = problem
                .riemann_1d()
                .ok_or_else(|| Error::invalid("exact reference needs 1D Riemann data"))?;
            sod_reference_statistics(
                rp,
                &grid,
                config.t_end,
                &ReferenceOptions {
                    nodes_per_piece,
                    subcells,
                },
            )
        })?;
        ((result, wall), reference)
    } else {
        let grid = build_grid_2d(config)?;
        let centers: Vec<(f64, f64)> = (0..grid.n_cells()).map(|c| grid.center(c)).collect();
        let initial = |cell: usize, xi: f64| problem.initial_2d(centers[cell].0, centers[cell].1, xi);
        let result = run_method(config, grid.clone(), initial)?;
        let wall = t0.elapsed();
        let reference = reference_for(config, &grid, initial, |_, _| {
            Err(Error::invalid("exact reference needs 1D Riemann data"))
        })?;
        ((result, wall), reference)
    };
    let (result, wall) = result;
    let errors = match &reference {
        Some(r) => Some(relative_errors(&result.statistics, r, 0, config.reference.window.as_ref())?),
        None => None,
    };
    Ok(RunOutcome {
        statistics: result.statistics,
        reference,
        errors,
        final_time: result.final_time,
        steps: result.steps,
        wall,
        timings: result.timings,
        newton_iterations: result.newton_iterations,
        max_dual_residual: result.max_dual_residual,
        limited_blocks: result.limited_blocks,
        max_theta: result.max_theta,
    })
}

/// Header of the errors CSV.
pub const ERRORS_HEADER: &str = "method,K,N_Xi,cells,errE_rho,errVar_rho,wall_s,dual_solve_s";

/// One row of the errors CSV; error fields are empty without a reference.
pub fn errors_row(config: &RunConfig, outcome: &RunOutcome) -> String {
    let (e, v) = match outcome.errors {
        Some((e, v)) => (format!("{e:.10e}"), format!("{v:.10e}")),
        None => (String::new(), String::new()),
    };
    let (k, ne) = if config.method == Method::Collocation {
        (0, 1)
    } else {
        (config.basis.degree, config.basis.elements)
    };
    format!(
        "{},{},{},{},{},{},{:.6},{:.6}",
        config.method,
        k,
        ne,
        outcome.statistics.n_cells(),
        e,
        v,
        outcome.wall.as_secs_f64(),
        outcome.timings.dual_solve.as_secs_f64()
    )
}

/// Plain-text `key: value` report.
pub fn report(config: &RunConfig, outcome: &RunOutcome) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| writeln!(s, "{k}: {v}").unwrap();
    kv("problem", config.problem.name().into());
    kv("method", config.method.to_string());
    kv("cells", outcome.statistics.n_cells().to_string());
    kv("elements", config.basis.elements.to_string());
    kv("degree", config.basis.degree.to_string());
    kv("quadrature_nodes", config.basis.quadrature.node_count().to_string());
    kv("flux", format!("{:?}", config.flux).to_lowercase());
    kv("cfl", config.cfl.to_string());
    kv("t_end", config.t_end.to_string());
    kv("final_time", outcome.final_time.to_string());
    kv("steps", outcome.steps.to_string());
    kv("wall_s", format!("{:.6}", outcome.wall.as_secs_f64()));
    kv("flux_s", format!("{:.6}", outcome.timings.flux.as_secs_f64()));
    kv("limiter_filter_s", format!("{:.6}", outcome.timings.limiter_filter.as_secs_f64()));
    kv("dual_solve_s", format!("{:.6}", outcome.timings.dual_solve.as_secs_f64()));
    if config.method.is_ipm() {
        kv("newton_iterations", outcome.newton_iterations.to_string());
        kv("max_dual_residual", format!("{:.3e}", outcome.max_dual_residual));
    } else if config.method != Method::Collocation {
        kv("limited_blocks", outcome.limited_blocks.to_string());
        kv("max_theta", format!("{:.6e}", outcome.max_theta));
    }
    kv("clamped_variances", outcome.statistics.clamped.to_string());
    if let Some((e, v)) = outcome.errors {
        kv("errE_rho", format!("{e:.6e}"));
        kv("errVar_rho", format!("{v:.6e}"));
    }
    s
}

/// Files written by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub statistics: PathBuf,
    pub report: PathBuf,
    pub reference: Option<PathBuf>,
}

/// Writes the statistics CSV, the reference CSV (if any) and the report into `dir`.
pub fn write_outputs(config: &RunConfig, outcome: &RunOutcome, dir: &Path) -> Result<OutputPaths> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let statistics = dir.join(&config.output.statistics);
    crate::stats::write_csv(&outcome.statistics, &statistics)?;
    let reference = match &outcome.reference {
        Some(r) => {
            let p = dir.join("reference.csv");
            crate::stats::write_csv(r, &p)?;
            Some(p)
        }
        None => None,
    };
    let report_path = dir.join(&config.output.report);
    let mut text = report(config, outcome);
    writeln!(text, "statistics_csv: {}", statistics.display()).unwrap();
    std::fs::write(&report_path, text).map_err(io(&report_path))?;
    Ok(OutputPaths {
        statistics,
        report: report_path,
        reference,
    })
}
