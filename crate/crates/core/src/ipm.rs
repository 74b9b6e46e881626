//! Multi-element intrusive polynomial moment method.
//!
//! The entropic variable `Λ = ∇s(u)` is expanded in the local gPC basis of each
//! element; the state is recovered as `u(ξ) = (∇s)^{-1}(Λ(ξ))`, which is admissible
//! for every dual vector in range. Dual coefficients are found per (cell, element) by
//! minimizing the convex dual objective
//!
//! ```text
//! f(λ) = Σ_q w_q s*(Λ(ξ_q)) - Σ_k λ_k · û_k,
//! ```
//!
//! whose gradient is minus the moment mismatch and whose Hessian is
//! `Σ_q w_q φ_k φ_j ∂u/∂Λ(ξ_q)`.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::basis::GpcBasis;
use crate::error::{Error, Result};
use crate::euler::{ConservedState, GasModel};
use crate::fv::{advance_moments, cfl_time_step, truncate_to_end, Discretization, MomentField, NodeField, PhaseTimings};
use crate::sg::check_means;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Tolerance on the max-norm of the moment mismatch.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-7,
            max_iterations: 100,
            max_halvings: 50,
            armijo: 1e-4,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid(format!("Newton tolerance {} must be positive", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("Newton needs at least one iteration"));
        }
        Ok(())
    }
}

/// Convergence record of one (cell, element) dual problem.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveInfo {
    pub iterations: usize,
    pub residual: f64,
}

/// Dual coefficients laid out like a [`MomentField`], plus per-block convergence data.
#[derive(Debug, Clone, PartialEq)]
pub struct DualField<const N: usize> {
    pub coeffs: MomentField<N>,
    pub info: Vec<SolveInfo>,
}

impl<const N: usize> DualField<N> {
    pub fn total_iterations(&self) -> usize {
        self.info.iter().map(|i| i.iterations).sum()
    }

    pub fn max_residual(&self) -> f64 {
        self.info.iter().map(|i| i.residual).fold(0.0, f64::max)
    }
}

/// `Λ(ξ_q) = Σ_k λ_k φ_k(t_q)`.
#[inline]
fn dual_at_node<const N: usize>(lam: &[ConservedState<N>], basis: &GpcBasis, q: usize) -> ConservedState<N> {
    let mut d = ConservedState::zero();
    for (c, &p) in lam.iter().zip(basis.phi_at_node(q)) {
        d.add_scaled(p, c);
    }
    d
}

/// Moments of the ansatz, `Σ_q w_q u(Λ(ξ_q)) φ_k(t_q)`.
pub fn ansatz_moments<const N: usize>(
    lam: &[ConservedState<N>],
    basis: &GpcBasis,
    model: &GasModel,
) -> Result<Vec<ConservedState<N>>> {
    let mut out = vec![ConservedState::zero(); lam.len()];
    for (q, &w) in basis.weights().iter().enumerate() {
        let u = model.entropy_gradient_inverse(&dual_at_node(lam, basis, q))?;
        for (o, &p) in out.iter_mut().zip(basis.phi_at_node(q)) {
            o.add_scaled(w * p, &u);
        }
    }
    Ok(out)
}

/// `û_k - Σ_q w_q u(Λ(ξ_q)) φ_k(t_q)` for one (cell, element).
pub fn dual_residual<const N: usize>(
    lam: &[ConservedState<N>],
    moments: &[ConservedState<N>],
    basis: &GpcBasis,
    model: &GasModel,
) -> Result<Vec<ConservedState<N>>> {
    if lam.len() != moments.len() || lam.len() != basis.n_modes() {
        return Err(Error::invalid("dual and moment blocks must have one entry per mode"));
    }
    let mut r = ansatz_moments(lam, basis, model)?;
    for (ri, m) in r.iter_mut().zip(moments) {
        *ri = *m - *ri;
    }
    Ok(r)
}

/// Newton matrix `H[(k,a),(j,b)] = Σ_q w_q φ_k φ_j (∂u/∂Λ)_{ab}` at `lam`.
pub fn dual_hessian<const N: usize>(lam: &[ConservedState<N>], basis: &GpcBasis, model: &GasModel) -> Result<DMatrix<f64>> {
    let mut h = DMatrix::zeros(lam.len() * N, lam.len() * N);
    let mut r = vec![ConservedState::zero(); lam.len()];
    evaluate(lam, lam, basis, model, &mut r, &mut h)?;
    Ok(h)
}

/// Objective value, residual (into `r`) and Hessian (into `h`) at `lam`.
fn evaluate<const N: usize>(
    lam: &[ConservedState<N>],
    moments: &[ConservedState<N>],
    basis: &GpcBasis,
    model: &GasModel,
    r: &mut [ConservedState<N>],
    h: &mut DMatrix<f64>,
) -> Result<f64> {
    let nm = lam.len();
    r.copy_from_slice(moments);
    h.fill(0.0);
    let mut potential = 0.0;
    for (q, &w) in basis.weights().iter().enumerate() {
        let phi = basis.phi_at_node(q);
        let (u, jac) = model.entropy_gradient_inverse_with_jacobian(&dual_at_node(lam, basis, q))?;
        potential += w * (model.gamma - 1.0) * u.density();
        for (ri, &p) in r.iter_mut().zip(phi) {
            ri.add_scaled(-w * p, &u);
        }
        for k in 0..nm {
            for j in k..nm {
                let s = w * phi[k] * phi[j];
                for a in 0..N {
                    for b in 0..N {
                        h[(k * N + a, j * N + b)] += s * jac[a][b];
                    }
                }
            }
        }
    }
    for k in 0..nm {
        for j in 0..k {
            for a in 0..N {
                for b in 0..N {
                    h[(k * N + a, j * N + b)] = h[(j * N + b, k * N + a)];
                }
            }
        }
    }
    let linear: f64 = lam.iter().zip(moments).map(|(l, m)| dot(l, m)).sum();
    Ok(potential - linear)
}

#[inline]
fn dot<const N: usize>(a: &ConservedState<N>, b: &ConservedState<N>) -> f64 {
    a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum()
}

fn max_norm<const N: usize>(r: &[ConservedState<N>]) -> f64 {
    r.iter().map(|u| u.max_abs()).fold(0.0, f64::max)
}

struct BlockFailure {
    iterations: usize,
    residual: f64,
    reason: String,
}

/// Damped Newton iteration for one (cell, element) dual problem, in place.
fn newton_block<const N: usize>(
    lam: &mut [ConservedState<N>],
    moments: &[ConservedState<N>],
    basis: &GpcBasis,
    model: &GasModel,
    config: &NewtonConfig,
) -> std::result::Result<SolveInfo, BlockFailure> {
    let nm = lam.len();
    let dim = nm * N;
    let mut r = vec![ConservedState::zero(); nm];
    let mut h = DMatrix::zeros(dim, dim);
    let mut f = evaluate(lam, moments, basis, model, &mut r, &mut h).map_err(|e| BlockFailure {
        iterations: 0,
        residual: f64::INFINITY,
        reason: format!("initial guess out of range: {e}"),
    })?;
    let mut res = max_norm(&r);

    let mut trial = vec![ConservedState::zero(); nm];
    let mut r_trial = vec![ConservedState::zero(); nm];
    let mut h_trial = DMatrix::zeros(dim, dim);
    for it in 0..=config.max_iterations {
        if res <= config.tolerance {
            return Ok(SolveInfo {
                iterations: it,
                residual: res,
            });
        }
        if it == config.max_iterations {
            break;
        }
        let rhs = DVector::from_iterator(dim, r.iter().flat_map(|u| u.0));
        let chol = h.clone().cholesky().ok_or_else(|| BlockFailure {
            iterations: it,
            residual: res,
            reason: "Hessian is not positive definite".into(),
        })?;
        let d = chol.solve(&rhs);
        let slope = rhs.dot(&d);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..=config.max_halvings {
            for (k, t) in trial.iter_mut().enumerate() {
                for a in 0..N {
                    t.0[a] = lam[k].0[a] + alpha * d[k * N + a];
                }
            }
            if let Ok(ft) = evaluate(&trial, moments, basis, model, &mut r_trial, &mut h_trial) {
                let rt = max_norm(&r_trial);
                if rt.is_finite() && (ft <= f - config.armijo * alpha * slope || rt < res) {
                    lam.copy_from_slice(&trial);
                    std::mem::swap(&mut r, &mut r_trial);
                    std::mem::swap(&mut h, &mut h_trial);
                    f = ft;
                    res = rt;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(BlockFailure {
                iterations: it + 1,
                residual: res,
                reason: "line search found no acceptable step".into(),
            });
        }
    }
    Err(BlockFailure {
        iterations: config.max_iterations,
        residual: res,
        reason: "maximum iterations exceeded".into(),
    })
}

/// Duals of the constant ansatz `Λ ≡ ∇s(û_0)`.
pub fn constant_duals<const N: usize>(moments: &[ConservedState<N>], model: &GasModel) -> Result<Vec<ConservedState<N>>> {
    let mut lam = vec![ConservedState::zero(); moments.len()];
    lam[0] = model.entropy_gradient(&moments[0])?;
    Ok(lam)
}

/// Solves one (cell, element) problem starting from `lam`. Degree 0 uses the closed
/// form; otherwise a failed warm start is retried from the constant ansatz.
pub fn solve_block<const N: usize>(
    lam: &mut [ConservedState<N>],
    moments: &[ConservedState<N>],
    basis: &GpcBasis,
    model: &GasModel,
    config: &NewtonConfig,
) -> Result<SolveInfo> {
    let fail = |f: BlockFailure| Error::DualSolve {
        cell: 0,
        element: 0,
        iterations: f.iterations,
        residual: f.residual,
        reason: f.reason,
    };
    if lam.len() == 1 {
        lam[0] = model.entropy_gradient(&moments[0])?;
        return newton_block(lam, moments, basis, model, config).map_err(fail);
    }
    let warm: Vec<_> = lam.to_vec();
    match newton_block(lam, moments, basis, model, config) {
        Ok(info) => Ok(info),
        Err(first) => {
            let cold = constant_duals(moments, model)?;
            lam.copy_from_slice(&cold);
            match newton_block(lam, moments, basis, model, config) {
                Ok(info) => Ok(SolveInfo {
                    iterations: info.iterations + first.iterations,
                    ..info
                }),
                Err(second) => {
                    lam.copy_from_slice(&warm);
                    Err(fail(BlockFailure {
                        iterations: first.iterations + second.iterations,
                        residual: second.residual.min(first.residual),
                        reason: format!("warm start: {}; cold start: {}", first.reason, second.reason),
                    }))
                }
            }
        }
    }
}

/// Solves every (cell, element) dual problem independently, warm-started from `warm`.
pub fn solve_duals<const N: usize>(
    moments: &MomentField<N>,
    warm: &MomentField<N>,
    basis: &GpcBasis,
    model: &GasModel,
    config: &NewtonConfig,
) -> Result<DualField<N>> {
    config.validate()?;
    if moments.n_modes() != basis.n_modes() || warm.as_slice().len() != moments.as_slice().len() {
        return Err(Error::invalid("dual and moment fields differ in shape"));
    }
    let nm = moments.n_modes();
    let ne = moments.n_elements();
    let mut coeffs = warm.clone();
    let info = coeffs
        .as_mut_slice()
        .par_chunks_exact_mut(nm)
        .zip(moments.as_slice().par_chunks_exact(nm))
        .enumerate()
        .map(|(idx, (lam, m))| {
            solve_block(lam, m, basis, model, config).map_err(|e| match e {
                Error::DualSolve {
                    iterations,
                    residual,
                    reason,
                    ..
                } => Error::DualSolve {
                    cell: idx / ne,
                    element: idx % ne,
                    iterations,
                    residual,
                    reason,
                },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DualField { coeffs, info })
}

/// Initial duals: the projection of `∇s(u⁰)` at the nodes, refined by a solve against
/// the projected initial moments.
pub fn initial_duals<const N: usize>(
    samples: &NodeField<N>,
    moments: &MomentField<N>,
    basis: &GpcBasis,
    model: &GasModel,
    config: &NewtonConfig,
) -> Result<DualField<N>> {
    if samples.stride() != basis.n_nodes() || samples.n_cells() != moments.n_cells() {
        return Err(Error::invalid("initial samples do not match basis and moments"));
    }
    let nq = basis.n_nodes();
    let mut guess = MomentField::zeros(moments.n_cells(), moments.n_elements(), moments.n_modes());
    for (lam, nodes) in guess.blocks_mut().zip(samples.as_slice().chunks_exact(nq)) {
        let grads = nodes.iter().map(|u| model.entropy_gradient(u)).collect::<Result<Vec<_>>>()?;
        basis.project_into(&grads, lam);
    }
    solve_duals(moments, &guess, basis, model, config)
}

/// States `(∇s)^{-1}(Λ(ξ_q))` at the quadrature nodes of every (cell, element).
pub fn dual_nodes<const N: usize>(duals: &MomentField<N>, basis: &GpcBasis, model: &GasModel) -> Result<NodeField<N>> {
    let nm = duals.n_modes();
    let nq = basis.n_nodes();
    let mut nodes = NodeField::zeros(duals.n_cells(), duals.n_elements(), nq);
    nodes
        .as_mut_slice()
        .par_chunks_exact_mut(nq)
        .zip(duals.as_slice().par_chunks_exact(nm))
        .try_for_each(|(out, lam)| -> Result<()> {
            for (q, o) in out.iter_mut().enumerate() {
                *o = model.entropy_gradient_inverse(&dual_at_node(lam, basis, q))?;
            }
            Ok(())
        })?;
    Ok(nodes)
}

/// Moments of the IPM ansatz for every block.
pub fn moments_from_duals<const N: usize>(
    duals: &MomentField<N>,
    basis: &GpcBasis,
    model: &GasModel,
) -> Result<MomentField<N>> {
    let nodes = dual_nodes(duals, basis, model)?;
    let mut out = MomentField::zeros(duals.n_cells(), duals.n_elements(), duals.n_modes());
    let nq = basis.n_nodes();
    out.as_mut_slice()
        .par_chunks_exact_mut(duals.n_modes())
        .zip(nodes.as_slice().par_chunks_exact(nq))
        .for_each(|(m, u)| basis.project_into(u, m));
    Ok(out)
}

/// One forward-Euler step of the IPM system: fluxes are evaluated on the dual ansatz states.
pub fn ipm_rhs<const N: usize>(
    duals: &MomentField<N>,
    moments: &MomentField<N>,
    disc: &Discretization<N>,
    step: &crate::fv::TimeStep,
) -> Result<MomentField<N>> {
    let nodes = dual_nodes(duals, &disc.basis, &disc.model)?;
    Ok(advance_moments(moments, &nodes, disc, step))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpmConfig {
    pub newton: NewtonConfig,
    pub t_end: f64,
    /// Stop after this many steps even if `t_end` is not reached.
    pub max_steps: Option<usize>,
    /// Replace the moments by the moments of the dual ansatz before each update.
    pub variable_map: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IpmStats {
    pub steps: usize,
    pub newton_iterations: usize,
    pub max_residual: f64,
    pub timings: PhaseTimings,
}

#[derive(Debug, Clone)]
pub struct IpmOutcome<const N: usize> {
    pub moments: MomentField<N>,
    pub duals: DualField<N>,
    pub time: f64,
    pub stats: IpmStats,
}

/// Time loop: states from duals, CFL step, FV update of the moments, dual re-solve.
pub fn run_meipm<const N: usize>(
    initial: MomentField<N>,
    initial_samples: &NodeField<N>,
    disc: &Discretization<N>,
    config: &IpmConfig,
    mut observer: Option<&mut crate::sg::Observer<'_, N>>,
) -> Result<IpmOutcome<N>> {
    let basis = &disc.basis;
    let model = &disc.model;
    if initial.n_modes() != basis.n_modes() || initial.n_elements() != basis.n_elements() {
        return Err(Error::invalid("initial moments do not match the basis"));
    }
    if initial.n_cells() != disc.grid.n_cells() {
        return Err(Error::invalid("initial moments do not match the grid"));
    }
    check_means(&initial, model, 0)?;

    let mut stats = IpmStats::default();
    let t0 = Instant::now();
    let mut duals = initial_duals(initial_samples, &initial, basis, model, &config.newton)?;
    stats.timings.dual_solve += t0.elapsed();
    stats.newton_iterations += duals.total_iterations();
    stats.max_residual = duals.max_residual();

    let mut moments = initial;
    let mut time = 0.0;
    while time < config.t_end && config.max_steps.is_none_or(|m| stats.steps < m) {
        let t1 = Instant::now();
        if config.variable_map {
            moments = moments_from_duals(&duals.coeffs, basis, model)?;
        }
        let nodes = dual_nodes(&duals.coeffs, basis, model)?;
        let ts = cfl_time_step(nodes.as_slice(), &disc.grid, model, disc.cfl)?;
        let (step, last) = truncate_to_end(ts, time, config.t_end);
        moments = advance_moments(&moments, &nodes, disc, &step);
        stats.timings.flux += t1.elapsed();
        stats.steps += 1;
        check_means(&moments, model, stats.steps)?;

        let t2 = Instant::now();
        duals = solve_duals(&moments, &duals.coeffs, basis, model, &config.newton).map_err(|e| match e {
            Error::DualSolve {
                cell,
                element,
                iterations,
                residual,
                reason,
            } => Error::DualSolve {
                cell,
                element,
                iterations,
                residual,
                reason: format!("step {}: {reason}", stats.steps),
            },
            other => other,
        })?;
        stats.timings.dual_solve += t2.elapsed();
        stats.newton_iterations += duals.total_iterations();
        stats.max_residual = stats.max_residual.max(duals.max_residual());

        time = if last { config.t_end } else { time + step.dt };
        if let Some(obs) = observer.as_mut() {
            obs(stats.steps, time, &moments);
        }
    }
    Ok(IpmOutcome {
        moments,
        duals,
        time,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::ElementPartition;
    use crate::euler::State1;

    const GAS: GasModel = GasModel { gamma: 1.4 };

    fn basis(ne: usize, k: usize) -> GpcBasis {
        GpcBasis::with_default_quadrature(ElementPartition::uniform(-1.0, 1.0, ne).unwrap(), k).unwrap()
    }

    fn smooth_moments(b: &GpcBasis, l: usize) -> Vec<State1> {
        let samples: Vec<State1> = b
            .nodes(l)
            .iter()
            .map(|&xi| State1::new_1d(1.0 + 0.1 * xi, 0.0, 2.5))
            .collect();
        b.project(&samples, l).unwrap()
    }

    #[test]
    fn constant_ansatz_has_zero_residual() {
        let b = basis(1, 3);
        let u = State1::new_1d(1.0, 0.3, 2.5);
        let mut m = vec![State1::zero(); 4];
        m[0] = u;
        let lam = constant_duals(&m, &GAS).unwrap();
        let r = dual_residual(&lam, &m, &b, &GAS).unwrap();
        assert!(max_norm(&r) < 1e-14);
    }

    #[test]
    fn perturbed_first_dual_moves_first_two_moments() {
        let b = basis(1, 3);
        let mut m = vec![State1::zero(); 4];
        m[0] = State1::new_1d(1.0, 0.0, 2.5);
        let mut lam = constant_duals(&m, &GAS).unwrap();
        lam[1] = State1::new_1d(0.05, 0.0, 0.0);
        let r = dual_residual(&lam, &m, &b, &GAS).unwrap();
        assert!(r[0].max_abs() > 1e-6);
        assert!(r[1].max_abs() > 1e-3);
    }

    #[test]
    fn hessian_is_symmetric_and_matches_finite_differences() {
        let b = basis(2, 2);
        let m = smooth_moments(&b, 0);
        let mut lam = constant_duals(&m, &GAS).unwrap();
        lam[1] = State1::new_1d(0.02, 0.01, -0.01);
        lam[2] = State1::new_1d(-0.01, 0.0, 0.005);
        let h = dual_hessian(&lam, &b, &GAS).unwrap();
        assert!((&h - h.transpose()).amax() < 1e-14);
        assert!(h.clone().cholesky().is_some());
        let eps = 1e-6;
        for col in 0..9 {
            let (k, a) = (col / 3, col % 3);
            let mut lp = lam.clone();
            let mut lm = lam.clone();
            lp[k].0[a] += eps;
            lm[k].0[a] -= eps;
            // ∂r/∂λ = -H
            let rp = dual_residual(&lp, &m, &b, &GAS).unwrap();
            let rm = dual_residual(&lm, &m, &b, &GAS).unwrap();
            for row in 0..9 {
                let fd = -(rp[row / 3].0[row % 3] - rm[row / 3].0[row % 3]) / (2.0 * eps);
                assert!((fd - h[(row, col)]).abs() < 1e-6, "({row},{col}): {fd} vs {}", h[(row, col)]);
            }
        }
    }

    #[test]
    fn degree_zero_is_closed_form() {
        let b = basis(1, 0);
        let u = State1::new_1d(0.7, -0.2, 1.9);
        let mut lam = vec![State1::zero()];
        let info = solve_block(&mut lam, &[u], &b, &GAS, &NewtonConfig::default()).unwrap();
        assert!(info.iterations <= 2);
        let expected = GAS.entropy_gradient(&u).unwrap();
        assert!((lam[0] - expected).max_abs() < 1e-12);
    }

    #[test]
    fn smooth_moments_are_reproduced_and_warm_start_is_free() {
        let b = basis(3, 4);
        let cfg = NewtonConfig::default();
        for l in 0..3 {
            let m = smooth_moments(&b, l);
            let mut lam = constant_duals(&m, &GAS).unwrap();
            solve_block(&mut lam, &m, &b, &GAS, &cfg).unwrap();
            let r = dual_residual(&lam, &m, &b, &GAS).unwrap();
            assert!(max_norm(&r) <= cfg.tolerance);
            let again = solve_block(&mut lam, &m, &b, &GAS, &cfg).unwrap();
            assert!(again.iterations <= 1);
        }
    }

    #[test]
    fn solve_order_does_not_change_results() {
        let b = basis(2, 3);
        let cfg = NewtonConfig::default();
        let n_cells = 6;
        let mut m = MomentField::zeros(n_cells, 2, 4);
        for c in 0..n_cells {
            for l in 0..2 {
                let samples: Vec<State1> = b
                    .nodes(l)
                    .iter()
                    .map(|&xi| State1::new_1d(1.0 + 0.1 * c as f64 + 0.3 * xi, 0.1 * xi, 2.5 + xi * 0.2))
                    .collect();
                m.block_mut(c, l).copy_from_slice(&b.project(&samples, l).unwrap());
            }
        }
        let mut warm = MomentField::zeros(n_cells, 2, 4);
        for (w, mm) in warm.blocks_mut().zip(m.blocks()) {
            w.copy_from_slice(&constant_duals(mm, &GAS).unwrap());
        }
        let d = solve_duals(&m, &warm, &b, &GAS, &cfg).unwrap();

        // Reverse the cell order and solve again.
        let rev = |f: &MomentField<3>| {
            let mut out = f.clone();
            for c in 0..n_cells {
                for l in 0..2 {
                    out.block_mut(c, l).copy_from_slice(f.block(n_cells - 1 - c, l));
                }
            }
            out
        };
        let d2 = solve_duals(&rev(&m), &rev(&warm), &b, &GAS, &cfg).unwrap();
        assert_eq!(rev(&d2.coeffs), d.coeffs);
    }

    #[test]
    fn out_of_range_warm_start_falls_back_to_constant_ansatz() {
        let b = basis(1, 1);
        let m = vec![State1::new_1d(1.0, 0.0, 2.5), State1::zero()];
        let mut lam = vec![State1::new_1d(0.0, 0.0, 1.0), State1::zero()];
        // Falls back to the constant ansatz, which is exact here.
        let info = solve_block(&mut lam, &m, &b, &GAS, &NewtonConfig::default()).unwrap();
        assert!(info.residual < 1e-12);
    }
}
