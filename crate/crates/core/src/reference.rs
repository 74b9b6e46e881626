//! Reference solutions: the exact Riemann solver for the 1D Euler equations, exact
//! statistics of the Sod problem with an uncertain interface position, and stochastic
//! collocation on top of the deterministic finite-volume solver.

use rayon::prelude::*;

use crate::basis::{gauss_legendre, ElementPartition};
use crate::error::{Error, Result};
use crate::euler::{ConservedState, GasModel, State1};
use crate::fv::{run_deterministic, NumericalFlux, StructuredGrid};
use crate::stats::FieldStatistics;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wave {
    Shock,
    Rarefaction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Primitive {
    rho: f64,
    v: f64,
    p: f64,
    c: f64,
}

impl Primitive {
    fn from_state(u: &State1, model: &GasModel) -> Result<Self> {
        let p = model.pressure(u)?;
        let rho = u.density();
        Ok(Self {
            rho,
            v: u[1] / rho,
            p,
            c: (model.gamma * p / rho).sqrt(),
        })
    }

    fn to_state(self, model: &GasModel) -> State1 {
        State1::from_primitive(self.rho, &[self.v], self.p, model)
    }
}

/// Exact self-similar solution of a 1D Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSolution {
    pub p_star: f64,
    pub v_star: f64,
    pub rho_star_left: f64,
    pub rho_star_right: f64,
    pub left_wave: Wave,
    pub right_wave: Wave,
    left: Primitive,
    right: Primitive,
    left_state: State1,
    right_state: State1,
    model: GasModel,
}

/// Pressure function of one side and its derivative.
fn side_function(p: f64, s: &Primitive, g: f64) -> (f64, f64) {
    if p > s.p {
        let a = 2.0 / ((g + 1.0) * s.rho);
        let b = (g - 1.0) / (g + 1.0) * s.p;
        let q = (a / (p + b)).sqrt();
        ((p - s.p) * q, q * (1.0 - 0.5 * (p - s.p) / (p + b)))
    } else {
        let e = (g - 1.0) / (2.0 * g);
        let ratio = p / s.p;
        (
            2.0 * s.c / (g - 1.0) * (ratio.powf(e) - 1.0),
            ratio.powf(-(g + 1.0) / (2.0 * g)) / (s.rho * s.c),
        )
    }
}

fn star_density(p_star: f64, s: &Primitive, g: f64) -> f64 {
    let r = p_star / s.p;
    if p_star > s.p {
        let k = (g - 1.0) / (g + 1.0);
        s.rho * (r + k) / (k * r + 1.0)
    } else {
        s.rho * r.powf(1.0 / g)
    }
}

/// Solves the Riemann problem for admissible `left` and `right` states.
pub fn solve_riemann(left: &State1, right: &State1, model: &GasModel) -> Result<RiemannSolution> {
    let g = model.gamma;
    let l = Primitive::from_state(left, model)?;
    let r = Primitive::from_state(right, model)?;
    let dv = r.v - l.v;
    if 2.0 * (l.c + r.c) / (g - 1.0) <= dv {
        return Err(Error::Vacuum);
    }
    let f = |p: f64| {
        let (fl, dl) = side_function(p, &l, g);
        let (fr, dr) = side_function(p, &r, g);
        (fl + fr + dv, dl + dr)
    };

    // Bracket the root: f is increasing and f(0+) < 0 without vacuum.
    let mut lo = 0.0;
    let mut hi = l.p.max(r.p).max(1e-300);
    while f(hi).0 < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    // Primitive-variable guess, then safeguarded Newton.
    let pv = 0.5 * (l.p + r.p) - 0.125 * dv * (l.rho + r.rho) * (l.c + r.c);
    let mut p = if pv > lo && pv < hi { pv } else { 0.5 * (lo + hi) };
    for _ in 0..200 {
        let (val, der) = f(p);
        if val.abs() <= 1e-14 * (1.0 + l.p.max(r.p)) {
            break;
        }
        if val < 0.0 {
            lo = p;
        } else {
            hi = p;
        }
        let newton = p - val / der;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - p).abs() <= 4.0 * f64::EPSILON * p {
            p = next;
            break;
        }
        p = next;
    }
    let (fl, _) = side_function(p, &l, g);
    let (fr, _) = side_function(p, &r, g);
    let v_star = 0.5 * (l.v + r.v) + 0.5 * (fr - fl);
    Ok(RiemannSolution {
        p_star: p,
        v_star,
        rho_star_left: star_density(p, &l, g),
        rho_star_right: star_density(p, &r, g),
        left_wave: if p > l.p { Wave::Shock } else { Wave::Rarefaction },
        right_wave: if p > r.p { Wave::Shock } else { Wave::Rarefaction },
        left: l,
        right: r,
        left_state: *left,
        right_state: *right,
        model: *model,
    })
}

impl RiemannSolution {
    /// Residual of the pressure equation at `p_star`.
    pub fn pressure_residual(&self) -> f64 {
        let g = self.model.gamma;
        side_function(self.p_star, &self.left, g).0 + side_function(self.p_star, &self.right, g).0 + self.right.v
            - self.left.v
    }

    fn shock_speed(&self, s: &Primitive, sign: f64) -> f64 {
        let g = self.model.gamma;
        s.v + sign * s.c * ((g + 1.0) / (2.0 * g) * self.p_star / s.p + (g - 1.0) / (2.0 * g)).sqrt()
    }

    fn star_sound_speed(&self, rho_star: f64) -> f64 {
        (self.model.gamma * self.p_star / rho_star).sqrt()
    }

    /// Ordered speeds at which the solution is not smooth: wave fronts, fan edges
    /// and the contact.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(5);
        match self.left_wave {
            Wave::Shock => out.push(self.shock_speed(&self.left, -1.0)),
            Wave::Rarefaction => {
                out.push(self.left.v - self.left.c);
                out.push(self.v_star - self.star_sound_speed(self.rho_star_left));
            }
        }
        out.push(self.v_star);
        match self.right_wave {
            Wave::Shock => out.push(self.shock_speed(&self.right, 1.0)),
            Wave::Rarefaction => {
                out.push(self.v_star + self.star_sound_speed(self.rho_star_right));
                out.push(self.right.v + self.right.c);
            }
        }
        out
    }

    /// Speed of the left / right shock, when that wave is a shock.
    pub fn shock_speeds(&self) -> (Option<f64>, Option<f64>) {
        (
            (self.left_wave == Wave::Shock).then(|| self.shock_speed(&self.left, -1.0)),
            (self.right_wave == Wave::Shock).then(|| self.shock_speed(&self.right, 1.0)),
        )
    }

    pub fn star_states(&self) -> (State1, State1) {
        let m = &self.model;
        (
            State1::from_primitive(self.rho_star_left, &[self.v_star], self.p_star, m),
            State1::from_primitive(self.rho_star_right, &[self.v_star], self.p_star, m),
        )
    }

    /// State at similarity coordinate `s = x / t`.
    pub fn sample(&self, s: f64) -> State1 {
        let g = self.model.gamma;
        let m = &self.model;
        if s <= self.v_star {
            let l = &self.left;
            match self.left_wave {
                Wave::Shock => {
                    if s <= self.shock_speed(l, -1.0) {
                        self.left_state
                    } else {
                        self.star_states().0
                    }
                }
                Wave::Rarefaction => {
                    let head = l.v - l.c;
                    let tail = self.v_star - self.star_sound_speed(self.rho_star_left);
                    if s <= head {
                        self.left_state
                    } else if s >= tail {
                        self.star_states().0
                    } else {
                        let k = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * l.c) * (l.v - s);
                        let rho = l.rho * k.powf(2.0 / (g - 1.0));
                        let v = 2.0 / (g + 1.0) * (l.c + 0.5 * (g - 1.0) * l.v + s);
                        let p = l.p * k.powf(2.0 * g / (g - 1.0));
                        Primitive { rho, v, p, c: 0.0 }.to_state(m)
                    }
                }
            }
        } else {
            let r = &self.right;
            match self.right_wave {
                Wave::Shock => {
                    if s >= self.shock_speed(r, 1.0) {
                        self.right_state
                    } else {
                        self.star_states().1
                    }
                }
                Wave::Rarefaction => {
                    let head = r.v + r.c;
                    let tail = self.v_star + self.star_sound_speed(self.rho_star_right);
                    if s >= head {
                        self.right_state
                    } else if s <= tail {
                        self.star_states().1
                    } else {
                        let k = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * r.c) * (r.v - s);
                        let rho = r.rho * k.powf(2.0 / (g - 1.0));
                        let v = 2.0 / (g + 1.0) * (-r.c + 0.5 * (g - 1.0) * r.v + s);
                        let p = r.p * k.powf(2.0 * g / (g - 1.0));
                        Primitive { rho, v, p, c: 0.0 }.to_state(m)
                    }
                }
            }
        }
    }

    /// State at position `x` and time `t > 0` for an initial jump at `x0`.
    pub fn sample_at(&self, x: f64, t: f64, x0: f64) -> State1 {
        self.sample((x - x0) / t)
    }
}

/// Riemann problem whose interface sits at `x0 + σξ`, `ξ` uniform on `(xi_lo, xi_hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertainRiemann {
    pub left: State1,
    pub right: State1,
    pub x0: f64,
    pub sigma: f64,
    pub xi_lo: f64,
    pub xi_hi: f64,
    pub model: GasModel,
}

impl UncertainRiemann {
    pub fn sod() -> Self {
        Self {
            left: State1::new_1d(1.0, 0.0, 2.5),
            right: State1::new_1d(0.125, 0.0, 0.25),
            x0: 0.5,
            sigma: 0.05,
            xi_lo: -1.0,
            xi_hi: 1.0,
            model: GasModel::default(),
        }
    }

    /// Initial state at `x` for the realization `xi`.
    pub fn initial_state(&self, x: f64, xi: f64) -> State1 {
        if x < self.x0 + self.sigma * xi {
            self.left
        } else {
            self.right
        }
    }
}

/// Options for [`sod_reference_statistics`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceOptions {
    /// Gauss nodes on each smooth piece of the ξ-domain.
    pub nodes_per_piece: usize,
    /// Sample points per cell; 1 evaluates at the cell center.
    pub subcells: usize,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        Self {
            nodes_per_piece: 100,
            subcells: 1,
        }
    }
}

/// Exact mean and variance of the conserved variables at time `t` on the cells of
/// `grid`.
///
/// For fixed `x` the exact solution is piecewise smooth in ξ, with breaks where a
/// wave front passes `x`. The ξ-domain is split at those breaks and each piece is
/// integrated with its own Gauss rule, so the statistics converge spectrally in
/// `nodes_per_piece`. With `subcells > 1` the statistics are those of the cell
/// average, sampled at the midpoints of equal sub-cells.
pub fn sod_reference_statistics(
    problem: &UncertainRiemann,
    grid: &StructuredGrid<3>,
    t: f64,
    options: &ReferenceOptions,
) -> Result<FieldStatistics> {
    if grid.dims() != 1 {
        return Err(Error::invalid("exact reference statistics need a 1D grid"));
    }
    if options.nodes_per_piece == 0 || options.subcells == 0 {
        return Err(Error::invalid("reference quadrature needs at least one node and one sample per cell"));
    }
    if !(problem.xi_lo < problem.xi_hi) {
        return Err(Error::invalid("empty ξ-domain"));
    }
    let sol = solve_riemann(&problem.left, &problem.right, &problem.model)?;
    let rule = gauss_legendre(options.nodes_per_piece)?;
    let speeds = sol.breakpoints();
    let (lo, hi) = (problem.xi_lo, problem.xi_hi);
    let width = hi - lo;
    let dx = grid.dx();
    let ns = options.subcells;

    let value = |x: f64, xi: f64| -> State1 {
        let x0 = problem.x0 + problem.sigma * xi;
        if t > 0.0 {
            sol.sample_at(x, t, x0)
        } else {
            problem.initial_state(x, xi)
        }
    };

    let per_cell: Vec<(State1, State1)> = (0..grid.n_cells())
        .into_par_iter()
        .map(|cell| {
            let xc = grid.center(cell).0;
            let points: Vec<f64> = (0..ns)
                .map(|s| xc - 0.5 * dx + (s as f64 + 0.5) * dx / ns as f64)
                .collect();
            let avg = |xi: f64| -> State1 {
                let mut u = State1::zero();
                for &x in &points {
                    u.add_scaled(1.0 / ns as f64, &value(x, xi));
                }
                u
            };
            let mut cuts = vec![lo, hi];
            if problem.sigma != 0.0 {
                for &x in &points {
                    for &sp in speeds.iter().chain(std::iter::once(&0.0)) {
                        let xi = (x - problem.x0 - t * sp) / problem.sigma;
                        if xi > lo && xi < hi {
                            cuts.push(xi);
                        }
                    }
                }
            }
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();

            let mut samples = Vec::new();
            for w in cuts.windows(2) {
                let (a, b) = (w[0], w[1]);
                if b - a <= 0.0 {
                    continue;
                }
                let mapped = rule.mapped(a, b);
                for (&xi, &wt) in mapped.nodes.iter().zip(&mapped.weights) {
                    samples.push((wt * (b - a) / width, avg(xi)));
                }
            }
            let mut mean = State1::zero();
            for (w, u) in &samples {
                mean.add_scaled(*w, u);
            }
            let mut var = State1::zero();
            for (w, u) in &samples {
                let d = *u - mean;
                for c in 0..3 {
                    var[c] += w * d[c] * d[c];
                }
            }
            (mean, var)
        })
        .collect();
    Ok(FieldStatistics::from_states(grid, &per_cell, 0))
}

/// Statistics from deterministic runs at `n_nodes` Gauss–Legendre nodes in ξ.
///
/// `initial(cell, xi)` supplies the initial cell value of the realization `xi`.
#[allow(clippy::too_many_arguments)]
pub fn collocation_reference<const N: usize>(
    initial: impl Fn(usize, f64) -> ConservedState<N> + Sync,
    partition: &ElementPartition,
    grid: &StructuredGrid<N>,
    model: &GasModel,
    flux: NumericalFlux,
    cfl: f64,
    t_end: f64,
    n_nodes: usize,
) -> Result<FieldStatistics> {
    let rule = gauss_legendre(n_nodes)?.mapped(partition.lo(), partition.hi());
    let width = partition.hi() - partition.lo();
    let runs: Vec<Vec<ConservedState<N>>> = rule
        .nodes
        .par_iter()
        .map(|&xi| {
            let u0 = (0..grid.n_cells()).map(|c| initial(c, xi)).collect();
            run_deterministic(u0, grid, model, flux, cfl, t_end).map(|r| r.states)
        })
        .collect::<Result<_>>()?;
    let weights: Vec<f64> = rule.weights.iter().map(|w| w / width).collect();
    let per_cell: Vec<(ConservedState<N>, ConservedState<N>)> = (0..grid.n_cells())
        .map(|cell| {
            let mut mean = ConservedState::zero();
            for (run, &w) in runs.iter().zip(&weights) {
                mean.add_scaled(w, &run[cell]);
            }
            let mut var = ConservedState::zero();
            for (run, &w) in runs.iter().zip(&weights) {
                let d = run[cell] - mean;
                for c in 0..N {
                    var[c] += w * d[c] * d[c];
                }
            }
            (mean, var)
        })
        .collect();
    Ok(FieldStatistics::from_states(grid, &per_cell, 0))
}
