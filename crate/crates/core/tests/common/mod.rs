//! Independent oracles shared by the integration tests. Nothing here calls into
//! the solver internals; only plain `f64` arithmetic and `nalgebra`.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};

pub const GAMMA: f64 = 1.4;

/// Gauss–Legendre rule on `[-1, 1]` by Golub–Welsch, weights normalized to sum 1.
pub fn golub_welsch(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let b = kf / (4.0 * kf * kf - 1.0).sqrt();
        j[(k - 1, k)] = b;
        j[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// `sqrt(2k+1) P_k(t)` by the three-term recurrence.
pub fn legendre(k: usize, t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, t);
    if k == 0 {
        return 1.0;
    }
    for n in 1..k {
        let nf = n as f64;
        let p2 = ((2.0 * nf + 1.0) * t * p1 - nf * p0) / (nf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1 * ((2 * k + 1) as f64).sqrt()
}

pub fn pressure(u: [f64; 3]) -> f64 {
    (GAMMA - 1.0) * (u[2] - 0.5 * u[1] * u[1] / u[0])
}

pub fn admissible(u: [f64; 3]) -> bool {
    u[0] > 0.0 && pressure(u) > 0.0 && u.iter().all(|x| x.is_finite())
}

fn euler_flux(u: [f64; 3]) -> [f64; 3] {
    let p = pressure(u);
    let v = u[1] / u[0];
    [u[1], u[1] * v + p, v * (u[2] + p)]
}

fn speed(u: [f64; 3]) -> (f64, f64) {
    (u[1] / u[0], (GAMMA * pressure(u) / u[0]).sqrt())
}

pub fn hll(l: [f64; 3], r: [f64; 3]) -> [f64; 3] {
    let (vl, cl) = speed(l);
    let (vr, cr) = speed(r);
    let sl = (vl - cl).min(vr - cr);
    let sr = (vl + cl).max(vr + cr);
    if sl >= 0.0 {
        return euler_flux(l);
    }
    if sr <= 0.0 {
        return euler_flux(r);
    }
    let (fl, fr) = (euler_flux(l), euler_flux(r));
    std::array::from_fn(|c| (sr * fl[c] - sl * fr[c] + sl * sr * (r[c] - l[c])) / (sr - sl))
}

/// Smallest `θ` with `θ mean + (1-θ) node` admissible, by bisection.
fn theta_bisect(node: [f64; 3], mean: [f64; 3]) -> f64 {
    if admissible(node) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let w = std::array::from_fn(|c| mid * mean[c] + (1.0 - mid) * node[c]);
        if admissible(w) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    hi
}

/// Classical (single element) hyperbolicity-preserving SG for the 1D Sod problem
/// with uncertain shock position `x0 + σξ`, written from scratch with HLL fluxes,
/// transmissive boundaries and a bisection limiter.
pub struct ClassicalHsg {
    pub cells: usize,
    pub degree: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `phi[q][k]`
    pub phi: Vec<Vec<f64>>,
    pub cfl: f64,
    pub epsilon: f64,
}

pub type Coeffs = Vec<Vec<[f64; 3]>>;

impl ClassicalHsg {
    pub fn new(cells: usize, degree: usize) -> Self {
        let (nodes, weights) = golub_welsch(2 * (degree + 1));
        let phi = nodes.iter().map(|&t| (0..=degree).map(|k| legendre(k, t)).collect()).collect();
        Self {
            cells,
            degree,
            nodes,
            weights,
            phi,
            cfl: 0.9,
            epsilon: 1e-10,
        }
    }

    pub fn sod_initial(&self, sigma: f64) -> Coeffs {
        let left = [1.0, 0.0, 2.5];
        let right = [0.125, 0.0, 0.25];
        (0..self.cells)
            .map(|i| {
                let x = (i as f64 + 0.5) / self.cells as f64;
                let samples: Vec<[f64; 3]> = self
                    .nodes
                    .iter()
                    .map(|&xi| if x < 0.5 + sigma * xi { left } else { right })
                    .collect();
                self.project(&samples)
            })
            .collect()
    }

    fn project(&self, samples: &[[f64; 3]]) -> Vec<[f64; 3]> {
        (0..=self.degree)
            .map(|k| {
                let mut a = [0.0; 3];
                for (q, s) in samples.iter().enumerate() {
                    for c in 0..3 {
                        a[c] += self.weights[q] * self.phi[q][k] * s[c];
                    }
                }
                a
            })
            .collect()
    }

    fn eval(&self, coeffs: &[[f64; 3]], q: usize) -> [f64; 3] {
        let mut u = [0.0; 3];
        for (k, a) in coeffs.iter().enumerate() {
            for c in 0..3 {
                u[c] += self.phi[q][k] * a[c];
            }
        }
        u
    }

    fn limit(&self, coeffs: &mut [[f64; 3]]) {
        let mean = coeffs[0];
        assert!(admissible(mean), "oracle: inadmissible mean {mean:?}");
        for _ in 0..4 {
            let theta = (0..self.nodes.len())
                .map(|q| theta_bisect(self.eval(coeffs, q), mean))
                .fold(0.0f64, f64::max);
            if theta == 0.0 {
                return;
            }
            let theta = (theta + self.epsilon).min(1.0);
            for a in coeffs.iter_mut().skip(1) {
                a.iter_mut().for_each(|x| *x *= 1.0 - theta);
            }
        }
    }

    /// Runs to `t_end`, calling `observe(step, coeffs)` after every step.
    pub fn run(&self, mut u: Coeffs, t_end: f64, mut observe: impl FnMut(usize, &Coeffs)) -> (Coeffs, usize) {
        let dx = 1.0 / self.cells as f64;
        let nq = self.nodes.len();
        let mut t = 0.0;
        let mut steps = 0;
        while t < t_end {
            for c in u.iter_mut() {
                self.limit(c);
            }
            let vals: Vec<Vec<[f64; 3]>> = u.iter().map(|c| (0..nq).map(|q| self.eval(c, q)).collect()).collect();
            let mut lam = 0.0f64;
            for v in vals.iter().flatten() {
                assert!(admissible(*v), "oracle: inadmissible node {v:?}");
                let (s, c) = speed(*v);
                lam = lam.max(s.abs() + c);
            }
            let mut dt = self.cfl * dx / lam;
            let remaining = t_end - t;
            let last = dt >= remaining || remaining - dt <= 1e-12 * t_end.abs().max(1.0);
            if last {
                dt = remaining;
            }
            // Face i sits between cells i-1 and i.
            let faces: Vec<Vec<[f64; 3]>> = (0..=self.cells)
                .map(|i| {
                    let l = &vals[i.saturating_sub(1)];
                    let r = &vals[i.min(self.cells - 1)];
                    let f: Vec<[f64; 3]> = (0..nq).map(|q| hll(l[q], r[q])).collect();
                    self.project(&f)
                })
                .collect();
            for (i, c) in u.iter_mut().enumerate() {
                for k in 0..=self.degree {
                    for comp in 0..3 {
                        c[k][comp] -= dt / dx * (faces[i + 1][k][comp] - faces[i][k][comp]);
                    }
                }
            }
            steps += 1;
            t = if last { t_end } else { t + dt };
            observe(steps, &u);
        }
        (u, steps)
    }
}

/// Star pressure and velocity of a 1D Riemann problem (primitive data) by bisection
/// on the pressure function.
pub fn riemann_star_bisection(left: [f64; 3], right: [f64; 3]) -> (f64, f64) {
    let g = GAMMA;
    let side = |p: f64, [rho, _, pk]: [f64; 3]| -> f64 {
        let c = (g * pk / rho).sqrt();
        if p > pk {
            let a = 2.0 / ((g + 1.0) * rho);
            let b = (g - 1.0) / (g + 1.0) * pk;
            (p - pk) * (a / (p + b)).sqrt()
        } else {
            2.0 * c / (g - 1.0) * ((p / pk).powf((g - 1.0) / (2.0 * g)) - 1.0)
        }
    };
    let f = |p: f64| side(p, left) + side(p, right) + right[1] - left[1];
    let (mut lo, mut hi) = (1e-14, 100.0 * left[2].max(right[2]));
    assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    let v = 0.5 * (left[1] + right[1]) + 0.5 * (side(p, right) - side(p, left));
    (p, v)
}

/// Variance of the piecewise polynomial `Σ_k a_{k,l} φ_k` over the uniform ξ on
/// `[-1, 1]` split into `coeffs.len()` equal elements, from `n` stratified samples
/// (one uniform draw per stratum of width `2/n`).
pub fn stratified_variance(coeffs: &[Vec<f64>], n: usize, mut uniform: impl FnMut() -> f64) -> f64 {
    let ne = coeffs.len();
    let h = 2.0 / n as f64;
    let values: Vec<f64> = (0..n)
        .map(|i| {
            let xi = -1.0 + h * (i as f64 + uniform());
            let l = (((xi + 1.0) / 2.0 * ne as f64) as usize).min(ne - 1);
            let a = -1.0 + 2.0 * l as f64 / ne as f64;
            let b = a + 2.0 / ne as f64;
            let t = 2.0 * (xi - a) / (b - a) - 1.0;
            coeffs[l].iter().enumerate().map(|(k, c)| c * legendre(k, t)).sum()
        })
        .collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64
}
