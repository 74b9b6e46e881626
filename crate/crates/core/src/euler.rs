//! Compressible Euler equations in one and two space dimensions.
//!
//! States are stored in conserved form `(ρ, ρv_1[, ρv_2], ρe)`; the component
//! count `N` is 3 in 1D and 4 in 2D. The ideal-gas closure is
//! `p = (γ-1)(ρe - |ρv|²/(2ρ))` and the admissible (hyperbolicity) set is
//! `ρ > 0, p > 0`.
//!
//! The entropy used by the moment closure is `s(u) = -ρ ln(ρ^{-γ} ρε)` with
//! internal energy `ρε = ρe - |ρv|²/(2ρ)`. Writing `β = ρ/ρε`, its gradient is
//!
//! ```text
//! ∇s = ( γ ln ρ - ln ρε + γ - β|v|²/2,  β v,  -β )
//! ```
//!
//! which inverts in closed form for any dual vector with negative last entry.
//! The Legendre dual is `s*(Λ) = (γ-1) ρ(Λ)`.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Conserved Euler state with `N` components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedState<const N: usize>(pub [f64; N]);

pub type State1 = ConservedState<3>;
pub type State2 = ConservedState<4>;

impl<const N: usize> ConservedState<N> {
    pub const SPACE_DIMS: usize = N - 2;

    pub fn new(components: [f64; N]) -> Self {
        Self(components)
    }

    pub fn zero() -> Self {
        Self([0.0; N])
    }

    pub fn density(&self) -> f64 {
        self.0[0]
    }

    pub fn energy(&self) -> f64 {
        self.0[N - 1]
    }

    pub fn momentum(&self, dir: Direction) -> f64 {
        self.0[1 + dir.index()]
    }

    /// `|ρv|²`.
    pub fn momentum_sq(&self) -> f64 {
        self.0[1..N - 1].iter().map(|m| m * m).sum()
    }

    pub fn velocity(&self, dir: Direction) -> f64 {
        self.momentum(dir) / self.density()
    }

    /// Builds a state from density, velocity components and pressure.
    pub fn from_primitive(rho: f64, velocity: &[f64], p: f64, model: &GasModel) -> Self {
        assert_eq!(velocity.len(), N - 2, "velocity has wrong dimension");
        let mut u = [0.0; N];
        u[0] = rho;
        let mut v2 = 0.0;
        for (i, &v) in velocity.iter().enumerate() {
            u[1 + i] = rho * v;
            v2 += v * v;
        }
        u[N - 1] = p / (model.gamma - 1.0) + 0.5 * rho * v2;
        Self(u)
    }

    /// `self += s * other`
    #[inline]
    pub fn add_scaled(&mut self, s: f64, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a += s * b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// Reflection across the plane normal to `dir`.
    pub fn mirrored(&self, dir: Direction) -> Self {
        let mut u = *self;
        u.0[1 + dir.index()] = -u.0[1 + dir.index()];
        u
    }
}

impl State1 {
    pub fn new_1d(rho: f64, momentum: f64, energy: f64) -> Self {
        Self([rho, momentum, energy])
    }
}

impl State2 {
    pub fn new_2d(rho: f64, mx: f64, my: f64, energy: f64) -> Self {
        Self([rho, mx, my, energy])
    }
}

impl<const N: usize> Default for ConservedState<N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const N: usize> Index<usize> for ConservedState<N> {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<const N: usize> IndexMut<usize> for ConservedState<N> {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl<const N: usize> Add for ConservedState<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const N: usize> AddAssign for ConservedState<N> {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl<const N: usize> Sub for ConservedState<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<const N: usize> SubAssign for ConservedState<N> {
    fn sub_assign(&mut self, rhs: Self) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
    }
}

impl<const N: usize> Mul<f64> for ConservedState<N> {
    type Output = Self;
    fn mul(mut self, s: f64) -> Self {
        self.0.iter_mut().for_each(|a| *a *= s);
        self
    }
}

impl<const N: usize> Mul<ConservedState<N>> for f64 {
    type Output = ConservedState<N>;
    fn mul(self, u: ConservedState<N>) -> ConservedState<N> {
        u * self
    }
}

impl<const N: usize> Neg for ConservedState<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

/// Spatial flux direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    pub fn index(self) -> usize {
        match self {
            Direction::X => 0,
            Direction::Y => 1,
        }
    }

    pub fn all(dims: usize) -> &'static [Direction] {
        match dims {
            1 => &[Direction::X],
            _ => &[Direction::X, Direction::Y],
        }
    }
}

/// Ideal gas with constant heat capacity ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    pub gamma: f64,
}

impl Default for GasModel {
    fn default() -> Self {
        Self { gamma: 1.4 }
    }
}

impl GasModel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::invalid(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(Self { gamma })
    }

    /// Pressure without any admissibility check.
    #[inline]
    pub fn pressure_unchecked<const N: usize>(&self, u: &ConservedState<N>) -> f64 {
        (self.gamma - 1.0) * (u.energy() - 0.5 * u.momentum_sq() / u.density())
    }

    pub fn pressure<const N: usize>(&self, u: &ConservedState<N>) -> Result<f64> {
        if !(u.density() > 0.0) {
            return Err(Error::inadmissible(u, "pressure needs positive density"));
        }
        Ok(self.pressure_unchecked(u))
    }

    #[inline]
    pub fn is_admissible<const N: usize>(&self, u: &ConservedState<N>) -> bool {
        // Written so that NaN components are rejected.
        u.density() > 0.0 && u.density() * u.energy() - 0.5 * u.momentum_sq() > 0.0 && u.is_finite()
    }

    fn check<const N: usize>(&self, u: &ConservedState<N>, what: &str) -> Result<()> {
        if self.is_admissible(u) {
            Ok(())
        } else {
            Err(Error::inadmissible(u, what.to_string()))
        }
    }

    #[inline]
    pub fn sound_speed_unchecked<const N: usize>(&self, u: &ConservedState<N>) -> f64 {
        (self.gamma * self.pressure_unchecked(u) / u.density()).sqrt()
    }

    /// Euler flux in direction `dir` for an admissible state; not checked.
    #[inline]
    pub fn flux_unchecked<const N: usize>(&self, u: &ConservedState<N>, dir: Direction) -> ConservedState<N> {
        let p = self.pressure_unchecked(u);
        let vn = u.velocity(dir);
        let mut f = [0.0; N];
        f[0] = u.momentum(dir);
        for i in 1..N - 1 {
            f[i] = u.0[i] * vn;
        }
        f[1 + dir.index()] += p;
        f[N - 1] = vn * (u.energy() + p);
        ConservedState(f)
    }

    pub fn physical_flux<const N: usize>(&self, u: &ConservedState<N>, dir: Direction) -> Result<ConservedState<N>> {
        self.check(u, "physical flux")?;
        Ok(self.flux_unchecked(u, dir))
    }

    /// `|v_dir| + c`.
    #[inline]
    pub fn max_wave_speed_unchecked<const N: usize>(&self, u: &ConservedState<N>, dir: Direction) -> f64 {
        u.velocity(dir).abs() + self.sound_speed_unchecked(u)
    }

    pub fn max_wave_speed<const N: usize>(&self, u: &ConservedState<N>, dir: Direction) -> Result<f64> {
        self.check(u, "wave speed")?;
        Ok(self.max_wave_speed_unchecked(u, dir))
    }

    pub fn entropy<const N: usize>(&self, u: &ConservedState<N>) -> Result<f64> {
        self.check(u, "entropy")?;
        let rho = u.density();
        let internal = u.energy() - 0.5 * u.momentum_sq() / rho;
        Ok(-rho * (internal.ln() - self.gamma * rho.ln()))
    }

    /// Entropic (dual) variable `∇_u s(u)`.
    pub fn entropy_gradient<const N: usize>(&self, u: &ConservedState<N>) -> Result<ConservedState<N>> {
        self.check(u, "entropy gradient")?;
        let rho = u.density();
        let internal = u.energy() - 0.5 * u.momentum_sq() / rho;
        let beta = rho / internal;
        let mut lam = [0.0; N];
        let mut v2 = 0.0;
        for i in 1..N - 1 {
            let v = u.0[i] / rho;
            v2 += v * v;
            lam[i] = beta * v;
        }
        lam[0] = self.gamma * rho.ln() - internal.ln() + self.gamma - 0.5 * beta * v2;
        lam[N - 1] = -beta;
        Ok(ConservedState(lam))
    }

    /// `(∇_u s)^{-1}(Λ)`. Defined for every finite `Λ` with `Λ_E < 0`; the result is
    /// admissible whenever it is finite.
    #[inline]
    pub fn entropy_gradient_inverse<const N: usize>(&self, dual: &ConservedState<N>) -> Result<ConservedState<N>> {
        let beta = -dual.0[N - 1];
        if !(beta > 0.0) || !dual.is_finite() {
            return Err(Error::inadmissible(dual, "dual energy component must be negative"));
        }
        let mut u = [0.0; N];
        let mut v2 = 0.0;
        for i in 1..N - 1 {
            let v = dual.0[i] / beta;
            v2 += v * v;
            u[i] = v;
        }
        let log_rho = (dual.0[0] - self.gamma + 0.5 * beta * v2 - beta.ln()) / (self.gamma - 1.0);
        let rho = log_rho.exp();
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::inadmissible(dual, "dual maps outside representable densities"));
        }
        u[0] = rho;
        for ui in u.iter_mut().take(N - 1).skip(1) {
            *ui *= rho;
        }
        u[N - 1] = rho * (1.0 / beta + 0.5 * v2);
        Ok(ConservedState(u))
    }

    /// Inverse map together with its Jacobian `∂u/∂Λ` (symmetric positive definite).
    pub fn entropy_gradient_inverse_with_jacobian<const N: usize>(
        &self,
        dual: &ConservedState<N>,
    ) -> Result<(ConservedState<N>, [[f64; N]; N])> {
        let u = self.entropy_gradient_inverse(dual)?;
        let beta = -dual.0[N - 1];
        let rho = u.density();
        let g = 1.0 / (self.gamma - 1.0);
        let mut v = [0.0; N];
        let mut v2 = 0.0;
        for i in 1..N - 1 {
            v[i] = dual.0[i] / beta;
            v2 += v[i] * v[i];
        }
        let h = 0.5 * v2 + 1.0 / beta;
        // w = (1, v, h): ∇ρ = ρ g w.
        let mut w = [0.0; N];
        w[0] = 1.0;
        w[1..N - 1].copy_from_slice(&v[1..N - 1]);
        w[N - 1] = h;

        let mut jac = [[0.0; N]; N];
        let rg = rho * g;
        for a in 0..N {
            for b in a..N {
                let mut val = rg * w[a] * w[b];
                // ρ ∂w_a/∂Λ_b, nonzero only for a ≥ 1.
                if a >= 1 && a < N - 1 {
                    if b == a {
                        val += rho / beta;
                    }
                    if b == N - 1 {
                        val += rho * v[a] / beta;
                    }
                } else if a == N - 1 && b == N - 1 {
                    val += rho * (v2 / beta + 1.0 / (beta * beta));
                }
                jac[a][b] = val;
                jac[b][a] = val;
            }
        }
        Ok((u, jac))
    }

    /// Legendre dual `s*(Λ) = Λ·u(Λ) - s(u(Λ)) = (γ-1) ρ(Λ)`.
    pub fn dual_potential<const N: usize>(&self, dual: &ConservedState<N>) -> Result<f64> {
        Ok((self.gamma - 1.0) * self.entropy_gradient_inverse(dual)?.density())
    }
}
