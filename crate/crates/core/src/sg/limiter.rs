//! Hyperbolicity-preserving limiter: the higher gPC moments of each
//! (cell, element) polynomial are damped by `1 - θ` so that the polynomial is
//! admissible at every quadrature node, while the zeroth moment (the mean) is kept.

use rayon::prelude::*;

use crate::basis::GpcBasis;
use crate::error::{Error, Result};
use crate::euler::{ConservedState, GasModel};
use crate::fv::MomentField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterConfig {
    pub enabled: bool,
    /// Offset added to a nonzero `θ` to keep limited states off the boundary of the
    /// (open) admissible set.
    pub epsilon: f64,
}

impl Default for LimiterConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            epsilon: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LimiterStats {
    pub limited_blocks: usize,
    pub max_theta: f64,
}

impl LimiterStats {
    pub fn merge(self, other: Self) -> Self {
        Self {
            limited_blocks: self.limited_blocks + other.limited_blocks,
            max_theta: self.max_theta.max(other.max_theta),
        }
    }
}

#[inline]
fn cut(x: f64) -> f64 {
    if (0.0..=1.0).contains(&x) {
        x
    } else {
        0.0
    }
}

/// Smallest `θ ∈ [0, 1]` with `θ ũ + (1 - θ) u` admissible, in closed form, for a
/// node state `u` and an admissible mean `ũ`. Returns 0 for admissible `u`.
///
/// The density bound gives `θ_1 = ρ / (ρ - ρ̃)`; the pressure bound is the
/// larger root of the quadratic `ρ(θ) E(θ) - |m(θ)|²/2`.
pub fn theta_star<const N: usize>(model: &GasModel, node: &ConservedState<N>, mean: &ConservedState<N>) -> f64 {
    if model.is_admissible(node) {
        return 0.0;
    }
    let (rho, e) = (node.density(), node.energy());
    let (rho_t, e_t) = (mean.density(), mean.energy());
    let theta_1 = rho / (rho - rho_t);

    let d_rho = rho_t - rho;
    let d_e = e_t - e;
    let mut m_dm = 0.0;
    let mut dm_sq = 0.0;
    for i in 1..N - 1 {
        let dm = mean[i] - node[i];
        m_dm += node[i] * dm;
        dm_sq += dm * dm;
    }
    // q(θ) = a θ² + b θ + c
    let a = d_rho * d_e - 0.5 * dm_sq;
    let b = rho * d_e + e * d_rho - m_dm;
    let c = rho * e - 0.5 * node.momentum_sq();

    let (theta_plus, theta_minus) = if a.abs() <= 1e-14 * (b.abs() + c.abs()) {
        let r = -c / b;
        (r, r)
    } else {
        let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
        // (b ± √D) / (-2a), as the two candidate roots.
        ((b + disc) / (-2.0 * a), (b - disc) / (-2.0 * a))
    };
    cut(theta_1).max(cut(theta_plus)).max(cut(theta_minus))
}

/// `θ` for one (cell, element) polynomial: the largest per-node `θ*`, shifted by
/// `epsilon` and capped at 1 when positive.
pub fn limiter_theta<const N: usize>(
    coeffs: &[ConservedState<N>],
    basis: &GpcBasis,
    model: &GasModel,
    epsilon: f64,
) -> Result<f64> {
    let mean = coeffs[0];
    if !model.is_admissible(&mean) {
        return Err(Error::inadmissible(&mean, "limiter needs an admissible cell mean"));
    }
    let mut theta_hat: f64 = 0.0;
    for q in 0..basis.n_nodes() {
        let mut u = ConservedState::zero();
        for (c, &p) in coeffs.iter().zip(basis.phi_at_node(q)) {
            u.add_scaled(p, c);
        }
        theta_hat = theta_hat.max(theta_star(model, &u, &mean));
    }
    Ok(if theta_hat > 0.0 {
        (theta_hat + epsilon).min(1.0)
    } else {
        0.0
    })
}

fn scale_higher<const N: usize>(coeffs: &mut [ConservedState<N>], theta: f64) {
    for c in coeffs.iter_mut().skip(1) {
        *c = *c * (1.0 - theta);
    }
}

/// Limits one (cell, element) polynomial in place and returns the total `θ` applied.
/// A second pass runs when round-off leaves a node on the wrong side of the boundary.
pub fn limit_block<const N: usize>(
    coeffs: &mut [ConservedState<N>],
    basis: &GpcBasis,
    model: &GasModel,
    epsilon: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for _ in 0..4 {
        let theta = limiter_theta(coeffs, basis, model, epsilon)?;
        if theta == 0.0 {
            return Ok(total);
        }
        scale_higher(coeffs, theta);
        total = 1.0 - (1.0 - total) * (1.0 - theta);
    }
    if limiter_theta(coeffs, basis, model, epsilon)? > 0.0 {
        scale_higher(coeffs, 1.0);
        total = 1.0;
    }
    Ok(total)
}

/// Applies the limiter to every (cell, element) block. Cell means are never modified.
pub fn apply_limiter<const N: usize>(
    field: &mut MomentField<N>,
    basis: &GpcBasis,
    model: &GasModel,
    config: &LimiterConfig,
) -> Result<LimiterStats> {
    if !config.enabled {
        return Ok(LimiterStats::default());
    }
    let ne = field.n_elements();
    let stride = field.stride();
    field
        .as_mut_slice()
        .par_chunks_exact_mut(stride)
        .enumerate()
        .map(|(idx, block)| {
            let theta = limit_block(block, basis, model, config.epsilon).map_err(|e| match e {
                Error::Inadmissible { state, .. } => Error::Inadmissible {
                    state,
                    context: format!("cell mean of cell {}, element {}", idx / ne, idx % ne),
                },
                other => other,
            })?;
            Ok(LimiterStats {
                limited_blocks: usize::from(theta > 0.0),
                max_theta: theta,
            })
        })
        .try_reduce(LimiterStats::default, |a, b| Ok(a.merge(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::ElementPartition;
    use crate::euler::State1;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const GAS: GasModel = GasModel { gamma: 1.4 };

    /// Independent oracle: bisection on the admissibility predicate.
    fn theta_by_bisection(node: &State1, mean: &State1) -> f64 {
        if GAS.is_admissible(node) {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let w = *mean * mid + *node * (1.0 - mid);
            if GAS.is_admissible(&w) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    #[test]
    fn density_violation_example() {
        let mean = State1::new_1d(1.0, 0.0, 2.5);
        let node = State1::new_1d(-0.1, 0.0, 0.25);
        let t = theta_star(&GAS, &node, &mean);
        assert_abs_diff_eq!(t, 0.1 / 1.1, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_matches_bisection() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut checked = 0;
        while checked < 500 {
            let mean = State1::from_primitive(
                rng.gen_range(0.1..3.0),
                &[rng.gen_range(-2.0..2.0)],
                rng.gen_range(0.1..3.0),
                &GAS,
            );
            let node = State1::new_1d(
                rng.gen_range(-1.0..3.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-1.0..6.0),
            );
            if GAS.is_admissible(&node) {
                continue;
            }
            let closed = theta_star(&GAS, &node, &mean);
            let bisect = theta_by_bisection(&node, &mean);
            assert!((closed - bisect).abs() < 1e-8, "{node:?} / {mean:?}: {closed} vs {bisect}");
            checked += 1;
        }
    }

    fn basis(ne: usize, k: usize) -> GpcBasis {
        GpcBasis::with_default_quadrature(ElementPartition::uniform(-1.0, 1.0, ne).unwrap(), k).unwrap()
    }

    #[test]
    fn admissible_polynomial_gives_zero_theta() {
        let b = basis(1, 3);
        let coeffs = vec![
            State1::new_1d(1.0, 0.0, 2.5),
            State1::new_1d(0.1, 0.0, 0.2),
            State1::zero(),
            State1::zero(),
        ];
        assert_eq!(limiter_theta(&coeffs, &b, &GAS, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn limiting_keeps_mean_and_restores_admissibility() {
        let b = basis(1, 4);
        let mut coeffs = vec![
            State1::new_1d(0.5, 0.1, 1.0),
            State1::new_1d(0.4, 0.3, 0.9),
            State1::new_1d(-0.2, 0.1, -0.3),
            State1::new_1d(0.1, -0.2, 0.4),
            State1::new_1d(0.05, 0.05, -0.1),
        ];
        let mean = coeffs[0];
        let theta = limit_block(&mut coeffs, &b, &GAS, 1e-10).unwrap();
        assert!(theta > 0.0 && theta <= 1.0);
        assert_eq!(coeffs[0], mean);
        for u in b.reconstruct(&coeffs) {
            assert!(GAS.is_admissible(&u));
        }
        // Idempotent: nothing left to limit.
        let again = limiter_theta(&coeffs, &b, &GAS, 1e-10).unwrap();
        assert_eq!(again, 0.0);
    }

    #[test]
    fn full_limiting_zeroes_higher_moments() {
        let mut coeffs = vec![State1::new_1d(1.0, 0.0, 2.5), State1::new_1d(3.0, 0.0, 1.0)];
        scale_higher(&mut coeffs, 1.0);
        assert_eq!(coeffs[1], State1::zero());
        assert_eq!(coeffs[0], State1::new_1d(1.0, 0.0, 2.5));
    }

    #[test]
    fn inadmissible_mean_is_an_error() {
        let b = basis(1, 1);
        let coeffs = vec![State1::new_1d(-1.0, 0.0, 2.5), State1::zero()];
        assert!(limiter_theta(&coeffs, &b, &GAS, 1e-10).is_err());
    }

    #[test]
    fn disabled_limiter_is_identity() {
        let b = basis(2, 2);
        let mut f = MomentField::<3>::zeros(3, 2, 3);
        for blk in f.blocks_mut() {
            blk[0] = State1::new_1d(1.0, 0.0, 2.5);
            blk[1] = State1::new_1d(5.0, 0.0, 5.0);
        }
        let before = f.clone();
        apply_limiter(&mut f, &b, &GAS, &LimiterConfig { enabled: false, epsilon: 1e-10 }).unwrap();
        assert_eq!(f, before);
        let stats = apply_limiter(&mut f, &b, &GAS, &LimiterConfig::default()).unwrap();
        assert_eq!(stats.limited_blocks, 6);
        for (a, b) in f.blocks().zip(before.blocks()) {
            assert_eq!(a[0], b[0]);
        }
    }
}
