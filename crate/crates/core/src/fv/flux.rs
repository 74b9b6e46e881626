use std::str::FromStr;

use crate::error::{Error, Result};
use crate::euler::{ConservedState, Direction, GasModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NumericalFlux {
    #[default]
    Hll,
    /// Global Lax–Friedrichs; the viscosity is the per-step maximal wave speed.
    LaxFriedrichs,
}

impl FromStr for NumericalFlux {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hll" => Ok(Self::Hll),
            "lax_friedrichs" | "lf" => Ok(Self::LaxFriedrichs),
            other => Err(Error::invalid(format!("unknown numerical flux `{other}`"))),
        }
    }
}

impl NumericalFlux {
    /// Interface flux without admissibility checks, for use inside solver loops
    /// whose inputs are already known to be admissible.
    #[inline]
    pub fn eval_unchecked<const N: usize>(
        self,
        model: &GasModel,
        left: &ConservedState<N>,
        right: &ConservedState<N>,
        dir: Direction,
        lambda_max: f64,
    ) -> ConservedState<N> {
        match self {
            NumericalFlux::Hll => hll_unchecked(model, left, right, dir),
            NumericalFlux::LaxFriedrichs => lax_friedrichs_unchecked(model, left, right, dir, lambda_max),
        }
    }

    pub fn eval<const N: usize>(
        self,
        model: &GasModel,
        left: &ConservedState<N>,
        right: &ConservedState<N>,
        dir: Direction,
        lambda_max: f64,
    ) -> Result<ConservedState<N>> {
        check_pair(model, left, right)?;
        Ok(self.eval_unchecked(model, left, right, dir, lambda_max))
    }
}

fn check_pair<const N: usize>(model: &GasModel, left: &ConservedState<N>, right: &ConservedState<N>) -> Result<()> {
    for u in [left, right] {
        if !model.is_admissible(u) {
            return Err(Error::inadmissible(u, "numerical flux input"));
        }
    }
    Ok(())
}

/// Davis wave-speed estimates `(s_L, s_R)`.
#[inline]
pub fn hll_wave_speeds<const N: usize>(
    model: &GasModel,
    left: &ConservedState<N>,
    right: &ConservedState<N>,
    dir: Direction,
) -> (f64, f64) {
    let (vl, cl) = (left.velocity(dir), model.sound_speed_unchecked(left));
    let (vr, cr) = (right.velocity(dir), model.sound_speed_unchecked(right));
    ((vl - cl).min(vr - cr), (vl + cl).max(vr + cr))
}

#[inline]
fn hll_unchecked<const N: usize>(
    model: &GasModel,
    left: &ConservedState<N>,
    right: &ConservedState<N>,
    dir: Direction,
) -> ConservedState<N> {
    let (sl, sr) = hll_wave_speeds(model, left, right, dir);
    if sl >= 0.0 {
        return model.flux_unchecked(left, dir);
    }
    if sr <= 0.0 {
        return model.flux_unchecked(right, dir);
    }
    let fl = model.flux_unchecked(left, dir);
    let fr = model.flux_unchecked(right, dir);
    let inv = 1.0 / (sr - sl);
    let mut out = [0.0; N];
    for (c, o) in out.iter_mut().enumerate() {
        *o = (sr * fl[c] - sl * fr[c] + sl * sr * (right[c] - left[c])) * inv;
    }
    ConservedState(out)
}

/// HLL flux with Davis wave-speed estimates.
pub fn numerical_flux_hll<const N: usize>(
    model: &GasModel,
    left: &ConservedState<N>,
    right: &ConservedState<N>,
    dir: Direction,
) -> Result<ConservedState<N>> {
    check_pair(model, left, right)?;
    Ok(hll_unchecked(model, left, right, dir))
}

#[inline]
fn lax_friedrichs_unchecked<const N: usize>(
    model: &GasModel,
    left: &ConservedState<N>,
    right: &ConservedState<N>,
    dir: Direction,
    lambda_max: f64,
) -> ConservedState<N> {
    let fl = model.flux_unchecked(left, dir);
    let fr = model.flux_unchecked(right, dir);
    let mut out = [0.0; N];
    for (c, o) in out.iter_mut().enumerate() {
        *o = 0.5 * (fl[c] + fr[c] - lambda_max * (right[c] - left[c]));
    }
    ConservedState(out)
}

/// `½(f(u_L) + f(u_R) - λ_max (u_R - u_L))`.
pub fn numerical_flux_lax_friedrichs<const N: usize>(
    model: &GasModel,
    left: &ConservedState<N>,
    right: &ConservedState<N>,
    dir: Direction,
    lambda_max: f64,
) -> Result<ConservedState<N>> {
    check_pair(model, left, right)?;
    Ok(lax_friedrichs_unchecked(model, left, right, dir, lambda_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{State1, State2};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const GAS: GasModel = GasModel { gamma: 1.4 };

    fn close<const N: usize>(a: &ConservedState<N>, b: &ConservedState<N>, tol: f64) {
        for c in 0..N {
            assert!((a[c] - b[c]).abs() <= tol * b[c].abs().max(1.0), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn hll_consistency() {
        let u = State1::new_1d(1.0, 0.0, 2.5);
        let f = numerical_flux_hll(&GAS, &u, &u, Direction::X).unwrap();
        close(&f, &GAS.physical_flux(&u, Direction::X).unwrap(), 1e-15);
    }

    #[test]
    fn both_fluxes_consistent_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let u = State2::from_primitive(
                rng.gen_range(0.05..5.0),
                &[rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)],
                rng.gen_range(0.05..5.0),
                &GAS,
            );
            for &dir in Direction::all(2) {
                let exact = GAS.physical_flux(&u, dir).unwrap();
                close(&numerical_flux_hll(&GAS, &u, &u, dir).unwrap(), &exact, 1e-14);
                let lam = GAS.max_wave_speed(&u, dir).unwrap();
                close(&numerical_flux_lax_friedrichs(&GAS, &u, &u, dir, lam).unwrap(), &exact, 1e-14);
            }
        }
    }

    #[test]
    fn hll_reflection_symmetry() {
        let ul = State1::from_primitive(1.0, &[0.3], 1.0, &GAS);
        let ur = State1::from_primitive(0.2, &[-0.5], 0.3, &GAS);
        let f = numerical_flux_hll(&GAS, &ul, &ur, Direction::X).unwrap();
        let g = numerical_flux_hll(&GAS, &ur.mirrored(Direction::X), &ul.mirrored(Direction::X), Direction::X).unwrap();
        assert_abs_diff_eq!(f[0], -g[0], epsilon = 1e-14);
        assert_abs_diff_eq!(f[1], g[1], epsilon = 1e-14);
        assert_abs_diff_eq!(f[2], -g[2], epsilon = 1e-14);
    }

    #[test]
    fn sod_interface_selects_middle_state() {
        let ul = State1::new_1d(1.0, 0.0, 2.5);
        let ur = State1::new_1d(0.125, 0.0, 0.25);
        let (sl, sr) = hll_wave_speeds(&GAS, &ul, &ur, Direction::X);
        let cl = GAS.max_wave_speed(&ul, Direction::X).unwrap();
        let cr = GAS.max_wave_speed(&ur, Direction::X).unwrap();
        assert_abs_diff_eq!(sl, -cl, epsilon = 1e-15);
        assert_abs_diff_eq!(sr, cl.max(cr), epsilon = 1e-15);
        assert!(sl < 0.0 && sr > 0.0);
        let f = numerical_flux_hll(&GAS, &ul, &ur, Direction::X).unwrap();
        // Middle-state formula with zero velocities: f_L = (0, 1, 0), f_R = (0, 0.1, 0).
        let inv = 1.0 / (sr - sl);
        assert_abs_diff_eq!(f[0], sl * sr * (0.125 - 1.0) * inv, epsilon = 1e-15);
        assert_abs_diff_eq!(f[1], (sr * 1.0 - sl * 0.1) * inv, epsilon = 1e-15);
        assert_abs_diff_eq!(f[2], sl * sr * (0.25 - 2.5) * inv, epsilon = 1e-15);
    }

    #[test]
    fn lax_friedrichs_sod_jump() {
        let ul = State1::new_1d(1.0, 0.0, 2.5);
        let ur = State1::new_1d(0.125, 0.0, 0.25);
        let f = numerical_flux_lax_friedrichs(&GAS, &ul, &ur, Direction::X, 2.0).unwrap();
        assert_abs_diff_eq!(f[0], -(0.125 - 1.0), epsilon = 1e-15);
        assert_abs_diff_eq!(f[1], 0.5 * (1.0 + 0.1), epsilon = 1e-15);
        assert_abs_diff_eq!(f[2], -(0.25 - 2.5), epsilon = 1e-15);

        let g = numerical_flux_lax_friedrichs(&GAS, &ul, &ul, Direction::X, 0.0).unwrap();
        assert_eq!(g, GAS.physical_flux(&ul, Direction::X).unwrap());
    }

    #[test]
    fn inadmissible_inputs_are_rejected() {
        let good = State1::new_1d(1.0, 0.0, 2.5);
        let bad = State1::new_1d(-1.0, 0.0, 2.5);
        assert!(numerical_flux_hll(&GAS, &good, &bad, Direction::X).is_err());
        assert!(numerical_flux_lax_friedrichs(&GAS, &bad, &good, Direction::X, 1.0).is_err());
    }
}
