//! Modal filters damping high gPC moments. The zeroth moment is never touched.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fv::MomentField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterKind {
    None,
    L2,
    #[default]
    Exponential,
}

impl std::str::FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "off" => Ok(Self::None),
            "l2" => Ok(Self::L2),
            "exponential" | "exp" => Ok(Self::Exponential),
            other => Err(Error::invalid(format!("unknown filter kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    pub kind: FilterKind,
    /// Filter strength `λ ≥ 0`.
    pub strength: f64,
    /// Exponential filter order `α ≥ 1`.
    pub order: u32,
    /// Exponential filter only: raise the gain to `λΔt` instead of `λ`.
    pub dt_scaled: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            kind: FilterKind::Exponential,
            strength: 2.0,
            order: 10,
            dt_scaled: true,
        }
    }
}

impl FilterConfig {
    pub fn none() -> Self {
        Self {
            kind: FilterKind::None,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strength >= 0.0 && self.strength.is_finite()) {
            return Err(Error::invalid(format!("filter strength {} must be >= 0", self.strength)));
        }
        if self.kind == FilterKind::Exponential && self.order < 1 {
            return Err(Error::invalid("exponential filter order must be >= 1"));
        }
        Ok(())
    }
}

/// Multiplier applied to moment `k` of a degree-`degree` expansion.
///
/// L2: `1 / (1 + λ k²(k+1)²)`. Exponential: `exp(c (k/K)^α)^s` with `c = ln ε_M`
/// and `s = λΔt` or `λ`.
pub fn filter_gain(k: usize, degree: usize, config: &FilterConfig, dt: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let lambda = config.strength;
    match config.kind {
        FilterKind::None => 1.0,
        FilterKind::L2 => {
            let kf = k as f64;
            1.0 / (1.0 + lambda * kf * kf * (kf + 1.0) * (kf + 1.0))
        }
        FilterKind::Exponential => {
            let eta = k as f64 / degree as f64;
            let c = f64::EPSILON.ln();
            let s = if config.dt_scaled { lambda * dt } else { lambda };
            (s * c * eta.powi(config.order as i32)).exp()
        }
    }
}

/// Multiplies every moment `k` of every (cell, element) block by its gain.
pub fn apply_filter<const N: usize>(field: &mut MomentField<N>, config: &FilterConfig, dt: f64) {
    if config.kind == FilterKind::None {
        return;
    }
    let nm = field.n_modes();
    let gains: Vec<f64> = (0..nm).map(|k| filter_gain(k, nm - 1, config, dt)).collect();
    field.as_mut_slice().par_chunks_exact_mut(nm).for_each(|block| {
        for (u, &g) in block.iter_mut().zip(&gains).skip(1) {
            *u = *u * g;
        }
    });
}
