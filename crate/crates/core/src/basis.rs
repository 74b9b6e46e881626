//! Multi-element partition of the random interval, local orthonormal
//! Legendre bases and the quadrature rules used for every moment integral.
//!
//! All per-element work happens in the reference frame `t ∈ [-1, 1]`;
//! the element-local uniform density is `1/|I_l|`, so quadrature weights
//! on every element sum to one and coefficients are stored in that frame.

use std::f64::consts::PI;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::euler::ConservedState;

/// Uniform decomposition of `(lo, hi)` into disjoint elements.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementPartition {
    boundaries: Vec<f64>,
}

impl ElementPartition {
    pub fn uniform(lo: f64, hi: f64, n_elements: usize) -> Result<Self> {
        if n_elements == 0 {
            return Err(Error::invalid("element count must be positive"));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid(format!(
                "random domain ({lo}, {hi}) must satisfy lo < hi"
            )));
        }
        let width = (hi - lo) / n_elements as f64;
        let mut boundaries: Vec<f64> = (0..=n_elements).map(|l| lo + l as f64 * width).collect();
        boundaries[n_elements] = hi;
        Ok(Self { boundaries })
    }

    pub fn n_elements(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn lo(&self) -> f64 {
        self.boundaries[0]
    }

    pub fn hi(&self) -> f64 {
        self.boundaries[self.n_elements()]
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn element(&self, l: usize) -> (f64, f64) {
        (self.boundaries[l], self.boundaries[l + 1])
    }

    pub fn width(&self, l: usize) -> f64 {
        self.boundaries[l + 1] - self.boundaries[l]
    }

    /// `P(χ_l = 1)` for a uniformly distributed ξ.
    pub fn probability(&self, l: usize) -> f64 {
        self.width(l) / (self.hi() - self.lo())
    }

    /// Element containing `xi`; boundary points belong to the element on their right,
    /// except the global upper end.
    pub fn locate(&self, xi: f64) -> Option<usize> {
        if xi < self.lo() || xi > self.hi() {
            return None;
        }
        let n = self.n_elements();
        let idx = self.boundaries.partition_point(|&b| b <= xi);
        Some(idx.saturating_sub(1).min(n - 1))
    }

    pub fn to_reference(&self, l: usize, xi: f64) -> f64 {
        let (a, b) = self.element(l);
        (2.0 * xi - a - b) / (b - a)
    }

    pub fn from_reference(&self, l: usize, t: f64) -> f64 {
        let (a, b) = self.element(l);
        0.5 * (a + b) + 0.5 * (b - a) * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    GaussLegendre,
    ClenshawCurtis,
}

impl FromStr for QuadratureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss" | "gauss_legendre" | "gauss-legendre" => Ok(Self::GaussLegendre),
            "cc" | "clenshaw_curtis" | "clenshaw-curtis" => Ok(Self::ClenshawCurtis),
            other => Err(Error::invalid(format!("unknown quadrature kind `{other}`"))),
        }
    }
}

/// Quadrature on an interval with weights that include the uniform density,
/// i.e. they sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Affine image of a reference rule on `[-1, 1]`; weights are unchanged
    /// since they already carry the normalized density.
    pub fn mapped(&self, a: f64, b: f64) -> QuadratureRule {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        QuadratureRule {
            kind: self.kind,
            nodes: self.nodes.iter().map(|&t| mid + half * t).collect(),
            weights: self.weights.clone(),
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Legendre polynomial `P_n(t)` and its derivative.
fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p1 = t;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * t * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (t * p1 - p0) / (t * t - 1.0);
    (p1, dp)
}

/// Gauss–Legendre rule with `n` nodes on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::invalid("Gauss rule needs at least one node"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, t);
            let dt = p / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, t);
        // Half of 2/((1-t^2) P_n'(t)^2): the uniform density on [-1, 1].
        let w = 1.0 / ((1.0 - t * t) * dp * dp);
        nodes[i] = -t;
        nodes[n - 1 - i] = t;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule {
        kind: QuadratureKind::GaussLegendre,
        nodes,
        weights,
    })
}

/// Nested Clenshaw–Curtis rule; level `ℓ` has `2^ℓ + 1` nodes, level 0 is the midpoint.
pub fn clenshaw_curtis(level: usize) -> Result<QuadratureRule> {
    if level > 30 {
        return Err(Error::invalid(format!("Clenshaw-Curtis level {level} too large")));
    }
    if level == 0 {
        return Ok(QuadratureRule {
            kind: QuadratureKind::ClenshawCurtis,
            nodes: vec![0.0],
            weights: vec![1.0],
        });
    }
    let m = 1usize << level;
    let mf = m as f64;
    // -cos(jπ/m) written as a sine of an exact ratio so that nested levels share
    // bit-identical nodes and the midpoint is exactly zero.
    let nodes = (0..=m)
        .map(|j| ((2.0 * j as f64 - mf) / mf * std::f64::consts::FRAC_PI_2).sin())
        .collect();
    let weights = (0..=m)
        .map(|j| {
            let theta = (j as f64 * PI) / mf;
            let mut s = 0.0;
            for k in 1..=m / 2 {
                let b = if 2 * k == m { 1.0 } else { 2.0 };
                let kf = k as f64;
                s += b / (4.0 * kf * kf - 1.0) * (2.0 * kf * theta).cos();
            }
            let c = if j == 0 || j == m { 1.0 } else { 2.0 };
            // Reference weights integrate over [-1, 1]; halve for the density.
            0.5 * c / mf * (1.0 - s)
        })
        .collect();
    Ok(QuadratureRule {
        kind: QuadratureKind::ClenshawCurtis,
        nodes,
        weights,
    })
}

/// Quadrature of the given kind mapped onto `element`. `count_or_level` is the node
/// count for Gauss rules and the level for Clenshaw–Curtis.
pub fn build_quadrature(
    kind: QuadratureKind,
    count_or_level: usize,
    element: (f64, f64),
) -> Result<QuadratureRule> {
    let reference = match kind {
        QuadratureKind::GaussLegendre => gauss_legendre(count_or_level)?,
        QuadratureKind::ClenshawCurtis => clenshaw_curtis(count_or_level)?,
    };
    if !(element.0 < element.1) {
        return Err(Error::invalid("quadrature element must satisfy a < b"));
    }
    Ok(reference.mapped(element.0, element.1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub kind: QuadratureKind,
    pub count_or_level: usize,
}

impl QuadratureSpec {
    /// Gauss rule with `2(K+1)` nodes per element.
    pub fn default_for_degree(degree: usize) -> Self {
        Self {
            kind: QuadratureKind::GaussLegendre,
            count_or_level: 2 * (degree + 1),
        }
    }

    pub fn gauss(points: usize) -> Self {
        Self {
            kind: QuadratureKind::GaussLegendre,
            count_or_level: points,
        }
    }

    /// Number of nodes per element.
    pub fn node_count(&self) -> usize {
        match (self.kind, self.count_or_level) {
            (QuadratureKind::GaussLegendre, n) => n,
            (QuadratureKind::ClenshawCurtis, 0) => 1,
            (QuadratureKind::ClenshawCurtis, l) => (1 << l) + 1,
        }
    }
}

/// Orthonormal Legendre polynomial `sqrt(2k+1) P_k(t)` for the uniform density on `[-1, 1]`.
pub fn orthonormal_legendre(k: usize, t: f64) -> f64 {
    legendre_with_derivative(k, t).0 * ((2 * k + 1) as f64).sqrt()
}

/// All orthonormal Legendre values `φ_0..=φ_degree` at `t`.
pub fn orthonormal_legendre_all(degree: usize, t: f64, out: &mut [f64]) {
    let mut p_prev = 1.0;
    out[0] = 1.0;
    if degree == 0 {
        return;
    }
    let mut p = t;
    out[1] = 3f64.sqrt() * t;
    for k in 1..degree {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * t * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
        out[k + 1] = ((2 * k + 3) as f64).sqrt() * p;
    }
}

/// Multi-element gPC basis: one local orthonormal family per element, shared
/// reference-frame quadrature and a tabulation of `φ_k` at the nodes.
#[derive(Debug, Clone)]
pub struct GpcBasis {
    partition: ElementPartition,
    degree: usize,
    rule: QuadratureRule,
    /// `phi[q * n_modes + k] = φ_k(t_q)`.
    phi: Vec<f64>,
    element_nodes: Vec<Vec<f64>>,
}

impl GpcBasis {
    pub fn new(partition: ElementPartition, degree: usize, quadrature: QuadratureSpec) -> Result<Self> {
        let rule = match quadrature.kind {
            QuadratureKind::GaussLegendre => gauss_legendre(quadrature.count_or_level)?,
            QuadratureKind::ClenshawCurtis => clenshaw_curtis(quadrature.count_or_level)?,
        };
        let n_modes = degree + 1;
        let mut phi = vec![0.0; rule.len() * n_modes];
        for (q, &t) in rule.nodes.iter().enumerate() {
            orthonormal_legendre_all(degree, t, &mut phi[q * n_modes..(q + 1) * n_modes]);
        }
        let element_nodes = (0..partition.n_elements())
            .map(|l| rule.nodes.iter().map(|&t| partition.from_reference(l, t)).collect())
            .collect();
        Ok(Self {
            partition,
            degree,
            rule,
            phi,
            element_nodes,
        })
    }

    /// Basis with the default Gauss rule of `2(K+1)` nodes.
    pub fn with_default_quadrature(partition: ElementPartition, degree: usize) -> Result<Self> {
        Self::new(partition, degree, QuadratureSpec::default_for_degree(degree))
    }

    pub fn partition(&self) -> &ElementPartition {
        &self.partition
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_modes(&self) -> usize {
        self.degree + 1
    }

    pub fn n_elements(&self) -> usize {
        self.partition.n_elements()
    }

    pub fn n_nodes(&self) -> usize {
        self.rule.len()
    }

    pub fn reference_rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn weights(&self) -> &[f64] {
        &self.rule.weights
    }

    /// Quadrature nodes of element `l` in ξ.
    pub fn nodes(&self, l: usize) -> &[f64] {
        &self.element_nodes[l]
    }

    pub fn element_probability(&self, l: usize) -> f64 {
        self.partition.probability(l)
    }

    pub fn element_probabilities(&self) -> Vec<f64> {
        (0..self.n_elements()).map(|l| self.element_probability(l)).collect()
    }

    /// `φ_0(t_q), ..., φ_K(t_q)`.
    #[inline]
    pub fn phi_at_node(&self, q: usize) -> &[f64] {
        let n = self.n_modes();
        &self.phi[q * n..(q + 1) * n]
    }

    /// Values of every basis polynomial of element `l` at `xi`.
    pub fn eval_basis(&self, l: usize, xi: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.n_modes()];
        orthonormal_legendre_all(self.degree, self.partition.to_reference(l, xi), &mut out);
        out
    }

    /// Quadrature projection `Σ_q w_q u_q φ_k(t_q)` of samples at the nodes of element `l`.
    pub fn project<const N: usize>(
        &self,
        samples: &[ConservedState<N>],
        l: usize,
    ) -> Result<Vec<ConservedState<N>>> {
        if l >= self.n_elements() {
            return Err(Error::invalid(format!("element index {l} out of range")));
        }
        if samples.len() != self.n_nodes() {
            return Err(Error::NodeCountMismatch {
                expected: self.n_nodes(),
                got: samples.len(),
            });
        }
        let mut coeffs = vec![ConservedState::zero(); self.n_modes()];
        self.project_into(samples, &mut coeffs);
        Ok(coeffs)
    }

    /// Scalar version of [`GpcBasis::project`].
    pub fn project_scalar(&self, samples: &[f64]) -> Result<Vec<f64>> {
        if samples.len() != self.n_nodes() {
            return Err(Error::NodeCountMismatch {
                expected: self.n_nodes(),
                got: samples.len(),
            });
        }
        let mut out = vec![0.0; self.n_modes()];
        for (q, (&u, &w)) in samples.iter().zip(self.weights()).enumerate() {
            for (c, &p) in out.iter_mut().zip(self.phi_at_node(q)) {
                *c += w * u * p;
            }
        }
        Ok(out)
    }

    pub(crate) fn project_into<const N: usize>(
        &self,
        samples: &[ConservedState<N>],
        coeffs: &mut [ConservedState<N>],
    ) {
        coeffs.iter_mut().for_each(|c| *c = ConservedState::zero());
        for (q, (u, &w)) in samples.iter().zip(self.weights()).enumerate() {
            for (c, &p) in coeffs.iter_mut().zip(self.phi_at_node(q)) {
                c.add_scaled(w * p, u);
            }
        }
    }

    /// Evaluates the polynomial with `coeffs` at every quadrature node.
    pub fn reconstruct_into<const N: usize>(
        &self,
        coeffs: &[ConservedState<N>],
        out: &mut [ConservedState<N>],
    ) {
        for (q, o) in out.iter_mut().enumerate() {
            let mut u = ConservedState::zero();
            for (c, &p) in coeffs.iter().zip(self.phi_at_node(q)) {
                u.add_scaled(p, c);
            }
            *o = u;
        }
    }

    pub fn reconstruct<const N: usize>(&self, coeffs: &[ConservedState<N>]) -> Vec<ConservedState<N>> {
        let mut out = vec![ConservedState::zero(); self.n_nodes()];
        self.reconstruct_into(coeffs, &mut out);
        out
    }

    /// Evaluates the element-`l` polynomial at an arbitrary `xi`.
    pub fn evaluate<const N: usize>(&self, coeffs: &[ConservedState<N>], l: usize, xi: f64) -> ConservedState<N> {
        let phi = self.eval_basis(l, xi);
        let mut u = ConservedState::zero();
        for (c, &p) in coeffs.iter().zip(&phi) {
            u.add_scaled(p, c);
        }
        u
    }
}
