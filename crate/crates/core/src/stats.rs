//! Expected value and variance of moment fields, relative error metrics and CSV output.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::basis::GpcBasis;
use crate::error::{Error, Result};
use crate::euler::ConservedState;
use crate::fv::{MomentField, StructuredGrid};

/// Per-cell mean and variance of every conserved component.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldStatistics {
    dims: usize,
    coords: Vec<[f64; 2]>,
    cell_volume: f64,
    n_components: usize,
    mean: Vec<f64>,
    variance: Vec<f64>,
    /// Negative round-off variances that were clamped to zero.
    pub clamped: usize,
}

impl FieldStatistics {
    pub fn from_states<const N: usize>(
        grid: &StructuredGrid<N>,
        per_cell: &[(ConservedState<N>, ConservedState<N>)],
        clamped: usize,
    ) -> Self {
        let coords = (0..grid.n_cells())
            .map(|c| {
                let (x, y) = grid.center(c);
                [x, y]
            })
            .collect();
        let mut clamped = clamped;
        let mut variance = Vec::with_capacity(per_cell.len() * N);
        for (_, v) in per_cell {
            for &x in &v.0 {
                if x < 0.0 {
                    clamped += 1;
                    variance.push(0.0);
                } else {
                    variance.push(x);
                }
            }
        }
        Self {
            dims: grid.dims(),
            coords,
            cell_volume: grid.cell_volume(),
            n_components: N,
            mean: per_cell.iter().flat_map(|(m, _)| m.0).collect(),
            variance,
            clamped,
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn n_cells(&self) -> usize {
        self.coords.len()
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    pub fn coords(&self, cell: usize) -> [f64; 2] {
        self.coords[cell]
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    pub fn mean(&self, cell: usize, component: usize) -> f64 {
        self.mean[cell * self.n_components + component]
    }

    pub fn variance(&self, cell: usize, component: usize) -> f64 {
        self.variance[cell * self.n_components + component]
    }

    pub fn mean_component(&self, component: usize) -> Vec<f64> {
        (0..self.n_cells()).map(|c| self.mean(c, component)).collect()
    }

    pub fn variance_component(&self, component: usize) -> Vec<f64> {
        (0..self.n_cells()).map(|c| self.variance(c, component)).collect()
    }

    /// Multiplies means by `c` and variances by `c²`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            mean: self.mean.iter().map(|m| m * c).collect(),
            variance: self.variance.iter().map(|v| v * c * c).collect(),
            ..self.clone()
        }
    }

    pub fn column_names(&self) -> Vec<String> {
        let mut cols = vec!["x".to_string()];
        if self.dims == 2 {
            cols.push("y".into());
        }
        for name in component_names(self.n_components) {
            cols.push(format!("E_{name}"));
            cols.push(format!("Var_{name}"));
        }
        cols
    }
}

fn component_names(n: usize) -> &'static [&'static str] {
    if n == 4 {
        &["rho", "mx", "my", "E"]
    } else {
        &["rho", "mx", "E"]
    }
}

/// `E[u] ≈ Σ_l P(ξ ∈ Ξ_l) û_{0,l}` per cell.
pub fn expectation<const N: usize>(field: &MomentField<N>, basis: &GpcBasis) -> Vec<ConservedState<N>> {
    let probs = basis.element_probabilities();
    (0..field.n_cells())
        .map(|cell| {
            let mut e = ConservedState::zero();
            for (l, &p) in probs.iter().enumerate() {
                e.add_scaled(p, &field.block(cell, l)[0]);
            }
            e
        })
        .collect()
}

/// `Var[u] ≈ Σ_l P_l (Σ_{k≥1} û_{k,l}² + (û_{0,l} - E)²)` per cell and component.
pub fn variance<const N: usize>(field: &MomentField<N>, basis: &GpcBasis) -> Vec<ConservedState<N>> {
    let probs = basis.element_probabilities();
    let mean = expectation(field, basis);
    (0..field.n_cells())
        .map(|cell| {
            let mut v = ConservedState::zero();
            for (l, &p) in probs.iter().enumerate() {
                let block = field.block(cell, l);
                for c in 0..N {
                    let local: f64 = block[1..].iter().map(|u| u[c] * u[c]).sum();
                    let shift = block[0][c] - mean[cell][c];
                    v[c] += p * (local + shift * shift);
                }
            }
            v
        })
        .collect()
}

/// Mean and variance of a moment field on its grid.
pub fn moment_statistics<const N: usize>(
    field: &MomentField<N>,
    basis: &GpcBasis,
    grid: &StructuredGrid<N>,
) -> FieldStatistics {
    let e = expectation(field, basis);
    let v = variance(field, basis);
    let per_cell: Vec<_> = e.into_iter().zip(v).collect();
    FieldStatistics::from_states(grid, &per_cell, 0)
}

/// Axis-aligned box restricting error norms; `y` is ignored in 1D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x: (f64, f64),
    pub y: Option<(f64, f64)>,
}

impl Window {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let inside = |v: f64, (lo, hi): (f64, f64)| v >= lo && v <= hi;
        inside(p[0], self.x) && self.y.is_none_or(|y| inside(p[1], y))
    }
}

/// Relative discrete L2 errors `(‖E - E_ref‖ / ‖E_ref‖, ‖Var - Var_ref‖ / ‖Var_ref‖)`
/// of one component, over the cells inside `window`.
pub fn relative_errors(
    computed: &FieldStatistics,
    reference: &FieldStatistics,
    component: usize,
    window: Option<&Window>,
) -> Result<(f64, f64)> {
    if computed.n_cells() != reference.n_cells() || computed.n_components != reference.n_components {
        return Err(Error::invalid("statistics are defined on different grids"));
    }
    if component >= computed.n_components {
        return Err(Error::invalid(format!("component {component} out of range")));
    }
    let w = computed.cell_volume;
    let (mut de, mut ne, mut dv, mut nv) = (0.0, 0.0, 0.0, 0.0);
    for cell in 0..computed.n_cells() {
        let (a, b) = (computed.coords(cell), reference.coords(cell));
        if (a[0] - b[0]).abs() > 1e-9 || (a[1] - b[1]).abs() > 1e-9 {
            return Err(Error::invalid(format!("cell {cell} centers differ")));
        }
        if window.is_some_and(|win| !win.contains(a)) {
            continue;
        }
        let (e, er) = (computed.mean(cell, component), reference.mean(cell, component));
        let (v, vr) = (computed.variance(cell, component), reference.variance(cell, component));
        de += w * (e - er).powi(2);
        ne += w * er * er;
        dv += w * (v - vr).powi(2);
        nv += w * vr * vr;
    }
    if ne == 0.0 || nv == 0.0 {
        return Err(Error::ZeroReferenceNorm);
    }
    Ok(((de / ne).sqrt(), (dv / nv).sqrt()))
}

/// Writes one header row and one row per cell in cell order.
pub fn write_csv_to(stats: &FieldStatistics, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{}", stats.column_names().join(","))?;
    let mut line = String::new();
    for cell in 0..stats.n_cells() {
        line.clear();
        let p = stats.coords(cell);
        write!(line, "{:.17e}", p[0]).unwrap();
        if stats.dims == 2 {
            write!(line, ",{:.17e}", p[1]).unwrap();
        }
        for c in 0..stats.n_components {
            write!(line, ",{:.17e},{:.17e}", stats.mean(cell, c), stats.variance(cell, c)).unwrap();
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_csv(stats: &FieldStatistics, path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io)?;
    let mut w = std::io::BufWriter::new(file);
    write_csv_to(stats, &mut w).map_err(io)?;
    w.flush().map_err(io)
}

/// Parses a file written by [`write_csv`]. The cell volume is not stored and is set to 1.
pub fn read_csv(path: &Path) -> Result<FieldStatistics> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::open(path).map_err(io)?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::invalid(format!("{}: empty file", path.display())))?
        .map_err(io)?;
    let cols: Vec<&str> = header.split(',').collect();
    let dims = if cols.get(1) == Some(&"y") { 2 } else { 1 };
    let n_components = (cols.len() - dims) / 2;
    if cols.len() != dims + 2 * n_components || !(n_components == 3 || n_components == 4) {
        return Err(Error::invalid(format!("{}: unexpected header `{header}`", path.display())));
    }
    let mut stats = FieldStatistics {
        dims,
        coords: Vec::new(),
        cell_volume: 1.0,
        n_components,
        mean: Vec::new(),
        variance: Vec::new(),
        clamped: 0,
    };
    for (row, line) in lines.enumerate() {
        let line = line.map_err(io)?;
        let vals = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::invalid(format!("{}: row {}: {e}", path.display(), row + 1)))?;
        if vals.len() != cols.len() {
            return Err(Error::invalid(format!("{}: row {} has {} fields", path.display(), row + 1, vals.len())));
        }
        stats.coords.push([vals[0], if dims == 2 { vals[1] } else { 0.0 }]);
        for c in 0..n_components {
            stats.mean.push(vals[dims + 2 * c]);
            stats.variance.push(vals[dims + 2 * c + 1]);
        }
    }
    Ok(stats)
}
