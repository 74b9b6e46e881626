use crate::error::{Error, Result};
use crate::euler::{ConservedState, Direction};

/// Uniform cell partition of one coordinate axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub cells: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Axis {
    pub fn new(cells: usize, lo: f64, hi: f64) -> Result<Self> {
        if cells == 0 {
            return Err(Error::invalid("cell count must be positive"));
        }
        if !(lo < hi) {
            return Err(Error::invalid(format!("axis extent [{lo}, {hi}] is empty")));
        }
        Ok(Self { cells, lo, hi })
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.spacing()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition<const N: usize> {
    /// Zero-gradient: the ghost cell copies the adjacent interior cell.
    Transmissive,
    /// Fixed deterministic state; its moments are `(u*, 0, ..., 0)`.
    Dirichlet(ConservedState<N>),
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Low,
    High,
}

/// Where a face neighbour's data comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Neighbor<const N: usize> {
    Cell(usize),
    Fixed(ConservedState<N>),
}

/// Uniform rectangular grid in `N - 2` space dimensions. Cells are numbered
/// `i * ny + j` (x-index major).
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredGrid<const N: usize> {
    x: Axis,
    y: Option<Axis>,
    /// Boundary conditions in the order x-low, x-high, y-low, y-high.
    bc: [BoundaryCondition<N>; 4],
}

impl<const N: usize> StructuredGrid<N> {
    pub fn dims(&self) -> usize {
        N - 2
    }

    pub fn x_axis(&self) -> &Axis {
        &self.x
    }

    pub fn y_axis(&self) -> Option<&Axis> {
        self.y.as_ref()
    }

    pub fn nx(&self) -> usize {
        self.x.cells
    }

    pub fn ny(&self) -> usize {
        self.y.map_or(1, |a| a.cells)
    }

    pub fn n_cells(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn dx(&self) -> f64 {
        self.x.spacing()
    }

    pub fn dy(&self) -> f64 {
        self.y.map_or(1.0, |a| a.spacing())
    }

    pub fn spacing(&self, dir: Direction) -> f64 {
        match dir {
            Direction::X => self.dx(),
            Direction::Y => self.dy(),
        }
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny() + j
    }

    pub fn ij(&self, cell: usize) -> (usize, usize) {
        (cell / self.ny(), cell % self.ny())
    }

    /// Cell center; the y-coordinate is 0 in 1D.
    pub fn center(&self, cell: usize) -> (f64, f64) {
        let (i, j) = self.ij(cell);
        (self.x.center(i), self.y.map_or(0.0, |a| a.center(j)))
    }

    pub fn boundary(&self, dir: Direction, side: Side) -> &BoundaryCondition<N> {
        &self.bc[2 * dir.index() + usize::from(side == Side::High)]
    }

    pub fn set_boundary(&mut self, dir: Direction, side: Side, bc: BoundaryCondition<N>) {
        self.bc[2 * dir.index() + usize::from(side == Side::High)] = bc;
    }

    pub fn with_boundary_everywhere(mut self, bc: BoundaryCondition<N>) -> Self {
        self.bc = [bc; 4];
        self
    }

    /// Neighbour of `cell` across its `side` face in direction `dir`.
    pub fn neighbor(&self, cell: usize, dir: Direction, side: Side) -> Neighbor<N> {
        let (i, j) = self.ij(cell);
        let (pos, n) = match dir {
            Direction::X => (i, self.nx()),
            Direction::Y => (j, self.ny()),
        };
        let at = |p: usize| match dir {
            Direction::X => self.index(p, j),
            Direction::Y => self.index(i, p),
        };
        let inside = match side {
            Side::Low => pos.checked_sub(1),
            Side::High => Some(pos + 1).filter(|&p| p < n),
        };
        if let Some(p) = inside {
            return Neighbor::Cell(at(p));
        }
        match self.boundary(dir, side) {
            BoundaryCondition::Transmissive => Neighbor::Cell(cell),
            BoundaryCondition::Dirichlet(u) => Neighbor::Fixed(*u),
            BoundaryCondition::Periodic => Neighbor::Cell(at(match side {
                Side::Low => n - 1,
                Side::High => 0,
            })),
        }
    }
}

impl StructuredGrid<3> {
    pub fn new_1d(
        cells: usize,
        lo: f64,
        hi: f64,
        left: BoundaryCondition<3>,
        right: BoundaryCondition<3>,
    ) -> Result<Self> {
        Ok(Self {
            x: Axis::new(cells, lo, hi)?,
            y: None,
            bc: [left, right, BoundaryCondition::Transmissive, BoundaryCondition::Transmissive],
        })
    }
}

impl StructuredGrid<4> {
    pub fn new_2d(x: Axis, y: Axis, bc: BoundaryCondition<4>) -> Self {
        Self { x, y: Some(y), bc: [bc; 4] }
    }
}
