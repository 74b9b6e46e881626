use crate::euler::ConservedState;

/// Data attached to every (spatial cell, random element) pair, `stride` entries each.
///
/// Used both for gPC coefficients (`stride = K + 1`, see [`MomentField`]) and for
/// point values at the quadrature nodes (`stride = Q`, see [`NodeField`]).
#[derive(Debug, Clone, PartialEq)]
pub struct CellElementField<const N: usize> {
    n_cells: usize,
    n_elements: usize,
    stride: usize,
    data: Vec<ConservedState<N>>,
}

/// gPC coefficients `û_{k,i,l}` per cell `i`, element `l`, mode `k`.
pub type MomentField<const N: usize> = CellElementField<N>;
/// Point values per cell, element and quadrature node.
pub type NodeField<const N: usize> = CellElementField<N>;

impl<const N: usize> CellElementField<N> {
    pub fn zeros(n_cells: usize, n_elements: usize, stride: usize) -> Self {
        Self {
            n_cells,
            n_elements,
            stride,
            data: vec![ConservedState::zero(); n_cells * n_elements * stride],
        }
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    /// Entries per (cell, element): modes for moment fields, nodes for node fields.
    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn n_modes(&self) -> usize {
        self.stride
    }

    #[inline]
    fn offset(&self, cell: usize, l: usize) -> usize {
        (cell * self.n_elements + l) * self.stride
    }

    #[inline]
    pub fn block(&self, cell: usize, l: usize) -> &[ConservedState<N>] {
        let o = self.offset(cell, l);
        &self.data[o..o + self.stride]
    }

    #[inline]
    pub fn block_mut(&mut self, cell: usize, l: usize) -> &mut [ConservedState<N>] {
        let o = self.offset(cell, l);
        &mut self.data[o..o + self.stride]
    }

    /// All element blocks of one cell, contiguous.
    pub fn cell(&self, cell: usize) -> &[ConservedState<N>] {
        let o = self.offset(cell, 0);
        &self.data[o..o + self.n_elements * self.stride]
    }

    pub fn as_slice(&self) -> &[ConservedState<N>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [ConservedState<N>] {
        &mut self.data
    }

    /// Chunks of one (cell, element) block each, in (cell, element) order.
    pub fn blocks_mut(&mut self) -> std::slice::ChunksExactMut<'_, ConservedState<N>> {
        self.data.chunks_exact_mut(self.stride)
    }

    pub fn blocks(&self) -> std::slice::ChunksExact<'_, ConservedState<N>> {
        self.data.chunks_exact(self.stride)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|u| u.is_finite())
    }

    /// Largest componentwise difference to `other` (fields must have equal shape).
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.data.len(), other.data.len(), "field shapes differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).max_abs())
            .fold(0.0, f64::max)
    }
}
