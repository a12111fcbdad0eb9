//! Claim-array geometry: cells, grids and presence masks.
//!
//! Cells are indexed 1-based by accident period `i` (row) and development
//! period `j` (column); the diagonal index `t = i + j - 1` groups cells of
//! one calendar period.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A 1-based `(i, j)` cell address. Serializes as the two-element array `[i, j]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(u32, u32)", into = "(u32, u32)")]
pub struct CellId {
    i: u32,
    j: u32,
}

impl CellId {
    pub fn new(i: u32, j: u32) -> Self {
        Self { i, j }
    }

    /// Accident period (row).
    pub fn i(&self) -> u32 {
        self.i
    }

    /// Development period (column).
    pub fn j(&self) -> u32 {
        self.j
    }

    /// Calendar-period diagonal `t = i + j - 1`.
    pub fn diagonal(&self) -> u32 {
        self.i + self.j - 1
    }
}

impl From<(u32, u32)> for CellId {
    fn from((i, j): (u32, u32)) -> Self {
        Self { i, j }
    }
}

impl From<CellId> for (u32, u32) {
    fn from(c: CellId) -> Self {
        (c.i, c.j)
    }
}

impl std::fmt::Display for CellId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// An `I x J` grid together with the set of observed (present) cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayLayout {
    rows: u32,
    cols: u32,
    present: BTreeSet<CellId>,
}

impl ArrayLayout {
    /// Every cell of the grid is present.
    pub fn full(rows: u32, cols: u32) -> Self {
        let present = (1..=rows)
            .flat_map(|i| (1..=cols).map(move |j| CellId::new(i, j)))
            .collect();
        Self {
            rows,
            cols,
            present,
        }
    }

    /// The claim triangle: a `size x size` grid keeping cells with
    /// `i + j - 1 <= size`.
    pub fn triangle(size: u32) -> Self {
        let present = (1..=size)
            .flat_map(|i| (1..=size + 1 - i).map(move |j| CellId::new(i, j)))
            .collect();
        Self {
            rows: size,
            cols: size,
            present,
        }
    }

    /// A layout with an explicit mask. Cells must lie inside the grid.
    pub fn from_cells<I>(rows: u32, cols: u32, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = CellId>,
    {
        let mut present = BTreeSet::new();
        for c in cells {
            if c.i() < 1 || c.i() > rows || c.j() < 1 || c.j() > cols {
                return Err(Error::CellOutOfBounds {
                    cell: c,
                    rows,
                    cols,
                });
            }
            present.insert(c);
        }
        Ok(Self {
            rows,
            cols,
            present,
        })
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn contains(&self, cell: CellId) -> bool {
        self.present.contains(&cell)
    }

    pub fn len(&self) -> usize {
        self.present.len()
    }

    pub fn is_empty(&self) -> bool {
        self.present.is_empty()
    }

    /// Present cells in lexicographic `(i, j)` order.
    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        self.present.iter().copied()
    }

    pub fn present(&self) -> &BTreeSet<CellId> {
        &self.present
    }

    pub fn is_subset_of(&self, other: &ArrayLayout) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.present.is_subset(&other.present)
    }

    /// The same grid with the given cells removed from the mask.
    pub fn without_cells<'a, I>(&self, cells: I) -> Self
    where
        I: IntoIterator<Item = &'a CellId>,
    {
        let mut present = self.present.clone();
        for c in cells {
            present.remove(c);
        }
        Self {
            rows: self.rows,
            cols: self.cols,
            present,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_mask() {
        let t = ArrayLayout::triangle(15);
        assert_eq!(t.len(), 120);
        assert!(t.contains(CellId::new(1, 15)));
        assert!(t.contains(CellId::new(15, 1)));
        assert!(!t.contains(CellId::new(2, 15)));
        assert_eq!(CellId::new(3, 5).diagonal(), 7);
    }

    #[test]
    fn full_grid_and_bounds() {
        let g = ArrayLayout::full(2, 3);
        assert_eq!(g.len(), 6);
        let bad = ArrayLayout::from_cells(2, 2, [CellId::new(3, 1)]);
        assert!(matches!(bad, Err(Error::CellOutOfBounds { .. })));
    }

    #[test]
    fn masking_is_subset() {
        let t = ArrayLayout::triangle(4);
        let masked = t.without_cells(&[CellId::new(1, 1), CellId::new(2, 2)]);
        assert_eq!(masked.len(), t.len() - 2);
        assert!(masked.is_subset_of(&t));
        assert!(!t.is_subset_of(&masked));
    }

    #[test]
    fn cells_are_lexicographic() {
        let t = ArrayLayout::triangle(3);
        let cells: Vec<_> = t.cells().collect();
        assert_eq!(cells[0], CellId::new(1, 1));
        assert_eq!(cells[1], CellId::new(1, 2));
        assert_eq!(cells.last().copied().unwrap(), CellId::new(3, 1));
    }
}
