//! Partitions of claim arrays and connectedness across partitions.
//!
//! A partition splits the present cells of a layout into disjoint non-empty
//! subsets; common shocks are parameterized per subset. Given several
//! partitions of the same array, two cells are connected when a chain of
//! overlapping subsets joins them; the maximal connected sets are the
//! equivalence classes over which shock CoVs must be constant in a balanced
//! model.

use crate::array::{ArrayLayout, CellId};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionKind {
    ArrayWide,
    CellWise,
    RowWise,
    ColumnWise,
    DiagonalWise,
    Custom,
}

impl std::fmt::Display for PartitionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PartitionKind::ArrayWide => "array-wide",
            PartitionKind::CellWise => "cell-wise",
            PartitionKind::RowWise => "row-wise",
            PartitionKind::ColumnWise => "column-wise",
            PartitionKind::DiagonalWise => "diagonal-wise",
            PartitionKind::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// Disjoint non-empty subsets covering the present cells of a layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    kind: PartitionKind,
    subsets: Vec<BTreeSet<CellId>>,
    cell_to_subset: BTreeMap<CellId, usize>,
}

impl Partition {
    /// One of the five standard partitions, restricted to the present cells.
    /// Subsets that end up empty under the mask are dropped.
    pub fn standard(layout: &ArrayLayout, kind: PartitionKind) -> Result<Self> {
        let key: fn(CellId) -> u64 = match kind {
            PartitionKind::ArrayWide => |_| 0,
            PartitionKind::CellWise => |c| (u64::from(c.i()) << 32) | u64::from(c.j()),
            PartitionKind::RowWise => |c| u64::from(c.i()),
            PartitionKind::ColumnWise => |c| u64::from(c.j()),
            PartitionKind::DiagonalWise => |c| u64::from(c.diagonal()),
            PartitionKind::Custom => {
                return Err(Error::PartitionKindNeedsSubsets(kind.to_string()))
            }
        };
        let mut groups: BTreeMap<u64, BTreeSet<CellId>> = BTreeMap::new();
        for c in layout.cells() {
            groups.entry(key(c)).or_default().insert(c);
        }
        Ok(Self::assemble(kind, groups.into_values().collect()))
    }

    /// A validated custom partition: subsets must be non-empty, pairwise
    /// disjoint and jointly cover the present cells.
    pub fn custom(layout: &ArrayLayout, subsets: Vec<BTreeSet<CellId>>) -> Result<Self> {
        let mut seen: BTreeSet<CellId> = BTreeSet::new();
        let mut overlap = Vec::new();
        let mut foreign = Vec::new();
        for (idx, subset) in subsets.iter().enumerate() {
            if subset.is_empty() {
                return Err(Error::PartitionEmptySubset(idx));
            }
            for &c in subset {
                if !layout.contains(c) {
                    foreign.push(c);
                } else if !seen.insert(c) {
                    overlap.push(c);
                }
            }
        }
        if !foreign.is_empty() {
            return Err(Error::PartitionForeignCells(foreign));
        }
        if !overlap.is_empty() {
            return Err(Error::PartitionOverlap(overlap));
        }
        let gaps: Vec<CellId> = layout.cells().filter(|c| !seen.contains(c)).collect();
        if !gaps.is_empty() {
            return Err(Error::PartitionGap(gaps));
        }
        Ok(Self::assemble(PartitionKind::Custom, subsets))
    }

    /// Semi-diagonal partition splitting each calendar diagonal at row `i0`:
    /// one subset per `(t, i <= i0)` family followed by one per
    /// `(t, i > i0)` family, empty subsets dropped.
    pub fn split_diagonal(layout: &ArrayLayout, i0: u32) -> Self {
        let mut low: BTreeMap<u32, BTreeSet<CellId>> = BTreeMap::new();
        let mut high: BTreeMap<u32, BTreeSet<CellId>> = BTreeMap::new();
        for c in layout.cells() {
            let side = if c.i() <= i0 { &mut low } else { &mut high };
            side.entry(c.diagonal()).or_default().insert(c);
        }
        let subsets = low.into_values().chain(high.into_values()).collect();
        Self::assemble(PartitionKind::Custom, subsets)
    }

    fn assemble(kind: PartitionKind, subsets: Vec<BTreeSet<CellId>>) -> Self {
        let mut cell_to_subset = BTreeMap::new();
        for (idx, subset) in subsets.iter().enumerate() {
            for &c in subset {
                cell_to_subset.insert(c, idx);
            }
        }
        Self {
            kind,
            subsets,
            cell_to_subset,
        }
    }

    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    pub fn subsets(&self) -> &[BTreeSet<CellId>] {
        &self.subsets
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// Index of the subset containing `cell`, when the cell is covered.
    pub fn subset_of(&self, cell: CellId) -> Option<usize> {
        self.cell_to_subset.get(&cell).copied()
    }

    /// Total number of cells covered by the partition.
    pub fn covered_cells(&self) -> usize {
        self.cell_to_subset.len()
    }
}

/// Maximal sets of mutually connected cells, ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClasses {
    classes: Vec<BTreeSet<CellId>>,
    index: BTreeMap<CellId, usize>,
}

impl EquivalenceClasses {
    pub fn classes(&self) -> &[BTreeSet<CellId>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Index of the class containing `cell`.
    pub fn class_of(&self, cell: CellId) -> Option<usize> {
        self.index.get(&cell).copied()
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        Self {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        // Path compression.
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// Connected components of the present cells under the given partitions.
///
/// Cells are linked whenever they share a subset of any partition; subset
/// cells outside the layout's mask are ignored, so the same partitions can
/// be reused against a reduced mask.
pub fn equivalence_classes<'a, I>(layout: &ArrayLayout, partitions: I) -> EquivalenceClasses
where
    I: IntoIterator<Item = &'a Partition>,
{
    let cells: Vec<CellId> = layout.cells().collect();
    let ids: BTreeMap<CellId, usize> = cells.iter().enumerate().map(|(idx, &c)| (c, idx)).collect();
    let mut uf = UnionFind::new(cells.len());
    for partition in partitions {
        for subset in partition.subsets() {
            let mut members = subset.iter().filter_map(|c| ids.get(c).copied());
            if let Some(first) = members.next() {
                for other in members {
                    uf.union(first, other);
                }
            }
        }
    }
    let mut grouped: BTreeMap<usize, BTreeSet<CellId>> = BTreeMap::new();
    for (idx, &c) in cells.iter().enumerate() {
        grouped.entry(uf.find(idx)).or_default().insert(c);
    }
    // Deterministic ordering by smallest contained cell; BTreeMap iteration
    // over roots is arbitrary with respect to that, so re-sort.
    let mut classes: Vec<BTreeSet<CellId>> = grouped.into_values().collect();
    classes.sort_by_key(|class| *class.iter().next().expect("classes are non-empty"));
    let mut index = BTreeMap::new();
    for (idx, class) in classes.iter().enumerate() {
        for &c in class {
            index.insert(c, idx);
        }
    }
    EquivalenceClasses { classes, index }
}
