//! Binary partition trees over the unit hypercube.

use serde::{Deserialize, Serialize};

use crate::cell::Cell;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Node {
    /// Points with `x[coord] < threshold` go left.
    Split {
        coord: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        leaf: u32,
    },
}

/// One tree of the forest: its nodes, per-coordinate split totals and, for
/// budgeted CART growth, how many leaves short of the budget it stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomTree {
    d: usize,
    nodes: Vec<Node>,
    n_leaves: usize,
    split_counts: Vec<u32>,
    shortfall: usize,
}

impl RandomTree {
    /// Assembles a tree from nodes whose leaf ids are placeholders. Leaves are
    /// renumbered left to right and split totals are recomputed.
    pub(crate) fn from_nodes(d: usize, mut nodes: Vec<Node>, shortfall: usize) -> Self {
        let mut split_counts = vec![0u32; d];
        let mut next_leaf = 0u32;
        let mut stack = vec![0u32];
        while let Some(id) = stack.pop() {
            match nodes[id as usize] {
                Node::Split { coord, left, right, .. } => {
                    split_counts[coord as usize] += 1;
                    stack.push(right);
                    stack.push(left);
                }
                Node::Leaf { .. } => {
                    nodes[id as usize] = Node::Leaf { leaf: next_leaf };
                    next_leaf += 1;
                }
            }
        }
        Self { d, nodes, n_leaves: next_leaf as usize, split_counts, shortfall }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Number of internal nodes split on each coordinate.
    pub fn split_counts(&self) -> &[u32] {
        &self.split_counts
    }

    pub fn total_splits(&self) -> u32 {
        self.split_counts.iter().sum()
    }

    /// Leaves missing from the CART budget when growth ran out of splittable nodes.
    pub fn shortfall(&self) -> usize {
        self.shortfall
    }

    #[inline]
    pub fn leaf_of(&self, x: &[f64]) -> usize {
        let mut id = 0usize;
        loop {
            match self.nodes[id] {
                Node::Split { coord, threshold, left, right } => {
                    id = if x[coord as usize] < threshold { left } else { right } as usize;
                }
                Node::Leaf { leaf } => return leaf as usize,
            }
        }
    }

    /// Number of cuts along each coordinate on the root-to-leaf path of `x`.
    pub fn path_split_counts(&self, x: &[f64]) -> Vec<u32> {
        let mut counts = vec![0u32; self.d];
        let mut id = 0usize;
        while let Node::Split { coord, threshold, left, right } = self.nodes[id] {
            counts[coord as usize] += 1;
            id = if x[coord as usize] < threshold { left } else { right } as usize;
        }
        counts
    }

    /// The leaf cell containing `x`.
    pub fn leaf_cell(&self, x: &[f64]) -> Cell {
        let mut cell = Cell::unit(self.d);
        let mut id = 0usize;
        while let Node::Split { coord, threshold, left, right } = self.nodes[id] {
            let j = coord as usize;
            if x[j] < threshold {
                cell.hi[j] = threshold;
                id = left as usize;
            } else {
                cell.lo[j] = threshold;
                id = right as usize;
            }
        }
        cell
    }

    /// All leaf cells, indexed by leaf id.
    pub fn leaf_cells(&self) -> Vec<Cell> {
        let mut out = vec![Cell::unit(self.d); self.n_leaves];
        let mut stack = vec![(0u32, Cell::unit(self.d))];
        while let Some((id, cell)) = stack.pop() {
            match self.nodes[id as usize] {
                Node::Split { coord, threshold, left, right } => {
                    let (l, r) = cell.split(coord as usize, threshold);
                    stack.push((left, l));
                    stack.push((right, r));
                }
                Node::Leaf { leaf } => out[leaf as usize] = cell,
            }
        }
        out
    }

    /// Longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(0u32, 0usize)];
        while let Some((id, depth)) = stack.pop() {
            match self.nodes[id as usize] {
                Node::Split { left, right, .. } => {
                    stack.push((left, depth + 1));
                    stack.push((right, depth + 1));
                }
                Node::Leaf { .. } => best = best.max(depth),
            }
        }
        best
    }
}

/// Sum and count of responses per leaf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafStats {
    pub sum: Vec<f64>,
    pub count: Vec<u32>,
}

impl LeafStats {
    pub fn compute(tree: &RandomTree, rows: impl Iterator<Item = (impl AsRef<[f64]>, f64)>) -> Self {
        let mut sum = vec![0.0; tree.n_leaves()];
        let mut count = vec![0u32; tree.n_leaves()];
        for (x, y) in rows {
            let leaf = tree.leaf_of(x.as_ref());
            sum[leaf] += y;
            count[leaf] += 1;
        }
        Self { sum, count }
    }

    /// Leaf mean, or 0 on an empty leaf.
    #[inline]
    pub fn mean(&self, leaf: usize) -> f64 {
        match self.count[leaf] {
            0 => 0.0,
            c => self.sum[leaf] / c as f64,
        }
    }
}
