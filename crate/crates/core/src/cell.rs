use serde::{Deserialize, Serialize};

/// Axis-aligned rectangle `Π [lo_j, hi_j)` inside the unit hypercube.
///
/// Faces lying on the upper boundary `hi_j = 1` are closed so every point of
/// `[0, 1]^d` belongs to exactly one leaf of a partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Cell {
    pub fn unit(d: usize) -> Self {
        Self { lo: vec![0.0; d], hi: vec![1.0; d] }
    }

    pub fn d(&self) -> usize {
        self.lo.len()
    }

    pub fn is_valid(&self) -> bool {
        self.lo.len() == self.hi.len() && self.lo.iter().zip(&self.hi).all(|(l, h)| l < h)
    }

    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        self.lo.iter().zip(&self.hi).zip(x).all(|((&lo, &hi), &v)| lo <= v && (v < hi || (hi == 1.0 && v == 1.0)))
    }

    pub fn side(&self, j: usize) -> f64 {
        self.hi[j] - self.lo[j]
    }

    pub fn measure(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn midpoint(&self, j: usize) -> f64 {
        0.5 * (self.lo[j] + self.hi[j])
    }

    /// Cuts along coordinate `j` at `position`; the left child keeps `[lo, position)`.
    pub fn split(&self, j: usize, position: f64) -> (Cell, Cell) {
        let mut left = self.clone();
        let mut right = self.clone();
        left.hi[j] = position;
        right.lo[j] = position;
        (left, right)
    }

    /// Every side length is `2^-k` for some integer `k >= 0`.
    pub fn is_dyadic(&self) -> bool {
        (0..self.d()).all(|j| {
            let s = self.side(j);
            s > 0.0 && s <= 1.0 && s.log2().fract() == 0.0 && (s.log2() as i32) <= 0
        })
    }
}
