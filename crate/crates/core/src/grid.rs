//! Tensor-product sample grids.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::lin_space;

/// Tensor product of one axis per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<Vec<f64>>,
}

impl Grid {
    pub fn from_axes(axes: Vec<Vec<f64>>) -> Result<Self> {
        if axes.is_empty() || axes.iter().any(|a| a.is_empty()) {
            return Err(Error::InvalidArgument("grid axes must be nonempty"));
        }
        if axes.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("grid nodes must be finite"));
        }
        Ok(Grid { axes })
    }

    /// The same uniform axis `[lo, hi]` with `count` nodes in every coordinate.
    pub fn uniform(lo: f64, hi: f64, count: usize, n: usize) -> Result<Self> {
        if count == 0 || n == 0 || !(hi >= lo) {
            return Err(Error::InvalidArgument("invalid uniform grid"));
        }
        Self::from_axes(alloc::vec![lin_space(lo, hi, count); n])
    }

    /// A single point.
    pub fn point(x: &[f64]) -> Result<Self> {
        Self::from_axes(x.iter().map(|&v| alloc::vec![v]).collect())
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    /// Whether the node with per-axis indices `idx` lies on the outer face
    /// of the grid (axes with a single node never count as boundary).
    pub fn is_boundary(&self, idx: &[usize]) -> bool {
        idx.iter().zip(&self.axes).any(|(&i, a)| a.len() > 1 && (i == 0 || i + 1 == a.len()))
    }

    /// All nodes, last coordinate varying fastest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(self.len());
        self.for_each(|_, x| out.push(x.to_vec()));
        out
    }

    /// Visit every node with its per-axis index, last coordinate fastest.
    pub fn for_each(&self, mut f: impl FnMut(&[usize], &[f64])) {
        let n = self.dim();
        let mut idx = alloc::vec![0usize; n];
        let mut x: Vec<f64> = self.axes.iter().map(|a| a[0]).collect();
        loop {
            f(&idx, &x);
            let mut j = n;
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < self.axes[j].len() {
                    x[j] = self.axes[j][idx[j]];
                    break;
                }
                idx[j] = 0;
                x[j] = self.axes[j][0];
            }
        }
    }

    /// Grid with every axis refined by inserting midpoints.
    pub fn refined(&self) -> Self {
        let axes = self
            .axes
            .iter()
            .map(|a| {
                let mut out = Vec::with_capacity(2 * a.len());
                for w in a.windows(2) {
                    out.push(w[0]);
                    out.push(0.5 * (w[0] + w[1]));
                }
                out.push(a[a.len() - 1]);
                out
            })
            .collect();
        Grid { axes }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_in_order_with_boundary() {
        let g = Grid::from_axes(alloc::vec![alloc::vec![0.0, 1.0, 2.0], alloc::vec![5.0, 6.0]]).unwrap();
        let mut seen = Vec::new();
        g.for_each(|idx, x| seen.push((idx.to_vec(), x.to_vec(), g.is_boundary(idx))));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0].1, alloc::vec![0.0, 5.0]);
        assert_eq!(seen[1].1, alloc::vec![0.0, 6.0]);
        assert_eq!(seen[2].1, alloc::vec![1.0, 5.0]);
        // every node touches the 2-node axis boundary
        assert!(seen.iter().all(|s| s.2));
        let h = Grid::uniform(-1.0, 1.0, 3, 1).unwrap();
        assert!(!h.is_boundary(&[1]));
        assert!(h.is_boundary(&[2]));
        assert!(!Grid::point(&[0.3]).unwrap().is_boundary(&[0]));
    }

    #[test]
    fn refinement_keeps_nodes() {
        let g = Grid::uniform(-6.0, 6.0, 121, 1).unwrap();
        let r = g.refined();
        assert_eq!(r.len(), 241);
        for (i, v) in g.axes()[0].iter().enumerate() {
            assert_eq!(r.axes()[0][2 * i], *v);
        }
    }
}
