//! Evaluation point sets on the d-torus and basis matrices over them.

use crate::error::{Error, Result};
use crate::model::{LambdaSequence, MultiIndex};
use ndarray::Array2;
use rand::Rng;
use std::f64::consts::TAU;

/// Default cap on the number of points in a full tensor grid.
pub const DEFAULT_GRID_BUDGET: usize = 1 << 20;

/// A finite set of points in `[0,1)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    d: usize,
    /// Row-major, `len = count * d`.
    coords: Vec<f64>,
    /// Points per dimension for a full tensor grid, `None` for scattered sets.
    per_dim: Option<usize>,
}

impl PointSet {
    /// The tensor grid `{0, 1/g, ..., (g-1)/g}^d`, refused above `budget`.
    pub fn uniform(d: usize, per_dim: usize, budget: usize) -> Result<Self> {
        let requested = (per_dim as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
        if requested > budget as u128 {
            return Err(Error::GridBudget { requested, budget });
        }
        let count = requested as usize;
        let mut coords = Vec::with_capacity(count * d);
        let mut idx = vec![0usize; d];
        for _ in 0..count {
            coords.extend(idx.iter().map(|&i| i as f64 / per_dim as f64));
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < per_dim {
                    break;
                }
                *slot = 0;
            }
        }
        Ok(Self {
            d,
            coords,
            per_dim: Some(per_dim),
        })
    }

    /// `count` i.i.d. uniform points; the fallback when a tensor grid is too
    /// large.
    pub fn random<R: Rng + ?Sized>(d: usize, count: usize, rng: &mut R) -> Self {
        let coords = (0..count * d).map(|_| rng.random::<f64>()).collect();
        Self {
            d,
            coords,
            per_dim: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn per_dim(&self) -> Option<usize> {
        self.per_dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }
}

/// Entries per basis-matrix block in [`for_each_basis_block`].
pub const BLOCK_ENTRIES: usize = 1 << 22;

/// Matrix `B[p, j] = psi_{indices[j]}(points[p])`.
pub fn basis_matrix(
    lambda: &LambdaSequence,
    indices: &[MultiIndex],
    points: &PointSet,
) -> Result<Array2<f64>> {
    basis_matrix_rows(lambda, indices, points, 0..points.len())
}

/// Calls `f` on consecutive row blocks of the basis matrix, each with at
/// most [`BLOCK_ENTRIES`] entries, so memory stays bounded for large grids.
pub fn for_each_basis_block<F: FnMut(&Array2<f64>)>(
    lambda: &LambdaSequence,
    indices: &[MultiIndex],
    points: &PointSet,
    mut f: F,
) -> Result<()> {
    let rows = (BLOCK_ENTRIES / indices.len().max(1)).max(1);
    let mut start = 0;
    while start < points.len() {
        let end = (start + rows).min(points.len());
        f(&basis_matrix_rows(lambda, indices, points, start..end)?);
        start = end;
    }
    Ok(())
}

/// Rows `range` of [`basis_matrix`].
pub fn basis_matrix_rows(
    lambda: &LambdaSequence,
    indices: &[MultiIndex],
    points: &PointSet,
    range: std::ops::Range<usize>,
) -> Result<Array2<f64>> {
    let d = points.dim();
    if let Some(k) = indices.iter().find(|k| k.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: k.dim(),
        });
    }
    let kmax = indices
        .iter()
        .flat_map(|k| k.entries().iter().map(|c| c.unsigned_abs() as usize))
        .max()
        .unwrap_or(0);
    let weights: Vec<f64> = (0..=kmax as u64).map(|k| lambda.lambda_at(k)).collect();
    let width = 2 * kmax + 1;
    let mut out = Array2::<f64>::zeros((range.len(), indices.len()));
    let mut table = vec![0.0; d * width];
    for (p, x) in points.iter().skip(range.start).take(range.len()).enumerate() {
        for (j, &xj) in x.iter().enumerate() {
            let row = &mut table[j * width..(j + 1) * width];
            row[kmax] = weights[0];
            for k in 1..=kmax {
                let phase = TAU * (k as f64 * xj).rem_euclid(1.0);
                let (s, c) = phase.sin_cos();
                row[kmax + k] = weights[k] * c;
                row[kmax - k] = weights[k] * s;
            }
        }
        let mut row = out.row_mut(p);
        for (col, k) in indices.iter().enumerate() {
            row[col] = k
                .entries()
                .iter()
                .enumerate()
                .map(|(j, &kj)| table[j * width + (kmax as i64 + kj as i64) as usize])
                .product();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::eval_basis;
    use crate::rng::seeded;

    #[test]
    fn uniform_grid_layout() {
        let g = PointSet::uniform(2, 4, 100).unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(g.point(0), &[0.0, 0.0]);
        assert_eq!(g.point(1), &[0.0, 0.25]);
        assert_eq!(g.point(15), &[0.75, 0.75]);
        assert!(matches!(
            PointSet::uniform(3, 200, 1000),
            Err(Error::GridBudget { .. })
        ));
    }

    #[test]
    fn basis_matrix_matches_direct_evaluation() {
        let l = LambdaSequence::normalize_korobov(1.25, 0.4).unwrap();
        let idx: Vec<MultiIndex> = vec![
            vec![0, 0].into(),
            vec![3, -2].into(),
            vec![-7, 1].into(),
            vec![12, 0].into(),
        ];
        let pts = PointSet::random(2, 50, &mut seeded(1));
        let b = basis_matrix(&l, &idx, &pts).unwrap();
        for (p, x) in pts.iter().enumerate() {
            for (j, k) in idx.iter().enumerate() {
                assert!((b[[p, j]] - eval_basis(&l, k, x)).abs() < 1e-14);
            }
        }
        let mid = basis_matrix_rows(&l, &idx, &pts, 10..13).unwrap();
        assert_eq!(mid, b.slice(ndarray::s![10..13, ..]).to_owned());
        let mut stacked = Vec::new();
        for_each_basis_block(&l, &idx, &pts, |blk| stacked.extend(blk.iter().copied())).unwrap();
        assert_eq!(stacked, b.iter().copied().collect::<Vec<_>>());
    }
}
