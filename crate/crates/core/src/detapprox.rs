//! Optimal deterministic linear approximation.
//!
//! The embedding into `L_2` of the uniform measure has the unordered
//! singular values `sigma_0 = lambda_0`, `sigma_{+-k} = lambda_k / sqrt 2`,
//! and `sigma_k = prod_j sigma_{k_j}` in `d` dimensions. The best `n`-term
//! projection keeps the multi-indices with the largest `sigma_k`; they are
//! enumerated best-first over the product of the sorted one-dimensional
//! spectra.

use crate::error::{domain, Error, Result};
use crate::grid::{basis_matrix, PointSet};
use crate::model::{coordinate_key, LambdaSequence, MultiIndex, SparseCoefFunction};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

/// One-dimensional singular values of `H_lambda -> L_2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum1D {
    lambda: LambdaSequence,
}

impl SingularSpectrum1D {
    pub fn new(lambda: LambdaSequence) -> Self {
        Self { lambda }
    }

    pub fn sigma(&self, k: i32) -> f64 {
        self.sigma_sq(k).sqrt()
    }

    pub fn sigma_sq(&self, k: i32) -> f64 {
        let a = k.unsigned_abs() as u64;
        if a == 0 {
            self.lambda.lambda_sq(0)
        } else {
            0.5 * self.lambda.lambda_sq(a)
        }
    }

    /// The first `len` nonzero singular values in nonincreasing order,
    /// ties in canonical order (`+k` before `-k`).
    ///
    /// Finite weight lists are scanned in full since they need not be
    /// monotone; Korobov weights decrease, so `|k| <= len` suffices.
    pub fn sorted_prefix(&self, len: usize) -> Vec<(i32, f64)> {
        let kmax = self.lambda.max_frequency().unwrap_or(len as u64);
        let mut all: Vec<(i32, f64)> = (-(kmax as i64)..=kmax as i64)
            .map(|k| (k as i32, self.sigma_sq(k as i32)))
            .filter(|(_, s)| *s > 0.0)
            .collect();
        all.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then(coordinate_key(a.0).cmp(&coordinate_key(b.0)))
        });
        all.truncate(len);
        all
    }
}

/// `sigma_k^2`, multiplied in coordinate order.
pub fn sigma_sq(lambda: &LambdaSequence, k: &MultiIndex) -> f64 {
    let spec = SingularSpectrum1D::new(lambda.clone());
    k.entries().iter().map(|&kj| spec.sigma_sq(kj)).product()
}

/// Multi-indices in nonincreasing order of `sigma_k`, ties broken by the
/// canonical multi-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSelection {
    d: usize,
    indices: Vec<MultiIndex>,
    sigma_sq: Vec<f64>,
    captured_mass: f64,
}

impl IndexSelection {
    pub fn empty(d: usize) -> Self {
        Self {
            d,
            indices: Vec::new(),
            sigma_sq: Vec::new(),
            captured_mass: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// `sigma_k^2` for each selected index, in selection order.
    pub fn sigma_sq(&self) -> &[f64] {
        &self.sigma_sq
    }

    /// `sum sigma_k^2` over the selection.
    pub fn captured_mass(&self) -> f64 {
        self.captured_mass
    }

    /// The first `n` entries.
    pub fn prefix(&self, n: usize) -> Self {
        let n = n.min(self.len());
        Self {
            d: self.d,
            indices: self.indices[..n].to_vec(),
            sigma_sq: self.sigma_sq[..n].to_vec(),
            captured_mass: self.sigma_sq[..n].iter().rev().sum(),
        }
    }

    /// Largest `n' < n` such that the first `n'` indices are closed under
    /// sign flips of every coordinate (whole cos/sin groups).
    pub fn completed_count_below(&self, n: usize) -> usize {
        let n = n.min(self.len() + 1);
        let mut open: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut open_groups = 0usize;
        let mut best = 0;
        for (i, k) in self.indices.iter().enumerate().take(n.saturating_sub(1)) {
            let key: Vec<u32> = k.entries().iter().map(|c| c.unsigned_abs()).collect();
            let size = 1usize << key.iter().filter(|&&a| a != 0).count();
            let count = open.entry(key).or_insert(0);
            if *count == 0 {
                open_groups += 1;
            }
            *count += 1;
            if *count == size {
                open_groups -= 1;
            }
            if open_groups == 0 {
                best = i + 1;
            }
        }
        best
    }
}

#[derive(PartialEq)]
struct Candidate {
    sigma_sq: f64,
    index: MultiIndex,
    ranks: Vec<usize>,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap: larger sigma first, then canonically smaller index
        self.sigma_sq
            .total_cmp(&other.sigma_sq)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The `n` multi-indices in `Z^d` with the largest `sigma_k`.
///
/// Best-first search over rank tuples of the sorted one-dimensional spectrum,
/// seeded at the all-zero rank. Raising one rank never increases `sigma_k`
/// and never moves the index earlier in canonical order, so pops come out in
/// the global order. For finitely supported weights the selection stops once
/// every index with `sigma_k > 0` is taken.
pub fn top_n_indices(lambda: &LambdaSequence, d: usize, n: usize) -> IndexSelection {
    assert!(d >= 1, "dimension must be at least 1");
    let spectrum = SingularSpectrum1D::new(lambda.clone());
    let sorted = spectrum.sorted_prefix(n.max(1));
    let mut out = IndexSelection::empty(d);
    if n == 0 || sorted.is_empty() {
        return out;
    }
    let make = |ranks: Vec<usize>| {
        let entries: Vec<i32> = ranks.iter().map(|&r| sorted[r].0).collect();
        let sigma = ranks.iter().map(|&r| sorted[r].1).product();
        Candidate {
            sigma_sq: sigma,
            index: MultiIndex::from(entries),
            ranks,
        }
    };
    let mut heap = BinaryHeap::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let start = vec![0usize; d];
    seen.insert(start.clone());
    heap.push(make(start));
    while out.indices.len() < n {
        let Some(c) = heap.pop() else { break };
        for j in 0..d {
            if c.ranks[j] + 1 < sorted.len() {
                let mut next = c.ranks.clone();
                next[j] += 1;
                if seen.insert(next.clone()) {
                    heap.push(make(next));
                }
            }
        }
        out.indices.push(c.index);
        out.sigma_sq.push(c.sigma_sq);
    }
    out.captured_mass = out.sigma_sq.iter().rev().sum();
    out
}

/// `sqrt((1 - captured_mass(top_n))_+)`, the lower bound on the
/// deterministic worst-case error with `n` linear functionals.
pub fn det_lower_bound(lambda: &LambdaSequence, d: usize, n: usize) -> Result<f64> {
    if !lambda.is_normalized() {
        return Err(Error::NotNormalized {
            mass: lambda.total_mass(),
        });
    }
    let sel = top_n_indices(lambda, d, n);
    Ok(lower_bound_from(&sel))
}

pub(crate) fn lower_bound_from(sel: &IndexSelection) -> f64 {
    (1.0 - sel.captured_mass()).max(0.0).sqrt()
}

/// Orthogonal projection: the coefficients of `f` on `sel`.
pub fn project(f: &SparseCoefFunction, sel: &IndexSelection) -> Result<SparseCoefFunction> {
    if f.dim() != sel.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: sel.dim(),
        });
    }
    let mut out = SparseCoefFunction::zero(f.dim(), f.lambda().clone());
    for k in sel.indices() {
        let c = f.coef(k);
        if c != 0.0 {
            out.insert(k.clone(), c)?;
        }
    }
    Ok(out)
}

/// Worst-case `L_inf` error of projecting onto `sel`, evaluated on the
/// uniform grid as `max_x sqrt(K_d(x, x) - sum_{k in sel} psi_k(x)^2)`.
///
/// Grid maxima are lower estimates of the true supremum; the grid average
/// matches the exact `L_2` residual once `grid_points_per_dim` exceeds
/// twice the largest selected frequency.
pub fn det_worst_case_error(
    lambda: &LambdaSequence,
    d: usize,
    sel: &IndexSelection,
    grid_points_per_dim: usize,
    budget: usize,
) -> Result<f64> {
    if sel.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: sel.dim(),
        });
    }
    let points = PointSet::uniform(d, grid_points_per_dim, budget)?;
    let diag = lambda.total_mass().powi(d as i32);
    let b = basis_matrix(lambda, sel.indices(), &points)?;
    let mut worst: f64 = 0.0;
    for row in b.rows() {
        let rad = diag - row.iter().map(|v| v * v).sum::<f64>();
        if rad < -1e-9 {
            return Err(Error::NegativeRadicand {
                op: "det_worst_case_error",
                value: rad,
            });
        }
        worst = worst.max(rad.max(0.0));
    }
    Ok(worst.sqrt())
}

/// `beta = sup{lambda_0^2, lambda_k^2 / 2}`, the largest squared singular
/// value.
pub fn curse_beta(lambda: &LambdaSequence) -> f64 {
    let spec = SingularSpectrum1D::new(lambda.clone());
    spec.sorted_prefix(1).first().map_or(0.0, |(_, s)| *s)
}

/// Lower bound `beta^{-d} (1 - eps)^2` on the deterministic information
/// complexity.
pub fn curse_bound(beta: f64, d: usize, eps: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(domain("curse_bound", format!("beta must lie in (0, 1), got {beta}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain("curse_bound", format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok(beta.powi(-(d as i32)) * (1.0 - eps).powi(2))
}
