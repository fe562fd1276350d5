//! The truncated Gaussian Monte Carlo method
//! `A(f) = (1/n) sum_i <X_i, c> X_i`, where `c` holds the coefficients of
//! `f` on the truncation set and `X_i` are i.i.d. standard Gaussian vectors.
//!
//! The Gaussian array is drawn row by row in truncation order, so for a
//! fixed generator it does not depend on `f` and the method is linear.

use crate::error::{domain, Error, Result};
use crate::gaussfield::{block_max_abs, mean_and_se, TruncationSet};
use crate::grid::{for_each_basis_block, PointSet};
use crate::kernel::initial_error;
use crate::model::SparseCoefFunction;
use crate::rng::{derived, seeded, stream_id, Rng as StdRng};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Parameters of one Monte Carlo method.
#[derive(Debug, Clone, PartialEq)]
pub struct MCConfig {
    n: usize,
    trunc: TruncationSet,
    seed: u64,
}

impl MCConfig {
    pub fn new(n: usize, trunc: TruncationSet, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(domain("MCConfig", "n must be at least 1"));
        }
        Ok(Self { n, trunc, seed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trunc(&self) -> &TruncationSet {
        &self.trunc
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for a single run under the shared-seed convention.
    pub fn rng(&self) -> StdRng {
        seeded(self.seed)
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(n, self.trunc.clone(), self.seed)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }
}

/// Applies the method to `f` with a Gaussian array drawn from `rng`.
///
/// The output is supported on the truncation set; coefficients of `f`
/// outside it are ignored.
pub fn mc_approximate<R: Rng + ?Sized>(
    f: &SparseCoefFunction,
    cfg: &MCConfig,
    rng: &mut R,
) -> Result<SparseCoefFunction> {
    let c = restricted_coefs(f, cfg.trunc())?;
    let out = sketch(&c, cfg.n, rng);
    let mut g = SparseCoefFunction::zero(f.dim(), f.lambda().clone());
    for (k, v) in cfg.trunc.indices().iter().zip(out) {
        g.insert(k.clone(), v)?;
    }
    Ok(g)
}

/// Coefficients of `f` on the truncation set, in truncation order.
pub fn restricted_coefs(f: &SparseCoefFunction, trunc: &TruncationSet) -> Result<Vec<f64>> {
    if f.dim() != trunc.dim() {
        return Err(Error::DimensionMismatch {
            expected: trunc.dim(),
            got: f.dim(),
        });
    }
    Ok(trunc.indices().iter().map(|k| f.coef(k)).collect())
}

/// `(1/n) X^T X c` for an `n x m` standard Gaussian `X` drawn row-major.
pub(crate) fn sketch<R: Rng + ?Sized>(c: &[f64], n: usize, rng: &mut R) -> Vec<f64> {
    let m = c.len();
    let mut out = vec![0.0; m];
    let mut row = vec![0.0; m];
    for _ in 0..n {
        for x in row.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        let y: f64 = row.iter().zip(c).map(|(x, c)| x * c).sum();
        for (o, x) in out.iter_mut().zip(&row) {
            *o += y * x;
        }
    }
    let scale = 1.0 / n as f64;
    out.iter_mut().for_each(|o| *o *= scale);
    out
}

/// `2 E||Psi||_inf / sqrt(n)`.
pub fn mc_error_bound(sup_est: f64, n: usize) -> Result<f64> {
    if !(sup_est >= 0.0) || n == 0 {
        return Err(domain("mc_error_bound", "requires sup_est >= 0 and n >= 1"));
    }
    Ok(2.0 * sup_est / (n as f64).sqrt())
}

/// `ceil(4 (E||Psi||_inf / eps)^2)`, the number of functionals that
/// guarantees expected error `eps`.
pub fn mc_complexity_bound(sup_est: f64, eps: f64) -> Result<u64> {
    if !(eps > 0.0) || !(sup_est >= 0.0) {
        return Err(domain("mc_complexity_bound", "requires eps > 0 and sup_est >= 0"));
    }
    let v = (4.0 * (sup_est / eps).powi(2)).ceil();
    if !v.is_finite() || v > u64::MAX as f64 {
        return Err(Error::NonFinite {
            op: "mc_complexity_bound".into(),
        });
    }
    Ok(v as u64)
}

/// Replicated `L_inf` errors of the method on one input.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub mean_error: f64,
    pub std_error: f64,
    pub replications: usize,
    pub per_replication_errors: Vec<f64>,
    pub grid_points_per_dim: usize,
}

/// Runs the method `replications` times with the generators
/// `derive_seed(cfg.seed, stream_id("mc_replication"), i)`.
///
/// Each error is the grid maximum of `|P f - A(f)|` plus the certified
/// remainder `||f - P f||_H sup_x sqrt(K(x, x))` of the part of `f` outside
/// the truncation set.
pub fn empirical_error(
    f: &SparseCoefFunction,
    cfg: &MCConfig,
    grid_points_per_dim: usize,
    replications: usize,
    budget: usize,
) -> Result<ErrorReport> {
    let points = PointSet::uniform(f.dim(), grid_points_per_dim, budget)?;
    empirical_error_on(f, cfg, &points, replications)
}

/// As [`empirical_error`] on an arbitrary point set.
pub fn empirical_error_on(
    f: &SparseCoefFunction,
    cfg: &MCConfig,
    points: &PointSet,
    replications: usize,
) -> Result<ErrorReport> {
    if replications < 2 {
        return Err(domain("empirical_error", "needs at least 2 replications"));
    }
    let c = restricted_coefs(f, cfg.trunc())?;
    let inside: f64 = c.iter().map(|v| v * v).sum();
    let outside = (f.hilbert_norm().powi(2) - inside).max(0.0).sqrt();
    let remainder = outside * initial_error(f.lambda(), f.dim());
    let stream = stream_id("mc_replication");
    let diffs: Vec<Vec<f64>> = (0..replications)
        .into_par_iter()
        .map(|i| {
            let mut rng = derived(cfg.seed, stream, i as u64);
            let approx = sketch(&c, cfg.n, &mut rng);
            c.iter().zip(&approx).map(|(a, b)| a - b).collect()
        })
        .collect();
    let mut grid_max = vec![0.0f64; replications];
    for_each_basis_block(f.lambda(), cfg.trunc().indices(), points, |block| {
        grid_max
            .par_iter_mut()
            .zip(&diffs)
            .for_each(|(best, diff)| *best = best.max(block_max_abs(block, diff)));
    })?;
    let errors: Vec<f64> = grid_max.into_iter().map(|g| g + remainder).collect();
    if let Some(bad) = errors.iter().find(|e| !e.is_finite()) {
        return Err(Error::NonFinite {
            op: format!("empirical_error produced {bad}"),
        });
    }
    let (mean_error, std_error) = mean_and_se(&errors);
    Ok(ErrorReport {
        mean_error,
        std_error,
        replications,
        per_replication_errors: errors,
        grid_points_per_dim: points.per_dim().unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussfield::default_truncation;
    use crate::grid::DEFAULT_GRID_BUDGET;
    use crate::model::{random_unit_function, LambdaSequence, MultiIndex};

    fn fig1() -> LambdaSequence {
        LambdaSequence::normalize_korobov(1.25, 0.4).unwrap()
    }

    fn small_cfg(n: usize) -> MCConfig {
        let t = default_truncation(&fig1(), 1, 5e-2).unwrap();
        MCConfig::new(n, t, 11).unwrap()
    }

    #[test]
    fn zero_maps_to_zero() {
        let cfg = small_cfg(8);
        let f = SparseCoefFunction::zero(1, fig1());
        let g = mc_approximate(&f, &cfg, &mut cfg.rng()).unwrap();
        assert_eq!(g.support_len(), 0);
        let rep = empirical_error(&f, &cfg, 32, 4, DEFAULT_GRID_BUDGET).unwrap();
        assert_eq!(rep.mean_error, 0.0);
    }

    #[test]
    fn single_index_is_chi_square_mean() {
        let t = TruncationSet::new(1, vec![MultiIndex::zero(1)], 0.6).unwrap();
        let f = SparseCoefFunction::from_coefs(1, fig1(), [(MultiIndex::zero(1), 1.0)]).unwrap();
        let mut last = f64::INFINITY;
        for n in [10, 1000, 100_000] {
            let cfg = MCConfig::new(n, t.clone(), 5).unwrap();
            let g = mc_approximate(&f, &cfg, &mut cfg.rng()).unwrap();
            let dev = (g.coef(&MultiIndex::zero(1)) - 1.0).abs();
            // chi^2_n / n has standard deviation sqrt(2/n)
            assert!(dev < 5.0 * (2.0 / n as f64).sqrt());
            last = last.min(dev);
        }
        assert!(last < 0.03);
    }

    #[test]
    fn linear_for_fixed_seed() {
        let cfg = small_cfg(16);
        let l = fig1();
        let idx = cfg.trunc().indices().to_vec();
        let f = random_unit_function(1, &l, &idx, &mut seeded(1)).unwrap();
        let g = random_unit_function(1, &l, &idx[..5], &mut seeded(2)).unwrap();
        let lhs = mc_approximate(&f.combine(2.5, &g, -0.75).unwrap(), &cfg, &mut cfg.rng()).unwrap();
        let af = mc_approximate(&f, &cfg, &mut cfg.rng()).unwrap();
        let ag = mc_approximate(&g, &cfg, &mut cfg.rng()).unwrap();
        let rhs = af.combine(2.5, &ag, -0.75).unwrap();
        for k in &idx {
            let (a, b) = (lhs.coef(k), rhs.coef(k));
            assert!((a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0));
        }
        assert!(mc_approximate(&SparseCoefFunction::zero(2, l), &cfg, &mut cfg.rng()).is_err());
    }

    #[test]
    fn bounds() {
        assert_eq!(mc_complexity_bound(1.0, 1.0).unwrap(), 4);
        assert_eq!(mc_complexity_bound(1.0, 0.5).unwrap(), 16);
        assert_eq!(mc_complexity_bound(0.0, 0.5).unwrap(), 0);
        assert!(mc_complexity_bound(1.0, 0.0).is_err());
        assert_eq!(mc_error_bound(0.0, 7).unwrap(), 0.0);
        let a = mc_error_bound(1.3, 64).unwrap();
        let b = mc_error_bound(1.3, 256).unwrap();
        assert!((a / b - 2.0).abs() < 1e-15);
        assert!((b - 2.0 * 1.3 / 16.0).abs() < 1e-15);
        assert!(mc_error_bound(1.0, 0).is_err());
    }

    #[test]
    fn report_is_reproducible_and_consistent() {
        let cfg = small_cfg(16);
        let f = random_unit_function(1, &fig1(), cfg.trunc().indices(), &mut seeded(4)).unwrap();
        let a = empirical_error(&f, &cfg, 64, 40, DEFAULT_GRID_BUDGET).unwrap();
        let b = empirical_error(&f, &cfg, 64, 40, DEFAULT_GRID_BUDGET).unwrap();
        assert_eq!(a, b);
        let mean = a.per_replication_errors.iter().sum::<f64>() / 40.0;
        assert!((a.mean_error - mean).abs() < 1e-12);
        assert!(empirical_error(&f, &cfg, 64, 1, DEFAULT_GRID_BUDGET).is_err());
    }

    #[test]
    fn remainder_counts_dropped_coefficients() {
        let l = fig1();
        let t = TruncationSet::new(1, vec![MultiIndex::zero(1)], 0.6).unwrap();
        let cfg = MCConfig::new(4, t, 1).unwrap();
        let f = SparseCoefFunction::from_coefs(1, l, [(MultiIndex::from(vec![3]), 1.0)]).unwrap();
        let rep = empirical_error(&f, &cfg, 16, 3, DEFAULT_GRID_BUDGET).unwrap();
        assert!((rep.mean_error - 1.0).abs() < 1e-12);
    }
}
