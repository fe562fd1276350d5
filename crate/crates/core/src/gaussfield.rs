//! Truncated samples of the Gaussian field `Psi = sum_k X_k psi_k`, whose
//! covariance is the reproducing kernel, empirical estimates of its expected
//! sup-norm and the Dudley entropy bound.

use crate::detapprox::top_n_indices;
use crate::error::{domain, Error, Result};
use crate::grid::{for_each_basis_block, PointSet};
use crate::kernel::DecayProfile;
use crate::model::{LambdaSequence, MultiIndex, SparseCoefFunction};
use crate::quad::adaptive_simpson;
use crate::rng::{derived, stream_id};
use crate::special::ln_gamma;
use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::{FRAC_2_PI, SQRT_2};

/// Upper bound on the universal constant in Dudley's inequality.
pub const C_DUDLEY: f64 = 4.0 * SQRT_2;

/// Relative accuracy of the entropy integral.
pub const DUDLEY_REL_TOL: f64 = 1e-6;

/// Canonical-metric cell diameter targeted by [`suggested_grid_per_dim`].
pub const CELL_DIAMETER: f64 = 0.05;

/// Multi-indices retained by an implementable method, in canonical
/// enumeration order, with the certified mass of everything dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationSet {
    d: usize,
    indices: Vec<MultiIndex>,
    dropped_mass: f64,
}

impl TruncationSet {
    /// An explicit index list; `dropped_mass` is taken as given.
    pub fn new(d: usize, indices: Vec<MultiIndex>, dropped_mass: f64) -> Result<Self> {
        if indices.is_empty() {
            return Err(domain("TruncationSet", "index set must be nonempty"));
        }
        if let Some(k) = indices.iter().find(|k| k.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: k.dim(),
            });
        }
        if !(dropped_mass >= 0.0) {
            return Err(domain("TruncationSet", "dropped mass must be nonnegative"));
        }
        Ok(Self {
            d,
            indices,
            dropped_mass,
        })
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

    /// `sum sigma_k^2` over the multi-indices outside the set.
    pub fn dropped_mass(&self) -> f64 {
        self.dropped_mass
    }
}

/// The smallest prefix of the best-first enumeration whose dropped mass
/// `(sum_k lambda_k^2)^d - captured` is at most `mass_tol`.
pub fn default_truncation(lambda: &LambdaSequence, d: usize, mass_tol: f64) -> Result<TruncationSet> {
    if d == 0 {
        return Err(domain("default_truncation", "dimension must be at least 1"));
    }
    if !(mass_tol > 0.0) {
        return Err(domain("default_truncation", "mass_tol must be positive"));
    }
    if mass_tol >= 1.0 {
        return Err(domain("default_truncation", "mass_tol >= 1 admits the empty set"));
    }
    let total = lambda.total_mass().powi(d as i32);
    let mut n = 64usize;
    loop {
        let sel = top_n_indices(lambda, d, n);
        let exhausted = sel.len() < n;
        let mut captured = 0.0;
        for (i, s) in sel.sigma_sq().iter().enumerate() {
            captured += s;
            let dropped = (total - captured).max(0.0);
            if dropped <= mass_tol || (exhausted && i + 1 == sel.len()) {
                let keep = sel.indices()[..=i].to_vec();
                return TruncationSet::new(d, keep, dropped);
            }
        }
        n = n.checked_mul(2).filter(|&m| m <= 1 << 26).ok_or_else(|| {
            domain(
                "default_truncation",
                format!("more than {n} indices needed for mass_tol = {mass_tol}"),
            )
        })?;
    }
}

/// A realization of the truncated field with one draw per truncation index.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    field: SparseCoefFunction,
    trunc: TruncationSet,
}

impl FieldSample {
    pub fn trunc(&self) -> &TruncationSet {
        &self.trunc
    }

    /// `X_k` in truncation order.
    pub fn draws(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
        self.trunc.indices().iter().map(|k| (k, self.field.coef(k)))
    }

    /// The sample as an element of the Hilbert space's coefficient model.
    pub fn as_function(&self) -> &SparseCoefFunction {
        &self.field
    }

    /// `sum_k X_k psi_k(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.field.eval(x)
    }
}

/// Draws `X_k` i.i.d. standard Gaussian in truncation order.
pub fn sample_field<R: Rng + ?Sized>(
    lambda: &LambdaSequence,
    trunc: &TruncationSet,
    rng: &mut R,
) -> Result<FieldSample> {
    let mut field = SparseCoefFunction::zero(trunc.dim(), lambda.clone());
    for k in trunc.indices() {
        let x: f64 = rng.sample(StandardNormal);
        field.insert(k.clone(), x)?;
    }
    Ok(FieldSample {
        field,
        trunc: trunc.clone(),
    })
}

/// Mean of the grid maximum of `|Psi|` over replications.
#[derive(Debug, Clone, PartialEq)]
pub struct SupNormEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub replications: usize,
    pub grid_points_per_dim: usize,
}

/// Estimates `E ||Psi||_inf` over the uniform grid.
///
/// Replication `i` uses the generator `derive_seed(master, stream, i)` with
/// `master` drawn from `rng`, so the result does not depend on scheduling.
/// Each grid maximum underestimates the true supremum.
pub fn estimate_sup_norm<R: Rng + ?Sized>(
    lambda: &LambdaSequence,
    trunc: &TruncationSet,
    grid_points_per_dim: usize,
    replications: usize,
    budget: usize,
    rng: &mut R,
) -> Result<SupNormEstimate> {
    if grid_points_per_dim < 16 {
        return Err(domain("estimate_sup_norm", "grid needs at least 16 points per dimension"));
    }
    let points = PointSet::uniform(trunc.dim(), grid_points_per_dim, budget)?;
    let mut est = estimate_sup_norm_on(lambda, trunc, &points, replications, rng)?;
    est.grid_points_per_dim = grid_points_per_dim;
    Ok(est)
}

/// As [`estimate_sup_norm`] on an arbitrary point set, e.g. random points
/// when a tensor grid exceeds the budget. `grid_points_per_dim` is reported
/// as 0 for scattered sets.
pub fn estimate_sup_norm_on<R: Rng + ?Sized>(
    lambda: &LambdaSequence,
    trunc: &TruncationSet,
    points: &PointSet,
    replications: usize,
    rng: &mut R,
) -> Result<SupNormEstimate> {
    if replications < 2 {
        return Err(domain("estimate_sup_norm", "needs at least 2 replications"));
    }
    if points.dim() != trunc.dim() {
        return Err(Error::DimensionMismatch {
            expected: trunc.dim(),
            got: points.dim(),
        });
    }
    let master: u64 = rng.random();
    let stream = stream_id("estimate_sup_norm");
    let m = trunc.len();
    let draws: Vec<Vec<f64>> = (0..replications)
        .into_par_iter()
        .map(|i| {
            let mut r = derived(master, stream, i as u64);
            (0..m).map(|_| r.sample(StandardNormal)).collect()
        })
        .collect();
    let mut maxima = vec![0.0f64; replications];
    for_each_basis_block(lambda, trunc.indices(), points, |block| {
        maxima
            .par_iter_mut()
            .zip(&draws)
            .for_each(|(best, x)| *best = best.max(block_max_abs(block, x)));
    })?;
    let (mean, std_error) = mean_and_se(&maxima);
    Ok(SupNormEstimate {
        mean,
        std_error,
        replications,
        grid_points_per_dim: points.per_dim().unwrap_or(0),
    })
}

/// `max_p |sum_j B[p, j] x_j|` over the rows of a basis block.
pub fn block_max_abs(block: &Array2<f64>, x: &[f64]) -> f64 {
    block
        .rows()
        .into_iter()
        .map(|row| row.iter().zip(x).map(|(b, c)| b * c).sum::<f64>().abs())
        .fold(0.0, f64::max)
}

/// Sample mean and standard error `s / sqrt(n)`.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Grid resolution `g` at which neighbouring grid points are within
/// `diameter` in the canonical metric, from `d_K^2 <= 2 alpha sum_j
/// d_T(x_j, y_j)^p`.
pub fn suggested_grid_per_dim(profile: &DecayProfile, d: usize, diameter: f64) -> usize {
    let h = (diameter * diameter / (2.0 * profile.alpha * d as f64)).powf(1.0 / profile.p);
    let h = h.min(profile.r0);
    (1.0 / h).ceil() as usize
}

/// `-log` of the uniform measure of the `l_p` ball of radius `radius` in
/// `R^d`, valid for `radius <= 1/2`.
pub fn ball_log_inv_volume(p: f64, d: usize, radius: f64) -> f64 {
    let d = d as f64;
    ln_gamma(d / p + 1.0) - d * (2.0 * radius * (ln_gamma(1.0 / p + 1.0)).exp()).ln()
}

/// Upper bound on `E ||Psi||_inf` with `C_Dudley = 4 sqrt 2`.
pub fn dudley_bound(profile: &DecayProfile, d: usize) -> Result<f64> {
    dudley_bound_with(profile, d, C_DUDLEY)
}

/// `sqrt(2/pi) + 4 c_dudley I`, where `I` bounds the entropy integral
/// `int_0^inf sup_x sqrt(log 1/mu(B_K(x, r))) dr`.
///
/// Balls are bounded below by `l_p` balls of radius `R = (r^2 / 2 alpha)^{1/p}`
/// while `r <= r1 = sqrt(2 alpha r0^p)`, by the radius-`r0` ball on
/// `(r1, 2)`, and equal the whole torus for `r >= 2`. The first part is
/// integrated in `t = log(r1 / r)`, where the integrand is
/// `r1 e^{-t} sqrt(L(r0) + 2 d t / p)`.
pub fn dudley_bound_with(profile: &DecayProfile, d: usize, c_dudley: f64) -> Result<f64> {
    if !(profile.alpha > 0.0) || !(profile.r0 > 0.0) {
        return Err(domain("dudley_bound", "alpha and r0 must be positive"));
    }
    if d == 0 {
        return Err(domain("dudley_bound", "dimension must be at least 1"));
    }
    if !(c_dudley > 0.0) {
        return Err(domain("dudley_bound", "C_Dudley must be positive"));
    }
    let p = profile.p;
    let r1 = (2.0 * profile.alpha * profile.r0.powf(p)).sqrt();
    let l0 = ball_log_inv_volume(p, d, profile.r0);
    let slope = 2.0 * d as f64 / p;
    let t_lo = (r1 / 2.0).ln().max(0.0);
    let integrand = |t: f64| r1 * (-t).exp() * (l0 + slope * t).max(0.0).sqrt();
    // e^{-t} sqrt(a + b t) is below 1e-18 of its peak past this point
    let t_hi = t_lo + 45.0 + (1.0 + l0.abs() + slope).ln();
    let scale = integrand(t_lo).max(integrand(t_lo + 1.0)).max(f64::MIN_POSITIVE);
    let singular = adaptive_simpson(integrand, t_lo, t_hi, DUDLEY_REL_TOL * scale * 1e-2, 50);
    let flat = (2.0 - r1).max(0.0) * l0.max(0.0).sqrt();
    let integral = singular + flat;
    if !integral.is_finite() {
        return Err(Error::NonFinite {
            op: "dudley_bound".into(),
        });
    }
    Ok(FRAC_2_PI.sqrt() + 4.0 * c_dudley * integral)
}

/// Row of [`smoothness_loss_statistic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessRow {
    pub cutoff: u64,
    /// `E sum_{|k| <= K} X_k^2 (lambda_k^{(r)} / lambda_k^{(s)})^2`.
    pub expected: f64,
    /// One realization of the same partial sum.
    pub sampled: f64,
}

/// Second moments of the partial `H_s` norms of the field of a Korobov
/// space of smoothness `r`. The `H_s` weights reuse `beta0` and `beta1`, so
/// the ratio is `1` at `k = 0` and `|k|^{-(r - s)}` otherwise.
pub fn smoothness_loss_statistic<R: Rng + ?Sized>(
    lambda: &LambdaSequence,
    s: f64,
    cutoffs: &[u64],
    rng: &mut R,
) -> Result<Vec<SmoothnessRow>> {
    let (r, beta0, _) = lambda
        .korobov_params()
        .ok_or_else(|| domain("smoothness_loss_statistic", "requires Korobov weights"))?;
    if !(s < r) {
        return Err(domain("smoothness_loss_statistic", format!("requires s < r, got s = {s}, r = {r}")));
    }
    let gap = 2.0 * (r - s);
    let kmax = cutoffs.iter().copied().max().unwrap_or(0);
    let mut sorted: Vec<u64> = cutoffs.to_vec();
    sorted.sort_unstable();
    let mut rows = Vec::with_capacity(cutoffs.len());
    let zero_weight = if beta0 > 0.0 { 1.0 } else { 0.0 };
    let x0: f64 = rng.sample(StandardNormal);
    let mut expected = zero_weight;
    let mut sampled = zero_weight * x0 * x0;
    let mut next = sorted.iter().peekable();
    for k in 0..=kmax {
        if k > 0 {
            let w = (k as f64).powf(-gap);
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            expected += 2.0 * w;
            sampled += w * (a * a + b * b);
        }
        while next.peek() == Some(&&k) {
            next.next();
            rows.push(SmoothnessRow {
                cutoff: k,
                expected,
                sampled,
            });
        }
    }
    let order = |c: u64| sorted.iter().position(|&x| x == c).unwrap();
    Ok(cutoffs.iter().map(|&c| rows[order(c)]).collect())
}
