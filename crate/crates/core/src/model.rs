//! Frequency weights, the tensor-product basis and sparse coefficient
//! functions on the d-torus.
//!
//! A [`LambdaSequence`] fixes the Hilbert space: in one dimension the system
//! `psi_0 = lambda_0`, `psi_k = lambda_k cos(2 pi k x)`,
//! `psi_{-k} = lambda_k sin(2 pi k x)` is orthonormal, and in `d` dimensions
//! `psi_k(x) = prod_j psi_{k_j}(x_j)`. Functions are stored by their
//! coefficients with respect to that basis, so the Hilbert norm is the
//! Euclidean norm of the coefficient map.

use crate::error::{domain, Error, Result};
use crate::special::{power_tail_bracket, zeta};
use rand::Rng;
use rand_distr::StandardNormal;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

/// Absolute tolerance on `sum lambda_k^2 - 1` for a sequence to count as
/// normalized.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Default dropped Hilbert mass for [`lopsided_embed`].
pub const EMBED_MASS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaKind {
    /// `lambda_0 = sqrt(beta0)`, `lambda_k = sqrt(beta1) k^{-r}`.
    Korobov { r: f64, beta0: f64, beta1: f64 },
    /// Finite list `lambda_0, ..., lambda_{L-1}`, zero beyond.
    Explicit(Vec<f64>),
}

/// Frequency weights `(lambda_k)_{k >= 0}` of a periodic tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSequence {
    kind: LambdaKind,
    total_mass: f64,
}

impl LambdaSequence {
    /// Korobov weights with explicit `beta0 > 0`, `beta1 >= 0` and `r > 1/2`.
    pub fn korobov(r: f64, beta0: f64, beta1: f64) -> Result<Self> {
        if !(r > 0.5) || !r.is_finite() {
            return Err(domain(
                "korobov",
                format!("smoothness r must exceed 1/2, got {r}"),
            ));
        }
        if !(beta0 > 0.0) || !beta0.is_finite() {
            return Err(domain("korobov", format!("beta0 must be positive, got {beta0}")));
        }
        if !(beta1 >= 0.0) || !beta1.is_finite() {
            return Err(domain("korobov", format!("beta1 must be nonnegative, got {beta1}")));
        }
        let total_mass = beta0 + beta1 * zeta(2.0 * r)?;
        Ok(Self {
            kind: LambdaKind::Korobov { r, beta0, beta1 },
            total_mass,
        })
    }

    /// Korobov weights with `beta1 = (1 - beta0) / zeta(2r)`, so that the
    /// squared weights sum to one.
    pub fn normalize_korobov(r: f64, beta0: f64) -> Result<Self> {
        if !(r > 0.5) || !r.is_finite() {
            return Err(domain(
                "normalize_korobov",
                format!("smoothness r must exceed 1/2, got {r}"),
            ));
        }
        if !(beta0 > 0.0 && beta0 < 1.0) {
            return Err(domain(
                "normalize_korobov",
                format!("beta0 must lie in (0, 1), got {beta0}"),
            ));
        }
        let z = zeta(2.0 * r)?;
        let beta1 = (1.0 - beta0) / z;
        Ok(Self {
            kind: LambdaKind::Korobov { r, beta0, beta1 },
            total_mass: beta0 + beta1 * z,
        })
    }

    /// Finitely supported weights; `values[0]` must be positive and the rest
    /// nonnegative.
    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        match values.first() {
            Some(&v) if v > 0.0 && v.is_finite() => {}
            _ => return Err(domain("explicit", "lambda_0 must be positive and finite")),
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(domain("explicit", "all weights must be finite and nonnegative"));
        }
        let total_mass = values.iter().rev().map(|v| v * v).sum();
        Ok(Self {
            kind: LambdaKind::Explicit(values),
            total_mass,
        })
    }

    pub fn kind(&self) -> &LambdaKind {
        &self.kind
    }

    /// `(r, beta0, beta1)` for Korobov weights.
    pub fn korobov_params(&self) -> Option<(f64, f64, f64)> {
        match self.kind {
            LambdaKind::Korobov { r, beta0, beta1 } => Some((r, beta0, beta1)),
            LambdaKind::Explicit(_) => None,
        }
    }

    pub fn lambda_at(&self, k: u64) -> f64 {
        match &self.kind {
            LambdaKind::Korobov { r, beta0, beta1 } => {
                if k == 0 {
                    beta0.sqrt()
                } else {
                    beta1.sqrt() * (k as f64).powf(-r)
                }
            }
            LambdaKind::Explicit(v) => v.get(k as usize).copied().unwrap_or(0.0),
        }
    }

    /// `lambda_k^2`, computed without the square root round trip.
    pub fn lambda_sq(&self, k: u64) -> f64 {
        match &self.kind {
            LambdaKind::Korobov { r, beta0, beta1 } => {
                if k == 0 {
                    *beta0
                } else {
                    beta1 * (k as f64).powf(-2.0 * r)
                }
            }
            LambdaKind::Explicit(v) => v.get(k as usize).map_or(0.0, |x| x * x),
        }
    }

    /// `sum_k lambda_k^2`, the squared one-dimensional initial error.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_mass - 1.0).abs() <= NORMALIZATION_TOL
    }

    /// Largest frequency with nonzero weight, `None` if unbounded.
    pub fn max_frequency(&self) -> Option<u64> {
        match &self.kind {
            LambdaKind::Korobov { beta1, .. } => (*beta1 == 0.0).then_some(0),
            LambdaKind::Explicit(v) => Some(v.iter().rposition(|x| *x > 0.0).unwrap_or(0) as u64),
        }
    }

    /// Certified bracket `(lower, upper)` for `sum_{k > cut} lambda_k^2`.
    pub fn tail_mass(&self, cut: u64) -> (f64, f64) {
        match &self.kind {
            LambdaKind::Korobov { r, beta0, .. } => {
                let b1 = self.beta1_or_zero();
                if b1 == 0.0 {
                    return (0.0, 0.0);
                }
                if cut == 0 {
                    let t = self.total_mass - beta0;
                    return (t, t);
                }
                let (lo, hi) = power_tail_bracket(2.0 * r, cut);
                (b1 * lo, b1 * hi)
            }
            LambdaKind::Explicit(v) => {
                let t: f64 = v.iter().skip(cut as usize + 1).map(|x| x * x).sum();
                (t, t)
            }
        }
    }

    /// Smallest cutoff `K` whose certified tail mass is at most `tol`.
    pub fn mass_cutoff(&self, tol: f64) -> u64 {
        match &self.kind {
            LambdaKind::Korobov { r, .. } => {
                let b1 = self.beta1_or_zero();
                if b1 == 0.0 || self.tail_mass(0).1 <= tol {
                    return 0;
                }
                let s = 2.0 * r - 1.0;
                let mut k = ((b1 / (s * tol)).powf(1.0 / s)).ceil().max(1.0) as u64;
                while k > 1 && self.tail_mass(k - 1).1 <= tol {
                    k -= 1;
                }
                while self.tail_mass(k).1 > tol {
                    k += 1;
                }
                k
            }
            LambdaKind::Explicit(v) => {
                let mut tail = 0.0;
                for k in (0..v.len()).rev() {
                    tail += v[k] * v[k];
                    if tail > tol {
                        return k as u64;
                    }
                }
                0
            }
        }
    }

    fn beta1_or_zero(&self) -> f64 {
        match self.kind {
            LambdaKind::Korobov { beta1, .. } => beta1,
            LambdaKind::Explicit(_) => 0.0,
        }
    }
}

/// Multi-index `k in Z^d` labelling a tensor basis function.
///
/// Ordering is lexicographic over coordinates, with coordinates ranked
/// `0, 1, -1, 2, -2, ...`. This is the canonical order used for ties and
/// for the column order of randomized methods.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<i32>);

/// Rank of a single coordinate in the canonical order.
pub fn coordinate_key(k: i32) -> u64 {
    let a = k.unsigned_abs() as u64;
    if k < 0 {
        2 * a
    } else if k > 0 {
        2 * a - 1
    } else {
        0
    }
}

/// Inverse of [`coordinate_key`].
pub fn coordinate_from_key(key: u64) -> i32 {
    if key == 0 {
        0
    } else if key % 2 == 1 {
        key.div_ceil(2) as i32
    } else {
        -((key / 2) as i32)
    }
}

impl MultiIndex {
    pub fn new(entries: Vec<i32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(domain("MultiIndex", "dimension must be at least 1"));
        }
        Ok(Self(entries))
    }

    pub fn zero(d: usize) -> Self {
        Self(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i32] {
        &self.0
    }

    /// The index obtained by appending one coordinate.
    pub fn extended(&self, k: i32) -> Self {
        let mut v = self.0.clone();
        v.push(k);
        Self(v)
    }
}

impl From<Vec<i32>> for MultiIndex {
    fn from(v: Vec<i32>) -> Self {
        assert!(!v.is_empty(), "multi-index needs at least one coordinate");
        Self(v)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .iter()
            .map(|&k| coordinate_key(k))
            .cmp(other.0.iter().map(|&k| coordinate_key(k)))
            .then(self.0.len().cmp(&other.0.len()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// `psi_k(x)` in one dimension.
pub fn eval_basis_1d(seq: &LambdaSequence, k: i32, x: f64) -> f64 {
    let a = k.unsigned_abs() as u64;
    if a == 0 {
        return seq.lambda_at(0);
    }
    // reduce k*x modulo 1 before scaling by 2 pi
    let phase = TAU * (a as f64 * x).rem_euclid(1.0);
    let l = seq.lambda_at(a);
    if k > 0 {
        l * phase.cos()
    } else {
        l * phase.sin()
    }
}

/// `psi_k(x)` for a multi-index and a point of matching dimension.
pub fn eval_basis(seq: &LambdaSequence, k: &MultiIndex, x: &[f64]) -> f64 {
    k.0.iter()
        .zip(x)
        .map(|(&kj, &xj)| eval_basis_1d(seq, kj, xj))
        .product()
}

/// A finitely supported function `f = sum_k c_k psi_k` on the d-torus.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCoefFunction {
    d: usize,
    coefs: BTreeMap<MultiIndex, f64>,
    lambda: LambdaSequence,
}

impl SparseCoefFunction {
    pub fn zero(d: usize, lambda: LambdaSequence) -> Self {
        assert!(d >= 1, "dimension must be at least 1");
        Self {
            d,
            coefs: BTreeMap::new(),
            lambda,
        }
    }

    pub fn from_coefs(
        d: usize,
        lambda: LambdaSequence,
        coefs: impl IntoIterator<Item = (MultiIndex, f64)>,
    ) -> Result<Self> {
        let mut f = Self::zero(d, lambda);
        for (k, c) in coefs {
            f.insert(k, c)?;
        }
        Ok(f)
    }

    /// Sets a coefficient; zero values are dropped from the map.
    pub fn insert(&mut self, k: MultiIndex, c: f64) -> Result<()> {
        if k.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: k.dim(),
            });
        }
        if !c.is_finite() {
            return Err(domain("SparseCoefFunction", "coefficients must be finite"));
        }
        if c == 0.0 {
            self.coefs.remove(&k);
        } else {
            self.coefs.insert(k, c);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn lambda(&self) -> &LambdaSequence {
        &self.lambda
    }

    pub fn coefs(&self) -> &BTreeMap<MultiIndex, f64> {
        &self.coefs
    }

    pub fn coef(&self, k: &MultiIndex) -> f64 {
        self.coefs.get(k).copied().unwrap_or(0.0)
    }

    pub fn support_len(&self) -> usize {
        self.coefs.len()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: x.len(),
            });
        }
        Ok(self
            .coefs
            .iter()
            .map(|(k, c)| c * eval_basis(&self.lambda, k, x))
            .sum())
    }

    /// Euclidean norm of the coefficients.
    pub fn hilbert_norm(&self) -> f64 {
        self.coefs.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.d, self.lambda.clone());
        for (k, c) in &self.coefs {
            out.insert(k.clone(), a * c)?;
        }
        for (k, c) in &other.coefs {
            let v = out.coef(k) + b * c;
            out.insert(k.clone(), v)?;
        }
        Ok(out)
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.coefs.values_mut().for_each(|c| *c *= a);
        out.coefs.retain(|_, c| *c != 0.0);
        out
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: other.d,
            });
        }
        if self.lambda != other.lambda {
            return Err(Error::LambdaMismatch);
        }
        Ok(())
    }
}

/// `f(x)`; see [`SparseCoefFunction::eval`].
pub fn eval_function(f: &SparseCoefFunction, x: &[f64]) -> Result<f64> {
    f.eval(x)
}

pub fn hilbert_norm(f: &SparseCoefFunction) -> f64 {
    f.hilbert_norm()
}

/// Draws i.i.d. standard Gaussian coefficients on `support` and rescales
/// them to unit Hilbert norm.
pub fn random_unit_function<R: Rng + ?Sized>(
    d: usize,
    lambda: &LambdaSequence,
    support: &[MultiIndex],
    rng: &mut R,
) -> Result<SparseCoefFunction> {
    if support.is_empty() {
        return Err(domain("random_unit_function", "support must be nonempty"));
    }
    let mut draws: Vec<f64> = support.iter().map(|_| rng.sample(StandardNormal)).collect();
    let mut norm = draws.iter().map(|c| c * c).sum::<f64>().sqrt();
    // a zero draw has probability zero; redraw rather than divide by it
    while norm == 0.0 {
        draws = support.iter().map(|_| rng.sample(StandardNormal)).collect();
        norm = draws.iter().map(|c| c * c).sum::<f64>().sqrt();
    }
    SparseCoefFunction::from_coefs(
        d,
        lambda.clone(),
        support.iter().cloned().zip(draws.into_iter().map(|c| c / norm)),
    )
}

/// Embeds `f` on the d-torus into `d + 1` dimensions as
/// `f(x) K(0, x_{d+1})`, using [`EMBED_MASS_TOL`] as the dropped mass.
pub fn lopsided_embed(f: &SparseCoefFunction) -> Result<SparseCoefFunction> {
    lopsided_embed_with_tol(f, EMBED_MASS_TOL)
}

/// As [`lopsided_embed`], keeping frequencies `0..=K` in the new coordinate
/// where `K` is the smallest cutoff with certified tail mass `<= mass_tol`.
pub fn lopsided_embed_with_tol(
    f: &SparseCoefFunction,
    mass_tol: f64,
) -> Result<SparseCoefFunction> {
    let lambda = f.lambda();
    if !lambda.is_normalized() {
        return Err(Error::NotNormalized {
            mass: lambda.total_mass(),
        });
    }
    if !(mass_tol > 0.0) {
        return Err(domain("lopsided_embed", "mass tolerance must be positive"));
    }
    let cut = lambda.mass_cutoff(mass_tol);
    let weights: Vec<f64> = (0..=cut).map(|k| lambda.lambda_at(k)).collect();
    let mut out = SparseCoefFunction::zero(f.dim() + 1, lambda.clone());
    for (k, c) in f.coefs() {
        for (j, w) in weights.iter().enumerate() {
            if *w != 0.0 {
                out.insert(k.extended(j as i32), c * w)?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn fig1() -> LambdaSequence {
        LambdaSequence::normalize_korobov(1.25, 0.4).unwrap()
    }

    #[test]
    fn normalize_matches_printed_beta1() {
        let (_, _, b1) = fig1().korobov_params().unwrap();
        assert!((b1 - 0.4473).abs() < 1e-4);
        assert!(fig1().is_normalized());
    }

    #[test]
    fn normalize_r_one_is_three_over_pi_squared() {
        let l = LambdaSequence::normalize_korobov(1.0, 0.5).unwrap();
        let (_, _, b1) = l.korobov_params().unwrap();
        assert!((b1 - 3.0 / (PI * PI)).abs() < 1e-12);
    }

    #[test]
    fn normalize_rejects_bad_parameters() {
        assert!(LambdaSequence::normalize_korobov(0.5, 0.5).is_err());
        assert!(LambdaSequence::normalize_korobov(1.0, 1.0).is_err());
        assert!(LambdaSequence::normalize_korobov(1.0, 0.0).is_err());
        assert!(LambdaSequence::korobov(0.4, 0.5, 0.1).is_err());
        assert!(LambdaSequence::explicit(vec![0.0, 1.0]).is_err());
        assert!(LambdaSequence::explicit(vec![]).is_err());
    }

    #[test]
    fn lambda_values() {
        let l = fig1();
        assert!((l.lambda_at(0) - 0.4f64.sqrt()).abs() < 1e-15);
        let (_, _, b1) = l.korobov_params().unwrap();
        assert!((l.lambda_at(2) - b1.sqrt() * 2f64.powf(-1.25)).abs() < 1e-15);
        let e = LambdaSequence::explicit(vec![1.0]).unwrap();
        assert_eq!(e.lambda_at(5), 0.0);
        assert!(e.is_normalized());
    }

    #[test]
    fn basis_values() {
        let l = fig1();
        let l1 = l.lambda_at(1);
        assert_eq!(eval_basis_1d(&l, 0, 0.37), l.lambda_at(0));
        assert!((eval_basis_1d(&l, 1, 0.0) - l1).abs() < 1e-15);
        assert!((eval_basis_1d(&l, -1, 0.25) - l1).abs() < 1e-15);
    }

    #[test]
    fn function_evaluation() {
        let l = fig1();
        let f = SparseCoefFunction::from_coefs(3, l.clone(), [(MultiIndex::zero(3), 1.0)]).unwrap();
        let v = f.eval(&[0.1, 0.7, 0.3]).unwrap();
        assert!((v - 0.4f64.sqrt().powi(3)).abs() < 1e-15);
        let z = SparseCoefFunction::zero(2, l.clone());
        assert_eq!(z.eval(&[0.2, 0.4]).unwrap(), 0.0);
        let g = SparseCoefFunction::from_coefs(1, l.clone(), [(MultiIndex::from(vec![1]), 1.0)])
            .unwrap();
        assert!((g.eval(&[0.0]).unwrap() - l.lambda_at(1)).abs() < 1e-15);
        assert!(matches!(
            g.eval(&[0.0, 0.1]),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn norms() {
        let l = fig1();
        let f = SparseCoefFunction::from_coefs(
            1,
            l.clone(),
            [(MultiIndex::from(vec![2]), 3.0), (MultiIndex::from(vec![-4]), 4.0)],
        )
        .unwrap();
        assert!((f.hilbert_norm() - 5.0).abs() < 1e-15);
        assert_eq!(SparseCoefFunction::zero(1, l).hilbert_norm(), 0.0);
    }

    #[test]
    fn canonical_order() {
        let keys: Vec<i32> = (0..7).map(coordinate_from_key).collect();
        assert_eq!(keys, vec![0, 1, -1, 2, -2, 3, -3]);
        for k in -20..=20 {
            assert_eq!(coordinate_from_key(coordinate_key(k)), k);
        }
        let a = MultiIndex::from(vec![1, 0]);
        let b = MultiIndex::from(vec![-1, 0]);
        let c = MultiIndex::from(vec![0, 5]);
        assert!(c < a && a < b);
    }

    #[test]
    fn random_unit_function_contract() {
        let l = fig1();
        let support: Vec<MultiIndex> = (-3..=3).map(|k| MultiIndex::from(vec![k, 1])).collect();
        let f = random_unit_function(2, &l, &support, &mut seeded(11)).unwrap();
        assert!((f.hilbert_norm() - 1.0).abs() < 1e-12);
        let g = random_unit_function(2, &l, &support, &mut seeded(11)).unwrap();
        assert_eq!(f, g);
        let one = random_unit_function(1, &l, &[MultiIndex::zero(1)], &mut seeded(3)).unwrap();
        assert!((one.coef(&MultiIndex::zero(1)).abs() - 1.0).abs() < 1e-15);
        assert!(random_unit_function(1, &l, &[], &mut seeded(3)).is_err());
    }

    #[test]
    fn tail_bracket_brackets_one() {
        let l = fig1();
        for cut in [1u64, 2, 5, 40, 1000] {
            let head: f64 = (0..=cut).map(|k| l.lambda_sq(k)).sum();
            let (lo, hi) = l.tail_mass(cut);
            assert!(head + lo <= 1.0 + 1e-12 && head + hi >= 1.0 - 1e-12, "cut={cut}");
        }
        let cut = l.mass_cutoff(1e-6);
        assert!(l.tail_mass(cut).1 <= 1e-6 && l.tail_mass(cut - 1).1 > 1e-6);
    }

    #[test]
    fn orthogonality_on_grid() {
        // psi_j / sigma_j is the L2-normalized Fourier basis
        let l = fig1();
        let n = 2048;
        let sigma = |k: i32| {
            if k == 0 {
                l.lambda_at(0)
            } else {
                l.lambda_at(k.unsigned_abs() as u64) / 2f64.sqrt()
            }
        };
        for j in -4..=4 {
            for k in -4..=4 {
                let ip: f64 = (0..n)
                    .map(|i| {
                        let x = i as f64 / n as f64;
                        eval_basis_1d(&l, j, x) * eval_basis_1d(&l, k, x)
                    })
                    .sum::<f64>()
                    / n as f64
                    / (sigma(j) * sigma(k));
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() <= 1e-8, "j={j} k={k} ip={ip}");
            }
        }
    }

    #[test]
    fn embed_preserves_norm_and_sup() {
        let l = LambdaSequence::normalize_korobov(2.0, 0.5).unwrap();
        let support: Vec<MultiIndex> = (-2..=2).map(|k| MultiIndex::from(vec![k])).collect();
        let f = random_unit_function(1, &l, &support, &mut seeded(5)).unwrap();
        let g = lopsided_embed(&f).unwrap();
        assert_eq!(g.dim(), 2);
        assert!((g.hilbert_norm() - f.hilbert_norm()).abs() < 1e-8);
        let cut = l.mass_cutoff(EMBED_MASS_TOL);
        let kept: f64 = (0..=cut).map(|k| l.lambda_sq(k)).sum();
        for &x in &[0.0, 0.13, 0.5, 0.77] {
            let a = g.eval(&[x, 0.0]).unwrap();
            let b = f.eval(&[x]).unwrap() * kept;
            assert!((a - b).abs() < 1e-12);
            assert!((a - f.eval(&[x]).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn embed_constant() {
        let l = LambdaSequence::normalize_korobov(1.5, 0.6).unwrap();
        let f = SparseCoefFunction::from_coefs(1, l.clone(), [(MultiIndex::zero(1), 2.0)]).unwrap();
        let g = lopsided_embed_with_tol(&f, 1e-6).unwrap();
        for k in 0..10 {
            let c = g.coef(&MultiIndex::from(vec![0, k]));
            assert!((c - 2.0 * l.lambda_at(k as u64)).abs() < 1e-15);
        }
        let raw = LambdaSequence::korobov(1.5, 0.6, 1.0).unwrap();
        let h = SparseCoefFunction::zero(1, raw);
        assert!(matches!(lopsided_embed(&h), Err(Error::NotNormalized { .. })));
    }

    proptest! {
        #[test]
        fn evaluation_is_linear(
            a in -3.0f64..3.0, b in -3.0f64..3.0,
            x in 0.0f64..1.0, y in 0.0f64..1.0, seed in any::<u64>(),
        ) {
            let l = LambdaSequence::normalize_korobov(1.25, 0.4).unwrap();
            let support: Vec<MultiIndex> = (-3..=3)
                .flat_map(|i| (-2..=2).map(move |j| MultiIndex::from(vec![i, j])))
                .collect();
            let mut rng = seeded(seed);
            let f = random_unit_function(2, &l, &support, &mut rng).unwrap();
            let g = random_unit_function(2, &l, &support[5..20], &mut rng).unwrap();
            let h = f.combine(a, &g, b).unwrap();
            let lhs = h.eval(&[x, y]).unwrap();
            let rhs = a * f.eval(&[x, y]).unwrap() + b * g.eval(&[x, y]).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }

        #[test]
        fn parseval(coefs in proptest::collection::vec(-5.0f64..5.0, 1..30)) {
            let l = LambdaSequence::normalize_korobov(1.0, 0.5).unwrap();
            let f = SparseCoefFunction::from_coefs(
                1,
                l,
                coefs.iter().enumerate().map(|(i, c)| (MultiIndex::from(vec![i as i32]), *c)),
            ).unwrap();
            let sq: f64 = coefs.iter().map(|c| c * c).sum();
            prop_assert!((f.hilbert_norm().powi(2) - sq).abs() <= 1e-12 * (1.0 + sq));
        }
    }
}
