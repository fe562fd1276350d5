//! Reproducing kernels of the periodic tensor-product spaces, torus and
//! canonical metrics, initial errors and local decay profiles.
//!
//! The one-dimensional kernel is `K(x, y) = sum_k lambda_k^2 cos(2 pi k u)`
//! with `u = d_T(x, y)`. For Korobov weights the series is split into a
//! directly summed head and a tail `sum_{k >= M} a_k z^k`, `z = exp(2 pi i u)`,
//! which is rewritten by repeated Abel summation as
//!
//! ```text
//! z^M / (1 - z) * sum_{j < J} w^j (Delta^j a)(M),   w = z / (1 - z),
//! ```
//!
//! with remainder at most `|w|^J |(Delta^{J-1} a)(M)|` because `k^{-2r}` is
//! completely monotone. The head length is chosen so the terms decay
//! geometrically, which gives certified values at a cost of `O(1/u)` terms.

use crate::error::{domain, Error, Result};
use crate::model::{LambdaKind, LambdaSequence};
use crate::special::zeta;
use std::f64::consts::{PI, TAU};

/// Default certified absolute error of kernel evaluations.
pub const DEFAULT_TRUNC_TOL: f64 = 1e-10;

/// Grid size used to certify decay profiles.
pub const CERTIFY_GRID: usize = 10_000;

/// Multiplicative safety margin applied to fitted decay constants.
pub const FIT_MARGIN: f64 = 1.05;

const MAX_HEAD: u64 = 1 << 24;
const MAX_ABEL_TERMS: usize = 48;

/// Distance on the one-dimensional torus, in `[0, 1/2]`.
pub fn torus_metric(x: f64, y: f64) -> f64 {
    let t = (x - y).abs().rem_euclid(1.0);
    t.min(1.0 - t)
}

/// `l_p` aggregation of coordinatewise torus distances; `p = inf` gives the
/// maximum. For `p < 1` this is only a quasi-metric.
pub fn torus_metric_p(x: &[f64], y: &[f64], p: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if !(p > 0.0) {
        return Err(domain("torus_metric_p", format!("p must be positive, got {p}")));
    }
    let dist = x.iter().zip(y).map(|(a, b)| torus_metric(*a, *b));
    if p.is_infinite() {
        Ok(dist.fold(0.0, f64::max))
    } else {
        Ok(dist.map(|t| t.powf(p)).sum::<f64>().powf(1.0 / p))
    }
}

/// A lambda sequence together with the certified evaluation tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    lambda: LambdaSequence,
    trunc_tol: f64,
}

impl KernelSpec {
    pub fn new(lambda: LambdaSequence, trunc_tol: f64) -> Result<Self> {
        if !(trunc_tol > 0.0) || !trunc_tol.is_finite() {
            return Err(domain(
                "KernelSpec",
                format!("trunc_tol must be positive, got {trunc_tol}"),
            ));
        }
        Ok(Self { lambda, trunc_tol })
    }

    pub fn with_default_tol(lambda: LambdaSequence) -> Self {
        Self {
            lambda,
            trunc_tol: DEFAULT_TRUNC_TOL,
        }
    }

    pub fn lambda(&self) -> &LambdaSequence {
        &self.lambda
    }

    pub fn trunc_tol(&self) -> f64 {
        self.trunc_tol
    }

    /// `K(u)` for a torus distance `u`, with a certified bound on the
    /// truncation error (not counting floating-point rounding).
    pub fn eval_distance(&self, u: f64, tol: f64) -> (f64, f64) {
        let u = torus_metric(u, 0.0);
        match self.lambda.kind() {
            LambdaKind::Explicit(v) => {
                let s = v
                    .iter()
                    .enumerate()
                    .rev()
                    .map(|(k, l)| l * l * cos_turns(k as u64, u))
                    .sum();
                (s, 0.0)
            }
            LambdaKind::Korobov { r, beta0, beta1 } => {
                if *beta1 == 0.0 {
                    (*beta0, 0.0)
                } else if u == 0.0 {
                    (self.lambda.total_mass(), 0.0)
                } else {
                    let (tail, err) = korobov_series(2.0 * r, u, tol);
                    (beta0 + beta1 * tail, beta1 * err)
                }
            }
        }
    }
}

/// `cos(2 pi k u)` with the argument reduced modulo one turn.
fn cos_turns(k: u64, u: f64) -> f64 {
    (TAU * (k as f64 * u).rem_euclid(1.0)).cos()
}

/// `sum_{k >= 1} k^{-s} cos(2 pi k u)` for `0 < u <= 1/2`, returning the
/// value and a certified bound on the remainder of `beta1`-free series.
fn korobov_series(s: f64, u: f64, tol: f64) -> (f64, f64) {
    let two_sin = 2.0 * (PI * u).sin();
    let wabs = 1.0 / two_sin;
    let mut head_len = ((4.0 * wabs * (s + 8.0)).ceil() as u64).max(32);
    loop {
        let (val, err) = abel_split(s, u, head_len, tol);
        if err <= tol || head_len >= MAX_HEAD {
            return (val, err);
        }
        head_len = (head_len * 4).min(MAX_HEAD);
    }
}

fn abel_split(s: f64, u: f64, m: u64, tol: f64) -> (f64, f64) {
    let head: f64 = (1..m)
        .rev()
        .map(|k| (k as f64).powf(-s) * cos_turns(k, u))
        .sum();

    // z = e^{i theta}, 1 - z, w = z / (1 - z), z^M / (1 - z)
    let theta = TAU * u;
    let z = (theta.cos(), theta.sin());
    let one_minus_z = (1.0 - z.0, -z.1);
    let w = cdiv(z, one_minus_z);
    let phase_m = TAU * (m as f64 * u).rem_euclid(1.0);
    let lead = cdiv((phase_m.cos(), phase_m.sin()), one_minus_z);
    let wabs = w.0.hypot(w.1);

    // forward differences of a(k) = k^{-s} at k = m, kept as a table
    let mut diffs: Vec<f64> = (0..=MAX_ABEL_TERMS as u64)
        .map(|i| ((m + i) as f64).powf(-s))
        .collect();
    let mut acc = (0.0, 0.0);
    let mut wpow = (1.0, 0.0);
    let mut wabs_pow = 1.0;
    let mut bound = f64::INFINITY;
    for j in 0..MAX_ABEL_TERMS {
        // diffs[0] now holds Delta^j a(m)
        let term = cmul(wpow, (diffs[0], 0.0));
        acc = (acc.0 + term.0, acc.1 + term.1);
        wpow = cmul(wpow, w);
        wabs_pow *= wabs;
        // remainder after j+1 terms: |w|^{j+1} |Delta^j a(m)|
        bound = wabs_pow * diffs[0].abs();
        if bound <= tol {
            break;
        }
        for i in 0..diffs.len() - j - 1 {
            diffs[i] = diffs[i + 1] - diffs[i];
        }
    }
    let tail = cmul(lead, acc).0;
    (head + tail, bound)
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let n = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / n, (a.1 * b.0 - a.0 * b.1) / n)
}

/// One-dimensional kernel `K(x, y)`, accurate to `spec.trunc_tol()`.
pub fn kernel_1d(spec: &KernelSpec, x: f64, y: f64) -> f64 {
    spec.eval_distance(torus_metric(x, y), spec.trunc_tol).0
}

/// Product kernel `K_d(x, y) = prod_j K(x_j, y_j)`.
pub fn kernel_nd(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let tol = spec.trunc_tol / x.len().max(1) as f64;
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| spec.eval_distance(torus_metric(*a, *b), tol).0)
        .product())
}

/// Canonical metric `sqrt(K(x,x) - 2 K(x,y) + K(y,y))`.
///
/// Negative radicands down to `-10 trunc_tol` are clamped to zero; anything
/// below that is reported as an inconsistent kernel.
pub fn canonical_metric(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    let kxy = kernel_nd(spec, x, y)?;
    let kxx = kernel_nd(spec, x, x)?;
    let kyy = kernel_nd(spec, y, y)?;
    let rad = kxx - 2.0 * kxy + kyy;
    if rad < -10.0 * spec.trunc_tol {
        return Err(Error::NegativeRadicand {
            op: "canonical_metric",
            value: rad,
        });
    }
    Ok(rad.max(0.0).sqrt())
}

/// Initial error `(sum_k lambda_k^2)^{d/2}` of uniform approximation.
pub fn initial_error(lambda: &LambdaSequence, d: usize) -> f64 {
    lambda.total_mass().powf(d as f64 / 2.0)
}

/// Local lower bound `K(x, 0) >= 1 - alpha d_T(x, 0)^p` for `d_T <= r0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayProfile {
    pub p: f64,
    pub alpha: f64,
    pub r0: f64,
}

impl DecayProfile {
    pub fn new(p: f64, alpha: f64, r0: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(domain("DecayProfile", format!("p must lie in (0, 1], got {p}")));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(domain("DecayProfile", format!("alpha must be positive, got {alpha}")));
        }
        if !(r0 > 0.0 && r0 <= 0.5) {
            return Err(domain("DecayProfile", format!("r0 must lie in (0, 1/2], got {r0}")));
        }
        Ok(Self { p, alpha, r0 })
    }

    /// Checks the defining inequality at `x_i = i r0 / grid`, `i = 1..=grid`,
    /// allowing the kernel's certified tolerance.
    pub fn certify(&self, spec: &KernelSpec, grid: usize) -> Result<()> {
        for i in 0..=grid {
            let x = self.r0 * i as f64 / grid as f64;
            let (k, err) = spec.eval_distance(x, spec.trunc_tol);
            let floor = 1.0 - self.alpha * x.powf(self.p);
            if k + err + spec.trunc_tol < floor {
                return Err(domain(
                    "DecayProfile::certify",
                    format!("K({x}, 0) = {k} below 1 - alpha x^p = {floor}"),
                ));
            }
        }
        Ok(())
    }
}

/// Decay profile of a normalized Korobov kernel.
///
/// For `r > 1` the derivative bound gives `p = 1`, `alpha = 2 pi beta1
/// zeta(2r - 1)`, `r0 = 1/2`. For `1/2 < r <= 1` the exponent is `2r - 1`
/// with `r0 = 1/(sqrt 2 pi)` and `alpha` fitted numerically. Either way the
/// result is certified on a [`CERTIFY_GRID`]-point grid.
pub fn decay_profile_korobov(lambda: &LambdaSequence) -> Result<DecayProfile> {
    let (r, _, beta1) = lambda
        .korobov_params()
        .ok_or_else(|| domain("decay_profile_korobov", "requires Korobov weights"))?;
    if !lambda.is_normalized() {
        return Err(Error::NotNormalized {
            mass: lambda.total_mass(),
        });
    }
    let spec = KernelSpec::with_default_tol(lambda.clone());
    let profile = if r > 1.0 {
        DecayProfile::new(1.0, TAU * beta1 * zeta(2.0 * r - 1.0)?, 0.5)?
    } else {
        let p = 2.0 * r - 1.0;
        let r0 = 1.0 / (2f64.sqrt() * PI);
        let alpha = fit_decay_constant(&spec, p, r0, 2_000)?;
        DecayProfile::new(p, alpha, r0)?
    };
    profile.certify(&spec, CERTIFY_GRID)?;
    Ok(profile)
}

/// Smallest `alpha` with `K(x, 0) >= 1 - alpha x^p` on the grid
/// `x_i = i r0 / grid_size`, inflated by [`FIT_MARGIN`].
pub fn fit_decay_constant(spec: &KernelSpec, p: f64, r0: f64, grid_size: usize) -> Result<f64> {
    let tol = spec.trunc_tol;
    fit_decay_constant_with(|x| spec.eval_distance(x, tol).0, tol, p, r0, grid_size)
}

/// [`fit_decay_constant`] for an arbitrary stationary kernel `x -> K(x, 0)`.
pub fn fit_decay_constant_with<F: Fn(f64) -> f64>(
    kernel: F,
    tol: f64,
    p: f64,
    r0: f64,
    grid_size: usize,
) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) || !(r0 > 0.0 && r0 <= 0.5) {
        return Err(domain("fit_decay_constant", "requires 0 < p <= 1 and 0 < r0 <= 1/2"));
    }
    if grid_size < 1000 {
        return Err(domain("fit_decay_constant", "grid_size must be at least 1000"));
    }
    let mut worst: f64 = 0.0;
    for i in 0..=grid_size {
        let x = r0 * i as f64 / grid_size as f64;
        let k = kernel(x);
        if k > 1.0 + tol {
            return Err(domain(
                "fit_decay_constant",
                format!("K({x}, 0) = {k} exceeds 1; the kernel is not normalized"),
            ));
        }
        if i > 0 {
            worst = worst.max((1.0 - k) / x.powf(p));
        }
    }
    if !(worst > 0.0) {
        return Err(domain("fit_decay_constant", "kernel does not decay on the grid"));
    }
    Ok(FIT_MARGIN * worst)
}
