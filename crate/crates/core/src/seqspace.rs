//! Finite-dimensional sequence spaces: the Gaussian sketch `N^T N` on
//! `l_2^m` with `N = n^{-1/2} X`, its error bound in `l_q^m`, the
//! deterministic lower bound for `l_2^m -> l_inf^m` and expected norms of
//! standard Gaussian vectors.

use crate::error::{domain, Error, Result};
use crate::gaussfield::mean_and_se;
use crate::mcapprox::sketch;
use crate::quad::adaptive_simpson;
use crate::rng::{derived, seeded, stream_id};
use crate::special::{ln_gamma, normal_sf};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::{FRAC_2_PI, SQRT_2};

/// Monte Carlo sample count used by [`mathe_error_bound`] when `E||X||_q`
/// has no closed form or quadrature.
pub const BOUND_MC_SAMPLES: usize = 100_000;

/// Seed for the Monte Carlo fallback in [`mathe_error_bound`].
pub const BOUND_MC_SEED: u64 = 0x5eed;

const MC_CHUNK: usize = 1024;

/// Dimensions and seed of one sketch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SketchConfig {
    pub m: usize,
    pub n: usize,
    /// Target norm index; `f64::INFINITY` for the max norm.
    pub q: f64,
    pub seed: u64,
}

impl SketchConfig {
    pub fn new(m: usize, n: usize, q: f64, seed: u64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(domain("SketchConfig", "m and n must be at least 1"));
        }
        if !(q >= 1.0) {
            return Err(domain("SketchConfig", format!("q must be at least 1, got {q}")));
        }
        Ok(Self { m, n, q, seed })
    }
}

/// `N^T N x` with a fresh `n x m` Gaussian `N` drawn row-major from `rng`.
pub fn mathe_sketch<R: Rng + ?Sized>(x: &[f64], cfg: &SketchConfig, rng: &mut R) -> Result<Vec<f64>> {
    if x.len() != cfg.m {
        return Err(Error::DimensionMismatch {
            expected: cfg.m,
            got: x.len(),
        });
    }
    Ok(sketch(x, cfg.n, rng))
}

/// `||x||_q`, with `q = inf` the max norm.
pub fn lq_norm(x: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if q == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if q == 2.0 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        x.iter().map(|v| v.abs().powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// How [`gauss_norm_expectation`] evaluates `E||X||_q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormMethod {
    /// Closed forms for `q = 1, 2`, one-dimensional quadrature for `q = inf`.
    Quadrature,
    MonteCarlo { samples: usize, seed: u64 },
}

/// `E||X||_q` with its standard error for Monte Carlo estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormExpectation {
    pub value: f64,
    pub std_error: Option<f64>,
}

/// `E||X||_q` for a standard Gaussian vector `X` in `R^m`.
pub fn gauss_norm_expectation(m: usize, q: f64, method: NormMethod) -> Result<NormExpectation> {
    if !(q >= 1.0) {
        return Err(domain("gauss_norm_expectation", format!("q must be at least 1, got {q}")));
    }
    if m == 0 {
        return Err(domain("gauss_norm_expectation", "m must be at least 1"));
    }
    match method {
        NormMethod::Quadrature => {
            let value = if q.is_infinite() {
                expected_abs_max(m)
            } else if q == 1.0 {
                m as f64 * FRAC_2_PI.sqrt()
            } else if q == 2.0 {
                // mean of the chi distribution
                SQRT_2 * (ln_gamma((m as f64 + 1.0) / 2.0) - ln_gamma(m as f64 / 2.0)).exp()
            } else {
                return Err(domain(
                    "gauss_norm_expectation",
                    format!("no quadrature for q = {q}; use Monte Carlo"),
                ));
            };
            Ok(NormExpectation {
                value,
                std_error: None,
            })
        }
        NormMethod::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(domain("gauss_norm_expectation", "needs at least 2 samples"));
            }
            let stream = stream_id("gauss_norm_expectation");
            let chunks = samples.div_ceil(MC_CHUNK);
            let values: Vec<f64> = (0..chunks)
                .into_par_iter()
                .flat_map_iter(|c| {
                    let mut rng = derived(seed, stream, c as u64);
                    let len = MC_CHUNK.min(samples - c * MC_CHUNK);
                    let mut x = vec![0.0; m];
                    (0..len)
                        .map(|_| {
                            x.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
                            lq_norm(&x, q)
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
            let (value, se) = mean_and_se(&values);
            Ok(NormExpectation {
                value,
                std_error: Some(se),
            })
        }
    }
}

/// `E max_i |X_i| = int_0^inf [1 - (1 - 2 Phi(-t))^m] dt`, cut where
/// `2 m Phi(-T) <= 1e-14`.
fn expected_abs_max(m: usize) -> f64 {
    let mf = m as f64;
    let tail = |t: f64| -(mf * (-2.0 * normal_sf(t)).ln_1p()).exp_m1();
    let mut cut = 1.0;
    while 2.0 * mf * normal_sf(cut) > 1e-14 {
        cut += 0.5;
    }
    // split at the bulk of the maximum for a well-resolved transition
    let mid = (2.0 * mf.ln()).sqrt().min(cut);
    adaptive_simpson(tail, 0.0, mid, 1e-12, 50) + adaptive_simpson(tail, mid, cut, 1e-12, 50)
}

/// `2 E||X||_q / sqrt(n)`, bounding the expected `l_q` error of the sketch
/// on the unit ball of `l_2^m`.
///
/// Norm indices without quadrature use [`BOUND_MC_SAMPLES`] Monte Carlo
/// samples under [`BOUND_MC_SEED`].
pub fn mathe_error_bound(m: usize, n: usize, q: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("mathe_error_bound", "n must be at least 1"));
    }
    let e = match gauss_norm_expectation(m, q, NormMethod::Quadrature) {
        Ok(e) => e,
        Err(Error::Domain { .. }) if q >= 1.0 && m >= 1 => gauss_norm_expectation(
            m,
            q,
            NormMethod::MonteCarlo {
                samples: BOUND_MC_SAMPLES,
                seed: BOUND_MC_SEED,
            },
        )?,
        Err(e) => return Err(e),
    };
    Ok(2.0 * e.value / (n as f64).sqrt())
}

/// `(1 - eps^2) m`, a lower bound on the number of deterministic linear
/// functionals needed for error `eps` from `l_2^m` to `l_inf^m`.
pub fn smolyak_lower_bound(m: usize, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain("smolyak_lower_bound", format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok((1.0 - eps * eps) * m as f64)
}

/// Replicated `E||x - N^T N x||_q` for a fixed input, with generators
/// `derive_seed(cfg.seed, stream_id("sketch_error"), i)`.
pub fn empirical_sketch_error(x: &[f64], cfg: &SketchConfig, replications: usize) -> Result<(f64, f64)> {
    if replications < 2 {
        return Err(domain("empirical_sketch_error", "needs at least 2 replications"));
    }
    if x.len() != cfg.m {
        return Err(Error::DimensionMismatch {
            expected: cfg.m,
            got: x.len(),
        });
    }
    let stream = stream_id("sketch_error");
    let errs: Vec<f64> = (0..replications)
        .into_par_iter()
        .map(|i| {
            let mut rng = derived(cfg.seed, stream, i as u64);
            let y = sketch(x, cfg.n, &mut rng);
            let diff: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            lq_norm(&diff, cfg.q)
        })
        .collect();
    Ok(mean_and_se(&errs))
}

/// A unit vector in `l_2^m` with i.i.d. Gaussian direction.
pub fn random_unit_vector(m: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeded(seed);
    loop {
        let x: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let norm = lq_norm(&x, 2.0);
        if norm > 0.0 {
            return x.into_iter().map(|v| v / norm).collect();
        }
    }
}
