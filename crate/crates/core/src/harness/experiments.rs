//! Experiment runners. Each writes its data files into `out_dir` and
//! returns the series it wrote.
//!
//! Randomness is keyed by `derive_seed(seed, stream_id(label), index)` with
//! fixed labels, so outputs depend only on the configuration.

use super::config::{Experiment, ExperimentConfig};
use super::series::DataSeries;
use crate::detapprox::{curse_beta, curse_bound, det_worst_case_error, lower_bound_from, top_n_indices, IndexSelection};
use crate::error::{domain, Error, Result};
use crate::gaussfield::{default_truncation, dudley_bound_with, estimate_sup_norm_on, TruncationSet};
use crate::grid::PointSet;
use crate::kernel::{
    canonical_metric, decay_profile_korobov, fit_decay_constant, initial_error, DecayProfile, KernelSpec,
    CERTIFY_GRID,
};
use crate::mcapprox::{empirical_error_on, mc_approximate, mc_complexity_bound, mc_error_bound, MCConfig};
use crate::model::{random_unit_function, LambdaSequence, LambdaKind};
use crate::rng::{derive_seed, derived, stream_id};
use crate::seqspace::{
    empirical_sketch_error, gauss_norm_expectation, random_unit_vector, smolyak_lower_bound, NormMethod,
    SketchConfig,
};
use std::collections::BTreeMap;
use std::path::PathBuf;

/// Random evaluation points used when a tensor grid exceeds the budget.
pub const RANDOM_POINTS_CAP: usize = 1 << 14;

/// Files written and remarks produced by one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub series: Vec<DataSeries>,
    pub notes: Vec<String>,
}

impl RunSummary {
    fn write_dat(&mut self, cfg: &ExperimentConfig, name: &str, s: DataSeries) -> Result<()> {
        let path = cfg.out_dir.join(name);
        s.write_dat(&path)?;
        self.files.push(path);
        self.series.push(s);
        Ok(())
    }

    fn write_csv(&mut self, cfg: &ExperimentConfig, name: &str, s: DataSeries) -> Result<()> {
        let path = cfg.out_dir.join(name);
        s.write_csv(&path)?;
        self.files.push(path);
        self.series.push(s);
        Ok(())
    }
}

/// Validates `cfg`, creates the output directory and runs the experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    match cfg.experiment {
        Experiment::Kernel => run_kernel(cfg),
        Experiment::Bounds => run_bounds(cfg),
        Experiment::Simulate => run_simulate(cfg),
        Experiment::Scaling => run_scaling(cfg),
        Experiment::Seqspace => run_seqspace(cfg),
    }
}

fn seed(cfg: &ExperimentConfig) -> Result<u64> {
    cfg.seed
        .ok_or_else(|| Error::Config(format!("experiment `{}` requires a seed", cfg.experiment)))
}

/// Decay profile of the configured kernel: analytic and certified for
/// Korobov weights, fitted with `p = 1`, `r0 = 1/2` for explicit weights.
pub fn decay_profile(lambda: &LambdaSequence) -> Result<DecayProfile> {
    match lambda.kind() {
        LambdaKind::Korobov { .. } => decay_profile_korobov(lambda),
        LambdaKind::Explicit(_) => {
            let spec = KernelSpec::with_default_tol(lambda.clone());
            let alpha = fit_decay_constant(&spec, 1.0, 0.5, 2_000)?;
            let profile = DecayProfile::new(1.0, alpha, 0.5)?;
            profile.certify(&spec, CERTIFY_GRID)?;
            Ok(profile)
        }
    }
}

/// Uniform grid within budget, otherwise seeded random points.
fn evaluation_points(d: usize, grid: usize, budget: usize, master: u64) -> Result<PointSet> {
    match PointSet::uniform(d, grid, budget) {
        Ok(p) => Ok(p),
        Err(Error::GridBudget { .. }) => {
            let mut rng = derived(master, stream_id("random_points"), d as u64);
            Ok(PointSet::random(d, budget.min(RANDOM_POINTS_CAP), &mut rng))
        }
        Err(e) => Err(e),
    }
}

/// `K(u, 0)`, its certified error and the canonical distance `d_K(u, 0)`
/// for `u = i / grid`, in one dimension.
pub fn run_kernel(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let lambda = cfg.lambda_sequence()?;
    let spec = KernelSpec::with_default_tol(lambda.clone());
    let mut s = DataSeries::new(["u", "kernel", "error_bound", "canonical_metric"]);
    for i in 0..=cfg.grid {
        let u = i as f64 / cfg.grid as f64;
        let (k, err) = spec.eval_distance(u, spec.trunc_tol());
        let dk = canonical_metric(&spec, &[u], &[0.0])?;
        s.push(vec![u, k, err, dk], "kernel")?;
    }
    let mut out = RunSummary::default();
    let profile = decay_profile(&lambda)?;
    out.notes.push(format!(
        "decay profile: p = {}, alpha = {:.10}, r0 = {}",
        profile.p, profile.alpha, profile.r0
    ));
    out.write_dat(cfg, "kernel.dat", s)?;
    Ok(out)
}

/// Per dimension and `n`: the singular-value lower bound, the exact
/// worst-case error of the optimal projection on the grid, the Monte Carlo
/// upper bound `2 E||Psi||_inf / sqrt(n)` and the estimate it uses.
///
/// The `n = 0` row is always present; its Monte Carlo column holds the
/// initial error. The projection error is evaluated on at least
/// `2 max|k| + 1` points per dimension, so that its grid mean is the exact
/// mean and it cannot fall below the lower bound.
pub fn run_bounds(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let master = seed(cfg)?;
    let lambda = cfg.lambda_sequence()?;
    let mut ns = cfg.n.clone();
    ns.push(0);
    ns.sort_unstable();
    ns.dedup();
    let n_top = *ns.last().unwrap();
    let mut s = DataSeries::new(["d", "n", "det_lower", "det_error", "mc_upper", "sup_norm_estimate"]);
    for &d in &cfg.dims {
        let trunc = default_truncation(&lambda, d, cfg.mass_tol)?;
        let points = PointSet::uniform(d, cfg.grid, cfg.grid_budget)?;
        let mut rng = derived(master, stream_id("bounds"), d as u64);
        let sup = estimate_sup_norm_on(&lambda, &trunc, &points, cfg.replications, &mut rng)?;
        let all = top_n_indices(&lambda, d, n_top);
        let det_grid = cfg.grid.max(2 * max_frequency(&all) + 1);
        for &n in &ns {
            let sel: IndexSelection = all.prefix(n);
            let lower = lower_bound_from(&sel);
            let det = det_worst_case_error(&lambda, d, &sel, det_grid, cfg.grid_budget)?;
            let mc = if n == 0 {
                initial_error(&lambda, d)
            } else {
                mc_error_bound(sup.mean, n)?
            };
            s.push(vec![d as f64, n as f64, lower, det, mc, sup.mean], "bounds")?;
        }
    }
    let mut out = RunSummary::default();
    out.write_csv(cfg, "bounds.csv", s)?;
    Ok(out)
}

/// Largest `|k_j|` over a selection.
pub fn max_frequency(sel: &IndexSelection) -> usize {
    sel.indices()
        .iter()
        .flat_map(|k| k.entries().iter().map(|c| c.unsigned_abs() as usize))
        .max()
        .unwrap_or(0)
}

/// Truncation shared by all curves of [`run_simulate`].
pub fn simulate_truncation(cfg: &ExperimentConfig) -> Result<TruncationSet> {
    default_truncation(&cfg.lambda_sequence()?, 1, cfg.mass_tol)
}

/// A seeded random unit-norm input on the truncation set and its Monte
/// Carlo approximations for every configured `n`, evaluated at `i / grid`
/// for `i = 0..=grid`.
///
/// Writes `originalfcn.dat` and `approx{n}.dat`.
pub fn run_simulate(cfg: &ExperimentConfig) -> Result<RunSummary> {
    if cfg.dims != [1] {
        return Err(Error::Config("simulate requires dims = 1".into()));
    }
    let master = seed(cfg)?;
    let lambda = cfg.lambda_sequence()?;
    let trunc = default_truncation(&lambda, 1, cfg.mass_tol)?;
    let mut input_rng = derived(master, stream_id("simulate_input"), 0);
    let f = random_unit_function(1, &lambda, trunc.indices(), &mut input_rng)?;
    let xs: Vec<f64> = (0..=cfg.grid).map(|i| i as f64 / cfg.grid as f64).collect();
    let curve = |g: &crate::model::SparseCoefFunction, op: &str| -> Result<DataSeries> {
        let mut s = DataSeries::new(["x", "value"]);
        for &x in &xs {
            s.push(vec![x, g.eval(&[x])?], op)?;
        }
        Ok(s)
    };
    let mut out = RunSummary::default();
    out.write_dat(cfg, "originalfcn.dat", curve(&f, "simulate input")?)?;
    let stream = stream_id("simulate");
    for &n in &cfg.n {
        let mc = MCConfig::new(n, trunc.clone(), derive_seed(master, stream, n as u64))?;
        let g = mc_approximate(&f, &mc, &mut mc.rng())?;
        out.write_dat(cfg, &format!("approx{n}.dat"), curve(&g, "simulate approximation")?)?;
    }
    out.notes.push(format!(
        "input: random unit-norm function on {} basis indices (dropped mass {:.3e})",
        trunc.len(),
        trunc.dropped_mass()
    ));
    Ok(out)
}

/// Per `(d, eps)`: the smallest tested `n` whose replicated mean error plus
/// two standard errors is at most `eps`, next to the Dudley-based Monte
/// Carlo bound and the deterministic curse bound.
///
/// `n` is searched on the ladder `1, 2, 4, ...` up to `n_max` and refined by
/// bisection inside the first passing rung. `reached = 0` marks an
/// exhausted ladder, in which case `n_emp` is reported as 0.
pub fn run_scaling(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let master = seed(cfg)?;
    let lambda = cfg.lambda_sequence()?;
    let profile = decay_profile(&lambda)?;
    let beta = curse_beta(&lambda);
    let mut s = DataSeries::new(["d", "eps", "n_emp", "reached", "n_mc_bound", "n_det_lower"]);
    let mut out = RunSummary::default();
    for &d in &cfg.dims {
        let trunc = default_truncation(&lambda, d, cfg.mass_tol)?;
        let points = evaluation_points(d, cfg.grid, cfg.grid_budget, master)?;
        if points.per_dim().is_none() {
            out.notes.push(format!("d = {d}: {} random evaluation points", points.len()));
        }
        let mut rng = derived(master, stream_id("scaling_input"), d as u64);
        let f = random_unit_function(d, &lambda, trunc.indices(), &mut rng)?;
        let mc_seed = derive_seed(master, stream_id("scaling"), d as u64);
        let sup = dudley_bound_with(&profile, d, cfg.c_dudley)?;
        let mut cache: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
        let mut error_at = |n: usize| -> Result<(f64, f64)> {
            if let Some(v) = cache.get(&n) {
                return Ok(*v);
            }
            let mc = MCConfig::new(n, trunc.clone(), mc_seed)?;
            let rep = empirical_error_on(&f, &mc, &points, cfg.replications)?;
            cache.insert(n, (rep.mean_error, rep.std_error));
            Ok((rep.mean_error, rep.std_error))
        };
        for &eps in &cfg.eps {
            let mut passes = |n: usize| -> Result<bool> {
                let (m, se) = error_at(n)?;
                Ok(m + 2.0 * se <= eps)
            };
            let n_emp = ladder_search(cfg.n_max, &mut passes)?;
            let n_mc = mc_complexity_bound(sup, eps)? as f64;
            let n_det = curse_bound(beta, d, eps)?;
            let (n_emp, reached) = match n_emp {
                Some(n) => (n as f64, 1.0),
                None => (0.0, 0.0),
            };
            s.push(vec![d as f64, eps, n_emp, reached, n_mc, n_det], "scaling")?;
        }
    }
    out.write_csv(cfg, "scaling.csv", s)?;
    Ok(out)
}

/// Smallest `n <= n_max` with `passes(n)`, assuming monotonicity: first
/// passing power of two, then bisection below it.
pub fn ladder_search<F: FnMut(usize) -> Result<bool>>(n_max: usize, passes: &mut F) -> Result<Option<usize>> {
    let mut prev = 0usize;
    let mut n = 1usize;
    while n <= n_max {
        if passes(n)? {
            let (mut lo, mut hi) = (prev, n);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if passes(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(hi));
        }
        prev = n;
        n *= 2;
    }
    Ok(None)
}

/// Per `d`, for `m = 2^d` and every `eps`: the deterministic lower bound
/// `(1 - eps^2) m`, the randomized count `ceil(4 (E||X||_inf / eps)^2)` and
/// the replicated `l_inf` error of the sketch with that many rows on a
/// random unit input.
pub fn run_seqspace(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let master = seed(cfg)?;
    let mut s = DataSeries::new([
        "d",
        "m",
        "eps",
        "smolyak_lower",
        "randomized_n",
        "empirical_error",
        "empirical_se",
    ]);
    let mut crossover: BTreeMap<u64, usize> = BTreeMap::new();
    for &d in &cfg.dims {
        if d >= 63 || (1usize << d) > cfg.grid_budget {
            return Err(Error::GridBudget {
                requested: 1u128 << d.min(127),
                budget: cfg.grid_budget,
            });
        }
        let m = 1usize << d;
        let e_max = gauss_norm_expectation(m, f64::INFINITY, NormMethod::Quadrature)?.value;
        let x = random_unit_vector(m, derive_seed(master, stream_id("seqspace_input"), d as u64));
        for &eps in &cfg.eps {
            let smolyak = smolyak_lower_bound(m, eps)?;
            let n = mc_complexity_bound(e_max, eps)?;
            let n_rows = usize::try_from(n).map_err(|_| domain("run_seqspace", "row count overflow"))?;
            let sk = SketchConfig::new(m, n_rows, f64::INFINITY, derive_seed(master, stream_id("seqspace"), d as u64))?;
            let (err, se) = empirical_sketch_error(&x, &sk, cfg.replications)?;
            s.push(
                vec![d as f64, m as f64, eps, smolyak, n as f64, err, se],
                "seqspace",
            )?;
            if (n as f64) < smolyak {
                crossover.entry(eps.to_bits()).or_insert(d);
            }
        }
    }
    let mut out = RunSummary::default();
    for &eps in &cfg.eps {
        match crossover.get(&eps.to_bits()) {
            Some(d0) => out.notes.push(format!("eps = {eps}: randomized count below deterministic bound from d = {d0}")),
            None => out.notes.push(format!("eps = {eps}: no crossover within the tested dimensions")),
        }
    }
    out.write_csv(cfg, "seqspace.csv", s)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(e: Experiment, dir: &std::path::Path) -> ExperimentConfig {
        ExperimentConfig {
            experiment: e,
            seed: Some(42),
            out_dir: dir.to_path_buf(),
            replications: 20,
            grid: 64,
            mass_tol: 1e-2,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn ladder() {
        for target in [1usize, 2, 3, 5, 17, 64, 100] {
            let mut calls = 0;
            let got = ladder_search(128, &mut |n| {
                calls += 1;
                Ok(n >= target)
            })
            .unwrap();
            assert_eq!(got, Some(target));
            assert!(calls <= 16);
        }
        assert_eq!(ladder_search(128, &mut |n| Ok(n > 500)).unwrap(), None);
    }

    #[test]
    fn kernel_run() {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&cfg(Experiment::Kernel, dir.path())).unwrap();
        let s = &out.series[0];
        assert_eq!(s.rows().len(), 65);
        assert!((s.rows()[0][1] - 1.0).abs() < 1e-10);
        assert!(s.rows()[0][3].abs() < 1e-4);
        assert!(dir.path().join("kernel.dat").exists());
    }

    #[test]
    fn bounds_run() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(Experiment::Bounds, dir.path());
        c.n = vec![1, 3, 16, 64];
        c.dims = vec![1, 2];
        let out = run(&c).unwrap();
        let s = &out.series[0];
        for row in s.rows() {
            if row[1] == 0.0 {
                assert!((row[2] - 1.0).abs() < 1e-12 && (row[3] - 1.0).abs() < 1e-12);
            }
            assert!(row[2] <= row[3] + 1e-12, "{row:?}");
        }
        let mc = s.column("mc_upper").unwrap();
        // rows: n = 0, 1, 3, 16, 64 per dimension
        assert!((mc[3] / mc[4] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn seed_is_required() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(Experiment::Simulate, dir.path());
        c.seed = None;
        assert!(run(&c).is_err());
        c.seed = Some(1);
        c.dims = vec![2];
        assert!(run(&c).is_err());
    }

    #[test]
    fn seqspace_run() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(Experiment::Seqspace, dir.path());
        c.dims = (1..=10).collect();
        let out = run(&c).unwrap();
        let smol = out.series[0].column("smolyak_lower").unwrap();
        for w in smol.windows(2) {
            assert!((w[1] / w[0] - 2.0).abs() < 1e-12);
        }
        assert!(out.notes[0].contains("from d = "), "{:?}", out.notes);
    }
}
