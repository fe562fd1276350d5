//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment; lists are
//! comma-separated. Every key can also be given as a CLI flag with the same
//! name (hyphens and underscores are interchangeable on the command line).
//!
//! | key            | type          | default          |
//! |----------------|---------------|------------------|
//! | `experiment`   | experiment id | `simulate`       |
//! | `r`            | real > 1/2    | `1.25`           |
//! | `beta0`        | real in [0,1) | `0.4`            |
//! | `lambda`       | real list     | unset (Korobov)  |
//! | `dims`         | natural list  | `1`              |
//! | `eps`          | real list     | `0.5`            |
//! | `n`            | natural list  | `16, 256`        |
//! | `mass_tol`     | real in (0,1) | `0.001`          |
//! | `grid`         | natural >= 16 | `256`            |
//! | `replications` | natural >= 2  | `200`            |
//! | `n_max`        | natural       | `4096`           |
//! | `seed`         | u64           | unset            |
//! | `out_dir`      | path          | `out`            |
//! | `c_dudley`     | real > 0      | `4 sqrt 2`       |
//! | `grid_budget`  | natural       | `1048576`        |
//!
//! `lambda`, when set, replaces the Korobov weights by the explicit list
//! `lambda_0, lambda_1, ...`, which must have unit square sum.

use crate::error::{Error, Result};
use crate::gaussfield::C_DUDLEY;
use crate::grid::DEFAULT_GRID_BUDGET;
use crate::model::LambdaSequence;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// The experiment a configuration drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Kernel,
    Bounds,
    Simulate,
    Scaling,
    Seqspace,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::Kernel,
        Experiment::Bounds,
        Experiment::Simulate,
        Experiment::Scaling,
        Experiment::Seqspace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Kernel => "kernel",
            Experiment::Bounds => "bounds",
            Experiment::Simulate => "simulate",
            Experiment::Scaling => "scaling",
            Experiment::Seqspace => "seqspace",
        }
    }

    pub fn is_randomized(self) -> bool {
        !matches!(self, Experiment::Kernel)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// All parameters of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub r: f64,
    pub beta0: f64,
    pub lambda: Option<Vec<f64>>,
    pub dims: Vec<usize>,
    pub eps: Vec<f64>,
    pub n: Vec<usize>,
    pub mass_tol: f64,
    pub grid: usize,
    pub replications: usize,
    pub n_max: usize,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    pub c_dudley: f64,
    pub grid_budget: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::Simulate,
            r: 1.25,
            beta0: 0.4,
            lambda: None,
            dims: vec![1],
            eps: vec![0.5],
            n: vec![16, 256],
            mass_tol: 1e-3,
            grid: 256,
            replications: 200,
            n_max: 4096,
            seed: None,
            out_dir: PathBuf::from("out"),
            c_dudley: C_DUDLEY,
            grid_budget: DEFAULT_GRID_BUDGET,
        }
    }
}

/// Config keys in emission order.
pub const KEYS: [&str; 15] = [
    "experiment",
    "r",
    "beta0",
    "lambda",
    "dims",
    "eps",
    "n",
    "mass_tol",
    "grid",
    "replications",
    "n_max",
    "seed",
    "out_dir",
    "c_dudley",
    "grid_budget",
];

fn parse_one<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{v}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    let items: Vec<T> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_one(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::Config(format!("`{key}` must be a nonempty list")));
    }
    Ok(items)
}

fn join<T: fmt::Debug>(v: &[T]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

impl ExperimentConfig {
    /// Sets one key from its textual value. Keys may use `-` for `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        match key.as_str() {
            "experiment" => self.experiment = v.parse()?,
            "r" => self.r = parse_one(&key, v)?,
            "beta0" => self.beta0 = parse_one(&key, v)?,
            "lambda" => self.lambda = Some(parse_list(&key, v)?),
            "dims" => self.dims = parse_list(&key, v)?,
            "eps" => self.eps = parse_list(&key, v)?,
            "n" => self.n = parse_list(&key, v)?,
            "mass_tol" => self.mass_tol = parse_one(&key, v)?,
            "grid" => self.grid = parse_one(&key, v)?,
            "replications" => self.replications = parse_one(&key, v)?,
            "n_max" => self.n_max = parse_one(&key, v)?,
            "seed" => self.seed = Some(parse_one(&key, v)?),
            "out_dir" => self.out_dir = PathBuf::from(v),
            "c_dudley" => self.c_dudley = parse_one(&key, v)?,
            "grid_budget" => self.grid_budget = parse_one(&key, v)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Parses config text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let k = k.trim().replace('-', "_");
            if seen.contains(&k) {
                return Err(Error::Config(format!("line {}: duplicate key `{k}`", lineno + 1)));
            }
            cfg.set(&k, v)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
            seen.push(k);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Config text that [`ExperimentConfig::parse`] maps back to `self`.
    pub fn emit(&self) -> String {
        let mut s = String::new();
        for key in KEYS {
            let value = match key {
                "experiment" => Some(self.experiment.to_string()),
                "r" => Some(format!("{:?}", self.r)),
                "beta0" => Some(format!("{:?}", self.beta0)),
                "lambda" => self.lambda.as_deref().map(join),
                "dims" => Some(join(&self.dims)),
                "eps" => Some(join(&self.eps)),
                "n" => Some(join(&self.n)),
                "mass_tol" => Some(format!("{:?}", self.mass_tol)),
                "grid" => Some(self.grid.to_string()),
                "replications" => Some(self.replications.to_string()),
                "n_max" => Some(self.n_max.to_string()),
                "seed" => self.seed.map(|s| s.to_string()),
                "out_dir" => Some(self.out_dir.display().to_string()),
                "c_dudley" => Some(format!("{:?}", self.c_dudley)),
                "grid_budget" => Some(self.grid_budget.to_string()),
                _ => unreachable!(),
            };
            if let Some(v) = value {
                let _ = writeln!(s, "{key} = {v}");
            }
        }
        s
    }

    /// Checks ranges and the seed requirement of randomized experiments.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.dims.contains(&0) {
            return fail("dims must be at least 1".into());
        }
        if self.n.contains(&0) && self.experiment != Experiment::Bounds {
            return fail("n values must be at least 1".into());
        }
        if self.eps.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return fail("eps values must lie in (0, 1)".into());
        }
        if !(self.mass_tol > 0.0 && self.mass_tol < 1.0) {
            return fail("mass_tol must lie in (0, 1)".into());
        }
        if !(self.c_dudley > 0.0) {
            return fail("c_dudley must be positive".into());
        }
        if self.grid < 16 {
            return fail("grid must be at least 16".into());
        }
        if self.replications < 2 {
            return fail("replications must be at least 2".into());
        }
        if self.n_max == 0 {
            return fail("n_max must be at least 1".into());
        }
        if self.experiment.is_randomized() && self.seed.is_none() {
            return fail(format!("experiment `{}` requires a seed", self.experiment));
        }
        Ok(())
    }

    /// The weight sequence described by `r`, `beta0` and `lambda`.
    pub fn lambda_sequence(&self) -> Result<LambdaSequence> {
        match &self.lambda {
            Some(v) => {
                let l = LambdaSequence::explicit(v.clone())?;
                if !l.is_normalized() {
                    return Err(Error::NotNormalized {
                        mass: l.total_mass(),
                    });
                }
                Ok(l)
            }
            None => LambdaSequence::normalize_korobov(self.r, self.beta0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_with_comments_and_lists() {
        let cfg = ExperimentConfig::parse(
            "# header\nexperiment = bounds\nn = 1, 2,4 # trailing\nmass-tol=1e-4\nseed = 7\n\n",
        )
        .unwrap();
        assert_eq!(cfg.experiment, Experiment::Bounds);
        assert_eq!(cfg.n, vec![1, 2, 4]);
        assert_eq!(cfg.mass_tol, 1e-4);
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.r, 1.25);
    }

    #[test]
    fn parse_errors() {
        assert!(ExperimentConfig::parse("bogus = 1").is_err());
        assert!(ExperimentConfig::parse("r 1").is_err());
        assert!(ExperimentConfig::parse("r = x").is_err());
        assert!(ExperimentConfig::parse("r = 1\nr = 2").is_err());
        assert!(ExperimentConfig::parse("dims = ").is_err());
        assert!(ExperimentConfig::parse("experiment = plot").is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.validate().is_err());
        cfg.seed = Some(1);
        cfg.validate().unwrap();
        cfg.experiment = Experiment::Kernel;
        cfg.seed = None;
        cfg.validate().unwrap();
        cfg.eps = vec![1.5];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn explicit_lambda() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("lambda", "0.6, 0.8").unwrap();
        assert!(cfg.lambda_sequence().is_ok());
        cfg.set("lambda", "0.6, 0.6").unwrap();
        assert!(cfg.lambda_sequence().is_err());
    }

    proptest! {
        #[test]
        fn emit_parse_round_trip(
            r in 0.51f64..5.0,
            beta0 in 0.0f64..0.99,
            dims in proptest::collection::vec(1usize..20, 1..4),
            eps in proptest::collection::vec(1e-6f64..0.999, 1..4),
            n in proptest::collection::vec(1usize..100_000, 1..5),
            mass_tol in 1e-12f64..0.5,
            seed in proptest::option::of(any::<u64>()),
            lambda in proptest::option::of(proptest::collection::vec(0.0f64..1.0, 1..5)),
            e in 0usize..5,
        ) {
            let cfg = ExperimentConfig {
                experiment: Experiment::ALL[e],
                r, beta0, lambda, dims, eps, n, mass_tol, seed,
                out_dir: PathBuf::from("some/dir"),
                ..ExperimentConfig::default()
            };
            prop_assert_eq!(ExperimentConfig::parse(&cfg.emit()).unwrap(), cfg);
        }
    }
}
