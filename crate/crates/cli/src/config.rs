use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use clap::ValueEnum;
use orbit_spaces::metrics::{Exponent, MetricSpec};
use orbit_spaces::DEFAULT_KAPPA2;
use serde::{Deserialize, Serialize};

use crate::error::{CatalogError, Result};

/// Environment variable consulted when `--threads` is not given.
pub const THREADS_ENV: &str = "ORBITS_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// Shift-minimized distance, blind to the pericenter of circles.
    Rho,
    /// Distance with pericenters matched.
    #[value(name = "rho_star", alias = "rho-star")]
    RhoStar,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Rho => "rho",
            MetricKind::RhoStar => "rho_star",
        })
    }
}

/// Worker count for pairwise workloads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Threads {
    #[default]
    Auto,
    Count(NonZeroUsize),
}

impl FromStr for Threads {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("auto") {
            return Ok(Threads::Auto);
        }
        t.parse::<NonZeroUsize>().map(Threads::Count).map_err(|_| {
            CatalogError::Config(format!(
                "threads must be \"auto\" or a positive count, got {s:?}"
            ))
        })
    }
}

impl fmt::Display for Threads {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threads::Auto => f.write_str("auto"),
            Threads::Count(n) => write!(f, "{n}"),
        }
    }
}

impl Threads {
    /// Reads [`THREADS_ENV`]; unset or empty means no preference.
    pub fn from_env() -> Result<Option<Self>> {
        match std::env::var(THREADS_ENV) {
            Ok(v) if !v.trim().is_empty() => v.parse().map(Some),
            _ => Ok(None),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub kappa2: f64,
    pub metric: MetricKind,
    pub p: Exponent,
    pub n_u: usize,
    pub n_s: usize,
    pub refine_tol: f64,
    pub seed: u64,
    pub threads: Threads,
}

impl Default for RunConfig {
    fn default() -> Self {
        let spec = MetricSpec::default();
        Self {
            kappa2: DEFAULT_KAPPA2,
            metric: MetricKind::Rho,
            p: spec.p,
            n_u: spec.n_u,
            n_s: spec.n_s,
            refine_tol: spec.refine_tol,
            seed: 42,
            threads: Threads::Auto,
        }
    }
}

impl RunConfig {
    pub fn metric_spec(&self) -> MetricSpec {
        MetricSpec {
            p: self.p,
            n_u: self.n_u,
            n_s: self.n_s,
            refine_tol: self.refine_tol,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa2 > 0.0 && self.kappa2.is_finite()) {
            return Err(CatalogError::Config(format!(
                "kappa2 must be positive, got {}",
                self.kappa2
            )));
        }
        self.metric_spec().validate()?;
        Ok(())
    }

    pub fn thread_pool(&self) -> Result<rayon::ThreadPool> {
        let n = match self.threads {
            Threads::Auto => 0,
            Threads::Count(n) => n.get(),
        };
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CatalogError::Config(e.to_string()))
    }
}
