//! Multi-seed experiment sweeps and CSV reporting.
//!
//! Seed `i` of every sweep point uses generator seed `base.seed + i`, so all
//! points of a sweep share their random draws. Requests are drawn one after
//! another, which makes the instance at `K` a prefix of the instance at any
//! larger `K`, and instances that differ only in `R` carry identical
//! requests.

use crate::exact::{solve_exact, SolveMode, DEFAULT_NODE_BUDGET};
use crate::heuristics::{dra, sra};
use crate::model::{welfare, Instance, Schedule};
use crate::workload::{generate, ConfigError, GenConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::{self, Write as _};
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SweepError {
    #[error("invalid sweep `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("exact solver cannot finish point {point} seed {seed}: search space {size} exceeds node budget {budget}")]
    ExactTooLarge {
        point: u32,
        seed: u64,
        size: u64,
        budget: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Varied {
    Requests,
    Capacity,
}

impl fmt::Display for Varied {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Varied::Requests => write!(f, "requests"),
            Varied::Capacity => write!(f, "capacity"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Dra,
    Sra,
    ExactShared,
    ExactDedicated,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Dra,
        Algorithm::Sra,
        Algorithm::ExactShared,
        Algorithm::ExactDedicated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dra => "dra",
            Algorithm::Sra => "sra",
            Algorithm::ExactShared => "exact-shared",
            Algorithm::ExactDedicated => "exact-dedicated",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                format!("unknown algorithm `{s}` (expected one of: {})", names.join(", "))
            })
    }
}

fn default_seeds_per_point() -> u32 {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub varied: Varied,
    pub points: Vec<u32>,
    #[serde(default)]
    pub base: GenConfig,
    #[serde(default = "default_seeds_per_point")]
    pub seeds_per_point: u32,
    pub algorithms: Vec<Algorithm>,
}

impl SweepSpec {
    /// Request-count sweep `K = 10, 20, ..., 100` at `R = 20`.
    pub fn requests_sweep() -> Self {
        SweepSpec {
            varied: Varied::Requests,
            points: (1..=10).map(|i| i * 10).collect(),
            base: GenConfig::default(),
            seeds_per_point: default_seeds_per_point(),
            algorithms: vec![Algorithm::Dra, Algorithm::Sra],
        }
    }

    /// Capacity sweep `R = 10, 20, ..., 100` at `K = 50`.
    pub fn capacity_sweep() -> Self {
        SweepSpec {
            varied: Varied::Capacity,
            points: (1..=10).map(|i| i * 10).collect(),
            base: GenConfig {
                num_requests: 50,
                ..GenConfig::default()
            },
            seeds_per_point: default_seeds_per_point(),
            algorithms: vec![Algorithm::Dra, Algorithm::Sra],
        }
    }

    pub fn from_json(text: &str) -> Result<Self, crate::model::ModelError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let invalid = |field, reason: &str| SweepError::InvalidSpec {
            field,
            reason: reason.to_string(),
        };
        if self.points.is_empty() {
            return Err(invalid("points", "must not be empty"));
        }
        if self.points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("points", "must be strictly increasing"));
        }
        if self.seeds_per_point < 1 {
            return Err(invalid("seeds_per_point", "must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(invalid("algorithms", "must name at least one algorithm"));
        }
        for &point in &self.points {
            self.config_for(point, 0).validate()?;
        }
        Ok(())
    }

    /// Generator config for one point and seed index.
    pub fn config_for(&self, point: u32, seed_index: u32) -> GenConfig {
        let mut config = self.base.clone();
        match self.varied {
            Varied::Requests => config.num_requests = point,
            Varied::Capacity => config.capacity = point,
        }
        config.seed = self.base.seed.wrapping_add(u64::from(seed_index));
        config
    }
}

/// Outcome of one algorithm on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    /// `100 * accepted / K`, or 100 when there are no requests.
    pub acceptance_pct: f64,
    pub welfare: u64,
    pub tenant_usage: Vec<f64>,
}

/// Mean units per slot consumed by each tenant's accepted requests,
/// averaged over the horizon.
pub fn tenant_usage(instance: &Instance, schedule: &Schedule) -> Vec<f64> {
    let mut units = vec![0u64; instance.tenants.len()];
    for (id, start) in schedule.accepted() {
        let Some(request) = instance.request(id) else {
            continue;
        };
        let Some(tenant) = instance.tenant_index(request.tenant) else {
            continue;
        };
        let active = request
            .active_slots(start)
            .filter(|&slot| slot <= instance.horizon)
            .count() as u64;
        units[tenant] += active * u64::from(request.demand);
    }
    units
        .into_iter()
        .map(|u| u as f64 / f64::from(instance.horizon))
        .collect()
}

pub fn measure(instance: &Instance, schedule: &Schedule) -> RunMetrics {
    let total = instance.requests.len();
    let acceptance_pct = if total == 0 {
        100.0
    } else {
        100.0 * schedule.accepted_count() as f64 / total as f64
    };
    RunMetrics {
        acceptance_pct,
        welfare: welfare(instance, schedule),
        tenant_usage: tenant_usage(instance, schedule),
    }
}

/// Runs one algorithm. Exact modes refuse instances whose start-or-reject
/// space exceeds `node_budget`.
pub fn run_algorithm(
    instance: &Instance,
    algorithm: Algorithm,
    node_budget: u64,
) -> Result<Schedule, u64> {
    let mode = match algorithm {
        Algorithm::Dra => return Ok(dra(instance)),
        Algorithm::Sra => return Ok(sra(instance)),
        Algorithm::ExactShared => SolveMode::Shared,
        Algorithm::ExactDedicated => SolveMode::Dedicated,
    };
    let size = instance.search_space();
    if size > node_budget {
        return Err(size);
    }
    let result = solve_exact(instance, mode, Some(node_budget));
    if result.proven_optimal {
        Ok(result.schedule)
    } else {
        Err(size)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: u32,
    pub algorithm: Algorithm,
    pub seeds: u32,
    pub mean_acceptance_pct: f64,
    pub std_acceptance_pct: f64,
    pub mean_welfare: f64,
    pub tenant_usage: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub varied: Varied,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn row(&self, point: u32, algorithm: Algorithm) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.point == point && r.algorithm == algorithm)
    }

    pub fn mean_acceptance(&self, point: u32, algorithm: Algorithm) -> Option<f64> {
        self.row(point, algorithm).map(|r| r.mean_acceptance_pct)
    }

    pub fn to_csv(&self) -> String {
        let tenants = self.rows.iter().map(|r| r.tenant_usage.len()).max().unwrap_or(0);
        let mut out = String::from(
            "sweep,point,algorithm,seeds,mean_acceptance_pct,std_acceptance_pct,mean_welfare",
        );
        for t in 0..tenants {
            write!(out, ",tenant_usage_{t}").unwrap();
        }
        out.push('\n');
        for row in &self.rows {
            write!(
                out,
                "{},{},{},{},{:.4},{:.4},{:.4}",
                self.varied,
                row.point,
                row.algorithm,
                row.seeds,
                row.mean_acceptance_pct,
                row.std_acceptance_pct,
                row.mean_welfare
            )
            .unwrap();
            for usage in &row.tenant_usage {
                write!(out, ",{usage:.4}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

fn mean(values: impl Iterator<Item = f64>) -> (f64, usize) {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        (0.0, 0)
    } else {
        (sum / n as f64, n)
    }
}

/// Sample standard deviation; zero for fewer than two values.
fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let (m, n) = mean(values.iter().copied());
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (n - 1) as f64).sqrt()
}

fn aggregate(point: u32, algorithm: Algorithm, runs: &[&RunMetrics]) -> SweepRow {
    let acceptance: Vec<f64> = runs.iter().map(|r| r.acceptance_pct).collect();
    let tenants = runs.first().map_or(0, |r| r.tenant_usage.len());
    let tenant_usage = (0..tenants)
        .map(|t| mean(runs.iter().map(|r| r.tenant_usage[t])).0)
        .collect();
    SweepRow {
        point,
        algorithm,
        seeds: runs.len() as u32,
        mean_acceptance_pct: mean(acceptance.iter().copied()).0,
        std_acceptance_pct: std_dev(&acceptance),
        mean_welfare: mean(runs.iter().map(|r| r.welfare as f64)).0,
        tenant_usage,
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    run_sweep_with_budget(spec, DEFAULT_NODE_BUDGET)
}

/// Runs every algorithm on every (point, seed) instance and aggregates per
/// (point, algorithm). Instances are solved in parallel; the reduction runs
/// in (point, algorithm, seed) order so output does not depend on scheduling.
pub fn run_sweep_with_budget(spec: &SweepSpec, node_budget: u64) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let jobs: Vec<(u32, u32)> = spec
        .points
        .iter()
        .flat_map(|&p| (0..spec.seeds_per_point).map(move |s| (p, s)))
        .collect();

    let outcomes: Vec<Vec<RunMetrics>> = jobs
        .par_iter()
        .map(|&(point, seed_index)| {
            let config = spec.config_for(point, seed_index);
            let instance = generate(&config)?;
            spec.algorithms
                .iter()
                .map(|&algorithm| {
                    run_algorithm(&instance, algorithm, node_budget)
                        .map(|schedule| measure(&instance, &schedule))
                        .map_err(|size| SweepError::ExactTooLarge {
                            point,
                            seed: config.seed,
                            size,
                            budget: node_budget,
                        })
                })
                .collect()
        })
        .collect::<Result<_, SweepError>>()?;

    let per_point = spec.seeds_per_point as usize;
    let mut rows = Vec::with_capacity(spec.points.len() * spec.algorithms.len());
    for (p, &point) in spec.points.iter().enumerate() {
        let block = &outcomes[p * per_point..(p + 1) * per_point];
        for (a, &algorithm) in spec.algorithms.iter().enumerate() {
            let runs: Vec<&RunMetrics> = block.iter().map(|per_algo| &per_algo[a]).collect();
            rows.push(aggregate(point, algorithm, &runs));
        }
    }
    Ok(SweepResult {
        varied: spec.varied,
        rows,
    })
}

/// Mean per-slot usage of every tenant under both heuristics.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageReport {
    pub requests: u32,
    pub capacity: u32,
    pub seeds: u32,
    pub dra: Vec<f64>,
    pub sra: Vec<f64>,
}

impl UsageReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("requests,capacity,algorithm,seeds");
        for t in 0..self.dra.len() {
            write!(out, ",tenant_usage_{t}").unwrap();
        }
        out.push('\n');
        for (algorithm, usage) in [(Algorithm::Dra, &self.dra), (Algorithm::Sra, &self.sra)] {
            write!(out, "{},{},{},{}", self.requests, self.capacity, algorithm, self.seeds).unwrap();
            for u in usage {
                write!(out, ",{u:.4}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Runs both heuristics on `seeds` instances with `requests` requests and
/// `capacity` units per slot, all other settings taken from `base`.
pub fn tenant_usage_report(
    base: &GenConfig,
    requests: u32,
    capacity: u32,
    seeds: u32,
) -> Result<UsageReport, SweepError> {
    if seeds < 1 {
        return Err(SweepError::InvalidSpec {
            field: "seeds",
            reason: "must be at least 1".to_string(),
        });
    }
    let spec = SweepSpec {
        varied: Varied::Requests,
        points: vec![requests],
        base: GenConfig {
            capacity,
            ..base.clone()
        },
        seeds_per_point: seeds,
        algorithms: vec![Algorithm::Dra, Algorithm::Sra],
    };
    let result = run_sweep(&spec)?;
    let usage = |a| {
        result
            .row(requests, a)
            .map(|r| r.tenant_usage.clone())
            .unwrap_or_default()
    };
    Ok(UsageReport {
        requests,
        capacity,
        seeds,
        dra: usage(Algorithm::Dra),
        sra: usage(Algorithm::Sra),
    })
}
