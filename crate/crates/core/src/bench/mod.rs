//! The Q-score protocol.
//!
//! For a size `n`, QAOA is optimized on a batch of random graphs and the
//! mean final cut `C(n)` is normalized as
//!
//! ```text
//! beta(n) = (C(n) - baseline(n)) / (lambda * n^exponent)
//! ```
//!
//! which is 0 for random sampling and about 1 for an exact solver. Size `n`
//! passes when `beta(n) > beta_star`; the Q-score `n*` is the largest passing
//! size.

mod report;

pub use report::{BenchmarkReport, InstanceRecord, SizeScore};

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backend::Backend;
use crate::circuit::Connectivity;
use crate::graphs::{analytic_lambda, fit_scaling, instance_seed, GraphFamily, ScalingFit};
use crate::optim::{optimize, OptimizerConfig, QaoaProblem};
use crate::rng::{self, Purpose};
use crate::{Error, Result};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "QSCORE_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    #[default]
    Iterative,
    Dichotomic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub family: GraphFamily,
    pub depth: usize,
    pub graphs_per_size: usize,
    /// Shots for the final evaluation of each instance.
    pub shots: u64,
    /// Shots per objective evaluation during optimization; `shots` if unset.
    pub opt_shots: Option<u64>,
    pub beta_star: f64,
    /// Normalization coefficient; the family's closed form if unset.
    pub lambda: Option<f64>,
    pub size_min: usize,
    pub size_limit: usize,
    pub search: SearchMode,
    pub connectivity: Connectivity,
    pub optimizer: OptimizerConfig,
    pub master_seed: u64,
    /// Worker threads for instances within a size; all cores if unset.
    pub workers: Option<usize>,
    /// Wall-clock budget per size in seconds; an exhausted size fails.
    pub time_budget_s: Option<f64>,
    /// A size errors out when more than this fraction of instances fail.
    pub max_failure_fraction: f64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            family: GraphFamily::ErdosRenyi { q: 0.5 },
            depth: 1,
            graphs_per_size: 100,
            shots: 2048,
            opt_shots: None,
            beta_star: 0.2,
            lambda: None,
            size_min: 5,
            size_limit: 20,
            search: SearchMode::Iterative,
            connectivity: Connectivity::AllToAll,
            optimizer: OptimizerConfig::default(),
            master_seed: 0,
            workers: None,
            time_budget_s: None,
            max_failure_fraction: 0.2,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        self.family.validate()?;
        self.optimizer.validate()?;
        if matches!(self.family, GraphFamily::Explicit) {
            return bad("the benchmark needs a random graph family".into());
        }
        if !(self.beta_star > 0.0 && self.beta_star < 1.0) {
            return bad(format!("beta_star = {} outside (0, 1)", self.beta_star));
        }
        if self.graphs_per_size < 2 {
            return bad("graphs_per_size must be at least 2".into());
        }
        if self.size_min < 2 || self.size_min > self.size_limit {
            return bad(format!(
                "need 2 <= size_min <= size_limit (got {} and {})",
                self.size_min, self.size_limit
            ));
        }
        if self.depth < 1 {
            return bad("depth must be at least 1".into());
        }
        if self.shots < 1 || self.opt_shots == Some(0) {
            return bad("shot counts must be positive".into());
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0) {
                return bad(format!("lambda = {l} must be positive"));
            }
        }
        if !(0.0..=1.0).contains(&self.max_failure_fraction) {
            return bad("max_failure_fraction outside [0, 1]".into());
        }
        Ok(())
    }

    pub fn resolved_lambda(&self) -> f64 {
        self.lambda
            .or_else(|| analytic_lambda(self.family))
            .unwrap_or(f64::NAN)
    }

    /// Score of a mean cut at size `n`.
    pub fn beta(&self, n: usize, mean_cut: f64) -> f64 {
        let exponent = self.family.exponent();
        (mean_cut - self.family.baseline(n)) / (self.resolved_lambda() * (n as f64).powf(exponent))
    }

    fn worker_count(&self) -> usize {
        self.workers
            .or_else(|| std::env::var(WORKERS_ENV).ok()?.parse().ok())
            .unwrap_or(0)
    }

    pub(crate) fn thread_pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.worker_count())
            .build()
            .map_err(|e| Error::Parameter(format!("cannot build worker pool: {e}")))
    }
}

fn run_instance(
    n: usize,
    index: usize,
    cfg: &BenchmarkConfig,
    backend: &dyn Backend,
) -> Result<InstanceRecord> {
    let graph_seed = instance_seed(cfg.master_seed, n, index);
    let graph = cfg.family.generate(n, graph_seed)?;
    let problem = QaoaProblem {
        graph: &graph,
        depth: cfg.depth,
        connectivity: &cfg.connectivity,
        backend,
        shots: cfg.opt_shots.unwrap_or(cfg.shots),
    };
    let opt_seed = rng::derive_seed(graph_seed, &[Purpose::Optimizer as u64]);
    let trace = optimize(&problem, &cfg.optimizer, opt_seed)?;
    let final_seed = rng::derive_seed(graph_seed, &[Purpose::Final as u64]);
    let last = problem.evaluate(&trace.best_params, cfg.shots, final_seed)?;
    Ok(InstanceRecord {
        index,
        graph_seed,
        num_edges: graph.num_edges(),
        params: trace.best_params.clone(),
        energy: last.energy,
        mean_cut: last.mean_cut,
        beta: cfg.beta(n, last.mean_cut),
        evaluations: trace.evaluations.len(),
        error: None,
        trace: Some(trace),
    })
}

/// Runs the whole batch of instances at size `n`.
pub fn score_size(n: usize, cfg: &BenchmarkConfig, backend: &dyn Backend) -> Result<SizeScore> {
    cfg.validate()?;
    let pool = cfg.thread_pool()?;
    score_size_in(n, cfg, backend, &pool)
}

fn score_size_in(
    n: usize,
    cfg: &BenchmarkConfig,
    backend: &dyn Backend,
    pool: &rayon::ThreadPool,
) -> Result<SizeScore> {
    if n < 2 {
        return Err(Error::Parameter(format!("size {n} is below 2")));
    }
    if !cfg.family.admits(n) {
        return Err(Error::Parameter(format!("{} has no graphs on {n} vertices", cfg.family)));
    }
    let started = Instant::now();
    let over_budget = || {
        cfg.time_budget_s
            .is_some_and(|b| started.elapsed().as_secs_f64() > b)
    };
    let records: Vec<InstanceRecord> = pool.install(|| {
        (0..cfg.graphs_per_size)
            .into_par_iter()
            .map(|index| {
                let failed = |msg: String| InstanceRecord::failed(index, instance_seed(cfg.master_seed, n, index), msg);
                if over_budget() {
                    return failed("time budget exhausted".into());
                }
                run_instance(n, index, cfg, backend).unwrap_or_else(|e| failed(e.to_string()))
            })
            .collect()
    });
    let wall_time_s = started.elapsed().as_secs_f64();
    let timed_out = over_budget();

    let failures: Vec<&InstanceRecord> = records.iter().filter(|r| r.error.is_some()).collect();
    if failures.len() as f64 > cfg.max_failure_fraction * records.len() as f64 && !timed_out {
        return Err(Error::Backend(format!(
            "size {n}: {} of {} instances failed; first failure: {}",
            failures.len(),
            records.len(),
            failures[0].error.as_deref().unwrap_or("")
        )));
    }
    let betas: Vec<f64> = records
        .iter()
        .filter(|r| r.error.is_none())
        .map(|r| r.beta)
        .collect();
    let cuts: Vec<f64> = records
        .iter()
        .filter(|r| r.error.is_none())
        .map(|r| r.mean_cut)
        .collect();
    let (beta, stderr_beta, mean_cut) = if betas.is_empty() {
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        let est = crate::graphs::MeanEstimate::from_samples(n, &betas);
        (est.mean, est.stderr, cuts.iter().sum::<f64>() / cuts.len() as f64)
    };
    Ok(SizeScore {
        n,
        mean_cut,
        beta,
        stderr_beta,
        pass: !timed_out && beta > cfg.beta_star,
        timed_out,
        wall_time_s,
        instances: records,
    })
}

/// Fits the backend's own scaling `C(n) - baseline(n) = nu * n^exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuFit {
    pub fit: ScalingFit,
    /// `nu / lambda`, the size-independent score the fit implies.
    pub beta_equivalent: f64,
}

pub fn fit_nu(scores: &[SizeScore], family: GraphFamily, lambda: f64) -> Result<NuFit> {
    let points: Vec<(usize, f64)> = scores
        .iter()
        .filter(|s| s.mean_cut.is_finite())
        .map(|s| (s.n, s.mean_cut))
        .collect();
    let per_size = scores.iter().map(|s| s.instances.len()).max().unwrap_or(0);
    let fit = fit_scaling(&points, family, per_size, 3)?;
    Ok(NuFit {
        beta_equivalent: fit.coefficient / lambda,
        fit,
    })
}

/// True when some larger size scores above a smaller one by more than two
/// combined standard errors, contradicting the monotone decrease the search
/// relies on.
pub fn significant_increase(sorted: &[SizeScore]) -> bool {
    sorted.iter().enumerate().any(|(i, a)| {
        sorted[i + 1..].iter().any(|b| {
            let sigma = (a.stderr_beta.powi(2) + b.stderr_beta.powi(2)).sqrt();
            b.beta - a.beta > 2.0 * sigma
        })
    })
}

/// Searches for the largest passing size.
pub fn find_qscore(cfg: &BenchmarkConfig, backend: &dyn Backend) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let pool = cfg.thread_pool()?;
    let sizes: Vec<usize> = (cfg.size_min..=cfg.size_limit)
        .filter(|&n| cfg.family.admits(n))
        .collect();
    if sizes.is_empty() {
        return Err(Error::Parameter(format!(
            "no admissible sizes for {} in [{}, {}]",
            cfg.family, cfg.size_min, cfg.size_limit
        )));
    }
    let mut scores: Vec<SizeScore> = Vec::new();
    let eval = |i: usize, scores: &mut Vec<SizeScore>| -> Result<bool> {
        let s = score_size_in(sizes[i], cfg, backend, &pool)?;
        let pass = s.pass;
        scores.push(s);
        Ok(pass)
    };

    let q_score = match cfg.search {
        SearchMode::Iterative => {
            let mut last_pass = None;
            for i in 0..sizes.len() {
                if !eval(i, &mut scores)? {
                    break;
                }
                last_pass = Some(sizes[i]);
            }
            last_pass
        }
        SearchMode::Dichotomic => {
            if !eval(0, &mut scores)? {
                None
            } else if sizes.len() == 1 || eval(sizes.len() - 1, &mut scores)? {
                Some(*sizes.last().unwrap())
            } else {
                let (mut lo, mut hi) = (0, sizes.len() - 1);
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    if eval(mid, &mut scores)? {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Some(sizes[lo])
            }
        }
    };
    scores.sort_by_key(|s| s.n);

    let non_monotone = significant_increase(&scores);

    let lambda = cfg.resolved_lambda();
    let nu_fit = if scores.len() >= 3 {
        fit_nu(&scores, cfg.family, lambda).ok()
    } else {
        None
    };
    Ok(BenchmarkReport {
        config: cfg.clone(),
        backend: backend.describe(),
        lambda,
        scores,
        q_score,
        non_monotone,
        nu_fit,
    })
}
