//! Classical optimization of QAOA angles against sampled energies.

mod cobyla;
mod simplex;

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::backend::Backend;
use crate::circuit::{build_qaoa_circuit, route, Connectivity, QaoaParams};
use crate::graphs::{cut_value_bits, Graph};
use crate::rng::{self, Purpose};
use crate::sim::ShotCounts;
use crate::{Error, Result};

/// Energy of the cost Hamiltonian and mean cut estimated from shots. The two
/// are tied by `energy = |E|/2 - 2 * mean_cut`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub energy: f64,
    pub mean_cut: f64,
}

/// Estimates the energy from logical-register counts over `g`'s vertices.
pub fn estimate_energy(g: &Graph, counts: &ShotCounts) -> Result<EnergyEstimate> {
    if counts.is_empty() {
        return Err(Error::Parameter("no shots to estimate from".into()));
    }
    if counts.num_qubits() != g.n() {
        return Err(Error::Parameter(format!(
            "counts over {} qubits for a graph on {} vertices",
            counts.num_qubits(),
            g.n()
        )));
    }
    let weighted: f64 = counts
        .iter()
        .map(|(x, k)| k as f64 * cut_value_bits(g, x) as f64)
        .sum();
    let mean_cut = weighted / counts.total() as f64;
    Ok(EnergyEstimate {
        energy: g.num_edges() as f64 / 2.0 - 2.0 * mean_cut,
        mean_cut,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Linear-model trust region (COBYLA-style).
    Cobyla,
    NelderMead,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub method: Method,
    pub max_evaluations: usize,
    /// Final trust-region radius (or simplex size for Nelder-Mead).
    pub tolerance: f64,
    /// Initial trust-region radius (or simplex step).
    pub initial_step: f64,
    /// Starting angles are drawn uniformly from `[init_low, init_high)`.
    pub init_low: f64,
    pub init_high: f64,
    pub restarts: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            method: Method::Cobyla,
            max_evaluations: 300,
            tolerance: 1e-4,
            initial_step: 1.0,
            init_low: 0.0,
            init_high: PI,
            restarts: 1,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_evaluations < 1 {
            return Err(Error::Parameter("max_evaluations must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Parameter("tolerance must be positive".into()));
        }
        if !(self.initial_step > 0.0) || !(self.init_high >= self.init_low) {
            return Err(Error::Parameter("bad initial step or init range".into()));
        }
        if self.restarts < 1 {
            return Err(Error::Parameter("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub params: Vec<f64>,
    pub energy: f64,
    pub mean_cut: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub evaluations: Vec<Evaluation>,
    pub best_params: QaoaParams,
    pub best_energy: f64,
    pub termination: Termination,
}

impl OptimizationTrace {
    pub fn best(&self) -> &Evaluation {
        self.evaluations
            .iter()
            .min_by(|a, b| a.energy.total_cmp(&b.energy))
            .expect("trace holds at least one evaluation")
    }

    /// `graph_id,eval_index,params...,energy,mean_cut` per evaluation.
    pub fn dump_lines(&self, graph_id: &str) -> Vec<String> {
        self.evaluations
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let params: Vec<String> = e.params.iter().map(|p| format!("{p:.17e}")).collect();
                format!(
                    "{graph_id},{i},{},{:.17e},{:.17e}",
                    params.join(","),
                    e.energy,
                    e.mean_cut
                )
            })
            .collect()
    }
}

/// One QAOA instance bound to the backend that will run it.
pub struct QaoaProblem<'a> {
    pub graph: &'a Graph,
    pub depth: usize,
    pub connectivity: &'a Connectivity,
    pub backend: &'a dyn Backend,
    pub shots: u64,
}

impl QaoaProblem<'_> {
    /// Builds, routes and runs the circuit for `params`, then scores the
    /// decoded shots.
    pub fn evaluate(&self, params: &QaoaParams, shots: u64, seed: u64) -> Result<EnergyEstimate> {
        let circuit = route(&build_qaoa_circuit(self.graph, params), self.connectivity)?;
        let raw = self.backend.execute(&circuit, shots, seed)?;
        if raw.num_qubits() != circuit.num_qubits() {
            return Err(Error::Backend(format!(
                "backend returned {}-qubit outcomes for a {}-qubit circuit",
                raw.num_qubits(),
                circuit.num_qubits()
            )));
        }
        if raw.total() != shots {
            return Err(Error::Backend(format!(
                "backend returned {} shots, {shots} requested",
                raw.total()
            )));
        }
        let counts = if circuit.is_identity_layout() && raw.num_qubits() == self.graph.n() {
            raw
        } else {
            raw.decode(&circuit, self.graph.n())
        };
        estimate_energy(self.graph, &counts)
    }
}

/// Minimizes the sampled energy over the QAOA angles.
///
/// Evaluation `i` runs with shot seed derived from `(seed, i)`; the starting
/// point of restart `r` comes from the optimizer stream `(seed, r)`. The
/// evaluation budget is shared by all restarts.
pub fn optimize(
    problem: &QaoaProblem<'_>,
    config: &OptimizerConfig,
    seed: u64,
) -> Result<OptimizationTrace> {
    config.validate()?;
    if problem.depth < 1 {
        return Err(Error::Parameter("QAOA depth must be at least 1".into()));
    }
    let dim = 2 * problem.depth;
    let mut evaluations: Vec<Evaluation> = Vec::new();
    let mut termination = Termination::BudgetExhausted;

    for restart in 0..config.restarts {
        let used = evaluations.len();
        if used >= config.max_evaluations {
            break;
        }
        let remaining_restarts = config.restarts - restart;
        let budget = (config.max_evaluations - used).div_ceil(remaining_restarts);
        let mut init_rng = rng::stream(seed, Purpose::Optimizer, restart as u64);
        let x0: Vec<f64> = (0..dim)
            .map(|_| {
                if config.init_high > config.init_low {
                    init_rng.gen_range(config.init_low..config.init_high)
                } else {
                    config.init_low
                }
            })
            .collect();

        let mut objective = |x: &[f64]| -> Result<f64> {
            let index = evaluations.len();
            let params = QaoaParams::from_slice(x)?;
            let shot_seed = rng::derive_seed(seed, &[Purpose::Shots as u64, index as u64]);
            let est = problem
                .evaluate(&params, problem.shots, shot_seed)
                .map_err(|e| Error::Evaluation {
                    index,
                    source: Box::new(e),
                })?;
            evaluations.push(Evaluation {
                params: x.to_vec(),
                energy: est.energy,
                mean_cut: est.mean_cut,
            });
            Ok(est.energy)
        };
        termination = match config.method {
            Method::Cobyla => cobyla::TrustRegion {
                rho_begin: config.initial_step,
                rho_end: config.tolerance,
                max_evaluations: budget,
            }
            .minimize(&mut objective, &x0)?,
            Method::NelderMead => simplex::NelderMead {
                initial_step: config.initial_step,
                tolerance: config.tolerance,
                max_evaluations: budget,
            }
            .minimize(&mut objective, &x0)?,
        };
    }

    let best = evaluations
        .iter()
        .min_by(|a, b| a.energy.total_cmp(&b.energy))
        .ok_or_else(|| Error::Parameter("optimizer made no evaluations".into()))?;
    Ok(OptimizationTrace {
        best_params: QaoaParams::from_slice(&best.params)?,
        best_energy: best.energy,
        evaluations: evaluations.clone(),
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{PerfectBackend, UniformRandomStub};
    use crate::graphs::{generate_erdos_renyi, Graph};

    fn counts(n: usize, entries: &[(&str, u64)]) -> ShotCounts {
        let mut c = ShotCounts::new(n);
        for (s, k) in entries {
            c.add(ShotCounts::parse_bitstring(s).unwrap(), *k);
        }
        c
    }

    #[test]
    fn energy_examples() {
        let k2 = Graph::complete(2);
        let e = estimate_energy(&k2, &counts(2, &[("01", 10)])).unwrap();
        assert_eq!((e.mean_cut, e.energy), (1.0, -1.5));
        let e = estimate_energy(&k2, &counts(2, &[("00", 5), ("01", 5), ("10", 5), ("11", 5)])).unwrap();
        assert_eq!((e.mean_cut, e.energy), (0.5, -0.5));
        let k3 = Graph::complete(3);
        let e = estimate_energy(&k3, &counts(3, &[("010", 3), ("000", 1)])).unwrap();
        assert_eq!((e.mean_cut, e.energy), (1.5, -1.5));
        assert!(estimate_energy(&k3, &ShotCounts::new(3)).is_err());
        assert!(estimate_energy(&k3, &counts(2, &[("01", 1)])).is_err());
    }

    #[test]
    fn single_evaluation_budget() {
        let g = generate_erdos_renyi(5, 0.5, 1).unwrap();
        let backend = PerfectBackend::default();
        let problem = QaoaProblem {
            graph: &g,
            depth: 1,
            connectivity: &Connectivity::AllToAll,
            backend: &backend,
            shots: 256,
        };
        let cfg = OptimizerConfig {
            max_evaluations: 1,
            ..Default::default()
        };
        let trace = optimize(&problem, &cfg, 3).unwrap();
        assert_eq!(trace.evaluations.len(), 1);
        assert_eq!(trace.best_energy, trace.evaluations[0].energy);
        assert_eq!(trace.termination, Termination::BudgetExhausted);
    }

    #[test]
    fn trace_invariants() {
        let g = generate_erdos_renyi(6, 0.5, 2).unwrap();
        let backend = PerfectBackend::default();
        let problem = QaoaProblem {
            graph: &g,
            depth: 1,
            connectivity: &Connectivity::AllToAll,
            backend: &backend,
            shots: 512,
        };
        for method in [Method::Cobyla, Method::NelderMead] {
            let cfg = OptimizerConfig {
                method,
                restarts: 2,
                max_evaluations: 120,
                ..Default::default()
            };
            let trace = optimize(&problem, &cfg, 9).unwrap();
            assert!(trace.evaluations.len() <= 120);
            assert!(trace.best_energy <= trace.evaluations[0].energy);
            let half_edges = g.num_edges() as f64 / 2.0;
            for e in &trace.evaluations {
                assert!((e.energy + 2.0 * e.mean_cut - half_edges).abs() < 1e-9);
            }
            let best_cut = trace.evaluations.iter().map(|e| e.mean_cut).fold(f64::MIN, f64::max);
            assert_eq!(trace.best().mean_cut, best_cut);
            assert_eq!(trace, optimize(&problem, &cfg, 9).unwrap());
        }
    }

    #[test]
    fn evaluation_errors_carry_index() {
        struct Failing;
        impl Backend for Failing {
            fn execute(&self, _: &crate::circuit::Circuit, _: u64, _: u64) -> Result<ShotCounts> {
                Err(Error::Backend("boom".into()))
            }
            fn describe(&self) -> String {
                "failing".into()
            }
        }
        let g = Graph::complete(3);
        let problem = QaoaProblem {
            graph: &g,
            depth: 1,
            connectivity: &Connectivity::AllToAll,
            backend: &Failing,
            shots: 10,
        };
        let err = optimize(&problem, &OptimizerConfig::default(), 0).unwrap_err();
        assert!(matches!(err, Error::Evaluation { index: 0, .. }));
    }

    #[test]
    fn random_backend_energy_is_baseline() {
        let g = generate_erdos_renyi(8, 0.5, 5).unwrap();
        let problem = QaoaProblem {
            graph: &g,
            depth: 1,
            connectivity: &Connectivity::AllToAll,
            backend: &UniformRandomStub,
            shots: 20_000,
        };
        let e = problem.evaluate(&QaoaParams::zeros(1), 20_000, 1).unwrap();
        // each edge is cut with probability 1/2 independently of the others' marginals
        let sd = (g.num_edges() as f64 / 4.0 / 20_000.0).sqrt();
        assert!((e.mean_cut - g.num_edges() as f64 / 2.0).abs() < 4.0 * sd);
    }
}
