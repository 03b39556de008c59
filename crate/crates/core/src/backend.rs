//! The execution boundary between the benchmark and whatever runs circuits.

use std::collections::BTreeSet;

use rand::Rng;

use crate::circuit::{Circuit, Gate};
use crate::graphs::{maxcut_exact_limited, Graph, DEFAULT_ENUMERATION_LIMIT};
use crate::rng::{self, Purpose};
use crate::sim::{NoiseModel, ShotCounts, Simulator};
use crate::{Error, Result};

/// Runs a circuit and returns measured counts over its full register.
///
/// Implementations must be deterministic in `seed` for the benchmark report
/// to be reproducible.
pub trait Backend: Send + Sync {
    fn execute(&self, circuit: &Circuit, shots: u64, seed: u64) -> Result<ShotCounts>;

    fn describe(&self) -> String;
}

impl<B: Backend + ?Sized> Backend for Box<B> {
    fn execute(&self, circuit: &Circuit, shots: u64, seed: u64) -> Result<ShotCounts> {
        (**self).execute(circuit, shots, seed)
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// Noiseless statevector simulation.
#[derive(Debug, Clone, Default)]
pub struct PerfectBackend {
    pub sim: Simulator,
}

impl Backend for PerfectBackend {
    fn execute(&self, circuit: &Circuit, shots: u64, seed: u64) -> Result<ShotCounts> {
        self.sim.run_perfect(circuit, shots, seed)
    }

    fn describe(&self) -> String {
        "perfect".into()
    }
}

/// Depolarizing-noise trajectory simulation.
#[derive(Debug, Clone, Default)]
pub struct NoisyBackend {
    pub sim: Simulator,
    pub noise: NoiseModel,
}

impl Backend for NoisyBackend {
    fn execute(&self, circuit: &Circuit, shots: u64, seed: u64) -> Result<ShotCounts> {
        self.sim.run_noisy(circuit, &self.noise, shots, seed)
    }

    fn describe(&self) -> String {
        format!("noisy(eps1={}, eps2={})", self.noise.eps1, self.noise.eps2)
    }
}

/// Ignores the circuit and returns uniformly random bitstrings.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformRandomStub;

impl Backend for UniformRandomStub {
    fn execute(&self, circuit: &Circuit, shots: u64, seed: u64) -> Result<ShotCounts> {
        let n = circuit.num_qubits();
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut rng = rng::stream(seed, Purpose::Sampling, 0);
        let mut counts = ShotCounts::new(n);
        for _ in 0..shots {
            counts.add(rng.gen::<u64>() & mask, 1);
        }
        Ok(counts)
    }

    fn describe(&self) -> String {
        "random-stub".into()
    }
}

/// Recovers the MaxCut instance from the CNOT pairs of an unrouted QAOA
/// circuit.
pub fn graph_from_qaoa_circuit(circuit: &Circuit) -> Result<Graph> {
    if !circuit.is_identity_layout() {
        return Err(Error::Backend(
            "cannot recover the graph from a routed circuit".into(),
        ));
    }
    let edges: BTreeSet<(usize, usize)> = circuit
        .ops()
        .iter()
        .filter_map(|g| match *g {
            Gate::Cnot(a, b) => Some((a.min(b), a.max(b))),
            _ => None,
        })
        .collect();
    Graph::new(circuit.num_qubits(), edges)
}

/// Puts every shot on an optimal cut of the circuit's graph.
#[derive(Debug, Clone, Copy)]
pub struct ExactSolverStub {
    pub enumeration_limit: usize,
}

impl Default for ExactSolverStub {
    fn default() -> Self {
        ExactSolverStub {
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

fn optimal_outcome(circuit: &Circuit, limit: usize) -> Result<u64> {
    let g = graph_from_qaoa_circuit(circuit)?;
    let best = maxcut_exact_limited(&g, limit)?;
    Ok(best
        .assignment
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (b as u64) << i))
}

impl Backend for ExactSolverStub {
    fn execute(&self, circuit: &Circuit, shots: u64, _seed: u64) -> Result<ShotCounts> {
        let mut counts = ShotCounts::new(circuit.num_qubits());
        counts.add(optimal_outcome(circuit, self.enumeration_limit)?, shots);
        Ok(counts)
    }

    fn describe(&self) -> String {
        "exact-stub".into()
    }
}

/// Each shot is an optimal cut with probability `quality(n)`, otherwise a
/// uniformly random bitstring. Plants a size-dependent score.
pub struct PlantedStub<F> {
    pub quality: F,
}

impl<F: Fn(usize) -> f64 + Send + Sync> Backend for PlantedStub<F> {
    fn execute(&self, circuit: &Circuit, shots: u64, seed: u64) -> Result<ShotCounts> {
        let n = circuit.num_qubits();
        let best = optimal_outcome(circuit, DEFAULT_ENUMERATION_LIMIT)?;
        let q = (self.quality)(n).clamp(0.0, 1.0);
        let mut rng = rng::stream(seed, Purpose::Sampling, 0);
        let mut counts = ShotCounts::new(n);
        for _ in 0..shots {
            let x = if rng.gen::<f64>() < q {
                best
            } else {
                rng.gen::<u64>() & ((1u64 << n) - 1)
            };
            counts.add(x, 1);
        }
        Ok(counts)
    }

    fn describe(&self) -> String {
        "planted-stub".into()
    }
}
