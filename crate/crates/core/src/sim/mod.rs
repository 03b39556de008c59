//! Statevector execution of circuits, with optional depolarizing noise.
//!
//! Noise is simulated by Pauli trajectories: each shot runs its own
//! stochastic realization of the circuit in which, after every gate, a
//! uniformly random non-identity Pauli on the gate's qubits is inserted with
//! the gate's error probability. Averaged over shots this is exactly the
//! depolarizing channel, at statevector rather than density-matrix memory.

pub mod dense;
mod counts;
mod kernels;

pub use counts::ShotCounts;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::rng::{self, Purpose};
use crate::{Error, Result};
use kernels::{apply_gate, apply_pauli, Pauli};

/// Register size above which the statevector engine refuses to run.
pub const DEFAULT_MAX_QUBITS: usize = 26;

/// Memory cap for the noiseless prefix states cached by trajectory runs.
const CHECKPOINT_BUDGET_BYTES: usize = 1 << 28;

/// Per-gate depolarizing error probabilities. Preparation and readout are
/// perfect and idle qubits are noiseless.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Probability of a random X, Y or Z after a one-qubit gate.
    pub eps1: f64,
    /// Probability of one of the 15 non-identity two-qubit Paulis after a
    /// two-qubit gate.
    pub eps2: f64,
}

impl NoiseModel {
    pub fn new(eps1: f64, eps2: f64) -> Result<Self> {
        let m = NoiseModel { eps1, eps2 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, e) in [("eps1", self.eps1), ("eps2", self.eps2)] {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::Parameter(format!("{name} = {e} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.eps1 == 0.0 && self.eps2 == 0.0
    }

    pub(crate) fn rate(&self, arity: usize) -> f64 {
        if arity == 1 {
            self.eps1
        } else {
            self.eps2
        }
    }
}

/// A pure state of `num_qubits` qubits.
#[derive(Debug, Clone)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(num_qubits: usize) -> Self {
        StateVector {
            num_qubits,
            amps: kernels::basis_state(num_qubits, 0),
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn norm(&self) -> f64 {
        kernels::norm_sqr(&self.amps).sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply(&mut self, gate: &crate::circuit::Gate) {
        apply_gate(&mut self.amps, gate, 0, false);
    }

    fn apply_error(&mut self, qubits: &[usize], code: u32) {
        apply_pauli(&mut self.amps, qubits[0], Pauli::from_index(code), false);
        if qubits.len() == 2 {
            apply_pauli(&mut self.amps, qubits[1], Pauli::from_index(code >> 2), false);
        }
    }

    /// Draws one outcome with probability `|amplitude|^2`.
    fn sample_one(&self, rng: &mut impl Rng) -> u64 {
        let mut u = rng.gen::<f64>() * kernels::norm_sqr(&self.amps);
        let mut last = 0;
        for (k, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last = k;
                if u < p {
                    return k as u64;
                }
                u -= p;
            }
        }
        last as u64
    }
}

/// Cumulative distribution for repeated sampling by bisection.
struct Sampler {
    cdf: Vec<f64>,
}

impl Sampler {
    fn new(state: &StateVector) -> Self {
        let mut acc = 0.0;
        let cdf = state
            .amps
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        Sampler { cdf }
    }

    fn sample(&self, rng: &mut impl Rng) -> u64 {
        let total = *self.cdf.last().unwrap();
        let u = rng.gen::<f64>() * total;
        let k = self.cdf.partition_point(|&c| c <= u);
        // skip zero-probability tail entries produced by rounding
        let k = k.min(self.cdf.len() - 1);
        k as u64
    }
}

/// Statevector engine settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Simulator {
    pub max_qubits: usize,
    /// Number of measurements drawn from each noisy trajectory. 1 gives
    /// independent shots; larger values trade correlation between shots for
    /// fewer state evolutions.
    pub samples_per_trajectory: usize,
}

impl Default for Simulator {
    fn default() -> Self {
        Simulator {
            max_qubits: DEFAULT_MAX_QUBITS,
            samples_per_trajectory: 1,
        }
    }
}

impl Simulator {
    fn check(&self, c: &Circuit, shots: u64) -> Result<()> {
        if c.num_qubits() > self.max_qubits {
            return Err(Error::Capability(format!(
                "statevector limit is {} qubits, circuit has {}",
                self.max_qubits,
                c.num_qubits()
            )));
        }
        if shots == 0 {
            return Err(Error::Parameter("need at least one shot".into()));
        }
        Ok(())
    }

    pub fn final_state(&self, c: &Circuit) -> Result<StateVector> {
        self.check(c, 1)?;
        let mut s = StateVector::zero(c.num_qubits());
        for g in c.ops() {
            s.apply(g);
        }
        Ok(s)
    }

    pub fn run_perfect(&self, c: &Circuit, shots: u64, seed: u64) -> Result<ShotCounts> {
        self.check(c, shots)?;
        let state = self.final_state(c)?;
        let sampler = Sampler::new(&state);
        let mut rng = rng::stream(seed, Purpose::Sampling, 0);
        let mut counts = ShotCounts::new(c.num_qubits());
        for _ in 0..shots {
            counts.add(sampler.sample(&mut rng), 1);
        }
        Ok(counts)
    }

    /// One trajectory per `samples_per_trajectory` shots; trajectory `t`
    /// draws all its randomness from stream `(seed, t)`.
    pub fn run_noisy(
        &self,
        c: &Circuit,
        noise: &NoiseModel,
        shots: u64,
        seed: u64,
    ) -> Result<ShotCounts> {
        self.check(c, shots)?;
        noise.validate()?;
        let n = c.num_qubits();
        let ops = c.ops();
        let dim_bytes = (1usize << n) * std::mem::size_of::<Complex64>();
        let stride = (ops.len() * dim_bytes).div_ceil(CHECKPOINT_BUDGET_BYTES).max(1);

        // noiseless prefix states every `stride` gates, and the ideal output
        let mut checkpoints = Vec::with_capacity(ops.len() / stride + 1);
        let mut ideal = StateVector::zero(n);
        for (k, g) in ops.iter().enumerate() {
            if k % stride == 0 {
                checkpoints.push(ideal.clone());
            }
            ideal.apply(g);
        }
        let ideal_sampler = Sampler::new(&ideal);

        let per = self.samples_per_trajectory.max(1) as u64;
        let trajectories = shots.div_ceil(per);
        let mut counts = ShotCounts::new(n);
        let mut errors: Vec<(usize, u32)> = Vec::new();
        for t in 0..trajectories {
            let mut rng = rng::stream(seed, Purpose::Trajectory, t);
            errors.clear();
            for (k, g) in ops.iter().enumerate() {
                let arity = g.arity();
                if rng.gen::<f64>() < noise.rate(arity) {
                    let code = if arity == 1 {
                        rng.gen_range(1..4)
                    } else {
                        rng.gen_range(1..16)
                    };
                    errors.push((k, code));
                }
            }
            let take = per.min(shots - t * per);
            if errors.is_empty() {
                for _ in 0..take {
                    counts.add(ideal_sampler.sample(&mut rng), 1);
                }
                continue;
            }
            let first = errors[0].0;
            let start = first / stride * stride;
            let mut state = checkpoints[first / stride].clone();
            let mut pending = errors.iter().peekable();
            for (k, g) in ops.iter().enumerate().skip(start) {
                state.apply(g);
                while let Some(&&(ek, code)) = pending.peek() {
                    if ek != k {
                        break;
                    }
                    let (qs, arity) = g.qubits();
                    state.apply_error(&qs[..arity], code);
                    pending.next();
                }
            }
            if take == 1 {
                counts.add(state.sample_one(&mut rng), 1);
            } else {
                let sampler = Sampler::new(&state);
                for _ in 0..take {
                    counts.add(sampler.sample(&mut rng), 1);
                }
            }
        }
        Ok(counts)
    }
}

/// Noiseless execution with default engine settings.
pub fn run_perfect(c: &Circuit, shots: u64, seed: u64) -> Result<ShotCounts> {
    Simulator::default().run_perfect(c, shots, seed)
}

/// Trajectory-sampled noisy execution with default engine settings.
pub fn run_noisy(c: &Circuit, noise: &NoiseModel, shots: u64, seed: u64) -> Result<ShotCounts> {
    Simulator::default().run_noisy(c, noise, shots, seed)
}
