//! Gate-level circuits: the QAOA ansatz, its native-gate form and routing
//! onto restricted qubit connectivity.

mod qaoa;
mod routing;
mod serial;

pub use qaoa::{build_qaoa_circuit, QaoaParams};
pub use routing::{grid_for, route, Connectivity};
pub use serial::CircuitDocument;

use crate::{Error, Result};

/// Native gate set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    /// `exp(-i theta X / 2)`
    Rx(usize, f64),
    /// `exp(-i theta Z / 2)`
    Rz(usize, f64),
    /// Control first, target second.
    Cnot(usize, usize),
    Swap(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> ([usize; 2], usize) {
        match *self {
            Gate::H(q) | Gate::Rx(q, _) | Gate::Rz(q, _) => ([q, q], 1),
            Gate::Cnot(a, b) | Gate::Swap(a, b) => ([a, b], 2),
        }
    }

    pub fn arity(&self) -> usize {
        self.qubits().1
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::Rx(..) => "RX",
            Gate::Rz(..) => "RZ",
            Gate::Cnot(..) => "CNOT",
            Gate::Swap(..) => "SWAP",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx(_, t) | Gate::Rz(_, t) => Some(t),
            _ => None,
        }
    }

    fn check(&self, num_qubits: usize) -> Result<()> {
        let (qs, k) = self.qubits();
        if qs[..k].iter().any(|&q| q >= num_qubits) {
            return Err(Error::Parameter(format!(
                "{self:?} out of range for {num_qubits} qubits"
            )));
        }
        if k == 2 && qs[0] == qs[1] {
            return Err(Error::Parameter(format!("{self:?} repeats a qubit")));
        }
        if let Some(t) = self.angle() {
            if !t.is_finite() {
                return Err(Error::Parameter(format!("{self:?} has a non-finite angle")));
            }
        }
        Ok(())
    }
}

/// Provenance of a circuit. Not part of the wire format.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CircuitMetadata {
    pub graph_seed: Option<u64>,
    pub depth: Option<usize>,
    pub params: Option<QaoaParams>,
}

/// Ordered gate list on a fixed register.
///
/// `final_permutation[i]` is the wire that holds, at the end of the circuit,
/// the qubit that started on wire `i`. Unrouted circuits carry the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<Gate>,
    final_permutation: Vec<usize>,
    pub metadata: CircuitMetadata,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            ops: Vec::new(),
            final_permutation: (0..num_qubits).collect(),
            metadata: CircuitMetadata::default(),
        }
    }

    pub fn from_parts(
        num_qubits: usize,
        ops: Vec<Gate>,
        final_permutation: Vec<usize>,
    ) -> Result<Self> {
        let mut seen = vec![false; num_qubits];
        if final_permutation.len() != num_qubits
            || final_permutation
                .iter()
                .any(|&w| w >= num_qubits || std::mem::replace(&mut seen[w], true))
        {
            return Err(Error::Parameter(format!(
                "final permutation {final_permutation:?} is not a permutation of 0..{num_qubits}"
            )));
        }
        let mut c = Circuit {
            num_qubits,
            ops: Vec::with_capacity(ops.len()),
            final_permutation,
            metadata: CircuitMetadata::default(),
        };
        for g in ops {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.check(self.num_qubits)?;
        self.ops.push(gate);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[Gate] {
        &self.ops
    }

    pub fn final_permutation(&self) -> &[usize] {
        &self.final_permutation
    }

    pub fn count(&self, name: &str) -> usize {
        self.ops.iter().filter(|g| g.name() == name).count()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.ops.iter().filter(|g| g.arity() == 2).count()
    }

    /// Maps a measured register (wire `w` is bit `w`) back to the first
    /// `logical` qubits in their original order.
    pub fn decode_bits(&self, measured: u64, logical: usize) -> u64 {
        self.final_permutation[..logical]
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &w)| acc | ((measured >> w) & 1) << i)
    }

    pub fn is_identity_layout(&self) -> bool {
        self.final_permutation.iter().enumerate().all(|(i, &w)| i == w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_validates() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::Cnot(0, 1)).is_ok());
        assert!(c.push(Gate::Cnot(1, 1)).is_err());
        assert!(c.push(Gate::H(2)).is_err());
        assert!(c.push(Gate::Rz(0, f64::NAN)).is_err());
        assert_eq!(c.ops().len(), 1);
    }

    #[test]
    fn decode_through_permutation() {
        let c = Circuit::from_parts(3, vec![], vec![2, 0, 1]).unwrap();
        // qubit 0 ended on wire 2, qubit 1 on wire 0, qubit 2 on wire 1
        assert_eq!(c.decode_bits(0b100, 3), 0b001);
        assert_eq!(c.decode_bits(0b001, 3), 0b010);
        assert_eq!(c.decode_bits(0b010, 3), 0b100);
        assert!(Circuit::from_parts(3, vec![], vec![0, 0, 1]).is_err());
    }
}
