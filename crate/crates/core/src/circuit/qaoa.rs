use serde::{Deserialize, Serialize};

use super::{Circuit, CircuitMetadata, Gate};
use crate::graphs::Graph;
use crate::{Error, Result};

/// Cost angles `gammas` and mixer angles `betas`, one of each per layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(Error::Parameter(format!(
                "need equal, nonzero numbers of gammas and betas (got {} and {})",
                gammas.len(),
                betas.len()
            )));
        }
        if gammas.iter().chain(&betas).any(|t| !t.is_finite()) {
            return Err(Error::Parameter("QAOA angles must be finite".into()));
        }
        Ok(QaoaParams { gammas, betas })
    }

    pub fn zeros(depth: usize) -> Self {
        QaoaParams {
            gammas: vec![0.0; depth],
            betas: vec![0.0; depth],
        }
    }

    pub fn depth(&self) -> usize {
        self.gammas.len()
    }

    /// `[gamma_1, .., gamma_d, beta_1, .., beta_d]`
    pub fn to_vec(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        if x.len() % 2 != 0 {
            return Err(Error::Parameter(format!(
                "odd parameter vector length {}",
                x.len()
            )));
        }
        let d = x.len() / 2;
        QaoaParams::new(x[..d].to_vec(), x[d..].to_vec())
    }
}

/// The depth-`d` QAOA ansatz for MaxCut on `g`.
///
/// Hadamard wall, then per layer: `CNOT(a,b) RZ(gamma)(b) CNOT(a,b)` for each
/// edge in sorted order, which is `exp(-i gamma/2 Z_a Z_b)` up to phase, then
/// `RX(beta)` on every qubit. The constant offset of the cost Hamiltonian is
/// accounted for classically.
pub fn build_qaoa_circuit(g: &Graph, params: &QaoaParams) -> Circuit {
    let n = g.n();
    let mut c = Circuit::new(n);
    let mut ops = Vec::with_capacity(n + params.depth() * (3 * g.num_edges() + n));
    ops.extend((0..n).map(Gate::H));
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        for &(a, b) in g.edges() {
            ops.push(Gate::Cnot(a, b));
            ops.push(Gate::Rz(b, gamma));
            ops.push(Gate::Cnot(a, b));
        }
        ops.extend((0..n).map(|q| Gate::Rx(q, beta)));
    }
    c.ops = ops;
    c.metadata = CircuitMetadata {
        graph_seed: Some(g.seed),
        depth: Some(params.depth()),
        params: Some(params.clone()),
    };
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::generate_erdos_renyi;
    use crate::sim::dense::{circuit_unitary, max_abs_diff_up_to_phase};
    use num_complex::Complex64;

    #[test]
    fn single_edge_gate_count() {
        let c = build_qaoa_circuit(&Graph::complete(2), &QaoaParams::new(vec![0.3], vec![0.2]).unwrap());
        assert_eq!(c.ops().len(), 7);
        assert_eq!(c.count("H"), 2);
        assert_eq!(c.count("CNOT"), 2);
        assert_eq!(c.count("RZ"), 1);
        assert_eq!(c.count("RX"), 2);
    }

    #[test]
    fn gate_count_identity() {
        for seed in 0..10 {
            let g = generate_erdos_renyi(7, 0.5, seed).unwrap();
            for d in 1..4 {
                let c = build_qaoa_circuit(&g, &QaoaParams::zeros(d));
                let (n, e) = (7, g.num_edges());
                assert_eq!(c.ops().len(), n + d * (2 * e + n) + d * e);
                assert_eq!(c.count("CNOT"), 2 * d * e);
            }
        }
    }

    #[test]
    fn params_validation_and_layout() {
        assert!(QaoaParams::new(vec![], vec![]).is_err());
        assert!(QaoaParams::new(vec![1.0], vec![1.0, 2.0]).is_err());
        let p = QaoaParams::new(vec![1.0, 2.0], vec![3.0, 4.0]).unwrap();
        assert_eq!(p.to_vec(), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(QaoaParams::from_slice(&p.to_vec()).unwrap(), p);
    }

    #[test]
    fn zz_block_matches_diagonal() {
        for &gamma in &[0.0, 0.37, 1.9, -2.4] {
            let mut c = Circuit::new(2);
            c.push(Gate::Cnot(0, 1)).unwrap();
            c.push(Gate::Rz(1, gamma)).unwrap();
            c.push(Gate::Cnot(0, 1)).unwrap();
            let u = circuit_unitary(&c);
            let m = Complex64::from_polar(1.0, -gamma / 2.0);
            let p = Complex64::from_polar(1.0, gamma / 2.0);
            let z = Complex64::new(0.0, 0.0);
            // basis order |q1 q0>: 00, 01, 10, 11 -> parities 0, 1, 1, 0
            let expected = vec![
                vec![m, z, z, z],
                vec![z, p, z, z],
                vec![z, z, p, z],
                vec![z, z, z, m],
            ];
            assert!(max_abs_diff_up_to_phase(&u, &expected) < 1e-12);
        }
    }

    #[test]
    fn built_circuits_are_unitary() {
        for n in 1..=5 {
            let g = generate_erdos_renyi(n, 0.6, n as u64).unwrap();
            let p = QaoaParams::new(vec![0.7, -1.3], vec![0.4, 2.2]).unwrap();
            let u = circuit_unitary(&build_qaoa_circuit(&g, &p));
            let dim = u.len();
            for i in 0..dim {
                for j in 0..dim {
                    let dot: Complex64 = (0..dim).map(|k| u[k][i].conj() * u[k][j]).sum();
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - target).norm() < 1e-10);
                }
            }
        }
    }
}
