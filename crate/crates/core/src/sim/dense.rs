//! Exact small-register references: full unitaries and density-matrix
//! evolution under the same depolarizing channel the trajectories sample.

use num_complex::Complex64;

use super::kernels::{apply_gate, apply_pauli, basis_state, Pauli};
use super::NoiseModel;
use crate::circuit::Circuit;
use crate::{Error, Result};

/// Largest register handled by [`density_oracle`].
pub const DENSITY_MAX_QUBITS: usize = 6;

/// Dense unitary of a circuit, `u[row][col]`. Intended for small registers.
pub fn circuit_unitary(c: &Circuit) -> Vec<Vec<Complex64>> {
    let n = c.num_qubits();
    let dim = 1usize << n;
    let mut u = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for col in 0..dim {
        let mut v = basis_state(n, col);
        for g in c.ops() {
            apply_gate(&mut v, g, 0, false);
        }
        for (row, a) in v.into_iter().enumerate() {
            u[row][col] = a;
        }
    }
    u
}

/// `max |a - e^{i phi} b|` over entries, with the phase fixed on the largest
/// entry of `b`.
pub fn max_abs_diff_up_to_phase(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    let (mut bi, mut bj, mut best) = (0, 0, -1.0);
    for (i, row) in b.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            if z.norm() > best {
                (bi, bj, best) = (i, j, z.norm());
            }
        }
    }
    let ratio = a[bi][bj] / b[bi][bj];
    let phase = if ratio.norm() > 0.0 {
        ratio / ratio.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(move |(x, y)| (x - phase * y).norm()))
        .fold(0.0, f64::max)
}

/// Exact outcome distribution of `c` under `noise`.
///
/// The density matrix is held as a `2n`-qubit vector, `rho[i + (j << n)]`, so
/// `U rho U^dagger` is `U` on the low wires and `conj(U)` on the high wires.
pub fn density_oracle(c: &Circuit, noise: &NoiseModel) -> Result<Vec<f64>> {
    let n = c.num_qubits();
    if n > DENSITY_MAX_QUBITS {
        return Err(Error::Capability(format!(
            "density oracle is limited to {DENSITY_MAX_QUBITS} qubits, circuit has {n}"
        )));
    }
    noise.validate()?;
    let mut rho = basis_state(2 * n, 0);
    for g in c.ops() {
        apply_gate(&mut rho, g, 0, false);
        apply_gate(&mut rho, g, n, true);
        let (qs, arity) = g.qubits();
        let eps = noise.rate(arity);
        if eps == 0.0 {
            continue;
        }
        let paulis = if arity == 1 { 3 } else { 15 };
        let mut mixed = vec![Complex64::new(0.0, 0.0); rho.len()];
        for code in 1..=paulis as u32 {
            let mut term = rho.clone();
            for (slot, &q) in qs[..arity].iter().enumerate() {
                let p = Pauli::from_index(code >> (2 * slot));
                apply_pauli(&mut term, q, p, false);
                apply_pauli(&mut term, q + n, p, true);
            }
            for (m, t) in mixed.iter_mut().zip(term) {
                *m += t;
            }
        }
        let w = eps / paulis as f64;
        for (r, m) in rho.iter_mut().zip(mixed) {
            *r = *r * (1.0 - eps) + m * w;
        }
    }
    let dim = 1usize << n;
    Ok((0..dim).map(|i| rho[i + (i << n)].re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_qaoa_circuit, Gate, QaoaParams};
    use crate::graphs::Graph;
    use crate::sim::Simulator;

    #[test]
    fn pure_limit_matches_statevector() {
        let c = build_qaoa_circuit(&Graph::complete(4), &QaoaParams::new(vec![0.8], vec![1.2]).unwrap());
        let probs = density_oracle(&c, &NoiseModel::default()).unwrap();
        let sv = Simulator::default().final_state(&c).unwrap().probabilities();
        for (a, b) in probs.iter().zip(&sv) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn full_depolarization_is_uniform() {
        // with non-identity Paulis, the channel output is maximally mixed at
        // eps = 3/4 for one qubit and 15/16 for two
        let c = build_qaoa_circuit(&Graph::complete(3), &QaoaParams::new(vec![0.8], vec![1.2]).unwrap());
        let probs = density_oracle(&c, &NoiseModel::new(0.75, 15.0 / 16.0).unwrap()).unwrap();
        for p in probs {
            assert!((p - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn single_qubit_flip_under_noise() {
        // X on |0> is RX(pi) up to phase; X and Y errors undo the flip, Z keeps it
        let mut c = Circuit::new(1);
        c.push(Gate::Rx(0, std::f64::consts::PI)).unwrap();
        let probs = density_oracle(&c, &NoiseModel::new(0.75, 0.0).unwrap()).unwrap();
        assert!((probs[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unit_rate_after_one_cnot() {
        // every non-identity Pauli fires; 3 of the 15 leave |00> unflipped
        let mut c = Circuit::new(2);
        c.push(Gate::Cnot(0, 1)).unwrap();
        let probs = density_oracle(&c, &NoiseModel::new(0.0, 1.0).unwrap()).unwrap();
        assert!((probs[0] - 3.0 / 15.0).abs() < 1e-12);
        for p in &probs[1..] {
            assert!((p - 4.0 / 15.0).abs() < 1e-12);
        }
    }

    #[test]
    fn register_limit() {
        let c = Circuit::new(7);
        assert!(matches!(
            density_oracle(&c, &NoiseModel::default()),
            Err(Error::Capability(_))
        ));
    }
}
