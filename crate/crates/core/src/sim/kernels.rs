//! In-place gate kernels on amplitude slices. Qubit `q` is bit `q` of the
//! basis index.

use num_complex::Complex64;

use crate::circuit::Gate;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub(crate) fn from_index(i: u32) -> Pauli {
        match i & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        }
    }
}

/// Visits every index pair `(i, i | 1 << q)` with bit `q` of `i` clear.
#[inline]
fn for_pairs(len: usize, q: usize, mut f: impl FnMut(usize, usize)) {
    let bit = 1usize << q;
    let mut base = 0;
    while base < len {
        for i in base..base + bit {
            f(i, i | bit);
        }
        base += bit << 1;
    }
}

pub(crate) fn apply_matrix(amps: &mut [Complex64], q: usize, m: [[Complex64; 2]; 2]) {
    for_pairs(amps.len(), q, |i, j| {
        let (x, y) = (amps[i], amps[j]);
        amps[i] = m[0][0] * x + m[0][1] * y;
        amps[j] = m[1][0] * x + m[1][1] * y;
    });
}

pub(crate) fn apply_phase(amps: &mut [Complex64], q: usize, zero: Complex64, one: Complex64) {
    for_pairs(amps.len(), q, |i, j| {
        amps[i] *= zero;
        amps[j] *= one;
    });
}

pub(crate) fn apply_cnot(amps: &mut [Complex64], control: usize, target: usize) {
    let c = 1usize << control;
    for_pairs(amps.len(), target, |i, j| {
        if i & c != 0 {
            amps.swap(i, j);
        }
    });
}

pub(crate) fn apply_swap(amps: &mut [Complex64], a: usize, b: usize) {
    let (ma, mb) = (1usize << a, 1usize << b);
    for_pairs(amps.len(), a, |_, j| {
        // j has bit a set; pair it with the index that has bit b set instead
        if j & mb == 0 {
            amps.swap(j, (j ^ ma) | mb);
        }
    });
}

pub(crate) fn apply_pauli(amps: &mut [Complex64], q: usize, p: Pauli, conj: bool) {
    match p {
        Pauli::I => {}
        Pauli::X => for_pairs(amps.len(), q, |i, j| amps.swap(i, j)),
        Pauli::Y => {
            // Y = [[0, -i], [i, 0]]; its conjugate is -Y
            let s = if conj { -I } else { I };
            for_pairs(amps.len(), q, |i, j| {
                let (x, y) = (amps[i], amps[j]);
                amps[i] = -s * y;
                amps[j] = s * x;
            })
        }
        Pauli::Z => for_pairs(amps.len(), q, |_, j| amps[j] = -amps[j]),
    }
}

/// Applies `gate` with every wire shifted by `offset`, optionally using the
/// complex-conjugate gate matrix.
pub(crate) fn apply_gate(amps: &mut [Complex64], gate: &Gate, offset: usize, conj: bool) {
    let cj = |z: Complex64| if conj { z.conj() } else { z };
    match *gate {
        Gate::H(q) => {
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            apply_matrix(amps, q + offset, [[h, h], [h, -h]]);
        }
        Gate::Rx(q, t) => {
            let c = Complex64::new((t / 2.0).cos(), 0.0);
            let s = cj(Complex64::new(0.0, -(t / 2.0).sin()));
            apply_matrix(amps, q + offset, [[c, s], [s, c]]);
        }
        Gate::Rz(q, t) => {
            let zero = cj(Complex64::from_polar(1.0, -t / 2.0));
            let one = cj(Complex64::from_polar(1.0, t / 2.0));
            apply_phase(amps, q + offset, zero, one);
        }
        Gate::Cnot(c, t) => apply_cnot(amps, c + offset, t + offset),
        Gate::Swap(a, b) => apply_swap(amps, a + offset, b + offset),
    }
}

pub(crate) fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

pub(crate) fn basis_state(num_qubits: usize, index: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; 1 << num_qubits];
    v[index] = Complex64::new(1.0, 0.0);
    v
}
