use num_complex::Complex64 as C;
use qscore::circuit::{build_qaoa_circuit, Circuit, Gate, QaoaParams};
use qscore::graphs::Graph;
use qscore::sim::dense::density_oracle;
use qscore::sim::{run_noisy, run_perfect, NoiseModel, Simulator};

type Mat = Vec<Vec<C>>;

fn zeros(d: usize) -> Mat {
    vec![vec![C::new(0.0, 0.0); d]; d]
}

fn mul(a: &Mat, b: &Mat) -> Mat {
    let d = a.len();
    let mut out = zeros(d);
    for i in 0..d {
        for k in 0..d {
            if a[i][k] == C::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn dagger(a: &Mat) -> Mat {
    let d = a.len();
    let mut out = zeros(d);
    for i in 0..d {
        for j in 0..d {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

/// Full-register matrix of a one-qubit operator `m` on qubit `q`.
fn lift1(n: usize, q: usize, m: [[C; 2]; 2]) -> Mat {
    let d = 1 << n;
    let mut out = zeros(d);
    for col in 0..d {
        let b = (col >> q) & 1;
        for a in 0..2 {
            let row = (col & !(1 << q)) | (a << q);
            out[row][col] += m[a][b];
        }
    }
    out
}

fn pauli(k: usize) -> [[C; 2]; 2] {
    let (o, z, i) = (C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0));
    match k {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, -i], [i, z]],
        _ => [[o, z], [z, -o]],
    }
}

fn gate_matrix(n: usize, g: &Gate) -> Mat {
    let (o, z) = (C::new(1.0, 0.0), C::new(0.0, 0.0));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match *g {
        Gate::H(q) => lift1(n, q, [[o * s, o * s], [o * s, -o * s]]),
        Gate::Rx(q, t) => {
            let (c, si) = ((t / 2.0).cos(), (t / 2.0).sin());
            lift1(n, q, [[C::new(c, 0.0), C::new(0.0, -si)], [C::new(0.0, -si), C::new(c, 0.0)]])
        }
        Gate::Rz(q, t) => lift1(n, q, [[C::from_polar(1.0, -t / 2.0), z], [z, C::from_polar(1.0, t / 2.0)]]),
        Gate::Cnot(c, t) => {
            let d = 1 << n;
            let mut m = zeros(d);
            for col in 0..d {
                let row = if (col >> c) & 1 == 1 { col ^ (1 << t) } else { col };
                m[row][col] = o;
            }
            m
        }
        Gate::Swap(a, b) => {
            let d = 1 << n;
            let mut m = zeros(d);
            for col in 0..d {
                let (x, y) = ((col >> a) & 1, (col >> b) & 1);
                let row = (col & !(1 << a) & !(1 << b)) | (y << a) | (x << b);
                m[row][col] = o;
            }
            m
        }
    }
}

/// Density-matrix evolution written against plain matrices, independent of
/// the library kernels.
fn reference_distribution(c: &Circuit, eps1: f64, eps2: f64) -> Vec<f64> {
    let n = c.num_qubits();
    let d = 1 << n;
    let mut rho = zeros(d);
    rho[0][0] = C::new(1.0, 0.0);
    for g in c.ops() {
        let u = gate_matrix(n, g);
        rho = mul(&mul(&u, &rho), &dagger(&u));
        let (qs, arity) = g.qubits();
        let eps = if arity == 1 { eps1 } else { eps2 };
        if eps == 0.0 {
            continue;
        }
        let count = if arity == 1 { 3 } else { 15 };
        let mut acc = zeros(d);
        for k in 1..=count {
            let p = if arity == 1 {
                lift1(n, qs[0], pauli(k))
            } else {
                mul(&lift1(n, qs[0], pauli(k & 3)), &lift1(n, qs[1], pauli(k >> 2)))
            };
            let term = mul(&mul(&p, &rho), &dagger(&p));
            for i in 0..d {
                for j in 0..d {
                    acc[i][j] += term[i][j] * (eps / count as f64);
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                rho[i][j] = rho[i][j] * (1.0 - eps) + acc[i][j];
            }
        }
    }
    (0..d).map(|i| rho[i][i].re).collect()
}

fn triangle_circuit() -> Circuit {
    let g = Graph::new(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
    build_qaoa_circuit(&g, &QaoaParams::new(vec![0.7], vec![0.4]).unwrap())
}

// triangle, d=1, gamma=0.7, beta=0.4, eps2=0.02, by basis index
const TRIANGLE_FIXTURE: [f64; 8] = [
    0.2647636284861887,
    0.08012300492430723,
    0.07841212383793715,
    0.07670124275156709,
    0.07670124275156709,
    0.07841212383793715,
    0.08012300492430723,
    0.2647636284861887,
];

#[test]
fn triangle_noisy_fixture() {
    let c = triangle_circuit();
    let reference = reference_distribution(&c, 0.0, 0.02);
    let oracle = density_oracle(&c, &NoiseModel::new(0.0, 0.02).unwrap()).unwrap();
    for i in 0..8 {
        assert!((reference[i] - TRIANGLE_FIXTURE[i]).abs() < 1e-12, "{i}: {reference:?}");
        assert!((oracle[i] - TRIANGLE_FIXTURE[i]).abs() < 1e-12, "{i}: {oracle:?}");
    }
}

#[test]
fn density_oracle_matches_reference_on_mixed_circuits() {
    let mut c = Circuit::new(3);
    for g in [
        Gate::H(0),
        Gate::Rx(1, 0.3),
        Gate::Cnot(0, 2),
        Gate::Rz(2, 1.1),
        Gate::Swap(1, 2),
        Gate::Cnot(2, 0),
        Gate::Rx(0, -0.8),
    ] {
        c.push(g).unwrap();
    }
    for (e1, e2) in [(0.0, 0.0), (0.01, 0.05), (0.3, 0.6), (0.75, 15.0 / 16.0)] {
        let reference = reference_distribution(&c, e1, e2);
        let oracle = density_oracle(&c, &NoiseModel::new(e1, e2).unwrap()).unwrap();
        for i in 0..8 {
            assert!((reference[i] - oracle[i]).abs() < 1e-12, "eps ({e1}, {e2}) index {i}");
        }
    }
}

#[test]
fn trajectories_match_oracle_on_triangle() {
    let c = triangle_circuit();
    let noise = NoiseModel::new(0.004, 0.02).unwrap();
    let oracle = density_oracle(&c, &noise).unwrap();
    let counts = run_noisy(&c, &noise, 200_000, 5).unwrap();
    assert!(counts.tv_distance(&oracle) < 0.01);
}

#[test]
fn k2_optimal_angles_give_mean_cut_one() {
    use std::f64::consts::PI;
    let g = Graph::complete(2);
    let sim = Simulator::default();
    let cut = |gamma: f64, beta: f64| {
        let c = build_qaoa_circuit(&g, &QaoaParams::new(vec![gamma], vec![beta]).unwrap());
        let p = sim.final_state(&c).unwrap().probabilities();
        p[1] + p[2]
    };
    // grid scan: the maximum over a fine grid is 1, attained at (pi/2, -pi/4)
    let mut best = (f64::MIN, 0.0, 0.0);
    for a in 0..=200 {
        for b in 0..=200 {
            let (x, y) = (-PI + a as f64 * PI / 100.0, -PI + b as f64 * PI / 100.0);
            let v = cut(x, y);
            if v > best.0 {
                best = (v, x, y);
            }
        }
    }
    assert!((best.0 - 1.0).abs() < 1e-12);
    assert!((cut(PI / 2.0, -PI / 4.0) - 1.0).abs() < 1e-12);
    // with this rotation sign convention (pi/2, +pi/4) is the minimum
    assert!(cut(PI / 2.0, PI / 4.0) < 1e-12);

    let c = build_qaoa_circuit(&g, &QaoaParams::new(vec![PI / 2.0], vec![-PI / 4.0]).unwrap());
    let counts = run_perfect(&c, 100_000, 1).unwrap();
    let mean = (counts.get(0b01) + counts.get(0b10)) as f64 / 1e5;
    assert_eq!(mean, 1.0);
}

#[test]
fn zero_angles_sample_uniformly() {
    let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]).unwrap();
    let c = build_qaoa_circuit(&g, &QaoaParams::zeros(2));
    let counts = run_perfect(&c, 100_000, 4).unwrap();
    assert!(counts.tv_distance(&[1.0 / 16.0; 16]) < 0.01);
}
