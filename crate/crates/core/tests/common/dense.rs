//! Dense Kronecker-product reference simulator.

use num_complex::Complex64;
use treeprep_core::circuit::{Circuit, Gate};

pub type Matrix = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Tensor product of one 2×2 factor per qubit, qubit 0 leftmost.
fn embed(n: usize, factors: &[(usize, Matrix)]) -> Matrix {
    let mut m = vec![vec![c(1.0, 0.0)]];
    for q in 0..n {
        let f = factors
            .iter()
            .find(|(p, _)| *p == q)
            .map(|(_, f)| f.clone())
            .unwrap_or_else(|| identity(2));
        m = kron(&m, &f);
    }
    m
}

pub fn gate_unitary(n: usize, gate: &Gate) -> Matrix {
    match *gate {
        Gate::Ry { qubit, angle } => {
            let (s, co) = (angle / 2.0).sin_cos();
            embed(
                n,
                &[(
                    qubit,
                    vec![vec![c(co, 0.0), c(-s, 0.0)], vec![c(s, 0.0), c(co, 0.0)]],
                )],
            )
        }
        Gate::Rz { qubit, angle } => {
            let h = angle / 2.0;
            embed(
                n,
                &[(
                    qubit,
                    vec![
                        vec![Complex64::from_polar(1.0, -h), c(0.0, 0.0)],
                        vec![c(0.0, 0.0), Complex64::from_polar(1.0, h)],
                    ],
                )],
            )
        }
        Gate::Cx { control, target } => {
            let p0 = vec![
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 0.0)],
            ];
            let p1 = vec![
                vec![c(0.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(1.0, 0.0)],
            ];
            let x = vec![
                vec![c(0.0, 0.0), c(1.0, 0.0)],
                vec![c(1.0, 0.0), c(0.0, 0.0)],
            ];
            let a = embed(n, &[(control, p0)]);
            let b = embed(n, &[(control, p1), (target, x)]);
            a.iter()
                .zip(&b)
                .map(|(ra, rb)| ra.iter().zip(rb).map(|(u, v)| u + v).collect())
                .collect()
        }
    }
}

pub fn circuit_unitary(circuit: &Circuit) -> Matrix {
    let n = circuit.n_qubits;
    let mut u = identity(1 << n);
    for g in &circuit.gates {
        u = matmul(&gate_unitary(n, g), &u);
    }
    u
}

/// First column of the circuit unitary: the state reached from |0…0⟩.
pub fn dense_state(circuit: &Circuit) -> Vec<Complex64> {
    circuit_unitary(circuit).iter().map(|row| row[0]).collect()
}
