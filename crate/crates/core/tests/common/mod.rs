#![allow(dead_code)]

use std::path::PathBuf;

use num_complex::Complex64;
use qpath::adder::{gen_draper, AdderSpec};
use qpath::model::{controlled_phase, hadamard};
use qpath::{BasisState, Circuit, CircuitBundle, Operation, OperatorMatrix, Register};
use rand::rngs::StdRng;
use rand::{Rng as _, SeedableRng};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn adder(n: u32, a: u64, b: u64) -> CircuitBundle {
    gen_draper(&AdderSpec::new(n, a, b).unwrap()).unwrap()
}

pub fn state(bits: u64, width: u32) -> BasisState {
    BasisState::new(bits, width).unwrap()
}

/// Dense simulation written against the plain definition: for every output
/// basis state and every column of the gate matrix, read the input amplitude
/// whose operand bits spell that column. Shares no code with the library.
pub fn reference_amplitudes(circuit: &Circuit, input: BasisState, pc: usize) -> Vec<Complex64> {
    let size = 1usize << circuit.width();
    let mut psi = vec![Complex64::new(0.0, 0.0); size];
    psi[input.bits() as usize] = Complex64::new(1.0, 0.0);
    for op in &circuit.ops()[..pc] {
        let m = circuit.operator_of(op);
        let k = op.operands.len();
        let dim = 1usize << k;
        let mut next = vec![Complex64::new(0.0, 0.0); size];
        for (x, slot) in next.iter_mut().enumerate() {
            let mut row = 0;
            for (i, &q) in op.operands.iter().enumerate() {
                row |= ((x >> q) & 1) << (k - 1 - i);
            }
            for col in 0..dim {
                let mut y = x;
                for (i, &q) in op.operands.iter().enumerate() {
                    let bit = (col >> (k - 1 - i)) & 1;
                    y = (y & !(1 << q)) | (bit << q);
                }
                *slot += m.entries()[row * dim + col] * psi[y];
            }
        }
        psi = next;
    }
    psi
}

pub fn pauli_x() -> OperatorMatrix {
    let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    OperatorMatrix::new("X", 1, vec![o, l, l, o]).unwrap()
}

/// Random H / controlled-phase circuit on one register.
///
/// At most `max_h` Hadamards, so uncached path sums stay cheap.
pub fn random_circuit(rng: &mut StdRng, width: u32, ops: usize, max_h: usize, with_x: bool) -> CircuitBundle {
    let angles = [90.0, 45.0, 180.0, -90.0, 22.5, 137.0];
    let mut operators = vec![hadamard()];
    operators.extend(angles.iter().map(|&d| controlled_phase(d)));
    if with_x {
        operators.push(pauli_x());
    }
    let mut h_left = max_h;
    let mut seq = Vec::with_capacity(ops);
    for _ in 0..ops {
        let q = rng.gen_range(0..width);
        let pick = rng.gen_range(0..10);
        if pick < 4 && h_left > 0 {
            h_left -= 1;
            seq.push(Operation::new(0, vec![q]));
        } else if pick == 9 && with_x {
            seq.push(Operation::new(operators.len() - 1, vec![q]));
        } else if width >= 2 {
            let mut r = rng.gen_range(0..width - 1);
            if r >= q {
                r += 1;
            }
            seq.push(Operation::new(1 + rng.gen_range(0..angles.len()), vec![q, r]));
        } else if h_left > 0 {
            h_left -= 1;
            seq.push(Operation::new(0, vec![q]));
        }
    }
    let circuit = Circuit::new(width, vec![Register::new("q", width, 0)], operators, seq).unwrap();
    let input = state(rng.gen_range(0..1u64 << width), width);
    CircuitBundle::new(circuit, input).unwrap()
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// `n` Hadamards, one per bit, from the all-zero state.
pub fn hadamard_layer(n: u32) -> CircuitBundle {
    let ops = (0..n).map(|q| Operation::new(0, vec![q])).collect();
    let circuit = Circuit::new(n, vec![Register::new("q", n, 0)], vec![hadamard()], ops).unwrap();
    CircuitBundle::new(circuit, BasisState::zero(n).unwrap()).unwrap()
}

/// `len` controlled phases cycling over the bits of a 4-bit all-ones input.
pub fn phase_chain(len: usize) -> CircuitBundle {
    let ops = (0..len).map(|i| Operation::new(0, vec![(i % 4) as u32, ((i + 1) % 4) as u32])).collect();
    let circuit = Circuit::new(4, vec![Register::new("q", 4, 0)], vec![controlled_phase(45.0)], ops).unwrap();
    CircuitBundle::new(circuit, state(0b1111, 4)).unwrap()
}

pub fn max_abs_diff(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm()
}

/// Total variation distance between two distributions on the same support.
pub fn tvd(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0
}
