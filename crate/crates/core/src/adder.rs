//! Draper QFT adders, `a := a + b mod 2^n`, with no ancilla bits.
//!
//! Register `a` occupies bits `0..n` and `b` bits `n..2n`. The circuit has
//! three stages of `n(n+1)/2` operations each:
//!
//! 1. Fourier transform of `a`: for `i = n-1` down to `0`, `H` on `a[i]`
//!    followed by `φ(180/2^(i-l))` on `(a[i], a[l])` for `l = i-1` down to `0`.
//!    Afterwards bit `a[i]` carries the phase `2π·a / 2^(i+1)`.
//! 2. Addition in the phase basis: adding `b_j·2^j` turns `a[i]` by
//!    `2π·2^j / 2^(i+1)`, which is `φ(180/2^(i-j))` on `(a[i], b[j])` for every
//!    `j ≤ i`. Pairs with `j > i` would turn by whole multiples of `2π` and
//!    are left out.
//! 3. Stage 1 in reverse order with every phase inverted.
//!
//! Only `H` is nontrivial, and there are `2n` of them.

use crate::error::{Error, Result};
use crate::model::{controlled_phase_named, hadamard, BasisState, Circuit, Operation, OperatorMatrix, Register};
use crate::qfile::CircuitBundle;

/// Largest addend width; `2n` bits must fit a [`BasisState`].
pub const MAX_ADDEND_BITS: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdderSpec {
    /// Bits per addend.
    pub n: u32,
    pub a_value: u64,
    pub b_value: u64,
}

impl AdderSpec {
    pub fn new(n: u32, a_value: u64, b_value: u64) -> Result<Self> {
        if n == 0 || n > MAX_ADDEND_BITS {
            return Err(Error::Range(format!("addend width {n} not in 1..={MAX_ADDEND_BITS}")));
        }
        for (name, v) in [("a", a_value), ("b", b_value)] {
            if v >> n != 0 {
                return Err(Error::Range(format!("{name} = {v} does not fit in {n} bits")));
            }
        }
        Ok(Self { n, a_value, b_value })
    }

    /// `3n(n+1)/2`.
    pub fn op_count(&self) -> usize {
        let n = self.n as usize;
        3 * n * (n + 1) / 2
    }

    pub fn expected_sum(&self) -> u64 {
        let mask = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        self.a_value.wrapping_add(self.b_value) & mask
    }
}

/// Operator name for a controlled phase of `angle` degrees.
///
/// `180/2^d` is `cPi` for `d = 0` and `cPiOver<2^d>` otherwise; negative angles
/// get an `inv_` prefix, except `-180`, which is `cPi` again.
pub fn operator_name(angle: f64) -> Result<String> {
    let bad = || Error::Range(format!("{angle} degrees is not ±180/2^d"));
    if !angle.is_finite() || angle == 0.0 {
        return Err(bad());
    }
    let ratio = 180.0 / angle.abs();
    if ratio < 1.0 || ratio.fract() != 0.0 || ratio > 2f64.powi(63) {
        return Err(bad());
    }
    let denom = ratio as u64;
    if !denom.is_power_of_two() {
        return Err(bad());
    }
    if denom == 1 {
        return Ok("cPi".to_string());
    }
    let prefix = if angle < 0.0 { "inv_" } else { "" };
    Ok(format!("{prefix}cPiOver{denom}"))
}

fn phase_angle(d: u32) -> f64 {
    180.0 / 2f64.powi(d as i32)
}

/// Generates the adder circuit and its input state.
pub fn gen_draper(spec: &AdderSpec) -> Result<CircuitBundle> {
    let spec = AdderSpec::new(spec.n, spec.a_value, spec.b_value)?;
    let n = spec.n;

    // H, the forward phases φ(180/2^d) for d = 1..n, φ(180), then the inverses.
    let mut operators: Vec<OperatorMatrix> = vec![hadamard()];
    for d in 1..n {
        operators.push(controlled_phase_named(operator_name(phase_angle(d))?, phase_angle(d)));
    }
    let pi_gate = operators.len();
    operators.push(controlled_phase_named(operator_name(180.0)?, 180.0));
    for d in 1..n {
        operators.push(controlled_phase_named(operator_name(-phase_angle(d))?, -phase_angle(d)));
    }
    let forward = |d: u32| if d == 0 { pi_gate } else { d as usize };
    let inverse = |d: u32| if d == 0 { pi_gate } else { pi_gate + d as usize };

    let a = |i: u32| i;
    let b = |j: u32| n + j;

    let mut qft = Vec::new();
    for i in (0..n).rev() {
        qft.push(Operation::new(0, vec![a(i)]));
        for l in (0..i).rev() {
            qft.push(Operation::new(forward(i - l), vec![a(i), a(l)]));
        }
    }

    let mut ops = qft.clone();
    for i in (0..n).rev() {
        for j in (0..=i).rev() {
            ops.push(Operation::new(forward(i - j), vec![a(i), b(j)]));
        }
    }
    for op in qft.iter().rev() {
        let inv = if op.operator == 0 {
            0
        } else {
            let (i, l) = (op.operands[0], op.operands[1]);
            inverse(i - l)
        };
        ops.push(Operation::new(inv, op.operands.clone()));
    }
    debug_assert_eq!(ops.len(), spec.op_count());

    let registers = vec![Register::new("a", n, 0), Register::new("b", n, n)];
    let circuit = Circuit::new(2 * n, registers, operators, ops)?;
    let input = BasisState::new(spec.a_value | (spec.b_value << n), 2 * n)?;
    CircuitBundle::new(circuit, input)
}
