//! Basis states, amplitudes, operator matrices and circuits.
//!
//! Bit conventions used throughout the crate:
//!
//! * A [`BasisState`] of width `s` stores bit `k` of the machine in bit `k` of
//!   a `u64`. Its textual form lists bit `s-1` first, so `00010001` has bits 0
//!   and 4 set.
//! * For an operation on operands `[q0, q1, ..., q(m-1)]`, the *local index*
//!   of a state is the `m`-bit number whose most significant bit is the bit at
//!   `q0` and whose least significant bit is the bit at `q(m-1)`. Operator
//!   matrices are indexed by local index, so the first-listed operand is the
//!   first tensor factor.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex amplitude of a basis state.
pub type ComplexAmp = Complex64;

/// Widest machine a [`BasisState`] can label.
pub const MAX_WIDTH: u32 = 64;

/// Widest operator, in bits. Keeps a neighborhood at 16 states.
pub const MAX_ARITY: u32 = 4;

/// Tolerance below which an off-diagonal entry counts as zero.
pub const TRIVIAL_TOL: f64 = 1e-12;

/// Tolerance for `‖M·M† − I‖_max` when accepting an operator.
pub const UNITARY_TOL: f64 = 1e-9;

/// A computational-basis label: a `width`-bit classical pattern.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    bits: u64,
    width: u32,
}

impl BasisState {
    pub fn new(bits: u64, width: u32) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::Range(format!("state width {width} not in 1..={MAX_WIDTH}")));
        }
        if bits & !width_mask(width) != 0 {
            return Err(Error::Range(format!("bit pattern {bits:#x} does not fit in {width} bits")));
        }
        Ok(Self { bits, width })
    }

    pub fn zero(width: u32) -> Result<Self> {
        Self::new(0, width)
    }

    /// Parses a string of `0`/`1` characters, most significant bit first.
    pub fn parse_bits(text: &str, width: u32) -> Result<Self> {
        let text = text.trim();
        if text.len() != width as usize {
            return Err(Error::Range(format!(
                "state literal `{text}` has {} characters, expected {width}",
                text.len()
            )));
        }
        let mut bits = 0u64;
        for c in text.chars() {
            bits <<= 1;
            match c {
                '0' => {}
                '1' => bits |= 1,
                _ => return Err(Error::Range(format!("state literal `{text}` contains `{c}`"))),
            }
        }
        Self::new(bits, width)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn width(self) -> u32 {
        self.width
    }

    #[inline]
    pub fn bit(self, pos: u32) -> bool {
        (self.bits >> pos) & 1 == 1
    }

    /// Same width, different pattern. The caller guarantees `bits` fits.
    #[inline]
    pub(crate) fn with_bits(self, bits: u64) -> Self {
        debug_assert_eq!(bits & !width_mask(self.width), 0);
        Self { bits, width: self.width }
    }

    /// Value of `len` bits starting at `offset`, bit `offset` least significant.
    pub fn field(self, offset: u32, len: u32) -> u64 {
        (self.bits >> offset) & width_mask(len)
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for pos in (0..self.width).rev() {
            f.write_str(if self.bit(pos) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BasisState({self})")
    }
}

#[inline]
pub(crate) fn width_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Gathers the operand bits of `bits` into a local index, first operand most significant.
#[inline]
pub(crate) fn gather(bits: u64, operands: &[u32]) -> usize {
    let mut idx = 0usize;
    for &q in operands {
        idx = (idx << 1) | ((bits >> q) & 1) as usize;
    }
    idx
}

/// Inverse of [`gather`]: overwrites the operand bits of `bits` with `local`.
#[inline]
pub(crate) fn scatter(bits: u64, operands: &[u32], local: usize) -> u64 {
    let m = operands.len();
    let mut out = bits;
    for (k, &q) in operands.iter().enumerate() {
        let b = ((local >> (m - 1 - k)) & 1) as u64;
        out = (out & !(1u64 << q)) | (b << q);
    }
    out
}

fn check_operands(state: BasisState, operands: &[u32]) -> Result<()> {
    if operands.len() > MAX_ARITY as usize {
        return Err(Error::Range(format!("{} operands exceeds arity cap {MAX_ARITY}", operands.len())));
    }
    for &q in operands {
        if q >= state.width {
            return Err(Error::Range(format!("operand bit {q} outside {}-bit state", state.width)));
        }
    }
    Ok(())
}

/// Local index of `state` with respect to `operands`.
pub fn local_index(state: BasisState, operands: &[u32]) -> Result<usize> {
    check_operands(state, operands)?;
    Ok(gather(state.bits, operands))
}

/// `state` with its operand bits replaced by the bits of `local`.
pub fn with_local_index(state: BasisState, operands: &[u32], local: usize) -> Result<BasisState> {
    check_operands(state, operands)?;
    if local >> operands.len() != 0 {
        return Err(Error::Range(format!("local index {local} does not fit {} operand bits", operands.len())));
    }
    Ok(state.with_bits(scatter(state.bits, operands, local)))
}

/// A named `2^m × 2^m` unitary acting on `m` bits.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    name: String,
    arity: u32,
    entries: Vec<ComplexAmp>,
    trivial: bool,
}

impl OperatorMatrix {
    /// Builds an operator from row-major entries, rejecting non-unitary input.
    pub fn new(name: impl Into<String>, arity: u32, entries: Vec<ComplexAmp>) -> Result<Self> {
        let op = Self::new_unchecked(name, arity, entries)?;
        if !check_unitary(&op, UNITARY_TOL) {
            return Err(Error::InvalidOperator {
                name: op.name,
                reason: format!("not unitary within {UNITARY_TOL:e}"),
            });
        }
        Ok(op)
    }

    /// Like [`OperatorMatrix::new`] but skips the unitarity check; shape is still validated.
    pub fn new_unchecked(name: impl Into<String>, arity: u32, entries: Vec<ComplexAmp>) -> Result<Self> {
        let name = name.into();
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::InvalidOperator { name, reason: format!("arity {arity} not in 1..={MAX_ARITY}") });
        }
        let dim = 1usize << arity;
        if entries.len() != dim * dim {
            return Err(Error::InvalidOperator {
                name,
                reason: format!("{} entries for a {dim}x{dim} matrix", entries.len()),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidOperator { name, reason: "non-finite entry".into() });
        }
        let trivial = (0..dim)
            .flat_map(|r| (0..dim).map(move |c| (r, c)))
            .filter(|(r, c)| r != c)
            .all(|(r, c)| entries[r * dim + c].norm() <= TRIVIAL_TOL);
        Ok(Self { name, arity, entries, trivial })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    /// Diagonal in the computational basis (off-diagonals ≤ 1e-12).
    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    pub fn entries(&self) -> &[ComplexAmp] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> ComplexAmp {
        self.entries[row * self.dim() + col]
    }
}

/// The Hadamard gate `[[1, 1], [1, -1]] / √2`.
pub fn hadamard() -> OperatorMatrix {
    let h = ComplexAmp::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    OperatorMatrix::new_unchecked("H", 1, vec![h, h, h, -h]).expect("well-formed")
}

/// `exp(iπ·deg/180)`, exact at multiples of 90 degrees.
pub fn phase_factor(deg: f64) -> ComplexAmp {
    let turn = deg.rem_euclid(360.0);
    if turn == 0.0 {
        ComplexAmp::new(1.0, 0.0)
    } else if turn == 90.0 {
        ComplexAmp::new(0.0, 1.0)
    } else if turn == 180.0 {
        ComplexAmp::new(-1.0, 0.0)
    } else if turn == 270.0 {
        ComplexAmp::new(0.0, -1.0)
    } else {
        let (s, c) = deg.to_radians().sin_cos();
        ComplexAmp::new(c, s)
    }
}

/// Controlled phase rotation by `deg` degrees: `diag(1, 1, 1, e^{iπ·deg/180})`.
///
/// Named `phi_<deg>` with `-` spelled `m` and `.` spelled `p`, so the name is a
/// valid identifier in operator files: `phi_90`, `phi_m22p5`.
pub fn controlled_phase(deg: f64) -> OperatorMatrix {
    let label: String = deg
        .to_string()
        .chars()
        .map(|c| match c {
            '-' => 'm',
            '.' => 'p',
            c => c,
        })
        .collect();
    controlled_phase_named(format!("phi_{label}"), deg)
}

pub fn controlled_phase_named(name: impl Into<String>, deg: f64) -> OperatorMatrix {
    let zero = ComplexAmp::new(0.0, 0.0);
    let one = ComplexAmp::new(1.0, 0.0);
    let mut entries = vec![zero; 16];
    entries[0] = one;
    entries[5] = one;
    entries[10] = one;
    entries[15] = phase_factor(deg);
    OperatorMatrix::new_unchecked(name, 2, entries).expect("well-formed")
}

/// True iff `max |(M·M† − I)[r][c]| ≤ tol`.
pub fn check_unitary(m: &OperatorMatrix, tol: f64) -> bool {
    let dim = m.dim();
    for r in 0..dim {
        for c in 0..dim {
            let mut acc = ComplexAmp::new(0.0, 0.0);
            for k in 0..dim {
                acc += m.get(r, k) * m.get(c, k).conj();
            }
            if r == c {
                acc -= 1.0;
            }
            if acc.norm().is_nan() || acc.norm() > tol {
                return false;
            }
        }
    }
    true
}

/// One gate instance: an operator applied to an ordered list of bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    /// Index into [`Circuit::operators`].
    pub operator: usize,
    pub operands: Vec<u32>,
}

impl Operation {
    pub fn new(operator: usize, operands: Vec<u32>) -> Self {
        Self { operator, operands }
    }
}

/// A named contiguous bit field of the machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub width: u32,
    pub offset: u32,
}

impl Register {
    pub fn new(name: impl Into<String>, width: u32, offset: u32) -> Self {
        Self { name: name.into(), width, offset }
    }

    fn overlaps(&self, other: &Register) -> bool {
        self.offset < other.offset + other.width && other.offset < self.offset + self.width
    }
}

/// A complete, validated circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    width: u32,
    registers: Vec<Register>,
    operators: Vec<OperatorMatrix>,
    ops: Vec<Operation>,
}

impl Circuit {
    pub fn new(
        width: u32,
        registers: Vec<Register>,
        operators: Vec<OperatorMatrix>,
        ops: Vec<Operation>,
    ) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::InvalidCircuit(format!("width {width} not in 1..={MAX_WIDTH}")));
        }
        validate_registers(width, &registers).map_err(Error::InvalidCircuit)?;
        for (k, op) in ops.iter().enumerate() {
            let Some(m) = operators.get(op.operator) else {
                return Err(Error::InvalidCircuit(format!("operation #{k}: no operator {}", op.operator)));
            };
            if op.operands.len() != m.arity() as usize {
                return Err(Error::InvalidCircuit(format!(
                    "operation #{k}: operator {} takes {} bits, given {}",
                    m.name(),
                    m.arity(),
                    op.operands.len()
                )));
            }
            for (i, &q) in op.operands.iter().enumerate() {
                if q >= width {
                    return Err(Error::InvalidCircuit(format!("operation #{k}: bit {q} outside width {width}")));
                }
                if op.operands[..i].contains(&q) {
                    return Err(Error::InvalidCircuit(format!("operation #{k}: bit {q} repeated")));
                }
            }
        }
        Ok(Self { width, registers, operators, ops })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn operators(&self) -> &[OperatorMatrix] {
        &self.operators
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn operator_of(&self, op: &Operation) -> &OperatorMatrix {
        &self.operators[op.operator]
    }

    pub fn nontrivial_count(&self) -> usize {
        self.ops.iter().filter(|op| !self.operator_of(op).is_trivial()).count()
    }
}

/// Checks register names, bounds and disjointness. Errors are plain messages.
pub(crate) fn validate_registers(width: u32, registers: &[Register]) -> std::result::Result<(), String> {
    for (i, r) in registers.iter().enumerate() {
        if r.width == 0 {
            return Err(format!("register {} has zero width", r.name));
        }
        if r.offset as u64 + r.width as u64 > width as u64 {
            return Err(format!("register {}[{}] @ {} exceeds circuit width {width}", r.name, r.width, r.offset));
        }
        for prev in &registers[..i] {
            if prev.name == r.name {
                return Err(format!("duplicate register {}", r.name));
            }
            if prev.overlaps(r) {
                return Err(format!("register {} overlaps register {}", r.name, prev.name));
            }
        }
    }
    Ok(())
}
