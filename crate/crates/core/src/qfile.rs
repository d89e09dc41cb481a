//! Reader and writer for the four-file circuit description.
//!
//! A bundle is four ASCII files:
//!
//! * `qconfig.txt` declares the machine width and named registers,
//! * `qinput.txt` gives the decimal value of each input register,
//! * `qoperators.txt` defines the operator matrices,
//! * `qopseq.txt` lists the operations in order.
//!
//! Each file starts with `<file name> format version 1`. Blank lines and lines
//! starting with `comment:` are skipped, whitespace between tokens is free, and
//! every keyword may be shortened to any prefix of at least four letters.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, ParseError, Result};
use crate::model::{
    validate_registers, BasisState, Circuit, ComplexAmp, Operation, OperatorMatrix, Register, MAX_ARITY, MAX_WIDTH,
};
use crate::numfmt::{format_complex, FILE_DIGITS};

pub const QCONFIG: &str = "qconfig.txt";
pub const QINPUT: &str = "qinput.txt";
pub const QOPERATORS: &str = "qoperators.txt";
pub const QOPSEQ: &str = "qopseq.txt";

const FORMAT_VERSION: u64 = 1;
const ARITY_WORDS: [&str; 4] = ["unary", "binary", "ternary", "quaternary"];

/// A circuit together with its classical input state.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitBundle {
    pub circuit: Circuit,
    pub input: BasisState,
    /// Where the bundle was read from, if it came from disk.
    pub source_paths: Option<BundlePaths>,
}

impl CircuitBundle {
    pub fn new(circuit: Circuit, input: BasisState) -> Result<Self> {
        if input.width() != circuit.width() {
            return Err(Error::InvalidCircuit(format!(
                "input has {} bits, circuit has {}",
                input.width(),
                circuit.width()
            )));
        }
        Ok(Self { circuit, input, source_paths: None })
    }

    /// Value of a named register in the input state.
    pub fn input_register(&self, name: &str) -> Option<u64> {
        let r = self.circuit.register(name)?;
        Some(self.input.field(r.offset, r.width))
    }
}

/// Paths of the four files of a bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundlePaths {
    pub qconfig: PathBuf,
    pub qinput: PathBuf,
    pub qoperators: PathBuf,
    pub qopseq: PathBuf,
}

impl BundlePaths {
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        Self {
            qconfig: dir.join(QCONFIG),
            qinput: dir.join(QINPUT),
            qoperators: dir.join(QOPERATORS),
            qopseq: dir.join(QOPSEQ),
        }
    }
}

/// The text of the four files.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BundleText {
    pub qconfig: String,
    pub qinput: String,
    pub qoperators: String,
    pub qopseq: String,
}

impl BundleText {
    pub fn read(paths: &BundlePaths) -> Result<Self> {
        let read =
            |p: &Path| std::fs::read_to_string(p).map_err(|source| Error::Io { path: p.display().to_string(), source });
        Ok(Self {
            qconfig: read(&paths.qconfig)?,
            qinput: read(&paths.qinput)?,
            qoperators: read(&paths.qoperators)?,
            qopseq: read(&paths.qopseq)?,
        })
    }

    pub fn write(&self, paths: &BundlePaths) -> Result<()> {
        for (p, text) in [
            (&paths.qconfig, &self.qconfig),
            (&paths.qinput, &self.qinput),
            (&paths.qoperators, &self.qoperators),
            (&paths.qopseq, &self.qopseq),
        ] {
            std::fs::write(p, text).map_err(|source| Error::Io { path: p.display().to_string(), source })?;
        }
        Ok(())
    }
}

/// Non-fatal findings, such as out-of-sequence operation numbers.
pub type Warnings = Vec<ParseError>;

/// Parses all four files into a validated bundle.
pub fn parse_bundle(text: &BundleText) -> Result<(CircuitBundle, Warnings)> {
    let (width, registers) = parse_qconfig(&text.qconfig)?;
    let input = parse_qinput(&text.qinput, width, &registers)?;
    let operators = parse_qoperators(&text.qoperators)?;
    let (ops, warnings) = parse_qopseq(&text.qopseq, width, &registers, &operators)?;
    let circuit = Circuit::new(width, registers, operators, ops)?;
    Ok((CircuitBundle::new(circuit, input)?, warnings))
}

pub fn load(paths: &BundlePaths) -> Result<(CircuitBundle, Warnings)> {
    let text = BundleText::read(paths)?;
    let (mut bundle, warnings) = parse_bundle(&text)?;
    bundle.source_paths = Some(paths.clone());
    Ok((bundle, warnings))
}

pub fn load_dir(dir: impl AsRef<Path>) -> Result<(CircuitBundle, Warnings)> {
    load(&BundlePaths::in_dir(dir))
}

pub fn write_dir(bundle: &CircuitBundle, dir: impl AsRef<Path>) -> Result<BundlePaths> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
    let paths = BundlePaths::in_dir(dir);
    serialize_bundle(bundle).write(&paths)?;
    Ok(paths)
}

// ---------------------------------------------------------------------------
// Lexing

struct Line<'a> {
    no: usize,
    text: &'a str,
}

/// Significant lines: non-blank and not `comment:` lines. CR before LF is dropped.
fn significant_lines(text: &str) -> Vec<Line<'_>> {
    text.split('\n')
        .enumerate()
        .map(|(i, l)| Line { no: i + 1, text: l.strip_suffix('\r').unwrap_or(l) })
        .filter(|l| !l.text.trim().is_empty() && !is_comment(l.text))
        .collect()
}

fn is_comment(text: &str) -> bool {
    let mut c = Cursor { file: "", line: 0, rest: text };
    c.keyword("comment").is_ok() && c.punct(':').is_ok()
}

fn keyword_matches(token: &str, full: &str) -> bool {
    token == full || (token.len() >= 4 && full.starts_with(token))
}

struct Cursor<'a> {
    file: &'a str,
    line: usize,
    rest: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(file: &'a str, line: &Line<'a>) -> Self {
        Self { file, line: line.no, rest: line.text }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.file, self.line, msg)
    }

    fn ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        self.ws();
        let end = self.rest.find(|c: char| !pred(c)).unwrap_or(self.rest.len());
        let (tok, rest) = self.rest.split_at(end);
        self.rest = rest;
        tok
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.rest.chars().next()
    }

    fn word(&mut self) -> &'a str {
        self.take_while(|c| c.is_ascii_alphabetic())
    }

    fn keyword(&mut self, full: &str) -> Result<(), ParseError> {
        let tok = self.word();
        if keyword_matches(tok, full) {
            Ok(())
        } else if tok.is_empty() {
            Err(self.err(format!("expected `{full}`")))
        } else {
            Err(self.err(format!("expected `{full}`, found `{tok}`")))
        }
    }

    fn punct(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.rest = &self.rest[c.len_utf8()..];
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn uint(&mut self) -> Result<u64, ParseError> {
        let tok = self.take_while(|c| c.is_ascii_digit());
        tok.parse().map_err(|_| self.err("expected an unsigned integer"))
    }

    fn ident(&mut self) -> Result<&'a str, ParseError> {
        self.ws();
        if !self.rest.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
            return Err(self.err("expected a name"));
        }
        Ok(self.take_while(|c| c.is_ascii_alphanumeric() || c == '_'))
    }

    fn file_name(&mut self) -> &'a str {
        self.take_while(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
    }

    fn real(&mut self) -> Result<f64, ParseError> {
        let mut sign = 1.0;
        match self.peek() {
            Some('-') => {
                sign = -1.0;
                self.rest = &self.rest[1..];
            }
            Some('+') => self.rest = &self.rest[1..],
            _ => {}
        }
        self.ws();
        let bytes = self.rest.as_bytes();
        let mut end = 0;
        let digits = |end: &mut usize| {
            let start = *end;
            while *end < bytes.len() && bytes[*end].is_ascii_digit() {
                *end += 1;
            }
            *end - start
        };
        let mut n = digits(&mut end);
        if end < bytes.len() && bytes[end] == b'.' {
            end += 1;
            n += digits(&mut end);
        }
        if n == 0 {
            return Err(self.err("expected a number"));
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut e = end + 1;
            if e < bytes.len() && (bytes[e] == b'+' || bytes[e] == b'-') {
                e += 1;
            }
            let before = e;
            while e < bytes.len() && bytes[e].is_ascii_digit() {
                e += 1;
            }
            if e > before {
                end = e;
            }
        }
        let (tok, rest) = self.rest.split_at(end);
        self.rest = rest;
        let v: f64 = tok.parse().map_err(|_| self.err(format!("bad number `{tok}`")))?;
        Ok(sign * v)
    }

    /// `( REAL ('+'|'-') i* REAL )`
    fn complex(&mut self) -> Result<ComplexAmp, ParseError> {
        self.punct('(')?;
        let re = self.real()?;
        let sign = match self.peek() {
            Some('+') => 1.0,
            Some('-') => -1.0,
            _ => return Err(self.err("expected `+` or `-` in complex literal")),
        };
        self.rest = &self.rest[1..];
        self.punct('i')?;
        self.punct('*')?;
        let im = self.real()?;
        self.punct(')')?;
        Ok(ComplexAmp::new(re, sign * im))
    }

    fn at_end(&mut self) -> bool {
        self.ws();
        self.rest.is_empty()
    }

    fn end(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err(format!("unexpected trailing text `{}`", self.rest)))
        }
    }
}

struct Lines<'a> {
    file: &'a str,
    lines: Vec<Line<'a>>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(file: &'a str, text: &'a str) -> Self {
        Self { file, lines: significant_lines(text), pos: 0 }
    }

    fn next(&mut self, what: &str) -> Result<Cursor<'a>, ParseError> {
        match self.lines.get(self.pos) {
            Some(line) => {
                self.pos += 1;
                Ok(Cursor::new(self.file, line))
            }
            None => Err(ParseError::new(self.file, 0, format!("unexpected end of file, expected {what}"))),
        }
    }

    fn has_more(&self) -> bool {
        self.pos < self.lines.len()
    }

    fn version(&mut self) -> Result<(), ParseError> {
        let mut c = self.next("format version line")?;
        let name = c.file_name();
        if !name.eq_ignore_ascii_case(self.file) {
            return Err(c.err(format!("expected `{} format version {FORMAT_VERSION}`", self.file)));
        }
        c.keyword("format")?;
        c.keyword("version")?;
        let v = c.uint()?;
        c.end()?;
        if v != FORMAT_VERSION {
            return Err(c.err(format!("unsupported format version {v} (only {FORMAT_VERSION} is known)")));
        }
        Ok(())
    }

    /// `KEYWORD: N`
    fn count(&mut self, keyword: &str) -> Result<(Cursor<'a>, u64), ParseError> {
        let mut c = self.next(&format!("`{keyword}:` line"))?;
        c.keyword(keyword)?;
        c.punct(':')?;
        let n = c.uint()?;
        c.end()?;
        Ok((c, n))
    }

    fn no_trailing(&mut self, what: &str) -> Result<(), ParseError> {
        if let Some(line) = self.lines.get(self.pos) {
            return Err(ParseError::new(self.file, line.no, format!("more {what} than declared")));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parsers

/// Machine width and register layout from `qconfig.txt`.
pub fn parse_qconfig(text: &str) -> Result<(u32, Vec<Register>), ParseError> {
    let mut lines = Lines::new(QCONFIG, text);
    lines.version()?;
    let (c, width) = lines.count("bits")?;
    if width == 0 || width > MAX_WIDTH as u64 {
        return Err(c.err(format!("bit count {width} not in 1..={MAX_WIDTH}")));
    }
    let width = width as u32;
    let mut registers = Vec::new();
    while lines.has_more() {
        let mut c = lines.next("register")?;
        c.keyword("named")?;
        c.keyword("bitarray")?;
        c.punct(':')?;
        let name = c.ident()?.to_string();
        c.punct('[')?;
        let w = c.uint()?;
        c.punct(']')?;
        c.punct('@')?;
        let offset = c.uint()?;
        c.end()?;
        if w > MAX_WIDTH as u64 || offset > MAX_WIDTH as u64 {
            return Err(c.err(format!("register {name}[{w}] @ {offset} exceeds circuit width {width}")));
        }
        registers.push(Register::new(name, w as u32, offset as u32));
        validate_registers(width, &registers).map_err(|m| c.err(m))?;
    }
    Ok((width, registers))
}

/// Input state from `qinput.txt`: `NAME: DECIMAL` per register, unset bits zero.
pub fn parse_qinput(text: &str, width: u32, registers: &[Register]) -> Result<BasisState, ParseError> {
    let mut lines = Lines::new(QINPUT, text);
    lines.version()?;
    let mut bits = 0u64;
    let mut seen: Vec<&str> = Vec::new();
    while lines.has_more() {
        let mut c = lines.next("register value")?;
        let name = c.ident()?;
        c.punct(':')?;
        let value = c.uint()?;
        c.end()?;
        let Some(reg) = registers.iter().find(|r| r.name == name) else {
            return Err(c.err(format!("unknown register `{name}`")));
        };
        if seen.contains(&name) {
            return Err(c.err(format!("register `{name}` assigned twice")));
        }
        seen.push(name);
        if reg.width < 64 && value >> reg.width != 0 {
            return Err(c.err(format!("value {value} does not fit in {}-bit register `{name}`", reg.width)));
        }
        bits |= value << reg.offset;
    }
    BasisState::new(bits, width).map_err(|e| ParseError::new(QINPUT, 0, e.to_string()))
}

/// Operator table from `qoperators.txt`. Each matrix is checked for unitarity.
pub fn parse_qoperators(text: &str) -> Result<Vec<OperatorMatrix>, ParseError> {
    let mut lines = Lines::new(QOPERATORS, text);
    lines.version()?;
    let (_, count) = lines.count("operators")?;
    let mut operators: Vec<OperatorMatrix> = Vec::new();
    for k in 0..count {
        let mut c = lines.next(&format!("operator #{k}"))?;
        c.keyword("operator")?;
        c.punct('#')?;
        c.punct(':')?;
        let idx = c.uint()?;
        c.end()?;
        if idx != k {
            return Err(c.err(format!("operator #{idx} out of sequence, expected #{k}")));
        }

        let mut c = lines.next("operator name")?;
        c.keyword("name")?;
        c.punct(':')?;
        let name = c.ident()?.to_string();
        c.end()?;
        let name_line = c.line;
        if operators.iter().any(|o| o.name() == name) {
            return Err(c.err(format!("duplicate operator `{name}`")));
        }

        let mut c = lines.next("operator size")?;
        c.keyword("size")?;
        c.punct(':')?;
        let arity = c.uint()?;
        c.keyword("bits")?;
        c.end()?;
        if arity == 0 || arity > MAX_ARITY as u64 {
            return Err(c.err(format!("operator `{name}`: size {arity} not in 1..={MAX_ARITY}")));
        }
        let dim = 1usize << arity;

        let mut c = lines.next("`matrix:`")?;
        c.keyword("matrix")?;
        c.punct(':')?;
        c.end()?;

        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            let mut c = lines.next(&format!("matrix row {r} of `{name}`"))?;
            let mut row = 0;
            while !c.at_end() {
                entries.push(c.complex()?);
                row += 1;
            }
            if row != dim {
                return Err(
                    c.err(format!("operator `{name}`: row {r} has {row} entries, a {arity}-bit operator needs {dim}"))
                );
            }
        }
        let op = OperatorMatrix::new(name.clone(), arity as u32, entries)
            .map_err(|e| ParseError::new(QOPERATORS, name_line, e.to_string()))?;
        operators.push(op);
    }
    lines.no_trailing("operators")?;
    Ok(operators)
}

/// Operation sequence from `qopseq.txt`.
///
/// Bits are written `reg[idx]`, or as a bare global bit number. Operation
/// numbers out of sequence are reported as warnings.
pub fn parse_qopseq(
    text: &str,
    width: u32,
    registers: &[Register],
    operators: &[OperatorMatrix],
) -> Result<(Vec<Operation>, Warnings), ParseError> {
    let mut lines = Lines::new(QOPSEQ, text);
    lines.version()?;
    let (_, count) = lines.count("operations")?;
    let mut ops = Vec::new();
    let mut warnings = Vec::new();
    for k in 0..count {
        let mut c = lines.next(&format!("operation #{k}"))?;
        c.keyword("operation")?;
        c.punct('#')?;
        let idx = c.uint()?;
        c.punct(':')?;
        if idx != k {
            warnings.push(c.err(format!("operation #{idx} out of sequence, expected #{k}")));
        }
        c.keyword("apply")?;
        let arity_tok = c.word();
        let Some(arity) = ARITY_WORDS.iter().position(|w| keyword_matches(arity_tok, w)) else {
            return Err(c.err(format!("unknown arity word `{arity_tok}`")));
        };
        let arity = arity + 1;
        c.keyword("operator")?;
        let name = c.ident()?;
        let Some(op_idx) = operators.iter().position(|o| o.name() == name) else {
            return Err(c.err(format!("unknown operator `{name}`")));
        };
        let m = &operators[op_idx];
        if m.arity() as usize != arity {
            return Err(c.err(format!(
                "`{}` operator `{name}` is {}",
                ARITY_WORDS[arity - 1],
                ARITY_WORDS[m.arity() as usize - 1]
            )));
        }
        c.keyword("to")?;
        c.keyword("bits")?;
        let mut operands = Vec::with_capacity(arity);
        loop {
            let bit = if c.peek().is_some_and(|ch| ch.is_ascii_digit()) {
                let q = c.uint()?;
                if q >= width as u64 {
                    return Err(c.err(format!("bit {q} outside {width}-bit machine")));
                }
                q as u32
            } else {
                let reg = c.ident()?;
                c.punct('[')?;
                let i = c.uint()?;
                c.punct(']')?;
                let Some(r) = registers.iter().find(|r| r.name == reg) else {
                    return Err(c.err(format!("unknown register `{reg}`")));
                };
                if i >= r.width as u64 {
                    return Err(c.err(format!("bit {reg}[{i}] outside {}-bit register", r.width)));
                }
                r.offset + i as u32
            };
            if operands.contains(&bit) {
                return Err(c.err(format!("bit {bit} used twice in one operation")));
            }
            operands.push(bit);
            if c.at_end() {
                break;
            }
            c.punct(',')?;
        }
        if operands.len() != arity {
            return Err(c.err(format!("operator `{name}` needs {arity} bits, given {}", operands.len())));
        }
        ops.push(Operation::new(op_idx, operands));
    }
    lines.no_trailing("operations")?;
    Ok((ops, warnings))
}

// ---------------------------------------------------------------------------
// Serializer

/// Renders a bundle as the four files, using full keywords and LF line endings.
pub fn serialize_bundle(bundle: &CircuitBundle) -> BundleText {
    let circuit = &bundle.circuit;

    let mut qconfig = format!("{QCONFIG} format version {FORMAT_VERSION}\nbits: {}\n", circuit.width());
    for r in circuit.registers() {
        writeln!(qconfig, "named bitarray: {}[{}] @ {}", r.name, r.width, r.offset).unwrap();
    }

    let mut qinput = format!("{QINPUT} format version {FORMAT_VERSION}\n");
    for r in circuit.registers() {
        writeln!(qinput, "{}: {}", r.name, bundle.input.field(r.offset, r.width)).unwrap();
    }

    let mut qoperators =
        format!("{QOPERATORS} format version {FORMAT_VERSION}\noperators: {}\n", circuit.operators().len());
    for (k, m) in circuit.operators().iter().enumerate() {
        writeln!(qoperators, "operator #: {k}\nname: {}\nsize: {} bits\nmatrix:", m.name(), m.arity()).unwrap();
        for r in 0..m.dim() {
            let row: Vec<String> = (0..m.dim()).map(|c| format_complex(m.get(r, c), FILE_DIGITS)).collect();
            writeln!(qoperators, "{}", row.join(" ")).unwrap();
        }
    }

    let mut qopseq = format!("{QOPSEQ} format version {FORMAT_VERSION}\noperations: {}\n", circuit.len());
    for (k, op) in circuit.ops().iter().enumerate() {
        let m = circuit.operator_of(op);
        let bits: Vec<String> = op.operands.iter().map(|&q| bit_ref(circuit.registers(), q)).collect();
        writeln!(
            qopseq,
            "operation #{k}: apply {} operator {} to bits {}",
            ARITY_WORDS[m.arity() as usize - 1],
            m.name(),
            bits.join(", ")
        )
        .unwrap();
    }

    BundleText { qconfig, qinput, qoperators, qopseq }
}

fn bit_ref(registers: &[Register], q: u32) -> String {
    registers
        .iter()
        .find(|r| q >= r.offset && q < r.offset + r.width)
        .map(|r| format!("{}[{}]", r.name, q - r.offset))
        .unwrap_or_else(|| q.to_string())
}
