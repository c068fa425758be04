//! Decoder programs.
//!
//! An instruction is an opcode and a child-side flag. The stage printed in
//! the text form is redundant: it follows from a depth-first walk of the
//! instruction stream, which [`Program::walk`] performs and checks. The walk
//! also resolves each opcode to the operation it performs in context, since
//! `P-R1` and `P-RSPC` either finish a node whose left child is done (the
//! merged right-child form) or, issued right after a node is entered,
//! decode that node directly.
//!
//! Text form:
//!
//! ```text
//! # comment
//! N=8 k=3 P=1
//! F L stage=3
//! G-0R R stage=2
//! ```
//!
//! Binary form: five bits per instruction, the opcode in the low four bits
//! and the side (1 = right) in the fifth, packed least-significant bit first
//! into consecutive bytes.

use std::fmt;
use std::str::FromStr;

use crate::polar_code::{BitVec, CodeError, CodeSpec, Construction};

use super::CompileError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Opcode {
    F,
    G,
    Combine,
    Combine0R,
    G0R,
    PR1,
    PRSpc,
    P01,
    P0Spc,
    Ml,
    Rep,
    RepSpc,
}

impl Opcode {
    pub const ALL: [Opcode; 12] = [
        Opcode::F,
        Opcode::G,
        Opcode::Combine,
        Opcode::Combine0R,
        Opcode::G0R,
        Opcode::PR1,
        Opcode::PRSpc,
        Opcode::P01,
        Opcode::P0Spc,
        Opcode::Ml,
        Opcode::Rep,
        Opcode::RepSpc,
    ];

    /// Four-bit code.
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Opcode> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Opcode::F => "F",
            Opcode::G => "G",
            Opcode::Combine => "COMBINE",
            Opcode::Combine0R => "COMBINE-0R",
            Opcode::G0R => "G-0R",
            Opcode::PR1 => "P-R1",
            Opcode::PRSpc => "P-RSPC",
            Opcode::P01 => "P-01",
            Opcode::P0Spc => "P-0SPC",
            Opcode::Ml => "ML",
            Opcode::Rep => "REP",
            Opcode::RepSpc => "REP-SPC",
        }
    }
}

impl fmt::Display for Opcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

impl FromStr for Opcode {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.iter().copied().find(|op| op.mnemonic() == s).ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn letter(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Instruction {
    pub opcode: Opcode,
    pub side: Side,
    /// `log2` of the length of the node the instruction operates on.
    pub stage: u8,
}

impl Instruction {
    pub fn new(opcode: Opcode, side: Side, stage: u32) -> Self {
        Self {
            opcode,
            side,
            stage: stage as u8,
        }
    }

    /// The five stored bits.
    pub fn encode(&self) -> u8 {
        self.opcode.code() | ((self.side == Side::Right) as u8) << 4
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} stage={}", self.opcode, self.side.letter(), self.stage)
    }
}

/// What an instruction does at its place in the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    /// Left-child input by `f`.
    F,
    /// Right-child input by `g`.
    G,
    /// Right-child input by `g` with a zero left decision.
    G0,
    Combine,
    /// Combine with a zero left decision.
    Combine0,
    /// `g`, threshold decision, combine.
    MergedRate1,
    /// `g`, SPC decoding, combine.
    MergedSpc,
    /// Merged rate-1 right child under a rate-0 left child.
    Zero1,
    /// Merged SPC right child under a rate-0 left child.
    ZeroSpc,
    /// Threshold decision of a rate-1 node.
    Rate1,
    Spc,
    Rep,
    RepSpc,
    Ml4,
}

/// One resolved step of a program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub action: Action,
    /// Stage of the node the step belongs to.
    pub stage: u32,
    pub side: Side,
    /// Natural index of that node's first leaf.
    pub offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Entered,
    InLeft,
    LeftDone,
    InRight { left_zero: bool },
    RightDone { left_zero: bool },
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    stage: u32,
    offset: usize,
    side: Side,
    phase: Phase,
}

/// A compiled decoder program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    n_bits: u32,
    k: usize,
    p: usize,
    instructions: Vec<Instruction>,
}

impl Program {
    pub fn new(n_bits: u32, k: usize, p: usize, instructions: Vec<Instruction>) -> Self {
        Self {
            n_bits,
            k,
            p,
            instructions,
        }
    }

    pub fn n_bits(&self) -> u32 {
        self.n_bits
    }

    pub fn n(&self) -> usize {
        1 << self.n_bits
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Resource parameter: at most `2P` values are accessed per step.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Walks the program as a depth-first traversal and resolves every
    /// instruction. Fails on the first instruction whose opcode, side or
    /// stage does not fit the traversal, or if the traversal is left
    /// incomplete. An empty program is the traversal of a rate-0 root.
    pub fn walk(&self) -> Result<Vec<Step>, CompileError> {
        let mut steps = Vec::with_capacity(self.instructions.len());
        if self.instructions.is_empty() {
            return Ok(steps);
        }
        let mut stack = vec![Frame {
            stage: self.n_bits,
            offset: 0,
            side: Side::Left,
            phase: Phase::Entered,
        }];
        for (pc, ins) in self.instructions.iter().enumerate() {
            let err = |msg: String| CompileError::Walk { pc, msg };
            let top = match stack.last_mut() {
                Some(t) => t,
                None => return Err(err(format!("'{ins}' after the root was decoded"))),
            };
            let s = top.stage;
            if ins.stage as u32 != s {
                return Err(err(format!("'{ins}' where stage {s} was expected")));
            }
            use Opcode::*;
            let (action, min_stage) = match (top.phase, ins.opcode) {
                (Phase::Entered, F) => (Action::F, 1),
                (Phase::Entered, G0R) => (Action::G0, 2),
                (Phase::Entered, P01) => (Action::Zero1, 1),
                (Phase::Entered, P0Spc) => (Action::ZeroSpc, 2),
                (Phase::Entered, PR1) => (Action::Rate1, 0),
                (Phase::Entered, PRSpc) => (Action::Spc, 1),
                (Phase::Entered, Rep) => (Action::Rep, 1),
                (Phase::Entered, RepSpc) => (Action::RepSpc, 3),
                (Phase::Entered, Ml) => (Action::Ml4, 2),
                (Phase::LeftDone, G) => (Action::G, 1),
                (Phase::LeftDone, PR1) => (Action::MergedRate1, 1),
                (Phase::LeftDone, PRSpc) => (Action::MergedSpc, 2),
                (Phase::RightDone { left_zero: false }, Combine) => (Action::Combine, 1),
                (Phase::RightDone { left_zero: true }, Combine0R) => (Action::Combine0, 1),
                (phase, op) => return Err(err(format!("{op} cannot follow {phase:?} at stage {s}"))),
            };
            if s < min_stage || (action == Action::RepSpc && s != 3) || (action == Action::Ml4 && s != 2) {
                return Err(err(format!("{} is not valid at stage {s}", ins.opcode)));
            }
            let expected_side = match action {
                Action::F => Side::Left,
                Action::G | Action::G0 => Side::Right,
                _ => top.side,
            };
            if ins.side != expected_side {
                return Err(err(format!("'{ins}' should be on side {}", expected_side.letter())));
            }
            steps.push(Step {
                action,
                stage: s,
                side: top.side,
                offset: top.offset,
            });
            let half = 1usize << s.saturating_sub(1);
            match action {
                Action::F => {
                    top.phase = Phase::InLeft;
                    let child = Frame {
                        stage: s - 1,
                        offset: top.offset,
                        side: Side::Left,
                        phase: Phase::Entered,
                    };
                    stack.push(child);
                }
                Action::G | Action::G0 => {
                    top.phase = Phase::InRight {
                        left_zero: action == Action::G0,
                    };
                    let child = Frame {
                        stage: s - 1,
                        offset: top.offset + half,
                        side: Side::Right,
                        phase: Phase::Entered,
                    };
                    stack.push(child);
                }
                _ => {
                    stack.pop();
                    if let Some(parent) = stack.last_mut() {
                        parent.phase = match parent.phase {
                            Phase::InLeft => Phase::LeftDone,
                            Phase::InRight { left_zero } => Phase::RightDone { left_zero },
                            other => unreachable!("parent in phase {other:?}"),
                        };
                    }
                }
            }
        }
        if !stack.is_empty() {
            return Err(CompileError::Incomplete { depth: stack.len() });
        }
        Ok(steps)
    }

    /// Natural-order frozen mask implied by the program.
    pub fn natural_frozen_mask(&self) -> Result<BitVec, CompileError> {
        let mut frozen = BitVec::repeat(true, self.n());
        let mut open = |from: usize, to: usize| frozen[from..to].fill(false);
        for st in self.walk()? {
            let len = 1usize << st.stage;
            let (o, h) = (st.offset, len / 2);
            match st.action {
                Action::Rate1 => open(o, o + len),
                Action::Spc => open(o + 1, o + len),
                Action::Rep => open(o + len - 1, o + len),
                Action::RepSpc => {
                    open(o + 3, o + 4);
                    open(o + 5, o + 8);
                }
                Action::Ml4 => open(o + 2, o + 4),
                Action::MergedRate1 | Action::Zero1 => open(o + h, o + len),
                Action::MergedSpc | Action::ZeroSpc => open(o + h + 1, o + len),
                Action::F | Action::G | Action::G0 | Action::Combine | Action::Combine0 => {}
            }
        }
        Ok(frozen)
    }

    /// The code the program decodes.
    pub fn code_spec(&self) -> Result<CodeSpec, CompileError> {
        let spec = CodeSpec::from_natural_mask(&self.natural_frozen_mask()?, Construction::Custom)?;
        if spec.k() != self.k {
            return Err(CompileError::Code(CodeError::InvalidDimension {
                k: self.k,
                n: self.n(),
            }));
        }
        Ok(spec)
    }

    /// Text form, parsed back by [`Program::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# {} instructions\nN={} k={} P={}\n",
            self.len(),
            self.n(),
            self.k,
            self.p
        );
        for ins in &self.instructions {
            out.push_str(&ins.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Program, CompileError> {
        let err = |line: usize, msg: String| CompileError::Parse { line, msg };
        let mut header: Option<(u32, usize, usize)> = None;
        let mut instructions = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            if header.is_none() {
                header = Some(parse_header(content).map_err(|m| err(line, m))?);
                continue;
            }
            let mut tok = content.split_whitespace();
            let (Some(op), Some(side), Some(stage), None) = (tok.next(), tok.next(), tok.next(), tok.next()) else {
                return Err(err(
                    line,
                    format!("expected '<OPCODE> <L|R> stage=<s>', got '{content}'"),
                ));
            };
            let opcode: Opcode = op.parse().map_err(|_| err(line, format!("unknown opcode '{op}'")))?;
            let side = match side {
                "L" => Side::Left,
                "R" => Side::Right,
                other => return Err(err(line, format!("side must be L or R, got '{other}'"))),
            };
            let stage: u8 = stage
                .strip_prefix("stage=")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(line, format!("invalid stage field '{stage}'")))?;
            instructions.push(Instruction { opcode, side, stage });
        }
        let (n_bits, k, p) = header.ok_or_else(|| err(0, "missing 'N=.. k=.. P=..' header".into()))?;
        Ok(Program::new(n_bits, k, p, instructions))
    }

    /// Packed five-bit form of the instruction stream.
    pub fn to_binary(&self) -> Vec<u8> {
        let mut bits = BitVec::with_capacity(5 * self.len());
        for ins in &self.instructions {
            let code = ins.encode();
            for b in 0..5 {
                bits.push((code >> b) & 1 == 1);
            }
        }
        let mut bytes = vec![0u8; bits.len().div_ceil(8)];
        for i in bits.iter_ones() {
            bytes[i / 8] |= 1 << (i % 8);
        }
        bytes
    }

    /// Rebuilds a program from its packed form, recovering the stages by
    /// walking the instruction stream.
    pub fn from_binary(bytes: &[u8], count: usize, n_bits: u32, k: usize, p: usize) -> Result<Program, CompileError> {
        if bytes.len() * 8 < count * 5 {
            return Err(CompileError::Parse {
                line: 0,
                msg: format!("{} bytes cannot hold {count} instructions", bytes.len()),
            });
        }
        let mut instructions = Vec::with_capacity(count);
        // stages follow from the opcodes alone: descend on F/G/G-0R, stay
        // on node-decoding instructions, and climb after a node completes
        let mut stage = n_bits;
        let mut pending: Vec<bool> = Vec::new();
        for i in 0..count {
            let code = (0..5).fold(0u8, |acc, b| {
                let bit = i * 5 + b;
                acc | (((bytes[bit / 8] >> (bit % 8)) & 1) << b)
            });
            let opcode = Opcode::from_code(code & 0xF).ok_or_else(|| CompileError::Walk {
                pc: i,
                msg: format!("invalid opcode code {}", code & 0xF),
            })?;
            let side = if code & 0x10 != 0 { Side::Right } else { Side::Left };
            instructions.push(Instruction::new(opcode, side, stage));
            match opcode {
                Opcode::F | Opcode::G | Opcode::G0R => {
                    pending.push(true);
                    stage = stage.saturating_sub(1);
                }
                _ => {
                    // a completed node returns control to its parent
                    if pending.pop().is_some() {
                        stage += 1;
                    }
                }
            }
        }
        let program = Program::new(n_bits, k, p, instructions);
        program.walk()?;
        Ok(program)
    }
}

fn parse_header(content: &str) -> Result<(u32, usize, usize), String> {
    let mut n = None;
    let mut k = None;
    let mut p = None;
    for field in content.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| format!("expected header 'N=.. k=.. P=..', got '{content}'"))?;
        let value: usize = value.parse().map_err(|_| format!("invalid header value '{field}'"))?;
        match key {
            "N" => n = Some(value),
            "k" => k = Some(value),
            "P" => p = Some(value),
            _ => return Err(format!("unknown header field '{key}'")),
        }
    }
    let (Some(n), Some(k), Some(p)) = (n, k, p) else {
        return Err(format!("header must give N, k and P, got '{content}'"));
    };
    if !n.is_power_of_two() || n < 2 {
        return Err(format!("N={n} is not a power of two"));
    }
    if k > n {
        return Err(format!("k={k} exceeds N={n}"));
    }
    if p == 0 || !p.is_power_of_two() {
        return Err(format!("P={p} is not a power of two"));
    }
    Ok((n.trailing_zeros(), k, p))
}
