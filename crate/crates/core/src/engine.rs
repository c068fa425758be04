//! Behavioral model of the Fast-SSC decoder.
//!
//! The engine executes a [`Program`] instruction by instruction. Operand
//! locations come from the stage alone: the input of a node at stage `s`
//! lives in `alpha[2^s .. 2^(s+1)]`, and its output goes to the same range
//! of the left or right β buffer depending on which child the node is. The
//! channel occupies the top stage, so all α storage fits in `2N` values.

use thiserror::Error;

use crate::kernels::{combine_into, f_into, g0_into, g_into, hd_into, ml4_into, rep_into, rep_spc_into, spc_into};
use crate::polar_code::{bit_reversal_table, BitVec, CodeError};
use crate::quantize::LlrDomain;
use crate::tree_compiler::{step_cycles, Action, CompileError, Program, Side, Step};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum EngineError {
    #[error("corrupt program: {0}")]
    Program(#[from] CompileError),
    #[error("expected {expected} channel values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("instruction {pc} reads {reads} values in {cycles} cycle(s), more than 2P = {limit} per cycle")]
    MemoryConstraint {
        pc: usize,
        reads: usize,
        cycles: u64,
        limit: usize,
    },
}

impl From<CodeError> for EngineError {
    fn from(e: CodeError) -> Self {
        EngineError::Program(CompileError::Code(e))
    }
}

/// A program bound to a value domain, with the buffers for one frame.
/// Clone it to decode frames concurrently.
#[derive(Debug, Clone)]
pub struct Engine<D: LlrDomain> {
    domain: D,
    n_bits: u32,
    steps: Vec<Step>,
    info_positions: Vec<usize>,
    reverse: Vec<usize>,
    alpha: Vec<D::Llr>,
    beta_l: Vec<u8>,
    beta_r: Vec<u8>,
    tmp_llr: Vec<D::Llr>,
    tmp_bits: Vec<u8>,
}

/// LLR values read by a step, used for the memory-constraint check.
fn reads(st: &Step) -> usize {
    match st.action {
        Action::RepSpc => 8,
        Action::Ml4 => 4,
        _ => 1 << st.stage,
    }
}

impl<D: LlrDomain> Engine<D> {
    pub fn new(program: &Program, domain: D) -> Result<Self, EngineError> {
        let steps = program.walk()?;
        let spec = program.code_spec()?;
        let n = program.n();
        Ok(Self {
            domain,
            n_bits: program.n_bits(),
            steps,
            info_positions: spec.info_positions().to_vec(),
            reverse: bit_reversal_table(program.n_bits()),
            alpha: vec![D::Llr::default(); 2 * n],
            beta_l: vec![0; 2 * n],
            beta_r: vec![0; 2 * n],
            tmp_llr: vec![D::Llr::default(); n / 2],
            tmp_bits: vec![0; n / 2],
        })
    }

    /// Like [`Engine::new`], but first checks that no instruction reads
    /// more than `2P` values per cycle of the latency model.
    pub fn new_checked(program: &Program, domain: D) -> Result<Self, EngineError> {
        let engine = Self::new(program, domain)?;
        let limit = 2 * program.p();
        for (pc, st) in engine.steps.iter().enumerate() {
            let cycles = step_cycles(st, program.p());
            let reads = reads(st);
            if reads as u64 > limit as u64 * cycles {
                return Err(EngineError::MemoryConstraint {
                    pc,
                    reads,
                    cycles,
                    limit,
                });
            }
        }
        Ok(engine)
    }

    pub fn domain(&self) -> &D {
        &self.domain
    }

    pub fn n(&self) -> usize {
        1 << self.n_bits
    }

    pub fn k(&self) -> usize {
        self.info_positions.len()
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    /// Decodes one frame of channel values (codeword order) into hard
    /// decisions, one per byte, in codeword order.
    pub fn execute_into(&mut self, channel: &[D::Llr], out: &mut [u8]) -> Result<(), EngineError> {
        let n = self.n();
        for len in [channel.len(), out.len()] {
            if len != n {
                return Err(EngineError::LengthMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        for (i, a) in self.alpha[n..].iter_mut().enumerate() {
            *a = channel[self.reverse[i]];
        }
        if self.steps.is_empty() {
            out.fill(0);
            return Ok(());
        }
        for i in 0..self.steps.len() {
            let st = self.steps[i];
            self.run(&st);
        }
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.beta_l[n + self.reverse[j]];
        }
        Ok(())
    }

    /// Decodes one frame and returns the systematic codeword estimate.
    pub fn execute(&mut self, channel: &[D::Llr]) -> Result<BitVec, EngineError> {
        let mut out = vec![0u8; self.n()];
        self.execute_into(channel, &mut out)?;
        Ok(out.iter().map(|&b| b != 0).collect())
    }

    /// Decodes one frame and returns the information bits in source order.
    pub fn decode_info(&mut self, channel: &[D::Llr]) -> Result<BitVec, EngineError> {
        let x = self.execute(channel)?;
        Ok(self.info_positions.iter().map(|&p| x[p]).collect())
    }

    fn run(&mut self, st: &Step) {
        let d = &self.domain;
        let n = 1usize << st.stage;
        let h = n / 2;
        let (alpha_lo, alpha_hi) = self.alpha.split_at_mut(n);
        let input = &alpha_hi[..n];
        let child = &mut alpha_lo[h.max(1)..n];
        let (out, left, right) = match st.side {
            Side::Left => {
                let (lo, hi) = self.beta_l.split_at_mut(n);
                (&mut hi[..n], &lo[h..n], &self.beta_r[h..n])
            }
            Side::Right => {
                let (lo, hi) = self.beta_r.split_at_mut(n);
                (&mut hi[..n], &self.beta_l[h..n], &lo[h..n])
            }
        };
        let tmp = &mut self.tmp_llr[..h];
        let bits = &mut self.tmp_bits[..h];
        match st.action {
            Action::F => f_into(d, &input[..h], &input[h..], child),
            Action::G => g_into(d, &input[..h], &input[h..], left, child),
            Action::G0 => g0_into(d, &input[..h], &input[h..], child),
            Action::Combine => combine_into(left, right, out),
            Action::Combine0 => {
                out[..h].copy_from_slice(right);
                out[h..].copy_from_slice(right);
            }
            Action::MergedRate1 | Action::MergedSpc => {
                g_into(d, &input[..h], &input[h..], left, tmp);
                if st.action == Action::MergedRate1 {
                    hd_into(d, tmp, bits);
                } else {
                    spc_into(d, tmp, bits);
                }
                combine_into(left, bits, out);
            }
            Action::Zero1 | Action::ZeroSpc => {
                g0_into(d, &input[..h], &input[h..], tmp);
                if st.action == Action::Zero1 {
                    hd_into(d, tmp, bits);
                } else {
                    spc_into(d, tmp, bits);
                }
                out[..h].copy_from_slice(bits);
                out[h..].copy_from_slice(bits);
            }
            Action::Rate1 => hd_into(d, input, out),
            Action::Spc => spc_into(d, input, out),
            Action::Rep => rep_into(d, input, out),
            Action::RepSpc => rep_spc_into(d, input, out),
            Action::Ml4 => ml4_into(d, input, out),
        }
    }
}
