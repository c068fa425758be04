//! Decoder-tree pruning, program emission, latency and node statistics.

mod compile;
mod latency;
mod program;
mod stats;
mod tree;

pub use compile::compile;
pub use latency::{estimate_latency, step_cycles};
pub use program::{Action, Instruction, Opcode, Program, Side, Step};
pub use stats::{node_stats, NodeStats, REP_BINS, SPC_BINS};
pub use tree::{build_tree, DecoderTree, Node, NodeKind, NodeRuleSet};

use thiserror::Error;

use crate::polar_code::{CodeError, CodeSpec};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum CompileError {
    #[error("P must be a power of two, got {0}")]
    InvalidP(usize),
    #[error("rate-0 right child at offset {offset}, stage {stage} cannot be scheduled")]
    RateZeroRight { offset: usize, stage: u32 },
    #[error("instruction {pc}: {msg}")]
    Walk { pc: usize, msg: String },
    #[error("program ends with {depth} unfinished node(s)")]
    Incomplete { depth: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// Builds and compiles in one call.
pub fn compile_spec(spec: &CodeSpec, p: usize, rules: NodeRuleSet) -> Result<Program, CompileError> {
    compile(&build_tree(spec, p, rules)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar_code::{BitVec, Construction};

    fn natural(frozen: &[usize], n: usize) -> CodeSpec {
        let mut m = BitVec::repeat(false, n);
        for &i in frozen {
            m.set(i, true);
        }
        CodeSpec::from_natural_mask(&m, Construction::Custom).unwrap()
    }

    fn listing(p: &Program) -> Vec<String> {
        p.instructions().iter().map(|i| i.to_string()).collect()
    }

    #[test]
    fn eight_three_program() {
        let spec = natural(&[0, 1, 2, 4, 5], 8);
        let rules = NodeRuleSet {
            rep_min: 2,
            rep_max: 2,
            ..NodeRuleSet::ssc().with_rep(true)
        };
        let prog = compile_spec(&spec, 1, rules).unwrap();
        assert_eq!(
            listing(&prog),
            [
                "F L stage=3",
                "G-0R R stage=2",
                "REP R stage=1",
                "COMBINE-0R L stage=2",
                "G R stage=3",
                "P-01 R stage=2",
                "COMBINE L stage=3",
            ]
        );
        assert_eq!(prog.walk().unwrap().len(), 7);
        assert_eq!(prog.code_spec().unwrap(), spec);
    }

    #[test]
    fn degenerate_programs() {
        let zero = CodeSpec::from_frozen_mask(BitVec::repeat(true, 8), Construction::Custom).unwrap();
        let prog = compile_spec(&zero, 2, NodeRuleSet::fast_ssc()).unwrap();
        assert!(prog.is_empty());
        assert_eq!(estimate_latency(&prog).unwrap(), 0);
        assert_eq!(prog.code_spec().unwrap(), zero);

        let one = CodeSpec::from_frozen_mask(BitVec::repeat(false, 8), Construction::Custom).unwrap();
        let prog = compile_spec(&one, 4, NodeRuleSet::fast_ssc()).unwrap();
        assert_eq!(listing(&prog), ["P-R1 L stage=3"]);
        assert_eq!(estimate_latency(&prog).unwrap(), 1);
    }

    #[test]
    fn rate_zero_right_child_is_rejected() {
        let spec = natural(&[2, 3], 4);
        assert!(matches!(
            compile_spec(&spec, 1, NodeRuleSet::fast_ssc()),
            Err(CompileError::RateZeroRight { offset: 2, stage: 1 })
        ));
    }

    #[test]
    fn text_and_binary_round_trips() {
        let spec = CodeSpec::construct(10, 600, 0.35).unwrap();
        let prog = compile_spec(&spec, 16, NodeRuleSet::fast_ssc()).unwrap();
        let text = prog.to_text();
        assert_eq!(Program::parse(&text).unwrap(), prog);
        let bin = prog.to_binary();
        assert_eq!(bin.len(), (prog.len() * 5).div_ceil(8));
        let back = Program::from_binary(&bin, prog.len(), 10, 600, 16).unwrap();
        assert_eq!(back, prog);
        assert_eq!(prog.code_spec().unwrap().frozen_mask(), spec.frozen_mask());
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = Program::parse("N=8 k=3 P=1\nF L stage=3\nFOO R stage=2\n").unwrap_err();
        assert!(matches!(err, CompileError::Parse { line: 3, .. }), "{err}");
        let err = Program::parse("N=8 k=3 P=1\nF X stage=3\n").unwrap_err();
        assert!(matches!(err, CompileError::Parse { line: 2, .. }));
        let err = Program::parse("N=8 k=3 P=1\nF L stage\n").unwrap_err();
        assert!(matches!(err, CompileError::Parse { line: 2, .. }));
        assert!(Program::parse("N=12 k=3 P=1\n").is_err());
    }

    #[test]
    fn walk_rejects_corrupt_programs() {
        let spec = natural(&[0, 1, 2, 4, 5], 8);
        let prog = compile_spec(&spec, 1, NodeRuleSet::fast_ssc()).unwrap();
        let mut ins = prog.instructions().to_vec();
        ins[1].stage += 1;
        let bad = Program::new(3, 3, 1, ins);
        assert!(matches!(bad.walk(), Err(CompileError::Walk { pc: 1, .. })));

        let mut ins = prog.instructions().to_vec();
        ins.pop();
        let bad = Program::new(3, 3, 1, ins);
        assert!(matches!(bad.walk(), Err(CompileError::Incomplete { .. })));

        let mut ins = prog.instructions().to_vec();
        ins.push(ins[0]);
        let bad = Program::new(3, 3, 1, ins.clone());
        assert!(matches!(bad.walk(), Err(CompileError::Walk { .. })));
    }
}
