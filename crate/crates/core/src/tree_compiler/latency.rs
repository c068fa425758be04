//! Cycle-latency model of the semi-parallel decoder.
//!
//! A step reads or writes at most `2P` values, so an operation over a node
//! of length `N_v` takes `max(1, N_v / 2P)` cycles. Repetition nodes spend
//! that long summing and as long again writing the output.
//! SPC decoding uses a compare-select tree pipelined after 8 and 64 inputs;
//! an SPC code that arrives over several input words is ready `4` cycles
//! after its last word.

use super::program::{Action, Program, Step};
use super::CompileError;

fn words(n: usize, width: usize) -> u64 {
    (n / width).max(1) as u64
}

fn spc_pipeline(n: usize) -> u64 {
    match n {
        0..=8 => 0,
        9..=64 => 1,
        _ => 2,
    }
}

/// Cycles to decode an SPC code of length `n` fed `width` values per cycle.
fn spc_cycles(n: usize, width: usize) -> u64 {
    if n > width {
        (n / width) as u64 + 4
    } else {
        1 + spc_pipeline(n)
    }
}

/// Latency in cycles of one frame, excluding channel loading.
pub fn estimate_latency(program: &Program) -> Result<u64, CompileError> {
    Ok(program.walk()?.iter().map(|st| step_cycles(st, program.p())).sum())
}

/// Cycles spent on one resolved step by a decoder with parameter `p`.
pub fn step_cycles(st: &Step, p: usize) -> u64 {
    let two_p = 2 * p;
    let n = 1usize << st.stage;
    match st.action {
        Action::F
        | Action::G
        | Action::G0
        | Action::Combine
        | Action::Combine0
        | Action::MergedRate1
        | Action::Zero1
        | Action::Rate1 => words(n, two_p),
        Action::Rep => 2 * words(n, two_p),
        Action::RepSpc | Action::Ml4 => 1,
        // the right child's inputs come from g, P of them per cycle
        Action::MergedSpc | Action::ZeroSpc => spc_cycles(n / 2, p),
        Action::Spc => spc_cycles(n, two_p),
    }
}
