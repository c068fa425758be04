use super::program::{Instruction, Opcode, Program, Side};
use super::tree::{DecoderTree, NodeKind};
use super::CompileError;

/// Emits the depth-first program of a pruned tree. Rate-0 children are
/// folded into `G-0R`/`COMBINE-0R`/`P-01`/`P-0SPC`, rate-1 and SPC right
/// children into `P-R1`/`P-RSPC`, and directly decodable nodes reached
/// through `F` or `G` are decoded as soon as they are entered.
pub fn compile(tree: &DecoderTree) -> Result<Program, CompileError> {
    let mut out = Vec::new();
    if tree.root().kind != NodeKind::Rate0 {
        emit(tree, 0, Side::Left, &mut out)?;
    }
    Ok(Program::new(tree.n_bits(), tree.k(), tree.p(), out))
}

fn entry_opcode(kind: NodeKind) -> Option<Opcode> {
    match kind {
        NodeKind::Rate1 => Some(Opcode::PR1),
        NodeKind::Spc => Some(Opcode::PRSpc),
        NodeKind::Rep => Some(Opcode::Rep),
        NodeKind::RepSpc => Some(Opcode::RepSpc),
        NodeKind::Ml4 => Some(Opcode::Ml),
        NodeKind::Rate0 | NodeKind::RateR => None,
    }
}

fn emit(tree: &DecoderTree, idx: usize, side: Side, out: &mut Vec<Instruction>) -> Result<(), CompileError> {
    let node = tree.node(idx);
    let s = node.stage;
    if let Some(op) = entry_opcode(node.kind) {
        out.push(Instruction::new(op, side, s));
        return Ok(());
    }
    let [l, r] = match node.children {
        Some(c) => c,
        None => unreachable!("rate-0 nodes are handled by their parent"),
    };
    let (left, right) = (tree.node(l), tree.node(r));
    if right.kind == NodeKind::Rate0 {
        return Err(CompileError::RateZeroRight {
            offset: right.offset,
            stage: right.stage,
        });
    }
    if left.kind == NodeKind::Rate0 {
        match right.kind {
            NodeKind::Rate1 => out.push(Instruction::new(Opcode::P01, side, s)),
            NodeKind::Spc => out.push(Instruction::new(Opcode::P0Spc, side, s)),
            _ => {
                out.push(Instruction::new(Opcode::G0R, Side::Right, s));
                emit(tree, r, Side::Right, out)?;
                out.push(Instruction::new(Opcode::Combine0R, side, s));
            }
        }
        return Ok(());
    }
    out.push(Instruction::new(Opcode::F, Side::Left, s));
    emit(tree, l, Side::Left, out)?;
    match right.kind {
        NodeKind::Rate1 => out.push(Instruction::new(Opcode::PR1, side, s)),
        NodeKind::Spc => out.push(Instruction::new(Opcode::PRSpc, side, s)),
        _ => {
            out.push(Instruction::new(Opcode::G, Side::Right, s));
            emit(tree, r, Side::Right, out)?;
            out.push(Instruction::new(Opcode::Combine, side, s));
        }
    }
    Ok(())
}
