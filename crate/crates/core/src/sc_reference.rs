//! Plain recursive min-sum successive-cancellation decoder.
//!
//! This is the correctness oracle for the Fast-SSC engine: no pruning, no
//! resource model, one leaf at a time. It works on the natural-order tree
//! and translates to and from the bit-reversed codeword layout at the edges.

use crate::kernels::{f_into, g_into, hd_into};
use crate::polar_code::{reverse_unchecked, BitSlice, BitVec, CodeError, CodeSpec};
use crate::quantize::LlrDomain;

/// Decodes one frame and returns the estimated systematic codeword.
pub fn sc_decode<D: LlrDomain>(d: &D, channel: &[D::Llr], spec: &CodeSpec) -> Result<BitVec, CodeError> {
    let n = spec.n();
    if channel.len() != n {
        return Err(CodeError::LengthMismatch {
            expected: n,
            found: channel.len(),
        });
    }
    let n_bits = spec.n_bits();
    let alpha: Vec<D::Llr> = (0..n).map(|i| channel[reverse_unchecked(i, n_bits)]).collect();
    let frozen = spec.natural_frozen_mask();
    let mut beta = vec![0u8; n];
    descend(d, &alpha, &frozen, &mut beta);
    Ok((0..n).map(|j| beta[reverse_unchecked(j, n_bits)] != 0).collect())
}

fn descend<D: LlrDomain>(d: &D, alpha: &[D::Llr], frozen: &BitSlice, beta: &mut [u8]) {
    let n = alpha.len();
    if n == 1 {
        if frozen[0] {
            beta[0] = 0;
        } else {
            hd_into(d, alpha, beta);
        }
        return;
    }
    let h = n / 2;
    let (a, b) = alpha.split_at(h);
    let mut child = vec![D::Llr::default(); h];

    f_into(d, a, b, &mut child);
    let (bl, br) = beta.split_at_mut(h);
    descend(d, &child, &frozen[..h], bl);

    g_into(d, a, b, bl, &mut child);
    descend(d, &child, &frozen[h..], br);

    for (l, &r) in bl.iter_mut().zip(br.iter()) {
        *l ^= r;
    }
}
