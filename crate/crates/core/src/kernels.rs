//! Constituent-code decoding primitives.
//!
//! Every kernel comes in two forms: a slice form (`*_into`) that writes into
//! caller-owned buffers and is used by the decoders, and an allocating form
//! with length checks for library users. Hard decisions are stored one bit
//! per byte (`0` or `1`) in the slice forms.

use thiserror::Error;

use crate::polar_code::BitVec;
use crate::quantize::LlrDomain;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("input too short: need at least {min} values, got {found}")]
    TooShort { min: usize, found: usize },
    #[error("expected exactly {expected} values, got {found}")]
    WrongLength { expected: usize, found: usize },
}

/// Length-4 codewords decoded by the ML node, in candidate order. They are
/// the hardware-order candidates `0000, 0001, 0101, 0100` of the code with
/// generator rows `0001` and `0100`, written in natural node order, where
/// the code has `u_0` and `u_1` frozen.
pub const ML4_CODEWORDS: [[u8; 4]; 4] = [[0, 0, 0, 0], [1, 1, 1, 1], [0, 1, 0, 1], [1, 0, 1, 0]];

#[inline]
pub fn f_into<D: LlrDomain>(d: &D, a: &[D::Llr], b: &[D::Llr], out: &mut [D::Llr]) {
    for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
        *o = d.f(x, y);
    }
}

#[inline]
pub fn g_into<D: LlrDomain>(d: &D, a: &[D::Llr], b: &[D::Llr], beta: &[u8], out: &mut [D::Llr]) {
    for (((o, &x), &y), &bit) in out.iter_mut().zip(a).zip(b).zip(beta) {
        *o = d.g(x, y, bit != 0);
    }
}

/// `g` with an all-zero left decision.
#[inline]
pub fn g0_into<D: LlrDomain>(d: &D, a: &[D::Llr], b: &[D::Llr], out: &mut [D::Llr]) {
    for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
        *o = d.g(x, y, false);
    }
}

#[inline]
pub fn hd_into<D: LlrDomain>(d: &D, alpha: &[D::Llr], out: &mut [u8]) {
    for (o, &v) in out.iter_mut().zip(alpha) {
        *o = d.hard(v) as u8;
    }
}

/// Writes `[l ^ r, r]` into `out` (length `2 * l.len()`).
#[inline]
pub fn combine_into(l: &[u8], r: &[u8], out: &mut [u8]) {
    let (lo, hi) = out.split_at_mut(l.len());
    for ((o, &x), &y) in lo.iter_mut().zip(l).zip(r) {
        *o = x ^ y;
    }
    hi.copy_from_slice(r);
}

/// Wagner decoding of a single-parity-check code.
pub fn spc_into<D: LlrDomain>(d: &D, alpha: &[D::Llr], out: &mut [u8]) {
    let mut parity = 0u8;
    let mut j = 0;
    let mut min = d.magnitude(alpha[0]);
    for (i, (o, &v)) in out.iter_mut().zip(alpha).enumerate() {
        *o = d.hard(v) as u8;
        parity ^= *o;
        let m = d.magnitude(v);
        if m < min {
            min = m;
            j = i;
        }
    }
    out[j] ^= parity;
}

/// Sum of `alpha` in the order an SC decoder would form it for a
/// repetition code: halves are added elementwise until one value remains.
pub fn rep_sum<D: LlrDomain>(d: &D, alpha: &[D::Llr]) -> D::Acc {
    let n = alpha.len();
    let mut small = [D::Acc::default(); 16];
    let mut large;
    let buf: &mut [D::Acc] = if n <= small.len() {
        &mut small[..n]
    } else {
        large = vec![D::Acc::default(); n];
        &mut large
    };
    for (b, &v) in buf.iter_mut().zip(alpha) {
        *b = d.widen(v);
    }
    let mut len = n;
    while len > 1 {
        let h = len / 2;
        for i in 0..h {
            buf[i] = buf[i + h] + buf[i];
        }
        len = h;
    }
    buf[0]
}

/// Repetition decoding: every output bit is the sign of the widened sum.
pub fn rep_into<D: LlrDomain>(d: &D, alpha: &[D::Llr], out: &mut [u8]) {
    let bit = d.acc_negative(rep_sum(d, alpha)) as u8;
    out.fill(bit);
}

/// Length-8 node with a length-4 repetition left half and a length-4 SPC
/// right half. Both SPC inputs are formed speculatively and the repetition
/// decision selects one.
pub fn rep_spc_into<D: LlrDomain>(d: &D, alpha: &[D::Llr], out: &mut [u8]) {
    let (a, b) = alpha.split_at(4);
    let mut rep_in = [D::Llr::default(); 4];
    f_into(d, a, b, &mut rep_in);
    let rep = d.acc_negative(rep_sum(d, &rep_in)) as u8;

    let mut spc_in = [[D::Llr::default(); 4]; 2];
    g_into(d, a, b, &[0; 4], &mut spc_in[0]);
    g_into(d, a, b, &[1; 4], &mut spc_in[1]);
    let mut spc = [0u8; 4];
    spc_into(d, &spc_in[rep as usize], &mut spc);

    for i in 0..4 {
        out[i] = rep ^ spc[i];
        out[i + 4] = spc[i];
    }
}

/// Correlation-ML decoding over [`ML4_CODEWORDS`]; ties keep the earlier
/// candidate.
pub fn ml4_into<D: LlrDomain>(d: &D, alpha: &[D::Llr], out: &mut [u8]) {
    let w: [D::Acc; 4] = std::array::from_fn(|i| d.widen(alpha[i]));
    let mut best = 0;
    let mut best_corr = D::Acc::default();
    for (c, cw) in ML4_CODEWORDS.iter().enumerate() {
        let corr = cw.iter().zip(&w).fold(
            D::Acc::default(),
            |acc, (&bit, &v)| if bit == 0 { acc + v } else { acc - v },
        );
        if c == 0 || corr > best_corr {
            best = c;
            best_corr = corr;
        }
    }
    out[..4].copy_from_slice(&ML4_CODEWORDS[best]);
}

fn to_bitvec(bits: &[u8]) -> BitVec {
    bits.iter().map(|&b| b != 0).collect()
}

fn check_pair(a: usize, b: usize) -> Result<(), KernelError> {
    if a != b {
        return Err(KernelError::LengthMismatch(a, b));
    }
    Ok(())
}

fn check_min(len: usize, min: usize) -> Result<(), KernelError> {
    if len < min {
        return Err(KernelError::TooShort { min, found: len });
    }
    Ok(())
}

fn check_exact(len: usize, expected: usize) -> Result<(), KernelError> {
    if len != expected {
        return Err(KernelError::WrongLength { expected, found: len });
    }
    Ok(())
}

/// Min-sum check-node update of two halves.
pub fn f_op<D: LlrDomain>(d: &D, a: &[D::Llr], b: &[D::Llr]) -> Result<Vec<D::Llr>, KernelError> {
    check_pair(a.len(), b.len())?;
    let mut out = vec![D::Llr::default(); a.len()];
    f_into(d, a, b, &mut out);
    Ok(out)
}

/// Variable-node update of two halves given the left decision.
pub fn g_op<D: LlrDomain>(
    d: &D,
    a: &[D::Llr],
    b: &[D::Llr],
    beta_l: &crate::polar_code::BitSlice,
) -> Result<Vec<D::Llr>, KernelError> {
    check_pair(a.len(), b.len())?;
    check_pair(a.len(), beta_l.len())?;
    let bits: Vec<u8> = beta_l.iter().by_vals().map(u8::from).collect();
    let mut out = vec![D::Llr::default(); a.len()];
    g_into(d, a, b, &bits, &mut out);
    Ok(out)
}

pub fn combine_op(
    beta_l: &crate::polar_code::BitSlice,
    beta_r: &crate::polar_code::BitSlice,
) -> Result<BitVec, KernelError> {
    check_pair(beta_l.len(), beta_r.len())?;
    let mut out = beta_l.to_bitvec();
    out ^= beta_r;
    out.extend_from_bitslice(beta_r);
    Ok(out)
}

/// Threshold decision: bit 1 iff the value is negative.
pub fn hd_op<D: LlrDomain>(d: &D, alpha: &[D::Llr]) -> BitVec {
    alpha.iter().map(|&v| d.hard(v)).collect()
}

pub fn decode_spc<D: LlrDomain>(d: &D, alpha: &[D::Llr]) -> Result<BitVec, KernelError> {
    check_min(alpha.len(), 2)?;
    let mut out = vec![0u8; alpha.len()];
    spc_into(d, alpha, &mut out);
    Ok(to_bitvec(&out))
}

pub fn decode_rep<D: LlrDomain>(d: &D, alpha: &[D::Llr]) -> Result<BitVec, KernelError> {
    check_min(alpha.len(), 2)?;
    let mut out = vec![0u8; alpha.len()];
    rep_into(d, alpha, &mut out);
    Ok(to_bitvec(&out))
}

pub fn decode_rep_spc<D: LlrDomain>(d: &D, alpha: &[D::Llr]) -> Result<BitVec, KernelError> {
    check_exact(alpha.len(), 8)?;
    let mut out = [0u8; 8];
    rep_spc_into(d, alpha, &mut out);
    Ok(to_bitvec(&out))
}

pub fn decode_ml4<D: LlrDomain>(d: &D, alpha: &[D::Llr]) -> Result<BitVec, KernelError> {
    check_exact(alpha.len(), 4)?;
    let mut out = [0u8; 4];
    ml4_into(d, alpha, &mut out);
    Ok(to_bitvec(&out))
}
