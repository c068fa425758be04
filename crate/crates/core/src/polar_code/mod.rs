//! Polar code description, bit-reversal, and encoding.
//!
//! A [`CodeSpec`] stores its frozen-bit mask in bit-reversed (hardware)
//! order: position `j` of the mask refers to codeword position `j` of the
//! transmitted frame. With that convention the plain Kronecker transform
//! [`encode_polar`] is the only encoding primitive needed: the code is the
//! set `{ u·F_N : u[j] = 0 for every frozen j }`, systematic codewords carry
//! the information bits at the unfrozen positions in ascending order, and the
//! decoder tree (which works in natural order) sees the mask through
//! [`CodeSpec::natural_frozen_mask`].

mod construction;
mod mask_file;

pub use construction::{ga_reliabilities, Construction};
pub use mask_file::{mask_to_hex, parse_code_spec, write_code_spec};

use bitvec::prelude::*;
use thiserror::Error;

/// Packed bit vector used for messages and codewords.
pub type BitVec = bitvec::vec::BitVec<u64, Lsb0>;
/// Borrowed view of a [`BitVec`].
pub type BitSlice = bitvec::slice::BitSlice<u64, Lsb0>;

/// Largest supported `log2 N`.
pub const MAX_N_BITS: u32 = 24;

/// Errors raised while building or using a polar code.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum CodeError {
    #[error("index {index} out of range for {n_bits}-bit indices")]
    IndexOutOfRange { index: usize, n_bits: u32 },
    #[error("n_bits must be in 1..={max}, got {0}", max = MAX_N_BITS)]
    InvalidLength(u32),
    #[error("invalid dimension k={k} for N={n}")]
    InvalidDimension { k: usize, n: usize },
    #[error("design noise variance must be finite and positive, got {0}")]
    InvalidSigma2(f64),
    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Reverses the lowest `n_bits` bits of `i`.
pub fn bit_reverse(i: usize, n_bits: u32) -> Result<usize, CodeError> {
    if n_bits > usize::BITS || (n_bits < usize::BITS && i >> n_bits != 0) {
        return Err(CodeError::IndexOutOfRange { index: i, n_bits });
    }
    Ok(reverse_unchecked(i, n_bits))
}

#[inline]
pub(crate) fn reverse_unchecked(i: usize, n_bits: u32) -> usize {
    if n_bits == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - n_bits)
    }
}

/// The bit-reversal permutation of `0..2^n_bits` as a lookup table.
pub fn bit_reversal_table(n_bits: u32) -> Vec<usize> {
    (0..1usize << n_bits).map(|i| reverse_unchecked(i, n_bits)).collect()
}

/// An `(N, k)` polar code.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    n_bits: u32,
    k: usize,
    frozen: BitVec,
    info_positions: Vec<usize>,
    construction: Construction,
}

impl CodeSpec {
    /// Builds a code from a frozen mask given in bit-reversed (hardware) order.
    pub fn from_frozen_mask(frozen: BitVec, construction: Construction) -> Result<Self, CodeError> {
        let n = frozen.len();
        if !n.is_power_of_two() {
            return Err(CodeError::NotPowerOfTwo(n));
        }
        let n_bits = n.trailing_zeros();
        if n_bits == 0 || n_bits > MAX_N_BITS {
            return Err(CodeError::InvalidLength(n_bits));
        }
        let info_positions: Vec<usize> = frozen.iter_zeros().collect();
        Ok(Self {
            n_bits,
            k: info_positions.len(),
            frozen,
            info_positions,
            construction,
        })
    }

    /// Builds a code from a frozen mask given in natural order.
    pub fn from_natural_mask(natural: &BitSlice, construction: Construction) -> Result<Self, CodeError> {
        let n = natural.len();
        if !n.is_power_of_two() {
            return Err(CodeError::NotPowerOfTwo(n));
        }
        let n_bits = n.trailing_zeros();
        let mut hw = BitVec::repeat(false, n);
        for i in natural.iter_ones() {
            hw.set(reverse_unchecked(i, n_bits), true);
        }
        Self::from_frozen_mask(hw, construction)
    }

    /// Constructs an `(2^n_bits, k)` code for BPSK over AWGN with noise
    /// variance `design_sigma2`, freezing the `N - k` synthetic channels with
    /// the lowest Gaussian-approximation mean LLR.
    pub fn construct(n_bits: u32, k: usize, design_sigma2: f64) -> Result<Self, CodeError> {
        construct_frozen_set(n_bits, k, design_sigma2)
    }

    pub fn n_bits(&self) -> u32 {
        self.n_bits
    }

    /// Code length `N`.
    pub fn n(&self) -> usize {
        1 << self.n_bits
    }

    /// Number of information bits.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n() as f64
    }

    pub fn construction(&self) -> &Construction {
        &self.construction
    }

    /// Frozen mask in bit-reversed (hardware) order, `true` = frozen.
    pub fn frozen_mask(&self) -> &BitSlice {
        &self.frozen
    }

    pub fn is_frozen(&self, hw_index: usize) -> bool {
        self.frozen[hw_index]
    }

    /// Frozen mask in natural order: entry `i` is the source bit `u_i`
    /// visited by the `i`-th leaf of the decoder tree.
    pub fn natural_frozen_mask(&self) -> BitVec {
        let mut nat = BitVec::repeat(false, self.n());
        for j in self.frozen.iter_ones() {
            nat.set(reverse_unchecked(j, self.n_bits), true);
        }
        nat
    }

    /// Codeword positions carrying information bits, ascending.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }
}

/// Builds the frozen set of a polar code by Gaussian-approximation density
/// evolution. Ties in reliability freeze the lower bit-reversed index first.
pub fn construct_frozen_set(n_bits: u32, k: usize, design_sigma2: f64) -> Result<CodeSpec, CodeError> {
    if n_bits == 0 || n_bits > MAX_N_BITS {
        return Err(CodeError::InvalidLength(n_bits));
    }
    let n = 1usize << n_bits;
    if k == 0 || k > n {
        return Err(CodeError::InvalidDimension { k, n });
    }
    if !(design_sigma2.is_finite() && design_sigma2 > 0.0) {
        return Err(CodeError::InvalidSigma2(design_sigma2));
    }
    let natural = ga_reliabilities(n_bits, design_sigma2);
    let mut order: Vec<usize> = (0..n).collect();
    // hardware index j holds natural channel br(j)
    order.sort_by(|&a, &b| {
        let ra = natural[reverse_unchecked(a, n_bits)];
        let rb = natural[reverse_unchecked(b, n_bits)];
        ra.total_cmp(&rb).then(a.cmp(&b))
    });
    let mut frozen = BitVec::repeat(false, n);
    for &j in &order[..n - k] {
        frozen.set(j, true);
    }
    CodeSpec::from_frozen_mask(frozen, Construction::GaussianApproximation { design_sigma2 })
}

// Block masks for the in-word butterfly: bit i is set iff (i mod 2h) < h.
const WORD_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// In-place `x = u·F_N` on a packed vector of power-of-two length.
pub(crate) fn polar_transform_in_place(bits: &mut BitVec) {
    let n = bits.len();
    debug_assert!(n.is_power_of_two());
    let words = bits.as_raw_mut_slice();
    let mut half = 1usize;
    while half < n && half < 64 {
        let mask = WORD_MASKS[half.trailing_zeros() as usize];
        for w in words.iter_mut() {
            *w ^= (*w >> half) & mask;
        }
        half <<= 1;
    }
    while half < n {
        let hw = half / 64;
        for block in words.chunks_mut(2 * hw) {
            let (lo, hi) = block.split_at_mut(hw);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half <<= 1;
    }
}

/// Non-systematic polar encoding `x = u·F_2^{⊗log2 N}` over GF(2).
pub fn encode_polar(u: &BitSlice) -> Result<BitVec, CodeError> {
    if !u.len().is_power_of_two() {
        return Err(CodeError::NotPowerOfTwo(u.len()));
    }
    let mut x = u.to_bitvec();
    polar_transform_in_place(&mut x);
    Ok(x)
}

/// Systematic encoding: place `a` on the information positions, transform,
/// clear the frozen positions, and transform again.
pub fn encode_systematic(a: &BitSlice, spec: &CodeSpec) -> Result<BitVec, CodeError> {
    if a.len() != spec.k() {
        return Err(CodeError::LengthMismatch {
            expected: spec.k(),
            found: a.len(),
        });
    }
    let mut x = BitVec::repeat(false, spec.n());
    for (&pos, bit) in spec.info_positions().iter().zip(a.iter().by_vals()) {
        x.set(pos, bit);
    }
    polar_transform_in_place(&mut x);
    for (w, f) in x.as_raw_mut_slice().iter_mut().zip(spec.frozen.as_raw_slice()) {
        *w &= !*f;
    }
    polar_transform_in_place(&mut x);
    Ok(x)
}

/// Reads the information bits of a systematic codeword in source order.
pub fn extract_info(x: &BitSlice, spec: &CodeSpec) -> Result<BitVec, CodeError> {
    if x.len() != spec.n() {
        return Err(CodeError::LengthMismatch {
            expected: spec.n(),
            found: x.len(),
        });
    }
    Ok(spec.info_positions().iter().map(|&p| x[p]).collect())
}
