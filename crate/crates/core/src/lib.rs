//! Fast-SSC decoding of polar codes.
//!
//! The crate covers the whole chain: code construction and systematic
//! encoding ([`polar_code`]), floating and saturating fixed-point LLR
//! arithmetic ([`quantize`]), constituent-code kernels ([`kernels`]), a plain
//! successive-cancellation decoder ([`sc_reference`]), compilation of pruned
//! decoder trees into instruction programs ([`tree_compiler`]), a program
//! interpreter ([`engine`]) and an AWGN Monte-Carlo harness ([`sim`]).

pub mod engine;
pub mod kernels;
pub mod polar_code;
pub mod quantize;
pub mod sc_reference;
pub mod sim;
pub mod tree_compiler;
