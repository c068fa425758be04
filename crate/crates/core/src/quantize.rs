//! LLR value domains.
//!
//! The decoders are generic over [`LlrDomain`], which supplies the handful of
//! arithmetic rules they need: the min-sum `f`, the `g` update, the hard
//! decision, and a widened accumulator for repetition sums and ML
//! correlations. [`FloatDomain`] uses `f64`; [`FixedDomain`] implements the
//! `(W, Wc, F)` fixed-point format with symmetric saturating two's-complement
//! arithmetic, so the most negative code `-2^(W-1)` is never produced.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum QuantError {
    #[error("invalid quantization scheme '{0}': expected W:Wc:F")]
    Syntax(String),
    #[error("invalid quantization scheme ({w}, {wc}, {f}): need 32 >= W >= Wc >= 2 and 0 <= F < Wc")]
    Range { w: u32, wc: u32, f: u32 },
}

/// Fixed-point format: `w_internal` bits for internal LLRs, `w_channel` bits
/// for channel LLRs, `f_frac` fractional bits shared by both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantScheme {
    w_internal: u32,
    w_channel: u32,
    f_frac: u32,
}

impl QuantScheme {
    pub fn new(w_internal: u32, w_channel: u32, f_frac: u32) -> Result<Self, QuantError> {
        if w_internal > 32 || w_internal < w_channel || w_channel < 2 || f_frac >= w_channel {
            return Err(QuantError::Range {
                w: w_internal,
                wc: w_channel,
                f: f_frac,
            });
        }
        Ok(Self {
            w_internal,
            w_channel,
            f_frac,
        })
    }

    pub fn w_internal(&self) -> u32 {
        self.w_internal
    }

    pub fn w_channel(&self) -> u32 {
        self.w_channel
    }

    pub fn f_frac(&self) -> u32 {
        self.f_frac
    }

    /// Largest representable internal magnitude, `2^(W-1) - 1`.
    pub fn max_internal(&self) -> i32 {
        max_magnitude(self.w_internal)
    }

    /// Largest representable channel magnitude, `2^(Wc-1) - 1`.
    pub fn max_channel(&self) -> i32 {
        max_magnitude(self.w_channel)
    }

    /// Real value of one least-significant bit.
    pub fn lsb(&self) -> f64 {
        (-(self.f_frac as f64)).exp2()
    }
}

impl fmt::Display for QuantScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.w_internal, self.w_channel, self.f_frac)
    }
}

impl FromStr for QuantScheme {
    type Err = QuantError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 3 {
            return Err(QuantError::Syntax(s.to_string()));
        }
        let mut v = [0u32; 3];
        for (dst, p) in v.iter_mut().zip(&parts) {
            *dst = p.trim().parse().map_err(|_| QuantError::Syntax(s.to_string()))?;
        }
        QuantScheme::new(v[0], v[1], v[2])
    }
}

fn max_magnitude(bits: u32) -> i32 {
    ((1i64 << (bits - 1)) - 1) as i32
}

/// A quantized LLR, in units of `2^-F`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct FixedLlr(i32);

impl FixedLlr {
    pub const ZERO: FixedLlr = FixedLlr(0);

    /// Wraps a raw integer. The caller is responsible for the range.
    pub const fn from_raw(raw: i32) -> Self {
        FixedLlr(raw)
    }

    pub const fn raw(self) -> i32 {
        self.0
    }

    pub fn to_f64(self, scheme: &QuantScheme) -> f64 {
        self.0 as f64 * scheme.lsb()
    }
}

impl fmt::Display for FixedLlr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Quantizes a channel LLR: round to nearest (ties away from zero) at `F`
/// fractional bits, then clamp to `±(2^(Wc-1) - 1)`.
pub fn quantize_channel(llr: f64, scheme: &QuantScheme) -> FixedLlr {
    let max = scheme.max_channel() as f64;
    let scaled = (llr * (scheme.f_frac as f64).exp2()).round();
    if scaled.is_nan() {
        return FixedLlr::ZERO;
    }
    FixedLlr(scaled.clamp(-max, max) as i32)
}

/// `a + b` saturated to the symmetric `w`-bit range.
#[inline]
pub fn sat_add(a: FixedLlr, b: FixedLlr, w: u32) -> FixedLlr {
    let max = max_magnitude(w) as i64;
    FixedLlr((a.0 as i64 + b.0 as i64).clamp(-max, max) as i32)
}

/// Arithmetic used by the decoders.
pub trait LlrDomain: Clone + fmt::Debug + Send + Sync {
    /// Stored LLR value.
    type Llr: Copy + Default + PartialEq + fmt::Debug + Send + Sync;
    /// Magnitude used to find the least reliable value.
    type Mag: Copy + PartialOrd;
    /// Widened accumulator for sums whose sign alone is used.
    type Acc: Copy
        + Default
        + PartialOrd
        + fmt::Debug
        + Add<Output = Self::Acc>
        + Sub<Output = Self::Acc>
        + Neg<Output = Self::Acc>;

    #[allow(clippy::wrong_self_convention)]
    fn from_channel(&self, llr: f64) -> Self::Llr;
    fn to_f64(&self, v: Self::Llr) -> f64;

    /// Min-sum check-node update `sgn(a)·sgn(b)·min(|a|, |b|)`, `sgn(0) = +`.
    fn f(&self, a: Self::Llr, b: Self::Llr) -> Self::Llr;
    /// `b + a` when `bit` is 0, `b - a` when it is 1.
    fn g(&self, a: Self::Llr, b: Self::Llr, bit: bool) -> Self::Llr;
    /// Threshold decision: `true` (bit 1) iff the value is negative.
    fn hard(&self, v: Self::Llr) -> bool;
    fn magnitude(&self, v: Self::Llr) -> Self::Mag;
    fn widen(&self, v: Self::Llr) -> Self::Acc;

    /// Sign decision on a widened accumulator, `>= 0` maps to bit 0.
    fn acc_negative(&self, acc: Self::Acc) -> bool {
        acc < Self::Acc::default()
    }
}

/// `f64` LLRs.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FloatDomain;

impl LlrDomain for FloatDomain {
    type Llr = f64;
    type Mag = f64;
    type Acc = f64;

    #[inline]
    fn from_channel(&self, llr: f64) -> f64 {
        llr
    }

    #[inline]
    fn to_f64(&self, v: f64) -> f64 {
        v
    }

    #[inline]
    fn f(&self, a: f64, b: f64) -> f64 {
        let m = a.abs().min(b.abs());
        if (a < 0.0) != (b < 0.0) {
            -m
        } else {
            m
        }
    }

    #[inline]
    fn g(&self, a: f64, b: f64, bit: bool) -> f64 {
        if bit {
            b - a
        } else {
            b + a
        }
    }

    #[inline]
    fn hard(&self, v: f64) -> bool {
        v < 0.0
    }

    #[inline]
    fn magnitude(&self, v: f64) -> f64 {
        v.abs()
    }

    #[inline]
    fn widen(&self, v: f64) -> f64 {
        v
    }
}

/// Saturating fixed-point LLRs in a [`QuantScheme`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedDomain {
    scheme: QuantScheme,
    max: i64,
}

impl FixedDomain {
    pub fn new(scheme: QuantScheme) -> Self {
        Self {
            scheme,
            max: scheme.max_internal() as i64,
        }
    }

    pub fn scheme(&self) -> &QuantScheme {
        &self.scheme
    }
}

impl LlrDomain for FixedDomain {
    type Llr = FixedLlr;
    type Mag = i32;
    type Acc = i64;

    #[inline]
    fn from_channel(&self, llr: f64) -> FixedLlr {
        quantize_channel(llr, &self.scheme)
    }

    fn to_f64(&self, v: FixedLlr) -> f64 {
        v.to_f64(&self.scheme)
    }

    #[inline]
    fn f(&self, a: FixedLlr, b: FixedLlr) -> FixedLlr {
        let m = a.0.abs().min(b.0.abs());
        FixedLlr(if (a.0 < 0) != (b.0 < 0) { -m } else { m })
    }

    #[inline]
    fn g(&self, a: FixedLlr, b: FixedLlr, bit: bool) -> FixedLlr {
        let (a, b) = (a.0 as i64, b.0 as i64);
        let s = if bit { b - a } else { b + a };
        FixedLlr(s.clamp(-self.max, self.max) as i32)
    }

    #[inline]
    fn hard(&self, v: FixedLlr) -> bool {
        v.0 < 0
    }

    #[inline]
    fn magnitude(&self, v: FixedLlr) -> i32 {
        v.0.abs()
    }

    #[inline]
    fn widen(&self, v: FixedLlr) -> i64 {
        v.0 as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(w: u32, wc: u32, f: u32) -> QuantScheme {
        QuantScheme::new(w, wc, f).unwrap()
    }

    #[test]
    fn scheme_parsing_and_validation() {
        assert_eq!("6:4:0".parse::<QuantScheme>().unwrap(), q(6, 4, 0));
        assert_eq!("7:5:1".parse::<QuantScheme>().unwrap().to_string(), "7:5:1");
        assert!("7:5".parse::<QuantScheme>().is_err());
        assert!("a:5:1".parse::<QuantScheme>().is_err());
        assert!(QuantScheme::new(4, 5, 1).is_err());
        assert!(QuantScheme::new(6, 1, 0).is_err());
        assert!(QuantScheme::new(6, 4, 4).is_err());
        assert!(QuantScheme::new(33, 4, 0).is_err());
        assert_eq!(q(6, 4, 0).max_internal(), 31);
        assert_eq!(q(6, 4, 0).max_channel(), 7);
    }

    #[test]
    fn quantize_channel_examples() {
        assert_eq!(quantize_channel(0.0, &q(6, 4, 0)).raw(), 0);
        assert_eq!(quantize_channel(3.7, &q(7, 5, 1)).raw(), 7);
        assert_eq!(quantize_channel(-100.0, &q(6, 4, 0)).raw(), -7);
        assert_eq!(quantize_channel(100.0, &q(6, 4, 0)).raw(), 7);
        // ties away from zero
        assert_eq!(quantize_channel(2.5, &q(6, 4, 0)).raw(), 3);
        assert_eq!(quantize_channel(-2.5, &q(6, 4, 0)).raw(), -3);
        assert_eq!(quantize_channel(f64::NAN, &q(6, 4, 0)).raw(), 0);
        assert_eq!(quantize_channel(f64::NEG_INFINITY, &q(6, 4, 0)).raw(), -7);
    }

    #[test]
    fn sat_add_examples() {
        let v = FixedLlr::from_raw;
        assert_eq!(sat_add(v(5), v(-5), 6), v(0));
        assert_eq!(sat_add(v(31), v(31), 6), v(31));
        assert_eq!(sat_add(v(-31), v(-31), 6), v(-31));
        assert_eq!(sat_add(v(-31), v(-1), 6), v(-31));
    }

    #[test]
    fn fixed_g_saturates_symmetrically() {
        let d = FixedDomain::new(q(6, 4, 0));
        let v = FixedLlr::from_raw;
        assert_eq!(d.g(v(31), v(31), false), v(31));
        assert_eq!(d.g(v(31), v(-31), true), v(-31));
        assert_eq!(d.g(v(2), v(3), true), v(1));
    }

    #[test]
    fn float_negative_zero_is_non_negative() {
        let d = FloatDomain;
        assert!(!d.hard(-0.0));
        assert_eq!(d.f(-0.0, -3.0), 0.0);
        assert!(!d.hard(d.f(-0.0, -3.0)));
    }
}
