//! Gaussian-approximation density evolution for BPSK over AWGN.
//!
//! Each synthetic channel is tracked by the mean of its (assumed
//! consistent-Gaussian) LLR. A check-node combination maps a mean `m` to
//! `φ⁻¹(1 - (1 - φ(m))²)` and a variable-node combination to `2m`, with
//! Chung's two-piece approximation of `φ`. All work is done on `ln φ` so the
//! recursion stays accurate for the very reliable channels of long codes.

use std::f64::consts::PI;

/// How a frozen set was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Construction {
    /// Gaussian-approximation density evolution at the given design noise
    /// variance.
    GaussianApproximation { design_sigma2: f64 },
    /// Loaded from a mask without construction metadata.
    Custom,
}

impl Construction {
    pub fn design_sigma2(&self) -> Option<f64> {
        match *self {
            Construction::GaussianApproximation { design_sigma2 } => Some(design_sigma2),
            Construction::Custom => None,
        }
    }
}

const SPLIT: f64 = 10.0;

// Below this mean the low branch would give φ > 1, so φ follows its
// second-order expansion 1 - x/2 + x²/4 instead. The two curves cross here.
const SMALL: f64 = 0.254_147_522_871_421_1;

/// `1 - φ(x)` on the small-mean branch.
fn small_q(x: f64) -> f64 {
    x / 2.0 - x * x / 4.0
}

/// `ln x` for the small-mean `x` with `1 - φ(x) = exp(ln_q)`.
fn small_ln_inv(ln_q: f64) -> f64 {
    let q = ln_q.exp();
    4f64.ln() + ln_q - (1.0 + (1.0 - 4.0 * q).sqrt()).ln()
}

fn ln_phi_low(x: f64) -> f64 {
    -0.4527 * x.powf(0.86) + 0.0218
}

fn ln_phi_high(x: f64) -> f64 {
    0.5 * (PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
}

fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < SMALL {
        (-small_q(x)).ln_1p()
    } else if x < SPLIT {
        ln_phi_low(x)
    } else {
        ln_phi_high(x)
    }
}

// The low and high branches do not meet exactly at SPLIT; values of ln φ
// above the low branch's endpoint are inverted on the low branch,
// everything else on the high branch, which keeps the inverse monotone.
fn ln_phi_inv(y: f64) -> f64 {
    if y >= 0.0 {
        return 0.0;
    }
    if y > ln_phi(SMALL) {
        return small_ln_inv((-(y.exp_m1())).ln()).exp();
    }
    if y >= ln_phi_low(SPLIT) {
        return ((0.0218 - y) / 0.4527).powf(1.0 / 0.86);
    }
    let (mut lo, mut hi) = (SPLIT, SPLIT + 4.0 * (-y) + 64.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_phi_high(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Log of the mean LLR after a check-node combination of two channels whose
/// mean is `exp(l)`. Means that small are handled in the log domain so the
/// worst channels of long codes never underflow to a common zero.
fn check_node_ln_mean(l: f64) -> f64 {
    let m = l.exp();
    if m < SMALL {
        // 1 - φ_out = (1 - φ)²
        let ln_q = l - 2f64.ln() + (-m / 2.0).ln_1p();
        return small_ln_inv(2.0 * ln_q);
    }
    let t = ln_phi(m);
    let p = t.exp();
    // ln(1 - (1 - p)^2) = ln p + ln(2 - p)
    ln_phi_inv(t + (2.0 - p).ln()).ln()
}

/// Natural log of the mean LLR of every synthetic channel `u_i`, natural
/// order, for BPSK over AWGN with noise variance `sigma2`. Larger is more
/// reliable.
pub fn ga_reliabilities(n_bits: u32, sigma2: f64) -> Vec<f64> {
    let mut means = vec![(2.0 / sigma2).ln()];
    for _ in 0..n_bits {
        let mut next = Vec::with_capacity(means.len() * 2);
        for &l in &means {
            next.push(check_node_ln_mean(l));
            next.push(l + 2f64.ln());
        }
        means = next;
    }
    means
}
