//! Text form of a [`CodeSpec`].
//!
//! ```text
//! # comments start with '#'
//! N=8
//! k=5
//! design_sigma2=0.5
//! mask=a8
//! ```
//!
//! `mask` is the frozen set in bit-reversed order as hexadecimal, one bit per
//! codeword position; the first (most significant) nibble holds positions
//! 0..4 with position 0 in its most significant bit. `frozen=0,2,4` (a sorted
//! decimal index list, commas or spaces) may be given instead of `mask`.
//! `design_sigma2` is optional and `k`, when present, is checked against the
//! mask weight.

use super::{BitVec, CodeError, CodeSpec, Construction};

fn parse_err(line: usize, msg: impl Into<String>) -> CodeError {
    CodeError::Parse { line, msg: msg.into() }
}

/// Hexadecimal rendering of a mask, lowest indices first.
pub fn mask_to_hex(mask: &super::BitSlice) -> String {
    mask.chunks(4)
        .map(|nib| {
            let v = nib
                .iter()
                .by_vals()
                .enumerate()
                .fold(0u32, |acc, (i, b)| acc | ((b as u32) << (3 - i)));
            char::from_digit(v, 16).unwrap()
        })
        .collect()
}

fn mask_from_hex(hex: &str, n: usize, line: usize) -> Result<BitVec, CodeError> {
    let expected = n.div_ceil(4);
    if hex.len() != expected {
        return Err(parse_err(
            line,
            format!("mask has {} hex digits, expected {expected} for N={n}", hex.len()),
        ));
    }
    let mut mask = BitVec::with_capacity(n);
    for c in hex.chars() {
        let v = c
            .to_digit(16)
            .ok_or_else(|| parse_err(line, format!("invalid hex digit '{c}'")))?;
        for i in 0..4 {
            if mask.len() < n {
                mask.push((v >> (3 - i)) & 1 == 1);
            } else if (v >> (3 - i)) & 1 == 1 {
                return Err(parse_err(line, "mask sets bits past N"));
            }
        }
    }
    Ok(mask)
}

fn mask_from_list(list: &str, n: usize, line: usize) -> Result<BitVec, CodeError> {
    let mut mask = BitVec::repeat(false, n);
    let mut last: Option<usize> = None;
    for tok in list
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        let idx: usize = tok
            .parse()
            .map_err(|_| parse_err(line, format!("invalid index '{tok}'")))?;
        if idx >= n {
            return Err(parse_err(line, format!("index {idx} out of range for N={n}")));
        }
        if last.is_some_and(|l| idx <= l) {
            return Err(parse_err(line, "frozen index list must be strictly increasing"));
        }
        last = Some(idx);
        mask.set(idx, true);
    }
    Ok(mask)
}

/// Parses the key-value text form.
pub fn parse_code_spec(text: &str) -> Result<CodeSpec, CodeError> {
    let mut n: Option<usize> = None;
    let mut k: Option<(usize, usize)> = None;
    let mut sigma2: Option<f64> = None;
    let mut mask: Option<(String, bool, usize)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected key=value, got '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "N" | "n" => {
                let v: usize = value
                    .parse()
                    .map_err(|_| parse_err(line, format!("invalid N '{value}'")))?;
                n = Some(v);
            }
            "n_bits" => {
                let v: u32 = value
                    .parse()
                    .map_err(|_| parse_err(line, format!("invalid n_bits '{value}'")))?;
                if v == 0 || v > super::MAX_N_BITS {
                    return Err(parse_err(line, format!("n_bits {v} out of range")));
                }
                n = Some(1 << v);
            }
            "k" => {
                let v = value
                    .parse()
                    .map_err(|_| parse_err(line, format!("invalid k '{value}'")))?;
                k = Some((v, line));
            }
            "design_sigma2" => {
                let v: f64 = value
                    .parse()
                    .map_err(|_| parse_err(line, format!("invalid design_sigma2 '{value}'")))?;
                if !(v.is_finite() && v > 0.0) {
                    return Err(CodeError::InvalidSigma2(v));
                }
                sigma2 = Some(v);
            }
            "mask" => mask = Some((value.to_string(), true, line)),
            "frozen" => mask = Some((value.to_string(), false, line)),
            other => return Err(parse_err(line, format!("unknown key '{other}'"))),
        }
    }

    let n = n.ok_or_else(|| parse_err(0, "missing N"))?;
    if !n.is_power_of_two() || n < 2 {
        return Err(CodeError::NotPowerOfTwo(n));
    }
    let (body, is_hex, line) = mask.ok_or_else(|| parse_err(0, "missing mask or frozen line"))?;
    let frozen = if is_hex {
        mask_from_hex(&body, n, line)?
    } else {
        mask_from_list(&body, n, line)?
    };
    let construction = match sigma2 {
        Some(design_sigma2) => Construction::GaussianApproximation { design_sigma2 },
        None => Construction::Custom,
    };
    let spec = CodeSpec::from_frozen_mask(frozen, construction)?;
    if let Some((k, line)) = k {
        if k != spec.k() {
            return Err(parse_err(
                line,
                format!("k={k} but mask leaves {} information bits", spec.k()),
            ));
        }
    }
    Ok(spec)
}

/// Renders a spec in the format read by [`parse_code_spec`].
pub fn write_code_spec(spec: &CodeSpec) -> String {
    let mut out = format!("N={}\nk={}\n", spec.n(), spec.k());
    if let Some(s2) = spec.construction().design_sigma2() {
        out.push_str(&format!("design_sigma2={s2}\n"));
    }
    out.push_str(&format!("mask={}\n", mask_to_hex(spec.frozen_mask())));
    out
}
