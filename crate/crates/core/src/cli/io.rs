//! Text files read and written by the commands.
//!
//! Bit words are strings of `0`/`1` (spaces allowed), one per line; LLR
//! frames are whitespace-separated numbers, one frame per line. Blank lines
//! and lines starting with `#` are skipped.

use std::path::{Path, PathBuf};

use fastssc::polar_code::{BitSlice, BitVec};

use super::CliError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Writes to `path`, or to stdout when it is `None`.
pub fn write_text(path: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Data(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Bit words with their line numbers.
pub fn parse_bits(text: &str) -> Result<Vec<(usize, BitVec)>, CliError> {
    content_lines(text)
        .map(|(line, l)| {
            l.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(CliError::Data(format!("line {line}: unexpected character {c:?}"))),
                })
                .collect::<Result<BitVec, _>>()
                .map(|b| (line, b))
        })
        .collect()
}

pub fn format_bits(bits: &BitSlice) -> String {
    let mut s: String = bits.iter().map(|b| if *b { '1' } else { '0' }).collect();
    s.push('\n');
    s
}

/// LLR frames; with `integers` every value must be an integer literal.
pub fn parse_llrs(text: &str, integers: bool) -> Result<Vec<Vec<f64>>, CliError> {
    content_lines(text)
        .map(|(line, l)| {
            l.split_whitespace()
                .map(|tok| {
                    let v = if integers {
                        tok.parse::<i64>().map(|v| v as f64).ok()
                    } else {
                        tok.parse::<f64>().ok().filter(|v| !v.is_nan())
                    };
                    v.ok_or_else(|| CliError::Data(format!("line {line}: bad value {tok:?}")))
                })
                .collect()
        })
        .collect()
}
