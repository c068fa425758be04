use std::fmt;
use std::time::{Duration, Instant};

use crate::engine::Engine;
use crate::quantize::{FixedDomain, FloatDomain, LlrDomain};
use crate::tree_compiler::{estimate_latency, Program};

use super::{modeled_bps, SimError, ValueDomain};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub frames: usize,
    pub k: usize,
    pub workers: usize,
    pub elapsed: Duration,
    /// Modeled latency of one frame.
    pub cycles_per_frame: u64,
}

impl BenchReport {
    /// Measured information bits per second; 0 when nothing was decoded.
    pub fn info_throughput_bps(&self) -> f64 {
        let t = self.elapsed.as_secs_f64();
        if self.frames == 0 || t == 0.0 {
            0.0
        } else {
            (self.frames * self.k) as f64 / t
        }
    }

    pub fn modeled_throughput_bps(&self) -> f64 {
        modeled_bps(self.k, self.cycles_per_frame)
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "frames: {}", self.frames)?;
        writeln!(f, "workers: {}", self.workers)?;
        writeln!(f, "elapsed_s: {:.6}", self.elapsed.as_secs_f64())?;
        writeln!(f, "info_throughput_bps: {:.0}", self.info_throughput_bps())?;
        writeln!(f, "cycles_per_frame: {}", self.cycles_per_frame)?;
        write!(f, "modeled_throughput_bps: {:.0}", self.modeled_throughput_bps())
    }
}

/// Decodes the channel frames `frames` with `workers` threads and reports
/// the wall time next to the modeled cycle count.
pub fn bench(
    program: &Program,
    domain: ValueDomain,
    frames: &[Vec<f64>],
    workers: usize,
) -> Result<BenchReport, SimError> {
    match domain {
        ValueDomain::Float => bench_with(program, FloatDomain, frames, workers),
        ValueDomain::Fixed(q) => bench_with(program, FixedDomain::new(q), frames, workers),
    }
}

fn bench_with<D: LlrDomain>(
    program: &Program,
    domain: D,
    frames: &[Vec<f64>],
    workers: usize,
) -> Result<BenchReport, SimError> {
    if workers == 0 {
        return Err(SimError::Config("at least one worker is needed".into()));
    }
    let cycles_per_frame = estimate_latency(program)?;
    let engine = Engine::new(program, domain)?;
    let inputs: Vec<Vec<D::Llr>> = frames
        .iter()
        .map(|f| f.iter().map(|&v| engine.domain().from_channel(v)).collect())
        .collect();
    let chunk = inputs.len().div_ceil(workers).max(1);
    let start = Instant::now();
    std::thread::scope(|s| {
        let handles: Vec<_> = inputs
            .chunks(chunk)
            .map(|part| {
                let mut e = engine.clone();
                s.spawn(move || {
                    let mut out = vec![0u8; e.n()];
                    part.iter().try_for_each(|f| e.execute_into(f, &mut out))
                })
            })
            .collect();
        handles
            .into_iter()
            .try_for_each(|h| h.join().expect("bench worker panicked"))
    })?;
    Ok(BenchReport {
        frames: frames.len(),
        k: program.k(),
        workers,
        elapsed: start.elapsed(),
        cycles_per_frame,
    })
}
