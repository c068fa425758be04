//! BPSK-AWGN Monte-Carlo simulation of the Fast-SSC decoder.
//!
//! Frames are simulated in rounds. In each round every worker decodes a
//! fixed share of the frames still allowed by the frame quota, drawing bits
//! and noise from its own ChaCha8 stream, and the counts are merged before
//! the stop rule is checked. The stream of worker `w` at operating point
//! `i` is stream `(i << 32) | w` of the generator seeded with the run seed,
//! so the totals depend only on the seed and the worker count.

mod bench;

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::engine::{Engine, EngineError};
use crate::polar_code::{encode_systematic, BitSlice, BitVec, CodeSpec};
use crate::quantize::{FixedDomain, FloatDomain, LlrDomain, QuantError, QuantScheme};
use crate::tree_compiler::{compile_spec, estimate_latency, CompileError, NodeRuleSet, Program};

pub use bench::{bench, BenchReport};

/// Clock frequency used to turn modeled cycle counts into throughput.
pub const MODEL_CLOCK_HZ: f64 = 100e6;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SimError {
    #[error("noise standard deviation must be positive, got {0}")]
    BadSigma(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Quant(#[from] QuantError),
}

/// Arithmetic used by the decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueDomain {
    Float,
    Fixed(QuantScheme),
}

impl FromStr for ValueDomain {
    type Err = QuantError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("float") {
            Ok(ValueDomain::Float)
        } else {
            s.parse().map(ValueDomain::Fixed)
        }
    }
}

impl fmt::Display for ValueDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueDomain::Float => f.write_str("float"),
            ValueDomain::Fixed(q) => write!(f, "{q}"),
        }
    }
}

/// Noise variance of unit-energy BPSK at `ebno_db` for a code of rate `rate`.
pub fn sigma2_for(rate: f64, ebno_db: f64) -> f64 {
    1.0 / (2.0 * rate * 10f64.powf(ebno_db / 10.0))
}

/// Sends `x` over BPSK (`0 -> +1`) with Gaussian noise of standard
/// deviation `sigma` and returns the channel LLRs `2y / sigma^2`.
pub fn awgn_bpsk_llr<R: Rng + ?Sized>(x: &BitSlice, sigma: f64, rng: &mut R) -> Result<Vec<f64>, SimError> {
    let mut out = vec![0.0; x.len()];
    awgn_bpsk_llr_into(x, sigma, rng, &mut out)?;
    Ok(out)
}

fn awgn_bpsk_llr_into<R: Rng + ?Sized>(x: &BitSlice, sigma: f64, rng: &mut R, out: &mut [f64]) -> Result<(), SimError> {
    let noise = Normal::new(0.0, sigma)
        .ok()
        .filter(|_| sigma > 0.0)
        .ok_or(SimError::BadSigma(sigma))?;
    let scale = 2.0 / (sigma * sigma);
    for (o, b) in out.iter_mut().zip(x) {
        let s = if *b { -1.0 } else { 1.0 };
        *o = scale * (s + noise.sample(rng));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub spec: CodeSpec,
    pub p: usize,
    pub rules: NodeRuleSet,
    pub domain: ValueDomain,
    pub ebno_db: Vec<f64>,
    pub max_frames: u64,
    pub min_frame_errors: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SimConfig {
    /// Defaults: `P = 256`, all node types, floating point, at most `10^7`
    /// frames or 100 frame errors per point, seed 0, one worker.
    pub fn new(spec: CodeSpec, ebno_db: Vec<f64>) -> Self {
        Self {
            spec,
            p: 256,
            rules: NodeRuleSet::fast_ssc(),
            domain: ValueDomain::Float,
            ebno_db,
            max_frames: 10_000_000,
            min_frame_errors: 100,
            seed: 0,
            workers: 1,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::Config(m.to_string()));
        if self.ebno_db.is_empty() {
            return bad("the Eb/N0 list is empty");
        }
        if self.ebno_db.iter().any(|e| !e.is_finite()) {
            return bad("Eb/N0 values must be finite");
        }
        if self.min_frame_errors == 0 {
            return bad("min frame errors must be at least 1");
        }
        if self.max_frames == 0 {
            return bad("max frames must be at least 1");
        }
        if self.workers == 0 {
            return bad("at least one worker is needed");
        }
        if self.spec.k() == 0 {
            return bad("the code carries no information bits");
        }
        Ok(())
    }
}

/// Results at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub ebno_db: f64,
    pub sigma2: f64,
    pub frames: u64,
    /// Errors among the information bits.
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub cycles_per_frame: u64,
    /// Wall-clock time spent decoding, summed over workers.
    pub decode_time: Duration,
    k: usize,
}

impl SimResult {
    pub fn ber(&self) -> f64 {
        ratio(self.bit_errors, self.frames * self.k as u64)
    }

    pub fn fer(&self) -> f64 {
        ratio(self.frame_errors, self.frames)
    }

    /// Information throughput of the modeled hardware at [`MODEL_CLOCK_HZ`].
    pub fn modeled_throughput_bps(&self) -> f64 {
        modeled_bps(self.k, self.cycles_per_frame)
    }

    /// Information bits decoded per second of decoding time.
    pub fn measured_throughput_bps(&self) -> f64 {
        let t = self.decode_time.as_secs_f64();
        if t > 0.0 {
            (self.frames * self.k as u64) as f64 / t
        } else {
            0.0
        }
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub(crate) fn modeled_bps(k: usize, cycles: u64) -> f64 {
    if cycles == 0 {
        0.0
    } else {
        k as f64 * MODEL_CLOCK_HZ / cycles as f64
    }
}

pub const CSV_HEADER: &str =
    "ebno_db,sigma2,frames,bit_errors,frame_errors,ber,fer,info_throughput_bps,cycles_per_frame";

/// CSV table of `rows`. The throughput column is the modeled one, so the
/// output depends only on the counts.
pub fn to_csv(rows: &[SimResult]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{:e},{},{},{},{:e},{:e},{:.0},{}",
            r.ebno_db,
            r.sigma2,
            r.frames,
            r.bit_errors,
            r.frame_errors,
            r.ber(),
            r.fer(),
            r.modeled_throughput_bps(),
            r.cycles_per_frame
        );
    }
    s
}

pub fn run_simulation(config: &SimConfig) -> Result<Vec<SimResult>, SimError> {
    config.validate()?;
    let program = compile_spec(&config.spec, config.p, config.rules)?;
    match config.domain {
        ValueDomain::Float => run_with(config, &program, FloatDomain),
        ValueDomain::Fixed(q) => run_with(config, &program, FixedDomain::new(q)),
    }
}

/// Frames per worker per round; about 16k channel values.
fn batch_size(n: usize) -> u64 {
    ((1usize << 14) / n).max(1) as u64
}

#[derive(Default)]
struct Counts {
    frames: u64,
    bit_errors: u64,
    frame_errors: u64,
    time: Duration,
}

struct Worker<D: LlrDomain> {
    engine: Engine<D>,
    rng: ChaCha8Rng,
    info: BitVec,
    llr: Vec<f64>,
    channel: Vec<D::Llr>,
    out: Vec<u8>,
}

impl<D: LlrDomain> Worker<D> {
    fn run(&mut self, spec: &CodeSpec, sigma: f64, frames: u64) -> Result<Counts, SimError> {
        let mut c = Counts::default();
        let start = Instant::now();
        for _ in 0..frames {
            for mut b in self.info.iter_mut() {
                *b = self.rng.random();
            }
            let x = encode_systematic(&self.info, spec).map_err(|e| SimError::Config(e.to_string()))?;
            awgn_bpsk_llr_into(&x, sigma, &mut self.rng, &mut self.llr)?;
            let d = self.engine.domain();
            for (q, &v) in self.channel.iter_mut().zip(&self.llr) {
                *q = d.from_channel(v);
            }
            self.engine.execute_into(&self.channel, &mut self.out)?;
            let errs = spec
                .info_positions()
                .iter()
                .zip(self.info.iter())
                .filter(|(&p, a)| (self.out[p] != 0) != **a)
                .count() as u64;
            c.frames += 1;
            c.bit_errors += errs;
            c.frame_errors += u64::from(errs > 0);
        }
        c.time = start.elapsed();
        Ok(c)
    }
}

fn run_with<D: LlrDomain>(config: &SimConfig, program: &Program, domain: D) -> Result<Vec<SimResult>, SimError> {
    let spec = &config.spec;
    let n = spec.n();
    let cycles = estimate_latency(program)?;
    let engine = Engine::new(program, domain)?;
    let batch = batch_size(n);
    let mut rows = Vec::with_capacity(config.ebno_db.len());
    for (point, &ebno) in config.ebno_db.iter().enumerate() {
        let sigma2 = sigma2_for(spec.rate(), ebno);
        let sigma = sigma2.sqrt();
        let mut workers: Vec<Worker<D>> = (0..config.workers)
            .map(|w| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(((point as u64) << 32) | w as u64);
                Worker {
                    engine: engine.clone(),
                    rng,
                    info: BitVec::repeat(false, spec.k()),
                    llr: vec![0.0; n],
                    channel: vec![D::Llr::default(); n],
                    out: vec![0; n],
                }
            })
            .collect();
        let mut total = Counts::default();
        while total.frames < config.max_frames && total.frame_errors < config.min_frame_errors {
            let quota = (config.max_frames - total.frames).min(batch * config.workers as u64);
            let shares = split(quota, config.workers);
            let results: Vec<Result<Counts, SimError>> = if config.workers == 1 {
                vec![workers[0].run(spec, sigma, shares[0])]
            } else {
                std::thread::scope(|s| {
                    let handles: Vec<_> = workers
                        .iter_mut()
                        .zip(&shares)
                        .map(|(w, &f)| s.spawn(move || w.run(spec, sigma, f)))
                        .collect();
                    handles
                        .into_iter()
                        .map(|h| h.join().expect("simulation worker panicked"))
                        .collect()
                })
            };
            for r in results {
                let c = r?;
                total.frames += c.frames;
                total.bit_errors += c.bit_errors;
                total.frame_errors += c.frame_errors;
                total.time += c.time;
            }
        }
        rows.push(SimResult {
            ebno_db: ebno,
            sigma2,
            frames: total.frames,
            bit_errors: total.bit_errors,
            frame_errors: total.frame_errors,
            cycles_per_frame: cycles,
            decode_time: total.time,
            k: spec.k(),
        });
    }
    Ok(rows)
}

/// Splits `total` frames over `workers` as evenly as possible, earlier
/// workers taking the remainder.
fn split(total: u64, workers: usize) -> Vec<u64> {
    let w = workers as u64;
    (0..w).map(|i| total / w + u64::from(i < total % w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma2_hand_values() {
        assert_eq!(sigma2_for(0.5, 0.0), 1.0);
        assert_eq!(sigma2_for(1.0, 0.0), 0.5);
        assert!((sigma2_for(0.5, 10.0) - 0.1).abs() < 1e-15);
        assert!((sigma2_for(0.25, 3.0) - 2.0 / 10f64.powf(0.3)).abs() < 1e-15);
    }

    #[test]
    fn llr_signs_and_seed() {
        let x: BitVec = [false, true, true, false].iter().copied().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = awgn_bpsk_llr(&x, 1e-3, &mut rng).unwrap();
        assert!(l[0] > 0.0 && l[1] < 0.0 && l[2] < 0.0 && l[3] > 0.0);
        let a = awgn_bpsk_llr(&x, 0.7, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = awgn_bpsk_llr(&x, 0.7, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert!(matches!(awgn_bpsk_llr(&x, 0.0, &mut rng), Err(SimError::BadSigma(_))));
        assert!(matches!(awgn_bpsk_llr(&x, -1.0, &mut rng), Err(SimError::BadSigma(_))));
    }

    #[test]
    fn llr_moments() {
        let sigma: f64 = 0.8;
        let x = BitVec::repeat(false, 100_000);
        let l = awgn_bpsk_llr(&x, sigma, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let n = l.len() as f64;
        let mean = l.iter().sum::<f64>() / n;
        let var = l.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let s2 = sigma * sigma;
        // standard errors are about 0.3% of each target
        assert!((mean / (2.0 / s2) - 1.0).abs() < 0.02, "{mean}");
        assert!((var / (4.0 / s2) - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn split_is_even() {
        assert_eq!(split(10, 3), [4, 3, 3]);
        assert_eq!(split(2, 4), [1, 1, 0, 0]);
        assert_eq!(split(0, 2), [0, 0]);
    }

    #[test]
    fn domain_parsing() {
        assert_eq!("float".parse::<ValueDomain>().unwrap(), ValueDomain::Float);
        let q: ValueDomain = "7:5:1".parse().unwrap();
        assert_eq!(q, ValueDomain::Fixed(QuantScheme::new(7, 5, 1).unwrap()));
        assert_eq!(q.to_string(), "7:5:1");
        assert!("7:5".parse::<ValueDomain>().is_err());
    }

    #[test]
    fn config_errors() {
        let spec = CodeSpec::construct(6, 32, 0.5).unwrap();
        let mut c = SimConfig::new(spec, vec![]);
        assert!(matches!(run_simulation(&c), Err(SimError::Config(_))));
        c.ebno_db = vec![2.0];
        c.min_frame_errors = 0;
        assert!(matches!(run_simulation(&c), Err(SimError::Config(_))));
        c.min_frame_errors = 1;
        c.workers = 0;
        assert!(matches!(run_simulation(&c), Err(SimError::Config(_))));
    }

    #[test]
    fn high_snr_is_error_free() {
        let spec = CodeSpec::construct(10, 512, sigma2_for(0.5, 2.0)).unwrap();
        let mut c = SimConfig::new(spec, vec![12.0]);
        c.max_frames = 1000;
        let rows = run_simulation(&c).unwrap();
        assert_eq!(rows[0].frames, 1000);
        assert_eq!(rows[0].frame_errors, 0);
        assert_eq!(rows[0].fer(), 0.0);
    }

    #[test]
    fn counts_are_consistent_and_repeatable() {
        let spec = CodeSpec::construct(8, 128, sigma2_for(0.5, 2.0)).unwrap();
        let mut c = SimConfig::new(spec, vec![1.0, 2.0]);
        c.min_frame_errors = 30;
        c.workers = 3;
        c.seed = 5;
        let a = run_simulation(&c).unwrap();
        let b = run_simulation(&c).unwrap();
        assert_eq!(to_csv(&a), to_csv(&b));
        for r in &a {
            assert!(r.frame_errors >= 30);
            assert!(r.frame_errors <= r.frames);
            assert!(r.bit_errors <= 128 * r.frames);
            assert!(r.bit_errors >= r.frame_errors);
            assert_eq!(r.fer(), r.frame_errors as f64 / r.frames as f64);
        }
        let csv = to_csv(&a);
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(csv.lines().count(), 3);
    }
}
