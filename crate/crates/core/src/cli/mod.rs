//! Command-line front end.

mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fastssc::engine::Engine;
use fastssc::polar_code::{encode_systematic, extract_info, parse_code_spec, write_code_spec, CodeSpec};
use fastssc::quantize::{FixedDomain, FixedLlr, FloatDomain, LlrDomain};
use fastssc::sc_reference::sc_decode;
use fastssc::sim::{awgn_bpsk_llr, bench, run_simulation, sigma2_for, to_csv, SimConfig, ValueDomain};
use fastssc::tree_compiler::{build_tree, compile, estimate_latency, node_stats, NodeKind, NodeRuleSet, Program};

use io::{format_bits, parse_bits, parse_llrs, read_text, write_text};

/// Failure of a command: bad usage exits with 1, bad data with 2.
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn data(e: impl std::fmt::Display) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

#[derive(Parser, Debug)]
#[command(name = "fastssc", version, about = "Fast-SSC polar code toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct a code and print its mask file
    Construct {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile a code into a decoder program
    Compile {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        decoder: DecoderArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the packed 5-bit form here
        #[arg(long)]
        binary: Option<PathBuf>,
    },
    /// Print a program with its latency and instruction counts
    ShowProgram {
        #[arg(long)]
        program: PathBuf,
    },
    /// Print decoder-tree node statistics
    Stats {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        decoder: DecoderArgs,
    },
    /// Systematically encode information words, one per line
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode channel LLR frames, one per line
    Decode {
        #[arg(long, value_enum, default_value_t = Algo::FastSsc)]
        algo: Algo,
        #[arg(long)]
        program: Option<PathBuf>,
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        decoder: DecoderArgs,
        #[arg(long, default_value = "float")]
        quant: ValueDomain,
        /// With a fixed-point scheme, read raw integer LLRs instead of reals
        #[arg(long)]
        raw: bool,
        /// Print the information bits instead of the codeword
        #[arg(long)]
        info: bool,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a BPSK-AWGN Monte-Carlo simulation
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        decoder: DecoderArgs,
        #[arg(long, default_value = "float")]
        quant: ValueDomain,
        /// Eb/N0 points in dB
        #[arg(long, value_delimiter = ',', required = true)]
        ebno: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        min_frame_errors: u64,
        #[arg(long, default_value_t = 10_000_000)]
        max_frames: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Measure decoding speed on random noisy frames
    Bench {
        #[arg(long)]
        program: Option<PathBuf>,
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        decoder: DecoderArgs,
        #[arg(long, default_value = "float")]
        quant: ValueDomain,
        #[arg(long, default_value_t = 1000)]
        frames: usize,
        /// Channel quality of the generated frames, in dB
        #[arg(long, default_value_t = 4.0)]
        ebno: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

#[derive(Args, Debug)]
struct CodeArgs {
    /// Mask file instead of construction parameters
    #[arg(long, conflicts_with_all = ["n_bits", "k", "design_sigma2", "design_ebno"])]
    mask: Option<PathBuf>,
    #[arg(long)]
    n_bits: Option<u32>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, conflicts_with = "design_ebno")]
    design_sigma2: Option<f64>,
    /// Design point in dB, converted with the code rate
    #[arg(long)]
    design_ebno: Option<f64>,
}

#[derive(Args, Debug)]
struct DecoderArgs {
    #[arg(long, default_value_t = 256)]
    p: usize,
    #[arg(long, value_enum, default_value_t = Rules::FastSsc)]
    rules: Rules,
    /// Disable length-4 ML nodes
    #[arg(long)]
    no_ml4: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Rules {
    FastSsc,
    MlSsc,
    Ssc,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Algo {
    Sc,
    FastSsc,
}

impl DecoderArgs {
    fn rules(&self) -> NodeRuleSet {
        let r = match self.rules {
            Rules::FastSsc => NodeRuleSet::fast_ssc(),
            Rules::MlSsc => NodeRuleSet::ml_ssc(),
            Rules::Ssc => NodeRuleSet::ssc(),
        };
        if self.no_ml4 {
            r.without_ml4()
        } else {
            r
        }
    }

    fn compile(&self, spec: &CodeSpec) -> Result<Program, CliError> {
        let tree = build_tree(spec, self.p, self.rules()).map_err(|e| CliError::Usage(e.to_string()))?;
        compile(&tree).map_err(CliError::data)
    }
}

impl CodeArgs {
    fn is_given(&self) -> bool {
        self.mask.is_some() || self.n_bits.is_some() || self.k.is_some()
    }

    fn spec(&self) -> Result<CodeSpec, CliError> {
        if let Some(path) = &self.mask {
            return parse_code_spec(&read_text(path)?).map_err(CliError::data);
        }
        let (Some(n_bits), Some(k)) = (self.n_bits, self.k) else {
            return Err(CliError::Usage("give --mask, or --n-bits and --k".into()));
        };
        let sigma2 = match (self.design_sigma2, self.design_ebno) {
            (Some(s), _) => s,
            (None, Some(e)) => {
                let n = 1u64.checked_shl(n_bits).unwrap_or(0) as f64;
                sigma2_for(k as f64 / n, e)
            }
            (None, None) => return Err(CliError::Usage("give --design-sigma2 or --design-ebno".into())),
        };
        CodeSpec::construct(n_bits, k, sigma2).map_err(|e| CliError::Usage(e.to_string()))
    }
}

fn program_or_compile(path: &Option<PathBuf>, code: &CodeArgs, decoder: &DecoderArgs) -> Result<Program, CliError> {
    match path {
        Some(_) if code.is_given() => Err(CliError::Usage("give either --program or a code, not both".into())),
        Some(p) => Program::parse(&read_text(p)?).map_err(CliError::data),
        None => decoder.compile(&code.spec()?),
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> CliResult {
    match cmd {
        Command::Construct { code, out } => write_text(&out, &write_code_spec(&code.spec()?)),
        Command::Compile {
            code,
            decoder,
            out,
            binary,
        } => {
            let prog = decoder.compile(&code.spec()?)?;
            if let Some(path) = &binary {
                std::fs::write(path, prog.to_binary())
                    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            }
            write_text(&out, &prog.to_text())
        }
        Command::ShowProgram { program } => {
            let prog = Program::parse(&read_text(&program)?).map_err(CliError::data)?;
            let latency = estimate_latency(&prog).map_err(CliError::data)?;
            let mut s = prog.to_text();
            s.push_str(&format!(
                "# instructions: {}\n# latency_cycles: {latency}\n",
                prog.len()
            ));
            write_text(&None, &s)
        }
        Command::Stats { code, decoder } => {
            let spec = code.spec()?;
            let mut s = String::new();
            for (name, rules) in [
                ("spc-only", NodeRuleSet::spc_census()),
                ("rep-only", NodeRuleSet::rep_census()),
                ("decoder", decoder.rules()),
            ] {
                let tree = build_tree(&spec, decoder.p, rules).map_err(|e| CliError::Usage(e.to_string()))?;
                s.push_str(&format!("{name}: {}\n", node_stats(&tree)));
                if name == "decoder" {
                    let counts: Vec<String> = [
                        NodeKind::Rate0,
                        NodeKind::Rate1,
                        NodeKind::Rep,
                        NodeKind::Spc,
                        NodeKind::RepSpc,
                        NodeKind::Ml4,
                        NodeKind::RateR,
                    ]
                    .iter()
                    .map(|k| format!("{k}={}", tree.count(*k)))
                    .collect();
                    s.push_str(&format!("kinds: {}\n", counts.join(" ")));
                    let prog = compile(&tree).map_err(CliError::data)?;
                    let latency = estimate_latency(&prog).map_err(CliError::data)?;
                    s.push_str(&format!("instructions: {}\nlatency_cycles: {latency}\n", prog.len()));
                }
            }
            write_text(&None, &s)
        }
        Command::Encode { code, input, out } => {
            let spec = code.spec()?;
            let mut s = String::new();
            for (line, bits) in parse_bits(&read_text(&input)?)? {
                let x = encode_systematic(&bits, &spec).map_err(|e| CliError::Data(format!("line {line}: {e}")))?;
                s.push_str(&format_bits(&x));
            }
            write_text(&out, &s)
        }
        Command::Decode {
            algo,
            program,
            code,
            decoder,
            quant,
            raw,
            info,
            input,
            out,
        } => {
            if raw && quant == ValueDomain::Float {
                return Err(CliError::Usage("--raw needs a fixed-point --quant scheme".into()));
            }
            let frames = parse_llrs(&read_text(&input)?, raw)?;
            let text = match algo {
                Algo::Sc => {
                    if program.is_some() {
                        return Err(CliError::Usage("--algo sc decodes a code, not a program".into()));
                    }
                    let spec = code.spec()?;
                    match quant {
                        ValueDomain::Float => decode_sc(FloatDomain, &spec, &frames, info)?,
                        ValueDomain::Fixed(q) => {
                            let d = FixedDomain::new(q);
                            decode_sc(d, &spec, &fixed_frames(&d, &frames, raw)?, info)?
                        }
                    }
                }
                Algo::FastSsc => {
                    let prog = program_or_compile(&program, &code, &decoder)?;
                    match quant {
                        ValueDomain::Float => decode_fast(FloatDomain, &prog, &frames, info)?,
                        ValueDomain::Fixed(q) => {
                            let d = FixedDomain::new(q);
                            decode_fast(d, &prog, &fixed_frames(&d, &frames, raw)?, info)?
                        }
                    }
                }
            };
            write_text(&out, &text)
        }
        Command::Simulate {
            code,
            decoder,
            quant,
            ebno,
            seed,
            min_frame_errors,
            max_frames,
            workers,
            csv,
        } => {
            let config = SimConfig {
                spec: code.spec()?,
                p: decoder.p,
                rules: decoder.rules(),
                domain: quant,
                ebno_db: ebno,
                max_frames,
                min_frame_errors,
                seed,
                workers,
            };
            let rows = run_simulation(&config).map_err(|e| CliError::Usage(e.to_string()))?;
            write_text(&csv, &to_csv(&rows))
        }
        Command::Bench {
            program,
            code,
            decoder,
            quant,
            frames,
            ebno,
            seed,
            workers,
        } => {
            let prog = program_or_compile(&program, &code, &decoder)?;
            let spec = prog.code_spec().map_err(CliError::data)?;
            let sigma = sigma2_for(spec.rate().max(f64::MIN_POSITIVE), ebno).sqrt();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let zero = fastssc::polar_code::BitVec::repeat(false, spec.n());
            let channel: Vec<Vec<f64>> = (0..frames)
                .map(|_| awgn_bpsk_llr(&zero, sigma, &mut rng))
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let report = bench(&prog, quant, &channel, workers).map_err(|e| CliError::Usage(e.to_string()))?;
            write_text(&None, &format!("{report}\n"))
        }
    }
}

/// Converts frames to fixed point, either quantizing reals or taking the
/// values as raw channel integers.
fn fixed_frames(d: &FixedDomain, frames: &[Vec<f64>], raw: bool) -> Result<Vec<Vec<FixedLlr>>, CliError> {
    let max = d.scheme().max_channel();
    frames
        .iter()
        .enumerate()
        .map(|(i, f)| {
            f.iter()
                .map(|&v| {
                    if !raw {
                        Ok(d.from_channel(v))
                    } else if v.fract() == 0.0 && v.abs() <= f64::from(max) {
                        Ok(FixedLlr::from_raw(v as i32))
                    } else {
                        Err(CliError::Data(format!(
                            "line {}: raw value {v} is not an integer in ±{max}",
                            i + 1
                        )))
                    }
                })
                .collect()
        })
        .collect()
}

fn render(x: &fastssc::polar_code::BitVec, spec: &CodeSpec, info: bool) -> Result<String, CliError> {
    if info {
        Ok(format_bits(&extract_info(x, spec).map_err(CliError::data)?))
    } else {
        Ok(format_bits(x))
    }
}

fn decode_sc<D: LlrDomain>(d: D, spec: &CodeSpec, frames: &[Vec<D::Llr>], info: bool) -> Result<String, CliError> {
    let mut s = String::new();
    for (i, f) in frames.iter().enumerate() {
        let x = sc_decode(&d, f, spec).map_err(|e| CliError::Data(format!("frame {}: {e}", i + 1)))?;
        s.push_str(&render(&x, spec, info)?);
    }
    Ok(s)
}

fn decode_fast<D: LlrDomain>(d: D, prog: &Program, frames: &[Vec<D::Llr>], info: bool) -> Result<String, CliError> {
    let spec = prog.code_spec().map_err(CliError::data)?;
    let mut engine = Engine::new(prog, d).map_err(CliError::data)?;
    let mut s = String::new();
    for (i, f) in frames.iter().enumerate() {
        let x = engine
            .execute(f)
            .map_err(|e| CliError::Data(format!("frame {}: {e}", i + 1)))?;
        s.push_str(&render(&x, &spec, info)?);
    }
    Ok(s)
}
