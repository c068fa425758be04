//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use fastssc::engine::Engine;
use fastssc::kernels::{decode_ml4, decode_spc};
use fastssc::polar_code::{encode_polar, encode_systematic, extract_info, BitVec, CodeSpec, Construction};
use fastssc::quantize::{FixedDomain, FloatDomain, LlrDomain, QuantScheme};
use fastssc::sc_reference::sc_decode;
use fastssc::sim::{awgn_bpsk_llr, run_simulation, sigma2_for, to_csv, SimConfig, ValueDomain};
use fastssc::tree_compiler::{build_tree, compile_spec, estimate_latency, node_stats, NodeRuleSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LATENCY_TOL: f64 = 0.10;
const STATS_TOL: f64 = 0.10;
const STATS_SIGMA2: f64 = 0.1936;
const PROGRAM_BUDGET: usize = 3000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    if target == 0.0 {
        value == 0.0
    } else {
        (value / target - 1.0).abs() <= tol
    }
}

fn sc_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    let mut frames = 0;
    for n_bits in [6u32, 8, 10] {
        for ebno in [1.0, 3.0, 5.0] {
            let n = 1usize << n_bits;
            let k = n / 2;
            let sigma2 = sigma2_for(0.5, ebno);
            let spec = CodeSpec::construct(n_bits, k, sigma2).unwrap();
            let prog = compile_spec(&spec, 16, NodeRuleSet::fast_ssc().without_ml4()).unwrap();
            let mut engine = Engine::new(&prog, FloatDomain).unwrap();
            let mut info = BitVec::repeat(false, k);
            for _ in 0..1000 {
                for mut b in info.iter_mut() {
                    *b = rng.random();
                }
                let x = encode_systematic(&info, &spec).unwrap();
                let llr = awgn_bpsk_llr(&x, sigma2.sqrt(), &mut rng).unwrap();
                if engine.execute(&llr).unwrap() != sc_decode(&FloatDomain, &llr, &spec).unwrap() {
                    mismatches += 1;
                }
                frames += 1;
            }
        }
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches in {frames} frames"))
}

/// Most likely codeword of the code spanned by the natural-order rows
/// `info` of the polar transform of length `n`, by enumeration.
fn brute_force_ml(alpha: &[f64], info: &[usize]) -> Vec<u8> {
    let n = alpha.len();
    let row = |i: usize| -> Vec<u8> { (0..n).map(|j| u8::from(i & j == j)).collect() };
    let rows: Vec<Vec<u8>> = info.iter().map(|&i| row(i)).collect();
    let mut best = (f64::NEG_INFINITY, vec![]);
    for m in 0..1usize << rows.len() {
        let mut cw = vec![0u8; n];
        for (r, bits) in rows.iter().enumerate() {
            if m >> r & 1 == 1 {
                cw.iter_mut().zip(bits).for_each(|(c, b)| *c ^= b);
            }
        }
        let corr: f64 = cw.iter().zip(alpha).map(|(&c, &a)| if c == 0 { a } else { -a }).sum();
        if corr > best.0 {
            best = (corr, cw);
        }
    }
    best.1
}

/// Best even-weight word by enumerating every subset of flipped positions.
fn brute_force_spc(alpha: &[f64]) -> Vec<u8> {
    let n = alpha.len();
    let mut flipped = vec![0.0f64; 1 << n];
    let total: f64 = alpha.iter().sum();
    let mut best = (f64::NEG_INFINITY, 0usize);
    for m in 0..1usize << n {
        if m > 0 {
            let low = m.trailing_zeros() as usize;
            flipped[m] = flipped[m & (m - 1)] + alpha[low];
        }
        if m.count_ones() % 2 == 0 {
            let corr = total - 2.0 * flipped[m];
            if corr > best.0 {
                best = (corr, m);
            }
        }
    }
    (0..n).map(|i| (best.1 >> i & 1) as u8).collect()
}

fn to_bytes(b: &BitVec) -> Vec<u8> {
    b.iter().map(|x| u8::from(*x)).collect()
}

fn kernel_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad_spc = 0;
    for n in [4usize, 8, 16] {
        for _ in 0..10_000 {
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(-4.0..4.0)).collect();
            if to_bytes(&decode_spc(&FloatDomain, &a).unwrap()) != brute_force_spc(&a) {
                bad_spc += 1;
            }
        }
    }
    let mut bad_ml = 0;
    for _ in 0..100_000 {
        let a: Vec<f64> = (0..4).map(|_| rng.random_range(-4.0..4.0)).collect();
        if to_bytes(&decode_ml4(&FloatDomain, &a).unwrap()) != brute_force_ml(&a, &[2, 3]) {
            bad_ml += 1;
        }
    }
    outcome(
        bad_spc + bad_ml == 0,
        format!("SPC {bad_spc}/30000 mismatches, ML {bad_ml}/100000 mismatches"),
    )
}

fn latency_table() -> Outcome {
    let spec = CodeSpec::construct(15, 29492, STATS_SIGMA2).unwrap();
    let base = NodeRuleSet::ml_ssc();
    let columns = [
        ("none", base, 5286.0),
        ("SPC", base.with_spc(true), 3360.0),
        ("REP-SPC", base.with_rep_spc(true), 4742.0),
        ("REP", base.with_rep(true), 5042.0),
        ("all", NodeRuleSet::fast_ssc(), 2847.0),
    ];
    let mut pass = true;
    let mut parts = vec![];
    let mut lat = vec![];
    for (name, rules, target) in columns {
        let l = estimate_latency(&compile_spec(&spec, 256, rules).unwrap()).unwrap();
        let ok = within(l as f64, target, LATENCY_TOL);
        pass &= ok;
        parts.push(format!(
            "{name} {l} vs {target} ({:+.1}%)",
            (l as f64 / target - 1.0) * 100.0
        ));
        lat.push(l);
    }
    let ordered = lat[4] < lat[1] && lat[1] < lat[2] && lat[2] < lat[3] && lat[3] < lat[0];
    parts.push(format!("ordering {}", if ordered { "holds" } else { "broken" }));
    outcome(pass && ordered, parts.join(", "))
}

fn node_statistics() -> Outcome {
    // (k, spc table: all + bins, rep table: all + bins)
    let tables: [(usize, [usize; 5], [usize; 4]); 2] = [
        (27568, [3421, 759, 190, 43, 10], [5501, 949, 53, 0]),
        (16384, [9593, 2240, 274, 19, 1], [10381, 2290, 244, 0]),
    ];
    let mut pass = true;
    let mut parts = vec![];
    for (k, spc_ref, rep_ref) in tables {
        let spec = CodeSpec::construct(15, k, STATS_SIGMA2).unwrap();
        let s = node_stats(&build_tree(&spec, 256, NodeRuleSet::spc_census()).unwrap());
        let r = node_stats(&build_tree(&spec, 256, NodeRuleSet::rep_census()).unwrap());
        let spc = [s.total, s.spc[0], s.spc[1], s.spc[2], s.spc[3]];
        let rep = [r.total, r.rep[0], r.rep[1], r.rep[2]];
        let worst = spc
            .iter()
            .zip(&spc_ref)
            .chain(rep.iter().zip(&rep_ref))
            .map(|(&v, &t)| {
                pass &= within(v as f64, t as f64, STATS_TOL);
                if t == 0 {
                    if v == 0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    (v as f64 / t as f64 - 1.0).abs()
                }
            })
            .fold(0.0, f64::max);
        parts.push(format!("k={k} spc {spc:?} rep {rep:?} worst bin {:.1}%", worst * 100.0));
    }
    outcome(pass, parts.join("; "))
}

// Every N = 32768 code the other checks use, with the P it is compiled for.
fn long_codes() -> Vec<(usize, f64, usize)> {
    let mut codes = vec![
        (29492, STATS_SIGMA2, 256),
        (27568, STATS_SIGMA2, 256),
        (16384, STATS_SIGMA2, 256),
    ];
    for (i, k) in noiseless_ks(1 << 15).into_iter().enumerate() {
        codes.push((k, noiseless_sigma2(i), 64));
    }
    codes
}

fn program_budget() -> Outcome {
    let mut over = 0;
    let mut parts = vec![];
    for (k, sigma2, p) in long_codes() {
        let spec = CodeSpec::construct(15, k, sigma2).unwrap();
        let len = compile_spec(&spec, p, NodeRuleSet::fast_ssc()).unwrap().len();
        over += usize::from(len > PROGRAM_BUDGET);
        parts.push(format!("k={k} s2={sigma2:.4}: {len}"));
    }
    let n = parts.len();
    outcome(
        over == 0,
        format!(
            "{over}/{n} codes over {PROGRAM_BUDGET} instructions; {}",
            parts.join(", ")
        ),
    )
}

fn systematic_encoding() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let specs: Vec<CodeSpec> = [(6u32, 20usize), (8, 128), (10, 860), (11, 1723)]
        .iter()
        .map(|&(n, k)| CodeSpec::construct(n, k, 0.4).unwrap())
        .collect();
    let mut failures = 0;
    for t in 0..100_000 {
        let spec = &specs[t % specs.len()];
        let a: BitVec = (0..spec.k()).map(|_| rng.random::<bool>()).collect();
        let x = encode_systematic(&a, spec).unwrap();
        let u = encode_polar(&x).unwrap();
        let frozen_clear = u.iter_ones().all(|i| !spec.is_frozen(i));
        if extract_info(&x, spec).unwrap() != a || !frozen_clear {
            failures += 1;
        }
    }
    let spec = CodeSpec::from_frozen_mask(
        [1, 0, 1, 0, 1, 0, 0, 0].iter().map(|&b| b == 1).collect(),
        Construction::Custom,
    )
    .unwrap();
    let placed = spec.info_positions() == [1, 3, 5, 6, 7];
    let a: BitVec = [true, false, true, true, false].iter().copied().collect();
    let x = encode_systematic(&a, &spec).unwrap();
    let on_info = [1, 3, 5, 6, 7].iter().zip(a.iter()).all(|(&p, b)| x[p] == *b);
    outcome(
        failures == 0 && placed && on_info,
        format!(
            "{failures}/100000 failed round trips, (8,5) placement {}",
            if placed && on_info { "exact" } else { "wrong" }
        ),
    )
}

fn quantization() -> Outcome {
    let n_bits = 11;
    let k = 1723;
    let rate = k as f64 / 2048.0;
    let spec = CodeSpec::construct(n_bits, k, sigma2_for(rate, 4.5)).unwrap();
    let points = vec![3.5, 4.0, 4.5];
    let fer = |domain: ValueDomain| -> Vec<(f64, u64)> {
        let mut c = SimConfig::new(spec.clone(), points.clone());
        c.p = 64;
        c.domain = domain;
        c.min_frame_errors = 100;
        c.max_frames = 5_000_000;
        c.seed = 7;
        run_simulation(&c)
            .unwrap()
            .iter()
            .map(|r| (r.fer(), r.frame_errors))
            .collect()
    };
    let float = fer(ValueDomain::Float);
    let q751 = fer(ValueDomain::Fixed(QuantScheme::new(7, 5, 1).unwrap()));
    let q640 = fer(ValueDomain::Fixed(QuantScheme::new(6, 4, 0).unwrap()));
    let monotone = |v: &[(f64, u64)]| v.windows(2).all(|w| w[1].0 <= w[0].0);
    let enough = [&float, &q751, &q640].iter().all(|v| v.iter().all(|p| p.1 >= 100));
    let r751 = q751[2].0 / float[2].0;
    let r640 = q640[2].0 / float[2].0;
    let pass = enough
        && (0.5..=2.0).contains(&r751)
        && (1.0 / 3.0..=3.0).contains(&r640)
        && monotone(&float)
        && monotone(&q751)
        && monotone(&q640);
    let show = |v: &[(f64, u64)]| v.iter().map(|p| format!("{:.3e}", p.0)).collect::<Vec<_>>().join("/");
    outcome(
        pass,
        format!(
            "FER at 3.5/4.0/4.5 dB: float {}, 7:5:1 {}, 6:4:0 {}; ratios at 4.5 dB {r751:.2} and {r640:.2}",
            show(&float),
            show(&q751),
            show(&q640)
        ),
    )
}

fn noiseless_ks(n: usize) -> [usize; 4] {
    [(n / 8).max(1), n / 2, n * 27568 / 32768, n - 1]
}

fn noiseless_sigma2(i: usize) -> f64 {
    0.3 + 0.1 * i as f64
}

fn noiseless() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let q = FixedDomain::new(QuantScheme::new(7, 5, 1).unwrap());
    let mut errors = 0;
    let mut frames = 0;
    for n_bits in [2u32, 5, 8, 11, 13, 15] {
        let n = 1usize << n_bits;
        for (i, k) in noiseless_ks(n).into_iter().enumerate() {
            let spec = CodeSpec::construct(n_bits, k, noiseless_sigma2(i)).unwrap();
            let prog = compile_spec(&spec, 64, NodeRuleSet::fast_ssc()).unwrap();
            let mut fe = Engine::new(&prog, FloatDomain).unwrap();
            let mut qe = Engine::new(&prog, q).unwrap();
            let reps = if n_bits >= 13 { 5 } else { 25 };
            for _ in 0..reps {
                let a: BitVec = (0..spec.k()).map(|_| rng.random::<bool>()).collect();
                let x = encode_systematic(&a, &spec).unwrap();
                let llr: Vec<f64> = x.iter().map(|b| if *b { -2.0 } else { 2.0 }).collect();
                let ql: Vec<_> = llr.iter().map(|&v| q.from_channel(v)).collect();
                errors += usize::from(fe.execute(&llr).unwrap() != x);
                errors += usize::from(qe.execute(&ql).unwrap() != x);
                frames += 2;
            }
        }
    }
    outcome(
        errors == 0,
        format!("{errors} errors in {frames} frames (N up to 32768, both domains)"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| -> Option<Vec<u8>> {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_fastssc"))
            .args([
                "simulate",
                "--n-bits",
                "9",
                "--k",
                "256",
                "--design-ebno",
                "2",
                "--ebno",
                "1,2,3",
            ])
            .args([
                "--seed",
                "42",
                "--workers",
                "1",
                "--min-frame-errors",
                "50",
                "--p",
                "32",
                "--csv",
            ])
            .arg(&path)
            .status()
            .ok()?;
        status.success().then(|| std::fs::read(&path).ok()).flatten()
    };
    let a = run("a.csv");
    let b = run("b.csv");
    let spec = CodeSpec::construct(9, 256, sigma2_for(0.5, 2.0)).unwrap();
    let mut c = SimConfig::new(spec, vec![1.0, 2.0, 3.0]);
    c.seed = 42;
    c.min_frame_errors = 50;
    c.p = 32;
    let lib = to_csv(&run_simulation(&c).unwrap()).into_bytes();
    let same = a.is_some() && a == b && a.as_ref() == Some(&lib);
    outcome(
        same,
        format!("{} bytes, two CLI runs and the library agree: {same}", lib.len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 engine matches SC on noisy frames", sc_equivalence),
        ("2 SPC and ML kernels are ML-optimal", kernel_optimality),
        ("3 latency table", latency_table),
        ("4 node statistics", node_statistics),
        ("5 program budget", program_budget),
        ("6 systematic encoding", systematic_encoding),
        ("7 quantized error rates", quantization),
        ("8 noiseless decoding", noiseless),
        ("9 deterministic simulation CSV", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.starts_with(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{verdict} [{name}] {} ({:.1}s)",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
