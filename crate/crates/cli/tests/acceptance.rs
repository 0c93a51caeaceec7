//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use peoc::ceona::{
    ceona_b_dot, ceona_i_dot, estimate_performance, ComputeMode, CopuConfig, LayerWorkload, SignedOperand,
};
use peoc::device::{gamma_for_symbol_rate, gate_eval, program_gate, PcaConfig, PcaState, SpectralParams};
use peoc::dfrc::readout::ridge_objective;
use peoc::dfrc::{reservoir_run, run_channel_eq, run_narma10, train_readout, Task};
use peoc::link_budget::{max_supported_n, scalability_sweep, Architecture, LinkBudgetParams, ParamFile};
use peoc::pbau::{mae_sweep, ArithOp, CostModel};
use peoc::{Error, GateFunction, OperandPrecision};

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

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

fn bits(b: u32) -> OperandPrecision {
    OperandPrecision::new(b).unwrap()
}

fn c1_exact_add_sub() -> Outcome {
    let t0 = Instant::now();
    let cost = CostModel::default();
    let mut worst = 0.0f64;
    for op in [ArithOp::Add, ArithOp::Sub] {
        for b in [4, 6, 8] {
            let r = mae_sweep(op, bits(b), &cost).unwrap();
            worst = worst.max(r.mae).max(r.max_err);
        }
    }
    let el = t0.elapsed();
    outcome(
        worst == 0.0 && el < Duration::from_secs(10),
        format!("add/sub B=4,6,8 worst error {worst}, {:.2} s", el.as_secs_f64()),
    )
}

fn c2_mul_error() -> Outcome {
    let cost = CostModel::default();
    let mut parts = Vec::new();
    let mut pass = true;
    for b in [6, 8] {
        let t0 = Instant::now();
        let r = mae_sweep(ArithOp::Mul, bits(b), &cost).unwrap();
        let el = t0.elapsed();
        pass &= r.max_err <= 1.0 && r.mae <= 0.05 && el < Duration::from_secs(60);
        parts.push(format!(
            "B={b}: MAE {:.5}, max {:.4} counts, {:.2} s",
            r.mae,
            r.max_err,
            el.as_secs_f64()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c3_gate_truth_tables() -> Outcome {
    // rows (x, w) = 00, 01, 10, 11
    let tables = [
        (GateFunction::And, [false, false, false, true]),
        (GateFunction::Or, [false, true, true, true]),
        (GateFunction::Xor, [false, true, true, false]),
        (GateFunction::Nand, [true, true, true, false]),
        (GateFunction::Nor, [true, false, false, false]),
        (GateFunction::Xnor, [true, false, false, true]),
    ];
    let mut ok = 0;
    for (g, want) in tables {
        let cfg = program_gate(SpectralParams::default(), g).unwrap();
        for (row, &y) in want.iter().enumerate() {
            let (x, w) = (row & 2 != 0, row & 1 != 0);
            if gate_eval(&cfg, g, x, w).ok() == Some(y) {
                ok += 1;
            }
        }
    }
    outcome(ok == 24, format!("{ok}/24 truth-table rows"))
}

fn c4_pca_capacity() -> Outcome {
    let table = [
        (3.0, 39682),
        (5.0, 29761),
        (10.0, 19841),
        (20.0, 14880),
        (30.0, 10822),
        (40.0, 9920),
        (50.0, 8503),
    ];
    let exact = table.iter().all(|&(sr, g)| gamma_for_symbol_rate(sr).ok() == Some(g));

    let saturation = table.iter().all(|&(sr, g)| {
        let cfg = PcaConfig::for_symbol_rate(sr).unwrap();
        let mut pca = PcaState::new();
        (0..g).all(|_| pca.accumulate(&cfg, 1.0).is_ok())
            && matches!(pca.accumulate(&cfg, 1.0), Err(Error::Saturated { gamma }) if gamma == g)
    });

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut conserved = true;
    for gamma in [8503, 150] {
        let cfg = PcaConfig {
            discharge_intervals: 100,
            ..PcaConfig::with_gamma(gamma)
        };
        let mut pca = PcaState::new();
        let (mut sent, mut read, mut intervals) = (0u64, 0u64, 0u64);
        for _ in 0..100_000 {
            if pca.used() == gamma {
                read += pca.read_and_swap(&cfg).unwrap() as u64;
            }
            let pulses: u64 = rng.random_range(0..8);
            if pca.accumulate(&cfg, pulses as f64).is_err() {
                conserved = false;
                break;
            }
            sent += pulses;
            intervals += 1;
        }
        read += pca.read_and_swap(&cfg).map(|v| v as u64).unwrap_or(u64::MAX / 2);
        conserved &= read == sent && intervals == 100_000;
    }
    outcome(
        exact && saturation && conserved,
        format!("table exact {exact}, saturates at gamma+1 {saturation}, ping-pong conserves 1e5 pulses {conserved}"),
    )
}

fn c5_latency_calibration() -> Outcome {
    let cost = CostModel::default();
    let mut worst: f64 = 0.0;
    for op in [ArithOp::Add, ArithOp::Sub, ArithOp::Mul] {
        for b in [6, 8] {
            let table = cost.lookup(op, bits(b)).unwrap().latency_ns;
            let model = cost.latency_model(op, bits(b), 25.0);
            worst = worst.max((model - table).abs() / table);
        }
    }
    let add8 = cost.latency(ArithOp::Add, bits(8));
    outcome(
        worst <= 0.10 && add8 == 20.51,
        format!("worst model/table deviation {:.2}%, 8-bit add {add8} ns", worst * 100.0),
    )
}

fn perturbed(base: LinkBudgetParams, rng: &mut ChaCha8Rng) -> LinkBudgetParams {
    let mut p = base;
    let mut scale = |v: &mut f64, lo: f64, hi: f64| *v *= rng.random_range(lo..hi);
    scale(&mut p.noise.responsivity_a_per_w, 0.5, 1.5);
    scale(&mut p.noise.dark_current_a, 0.1, 10.0);
    scale(&mut p.noise.load_resistance_ohm, 0.5, 4.0);
    scale(&mut p.p_laser_max_w, 0.1, 10.0);
    scale(&mut p.losses.waveguide_db_per_cm, 0.2, 3.0);
    scale(&mut p.losses.il_penalty, 0.3, 1.0);
    scale(&mut p.losses.il_mrr, 0.97, 1.0);
    p.noise.rin_db_per_hz = rng.random_range(-160.0..-130.0);
    p
}

fn c6_scalability() -> Outcome {
    let file = ParamFile::shipped();
    let archs = [Architecture::CeonaI, Architecture::Amw, Architecture::Maw];
    let bs = [1u32, 2, 4, 6, 8];
    let srs = [1.0, 3.0, 5.0, 10.0];
    let t0 = Instant::now();
    let grid = scalability_sweep(&file, &archs, &bs, &srs);
    let el = t0.elapsed();

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut sets: Vec<(Architecture, LinkBudgetParams)> = archs.iter().map(|&a| (a, file.params_for(a))).collect();
    for _ in 0..40 {
        for &a in &archs {
            sets.push((a, perturbed(file.params_for(a), &mut rng)));
        }
    }
    let mut violations = Vec::new();
    for (a, p) in &sets {
        let cap = p.channel_cap();
        let n = |b: u32, sr: f64| max_supported_n(*a, b, sr, p).n;
        for &sr in &srs {
            for w in bs.windows(2) {
                let (lo, hi) = (n(w[0], sr), n(w[1], sr));
                let ok = match a {
                    Architecture::CeonaI => hi >= lo,
                    _ => hi <= lo,
                };
                if !ok {
                    violations.push(format!("{} B {}->{} SR {sr}: {lo}->{hi}", a.key(), w[0], w[1]));
                }
            }
        }
        for &b in &bs {
            for w in srs.windows(2) {
                if n(b, w[1]) > n(b, w[0]) {
                    violations.push(format!("{} B {b} SR {}->{}", a.key(), w[0], w[1]));
                }
            }
            if srs.iter().any(|&sr| n(b, sr) > cap) {
                violations.push(format!("{} exceeds cap {cap}", a.key()));
            }
        }
    }
    let caps = file.params_for(Architecture::CeonaI).channel_cap() == 200
        && file.params_for(Architecture::Amw).channel_cap() == 62
        && file.params_for(Architecture::Maw).channel_cap() == 62;
    let at = |a: Architecture| grid.iter().find(|s| s.arch == a && s.bits == 4 && s.sr_gsps == 1.0).unwrap().n;
    let got = [at(Architecture::CeonaI), at(Architecture::Amw), at(Architecture::Maw)];
    let within = got
        .iter()
        .zip([192.0, 31.0, 44.0])
        .all(|(&n, r)| (n as f64 - r).abs() <= 0.15 * r);
    let pass = violations.is_empty() && caps && within && grid.len() == 60 && el < Duration::from_secs(5);
    outcome(
        pass,
        format!(
            "{} param sets, {} property violations{}; caps 200/62 {caps}; B=4 SR=1 N = {}/{}/{} (ref 192/31/44); 60-point grid {:.3} s",
            sets.len(),
            violations.len(),
            violations.first().map(|v| format!(" (first: {v})")).unwrap_or_default(),
            got[0],
            got[1],
            got[2],
            el.as_secs_f64()
        ),
    )
}

fn xnor_count(a: &[bool], b: &[bool]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x == y).count() as u64
}

fn c7_ceona_b() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut random_ok = 0;
    for _ in 0..10_000 {
        let len = rng.random_range(1..=4096);
        let n = rng.random_range(1..=200);
        let cfg = CopuConfig::new(n, 1, 50.0, ComputeMode::Bnn).unwrap();
        let a: Vec<bool> = (0..len).map(|_| rng.random()).collect();
        let b: Vec<bool> = (0..len).map(|_| rng.random()).collect();
        let r = ceona_b_dot(&a, &b, &cfg).unwrap();
        let p = xnor_count(&a, &b);
        if r.bitcount == p && r.bipolar == 2 * p as i64 - len as i64 {
            random_ok += 1;
        }
    }
    let cfg = CopuConfig::new(5, 1, 50.0, ComputeMode::Bnn).unwrap();
    let unpack = |v: u32, len: usize| (0..len).map(|i| v >> i & 1 == 1).collect::<Vec<_>>();
    let mut exhaustive_cases = 0u64;
    let mut exhaustive_bad = 0u64;
    for len in 1..=12usize {
        let bad: u64 = (0..1u32 << len)
            .into_par_iter()
            .map(|x| {
                let a = unpack(x, len);
                (0..1u32 << len)
                    .filter(|&y| {
                        let b = unpack(y, len);
                        let p = xnor_count(&a, &b);
                        let r = ceona_b_dot(&a, &b, &cfg).unwrap();
                        r.bitcount != p || r.bipolar != 2 * p as i64 - len as i64
                    })
                    .count() as u64
            })
            .sum();
        exhaustive_bad += bad;
        exhaustive_cases += 1 << (2 * len);
    }
    outcome(
        random_ok == 10_000 && exhaustive_bad == 0,
        format!(
            "random {random_ok}/10000, exhaustive {} of {exhaustive_cases} mismatched",
            exhaustive_bad
        ),
    )
}

fn c8_ceona_i() -> Outcome {
    let p4 = bits(4);
    let cfg = CopuConfig::new(1, 1, 10.0, ComputeMode::Int(p4)).unwrap();
    let values: Vec<SignedOperand> = (-15..=15).map(SignedOperand::from_i64).collect();
    let scaled = |x: &[SignedOperand], w: &[SignedOperand], b: u32| {
        x.iter().zip(w).map(|(a, c)| (a.value() * c.value()) as f64).sum::<f64>() / (1u64 << b) as f64
    };
    let mut worst_ratio: f64 = 0.0;
    let mut cases = 0u64;
    for s in 1..=2usize {
        let tuples: Vec<Vec<SignedOperand>> = match s {
            1 => values.iter().map(|&v| vec![v]).collect(),
            _ => values.iter().flat_map(|&a| values.iter().map(move |&b| vec![a, b])).collect(),
        };
        let w = tuples
            .par_iter()
            .map(|x| {
                tuples
                    .iter()
                    .map(|w| {
                        let r = ceona_i_dot(x, w, p4, &cfg).unwrap() as f64;
                        (r - scaled(x, w, 4)).abs() / s as f64
                    })
                    .fold(0.0f64, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        worst_ratio = worst_ratio.max(w);
        cases += (tuples.len() * tuples.len()) as u64;
    }

    let p8 = bits(8);
    let cfg8 = CopuConfig::new(128, 1, 10.0, ComputeMode::Int(p8)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let trials = 200;
    let s_dot = 1024;
    let mut total = 0.0;
    for _ in 0..trials {
        let mut draw = || SignedOperand::from_i64(rng.random_range(-255..=255));
        let x: Vec<SignedOperand> = (0..s_dot).map(|_| draw()).collect();
        let w: Vec<SignedOperand> = (0..s_dot).map(|_| draw()).collect();
        let r = ceona_i_dot(&x, &w, p8, &cfg8).unwrap() as f64;
        total += (r - scaled(&x, &w, 8)).abs();
    }
    let mean = total / trials as f64;
    outcome(
        worst_ratio <= 1.0 && mean <= 0.02 * s_dot as f64,
        format!(
            "B=4 exhaustive over {cases} cases: worst |err|/S_dot {worst_ratio:.4}; B=8 S_dot=1024 mean |err| {mean:.2} (limit {:.2})",
            0.02 * s_dot as f64
        ),
    )
}

fn c9_ceona_perf() -> Outcome {
    let net = [
        LayerWorkload::conv("conv1", 64, 64, 3, 3, 16, 16),
        LayerWorkload::conv("conv2", 128, 64, 3, 3, 8, 8),
        LayerWorkload::fc("fc3", 2048, 10),
    ];
    let params = ParamFile::shipped().params_for(Architecture::CeonaI);
    let fps = |sr: f64| {
        let cfg = CopuConfig::new(64, 16, sr, ComputeMode::Bnn).unwrap();
        estimate_performance(&net, &cfg, &params).unwrap().fps
    };
    let ratio = fps(50.0) / fps(5.0);
    outcome((ratio / 10.0 - 1.0).abs() <= 0.01, format!("FPS(50)/FPS(5) = {ratio:.4}"))
}

fn c10_dfrc() -> Outcome {
    let t0 = Instant::now();
    let seed = 42;
    let cfg = Task::Narma10.reservoir(400, seed);
    let narma = run_narma10(&cfg, 4000, 1000, seed).unwrap().metric;

    let chan_cfg = Task::ChannelEq.reservoir(400, seed);
    let snrs = [12.0, 16.0, 20.0, 24.0, 28.0, 32.0];
    let sers: Vec<f64> = snrs
        .par_iter()
        .map(|&snr| run_channel_eq(&chan_cfg, 4000, 10_000, snr, seed).unwrap().metric)
        .collect();
    let monotone = sers.windows(2).all(|w| w[1] <= w[0]);
    let drop = sers[5] <= sers[0] / 10.0;

    // finite-difference optimality of the trained readout
    let (u, y) = peoc::dfrc::narma10_generate(1100, seed).unwrap();
    let s = reservoir_run(&u, &cfg).unwrap().rows(100, 1000).into_owned();
    let y = &y[100..];
    let lambda = Task::Narma10.lambda();
    let model = train_readout(&s, y, lambda).unwrap();
    let base = ridge_objective(&s, y, &model.weights, lambda);
    let mut fd_bad = 0;
    for i in 0..model.weights.len() {
        for h in [1e-4, -1e-4] {
            let mut w: DVector<f64> = model.weights.clone();
            w[i] += h;
            if ridge_objective(&s, y, &w, lambda) < base {
                fd_bad += 1;
            }
        }
    }
    let el = t0.elapsed();
    let pass = narma <= 0.4 && monotone && drop && fd_bad == 0 && el < Duration::from_secs(120);
    outcome(
        pass,
        format!(
            "NARMA10 NRMSE {narma:.4}; SER {:?}; finite-difference decreases {fd_bad}/{}; {:.1} s",
            sers,
            2 * model.weights.len(),
            el.as_secs_f64()
        ),
    )
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_peoc"))
        .args(args)
        .env_remove("PEOC_PARAMS")
        .output()
        .expect("spawn peoc");
    assert!(out.status.success(), "peoc {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn c11_determinism(dir: &Path) -> Outcome {
    let net = dir.join("net.txt");
    std::fs::write(&net, "conv 16 3 3 3 8 8\nconv 32 16 3 3 4 4\nfc 512 10\n").unwrap();
    let net = net.to_str().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["gate", "--gate", "xnor", "--sweep"],
        vec!["gate", "--gate", "nor", "--x", "0", "--w", "1"],
        vec!["pbau", "--op", "mul", "--bits", "6", "--exhaustive"],
        vec!["pbau", "--op", "add", "--bits", "8", "--x", "100", "--w", "55"],
        vec!["scalability"],
        vec!["calibrate", "--arch", "maw", "--bits", "4", "--sr", "1", "--target", "44"],
        vec!["ceona", "--mode", "bnn", "--model", net, "--n", "32", "--m", "8", "--sr", "50"],
        vec!["ceona", "--mode", "int", "--bits", "4", "--model", net, "--n", "32", "--m", "8", "--sr", "10"],
        vec!["--seed", "7", "dfrc", "--task", "narma10", "--nv", "100", "--train", "1000", "--test", "500"],
        vec!["--seed", "7", "dfrc", "--task", "chaneq", "--nv", "100", "--train", "1000", "--test", "1000"],
    ];
    let mut same = 0;
    for args in &runs {
        if run_cli(args) == run_cli(args) {
            same += 1;
        }
    }
    outcome(same == runs.len(), format!("{same}/{} experiments byte-identical on rerun", runs.len()))
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let criteria: Vec<(&str, Check<'_>)> = vec![
        ("exact stochastic add/sub", Box::new(c1_exact_add_sub)),
        ("stochastic multiply error", Box::new(c2_mul_error)),
        ("gate polymorphism", Box::new(c3_gate_truth_tables)),
        ("accumulator capacity", Box::new(c4_pca_capacity)),
        ("latency calibration", Box::new(c5_latency_calibration)),
        ("scalability", Box::new(c6_scalability)),
        ("binary dot product", Box::new(c7_ceona_b)),
        ("integer dot product", Box::new(c8_ceona_i)),
        ("performance model", Box::new(c9_ceona_perf)),
        ("reservoir tasks", Box::new(c10_dfrc)),
        ("cli determinism", Box::new(|| c11_determinism(dir.path()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "criterion {:>2} {:<27} {}  {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
