use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use peoc::ceona::{estimate_performance, load_network, ComputeMode, CopuConfig};
use peoc::device::{gate_eval, program_gate, spectral_sweep, SpectralParams};
use peoc::dfrc::{run_channel_eq, run_narma10, run_santafe, santafe_load, Task, TaskResult};
use peoc::link_budget::{calibrate_penalty, scalability_sweep, Architecture, ParamFile};
use peoc::pbau::{mae_sweep, pbau_execute, ArithOp, CostModel, PbauMode};
use peoc::{Error, GateFunction, OperandPrecision};

const DEFAULT_SEED: u64 = 42;

const EXIT_INPUT: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(name = "peoc", version, about = "Polymorphic electro-optic computing simulator")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Link-budget parameter file; the shipped calibration is used when absent.
    #[arg(long, global = true, env = "PEOC_PARAMS")]
    params: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a programmed ring gate or export its transmission spectra.
    Gate(GateArgs),
    /// Run one unary arithmetic operation or an exhaustive error sweep.
    Pbau(PbauArgs),
    /// Largest supported element size per architecture, precision and symbol rate.
    Scalability(ScalabilityArgs),
    /// Solve for the network penalty that puts the element size on a target.
    Calibrate(CalibrateArgs),
    /// Per-layer latency and energy of a network on the accelerator.
    Ceona(CeonaArgs),
    /// Train and score the delay-feedback reservoir on a benchmark task.
    Dfrc(DfrcArgs),
}

#[derive(Args)]
struct GateArgs {
    #[arg(long)]
    gate: GateFunction,
    #[arg(long, value_parser = parse_bit, required_unless_present = "sweep")]
    x: Option<bool>,
    #[arg(long, value_parser = parse_bit, required_unless_present = "sweep")]
    w: Option<bool>,
    /// Export drop/through spectra for all four inputs.
    #[arg(long)]
    sweep: bool,
    #[arg(long, default_value_t = 1549.5)]
    start_nm: f64,
    #[arg(long, default_value_t = 1551.5)]
    end_nm: f64,
    #[arg(long, default_value_t = 401)]
    points: usize,
}

#[derive(Args)]
struct PbauArgs {
    #[arg(long)]
    op: ArithOp,
    #[arg(long)]
    bits: u32,
    #[arg(long, required_unless_present = "exhaustive")]
    x: Option<u64>,
    #[arg(long, required_unless_present = "exhaustive")]
    w: Option<u64>,
    /// Sweep every operand pair and report the error statistics.
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Args)]
struct ScalabilityArgs {
    #[arg(long, value_delimiter = ',', default_values = ["ceona-i", "amw", "maw"])]
    arch: Vec<Architecture>,
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 4, 6, 8])]
    bits: Vec<u32>,
    /// Symbol rates in GS/s.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 3.0, 5.0, 10.0])]
    sr: Vec<f64>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long)]
    arch: Architecture,
    #[arg(long)]
    bits: u32,
    #[arg(long)]
    sr: f64,
    #[arg(long)]
    target: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Bnn,
    Int,
}

#[derive(Args)]
struct CeonaArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Operand width in integer mode.
    #[arg(long, default_value_t = 8)]
    bits: u32,
    /// Network description file.
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Symbol rate in GS/s.
    #[arg(long)]
    sr: f64,
}

#[derive(Args)]
struct DfrcArgs {
    #[arg(long)]
    task: Task,
    #[arg(long, default_value_t = 400)]
    nv: usize,
    #[arg(long, default_value_t = 4000)]
    train: usize,
    #[arg(long, default_value_t = 1000)]
    test: usize,
    /// SNR points in dB for channel equalization.
    #[arg(long, value_delimiter = ',', default_values_t = [12.0, 16.0, 20.0, 24.0, 28.0, 32.0])]
    snr: Vec<f64>,
    /// Series file for the santafe task, one value per line.
    #[arg(long, required_if_eq("task", "santafe"))]
    series: Option<PathBuf>,
    /// Fill the wall_time_ms column (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

fn parse_bit(s: &str) -> Result<bool, String> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(format!("expected 0 or 1, got `{s}`")),
    }
}

type Csv = csv::Writer<Vec<u8>>;

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

fn row<I, T>(w: &mut Csv, fields: I) -> peoc::Result<()>
where
    I: IntoIterator<Item = T>,
    T: AsRef<[u8]>,
{
    w.write_record(fields).map_err(csv_err)
}

fn bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn param_file(path: Option<&Path>) -> peoc::Result<ParamFile> {
    match path {
        Some(p) => ParamFile::load(p),
        None => Ok(ParamFile::shipped()),
    }
}

fn cmd_gate(a: &GateArgs, out: &mut Csv) -> peoc::Result<()> {
    let cfg = program_gate(SpectralParams::default(), a.gate)?;
    if a.sweep {
        row(out, ["x", "w", "lambda_nm", "t_drop", "t_through"])?;
        for p in spectral_sweep(&cfg, a.start_nm, a.end_nm, a.points)? {
            row(out, [
                bit(p.x).to_string(),
                bit(p.w).to_string(),
                p.lambda_nm.to_string(),
                p.t_drop.to_string(),
                p.t_through.to_string(),
            ])?;
        }
        return Ok(());
    }
    let (x, w) = (a.x.unwrap_or_default(), a.w.unwrap_or_default());
    let y = gate_eval(&cfg, a.gate, x, w)?;
    row(out, ["gate", "x", "w", "y"])?;
    row(out, [a.gate.name(), bit(x), bit(w), bit(y)])
}

fn cmd_pbau(a: &PbauArgs, out: &mut Csv) -> peoc::Result<()> {
    let p = OperandPrecision::new(a.bits)?;
    let cost = CostModel::default();
    if a.exhaustive {
        let r = mae_sweep(a.op, p, &cost)?;
        row(out, ["mode", "B", "MAE", "max_err", "latency_ns", "energy_pJ"])?;
        return row(out, [
            r.op.name().to_string(),
            r.bits.to_string(),
            r.mae.to_string(),
            r.max_err.to_string(),
            r.latency_ns.to_string(),
            r.energy_pj.to_string(),
        ]);
    }
    let (x, w) = (a.x.unwrap_or_default(), a.w.unwrap_or_default());
    let r = pbau_execute(PbauMode::Arith(a.op), x, w, p, &cost)?;
    row(out, ["mode", "B", "x", "w", "result", "exact", "latency_ns", "energy_pJ"])?;
    row(out, [
        a.op.name().to_string(),
        a.bits.to_string(),
        x.to_string(),
        w.to_string(),
        r.result.to_string(),
        a.op.exact(x, w, p).to_string(),
        r.latency_ns.to_string(),
        r.energy_pj.to_string(),
    ])
}

fn cmd_scalability(a: &ScalabilityArgs, file: &ParamFile, out: &mut Csv) -> peoc::Result<()> {
    for &b in &a.bits {
        OperandPrecision::new(b)?;
    }
    if let Some(sr) = a.sr.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(Error::Config(format!("symbol rate {sr} GS/s")));
    }
    row(out, ["arch", "B", "SR_GSps", "N", "P_pd_W", "P_laser_W", "capped"])?;
    for s in scalability_sweep(file, &a.arch, &a.bits, &a.sr) {
        row(out, [
            s.arch.key().to_string(),
            s.bits.to_string(),
            s.sr_gsps.to_string(),
            s.n.to_string(),
            s.p_pd_w.to_string(),
            s.p_laser_w.to_string(),
            s.capped.to_string(),
        ])?;
    }
    Ok(())
}

fn cmd_calibrate(a: &CalibrateArgs, file: &ParamFile, out: &mut Csv) -> peoc::Result<()> {
    OperandPrecision::new(a.bits)?;
    let penalty = calibrate_penalty(a.arch, a.bits, a.sr, &file.params_for(a.arch), a.target)?;
    row(out, ["arch", "B", "SR_GSps", "target_N", "il_penalty"])?;
    row(out, [
        a.arch.key().to_string(),
        a.bits.to_string(),
        a.sr.to_string(),
        a.target.to_string(),
        penalty.to_string(),
    ])
}

fn cmd_ceona(a: &CeonaArgs, file: &ParamFile, out: &mut Csv) -> peoc::Result<()> {
    let network = load_network(&a.model)?;
    let mode = match a.mode {
        ModeArg::Bnn => ComputeMode::Bnn,
        ModeArg::Int => ComputeMode::Int(OperandPrecision::new(a.bits)?),
    };
    let cfg = CopuConfig::new(a.n, a.m, a.sr, mode)?;
    let perf = estimate_performance(&network, &cfg, &file.params_for(Architecture::CeonaI))?;
    row(out, [
        "layer",
        "S_dot",
        "passes",
        "intervals",
        "latency_ns",
        "energy_mJ",
        "FPS",
        "FPS_per_W",
        "FPS_per_W_per_mm2",
    ])?;
    for l in &perf.layers {
        row(out, [
            l.name.clone(),
            l.dot_len.to_string(),
            l.schedule.passes.to_string(),
            l.schedule.intervals_per_output.to_string(),
            l.latency_ns.to_string(),
            l.energy_mj.to_string(),
            String::new(),
            String::new(),
            String::new(),
        ])?;
    }
    row(out, [
        "total".to_string(),
        String::new(),
        perf.layers.iter().map(|l| l.schedule.passes).sum::<u64>().to_string(),
        String::new(),
        perf.latency_ns.to_string(),
        perf.energy_mj.to_string(),
        perf.fps.to_string(),
        perf.fps_per_w.to_string(),
        perf.fps_per_w_per_mm2.to_string(),
    ])
}

fn cmd_dfrc(a: &DfrcArgs, seed: u64, out: &mut Csv) -> peoc::Result<()> {
    let cfg = a.task.reservoir(a.nv, seed);
    cfg.validate()?;
    let timed = |f: &dyn Fn() -> peoc::Result<TaskResult>| -> peoc::Result<(TaskResult, f64)> {
        let t0 = Instant::now();
        let r = f()?;
        Ok((r, t0.elapsed().as_secs_f64() * 1e3))
    };
    let results: Vec<(TaskResult, f64)> = match a.task {
        Task::Narma10 => vec![timed(&|| run_narma10(&cfg, a.train, a.test, seed))?],
        Task::ChannelEq => a
            .snr
            .par_iter()
            .map(|&snr| timed(&|| run_channel_eq(&cfg, a.train, a.test, snr, seed)))
            .collect::<peoc::Result<_>>()?,
        Task::SantaFe => {
            let path = a
                .series
                .as_deref()
                .ok_or_else(|| Error::Config("santafe needs --series".into()))?;
            let series = santafe_load(path)?;
            vec![timed(&|| run_santafe(&series, &cfg, a.train, a.test, seed))?]
        }
    };
    row(out, ["task", "Nv", "seed", "snr_db", "train_len", "test_len", "metric", "value", "wall_time_ms"])?;
    for (r, ms) in results {
        row(out, [
            r.task.name().to_string(),
            r.nv.to_string(),
            r.seed.to_string(),
            r.snr_db.map(|s| s.to_string()).unwrap_or_default(),
            r.train_len.to_string(),
            r.test_len.to_string(),
            r.task.metric().to_string(),
            r.metric.to_string(),
            if a.timing { format!("{ms:.1}") } else { String::new() },
        ])?;
    }
    Ok(())
}

fn run(cli: &Cli) -> peoc::Result<Vec<u8>> {
    if let Some(p) = &cli.params {
        if !p.is_file() {
            return Err(Error::Io {
                path: p.clone(),
                source: io::Error::new(io::ErrorKind::NotFound, "parameter file not found"),
            });
        }
    }
    let mut out = csv::Writer::from_writer(Vec::new());
    match &cli.cmd {
        Command::Gate(a) => cmd_gate(a, &mut out)?,
        Command::Pbau(a) => cmd_pbau(a, &mut out)?,
        Command::Scalability(a) => cmd_scalability(a, &param_file(cli.params.as_deref())?, &mut out)?,
        Command::Calibrate(a) => cmd_calibrate(a, &param_file(cli.params.as_deref())?, &mut out)?,
        Command::Ceona(a) => {
            if !a.model.is_file() {
                return Err(Error::Io {
                    path: a.model.clone(),
                    source: io::Error::new(io::ErrorKind::NotFound, "model file not found"),
                });
            }
            cmd_ceona(a, &param_file(cli.params.as_deref())?, &mut out)?
        }
        Command::Dfrc(a) => cmd_dfrc(a, cli.seed, &mut out)?,
    }
    out.into_inner().map_err(|e| Error::Format(e.to_string()))
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> peoc::Result<()> {
    let io_err = |source| Error::Io {
        path: path.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("<stdout>")),
        source,
    };
    match path {
        Some(p) => File::create(p).and_then(|mut f| f.write_all(bytes)).map_err(io_err),
        None => io::stdout().lock().write_all(bytes).map_err(io_err),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(dir) = cli.output.as_deref().and_then(Path::parent) {
        if !dir.as_os_str().is_empty() && !dir.is_dir() {
            eprintln!("peoc: output directory {} does not exist", dir.display());
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match run(&cli).and_then(|bytes| emit(cli.output.as_deref(), &bytes)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("peoc: {e}");
            if e.is_infeasibility() {
                ExitCode::from(EXIT_INFEASIBLE)
            } else {
                ExitCode::from(EXIT_INPUT)
            }
        }
    }
}
