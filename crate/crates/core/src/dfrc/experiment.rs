use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::metrics::{nrmse, ser};
use super::readout::train_readout;
use super::reservoir::{reservoir_run, ReservoirConfig};
use super::tasks::{channel_eq_generate, narma10_generate};
use crate::error::{Error, Result};

pub const WASHOUT: usize = 100;
/// Decision delay for channel equalization: the readout estimates
/// `d[k - 2]` from states up to `k`, since `u[k]` already carries `d[k + 2]`.
pub const CHANNEL_DELAY: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    Narma10,
    ChannelEq,
    SantaFe,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Narma10 => "narma10",
            Task::ChannelEq => "chaneq",
            Task::SantaFe => "santafe",
        }
    }

    pub fn metric(self) -> &'static str {
        match self {
            Task::ChannelEq => "ser",
            _ => "nrmse",
        }
    }

    /// Reservoir operating point tuned for the task.
    pub fn reservoir(self, nv: usize, seed: u64) -> ReservoirConfig {
        let base = ReservoirConfig::new(nv, seed);
        match self {
            Task::Narma10 | Task::SantaFe => base,
            Task::ChannelEq => ReservoirConfig {
                gamma_in: 0.2,
                bias: 1.0,
                ..base
            },
        }
    }

    pub fn lambda(self) -> f64 {
        match self {
            Task::ChannelEq => 1e-6,
            _ => 1e-8,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "narma10" | "narma" => Ok(Task::Narma10),
            "chaneq" | "channeleq" | "channel" => Ok(Task::ChannelEq),
            "santafe" => Ok(Task::SantaFe),
            _ => Err(Error::Config(format!("unknown task `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskResult {
    pub task: Task,
    pub nv: usize,
    pub seed: u64,
    pub snr_db: Option<f64>,
    pub train_len: usize,
    pub test_len: usize,
    pub metric: f64,
}

fn rows(s: &DMatrix<f64>, start: usize, len: usize) -> DMatrix<f64> {
    s.rows(start, len).into_owned()
}

fn check_lengths(train: usize, test: usize) -> Result<()> {
    if train == 0 || test == 0 {
        return Err(Error::Config("train and test lengths must be positive".into()));
    }
    Ok(())
}

/// Trains on `train` samples after the washout and scores the next `test`.
fn fit_and_score(
    s: &DMatrix<f64>,
    target: &[f64],
    train: usize,
    test: usize,
    lambda: f64,
    score: impl Fn(&[f64], &[f64]) -> Result<f64>,
) -> Result<f64> {
    let model = train_readout(&rows(s, WASHOUT, train), &target[WASHOUT..WASHOUT + train], lambda)?;
    let pred = model.predict(&rows(s, WASHOUT + train, test))?;
    score(&pred, &target[WASHOUT + train..WASHOUT + train + test])
}

pub fn run_narma10(cfg: &ReservoirConfig, train: usize, test: usize, seed: u64) -> Result<TaskResult> {
    check_lengths(train, test)?;
    let (u, y) = narma10_generate(WASHOUT + train + test, seed)?;
    let s = reservoir_run(&u, cfg)?;
    Ok(TaskResult {
        task: Task::Narma10,
        nv: cfg.nv,
        seed,
        snr_db: None,
        train_len: train,
        test_len: test,
        metric: fit_and_score(&s, &y, train, test, Task::Narma10.lambda(), nrmse)?,
    })
}

pub fn run_channel_eq(cfg: &ReservoirConfig, train: usize, test: usize, snr_db: f64, seed: u64) -> Result<TaskResult> {
    check_lengths(train, test)?;
    let (u, d) = channel_eq_generate(WASHOUT + train + test, snr_db, seed)?;
    let s = reservoir_run(&u, cfg)?;
    let mut target = vec![0.0; CHANNEL_DELAY];
    target.extend_from_slice(&d[..d.len() - CHANNEL_DELAY]);
    Ok(TaskResult {
        task: Task::ChannelEq,
        nv: cfg.nv,
        seed,
        snr_db: Some(snr_db),
        train_len: train,
        test_len: test,
        metric: fit_and_score(&s, &target, train, test, Task::ChannelEq.lambda(), ser)?,
    })
}

/// One-step-ahead prediction of a normalized series.
pub fn run_santafe(series: &[f64], cfg: &ReservoirConfig, train: usize, test: usize, seed: u64) -> Result<TaskResult> {
    check_lengths(train, test)?;
    let need = WASHOUT + train + test + 1;
    if series.len() < need {
        return Err(Error::Shape(format!(
            "series has {} samples, need {need}",
            series.len()
        )));
    }
    let u = &series[..need - 1];
    let s = reservoir_run(u, cfg)?;
    Ok(TaskResult {
        task: Task::SantaFe,
        nv: cfg.nv,
        seed,
        snr_db: None,
        train_len: train,
        test_len: test,
        metric: fit_and_score(&s, &series[1..need], train, test, Task::SantaFe.lambda(), nrmse)?,
    })
}
