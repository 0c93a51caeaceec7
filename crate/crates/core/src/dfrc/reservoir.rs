use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::device::node::{integrate_node, Amplitude, NonlinearMrrConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    /// Ring with two-photon absorption: each virtual node integrates the
    /// cavity equation over one node interval. The loop carries the field
    /// amplitude; the detector records its power.
    MrrTpa(NonlinearMrrConfig),
    /// `f(a) = eta * a / (1 + |a|^p)`, recorded and recirculated directly.
    MackeyGlass { eta: f64, p: f64 },
}

impl Nonlinearity {
    pub fn mackey_glass() -> Self {
        Nonlinearity::MackeyGlass { eta: 1.0, p: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskKind {
    Binary,
    Uniform,
}

pub fn generate_mask(kind: MaskKind, nv: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(MASK_STREAM);
    (0..nv)
        .map(|_| match kind {
            MaskKind::Binary => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            MaskKind::Uniform => rng.random_range(-1.0..=1.0),
        })
        .collect()
}

const MASK_STREAM: u64 = 0x6d61736b;

#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirConfig {
    pub nv: usize,
    /// Virtual-node separation, ps.
    pub theta_ps: f64,
    pub mask: Vec<f64>,
    pub gamma_in: f64,
    pub eta_fb: f64,
    /// Constant modulator offset added to every drive sample.
    pub bias: f64,
    /// Node `i` is fed by loop slot `i - loop_offset` (mod `nv`). Zero
    /// feeds each node its own previous value; an offset of `k` models a
    /// delay line `k` node intervals longer than the sample period, which
    /// couples neighboring nodes.
    pub loop_offset: usize,
    pub nonlinearity: Nonlinearity,
    pub seed: u64,
}

impl ReservoirConfig {
    /// Ring-node reservoir with a seeded binary mask and `theta = 4 tau`.
    pub fn new(nv: usize, seed: u64) -> Self {
        let node = NonlinearMrrConfig::default();
        ReservoirConfig {
            nv,
            theta_ps: 4.0 * node.tau_ph,
            mask: generate_mask(MaskKind::Binary, nv, seed),
            gamma_in: 1.0,
            eta_fb: 0.8,
            bias: 0.3,
            loop_offset: 1,
            nonlinearity: Nonlinearity::MrrTpa(node),
            seed,
        }
    }

    pub fn delay_ps(&self) -> f64 {
        self.nv as f64 * self.theta_ps
    }

    pub fn validate(&self) -> Result<()> {
        if self.nv == 0 {
            return Err(Error::range("virtual node count", 0.0, 1.0, f64::INFINITY));
        }
        if self.mask.len() != self.nv {
            return Err(Error::LengthMismatch {
                left: self.mask.len(),
                right: self.nv,
            });
        }
        if self.mask.iter().any(|m| !(m.abs() <= 1.0)) {
            return Err(Error::Config("mask entries must lie in [-1, 1]".into()));
        }
        if !(self.eta_fb.abs() < 1.0) {
            return Err(Error::range("feedback strength |eta_fb|", self.eta_fb.abs(), 0.0, 1.0));
        }
        if !(self.theta_ps > 0.0 && self.theta_ps.is_finite()) {
            return Err(Error::Config(format!("node separation {} ps", self.theta_ps)));
        }
        if !(self.gamma_in.is_finite() && self.bias.is_finite()) {
            return Err(Error::Config("input gain and bias must be finite".into()));
        }
        match self.nonlinearity {
            Nonlinearity::MrrTpa(node) => node.validate(),
            Nonlinearity::MackeyGlass { eta, p } => {
                if eta.is_finite() && p > 0.0 && p.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Config(format!("Mackey-Glass eta {eta}, p {p}")))
                }
            }
        }
    }
}

/// Node states of the latest sample plus the delay-loop contents.
#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirState {
    /// Recorded value of each node for the latest sample.
    pub s: Vec<f64>,
    /// Value each node sent into the delay loop.
    pub loop_buf: Vec<f64>,
    cavity: Amplitude,
}

impl ReservoirState {
    pub fn zeros(nv: usize) -> Self {
        ReservoirState {
            s: vec![0.0; nv],
            loop_buf: vec![0.0; nv],
            cavity: Amplitude::new(0.0, 0.0),
        }
    }

    /// Loop contents drawn uniformly from `[-scale, scale]`.
    pub fn random(nv: usize, scale: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let loop_buf: Vec<f64> = (0..nv).map(|_| rng.random_range(-scale..=scale)).collect();
        ReservoirState {
            s: loop_buf.clone(),
            loop_buf,
            cavity: Amplitude::new(0.0, 0.0),
        }
    }
}

/// Runs the reservoir from rest; row `t` of the result holds the node
/// states after sample `u[t]`.
pub fn reservoir_run(u: &[f64], cfg: &ReservoirConfig) -> Result<DMatrix<f64>> {
    let mut state = ReservoirState::zeros(cfg.nv);
    reservoir_run_from(&mut state, u, cfg)
}

pub fn reservoir_run_from(state: &mut ReservoirState, u: &[f64], cfg: &ReservoirConfig) -> Result<DMatrix<f64>> {
    cfg.validate()?;
    if state.loop_buf.len() != cfg.nv {
        return Err(Error::LengthMismatch {
            left: state.loop_buf.len(),
            right: cfg.nv,
        });
    }
    if let Some(t) = u.iter().position(|x| !x.is_finite()) {
        return Err(Error::Stability { step: t });
    }
    let nv = cfg.nv;
    let steps = match cfg.nonlinearity {
        Nonlinearity::MrrTpa(node) => (cfg.theta_ps / node.max_step()).ceil().max(1.0) as usize,
        Nonlinearity::MackeyGlass { .. } => 0,
    };
    let mut rows = Vec::with_capacity(u.len() * nv);
    let mut next = vec![0.0; nv];
    for (t, &x) in u.iter().enumerate() {
        for (i, slot) in next.iter_mut().enumerate() {
            let fed = state.loop_buf[(i + nv - cfg.loop_offset % nv) % nv];
            let drive = cfg.gamma_in * cfg.mask[i] * x + cfg.eta_fb * fed + cfg.bias;
            let (sent, recorded) = match cfg.nonlinearity {
                Nonlinearity::MrrTpa(node) => {
                    state.cavity = integrate_node(state.cavity, Amplitude::new(drive, 0.0), cfg.theta_ps, steps, &node)?;
                    (state.cavity.re, state.cavity.norm_sqr())
                }
                Nonlinearity::MackeyGlass { eta, p } => {
                    let v = eta * drive / (1.0 + drive.abs().powf(p));
                    (v, v)
                }
            };
            if !(sent.is_finite() && recorded.is_finite()) {
                return Err(Error::Stability { step: t });
            }
            *slot = sent;
            state.s[i] = recorded;
        }
        std::mem::swap(&mut state.loop_buf, &mut next);
        rows.extend_from_slice(&state.s);
    }
    Ok(DMatrix::from_row_slice(u.len(), nv, &rows))
}
