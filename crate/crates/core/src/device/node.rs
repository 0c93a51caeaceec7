//! Single-mode cavity model of the nonlinear microring used as a reservoir
//! node. Two-photon absorption adds an intensity-dependent loss to the
//! linear photon-lifetime decay:
//!
//! `da/dt = (i*detune - 1/(2*tau_ph) - alpha_tpa*|a|^2) * a + kappa_c * u`
//!
//! Time is in picoseconds. The drop-port power proxy is `|a|^2`.

use nalgebra::Complex;

use crate::error::{Error, Result};

pub type Amplitude = Complex<f64>;

/// Speed of light in nm/ps.
const C_NM_PER_PS: f64 = 299_792.458;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearMrrConfig {
    pub tau_ph: f64,
    pub alpha_tpa: f64,
    pub kappa_c: f64,
    /// Static detuning (rad/ps); zero keeps the amplitude real for real drive.
    pub detune: f64,
}

impl Default for NonlinearMrrConfig {
    fn default() -> Self {
        let tau_ph = 10.0;
        NonlinearMrrConfig {
            tau_ph,
            alpha_tpa: 0.002,
            kappa_c: 1.0 / (2.0 * tau_ph),
            detune: 0.0,
        }
    }
}

impl NonlinearMrrConfig {
    /// Photon lifetime of a ring with quality factor `q` at `lambda_nm`.
    pub fn tau_from_q(q: f64, lambda_nm: f64) -> f64 {
        q * lambda_nm / (2.0 * std::f64::consts::PI * C_NM_PER_PS)
    }

    pub fn q_factor(&self, lambda_nm: f64) -> f64 {
        2.0 * std::f64::consts::PI * C_NM_PER_PS * self.tau_ph / lambda_nm
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_ph > 0.0 && self.tau_ph.is_finite()) {
            return Err(Error::Config(format!("photon lifetime {} ps", self.tau_ph)));
        }
        if !(self.alpha_tpa >= 0.0) {
            return Err(Error::Config(format!("TPA coefficient {}", self.alpha_tpa)));
        }
        Ok(())
    }

    /// Largest Euler step accepted by [`nonlinear_node_step`].
    pub fn max_step(&self) -> f64 {
        self.tau_ph / 4.0
    }

    /// Linear steady-state amplitude per unit drive, `2*tau_ph*kappa_c` at zero detuning.
    pub fn linear_gain(&self) -> f64 {
        2.0 * self.tau_ph * self.kappa_c
    }
}

/// One explicit-Euler step of length `dt`; returns the new amplitude and its power.
pub fn nonlinear_node_step(
    a: Amplitude,
    drive: Amplitude,
    dt: f64,
    cfg: &NonlinearMrrConfig,
) -> Result<(Amplitude, f64)> {
    if !(dt > 0.0 && dt <= cfg.max_step()) {
        return Err(Error::StepSize {
            dt,
            max: cfg.max_step(),
        });
    }
    let rate = Complex::new(
        -(0.5 / cfg.tau_ph + cfg.alpha_tpa * a.norm_sqr()),
        cfg.detune,
    );
    let next = a + (rate * a + drive * cfg.kappa_c) * dt;
    Ok((next, next.norm_sqr()))
}

/// Integrates a constant drive over `duration` ps in `steps` equal Euler steps.
pub fn integrate_node(
    mut a: Amplitude,
    drive: Amplitude,
    duration: f64,
    steps: usize,
    cfg: &NonlinearMrrConfig,
) -> Result<Amplitude> {
    let dt = duration / steps.max(1) as f64;
    for _ in 0..steps.max(1) {
        a = nonlinear_node_step(a, drive, dt, cfg)?.0;
    }
    Ok(a)
}
