//! Spectral model of the polymorphic microring logic gate.
//!
//! The ring carries one resonance. Programming places the operand-independent
//! resonance `kappa` at `lambda_in`, `lambda_in + shift` or
//! `lambda_in + 2*shift`; each asserted operand then blue-shifts the
//! resonance by `shift`. Reading the drop port (light lands only on
//! resonance) or the through port (its complement) gives six gates from
//! three programs.

use crate::error::{Error, Result};
use crate::logic::GateFunction;

/// Output port of the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Port {
    Drop,
    Through,
}

/// Spectral parameters shared by every program of the gate. Wavelengths in nm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    pub lambda_in: f64,
    /// Unprogrammed resonance position.
    pub eta: f64,
    /// Blue-shift per asserted operand.
    pub shift: f64,
    pub fwhm: f64,
    pub t_hi: f64,
    pub t_lo: f64,
    /// Fractional insertion loss at the drop-port peak.
    pub il_drop: f64,
}

impl Default for SpectralParams {
    fn default() -> Self {
        SpectralParams {
            lambda_in: 1550.0,
            eta: 1549.8,
            shift: 0.4,
            fwhm: 0.05,
            t_hi: 0.5,
            t_lo: 0.2,
            il_drop: 0.1,
        }
    }
}

impl SpectralParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.t_lo && self.t_lo < self.t_hi && self.t_hi < 1.0) {
            return Err(Error::Config(format!(
                "thresholds must satisfy 0 < t_lo < t_hi < 1 (got {}, {})",
                self.t_lo, self.t_hi
            )));
        }
        if !(self.fwhm > 0.0 && self.shift > 2.0 * self.fwhm) {
            return Err(Error::Config(format!(
                "resonance shift {} nm must exceed twice the linewidth {} nm",
                self.shift, self.fwhm
            )));
        }
        if !(0.0..1.0).contains(&self.il_drop) {
            return Err(Error::Config(format!(
                "drop insertion loss {} not in [0, 1)",
                self.il_drop
            )));
        }
        Ok(())
    }
}

/// A gate program: spectral parameters plus the chosen `kappa` and port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MrrPeolgConfig {
    pub params: SpectralParams,
    pub kappa: f64,
    pub function: GateFunction,
    pub port: Port,
}

/// Number of operand shifts `kappa` sits above `lambda_in`, and the port read.
fn program_of(g: GateFunction) -> (u32, Port) {
    match g {
        GateFunction::Nor => (0, Port::Drop),
        GateFunction::Or => (0, Port::Through),
        GateFunction::Xor => (1, Port::Drop),
        GateFunction::Xnor => (1, Port::Through),
        GateFunction::And => (2, Port::Drop),
        GateFunction::Nand => (2, Port::Through),
    }
}

pub fn program_gate(params: SpectralParams, g: GateFunction) -> Result<MrrPeolgConfig> {
    params.validate()?;
    let (steps, port) = program_of(g);
    Ok(MrrPeolgConfig {
        params,
        kappa: params.lambda_in + steps as f64 * params.shift,
        function: g,
        port,
    })
}

impl MrrPeolgConfig {
    pub fn resonance_position(&self, x: bool, w: bool) -> f64 {
        self.kappa - (x as u8 + w as u8) as f64 * self.params.shift
    }

    /// `(t_drop, t_through)` at `probe` for a ring resonant at `resonance`.
    pub fn transmission_at(&self, probe: f64, resonance: f64) -> (f64, f64) {
        let p = &self.params;
        let detune = 2.0 * (probe - resonance) / p.fwhm;
        let drop = (1.0 - p.il_drop) / (1.0 + detune * detune);
        (drop, 1.0 - drop)
    }

    /// Port transmissions seen by the input carrier at `lambda_in`.
    pub fn port_transmission(&self, resonance: f64) -> (f64, f64) {
        self.transmission_at(self.params.lambda_in, resonance)
    }

    /// Thresholded output of the programmed port.
    pub fn eval(&self, x: bool, w: bool) -> Result<bool> {
        let (drop, through) = self.port_transmission(self.resonance_position(x, w));
        let t = match self.port {
            Port::Drop => drop,
            Port::Through => through,
        };
        let p = &self.params;
        if t >= p.t_hi {
            Ok(true)
        } else if t <= p.t_lo {
            Ok(false)
        } else {
            Err(Error::Indeterminate {
                value: t,
                t_lo: p.t_lo,
                t_hi: p.t_hi,
            })
        }
    }
}

/// Evaluates `g` on a config that must already be programmed for `g`.
pub fn gate_eval(cfg: &MrrPeolgConfig, g: GateFunction, x: bool, w: bool) -> Result<bool> {
    if cfg.function != g {
        return Err(Error::Config(format!(
            "gate programmed for {} but evaluated as {}",
            cfg.function, g
        )));
    }
    cfg.eval(x, w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub x: bool,
    pub w: bool,
    pub lambda_nm: f64,
    pub t_drop: f64,
    pub t_through: f64,
}

/// Transmission spectra over `points` evenly spaced probe wavelengths, one
/// block per operand combination in the order (0,0), (0,1), (1,0), (1,1).
pub fn spectral_sweep(
    cfg: &MrrPeolgConfig,
    start_nm: f64,
    end_nm: f64,
    points: usize,
) -> Result<Vec<SpectrumPoint>> {
    if points < 2 || !(end_nm > start_nm) {
        return Err(Error::Config(format!(
            "sweep needs at least two points over an increasing range (got {points} over [{start_nm}, {end_nm}])"
        )));
    }
    let step = (end_nm - start_nm) / (points - 1) as f64;
    let mut out = Vec::with_capacity(4 * points);
    for (x, w) in [(false, false), (false, true), (true, false), (true, true)] {
        let res = cfg.resonance_position(x, w);
        for k in 0..points {
            let lambda_nm = start_nm + k as f64 * step;
            let (t_drop, t_through) = cfg.transmission_at(lambda_nm, res);
            out.push(SpectrumPoint {
                x,
                w,
                lambda_nm,
                t_drop,
                t_through,
            });
        }
    }
    Ok(out)
}
