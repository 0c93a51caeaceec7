//! Optical link budget and wavelength-parallelism scalability.
//!
//! A detector must see enough optical power for the link to resolve the
//! required input bits against shot, thermal and laser intensity noise; the
//! laser must then supply that power through every loss on the path to `N`
//! wavelengths times `M` processing elements. The largest `N` (with `M = N`)
//! that stays within the laser budget, capped by how many channels fit in
//! one free spectral range, is the supported element size.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};

/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;
/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Parameter file shipped with the toolkit.
pub const DEFAULT_PARAMS_TOML: &str = include_str!("../../../params/link_budget.toml");

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    pub responsivity_a_per_w: f64,
    pub dark_current_a: f64,
    /// Use `inf` to drop the thermal term.
    pub load_resistance_ohm: f64,
    pub temperature_k: f64,
    pub rin_db_per_hz: f64,
}

impl NoiseParams {
    pub fn rin_linear(&self) -> f64 {
        10f64.powf(self.rin_db_per_hz / 10.0)
    }
}

/// Path losses and efficiencies, all as linear power fractions in (0, 1]
/// except the waveguide loss (dB/cm) and element length (cm).
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossParams {
    pub waveguide_db_per_cm: f64,
    pub element_length_cm: f64,
    pub eta_smf: f64,
    pub eta_ec: f64,
    pub eta_wpe: f64,
    pub il_input_osm: f64,
    pub il_mrr: f64,
    pub il_penalty: f64,
    pub obl_osm: f64,
    pub obl_mrr: f64,
    pub el_splitter: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArchSection {
    spacing_nm: Option<f64>,
    waveguide_db_per_cm: Option<f64>,
    element_length_cm: Option<f64>,
    eta_smf: Option<f64>,
    eta_ec: Option<f64>,
    eta_wpe: Option<f64>,
    il_input_osm: Option<f64>,
    il_mrr: Option<f64>,
    il_penalty: Option<f64>,
    obl_osm: Option<f64>,
    obl_mrr: Option<f64>,
    el_splitter: Option<f64>,
}

impl ArchSection {
    fn apply(&self, base: LossParams) -> LossParams {
        LossParams {
            waveguide_db_per_cm: self.waveguide_db_per_cm.unwrap_or(base.waveguide_db_per_cm),
            element_length_cm: self.element_length_cm.unwrap_or(base.element_length_cm),
            eta_smf: self.eta_smf.unwrap_or(base.eta_smf),
            eta_ec: self.eta_ec.unwrap_or(base.eta_ec),
            eta_wpe: self.eta_wpe.unwrap_or(base.eta_wpe),
            il_input_osm: self.il_input_osm.unwrap_or(base.il_input_osm),
            il_mrr: self.il_mrr.unwrap_or(base.il_mrr),
            il_penalty: self.il_penalty.unwrap_or(base.il_penalty),
            obl_osm: self.obl_osm.unwrap_or(base.obl_osm),
            obl_mrr: self.obl_mrr.unwrap_or(base.obl_mrr),
            el_splitter: self.el_splitter.unwrap_or(base.el_splitter),
        }
    }
}

/// Every symbol needed to evaluate the budget for one architecture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudgetParams {
    pub noise: NoiseParams,
    pub losses: LossParams,
    pub fsr_nm: f64,
    pub spacing_nm: f64,
    pub p_laser_max_w: f64,
}

impl LinkBudgetParams {
    pub fn validate(&self) -> Result<()> {
        let l = &self.losses;
        let fractions = [
            ("eta_smf", l.eta_smf),
            ("eta_ec", l.eta_ec),
            ("eta_wpe", l.eta_wpe),
            ("il_input_osm", l.il_input_osm),
            ("il_mrr", l.il_mrr),
            ("il_penalty", l.il_penalty),
            ("obl_osm", l.obl_osm),
            ("obl_mrr", l.obl_mrr),
            ("el_splitter", l.el_splitter),
        ];
        for (name, v) in fractions {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Config(format!("{name} = {v} not in (0, 1]")));
            }
        }
        if !(l.waveguide_db_per_cm >= 0.0 && l.element_length_cm >= 0.0) {
            return Err(Error::Config("waveguide loss and element length must be non-negative".into()));
        }
        if !(self.fsr_nm > self.spacing_nm && self.spacing_nm > 0.0) {
            return Err(Error::Config(format!(
                "need FSR > spacing > 0 (got {} and {})",
                self.fsr_nm, self.spacing_nm
            )));
        }
        let n = &self.noise;
        if !(n.responsivity_a_per_w > 0.0
            && n.dark_current_a >= 0.0
            && n.load_resistance_ohm > 0.0
            && n.temperature_k >= 0.0
            && self.p_laser_max_w > 0.0)
        {
            return Err(Error::Config("noise parameters or laser budget out of range".into()));
        }
        Ok(())
    }

    /// Channels that fit in one free spectral range.
    pub fn channel_cap(&self) -> usize {
        (self.fsr_nm / self.spacing_nm + 1e-9).floor() as usize
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumSection {
    fsr_nm: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct LaserSection {
    max_power_w: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParamFile {
    noise: NoiseParams,
    losses: LossParams,
    spectrum: SpectrumSection,
    laser: LaserSection,
    #[serde(default)]
    arch: BTreeMap<String, ArchSection>,
}

/// A parsed parameter file: shared sections plus per-architecture overrides.
#[derive(Debug, Clone)]
pub struct ParamFile {
    raw: RawParamFile,
}

impl ParamFile {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawParamFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("parameter file: {e}")))?;
        for key in raw.arch.keys() {
            key.parse::<Architecture>()?;
        }
        let file = ParamFile { raw };
        for arch in Architecture::ALL {
            file.params_for(arch).validate()?;
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn shipped() -> Self {
        Self::parse(DEFAULT_PARAMS_TOML).expect("shipped parameter file is valid")
    }

    /// Effective parameters for `arch`, with its overrides applied.
    pub fn params_for(&self, arch: Architecture) -> LinkBudgetParams {
        let section = self.raw.arch.get(arch.key());
        LinkBudgetParams {
            noise: self.raw.noise,
            losses: section
                .map(|s| s.apply(self.raw.losses))
                .unwrap_or(self.raw.losses),
            fsr_nm: self.raw.spectrum.fsr_nm,
            spacing_nm: section
                .and_then(|s| s.spacing_nm)
                .unwrap_or_else(|| arch.default_spacing_nm()),
            p_laser_max_w: self.raw.laser.max_power_w,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Architecture {
    /// Stochastic accumulation: detectors integrate a full unary window.
    CeonaI,
    /// Analog MRR-weight architecture.
    Amw,
    /// Analog MZM-weight architecture.
    Maw,
}

impl Architecture {
    pub const ALL: [Architecture; 3] = [Architecture::CeonaI, Architecture::Amw, Architecture::Maw];

    pub fn key(self) -> &'static str {
        match self {
            Architecture::CeonaI => "ceona_i",
            Architecture::Amw => "amw",
            Architecture::Maw => "maw",
        }
    }

    pub fn default_spacing_nm(self) -> f64 {
        match self {
            Architecture::CeonaI => 0.25,
            Architecture::Amw | Architecture::Maw => 0.8,
        }
    }

    /// Detector data rate in Hz for symbol rate `sr_gsps` at `bits` precision.
    pub fn data_rate_hz(self, sr_gsps: f64, bits: u32) -> f64 {
        match self {
            Architecture::CeonaI => sr_gsps * 1e9 / 2f64.powi(bits as i32),
            Architecture::Amw | Architecture::Maw => sr_gsps * 1e9,
        }
    }

    /// Input resolution each wavelength must carry.
    pub fn required_bits(self, bits: u32) -> f64 {
        match self {
            Architecture::CeonaI => 1.0,
            Architecture::Amw | Architecture::Maw => bits as f64,
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        Architecture::ALL
            .into_iter()
            .find(|a| a.key() == norm)
            .ok_or_else(|| Error::Format(format!("unknown architecture `{s}`")))
    }
}

/// Total input-referred noise current density (A/sqrt(Hz)).
pub fn noise_beta(params: &LinkBudgetParams, p_pd: f64) -> f64 {
    let n = &params.noise;
    let signal = n.responsivity_a_per_w * p_pd;
    let shot = 2.0 * ELEMENTARY_CHARGE * (signal + n.dark_current_a);
    let thermal = 4.0 * BOLTZMANN * n.temperature_k / n.load_resistance_ohm;
    let rin = signal * signal * n.rin_linear();
    (shot + thermal + rin).sqrt()
}

/// Resolvable input bits at detector power `p_pd` (W) and data rate `dr_hz`.
pub fn achievable_bits(params: &LinkBudgetParams, p_pd: f64, dr_hz: f64) -> Result<f64> {
    let signal = params.noise.responsivity_a_per_w * p_pd;
    let noise = noise_beta(params, p_pd) * (dr_hz / std::f64::consts::SQRT_2).sqrt();
    let ratio = signal / noise;
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::Sensitivity);
    }
    Ok((20.0 * ratio.log10() - 1.76) / 6.02)
}

const PD_BRACKET: (f64, f64) = (1e-9, 1.0);
const PD_REL_TOL: f64 = 1e-3;

/// Smallest detector power meeting `n_target` bits, by log-space bisection
/// over [1 nW, 1 W] to 0.1% relative width. The result always satisfies
/// the target.
pub fn required_pd_power(params: &LinkBudgetParams, n_target: f64, dr_hz: f64) -> Result<f64> {
    let meets = |p: f64| achievable_bits(params, p, dr_hz).map(|n| n >= n_target);
    let (mut lo, mut hi) = PD_BRACKET;
    if meets(lo)? {
        return Ok(lo);
    }
    if !meets(hi)? {
        return Err(Error::Infeasible(format!(
            "{n_target} bits at {dr_hz:.3e} Hz needs more than {hi} W at the detector"
        )));
    }
    while hi / lo - 1.0 > PD_REL_TOL {
        let mid = (lo * hi).sqrt();
        if meets(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Laser power for `n` wavelengths feeding `m` elements through
/// `splitter_stages` splitter levels.
pub(crate) fn laser_power_stages(params: &LinkBudgetParams, n: f64, m: f64, splitter_stages: f64, p_pd: f64) -> f64 {
    let l = &params.losses;
    let waveguide = 10f64.powf(l.waveguide_db_per_cm * n * l.element_length_cm / 10.0) * m
        / (l.eta_smf * l.eta_ec * l.il_input_osm);
    let detector = p_pd / (l.eta_wpe * l.il_mrr);
    let osm = l.obl_osm.powf(n - 1.0) * l.el_splitter.powf(splitter_stages);
    let mrr = l.obl_mrr.powf(n - 1.0) * l.il_penalty;
    waveguide * detector / (osm * mrr)
}

/// Laser power (W) to deliver `p_pd` per detector with `n` wavelengths and
/// `m` elements; `m` must be a power of two (one binary splitter tree).
pub fn laser_power(params: &LinkBudgetParams, n: usize, m: usize, p_pd: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Mapping("need at least one wavelength".into()));
    }
    if m == 0 || !m.is_power_of_two() {
        return Err(Error::Mapping(format!(
            "{m} elements cannot be fed by a binary splitter tree"
        )));
    }
    Ok(laser_power_stages(params, n as f64, m as f64, m.trailing_zeros() as f64, p_pd))
}

/// Laser power with `m = n` and a fractional splitter depth `log2(n)`,
/// as used by the element-size search.
pub fn laser_power_square(params: &LinkBudgetParams, n: usize, p_pd: f64) -> f64 {
    let nf = n as f64;
    laser_power_stages(params, nf, nf, nf.log2(), p_pd)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scalability {
    pub arch: Architecture,
    pub bits: u32,
    pub sr_gsps: f64,
    /// Supported element size; 0 when even `n = 1` is infeasible.
    pub n: usize,
    pub p_pd_w: f64,
    /// Laser power at the reported `n` (NaN when infeasible).
    pub p_laser_w: f64,
    /// True when the channel cap, not the laser budget, limited `n`.
    pub capped: bool,
    pub feasible: bool,
}

/// Largest `n = m` whose laser power fits the budget, capped at FSR/spacing.
pub fn max_supported_n(arch: Architecture, bits: u32, sr_gsps: f64, params: &LinkBudgetParams) -> Scalability {
    let infeasible = |p_pd_w| Scalability {
        arch,
        bits,
        sr_gsps,
        n: 0,
        p_pd_w,
        p_laser_w: f64::NAN,
        capped: false,
        feasible: false,
    };
    let dr = arch.data_rate_hz(sr_gsps, bits);
    let p_pd = match required_pd_power(params, arch.required_bits(bits), dr) {
        Ok(p) => p,
        Err(_) => return infeasible(f64::NAN),
    };
    let cap = params.channel_cap();
    let fits = |n: usize| laser_power_square(params, n, p_pd) <= params.p_laser_max_w;
    // laser power grows monotonically in n, so stop at the first failure
    let n = (1..=cap).take_while(|&n| fits(n)).last().unwrap_or(0);
    if n == 0 {
        return infeasible(p_pd);
    }
    Scalability {
        arch,
        bits,
        sr_gsps,
        n,
        p_pd_w: p_pd,
        p_laser_w: laser_power_square(params, n, p_pd),
        capped: n == cap && fits(cap + 1),
        feasible: true,
    }
}

/// Evaluates every (arch, bits, sr) combination; rows come back in
/// arch-major, then bits, then sr order.
pub fn scalability_sweep(
    file: &ParamFile,
    archs: &[Architecture],
    bits: &[u32],
    srs: &[f64],
) -> Vec<Scalability> {
    let grid: Vec<(Architecture, u32, f64)> = archs
        .iter()
        .flat_map(|&a| bits.iter().flat_map(move |&b| srs.iter().map(move |&s| (a, b, s))))
        .collect();
    grid.par_iter()
        .map(|&(a, b, s)| max_supported_n(a, b, s, &file.params_for(a)))
        .collect()
}

/// Solves for the `il_penalty` that makes `max_supported_n` land on
/// `target_n` at the given operating point. Laser power is inversely
/// proportional to the penalty, so the budget is placed midway (in `n`)
/// between `target_n` and `target_n + 1`.
pub fn calibrate_penalty(
    arch: Architecture,
    bits: u32,
    sr_gsps: f64,
    params: &LinkBudgetParams,
    target_n: usize,
) -> Result<f64> {
    if target_n == 0 || target_n > params.channel_cap() {
        return Err(Error::range(
            "calibration target",
            target_n as f64,
            1.0,
            params.channel_cap() as f64,
        ));
    }
    let p_pd = required_pd_power(params, arch.required_bits(bits), arch.data_rate_hz(sr_gsps, bits))?;
    let mut unit = *params;
    unit.losses.il_penalty = 1.0;
    let nf = target_n as f64 + 0.5;
    let needed = laser_power_stages(&unit, nf, nf, nf.log2(), p_pd);
    let penalty = needed / params.p_laser_max_w;
    if !(penalty > 0.0 && penalty <= 1.0) {
        return Err(Error::Infeasible(format!(
            "target n = {target_n} needs il_penalty = {penalty:.4}, outside (0, 1]"
        )));
    }
    Ok(penalty)
}
