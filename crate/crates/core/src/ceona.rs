//! Configurable accelerator built from wavelength-parallel arithmetic units.
//!
//! A processing element (CoPE) holds `n` units on `n` wavelengths that feed
//! one photo-charge accumulator; a processing unit (CoPU) holds `m`
//! elements sharing one comb laser. Each element produces one output value
//! per pass (output-stationary mapping): the dot product is streamed in
//! chunks of `n` elements, one accumulation interval per chunk, so the
//! whole reduction happens in the accumulator without partial sums.
//!
//! Binary mode evaluates XNOR-bitcount; integer mode multiplies
//! sign-magnitude operands with AND-gated unary streams and routes each
//! product into a positive or negative accumulator by its sign.

use std::fmt;
use std::path::Path;

use crate::device::pca::{gamma_for_symbol_rate, PcaConfig, PcaState};
use crate::error::{Error, Result};
use crate::link_budget::{laser_power_stages, required_pd_power, LinkBudgetParams};
use crate::logic::GateFunction;
use crate::pbau::{ArithOp, CostModel};
use crate::unary::{prepare_mul, stream_gate, OperandPrecision};

/// Most wavelengths an element can carry (FSR / channel spacing).
pub const MAX_ELEMENT_SIZE: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComputeMode {
    /// Binarized operands, XNOR-bitcount.
    Bnn,
    /// Unsigned-magnitude integers of the given width, stochastic multiply.
    Int(OperandPrecision),
}

impl fmt::Display for ComputeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComputeMode::Bnn => f.write_str("bnn"),
            ComputeMode::Int(p) => write!(f, "int{}", p.bits()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CopuConfig {
    /// Units (wavelengths) per element.
    pub n: usize,
    /// Elements per processing unit.
    pub m: usize,
    pub sr_gsps: f64,
    pub mode: ComputeMode,
    pub gamma: u64,
    /// Accumulator readout and weight reload per pass, in intervals.
    pub readout_intervals: u64,
    /// Area outside the unit array (laser, accumulators, control), mm^2.
    pub peripheral_area_mm2: f64,
    pub cost: CostModel,
}

impl CopuConfig {
    pub const DEFAULT_PERIPHERAL_AREA_MM2: f64 = 1.0;

    /// Config with the accumulator capacity looked up for `sr_gsps`.
    pub fn new(n: usize, m: usize, sr_gsps: f64, mode: ComputeMode) -> Result<Self> {
        let gamma = gamma_for_symbol_rate(sr_gsps)?;
        Self::with_gamma(n, m, sr_gsps, mode, gamma)
    }

    pub fn with_gamma(n: usize, m: usize, sr_gsps: f64, mode: ComputeMode, gamma: u64) -> Result<Self> {
        if n == 0 || n > MAX_ELEMENT_SIZE {
            return Err(Error::range("element size n", n as f64, 1.0, MAX_ELEMENT_SIZE as f64));
        }
        if m == 0 {
            return Err(Error::range("element count m", 0.0, 1.0, f64::INFINITY));
        }
        if !(sr_gsps > 0.0 && sr_gsps.is_finite()) {
            return Err(Error::Config(format!("symbol rate {sr_gsps} GS/s")));
        }
        Ok(CopuConfig {
            n,
            m,
            sr_gsps,
            mode,
            gamma: gamma.max(1),
            readout_intervals: 1,
            peripheral_area_mm2: Self::DEFAULT_PERIPHERAL_AREA_MM2,
            cost: CostModel::default(),
        })
    }

    /// Duration of one accumulation interval in ns: one symbol in binary
    /// mode, one full unary window of `2^B` symbols in integer mode.
    pub fn interval_ns(&self) -> f64 {
        match self.mode {
            ComputeMode::Bnn => 1.0 / self.sr_gsps,
            ComputeMode::Int(p) => p.base_len() as f64 / self.sr_gsps,
        }
    }

    /// Energy of one unit for one interval, pJ.
    pub fn unit_energy_pj(&self) -> f64 {
        match self.mode {
            ComputeMode::Bnn => self.cost.energy_per_symbol(ArithOp::Mul),
            ComputeMode::Int(p) => self.cost.energy(ArithOp::Mul, p),
        }
    }

    fn intervals_for(&self, dot_len: usize) -> u64 {
        dot_len.div_ceil(self.n) as u64
    }

    fn pca(&self) -> PcaConfig {
        PcaConfig {
            discharge_intervals: 0,
            ..PcaConfig::with_gamma(self.gamma)
        }
    }

    fn check_capacity(&self, layer: &str, dot_len: usize) -> Result<u64> {
        let intervals = self.intervals_for(dot_len);
        if intervals > self.gamma {
            return Err(Error::Capacity {
                layer: layer.to_string(),
                intervals,
                gamma: self.gamma,
            });
        }
        Ok(intervals)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BnnDot {
    /// Number of agreeing positions.
    pub bitcount: u64,
    /// Dot product of the {-1, +1} images, `2 * bitcount - len`.
    pub bipolar: i64,
}

fn pack(bits: &[bool]) -> Vec<u64> {
    let mut words = vec![0u64; bits.len().div_ceil(64)];
    for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
        words[i / 64] |= 1 << (i % 64);
    }
    words
}

/// Popcount of XNOR(a, b) over bit positions `start..end`.
fn xnor_popcount(a: &[u64], b: &[u64], start: usize, end: usize) -> u64 {
    let mut count = 0;
    let mut pos = start;
    while pos < end {
        let word = pos / 64;
        let lo = pos % 64;
        let hi = (end - word * 64).min(64);
        let width = hi - lo;
        let mask = if width == 64 { u64::MAX } else { ((1u64 << width) - 1) << lo };
        count += (!(a[word] ^ b[word]) & mask).count_ones() as u64;
        pos += width;
    }
    count
}

/// XNOR-bitcount of two binarized vectors on one element.
pub fn ceona_b_dot(inputs: &[bool], weights: &[bool], cfg: &CopuConfig) -> Result<BnnDot> {
    if inputs.len() != weights.len() {
        return Err(Error::LengthMismatch {
            left: inputs.len(),
            right: weights.len(),
        });
    }
    let len = inputs.len();
    cfg.check_capacity("dot", len)?;
    let (a, b) = (pack(inputs), pack(weights));
    let pca_cfg = cfg.pca();
    let mut pca = PcaState::new();
    for start in (0..len).step_by(cfg.n) {
        let end = (start + cfg.n).min(len);
        pca.accumulate(&pca_cfg, xnor_popcount(&a, &b, start, end) as f64)?;
    }
    let bitcount = pca.read_and_swap(&pca_cfg)?.round() as u64;
    Ok(BnnDot {
        bitcount,
        bipolar: 2 * bitcount as i64 - len as i64,
    })
}

/// Sign-magnitude integer operand; zero is always positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignedOperand {
    negative: bool,
    magnitude: u64,
}

impl SignedOperand {
    pub fn new(negative: bool, magnitude: u64) -> Self {
        SignedOperand {
            negative: negative && magnitude != 0,
            magnitude,
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::new(v < 0, v.unsigned_abs())
    }

    pub fn is_negative(self) -> bool {
        self.negative
    }

    pub fn magnitude(self) -> u64 {
        self.magnitude
    }

    pub fn value(self) -> i64 {
        if self.negative {
            -(self.magnitude as i64)
        } else {
            self.magnitude as i64
        }
    }
}

/// Signed stochastic dot product, in units of `2^B` (each product is the
/// AND-gated unary count `ceil(|x||w| / 2^B)`).
pub fn ceona_i_dot(
    x: &[SignedOperand],
    w: &[SignedOperand],
    p: OperandPrecision,
    cfg: &CopuConfig,
) -> Result<i64> {
    if x.len() != w.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: w.len(),
        });
    }
    cfg.check_capacity("dot", x.len())?;
    let pca_cfg = cfg.pca();
    let (mut pos, mut neg) = (PcaState::new(), PcaState::new());
    for (xs, ws) in x.chunks(cfg.n).zip(w.chunks(cfg.n)) {
        let (mut pos_sum, mut neg_sum) = (0u64, 0u64);
        for (a, b) in xs.iter().zip(ws) {
            let (sx, sw) = prepare_mul(a.magnitude, b.magnitude, p)?;
            let count = stream_gate(&sx, &sw, GateFunction::And)?.value();
            // sign control gates the product onto one of the two detectors
            if a.negative != b.negative {
                neg_sum += count;
            } else {
                pos_sum += count;
            }
        }
        pos.accumulate(&pca_cfg, pos_sum as f64)?;
        neg.accumulate(&pca_cfg, neg_sum as f64)?;
    }
    let p_total = pos.read_and_swap(&pca_cfg)?.round() as i64;
    let n_total = neg.read_and_swap(&pca_cfg)?.round() as i64;
    Ok(p_total - n_total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Conv {
        k: usize,
        c: usize,
        r: usize,
        s: usize,
        h_out: usize,
        w_out: usize,
    },
    Fc {
        inputs: usize,
        outputs: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerWorkload {
    pub name: String,
    pub kind: LayerKind,
}

impl LayerWorkload {
    pub fn conv(name: impl Into<String>, k: usize, c: usize, r: usize, s: usize, h_out: usize, w_out: usize) -> Self {
        LayerWorkload {
            name: name.into(),
            kind: LayerKind::Conv { k, c, r, s, h_out, w_out },
        }
    }

    pub fn fc(name: impl Into<String>, inputs: usize, outputs: usize) -> Self {
        LayerWorkload {
            name: name.into(),
            kind: LayerKind::Fc { inputs, outputs },
        }
    }

    pub fn dot_len(&self) -> usize {
        match self.kind {
            LayerKind::Conv { c, r, s, .. } => c * r * s,
            LayerKind::Fc { inputs, .. } => inputs,
        }
    }

    pub fn outputs(&self) -> usize {
        match self.kind {
            LayerKind::Conv { k, h_out, w_out, .. } => k * h_out * w_out,
            LayerKind::Fc { outputs, .. } => outputs,
        }
    }

    fn validate(&self) -> Result<()> {
        let dims: &[usize] = match &self.kind {
            LayerKind::Conv { k, c, r, s, h_out, w_out } => &[*k, *c, *r, *s, *h_out, *w_out],
            LayerKind::Fc { inputs, outputs } => &[*inputs, *outputs],
        };
        if dims.contains(&0) {
            return Err(Error::Shape(format!("layer `{}` has a zero dimension", self.name)));
        }
        Ok(())
    }
}

/// Parses a network description: one `conv K C R S H_out W_out` or
/// `fc IN OUT` per line, `#` starts a comment. Layers are named
/// `<kind><line number>`.
pub fn parse_network(text: &str, path: &Path) -> Result<Vec<LayerWorkload>> {
    let err = |line: usize, msg: String| Error::Input {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut layers = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let kind = fields.next().unwrap_or_default().to_ascii_lowercase();
        let nums = fields
            .map(|f| {
                f.parse::<usize>()
                    .map_err(|_| err(line_no, format!("`{f}` is not a positive integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        let layer = match (kind.as_str(), nums.as_slice()) {
            ("conv", &[k, c, r, s, h, w]) => LayerWorkload::conv(format!("conv{line_no}"), k, c, r, s, h, w),
            ("fc", &[i, o]) => LayerWorkload::fc(format!("fc{line_no}"), i, o),
            ("conv", _) => return Err(err(line_no, "conv expects K C R S H_out W_out".into())),
            ("fc", _) => return Err(err(line_no, "fc expects IN OUT".into())),
            (other, _) => return Err(err(line_no, format!("unknown layer kind `{other}`"))),
        };
        layer.validate().map_err(|e| err(line_no, e.to_string()))?;
        layers.push(layer);
    }
    if layers.is_empty() {
        return Err(err(0, "network has no layers".into()));
    }
    Ok(layers)
}

pub fn load_network(path: &Path) -> Result<Vec<LayerWorkload>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_network(&text, path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerSchedule {
    pub outputs_total: u64,
    pub intervals_per_output: u64,
    pub passes: u64,
}

/// Output-stationary schedule: each element produces one output per pass.
pub fn map_layer(layer: &LayerWorkload, cfg: &CopuConfig) -> Result<LayerSchedule> {
    layer.validate()?;
    let intervals_per_output = cfg.check_capacity(&layer.name, layer.dot_len())?;
    let outputs_total = layer.outputs() as u64;
    Ok(LayerSchedule {
        outputs_total,
        intervals_per_output,
        passes: outputs_total.div_ceil(cfg.m as u64),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerPerf {
    pub name: String,
    pub dot_len: usize,
    pub schedule: LayerSchedule,
    pub latency_ns: f64,
    pub energy_mj: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Performance {
    pub layers: Vec<LayerPerf>,
    pub latency_ns: f64,
    /// Unit switching energy; depends only on the total work.
    pub compute_energy_mj: f64,
    pub laser_power_w: f64,
    pub energy_mj: f64,
    pub area_mm2: f64,
    pub fps: f64,
    pub fps_per_w: f64,
    pub fps_per_w_per_mm2: f64,
}

/// Laser power needed to hold one resolvable bit per detector at the
/// accumulator's data rate.
fn copu_laser_power(cfg: &CopuConfig, params: &LinkBudgetParams) -> Result<f64> {
    let dr_hz = 1e9 / cfg.interval_ns();
    let p_pd = required_pd_power(params, 1.0, dr_hz)?;
    let stages = (cfg.m as f64).log2().ceil();
    Ok(laser_power_stages(params, cfg.n as f64, cfg.m as f64, stages, p_pd))
}

/// Throughput, energy and area of one inference of `network`.
pub fn estimate_performance(
    network: &[LayerWorkload],
    cfg: &CopuConfig,
    params: &LinkBudgetParams,
) -> Result<Performance> {
    let laser_w = copu_laser_power(cfg, params)?;
    let interval = cfg.interval_ns();
    let unit_pj = cfg.unit_energy_pj();
    let mut layers = Vec::with_capacity(network.len());
    for layer in network {
        let sched = map_layer(layer, cfg)?;
        let latency_ns = sched.passes as f64
            * (sched.intervals_per_output + cfg.readout_intervals) as f64
            * interval;
        let unit_intervals = sched.outputs_total * sched.intervals_per_output * cfg.n as u64;
        let compute_mj = unit_intervals as f64 * unit_pj * 1e-9;
        let laser_mj = laser_w * latency_ns * 1e-6;
        layers.push(LayerPerf {
            name: layer.name.clone(),
            dot_len: layer.dot_len(),
            schedule: sched,
            latency_ns,
            energy_mj: compute_mj + laser_mj,
        });
    }
    let latency_ns: f64 = layers.iter().map(|l| l.latency_ns).sum();
    let energy_mj: f64 = layers.iter().map(|l| l.energy_mj).sum();
    let compute_energy_mj = energy_mj - laser_w * latency_ns * 1e-6;
    let area_mm2 = (cfg.m * cfg.n) as f64 * cfg.cost.area_mm2 + cfg.peripheral_area_mm2;
    let fps = 1e9 / latency_ns;
    let fps_per_w = 1.0 / (energy_mj * 1e-3);
    Ok(Performance {
        layers,
        latency_ns,
        compute_energy_mj,
        laser_power_w: laser_w,
        energy_mj,
        area_mm2,
        fps,
        fps_per_w,
        fps_per_w_per_mm2: fps_per_w / area_mm2,
    })
}
