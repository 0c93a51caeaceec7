//! Photo-charge accumulator: a photodetector integrating onto one of two
//! ping-ponged capacitors, each holding at most `gamma` symbol intervals.

use crate::error::{Error, Result};

/// Tabulated accumulation capacity, (symbol rate in GS/s, gamma).
pub const GAMMA_TABLE: [(f64, u64); 7] = [
    (3.0, 39682),
    (5.0, 29761),
    (10.0, 19841),
    (20.0, 14880),
    (30.0, 10822),
    (40.0, 9920),
    (50.0, 8503),
];

/// Accumulation capacity at `sr` GS/s, linearly interpolated between table
/// points and floored to whole intervals.
pub fn gamma_for_symbol_rate(sr: f64) -> Result<u64> {
    let (lo, hi) = (GAMMA_TABLE[0].0, GAMMA_TABLE[GAMMA_TABLE.len() - 1].0);
    if !(lo..=hi).contains(&sr) {
        return Err(Error::range("symbol rate (GS/s)", sr, lo, hi));
    }
    for pair in GAMMA_TABLE.windows(2) {
        let ((s0, g0), (s1, g1)) = (pair[0], pair[1]);
        if sr == s0 {
            return Ok(g0);
        }
        if sr == s1 {
            return Ok(g1);
        }
        if sr < s1 {
            let t = (sr - s0) / (s1 - s0);
            return Ok((g0 as f64 + t * (g1 as f64 - g0 as f64)).floor() as u64);
        }
    }
    unreachable!("symbol rate checked against table bounds")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcaConfig {
    pub symbol_rate_gsps: f64,
    pub gamma: u64,
    pub volts_per_pulse: f64,
    /// Intervals a capacitor needs to discharge after being read.
    pub discharge_intervals: u64,
}

impl PcaConfig {
    pub const DEFAULT_DISCHARGE_INTERVALS: u64 = 100;

    pub fn for_symbol_rate(sr: f64) -> Result<Self> {
        Ok(PcaConfig {
            symbol_rate_gsps: sr,
            gamma: gamma_for_symbol_rate(sr)?,
            volts_per_pulse: 1.0,
            discharge_intervals: Self::DEFAULT_DISCHARGE_INTERVALS,
        })
    }

    /// A config with an explicit capacity, for models that are not table-bound.
    pub fn with_gamma(gamma: u64) -> Self {
        PcaConfig {
            symbol_rate_gsps: f64::NAN,
            gamma: gamma.max(1),
            volts_per_pulse: 1.0,
            discharge_intervals: Self::DEFAULT_DISCHARGE_INTERVALS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capacitor {
    C1,
    C2,
}

impl Capacitor {
    fn idx(self) -> usize {
        match self {
            Capacitor::C1 => 0,
            Capacitor::C2 => 1,
        }
    }

    fn other(self) -> Self {
        match self {
            Capacitor::C1 => Capacitor::C2,
            Capacitor::C2 => Capacitor::C1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaState {
    active: Capacitor,
    acc: [f64; 2],
    used: [u64; 2],
    /// Capacitor being discharged and the intervals it still needs.
    discharging: Option<(Capacitor, u64)>,
}

impl Default for PcaState {
    fn default() -> Self {
        Self::new()
    }
}

impl PcaState {
    pub fn new() -> Self {
        PcaState {
            active: Capacitor::C1,
            acc: [0.0; 2],
            used: [0; 2],
            discharging: None,
        }
    }

    pub fn active(&self) -> Capacitor {
        self.active
    }

    /// Accumulated power sum on the active capacitor.
    pub fn accumulated(&self) -> f64 {
        self.acc[self.active.idx()]
    }

    pub fn used(&self) -> u64 {
        self.used[self.active.idx()]
    }

    pub fn discharging(&self) -> Option<(Capacitor, u64)> {
        self.discharging
    }

    /// Adds one symbol interval carrying `power` (sum of incident pulse powers).
    pub fn accumulate(&mut self, cfg: &PcaConfig, power: f64) -> Result<()> {
        let a = self.active.idx();
        if self.used[a] >= cfg.gamma {
            return Err(Error::Saturated { gamma: cfg.gamma });
        }
        self.acc[a] += power;
        self.used[a] += 1;
        self.tick_discharge(1);
        Ok(())
    }

    /// Lets `intervals` idle intervals pass, advancing any discharge.
    pub fn idle(&mut self, intervals: u64) {
        self.tick_discharge(intervals);
    }

    fn tick_discharge(&mut self, intervals: u64) {
        if let Some((c, left)) = self.discharging {
            let left = left.saturating_sub(intervals);
            self.discharging = (left > 0).then_some((c, left));
        }
    }

    /// Reads the active capacitor, starts its discharge and hands
    /// accumulation to the other capacitor.
    pub fn read_and_swap(&mut self, cfg: &PcaConfig) -> Result<f64> {
        if let Some((_, remaining)) = self.discharging {
            return Err(Error::Busy { remaining });
        }
        let a = self.active.idx();
        let value = self.acc[a] * cfg.volts_per_pulse;
        self.acc[a] = 0.0;
        self.used[a] = 0;
        if cfg.discharge_intervals > 0 {
            self.discharging = Some((self.active, cfg.discharge_intervals));
        }
        self.active = self.active.other();
        let b = self.active.idx();
        self.acc[b] = 0.0;
        self.used[b] = 0;
        Ok(value)
    }
}
