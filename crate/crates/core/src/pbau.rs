//! Polymorphic binary arithmetic unit: binary-to-stream encoding, one
//! bit-wise gate pass and photo-charge accumulation of the result stream.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::device::gate::{program_gate, SpectralParams};
use crate::device::pca::{PcaConfig, PcaState};
use crate::error::{Error, Result};
use crate::logic::GateFunction;
use crate::unary::{prepare_add, prepare_mul, prepare_sub, stream_gate, OperandPrecision};

/// Arithmetic functions of the unit; each is bound to one gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub const ALL: [ArithOp; 3] = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul];

    pub fn gate(self) -> GateFunction {
        match self {
            ArithOp::Add => GateFunction::Or,
            ArithOp::Sub => GateFunction::Xor,
            ArithOp::Mul => GateFunction::And,
        }
    }

    pub fn stream_len(self, p: OperandPrecision) -> usize {
        match self {
            ArithOp::Add => p.add_len(),
            ArithOp::Sub | ArithOp::Mul => p.base_len(),
        }
    }

    /// Reference result the stream computation approximates.
    pub fn exact(self, x: u64, w: u64, p: OperandPrecision) -> f64 {
        match self {
            ArithOp::Add => (x + w) as f64,
            ArithOp::Sub => x.abs_diff(w) as f64,
            ArithOp::Mul => (x * w) as f64 / p.base_len() as f64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ArithOp::Add => "add",
            ArithOp::Sub => "sub",
            ArithOp::Mul => "mul",
        }
    }
}

impl fmt::Display for ArithOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ArithOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ArithOp::ALL
            .into_iter()
            .find(|op| op.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Format(format!("unknown operation `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbauMode {
    Arith(ArithOp),
    LogicGate(GateFunction),
    /// Plain modulator; carries no arithmetic.
    Modulator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cost {
    pub latency_ns: f64,
    pub energy_pj: f64,
}

/// Per-operation latency and energy, seeded from measured values at 6 and 8
/// bits and extended to other widths by stream-length scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    table: Vec<(ArithOp, u32, Cost)>,
    pub area_mm2: f64,
    /// Serializer symbol rate in GS/s.
    pub sr_stream_gsps: f64,
    /// Fixed readout overhead in ns.
    pub t_ro_ns: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        let c = |latency_ns, energy_pj| Cost {
            latency_ns,
            energy_pj,
        };
        CostModel {
            table: vec![
                (ArithOp::Add, 6, c(5.32, 16.1)),
                (ArithOp::Sub, 6, c(2.74, 6.8)),
                (ArithOp::Mul, 6, c(2.76, 10.2)),
                (ArithOp::Add, 8, c(20.51, 60.1)),
                (ArithOp::Sub, 8, c(10.27, 23.6)),
                (ArithOp::Mul, 8, c(10.29, 36.2)),
            ],
            area_mm2: 0.0012,
            sr_stream_gsps: 25.0,
            t_ro_ns: 0.03,
        }
    }
}

impl CostModel {
    pub fn lookup(&self, op: ArithOp, p: OperandPrecision) -> Option<Cost> {
        self.table
            .iter()
            .find(|(o, b, _)| *o == op && *b == p.bits())
            .map(|&(_, _, c)| c)
    }

    pub fn entries(&self) -> impl Iterator<Item = (ArithOp, u32, Cost)> + '_ {
        self.table.iter().copied()
    }

    /// `stream_length / SR + t_ro`.
    pub fn latency_model(&self, op: ArithOp, p: OperandPrecision, sr_gsps: f64) -> f64 {
        op.stream_len(p) as f64 / sr_gsps + self.t_ro_ns
    }

    pub fn latency(&self, op: ArithOp, p: OperandPrecision) -> f64 {
        self.lookup(op, p)
            .map(|c| c.latency_ns)
            .unwrap_or_else(|| self.latency_model(op, p, self.sr_stream_gsps))
    }

    /// Energy from the table, or the per-symbol energy of the widest
    /// tabulated entry for `op` scaled to the requested stream length.
    pub fn energy(&self, op: ArithOp, p: OperandPrecision) -> f64 {
        if let Some(c) = self.lookup(op, p) {
            return c.energy_pj;
        }
        self.energy_per_symbol(op) * op.stream_len(p) as f64
    }

    pub fn energy_per_symbol(&self, op: ArithOp) -> f64 {
        self.table
            .iter()
            .filter(|(o, _, _)| *o == op)
            .max_by_key(|(_, b, _)| *b)
            .map(|&(o, b, c)| c.energy_pj / o.stream_len(OperandPrecision(b)) as f64)
            .unwrap_or(0.0)
    }

    pub fn cost(&self, op: ArithOp, p: OperandPrecision) -> Cost {
        Cost {
            latency_ns: self.latency(op, p),
            energy_pj: self.energy(op, p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PbauReport {
    pub result: u64,
    pub latency_ns: f64,
    pub energy_pj: f64,
}

/// Runs one operation end to end: encode, gate, accumulate.
pub fn pbau_execute(
    mode: PbauMode,
    x: u64,
    w: u64,
    p: OperandPrecision,
    cost: &CostModel,
) -> Result<PbauReport> {
    match mode {
        PbauMode::Arith(op) => {
            let (a, b) = match op {
                ArithOp::Add => prepare_add(x, w, p)?,
                ArithOp::Sub => prepare_sub(x, w, p)?,
                ArithOp::Mul => prepare_mul(x, w, p)?,
            };
            let out = stream_gate(&a, &b, op.gate())?;
            // one symbol per PCA interval; streams never exceed 2^17 < gamma floor
            let pca_cfg = PcaConfig::with_gamma(out.len() as u64);
            let mut pca = PcaState::new();
            for &bit in out.bits() {
                pca.accumulate(&pca_cfg, if bit { 1.0 } else { 0.0 })?;
            }
            let result = pca.read_and_swap(&pca_cfg)?.round() as u64;
            debug_assert_eq!(result, out.value());
            let c = cost.cost(op, p);
            Ok(PbauReport {
                result,
                latency_ns: c.latency_ns,
                energy_pj: c.energy_pj,
            })
        }
        PbauMode::LogicGate(g) => {
            if x > 1 || w > 1 {
                return Err(Error::range("logic operand", x.max(w) as f64, 0.0, 1.0));
            }
            let gate = program_gate(SpectralParams::default(), g)?;
            let bit = gate.eval(x == 1, w == 1)?;
            Ok(PbauReport {
                result: bit as u64,
                latency_ns: 1.0 / cost.sr_stream_gsps + cost.t_ro_ns,
                energy_pj: cost.energy_per_symbol(ArithOp::Mul),
            })
        }
        PbauMode::Modulator => Err(Error::Unsupported(
            "modulator mode performs no arithmetic".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaeReport {
    pub op: ArithOp,
    pub bits: u32,
    /// Mean absolute error divided by `2^B`.
    pub mae: f64,
    /// Largest absolute error in result counts.
    pub max_err: f64,
    pub latency_ns: f64,
    pub energy_pj: f64,
}

/// Exhaustive error sweep over all `2^B * 2^B` operand pairs (B <= 10).
pub fn mae_sweep(op: ArithOp, p: OperandPrecision, cost: &CostModel) -> Result<MaeReport> {
    if p.bits() > 10 {
        return Err(Error::range("sweep precision", p.bits() as f64, 1.0, 10.0));
    }
    let n = p.max_operand() + 1;
    let (sum, max) = (0..n)
        .into_par_iter()
        .map(|x| -> Result<(f64, f64)> {
            let mut sum = 0.0;
            let mut max: f64 = 0.0;
            for w in 0..n {
                let r = pbau_execute(PbauMode::Arith(op), x, w, p, cost)?.result as f64;
                let e = (r - op.exact(x, w, p)).abs();
                sum += e;
                max = max.max(e);
            }
            Ok((sum, max))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((0.0, 0.0f64), |(s, m), (a, b)| (s + a, m.max(b)));
    let c = cost.cost(op, p);
    Ok(MaeReport {
        op,
        bits: p.bits(),
        mae: sum / (n * n) as f64 / p.base_len() as f64,
        max_err: max,
        latency_ns: c.latency_ns,
        energy_pj: c.energy_pj,
    })
}
