//! Unary (stochastic) bit-streams and the binary-to-stream encoders.
//!
//! Streams are materialized as explicit bit sequences, index 0 being the
//! first symbol transmitted. Correlation between the two operand streams
//! is chosen per operation so that a single bit-wise gate produces an exact
//! sum (OR), an exact absolute difference (XOR) or a ceiling-rounded scaled
//! product (AND).

use std::fmt;

use crate::error::{Error, Result};
use crate::logic::GateFunction;

/// Largest supported operand width.
pub const MAX_PRECISION_BITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Thermometer,
    EvenSpread,
    /// Output of a gate; no structural invariant beyond the popcount.
    Raw,
}

/// Which end of a thermometer stream anchors the run of ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endianness {
    LeftAligned,
    RightAligned,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnaryStream {
    bits: Vec<bool>,
    encoding: Encoding,
    endianness: Option<Endianness>,
    value: u64,
}

impl UnaryStream {
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn endianness(&self) -> Option<Endianness> {
        self.endianness
    }

    /// Number of ones carried by the stream.
    pub fn value(&self) -> u64 {
        self.value
    }

    /// Wraps arbitrary bits as a raw stream.
    pub fn raw(bits: Vec<bool>) -> Self {
        let value = bits.iter().filter(|&&b| b).count() as u64;
        UnaryStream {
            bits,
            encoding: Encoding::Raw,
            endianness: None,
            value,
        }
    }

    /// Indices of the one bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }
}

impl fmt::Display for UnaryStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Bit width `B` of the binary operands fed into the encoders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OperandPrecision(pub(crate) u32);

impl OperandPrecision {
    pub fn new(bits: u32) -> Result<Self> {
        if bits == 0 || bits > MAX_PRECISION_BITS {
            return Err(Error::range(
                "operand precision",
                bits as f64,
                1.0,
                MAX_PRECISION_BITS as f64,
            ));
        }
        Ok(OperandPrecision(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Stream length used by MUL and SUB, `2^B`.
    pub fn base_len(self) -> usize {
        1 << self.0
    }

    /// Stream length used by ADD, `2^(B+1)`.
    pub fn add_len(self) -> usize {
        1 << (self.0 + 1)
    }

    /// Largest representable operand, `2^B - 1`.
    pub fn max_operand(self) -> u64 {
        (1u64 << self.0) - 1
    }

    fn check(self, what: &'static str, v: u64) -> Result<()> {
        if v > self.max_operand() {
            return Err(Error::range(what, v as f64, 0.0, self.max_operand() as f64));
        }
        Ok(())
    }
}

fn check_len(v: u64, len: usize) -> Result<()> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::Format(format!(
            "stream length {len} is not a power of two"
        )));
    }
    if len > 1 << (MAX_PRECISION_BITS + 1) {
        return Err(Error::Format(format!("stream length {len} too large")));
    }
    if v > len as u64 {
        return Err(Error::range("stream value", v as f64, 0.0, len as f64));
    }
    Ok(())
}

/// Thermometer code: one contiguous run of `v` ones at the anchored end.
pub fn encode_thermometer(v: u64, len: usize, end: Endianness) -> Result<UnaryStream> {
    check_len(v, len)?;
    let v = v as usize;
    let bits = (0..len)
        .map(|i| match end {
            Endianness::LeftAligned => i < v,
            Endianness::RightAligned => i >= len - v,
        })
        .collect();
    Ok(UnaryStream {
        bits,
        encoding: Encoding::Thermometer,
        endianness: Some(end),
        value: v as u64,
    })
}

/// Evenly spread code: bit `i` is set iff `floor((i+1)v/L) > floor(iv/L)`.
///
/// Every window of `x` consecutive bits holds `floor(xv/L)` or `ceil(xv/L)`
/// ones, so the stream is uncorrelated with any thermometer run.
pub fn encode_even_spread(v: u64, len: usize) -> Result<UnaryStream> {
    check_len(v, len)?;
    let l = len as u64;
    let bits = (0..l).map(|i| (i + 1) * v / l > i * v / l).collect();
    Ok(UnaryStream {
        bits,
        encoding: Encoding::EvenSpread,
        endianness: None,
        value: v,
    })
}

/// Opposite-endianness thermometer pair of length `2^(B+1)`; OR yields `x + w`.
pub fn prepare_add(x: u64, w: u64, p: OperandPrecision) -> Result<(UnaryStream, UnaryStream)> {
    p.check("x", x)?;
    p.check("w", w)?;
    Ok((
        encode_thermometer(x, p.add_len(), Endianness::LeftAligned)?,
        encode_thermometer(w, p.add_len(), Endianness::RightAligned)?,
    ))
}

/// Same-endianness thermometer pair of length `2^B`; XOR yields `|x - w|`.
pub fn prepare_sub(x: u64, w: u64, p: OperandPrecision) -> Result<(UnaryStream, UnaryStream)> {
    p.check("x", x)?;
    p.check("w", w)?;
    Ok((
        encode_thermometer(x, p.base_len(), Endianness::RightAligned)?,
        encode_thermometer(w, p.base_len(), Endianness::RightAligned)?,
    ))
}

/// Thermometer `x` against evenly spread `w`; AND yields `ceil(x*w / 2^B)`.
pub fn prepare_mul(x: u64, w: u64, p: OperandPrecision) -> Result<(UnaryStream, UnaryStream)> {
    p.check("x", x)?;
    p.check("w", w)?;
    Ok((
        encode_thermometer(x, p.base_len(), Endianness::RightAligned)?,
        encode_even_spread(w, p.base_len())?,
    ))
}

/// Bit-wise gate over two equal-length streams.
pub fn stream_gate(a: &UnaryStream, b: &UnaryStream, g: GateFunction) -> Result<UnaryStream> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let bits = a
        .bits
        .iter()
        .zip(&b.bits)
        .map(|(&x, &w)| g.apply(x, w))
        .collect();
    Ok(UnaryStream::raw(bits))
}
