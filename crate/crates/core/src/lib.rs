//! Photonic unary arithmetic, accelerator and reservoir-computing models.
//!
//! The crate is layered bottom-up: [`unary`] stream encodings and [`logic`]
//! gate functions, behavioral [`device`] models, the arithmetic unit in
//! [`pbau`], the [`link_budget`] scalability analysis, the [`ceona`]
//! accelerator and the delayed-feedback reservoir in [`dfrc`].

// NaN must fail range checks, so `!(x < max)` is deliberate throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ceona;
pub mod device;
pub mod dfrc;
pub mod error;
pub mod link_budget;
pub mod logic;
pub mod pbau;
pub mod unary;

pub use error::{Error, Result};
pub use logic::GateFunction;
pub use unary::{Encoding, Endianness, OperandPrecision, UnaryStream};
