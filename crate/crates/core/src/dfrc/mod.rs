//! Delay-feedback reservoir computing: one nonlinear node time-multiplexed
//! into `nv` virtual nodes by a masked input and a delay loop, with a
//! ridge-regression readout and the standard benchmark tasks.

pub mod experiment;
pub mod metrics;
pub mod readout;
pub mod reservoir;
pub mod tasks;

pub use experiment::{run_channel_eq, run_narma10, run_santafe, Task, TaskResult};
pub use metrics::{evaluate_nrmse, evaluate_ser, nrmse, ser};
pub use readout::{train_readout, ReadoutModel};
pub use reservoir::{reservoir_run, reservoir_run_from, MaskKind, Nonlinearity, ReservoirConfig, ReservoirState};
pub use tasks::{channel_eq_generate, narma10_generate, santafe_load, santafe_write};
