//! Behavioral device models: the polymorphic logic gate, the photo-charge
//! accumulator and the nonlinear reservoir node.

pub mod gate;
pub mod node;
pub mod pca;

pub use gate::{gate_eval, program_gate, spectral_sweep, MrrPeolgConfig, Port, SpectralParams, SpectrumPoint};
pub use node::{integrate_node, nonlinear_node_step, Amplitude, NonlinearMrrConfig};
pub use pca::{gamma_for_symbol_rate, Capacitor, PcaConfig, PcaState, GAMMA_TABLE};
