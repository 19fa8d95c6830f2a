//! Analysis and design of MEMS-referenced oscillators: resonator models,
//! static-capacitance compensation, phase noise and figure of merit, and
//! an independent nodal-analysis solver for cross-checking.

pub mod ac;
pub mod compensation;
pub mod csv;
pub mod design;
pub mod document;
pub mod error;
pub mod noise;
pub mod resonance;
pub mod resonator;
pub mod sweep;
pub mod units;

pub use compensation::{CompensationNetwork, DominantMode, Topology};
pub use design::{run_design, DesignReport, DesignSpec};
pub use error::{Error, Result};
pub use noise::{NoiseBudget, OscillatorOperatingPoint};
pub use resonator::{ComplexResponse, Resonator, Spacing};
