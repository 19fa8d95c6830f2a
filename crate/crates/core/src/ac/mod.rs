//! Independent small-signal solver for R/L/C netlists.

pub mod mna;
pub mod netlist;
pub mod topologies;

pub use mna::{ac_sweep, driving_point_impedance, MnaSystem};
pub use netlist::{parse_netlist, serialize_netlist, Diagnostic, DiagnosticCode, Netlist};
