//! Sizing and timing equations for the power, trigger and alarm stages,
//! the circuit data model, and the audit of published figures.

mod circuit;
pub mod equations;
mod errata;
mod report;

pub use circuit::{CircuitError, CircuitSpec};
pub use equations::*;
pub use errata::{verify_against_paper, ErrataEntry, ErrataReport, Verdict, DEFAULT_TOLERANCE};
pub use report::{compute_report, DesignError, DesignReport, Record};
