//! Library side of the `sperner` command: witness files and table rows.

pub mod app;
pub mod table;
pub mod witness;

pub use witness::{Provenance, Verdict, Witness, WitnessError};
