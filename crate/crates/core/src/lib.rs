//! Cross-Sperner families over the subset lattice `P([n])`.

pub mod bounds;
pub mod constructions;
pub mod lattice;
pub mod par;
pub mod search;
