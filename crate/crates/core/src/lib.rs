//! Exact rational verification of weight-filtered long exact sequences of
//! Clemens–Schmid type.
//!
//! The layers build on each other: [`linalg`] provides exact subspace
//! arithmetic, [`filtered`] weight-filtered spaces and strict maps,
//! [`monodromy`] the monodromy filtration of a nilpotent operator, and [`cs`]
//! the instance model with its hypothesis checker and verdict engines.
//! [`gen`] builds random clean and adversarial instances and
//! [`degenerations`] builds fixtures from dual graphs of degenerate curves.

pub mod cs;
pub mod degenerations;
pub mod filtered;
pub mod gen;
pub mod linalg;
pub mod monodromy;
pub mod scalar;
