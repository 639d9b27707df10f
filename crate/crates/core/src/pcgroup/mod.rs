//! Finite nilpotent groups given by power-commutator presentations.

mod concrete;
mod file;
mod presentation;
mod series;
mod solve;

pub use concrete::*;
pub use file::*;
pub use presentation::*;
pub use series::*;
pub use solve::*;
