//! Periodic abelian groups: symbolic descriptors, heights, Ulm factors and
//! closedness criteria, plus exact solving over concrete finite abelian
//! groups.

mod criteria;
mod descriptor;
mod element;
mod finite;

pub use criteria::*;
pub use descriptor::*;
pub use element::*;
pub use finite::*;
