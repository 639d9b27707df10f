//! Equations over groups: exponent-sum classification, solving in finite
//! nilpotent groups, Ulm-factor criteria for periodic abelian groups, witness
//! systems and truncated p-adic series.

pub mod abelian;
pub mod arith;
pub mod expr;
pub mod group;
pub mod linclass;
pub mod padic;
pub mod pcgroup;
pub mod report;
pub mod syntax;
pub mod system;
pub mod witness;
pub mod word;
