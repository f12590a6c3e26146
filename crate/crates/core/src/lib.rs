//! Extraspecial p-groups in canonical exponent form, their forms and
//! automorphisms, and exact checks of local-subgroup and cohomological
//! statements on concrete finite groups.

pub mod cli;
pub mod cohomology;
pub mod field;
pub mod forms;
pub mod group;
pub mod matgroup;
pub mod report;
pub mod subgroup;
pub mod witt;

pub use field::{Fp, FpMatrix, FpVector, Prime};
pub use group::{Element, Family, GroupSpec};
