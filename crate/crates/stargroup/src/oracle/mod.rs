//! Independent ground truth: enumeration of small semigroups, standard
//! families, and naive re-implementations of the checked statements.
//!
//! Nothing here calls the predicates of the other modules; the naive checks
//! read raw tables only.

pub mod enumerate;
pub mod families;
pub mod naive;

pub use enumerate::{
    all_star_semigroups, canonical, enumerate_semigroups, enumerate_star_structures, Dedup,
    EnumerationTask,
};
pub use families::{standard_family, FAMILIES};
