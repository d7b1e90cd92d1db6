//! Finite *-semigroups: tables, classification, orders and morphisms.

pub mod classify;
pub mod morphism;
pub mod order;
pub mod semigroup;

pub use classify::{classify, ClassificationReport, Flag};
pub use morphism::{EtaleReport, MorphismFlags, StarMorphism};
pub use order::{leq_left, leq_right, left_order, natural_order, right_order, Relation};
pub use semigroup::StarSemigroup;
