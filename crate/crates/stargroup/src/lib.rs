//! Finite *-semigroups and the structures built over them: ordered groupoids
//! with a mediator, presheaves on the category L(S) of an inverse semigroup,
//! the adjunction between presheaves and semigroups over S, involutive S-sets,
//! and the algebra of finite fiber subsets.

pub mod checks;
pub mod error;
pub mod gen;
pub mod groupoid;
pub mod io;
pub mod kernel;
pub mod modalg;
pub mod oracle;
pub mod report;
pub mod site;
pub mod statements;
pub mod ssets;
pub mod topos;

pub use error::{Error, Result};
pub use kernel::*;
