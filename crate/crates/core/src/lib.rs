//! Cellular integrals on the moduli spaces `M_{0,n}`.
//!
//! The crate is organised around the pipeline
//!
//! dihedral combinatorics → exact integrands → recurrences
//!   → high-precision evaluation → integer-relation recovery
//!
//! Each stage lives in its own module and can be used independently;
//! the `cellint` binary wires them together.

pub mod dihedral;
pub mod eval;
pub mod forms;
pub mod num;
pub mod recur;
pub mod relations;

pub use dihedral::{ConfigClass, DihedralStructure, HalfInt, Perm, StablePartition};
pub use forms::{Factor, FactoredRational, Frame, ParamSet};
pub use num::BigFloat;
pub use recur::{PolyRecurrence, RationalSequence};
