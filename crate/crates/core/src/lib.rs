pub mod arith;
pub mod character;
pub mod cubic;
pub mod energy;
pub mod error;
pub mod field;
pub mod numeric;
pub mod poly;
pub mod rng;
pub mod runner;
pub mod sets;
pub mod sums;
pub mod transform;
pub mod weil;

pub use error::{Error, Result};
pub use field::{FieldCtx, FieldElem, FieldSpec};
