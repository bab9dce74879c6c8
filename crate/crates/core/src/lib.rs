//! Squeezed-join lifts of functions on finite sets and regular linear
//! operators extending (pseudo)metrics from a subset to the whole space.

pub mod demo;
pub mod error;
pub mod nerve;
pub mod operator;
pub mod sj;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
pub use nerve::AmbientSpace;
pub use operator::{
    equivariant_extend, extend, near_isometric_extend, ExtendedTable, ExtensionConfig, GroupAction,
};
pub use sj::{sj_eval, SjPoint};
pub use table::{FunctionTable, GroundSpace};
