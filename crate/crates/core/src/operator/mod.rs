//! The extension operator `T = Σ_n w_n T_n` and its equivariant variants.

mod compiled;
mod config;
mod group;
mod pipeline;

pub use compiled::CompiledOperator;
pub use config::{ExtensionConfig, RadiusSchedule};
pub use group::{equivariant_extend, near_isometric_extend, truncated_distance, GroupAction};
pub use pipeline::{
    build_for, chi, chi_n, default_base_points, default_truncation, e_n, e_n_entry, extend,
    ExtendedTable, Level, Pipeline, Provenance, MAX_DEFAULT_TRUNCATION,
};
