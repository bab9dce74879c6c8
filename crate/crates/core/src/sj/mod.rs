//! The squeezed-join tree calculus.

mod lift;
mod net;
mod point;

pub use lift::{magic_coefficients, magic_formula, pair_weights, sj_eval, sj_eval_with};
pub use net::{epsilon_net, ground_net, unit_grid};
pub use point::{Join, SjPoint};
