//! Variational calculus for quadratic Lagrangians with right-Caputo terms.
//! Discrete actions and their variations lead to Euler-Lagrange residuals;
//! canonical variables follow from the same Lagrangian.

mod action;
mod canonical;
mod lagrangian;
mod residual;

pub use action::{
    action_gradient, action_gradient_fd, action_value, discrete_el_residual, gateaux_variation,
    Variation,
};
pub use canonical::{canonical_state, CanonicalState};
pub use lagrangian::{LagrangianSpec, LeftCaputoTerm, Potential};
pub(crate) use residual::{assemble, nested_term, nested_velocity_rate};
pub use residual::{el_residual_first_order, el_residual_higher_order};
