//! Fractional calculus on uniform grids and a fractional action principle
//! for dissipative mechanics.
//!
//! * [`fracops`]: left and right fractional operators on sampled paths, with
//!   closed-form handling of endpoint power terms.
//! * [`varcalc`]: quadratic Lagrangians mixing integer and right-Caputo
//!   terms. Actions and their variations lead to Euler-Lagrange residuals and
//!   canonical variables.
//! * [`limits`]: shrinking windows around a placed point. They expose the
//!   Caputo ratio limit and recover the dissipative coefficients.
//! * [`models`]: linear friction and the radiating point charge with
//!   classical reference solutions.

pub mod convergence;
pub mod error;
pub mod fracops;
pub mod limits;
pub mod models;
pub mod varcalc;

pub use error::{FracError, Result};
pub use fracops::{
    AnalyticPack, AnalyticPath, FractionalOrder, Grid, OperatorKind, OperatorValue, PolynomialPath,
    Side, Trajectory,
};
