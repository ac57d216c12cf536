//! Fractional operators on sampled functions.

mod differences;
mod gamma;
mod grid;
mod identities;
mod operators;
mod quadrature;
mod trajectory;

pub use differences::{first_derivative, first_derivative_transpose, second_derivative};
pub use gamma::gamma;
pub use grid::{Family, FractionalOrder, Grid, OperatorKind, Side};
pub use identities::{
    compose_rl_after_caputo_half, integration_by_parts_defect, integration_by_parts_sides,
};
pub use operators::{
    apply, caputo_derivative, caputo_output, caputo_profile, ordinary_integral, rl_derivative,
    rl_derivative_profile, rl_integral, rl_integral_output, rl_integral_profile, OperatorValue,
};
pub use quadrature::{CellSlope, ProductTrapezoid};
pub use trajectory::{
    AnalyticPack, AnalyticPath, EndpointPower, PolynomialPath, SlopeRule, Trajectory,
};
