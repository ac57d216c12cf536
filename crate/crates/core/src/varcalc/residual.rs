//! Continuous-form Euler-Lagrange residuals evaluated with the nested
//! operators: the right Caputo derivative is sampled on the whole grid and
//! the left Riemann-Liouville derivative is applied to those samples.

use super::lagrangian::LagrangianSpec;
use crate::error::{FracError, Result};
use crate::fracops::{caputo_output, rl_derivative, FractionalOrder, Side, Trajectory};

/// `D_l^(1/2) [C_r^(1/2) x]` at node `k`.
pub(crate) fn nested_term(traj: &Trajectory, k: usize) -> Result<f64> {
    let inner = caputo_output(traj, FractionalOrder::HALF, Side::Right)?;
    let t = traj.grid().node(k);
    rl_derivative(&inner, FractionalOrder::HALF, Side::Left, t)?.finite(t, inner.value(0))
}

/// `d/dt D_l^(1/2) [C_r^(1/2) x']` at node `k`, by a central difference of
/// the composite at the neighbouring nodes.
pub(crate) fn nested_velocity_rate(traj: &Trajectory, k: usize) -> Result<f64> {
    let grid = traj.grid();
    let inner = caputo_output(&traj.derivative()?, FractionalOrder::HALF, Side::Right)?;
    let at = |j: usize| -> Result<f64> {
        let t = grid.node(j);
        rl_derivative(&inner, FractionalOrder::HALF, Side::Left, t)?.finite(t, inner.value(0))
    };
    Ok((at(k + 1)? - at(k - 1)?) / (2.0 * grid.step()))
}

/// `m x'' + Σ contributions - F(x)` at node `k`. Both residual forms go
/// through here so that inactive terms leave identical arithmetic.
pub(crate) fn assemble(
    spec: &LagrangianSpec,
    traj: &Trajectory,
    k: usize,
    contributions: &[f64],
) -> Result<f64> {
    let inertial = spec.mass() * traj.derivative_at(2, k)?;
    let force = spec.potential().force(traj.value(k));
    Ok(contributions.iter().fold(inertial, |acc, c| acc + c) - force)
}

fn interior_node(traj: &Trajectory, t: f64, margin: usize) -> Result<usize> {
    let k = traj.grid().locate(t)?;
    if k < margin || k + margin >= traj.grid().len() {
        return Err(FracError::Argument(format!(
            "residual needs {margin} node(s) of margin at each end, t = {t} is node {k}"
        )));
    }
    Ok(k)
}

fn friction_contributions(spec: &LagrangianSpec, traj: &Trajectory, k: usize) -> Result<Vec<f64>> {
    let mut c = Vec::new();
    if spec.friction_active() {
        c.push(-spec.gamma() * nested_term(traj, k)?);
    }
    Ok(c)
}

/// `m x'' - γ D_l^(1/2)[C_r^(1/2) x] - F(x)` at interior node `t`.
pub fn el_residual_first_order(spec: &LagrangianSpec, traj: &Trajectory, t: f64) -> Result<f64> {
    spec.ensure_instantiated()?;
    if spec.recoil_active() {
        return Err(FracError::Argument(
            "first-order residual needs κ = 0; use the higher-order residual".into(),
        ));
    }
    let k = interior_node(traj, t, 1)?;
    let c = friction_contributions(spec, traj, k)?;
    assemble(spec, traj, k, &c)
}

/// `m x'' - γ D_l^(1/2)[C_r^(1/2) x] + λ d/dt D_l^(1/2)[C_r^(1/2) x'] - F(x)`
/// at node `t`, at least two nodes from either end. The friction part is
/// kept when `γ > 0`, so the mixed Lagrangian is covered too.
pub fn el_residual_higher_order(spec: &LagrangianSpec, traj: &Trajectory, t: f64) -> Result<f64> {
    spec.ensure_instantiated()?;
    let k = interior_node(traj, t, 2)?;
    let mut c = friction_contributions(spec, traj, k)?;
    if spec.recoil_active() {
        c.push(spec.lambda() * nested_velocity_rate(traj, k)?);
    }
    assemble(spec, traj, k, &c)
}
