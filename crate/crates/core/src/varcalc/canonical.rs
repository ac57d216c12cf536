//! Canonical coordinate-momentum pairs and the Hamiltonian at one instant.

use super::lagrangian::LagrangianSpec;
use crate::error::Result;
use crate::fracops::{caputo_derivative, FractionalOrder, Side, Trajectory};

/// Canonical pairs of the fractional Lagrangian. Inactive pairs are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalState {
    pub q1: f64,
    pub p1: f64,
    pub q_half: f64,
    pub p_half: f64,
    pub q_3half: f64,
    pub p_3half: f64,
    pub lagrangian: f64,
    pub hamiltonian: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub fractional_energy: f64,
}

impl CanonicalState {
    /// `H - (kinetic + potential + fractional energy)`.
    pub fn decomposition_defect(&self) -> f64 {
        self.hamiltonian - (self.kinetic + self.potential + self.fractional_energy)
    }
}

/// `q1 = x'`, `q_half = C_r^(1/2) x`, `q_3half = C_r^(1/2) x'` with
/// momenta `m q1`, `γ q_half`, `λ q_3half`, and `H = Σ q p - L`.
pub fn canonical_state(spec: &LagrangianSpec, traj: &Trajectory, t: f64) -> Result<CanonicalState> {
    spec.ensure_instantiated()?;
    let k = traj.grid().locate(t)?;
    let x = traj.value(k);
    let q1 = traj.derivative_at(1, k)?;
    let q_half = if spec.friction_active() {
        caputo_derivative(traj, FractionalOrder::HALF, Side::Right, t)?
    } else {
        0.0
    };
    let q_3half = if spec.recoil_active() {
        caputo_derivative(&traj.derivative()?, FractionalOrder::HALF, Side::Right, t)?
    } else {
        0.0
    };
    let p1 = spec.mass() * q1;
    let p_half = spec.gamma() * q_half;
    let p_3half = spec.lambda() * q_3half;
    let lagrangian = spec.lagrangian(x, q1, q_half, q_3half);
    Ok(CanonicalState {
        q1,
        p1,
        q_half,
        p_half,
        q_3half,
        p_3half,
        lagrangian,
        hamiltonian: q1 * p1 + q_half * p_half + q_3half * p_3half - lagrangian,
        kinetic: 0.5 * spec.mass() * q1 * q1,
        potential: spec.potential().energy(x),
        fractional_energy: 0.5 * spec.gamma() * q_half * q_half + spec.kappa() * q_3half * q_3half,
    })
}
