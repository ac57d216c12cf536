//! The action, its Gâteaux variation and its exact discrete gradient.

use rayon::prelude::*;

use super::lagrangian::LagrangianSpec;
use crate::error::{FracError, Result};
use crate::fracops::{
    caputo_profile, first_derivative, first_derivative_transpose, FractionalOrder,
    ProductTrapezoid, Side, Trajectory,
};

/// Samples of the Lagrangian's ingredients at every node.
pub(crate) struct Ingredients {
    pub velocity: Vec<f64>,
    pub q_half: Vec<f64>,
    pub q_3half: Vec<f64>,
}

pub(crate) fn ingredients(spec: &LagrangianSpec, traj: &Trajectory) -> Result<Ingredients> {
    spec.ensure_instantiated()?;
    let n = traj.grid().len();
    let velocity = traj.derivative_samples(1)?;
    let q_half = if spec.friction_active() {
        caputo_profile(traj, FractionalOrder::HALF, Side::Right)?
    } else {
        vec![0.0; n]
    };
    let q_3half = if spec.recoil_active() {
        caputo_profile(&traj.derivative()?, FractionalOrder::HALF, Side::Right)?
    } else {
        vec![0.0; n]
    };
    Ok(Ingredients {
        velocity,
        q_half,
        q_3half,
    })
}

/// Trapezoidal integral of the Lagrangian over the grid.
pub fn action_value(spec: &LagrangianSpec, traj: &Trajectory) -> Result<f64> {
    let ing = ingredients(spec, traj)?;
    let l: Vec<f64> = (0..traj.grid().len())
        .map(|i| {
            spec.lagrangian(
                traj.value(i),
                ing.velocity[i],
                ing.q_half[i],
                ing.q_3half[i],
            )
        })
        .collect();
    Ok(traj.grid().trapezoid(&l))
}

/// A variation direction `η` and the scale `ε` of the symmetric difference.
#[derive(Debug, Clone)]
pub struct Variation {
    pub eta: Trajectory,
    pub epsilon: f64,
}

impl Variation {
    pub const DEFAULT_EPSILON: f64 = 1e-4;
    const BOUNDARY_TOLERANCE: f64 = 1e-12;

    pub fn new(eta: Trajectory) -> Self {
        Self {
            eta,
            epsilon: Self::DEFAULT_EPSILON,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// `η` vanishes at both ends, and so does `η'` when `n_int = 2`. The
    /// derivative is taken from the analytic pack when `η` carries one.
    fn check(&self, n_int: usize) -> Result<()> {
        let last = self.eta.grid().len() - 1;
        for order in 0..n_int {
            for i in [0, last] {
                let v = self.eta.derivative_at(order, i)?;
                if v.abs() > Self::BOUNDARY_TOLERANCE {
                    return Err(FracError::Precondition(format!(
                        "variation derivative of order {order} is {v} at node {i}, expected 0"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `(S[x + εη] - S[x - εη]) / (2ε)`.
pub fn gateaux_variation(spec: &LagrangianSpec, traj: &Trajectory, var: &Variation) -> Result<f64> {
    if var.eta.grid() != traj.grid() {
        return Err(FracError::Argument(
            "variation and path live on different grids".into(),
        ));
    }
    if var.epsilon.is_nan() || var.epsilon <= 0.0 {
        return Err(FracError::Argument(format!(
            "ε must be positive, got {}",
            var.epsilon
        )));
    }
    var.check(spec.n_int())?;
    let plus = Trajectory::linear_combination(1.0, traj, var.epsilon, &var.eta)?;
    let minus = Trajectory::linear_combination(1.0, traj, -var.epsilon, &var.eta)?;
    Ok((action_value(spec, &plus)? - action_value(spec, &minus)?) / (2.0 * var.epsilon))
}

/// Right Caputo derivative of order 1/2 on plain samples as a linear map,
/// `C = -R P R D`, with `R` the reversal, `P` the product trapezoid of order
/// 1/2 and `D` the difference stencil. Matches `caputo_profile` on samples
/// without a pack.
struct RightCaputoMap {
    rule: ProductTrapezoid,
    h: f64,
}

impl RightCaputoMap {
    fn new(h: f64, n: usize) -> Self {
        Self {
            rule: ProductTrapezoid::new(FractionalOrder::HALF.complement().alpha(), h, n),
            h,
        }
    }

    fn reversed(v: &[f64]) -> Vec<f64> {
        v.iter().rev().copied().collect()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = first_derivative(x, self.h);
        let p = self.rule.profile(&Self::reversed(&d));
        p.iter().rev().map(|v| -v).collect()
    }

    fn transpose(&self, v: &[f64]) -> Vec<f64> {
        let p = self.rule.transpose(&Self::reversed(v));
        let r: Vec<f64> = p.iter().rev().map(|v| -v).collect();
        first_derivative_transpose(&r, self.h)
    }
}

/// Gradient of the discrete action with respect to the samples of a
/// pack-free trajectory, assembled from transposed operator matrices.
pub fn action_gradient(spec: &LagrangianSpec, traj: &Trajectory) -> Result<Vec<f64>> {
    spec.ensure_instantiated()?;
    let grid = traj.grid();
    let (h, n) = (grid.step(), grid.len());
    let x = traj.values();
    let w = grid.trapezoid_weights();
    let weighted = |v: &[f64]| -> Vec<f64> { v.iter().zip(&w).map(|(a, b)| a * b).collect() };

    let dx = first_derivative(x, h);
    let mut grad = first_derivative_transpose(&weighted(&dx), h);
    for g in grad.iter_mut() {
        *g *= spec.mass();
    }
    let pot = spec.potential();
    for ((g, xi), wi) in grad.iter_mut().zip(x).zip(&w) {
        *g -= wi * pot.derivative(*xi);
    }
    let c = RightCaputoMap::new(h, n);
    if spec.friction_active() {
        let cx = c.apply(x);
        for (g, v) in grad.iter_mut().zip(c.transpose(&weighted(&cx))) {
            *g += spec.gamma() * v;
        }
    }
    if spec.recoil_active() {
        let cdx = c.apply(&dx);
        let back = first_derivative_transpose(&c.transpose(&weighted(&cdx)), h);
        for (g, v) in grad.iter_mut().zip(back) {
            *g += 2.0 * spec.kappa() * v;
        }
    }
    Ok(grad)
}

/// Discrete Euler-Lagrange residual at every node, `-∂S/∂x_j / w_j` with
/// `w_j` the trapezoid weight. At interior nodes `∂S/∂x_j = -h R_j`.
pub fn discrete_el_residual(spec: &LagrangianSpec, traj: &Trajectory) -> Result<Vec<f64>> {
    let grad = action_gradient(spec, traj)?;
    Ok(grad
        .iter()
        .zip(traj.grid().trapezoid_weights())
        .map(|(g, w)| -g / w)
        .collect())
}

/// Central differences of [`action_value`] in each sample of a pack-free
/// copy of `traj`, with step `delta`.
pub fn action_gradient_fd(
    spec: &LagrangianSpec,
    traj: &Trajectory,
    delta: f64,
) -> Result<Vec<f64>> {
    let base = traj.samples_only();
    (0..base.grid().len())
        .into_par_iter()
        .map(|j| {
            let bump = |s: f64| -> Result<f64> {
                let mut v = base.values().to_vec();
                v[j] += s;
                action_value(spec, &Trajectory::from_samples(*base.grid(), v)?)
            };
            Ok((bump(delta)? - bump(-delta)?) / (2.0 * delta))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::{AnalyticPack, Grid};
    use crate::varcalc::Potential;

    #[test]
    fn caputo_map_matches_profile() {
        let grid = Grid::new(0.0, 1.0, 17).unwrap();
        let x = Trajectory::from_fn(grid, |t| (2.0 * t).sin() + t * t).unwrap();
        let c = RightCaputoMap::new(grid.step(), grid.len());
        let want = caputo_profile(&x, FractionalOrder::HALF, Side::Right).unwrap();
        for (a, b) in c.apply(x.values()).iter().zip(&want) {
            assert_eq!(a, b);
        }
        let v: Vec<f64> = (0..17).map(|i| (i as f64 * 0.4).cos()).collect();
        let lhs: f64 = c.apply(x.values()).iter().zip(&v).map(|(a, b)| a * b).sum();
        let rhs: f64 = c
            .transpose(&v)
            .iter()
            .zip(x.values())
            .map(|(a, b)| a * b)
            .sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn free_particle_action() {
        let grid = Grid::new(0.0, 1.0, 33).unwrap();
        let x = Trajectory::from_fn(grid, |t| t).unwrap();
        let spec = LagrangianSpec::new(1.0, Potential::zero()).unwrap();
        assert!((action_value(&spec, &x).unwrap() - 0.5).abs() < 1e-14);
        let friction = spec.with_friction(1.0).unwrap();
        let want = 0.5 + 1.0 / std::f64::consts::PI;
        assert!((action_value(&friction, &x).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn variation_boundary_is_enforced() {
        let grid = Grid::new(0.0, 1.0, 33).unwrap();
        let x = Trajectory::from_fn(grid, |t| t).unwrap();
        let spec = LagrangianSpec::new(1.0, Potential::zero()).unwrap();
        let bad = Variation::new(Trajectory::from_fn(grid, |t| t).unwrap());
        assert!(matches!(
            gateaux_variation(&spec, &x, &bad),
            Err(FracError::Precondition(_))
        ));
        let zero = Variation::new(Trajectory::from_fn(grid, |_| 0.0).unwrap());
        assert_eq!(gateaux_variation(&spec, &x, &zero).unwrap(), 0.0);
        let bump = AnalyticPack::from_fns(vec![
            Box::new(|t: f64| (t * (1.0 - t)).powi(2)),
            Box::new(|t: f64| 2.0 * t * (1.0 - t) * (1.0 - 2.0 * t)),
        ]);
        let recoil = spec.with_recoil(0.1).unwrap();
        let eta = Variation::new(Trajectory::from_pack(grid, bump).unwrap());
        assert!(gateaux_variation(&recoil, &x, &eta).is_ok());
    }

    #[test]
    fn adjoint_gradient_matches_differences() {
        let grid = Grid::new(0.0, 1.0, 21).unwrap();
        let x = Trajectory::from_fn(grid, |t| (1.7 * t).sin() + 0.3 * t * t).unwrap();
        let spec = LagrangianSpec::new(1.2, Potential::harmonic(0.8))
            .unwrap()
            .with_friction(0.6)
            .unwrap()
            .with_recoil(0.3)
            .unwrap();
        let adj = action_gradient(&spec, &x).unwrap();
        let fd = action_gradient_fd(&spec, &x, 1e-4).unwrap();
        let scale = adj.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, f) in adj.iter().zip(&fd) {
            assert!((a - f).abs() <= 1e-8 * scale, "{a} vs {f}");
        }
    }
}
