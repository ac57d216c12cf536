//! Fractional integrals and derivatives of sampled trajectories, on either
//! side of the evaluation point.
//!
//! Right operators are evaluated as left operators on the reflected
//! trajectory `x(a + b - t)`. The reflection absorbs the `(-1)^n` factor in
//! the definition of right derivatives, so no extra sign appears.
//!
//! Left Caputo derivatives integrate the kernel `(t-u)^(-α)/Γ(1-α)` against a
//! piecewise-linear interpolant of `x'`: analytic `x'` when a pack is present,
//! central differences otherwise, or cell slopes of `x` for sampled operator
//! outputs. Riemann-Liouville derivatives add the boundary term
//! `x(a) (t-a)^(-α) / Γ(1-α)` to the Caputo value.
//!
//! When a sample vector carries an [`EndpointPower`] annotation `c (t-a)^p`
//! the power term is removed before quadrature and its image is added back in
//! closed form, `J^β (t-a)^p = Γ(p+1)/Γ(p+β+1) (t-a)^(p+β)` and
//! `D^β (t-a)^p = Γ(p+1)/Γ(p-β+1) (t-a)^(p-β)`.

use std::borrow::Cow;

use rayon::prelude::*;

use super::differences;
use super::gamma::gamma_positive;
use super::grid::{Family, FractionalOrder, OperatorKind, Side};
use super::quadrature::{CellSlope, ProductTrapezoid};
use super::trajectory::{EndpointPower, SlopeRule, Trajectory};
use crate::error::{FracError, Result};

/// Value of a fractional derivative, or the sign of its divergence at the
/// endpoint where a nonzero boundary value makes it unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorValue {
    Finite(f64),
    /// +∞ for `sign > 0`, -∞ for `sign < 0`.
    Divergent {
        sign: f64,
    },
}

impl OperatorValue {
    pub fn value(&self) -> Option<f64> {
        match *self {
            OperatorValue::Finite(v) => Some(v),
            OperatorValue::Divergent { .. } => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, OperatorValue::Divergent { .. })
    }

    /// The finite value, or [`FracError::Singular`] naming where it diverged.
    pub fn finite(self, t: f64, boundary_value: f64) -> Result<f64> {
        match self {
            OperatorValue::Finite(v) => Ok(v),
            OperatorValue::Divergent { .. } => Err(FracError::Singular { t, boundary_value }),
        }
    }
}

fn oriented(traj: &Trajectory, side: Side) -> Cow<'_, Trajectory> {
    match side {
        Side::Left => Cow::Borrowed(traj),
        Side::Right => Cow::Owned(traj.reflected()),
    }
}

fn oriented_node(n: usize, k: usize, side: Side) -> usize {
    match side {
        Side::Left => k,
        Side::Right => n - 1 - k,
    }
}

fn unorient<T>(mut v: Vec<T>, side: Side) -> Vec<T> {
    if side == Side::Right {
        v.reverse();
    }
    v
}

/// Samples with the annotated left power term removed.
fn regular_part(traj: &Trajectory) -> (Cow<'_, [f64]>, Option<EndpointPower>) {
    match traj.endpoint_power(Side::Left) {
        None => (Cow::Borrowed(traj.values()), None),
        Some(p) => {
            let h = traj.grid().step();
            let r = traj
                .values()
                .iter()
                .enumerate()
                .map(|(j, v)| v - p.coefficient * (j as f64 * h).powf(p.exponent))
                .collect();
            (Cow::Owned(r), Some(p))
        }
    }
}

struct LeftIntegral<'a> {
    rule: ProductTrapezoid,
    regular: Cow<'a, [f64]>,
    power: Option<(f64, f64)>,
    h: f64,
}

impl<'a> LeftIntegral<'a> {
    fn new(traj: &'a Trajectory, beta: f64) -> Self {
        let h = traj.grid().step();
        let (regular, power) = regular_part(traj);
        Self {
            rule: ProductTrapezoid::new(beta, h, traj.grid().len()),
            regular,
            power: power.map(|p| {
                let c = p.coefficient * gamma_positive(p.exponent + 1.0)
                    / gamma_positive(p.exponent + beta + 1.0);
                (c, p.exponent + beta)
            }),
            h,
        }
    }

    fn at(&self, k: usize) -> f64 {
        let base = self.rule.at(&self.regular, k);
        match self.power {
            Some((c, e)) => base + c * (k as f64 * self.h).powf(e),
            None => base,
        }
    }
}

enum CaputoSource<'a> {
    /// Product trapezoid on derivative samples.
    Derivative(ProductTrapezoid, Vec<f64>),
    /// Cell slopes of the (regular part of the) samples.
    Cells(CellSlope, Cow<'a, [f64]>),
}

struct LeftCaputo<'a> {
    source: CaputoSource<'a>,
    power: Option<(f64, f64)>,
    h: f64,
    t0: f64,
}

impl<'a> LeftCaputo<'a> {
    fn new(traj: &'a Trajectory, beta: f64) -> Result<Self> {
        let grid = traj.grid();
        let (h, n) = (grid.step(), grid.len());
        let (regular, power) = regular_part(traj);
        let from_pack = if power.is_none() && traj.pack().is_some() {
            grid.nodes()
                .map(|t| traj.pack().and_then(|p| p.eval(1, t)))
                .collect::<Option<Vec<f64>>>()
        } else {
            None
        };
        let source = match (from_pack, traj.slope_rule()) {
            (Some(d), _) => CaputoSource::Derivative(ProductTrapezoid::new(1.0 - beta, h, n), d),
            (None, SlopeRule::Central) => CaputoSource::Derivative(
                ProductTrapezoid::new(1.0 - beta, h, n),
                differences::first_derivative(&regular, h),
            ),
            (None, SlopeRule::Cell) => CaputoSource::Cells(CellSlope::new(beta, h, n), regular),
        };
        Ok(Self {
            source,
            power: power.map(|p| {
                let c = p.coefficient * gamma_positive(p.exponent + 1.0)
                    / gamma_positive(p.exponent - beta + 1.0);
                (c, p.exponent - beta)
            }),
            h,
            t0: grid.a(),
        })
    }

    fn at(&self, k: usize) -> Result<f64> {
        let base = match &self.source {
            CaputoSource::Derivative(rule, d) => rule.at(d, k),
            CaputoSource::Cells(rule, g) => rule.at(g, k),
        };
        let Some((c, e)) = self.power else {
            return Ok(base);
        };
        if k > 0 {
            return Ok(base + c * (k as f64 * self.h).powf(e));
        }
        if e > 0.0 || c == 0.0 {
            Ok(base)
        } else if e == 0.0 {
            Ok(base + c)
        } else {
            Err(FracError::Singular {
                t: self.t0,
                boundary_value: c,
            })
        }
    }
}

fn rl_boundary(traj: &Trajectory, beta: f64, caputo: f64, k: usize) -> OperatorValue {
    let x0 = traj.value(0);
    if k == 0 {
        if x0 != 0.0 {
            return OperatorValue::Divergent { sign: x0.signum() };
        }
        return OperatorValue::Finite(caputo);
    }
    let dt = k as f64 * traj.grid().step();
    OperatorValue::Finite(caputo + x0 * dt.powf(-beta) / gamma_positive(1.0 - beta))
}

/// Left or right Riemann-Liouville integral of order α at grid node `t`.
pub fn rl_integral(traj: &Trajectory, order: FractionalOrder, side: Side, t: f64) -> Result<f64> {
    let k = traj.grid().locate(t)?;
    let view = oriented(traj, side);
    Ok(LeftIntegral::new(&view, order.alpha()).at(oriented_node(traj.grid().len(), k, side)))
}

/// [`rl_integral`] at every node.
pub fn rl_integral_profile(traj: &Trajectory, order: FractionalOrder, side: Side) -> Vec<f64> {
    let view = oriented(traj, side);
    let op = LeftIntegral::new(&view, order.alpha());
    let v = (0..traj.grid().len())
        .into_par_iter()
        .map(|k| op.at(k))
        .collect();
    unorient(v, side)
}

/// Left or right Caputo derivative of order α at grid node `t`.
pub fn caputo_derivative(
    traj: &Trajectory,
    order: FractionalOrder,
    side: Side,
    t: f64,
) -> Result<f64> {
    let k = traj.grid().locate(t)?;
    let view = oriented(traj, side);
    LeftCaputo::new(&view, order.alpha())?.at(oriented_node(traj.grid().len(), k, side))
}

/// [`caputo_derivative`] at every node.
pub fn caputo_profile(traj: &Trajectory, order: FractionalOrder, side: Side) -> Result<Vec<f64>> {
    let view = oriented(traj, side);
    let op = LeftCaputo::new(&view, order.alpha())?;
    let v = (0..traj.grid().len())
        .into_par_iter()
        .map(|k| op.at(k))
        .collect::<Result<Vec<_>>>()?;
    Ok(unorient(v, side))
}

/// Left or right Riemann-Liouville derivative of order α at grid node `t`.
///
/// At `t = a` (left) or `t = b` (right) with a nonzero boundary value the
/// result is [`OperatorValue::Divergent`].
pub fn rl_derivative(
    traj: &Trajectory,
    order: FractionalOrder,
    side: Side,
    t: f64,
) -> Result<OperatorValue> {
    let k = traj.grid().locate(t)?;
    let view = oriented(traj, side);
    let kk = oriented_node(traj.grid().len(), k, side);
    let caputo = LeftCaputo::new(&view, order.alpha())?.at(kk)?;
    Ok(rl_boundary(&view, order.alpha(), caputo, kk))
}

/// [`rl_derivative`] at every node.
pub fn rl_derivative_profile(
    traj: &Trajectory,
    order: FractionalOrder,
    side: Side,
) -> Result<Vec<OperatorValue>> {
    let view = oriented(traj, side);
    let beta = order.alpha();
    let op = LeftCaputo::new(&view, beta)?;
    let v = (0..traj.grid().len())
        .into_par_iter()
        .map(|k| Ok(rl_boundary(&view, beta, op.at(k)?, k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(unorient(v, side))
}

/// Integer-order (α = 1) integral from `a` to `t` (left) or `t` to `b`
/// (right), by the cumulative trapezoid rule.
pub fn ordinary_integral(traj: &Trajectory, side: Side, t: f64) -> Result<f64> {
    let k = traj.grid().locate(t)?;
    let x = traj.values();
    let range = match side {
        Side::Left => 0..k,
        Side::Right => k..x.len() - 1,
    };
    let h = traj.grid().step();
    Ok(range.map(|j| 0.5 * h * (x[j] + x[j + 1])).sum())
}

/// Evaluate any of the six operators.
pub fn apply(
    kind: OperatorKind,
    traj: &Trajectory,
    order: FractionalOrder,
    t: f64,
) -> Result<OperatorValue> {
    match kind.family {
        Family::RlIntegral => rl_integral(traj, order, kind.side, t).map(OperatorValue::Finite),
        Family::CaputoDerivative => {
            caputo_derivative(traj, order, kind.side, t).map(OperatorValue::Finite)
        }
        Family::RlDerivative => rl_derivative(traj, order, kind.side, t),
    }
}

/// The Caputo derivative sampled on the whole grid, as a trajectory that
/// remembers its endpoint power term `x'(a) (t-a)^(1-α) / Γ(2-α)` (left) or
/// `-x'(b) (b-t)^(1-α) / Γ(2-α)` (right).
pub fn caputo_output(traj: &Trajectory, order: FractionalOrder, side: Side) -> Result<Trajectory> {
    let beta = order.alpha();
    let view = oriented(traj, side);
    let op = LeftCaputo::new(&view, beta)?;
    let values = (0..traj.grid().len())
        .into_par_iter()
        .map(|k| op.at(k))
        .collect::<Result<Vec<_>>>()?;
    let annotation = if view.endpoint_power(Side::Left).is_none() {
        Some((
            Side::Left,
            EndpointPower {
                exponent: 1.0 - beta,
                coefficient: view.derivative_at(1, 0)? / gamma_positive(2.0 - beta),
            },
        ))
    } else {
        None
    };
    let out = Trajectory::operator_output(*traj.grid(), values, annotation)?;
    Ok(match side {
        Side::Left => out,
        Side::Right => out.reflected(),
    })
}

/// The Riemann-Liouville integral sampled on the whole grid, remembering its
/// endpoint power term `x(a) (t-a)^α / Γ(1+α)` (mirrored for the right side).
pub fn rl_integral_output(
    traj: &Trajectory,
    order: FractionalOrder,
    side: Side,
) -> Result<Trajectory> {
    let beta = order.alpha();
    let view = oriented(traj, side);
    let op = LeftIntegral::new(&view, beta);
    let values = (0..traj.grid().len())
        .into_par_iter()
        .map(|k| op.at(k))
        .collect();
    let annotation = Some((
        Side::Left,
        EndpointPower {
            exponent: beta,
            coefficient: view.value(0) / gamma_positive(1.0 + beta),
        },
    ));
    let out = Trajectory::operator_output(*traj.grid(), values, annotation)?;
    Ok(match side {
        Side::Left => out,
        Side::Right => out.reflected(),
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::fracops::grid::Grid;
    use crate::fracops::trajectory::PolynomialPath;

    fn unit(n: usize) -> Grid {
        Grid::new(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn integral_of_identity_at_one() {
        let x = Trajectory::from_fn(unit(101), |t| t).unwrap();
        let v = rl_integral(&x, FractionalOrder::HALF, Side::Left, 1.0).unwrap();
        let want = 4.0 / (3.0 * PI.sqrt());
        assert!((v - want).abs() < 1e-12);
        assert!((want - 0.752_252_778_1).abs() < 1e-10);
    }

    #[test]
    fn zero_maps_to_zero() {
        let x = Trajectory::from_fn(unit(33), |_| 0.0).unwrap();
        for kind in OperatorKind::ALL {
            for t in [0.0, 0.5, 1.0] {
                let v = apply(kind, &x, FractionalOrder::new(0.3).unwrap(), t).unwrap();
                assert_eq!(v, OperatorValue::Finite(0.0), "{kind:?} at {t}");
            }
        }
    }

    #[test]
    fn ordinary_integral_of_one() {
        let x = Trajectory::from_fn(unit(17), |_| 1.0).unwrap();
        let v = ordinary_integral(&x, Side::Left, 0.625).unwrap();
        assert!((v - 0.625).abs() < 1e-15);
        let r = ordinary_integral(&x, Side::Right, 0.625).unwrap();
        assert!((r - 0.375).abs() < 1e-15);
    }

    #[test]
    fn caputo_of_identity() {
        let x = Trajectory::from_fn(unit(65), |t| t).unwrap();
        let left = caputo_derivative(&x, FractionalOrder::HALF, Side::Left, 1.0).unwrap();
        let right = caputo_derivative(&x, FractionalOrder::HALF, Side::Right, 0.0).unwrap();
        let want = 2.0 / PI.sqrt();
        assert!((left - want).abs() < 1e-12);
        assert!((right + want).abs() < 1e-12);
        assert!((want - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-15);
    }

    #[test]
    fn caputo_annihilates_constants() {
        let x = Trajectory::from_fn(unit(65), |_| 4.2).unwrap();
        for side in [Side::Left, Side::Right] {
            for v in caputo_profile(&x, FractionalOrder::new(0.7).unwrap(), side).unwrap() {
                assert!(v.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rl_derivative_of_one() {
        let x = Trajectory::from_fn(unit(65), |_| 1.0).unwrap();
        let v = rl_derivative(&x, FractionalOrder::HALF, Side::Left, 1.0).unwrap();
        assert!((v.value().unwrap() - 1.0 / PI.sqrt()).abs() < 1e-14);
        assert!((1.0 / PI.sqrt() - 0.564_189_583_5).abs() < 1e-10);
    }

    #[test]
    fn rl_derivative_of_shifted_identity() {
        let g = Grid::new(2.0, 3.0, 65).unwrap();
        let x = Trajectory::from_fn(g, |t| t - 2.0).unwrap();
        let v = rl_derivative(&x, FractionalOrder::HALF, Side::Left, 3.0).unwrap();
        assert!((v.value().unwrap() - 2.0 / PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rl_derivative_flags_singular_endpoint() {
        let x = Trajectory::from_fn(unit(9), |t| 2.0 - t).unwrap();
        let left = rl_derivative(&x, FractionalOrder::HALF, Side::Left, 0.0).unwrap();
        assert_eq!(left, OperatorValue::Divergent { sign: 1.0 });
        let right = rl_derivative(&x, FractionalOrder::HALF, Side::Right, 1.0).unwrap();
        assert_eq!(right, OperatorValue::Divergent { sign: 1.0 });
        let neg = Trajectory::from_fn(unit(9), |t| t - 3.0).unwrap();
        let v = rl_derivative(&neg, FractionalOrder::HALF, Side::Left, 0.0).unwrap();
        assert_eq!(v, OperatorValue::Divergent { sign: -1.0 });
        assert!(matches!(
            v.finite(0.0, -3.0),
            Err(FracError::Singular { .. })
        ));
        // Vanishing boundary value: finite at the endpoint.
        let z = Trajectory::from_fn(unit(9), |t| t).unwrap();
        let v = rl_derivative(&z, FractionalOrder::HALF, Side::Left, 0.0).unwrap();
        assert_eq!(v, OperatorValue::Finite(0.0));
    }

    #[test]
    fn off_grid_and_outside_times_are_rejected() {
        let x = Trajectory::from_fn(unit(9), |t| t).unwrap();
        for t in [0.3, 1.5, -0.01] {
            assert!(matches!(
                rl_integral(&x, FractionalOrder::HALF, Side::Left, t),
                Err(FracError::Argument(_))
            ));
        }
    }

    #[test]
    fn annotated_power_is_handled_exactly() {
        // g = 3 sqrt(t) + t on [0, 1]; D^{1/2} g = 3 Γ(3/2) + 2 sqrt(t)/sqrt(pi)
        let grid = unit(129);
        let values: Vec<f64> = grid.nodes().map(|t| 3.0 * t.sqrt() + t).collect();
        let g = Trajectory::operator_output(
            grid,
            values,
            Some((
                Side::Left,
                EndpointPower {
                    exponent: 0.5,
                    coefficient: 3.0,
                },
            )),
        )
        .unwrap();
        let v = caputo_derivative(&g, FractionalOrder::HALF, Side::Left, 0.5).unwrap();
        let want = 3.0 * gamma_positive(1.5) + 2.0 * 0.5f64.sqrt() / PI.sqrt();
        assert!((v - want).abs() < 1e-12, "{v} vs {want}");
        let at_a = caputo_derivative(&g, FractionalOrder::HALF, Side::Left, 0.0).unwrap();
        assert!((at_a - 3.0 * gamma_positive(1.5)).abs() < 1e-14);
        let i = rl_integral(&g, FractionalOrder::HALF, Side::Left, 1.0).unwrap();
        let want_i = 3.0 * gamma_positive(1.5) + 1.0 / gamma_positive(2.5);
        assert!((i - want_i).abs() < 1e-12);
    }

    #[test]
    fn caputo_output_annotation_matches_samples_near_endpoint() {
        let x = Trajectory::from_path(unit(257), PolynomialPath::new(0.0, vec![0.0, 2.0, 1.0]))
            .unwrap();
        for side in [Side::Left, Side::Right] {
            let out = caputo_output(&x, FractionalOrder::HALF, side).unwrap();
            let p = out.endpoint_power(side).unwrap();
            let k = match side {
                Side::Left => 1,
                Side::Right => 255,
            };
            let d: f64 = 1.0 / 256.0;
            let approx = p.coefficient * d.powf(p.exponent);
            assert!(((out.value(k) - approx) / approx).abs() < 1e-2, "{side:?}");
        }
    }
}
