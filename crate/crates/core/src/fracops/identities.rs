//! Operator identities: the half-order composition chain and fractional
//! integration by parts.

use super::grid::{FractionalOrder, Side};
use super::operators::{caputo_output, caputo_profile, rl_derivative, rl_derivative_profile};
use super::trajectory::Trajectory;
use crate::error::{FracError, Result};

/// Left RL derivative of order 1/2 applied to the sampled left Caputo
/// derivative of order 1/2, at interior node `t`. Tends to `x'(t)` under
/// refinement.
pub fn compose_rl_after_caputo_half(traj: &Trajectory, t: f64) -> Result<f64> {
    let grid = traj.grid();
    let k = grid.locate(t)?;
    if k == 0 || k + 1 == grid.len() {
        return Err(FracError::Argument(format!(
            "composition is evaluated at interior nodes, got t = {t}"
        )));
    }
    let inner = caputo_output(traj, FractionalOrder::HALF, Side::Left)?;
    rl_derivative(&inner, FractionalOrder::HALF, Side::Left, t)?.finite(t, inner.value(0))
}

/// Both sides of `∫ y · (left Caputo x) dt = ∫ x · (right RL y) dt`, each
/// by the trapezoid rule. `x` must vanish at both ends.
pub fn integration_by_parts_sides(
    y: &Trajectory,
    x: &Trajectory,
    order: FractionalOrder,
) -> Result<(f64, f64)> {
    if y.grid() != x.grid() {
        return Err(FracError::Argument(
            "integration by parts needs both trajectories on one grid".into(),
        ));
    }
    let n = x.grid().len();
    let (xa, xb) = (x.value(0), x.value(n - 1));
    if xa.abs() > 1e-12 || xb.abs() > 1e-12 {
        return Err(FracError::Precondition(format!(
            "x must vanish at both ends, got x(a) = {xa}, x(b) = {xb}"
        )));
    }
    let caputo_x = caputo_profile(x, order, Side::Left)?;
    let rl_y = rl_derivative_profile(y, order, Side::Right)?;
    let lhs: Vec<f64> = y
        .values()
        .iter()
        .zip(&caputo_x)
        .map(|(a, b)| a * b)
        .collect();
    // x vanishes wherever the right RL derivative of y diverges (t = b).
    let rhs: Vec<f64> = x
        .values()
        .iter()
        .zip(&rl_y)
        .map(|(xv, d)| d.value().map_or(0.0, |d| xv * d))
        .collect();
    Ok((x.grid().trapezoid(&lhs), x.grid().trapezoid(&rhs)))
}

/// `|∫ y · (left Caputo x) − ∫ x · (right RL y)|`.
pub fn integration_by_parts_defect(
    y: &Trajectory,
    x: &Trajectory,
    order: FractionalOrder,
) -> Result<f64> {
    let (lhs, rhs) = integration_by_parts_sides(y, x, order)?;
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::grid::Grid;
    use crate::fracops::trajectory::PolynomialPath;

    #[test]
    fn composition_recovers_derivative_of_square() {
        let grid = Grid::new(0.0, 1.0, 257).unwrap();
        let x = Trajectory::from_fn(grid, |t| t * t).unwrap();
        let v = compose_rl_after_caputo_half(&x, 0.5).unwrap();
        assert!((v - 1.0).abs() < 1e-4, "{v}");
    }

    #[test]
    fn composition_of_constant_and_line() {
        let grid = Grid::new(0.0, 1.0, 65).unwrap();
        let c = Trajectory::from_fn(grid, |_| 7.0).unwrap();
        assert_eq!(compose_rl_after_caputo_half(&c, 0.25).unwrap(), 0.0);
        let l = Trajectory::from_fn(grid, |t| 3.0 + t).unwrap();
        for t in [0.25, 0.5, 0.75] {
            assert!((compose_rl_after_caputo_half(&l, t).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(compose_rl_after_caputo_half(&l, 0.0).is_err());
    }

    #[test]
    fn parts_defect_small_for_parabola() {
        let grid = Grid::new(0.0, 1.0, 2049).unwrap();
        let x =
            Trajectory::from_path(grid, PolynomialPath::new(0.0, vec![0.0, 1.0, -1.0])).unwrap();
        let y = Trajectory::from_fn(grid, |_| 1.0).unwrap();
        assert!(integration_by_parts_defect(&y, &x, FractionalOrder::HALF).unwrap() <= 1e-3);
    }

    #[test]
    fn parts_defect_zero_for_zero() {
        let grid = Grid::new(0.0, 1.0, 33).unwrap();
        let x = Trajectory::from_fn(grid, |_| 0.0).unwrap();
        let y = Trajectory::from_fn(grid, |t| t.exp()).unwrap();
        assert_eq!(
            integration_by_parts_defect(&y, &x, FractionalOrder::HALF).unwrap(),
            0.0
        );
    }

    #[test]
    fn parts_rejects_nonzero_boundary() {
        let grid = Grid::new(0.0, 1.0, 33).unwrap();
        let x = Trajectory::from_fn(grid, |t| t).unwrap();
        let y = Trajectory::from_fn(grid, |_| 1.0).unwrap();
        assert!(matches!(
            integration_by_parts_defect(&y, &x, FractionalOrder::HALF),
            Err(FracError::Precondition(_))
        ));
        let other = Trajectory::from_fn(Grid::new(0.0, 1.0, 17).unwrap(), |_| 1.0).unwrap();
        let z = Trajectory::from_fn(grid, |_| 0.0).unwrap();
        assert!(matches!(
            integration_by_parts_defect(&other, &z, FractionalOrder::HALF),
            Err(FracError::Argument(_))
        ));
    }
}
