//! Shrinking-window limits at a placed point `t = a + s (b - a)`.
//!
//! Every window gets its own uniform grid with a fixed number of nodes, so
//! the step shrinks with the width and quadrature error stays subordinate to
//! the limit. Paths are resampled on each window from their analytic pack.
//!
//! The equation-of-motion limit follows the midpoint procedure: at
//! `s = 1/2` the right Caputo factor is replaced by minus the left one and
//! the composition `D_l^(1/2) C_l^(1/2) = d/dt` is applied. The literal
//! nested term `D_l^(1/2) [C_r^(1/2) x]` is reported alongside; its limit is
//! a different multiple of `x'`.
//!
//! For the point charge the procedure term `d/dt D_l^(1/2) C_l^(1/2) x'` is
//! evaluated as `D_l^(1/2) C_l^(1/2) x''`, which is the same function. A
//! central difference of the sampled composite would carry the fixed
//! relative quadrature error of one window into the third derivative and
//! stall the limit.

use rayon::prelude::*;

use crate::convergence::fit_tail;
use crate::error::{FracError, Result};
use crate::fracops::{
    caputo_derivative, compose_rl_after_caputo_half, rl_derivative, FractionalOrder, Grid, Side,
    Trajectory,
};
use crate::varcalc::{assemble, nested_term, nested_velocity_rate, LagrangianSpec};

/// Widths used by the exponent fits.
const FIT_POINTS: usize = 4;
/// Below this magnitude a derivative at the centre counts as zero.
const HYPOTHESIS_FLOOR: f64 = 1e-9;

/// Windows of decreasing width placed around a common point.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowFamily {
    center: f64,
    widths: Vec<f64>,
    s: f64,
    n_points: usize,
}

impl WindowFamily {
    pub const DEFAULT_POINTS: usize = 513;

    pub fn new(center: f64, widths: Vec<f64>, s: f64) -> Result<Self> {
        if widths.is_empty() {
            return Err(FracError::Argument(
                "window family needs at least one width".into(),
            ));
        }
        if widths.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(FracError::Argument("window widths must be positive".into()));
        }
        if widths.windows(2).any(|p| p[1] >= p[0]) {
            return Err(FracError::Argument(
                "window widths must strictly decrease".into(),
            ));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(FracError::Argument(format!(
                "placement s must lie in (0, 1), got {s}"
            )));
        }
        let fam = Self {
            center,
            widths,
            s,
            n_points: Self::DEFAULT_POINTS,
        };
        fam.placed_node(s)?;
        Ok(fam)
    }

    /// `count` widths starting at `first`, each half the previous one.
    pub fn geometric(center: f64, first: f64, count: usize, s: f64) -> Result<Self> {
        Self::new(
            center,
            (0..count).map(|i| first * 0.5f64.powi(i as i32)).collect(),
            s,
        )
    }

    pub fn with_points(mut self, n_points: usize) -> Result<Self> {
        self.n_points = n_points;
        self.placed_node(self.s)?;
        Ok(self)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Node index of the placed point; `s (n - 1)` must be an integer.
    fn placed_node(&self, s: f64) -> Result<usize> {
        let k = s * (self.n_points - 1) as f64;
        if self.n_points < 3 || (k - k.round()).abs() > 1e-9 {
            return Err(FracError::Argument(format!(
                "placement s = {s} does not fall on a node of a {}-point window",
                self.n_points
            )));
        }
        Ok(k.round() as usize)
    }

    /// Grid of window `i` with the centre placed at fraction `s`, and the
    /// node index of the centre.
    pub fn window(&self, i: usize, s: f64) -> Result<(Grid, usize)> {
        let width = *self
            .widths
            .get(i)
            .ok_or_else(|| FracError::Argument(format!("no window {i}")))?;
        let a = self.center - s * width;
        Ok((
            Grid::new(a, a + width, self.n_points)?,
            self.placed_node(s)?,
        ))
    }

    /// The path resampled on window `i`. The window must lie inside the
    /// path's own grid.
    fn restrict(&self, traj: &Trajectory, i: usize, s: f64) -> Result<(Trajectory, usize)> {
        let (grid, k) = self.window(i, s)?;
        let host = traj.grid();
        let slack = 1e-12 * host.width();
        if grid.a() < host.a() - slack || grid.b() > host.b() + slack {
            return Err(FracError::Argument(format!(
                "window [{}, {}] leaves the path's domain [{}, {}]",
                grid.a(),
                grid.b(),
                host.a(),
                host.b()
            )));
        }
        Ok((traj.restricted_to(grid)?, k))
    }

    /// Evaluate `f` on every window in parallel, in width order.
    fn map<T: Send>(
        &self,
        traj: &Trajectory,
        s: f64,
        f: impl Fn(&Trajectory, usize) -> Result<T> + Sync,
    ) -> Result<Vec<T>> {
        (0..self.widths.len())
            .into_par_iter()
            .map(|i| {
                let (w, k) = self.restrict(traj, i, s)?;
                f(&w, k)
            })
            .collect()
    }
}

fn center_derivative(traj: &Trajectory, order: usize, t: f64) -> Result<f64> {
    traj.pack().and_then(|p| p.eval(order, t)).ok_or_else(|| {
        FracError::Argument(format!(
            "limits need an analytic pack supplying order {order}"
        ))
    })
}

/// Least-squares exponent of `|values|` against width over the last widths,
/// or `None` when fewer than two of them are nonzero.
fn tail_exponent(widths: &[f64], values: &[f64]) -> Option<f64> {
    let start = widths.len().saturating_sub(FIT_POINTS);
    let (x, y): (Vec<f64>, Vec<f64>) = widths[start..]
        .iter()
        .zip(&values[start..])
        .filter(|(_, v)| v.abs() > 0.0 && v.is_finite())
        .map(|(w, v)| (*w, v.abs()))
        .unzip();
    fit_tail(&x, &y, FIT_POINTS).ok().map(|f| f.exponent)
}

/// Left/right Caputo ratios across a window family.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub alpha: f64,
    pub s: f64,
    pub widths: Vec<f64>,
    pub ratios: Vec<f64>,
    pub predicted: f64,
    pub deviations: Vec<f64>,
    /// Deviations do not grow over the last three widths (10% tolerance).
    pub monotone_tail: bool,
}

impl RatioReport {
    pub fn final_deviation(&self) -> f64 {
        *self
            .deviations
            .last()
            .expect("window families are non-empty")
    }
}

/// `-(s / (1 - s))^(1 - α)`, the limit of left over right Caputo derivative.
pub fn predicted_caputo_ratio(s: f64, order: FractionalOrder) -> f64 {
    -(s / (1.0 - s)).powf(1.0 - order.alpha())
}

/// Ratio of left to right Caputo derivative at the placed point of each
/// window. Requires `x'(t_c) ≠ 0`.
pub fn caputo_ratio_limit(
    traj: &Trajectory,
    order: FractionalOrder,
    fam: &WindowFamily,
) -> Result<RatioReport> {
    let v = center_derivative(traj, 1, fam.center)?;
    if v.abs() <= HYPOTHESIS_FLOOR {
        return Err(FracError::Hypothesis(format!(
            "the Caputo ratio limit needs x'(t_c) ≠ 0, got {v} at t_c = {}",
            fam.center
        )));
    }
    let ratios = fam.map(traj, fam.s, |w, k| {
        let t = w.grid().node(k);
        Ok(caputo_derivative(w, order, Side::Left, t)?
            / caputo_derivative(w, order, Side::Right, t)?)
    })?;
    let predicted = predicted_caputo_ratio(fam.s, order);
    let deviations: Vec<f64> = ratios.iter().map(|r| (r - predicted).abs()).collect();
    let tail = &deviations[deviations.len().saturating_sub(3)..];
    let monotone_tail = tail.windows(2).all(|p| p[1] <= 1.1 * p[0] + 1e-12);
    Ok(RatioReport {
        alpha: order.alpha(),
        s: fam.s,
        widths: fam.widths.clone(),
        ratios,
        predicted,
        deviations,
        monotone_tail,
    })
}

/// Both half-order Caputo derivatives at a window midpoint and the defect of
/// the approximation `C_r x ≈ -C_l x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidpointReport {
    pub width: f64,
    pub left: f64,
    pub right: f64,
    /// `-C_l x`, the stand-in for `C_r x`.
    pub substitute: f64,
    /// `|C_r x + C_l x|`.
    pub defect: f64,
}

/// Midpoint approximation on `window`, which needs an odd node count. The
/// path is resampled from its pack unless it already lives on `window`.
pub fn midpoint_substitute(traj: &Trajectory, window: Grid) -> Result<MidpointReport> {
    if window.len().is_multiple_of(2) {
        return Err(FracError::Argument(
            "the window midpoint must be a grid node".into(),
        ));
    }
    let w = if *traj.grid() == window {
        traj.clone()
    } else {
        traj.restricted_to(window)?
    };
    let t = window.node(window.len() / 2);
    let left = caputo_derivative(&w, FractionalOrder::HALF, Side::Left, t)?;
    let right = caputo_derivative(&w, FractionalOrder::HALF, Side::Right, t)?;
    Ok(MidpointReport {
        width: window.width(),
        left,
        right,
        substitute: -left,
        defect: (right + left).abs(),
    })
}

/// Which model Lagrangian a spec instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelShape {
    Conservative,
    Friction,
    Charge,
}

impl ModelShape {
    pub fn of(spec: &LagrangianSpec) -> Result<Self> {
        match (spec.friction_active(), spec.recoil_active()) {
            (false, false) => Ok(Self::Conservative),
            (true, false) => Ok(Self::Friction),
            (false, true) => Ok(Self::Charge),
            (true, true) => Err(FracError::Argument(
                "limits cover the friction and point-charge Lagrangians separately".into(),
            )),
        }
    }
}

/// Euler-Lagrange residuals at the window centre across a family.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub shape: ModelShape,
    pub widths: Vec<f64>,
    /// Fractional operator term by the midpoint procedure; tends to `-γ x'`
    /// (friction) or `-λ x'''` (charge).
    pub fractional_terms: Vec<f64>,
    pub fractional_residuals: Vec<f64>,
    /// The nested term evaluated literally with the right Caputo factor.
    pub literal_terms: Vec<f64>,
    pub literal_residuals: Vec<f64>,
    /// `m x'' + γ x' - F` or `m x'' - λ x''' - F` at the centre.
    pub classical_residual: f64,
    /// `x'(t_c)` (friction) or `x'''(t_c)` (charge).
    pub classical_rate: f64,
    pub configured_coefficient: f64,
    /// `γ_eff = -term / x'` or `λ_eff = -term / x'''`.
    pub effective_coefficients: Vec<f64>,
    pub literal_effective_coefficients: Vec<f64>,
    /// `|fractional residual - classical residual|`.
    pub deviations: Vec<f64>,
    pub deviation_exponent: Option<f64>,
    pub residual_exponent: Option<f64>,
}

impl ResidualReport {
    pub fn final_effective_coefficient(&self) -> f64 {
        *self
            .effective_coefficients
            .last()
            .expect("window families are non-empty")
    }
}

/// Windowed equation-of-motion limit for the friction or point-charge
/// Lagrangian at `s = 1/2`.
pub fn limit_equation_of_motion(
    spec: &LagrangianSpec,
    traj: &Trajectory,
    fam: &WindowFamily,
) -> Result<ResidualReport> {
    spec.ensure_instantiated()?;
    if (fam.s - 0.5).abs() > 1e-12 {
        return Err(FracError::Argument(
            "the equation-of-motion limit is taken at the window midpoint".into(),
        ));
    }
    let shape = ModelShape::of(spec)?;
    let tc = fam.center;
    let x = center_derivative(traj, 0, tc)?;
    let v = center_derivative(traj, 1, tc)?;
    let acc = center_derivative(traj, 2, tc)?;
    let force = spec.potential().force(x);
    let (classical_rate, configured, classical_residual) = match shape {
        ModelShape::Conservative => (v, 0.0, spec.mass() * acc - force),
        ModelShape::Friction => (
            v,
            spec.gamma(),
            spec.mass() * acc + spec.gamma() * v - force,
        ),
        ModelShape::Charge => {
            let jerk = center_derivative(traj, 3, tc)?;
            (
                jerk,
                spec.lambda(),
                spec.mass() * acc - spec.lambda() * jerk - force,
            )
        }
    };
    if shape != ModelShape::Conservative && classical_rate.abs() <= HYPOTHESIS_FLOOR {
        return Err(FracError::Hypothesis(format!(
            "recovering the coefficient needs a nonzero rate at t_c, got {classical_rate}"
        )));
    }

    let per_window = fam.map(traj, fam.s, |w, k| {
        let t = w.grid().node(k);
        let terms = match shape {
            ModelShape::Conservative => (0.0, 0.0),
            ModelShape::Friction => (
                -spec.gamma() * compose_rl_after_caputo_half(w, t)?,
                spec.gamma() * nested_term(w, k)?,
            ),
            ModelShape::Charge => {
                let acc = w.derivative()?.derivative()?;
                (
                    -spec.lambda() * compose_rl_after_caputo_half(&acc, t)?,
                    spec.lambda() * nested_velocity_rate(w, k)?,
                )
            }
        };
        // Friction enters the residual with a minus sign, recoil with a plus.
        let residual = |term: f64| -> Result<f64> {
            match shape {
                ModelShape::Conservative => assemble(spec, w, k, &[]),
                ModelShape::Friction => assemble(spec, w, k, &[-term]),
                ModelShape::Charge => assemble(spec, w, k, &[term]),
            }
        };
        Ok((terms.0, terms.1, residual(terms.0)?, residual(terms.1)?))
    })?;

    let fractional_terms: Vec<f64> = per_window.iter().map(|r| r.0).collect();
    let literal_terms: Vec<f64> = per_window.iter().map(|r| r.1).collect();
    let fractional_residuals: Vec<f64> = per_window.iter().map(|r| r.2).collect();
    let literal_residuals: Vec<f64> = per_window.iter().map(|r| r.3).collect();
    let effective = |terms: &[f64]| -> Vec<f64> {
        terms
            .iter()
            .map(|t| match shape {
                ModelShape::Conservative => 0.0,
                _ => -t / classical_rate,
            })
            .collect()
    };
    let deviations: Vec<f64> = fractional_residuals
        .iter()
        .map(|r| (r - classical_residual).abs())
        .collect();
    Ok(ResidualReport {
        shape,
        widths: fam.widths.clone(),
        effective_coefficients: effective(&fractional_terms),
        literal_effective_coefficients: effective(&literal_terms),
        deviation_exponent: tail_exponent(&fam.widths, &deviations),
        residual_exponent: tail_exponent(&fam.widths, &fractional_residuals),
        fractional_terms,
        fractional_residuals,
        literal_terms,
        literal_residuals,
        classical_residual,
        classical_rate,
        configured_coefficient: configured,
        deviations,
    })
}

/// Left/right Riemann-Liouville ratios at one placement.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementRatios {
    pub s: f64,
    pub ratios: Vec<f64>,
    /// `((1 - s) / s)^α`.
    pub predicted: f64,
}

/// Divergence of Riemann-Liouville derivatives at the placed point.
#[derive(Debug, Clone, PartialEq)]
pub struct RlDivergenceReport {
    pub alpha: f64,
    pub s: f64,
    pub widths: Vec<f64>,
    pub left_magnitudes: Vec<f64>,
    pub right_magnitudes: Vec<f64>,
    pub left_exponent: Option<f64>,
    pub right_exponent: Option<f64>,
    /// Ratios at the family's own placement followed by `s = 1/4` and
    /// `s = 3/4`.
    pub placements: Vec<PlacementRatios>,
}

/// Placements contrasted with the family's own to show that the ratio limit
/// depends on where the point sits in the window.
pub const CONTRAST_PLACEMENTS: [f64; 2] = [0.25, 0.75];

/// `((1 - s) / s)^α`, the limit of left over right RL derivative.
pub fn predicted_rl_ratio(s: f64, order: FractionalOrder) -> f64 {
    ((1.0 - s) / s).powf(order.alpha())
}

/// Magnitudes of both RL derivatives at the placed point, their fitted
/// divergence exponents and the ratio at several placements. Requires
/// `x(t_c) ≠ 0`.
pub fn rl_divergence_diagnostic(
    traj: &Trajectory,
    order: FractionalOrder,
    fam: &WindowFamily,
) -> Result<RlDivergenceReport> {
    let x = center_derivative(traj, 0, fam.center)?;
    if x.abs() <= HYPOTHESIS_FLOOR {
        return Err(FracError::Hypothesis(format!(
            "RL divergence needs x(t_c) ≠ 0, got {x} at t_c = {}",
            fam.center
        )));
    }
    let pair = |s: f64| -> Result<Vec<(f64, f64)>> {
        fam.map(traj, s, |w, k| {
            let t = w.grid().node(k);
            let n = w.grid().len();
            let left = rl_derivative(w, order, Side::Left, t)?.finite(t, w.value(0))?;
            let right = rl_derivative(w, order, Side::Right, t)?.finite(t, w.value(n - 1))?;
            Ok((left, right))
        })
    };
    let own = pair(fam.s)?;
    let left_magnitudes: Vec<f64> = own.iter().map(|p| p.0.abs()).collect();
    let right_magnitudes: Vec<f64> = own.iter().map(|p| p.1.abs()).collect();
    let mut placements = vec![PlacementRatios {
        s: fam.s,
        ratios: own.iter().map(|p| p.0 / p.1).collect(),
        predicted: predicted_rl_ratio(fam.s, order),
    }];
    for s in CONTRAST_PLACEMENTS {
        placements.push(PlacementRatios {
            s,
            ratios: pair(s)?.iter().map(|p| p.0 / p.1).collect(),
            predicted: predicted_rl_ratio(s, order),
        });
    }
    Ok(RlDivergenceReport {
        alpha: order.alpha(),
        s: fam.s,
        left_exponent: tail_exponent(&fam.widths, &left_magnitudes),
        right_exponent: tail_exponent(&fam.widths, &right_magnitudes),
        widths: fam.widths.clone(),
        left_magnitudes,
        right_magnitudes,
        placements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::{gamma, AnalyticPack, PolynomialPath};
    use crate::varcalc::Potential;

    fn host() -> Grid {
        Grid::new(0.0, 2.0, 11).unwrap()
    }

    fn sine() -> Trajectory {
        Trajectory::from_pack(
            host(),
            AnalyticPack::from_fns(vec![
                Box::new(|t: f64| (t + 1.0).sin()),
                Box::new(|t: f64| (t + 1.0).cos()),
                Box::new(|t: f64| -(t + 1.0).sin()),
                Box::new(|t: f64| -(t + 1.0).cos()),
            ]),
        )
        .unwrap()
    }

    #[test]
    fn family_validation() {
        assert!(WindowFamily::new(0.5, vec![], 0.5).is_err());
        assert!(WindowFamily::new(0.5, vec![0.1, 0.1], 0.5).is_err());
        assert!(WindowFamily::new(0.5, vec![0.1], 1.0).is_err());
        assert!(WindowFamily::new(0.5, vec![0.1], 0.3).is_err());
        let fam = WindowFamily::geometric(0.5, 0.1, 3, 0.25).unwrap();
        assert_eq!(fam.widths(), &[0.1, 0.05, 0.025]);
        let (g, k) = fam.window(1, 0.25).unwrap();
        assert!((g.node(k) - 0.5).abs() < 1e-15);
        let far = WindowFamily::geometric(1.99, 0.1, 2, 0.5).unwrap();
        assert!(caputo_ratio_limit(&sine(), FractionalOrder::HALF, &far).is_err());
    }

    #[test]
    fn ratio_tends_to_predicted_value() {
        let fam = WindowFamily::geometric(0.3, 0.1, 5, 0.25)
            .unwrap()
            .with_points(129)
            .unwrap();
        let r = caputo_ratio_limit(&sine(), FractionalOrder::HALF, &fam).unwrap();
        assert!((r.predicted + (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(r.final_deviation() < 0.02, "{:?}", r.deviations);
        assert!(r.monotone_tail);
    }

    #[test]
    fn linear_ratio_is_exact() {
        let line = Trajectory::from_path(host(), PolynomialPath::new(0.0, vec![1.0, 2.0])).unwrap();
        let fam = WindowFamily::geometric(0.7, 0.2, 3, 0.5)
            .unwrap()
            .with_points(65)
            .unwrap();
        let r = caputo_ratio_limit(&line, FractionalOrder::new(0.3).unwrap(), &fam).unwrap();
        for v in r.ratios {
            assert!((v + 1.0).abs() < 1e-12);
        }
        let flat = Trajectory::from_path(host(), PolynomialPath::new(0.0, vec![1.0])).unwrap();
        assert!(matches!(
            caputo_ratio_limit(&flat, FractionalOrder::HALF, &fam),
            Err(FracError::Hypothesis(_))
        ));
    }

    #[test]
    fn midpoint_defect() {
        let line = Trajectory::from_path(host(), PolynomialPath::new(0.0, vec![0.0, 1.0])).unwrap();
        let w = Grid::new(0.4, 0.6, 65).unwrap();
        assert!(midpoint_substitute(&line, w).unwrap().defect < 1e-13);
        let sq =
            Trajectory::from_path(host(), PolynomialPath::new(0.0, vec![0.0, 0.0, 1.0])).unwrap();
        let r = midpoint_substitute(&sq, Grid::new(0.495, 0.505, 65).unwrap()).unwrap();
        assert!(r.defect <= 2e-2 * 1.0, "{r:?}");
        assert!(midpoint_substitute(&sq, Grid::new(0.4, 0.6, 64).unwrap()).is_err());
    }

    #[test]
    fn constant_rl_divergence() {
        let one = Trajectory::from_path(host(), PolynomialPath::new(0.0, vec![1.0])).unwrap();
        let fam = WindowFamily::geometric(1.0, 0.1, 5, 0.5)
            .unwrap()
            .with_points(65)
            .unwrap();
        let r = rl_divergence_diagnostic(&one, FractionalOrder::HALF, &fam).unwrap();
        let want = (0.05f64).powf(-0.5) / gamma(0.5).unwrap();
        assert!((r.left_magnitudes[0] - want).abs() < 1e-12 * want);
        assert!((r.left_exponent.unwrap() + 0.5).abs() < 1e-12);
        assert!((r.placements[1].predicted - 3f64.sqrt()).abs() < 1e-15);
        assert!((r.placements[1].ratios[4] - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn friction_limit_recovers_gamma() {
        let spec = LagrangianSpec::new(1.0, Potential::zero())
            .unwrap()
            .with_friction(1.0)
            .unwrap();
        let path = Trajectory::from_pack(
            host(),
            AnalyticPack::from_fns(vec![
                Box::new(|t: f64| -(-t).exp()),
                Box::new(|t: f64| (-t).exp()),
                Box::new(|t: f64| -(-t).exp()),
            ]),
        )
        .unwrap();
        let fam = WindowFamily::geometric(1.0, 0.1, 6, 0.5)
            .unwrap()
            .with_points(129)
            .unwrap();
        let r = limit_equation_of_motion(&spec, &path, &fam).unwrap();
        assert_eq!(r.shape, ModelShape::Friction);
        assert!(
            (r.final_effective_coefficient() - 1.0).abs() < 1e-2,
            "{r:?}"
        );
        assert!(r.residual_exponent.unwrap() > 0.4, "{r:?}");
    }
}
