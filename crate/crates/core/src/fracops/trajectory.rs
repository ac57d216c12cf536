use std::fmt;
use std::sync::Arc;

use super::differences;
use super::grid::{Grid, Side};
use crate::error::{FracError, Result};

/// A path known in closed form, queried for derivatives at arbitrary times.
pub trait AnalyticPath: Send + Sync {
    /// The `order`-th derivative at `t`, or `None` when not supplied.
    fn derivative(&self, order: usize, t: f64) -> Option<f64>;
}

/// Shared handle to an [`AnalyticPath`].
#[derive(Clone)]
pub struct AnalyticPack(Arc<dyn AnalyticPath>);

impl fmt::Debug for AnalyticPack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("AnalyticPack(..)")
    }
}

impl AnalyticPack {
    pub fn new<P: AnalyticPath + 'static>(path: P) -> Self {
        Self(Arc::new(path))
    }

    /// Pack from closures for x, x', x'', ... in increasing order.
    pub fn from_fns(fns: Vec<Box<dyn Fn(f64) -> f64 + Send + Sync>>) -> Self {
        Self::new(ClosurePath(fns))
    }

    pub fn eval(&self, order: usize, t: f64) -> Option<f64> {
        self.0.derivative(order, t)
    }

    fn shifted(&self) -> Self {
        Self::new(Shifted(self.clone()))
    }

    fn reflected(&self, a: f64, b: f64) -> Self {
        Self::new(Reflected {
            inner: self.clone(),
            a_plus_b: a + b,
        })
    }

    fn combined(c1: f64, p1: &AnalyticPack, c2: f64, p2: &AnalyticPack) -> Self {
        Self::new(Combined {
            c1,
            p1: p1.clone(),
            c2,
            p2: p2.clone(),
        })
    }
}

struct ClosurePath(Vec<Box<dyn Fn(f64) -> f64 + Send + Sync>>);

impl AnalyticPath for ClosurePath {
    fn derivative(&self, order: usize, t: f64) -> Option<f64> {
        self.0.get(order).map(|f| f(t))
    }
}

struct Shifted(AnalyticPack);

impl AnalyticPath for Shifted {
    fn derivative(&self, order: usize, t: f64) -> Option<f64> {
        self.0.eval(order + 1, t)
    }
}

struct Reflected {
    inner: AnalyticPack,
    a_plus_b: f64,
}

impl AnalyticPath for Reflected {
    fn derivative(&self, order: usize, t: f64) -> Option<f64> {
        let v = self.inner.eval(order, self.a_plus_b - t)?;
        Some(if order % 2 == 1 { -v } else { v })
    }
}

struct Combined {
    c1: f64,
    p1: AnalyticPack,
    c2: f64,
    p2: AnalyticPack,
}

impl AnalyticPath for Combined {
    fn derivative(&self, order: usize, t: f64) -> Option<f64> {
        Some(self.c1 * self.p1.eval(order, t)? + self.c2 * self.p2.eval(order, t)?)
    }
}

/// Polynomial `Σ c_k (t - origin)^k` with derivatives of every order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPath {
    pub origin: f64,
    pub coeffs: Vec<f64>,
}

impl PolynomialPath {
    pub fn new(origin: f64, coeffs: Vec<f64>) -> Self {
        Self { origin, coeffs }
    }
}

impl AnalyticPath for PolynomialPath {
    fn derivative(&self, order: usize, t: f64) -> Option<f64> {
        let s = t - self.origin;
        let mut acc = 0.0;
        for (k, c) in self.coeffs.iter().enumerate().skip(order).rev() {
            let falling: f64 = ((k - order + 1)..=k).map(|m| m as f64).product();
            acc = acc * s + c * falling;
        }
        Some(acc)
    }
}

/// Leading power-law behaviour `coefficient * d^exponent` of a sampled
/// function near one endpoint, `d` being the distance to that endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointPower {
    pub exponent: f64,
    pub coefficient: f64,
}

/// How derivative information is extracted from plain samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeRule {
    /// Second-order central differences (one-sided at the ends), then the
    /// product trapezoid rule on the derivative samples.
    Central,
    /// Exact kernel integration against the piecewise-linear interpolant of
    /// the samples (cell slopes). Used for sampled operator outputs whose
    /// derivative is unbounded at an endpoint.
    Cell,
}

/// Samples of a real path on a [`Grid`], optionally backed by a closed form.
#[derive(Debug, Clone)]
pub struct Trajectory {
    grid: Grid,
    values: Vec<f64>,
    pack: Option<AnalyticPack>,
    slopes: SlopeRule,
    left_power: Option<EndpointPower>,
    right_power: Option<EndpointPower>,
}

impl Trajectory {
    pub fn from_samples(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(FracError::Argument(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(FracError::Argument(format!(
                "sample {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(Self {
            grid,
            values,
            pack: None,
            slopes: SlopeRule::Central,
            left_power: None,
            right_power: None,
        })
    }

    /// Samples `f` at the nodes; no analytic pack is attached.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_samples(grid, grid.nodes().map(f).collect())
    }

    /// Samples generated from the pack, which stays attached.
    pub fn from_pack(grid: Grid, pack: AnalyticPack) -> Result<Self> {
        let values = grid
            .nodes()
            .map(|t| {
                pack.eval(0, t)
                    .ok_or_else(|| FracError::Argument("analytic pack does not supply x(t)".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut traj = Self::from_samples(grid, values)?;
        traj.pack = Some(pack);
        Ok(traj)
    }

    pub fn from_path<P: AnalyticPath + 'static>(grid: Grid, path: P) -> Result<Self> {
        Self::from_pack(grid, AnalyticPack::new(path))
    }

    /// Sampled output of a fractional operator. Such samples typically carry
    /// a power-law term at one endpoint; `endpoint` records it when known.
    pub fn operator_output(
        grid: Grid,
        values: Vec<f64>,
        endpoint: Option<(Side, EndpointPower)>,
    ) -> Result<Self> {
        let mut traj = Self::from_samples(grid, values)?;
        traj.slopes = SlopeRule::Cell;
        match endpoint {
            Some((Side::Left, p)) => traj.left_power = Some(p),
            Some((Side::Right, p)) => traj.right_power = Some(p),
            None => {}
        }
        Ok(traj)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn pack(&self) -> Option<&AnalyticPack> {
        self.pack.as_ref()
    }

    pub fn slope_rule(&self) -> SlopeRule {
        self.slopes
    }

    pub fn endpoint_power(&self, side: Side) -> Option<EndpointPower> {
        match side {
            Side::Left => self.left_power,
            Side::Right => self.right_power,
        }
    }

    /// Same samples without the analytic pack: derivatives then come from
    /// finite differences.
    pub fn samples_only(&self) -> Self {
        Self {
            pack: None,
            ..self.clone()
        }
    }

    /// Derivative samples of the given order (1, 2 or 3) at every node.
    pub fn derivative_samples(&self, order: usize) -> Result<Vec<f64>> {
        if let Some(pack) = &self.pack {
            if let Some(v) = self
                .grid
                .nodes()
                .map(|t| pack.eval(order, t))
                .collect::<Option<Vec<f64>>>()
            {
                return Ok(v);
            }
        }
        let h = self.grid.step();
        match order {
            0 => Ok(self.values.clone()),
            1 => Ok(differences::first_derivative(&self.values, h)),
            2 => Ok(differences::second_derivative(&self.values, h)),
            _ => Err(FracError::Argument(format!(
                "derivative of order {order} needs an analytic pack"
            ))),
        }
    }

    /// Derivative of the given order at node `i`.
    pub fn derivative_at(&self, order: usize, i: usize) -> Result<f64> {
        if i >= self.grid.len() {
            return Err(FracError::Argument(format!("node {i} out of range")));
        }
        if order == 0 {
            return Ok(self.values[i]);
        }
        if let Some(v) = self
            .pack
            .as_ref()
            .and_then(|p| p.eval(order, self.grid.node(i)))
        {
            return Ok(v);
        }
        let h = self.grid.step();
        let x = &self.values;
        let n = x.len();
        match order {
            1 => Ok(match i {
                0 => (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * h),
                _ if i + 1 == n => (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / (2.0 * h),
                _ => (x[i + 1] - x[i - 1]) / (2.0 * h),
            }),
            2 => Ok(differences::second_derivative(x, h)[i]),
            3 => differences::third_derivative_at(x, h, i),
            _ => Err(FracError::Argument(format!(
                "derivative of order {order} needs an analytic pack"
            ))),
        }
    }

    /// The derivative as a trajectory of its own: pack shifted by one order,
    /// or central-difference samples. Endpoint annotations are dropped.
    pub fn derivative(&self) -> Result<Self> {
        let values = self.derivative_samples(1)?;
        let mut d = Self::from_samples(self.grid, values)?;
        d.slopes = self.slopes;
        d.pack = self
            .pack
            .as_ref()
            .filter(|p| p.eval(1, self.grid.a()).is_some())
            .map(AnalyticPack::shifted);
        Ok(d)
    }

    /// Mirror image y(t) = x(a + b - t) on the same grid.
    pub fn reflected(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().rev().copied().collect(),
            pack: self
                .pack
                .as_ref()
                .map(|p| p.reflected(self.grid.a(), self.grid.b())),
            slopes: self.slopes,
            left_power: self.right_power,
            right_power: self.left_power,
        }
    }

    /// Resample the analytic pack on another grid.
    pub fn restricted_to(&self, grid: Grid) -> Result<Self> {
        let pack = self.pack.clone().ok_or_else(|| {
            FracError::Argument("resampling on a new grid needs an analytic pack".into())
        })?;
        Self::from_pack(grid, pack)
    }

    /// `c1 * x1 + c2 * x2` on a shared grid. The pack survives only when both
    /// inputs carry one.
    pub fn linear_combination(c1: f64, x1: &Self, c2: f64, x2: &Self) -> Result<Self> {
        if x1.grid != x2.grid {
            return Err(FracError::Argument(
                "linear combination of trajectories on different grids".into(),
            ));
        }
        let values = x1
            .values
            .iter()
            .zip(&x2.values)
            .map(|(a, b)| c1 * a + c2 * b)
            .collect();
        let mut out = Self::from_samples(x1.grid, values)?;
        if let (Some(p1), Some(p2)) = (&x1.pack, &x2.pack) {
            out.pack = Some(AnalyticPack::combined(c1, p1, c2, p2));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(0.0, 1.0, 11).unwrap()
    }

    #[test]
    fn polynomial_derivatives() {
        // 1 + 2s + 3s^2 + 4s^3 about origin 0.5
        let p = PolynomialPath::new(0.5, vec![1.0, 2.0, 3.0, 4.0]);
        let s: f64 = 0.25;
        assert!(
            (p.derivative(0, 0.75).unwrap() - (1.0 + 2.0 * s + 3.0 * s * s + 4.0 * s.powi(3)))
                .abs()
                < 1e-15
        );
        assert!((p.derivative(1, 0.75).unwrap() - (2.0 + 6.0 * s + 12.0 * s * s)).abs() < 1e-14);
        assert!((p.derivative(2, 0.75).unwrap() - (6.0 + 24.0 * s)).abs() < 1e-14);
        assert!((p.derivative(3, 0.75).unwrap() - 24.0).abs() < 1e-14);
        assert_eq!(p.derivative(4, 0.75).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(Trajectory::from_samples(grid(), vec![0.0; 10]).is_err());
        let mut v = vec![0.0; 11];
        v[3] = f64::NAN;
        assert!(Trajectory::from_samples(grid(), v).is_err());
    }

    #[test]
    fn pack_samples_are_exact() {
        let f = |t: f64| (3.0 * t).sin();
        let traj = Trajectory::from_pack(
            grid(),
            AnalyticPack::from_fns(vec![Box::new(f), Box::new(|t: f64| 3.0 * (3.0 * t).cos())]),
        )
        .unwrap();
        for (i, t) in grid().nodes().enumerate() {
            assert_eq!(traj.value(i), f(t));
        }
        assert!((traj.derivative_at(1, 4).unwrap() - 3.0 * (1.2f64).cos()).abs() < 1e-14);
        // Missing second derivative falls back to differences.
        assert!(traj.derivative_at(2, 4).is_ok());
    }

    #[test]
    fn reflection_flips_odd_derivatives() {
        let traj =
            Trajectory::from_path(grid(), PolynomialPath::new(0.0, vec![0.0, 1.0, 1.0])).unwrap();
        let r = traj.reflected();
        // y(t) = x(1 - t); y'(t) = -x'(1 - t)
        assert_eq!(r.value(0), traj.value(10));
        let want = -(1.0 + 2.0 * 0.7);
        assert!((r.derivative_at(1, 3).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn derivative_shifts_pack() {
        let traj =
            Trajectory::from_path(grid(), PolynomialPath::new(0.0, vec![0.0, 0.0, 0.0, 1.0]))
                .unwrap();
        let d = traj.derivative().unwrap();
        assert!((d.value(5) - 0.75).abs() < 1e-15);
        assert!((d.derivative_at(2, 5).unwrap() - 6.0).abs() < 1e-15);
    }

    #[test]
    fn combination_keeps_pack_only_when_both_have_one() {
        let x = Trajectory::from_path(grid(), PolynomialPath::new(0.0, vec![1.0, 1.0])).unwrap();
        let y = Trajectory::from_fn(grid(), |t| t * t).unwrap();
        assert!(Trajectory::linear_combination(1.0, &x, 2.0, &x)
            .unwrap()
            .pack()
            .is_some());
        let mixed = Trajectory::linear_combination(1.0, &x, 2.0, &y).unwrap();
        assert!(mixed.pack().is_none());
        assert!((mixed.value(5) - (1.5 + 0.5)).abs() < 1e-15);
    }
}
