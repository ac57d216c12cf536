use crate::error::{FracError, Result};

/// Uniform discretization of a window `[a, b]` including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(a: f64, b: f64, n_points: usize) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(FracError::Argument(format!(
                "grid needs finite a < b, got [{a}, {b}]"
            )));
        }
        if n_points < 3 {
            return Err(FracError::Argument(format!(
                "grid needs at least 3 nodes, got {n_points}"
            )));
        }
        Ok(Self { a, b, n_points })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    /// Always false: a grid has at least three nodes.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / (self.n_points - 1) as f64
    }

    /// Time of node `i`; the last node is `b` exactly.
    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.b
        } else {
            self.a + i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.node(i))
    }

    /// Index of the node at time `t`.
    ///
    /// Times within `1e-9 h` of a node are accepted; anything else is an
    /// argument error.
    pub fn locate(&self, t: f64) -> Result<usize> {
        let h = self.step();
        let tol = 1e-9 * h;
        if !t.is_finite() || t < self.a - tol || t > self.b + tol {
            return Err(FracError::Argument(format!(
                "t = {t} lies outside [{}, {}]",
                self.a, self.b
            )));
        }
        let i = ((t - self.a) / h).round() as usize;
        let i = i.min(self.n_points - 1);
        if (self.node(i) - t).abs() > tol {
            return Err(FracError::Argument(format!(
                "t = {t} is not a grid node (nearest node {} at {})",
                i,
                self.node(i)
            )));
        }
        Ok(i)
    }

    /// Mirror image `a + b - t`.
    pub fn reflect_time(&self, t: f64) -> f64 {
        self.a + self.b - t
    }

    /// Composite trapezoid weights.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.step();
        let mut w = vec![h; self.n_points];
        w[0] = 0.5 * h;
        w[self.n_points - 1] = 0.5 * h;
        w
    }

    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n_points);
        let inner: f64 = values[1..values.len() - 1].iter().sum();
        self.step() * (0.5 * (values[0] + values[values.len() - 1]) + inner)
    }
}

/// Order α of a fractional operator, restricted to 0 < α < 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub const HALF: FractionalOrder = FractionalOrder(0.5);

    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(FracError::Argument(format!(
                "fractional order must satisfy 0 < alpha < 1, got {alpha}"
            )));
        }
        Ok(Self(alpha))
    }

    pub fn alpha(&self) -> f64 {
        self.0
    }

    /// `n = ⌊α⌋ + 1`, which is 1 for every admissible order.
    pub fn ceiling_n(&self) -> u32 {
        self.0.floor() as u32 + 1
    }

    /// 1 - α, the order of the integral hidden inside the derivatives.
    pub fn complement(&self) -> FractionalOrder {
        FractionalOrder(1.0 - self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    RlIntegral,
    RlDerivative,
    CaputoDerivative,
}

/// One of the six fractional operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OperatorKind {
    pub side: Side,
    pub family: Family,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 6] = [
        OperatorKind::new(Side::Left, Family::RlIntegral),
        OperatorKind::new(Side::Right, Family::RlIntegral),
        OperatorKind::new(Side::Left, Family::RlDerivative),
        OperatorKind::new(Side::Right, Family::RlDerivative),
        OperatorKind::new(Side::Left, Family::CaputoDerivative),
        OperatorKind::new(Side::Right, Family::CaputoDerivative),
    ];

    pub const fn new(side: Side, family: Family) -> Self {
        Self { side, family }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_invariants() {
        assert!(Grid::new(1.0, 1.0, 5).is_err());
        assert!(Grid::new(2.0, 1.0, 5).is_err());
        assert!(Grid::new(0.0, 1.0, 2).is_err());
        let g = Grid::new(0.1, 0.7, 7).unwrap();
        assert_eq!(g.node(6), 0.7);
        assert_eq!(g.node(0), 0.1);
        assert!((g.step() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn locate_nodes() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        assert_eq!(g.locate(0.3).unwrap(), 3);
        assert_eq!(g.locate(1.0).unwrap(), 10);
        assert!(matches!(g.locate(0.35), Err(FracError::Argument(_))));
        assert!(matches!(g.locate(1.1), Err(FracError::Argument(_))));
        assert!(matches!(g.locate(-0.1), Err(FracError::Argument(_))));
    }

    #[test]
    fn trapezoid_is_exact_on_lines() {
        let g = Grid::new(-1.0, 2.0, 9).unwrap();
        let v: Vec<f64> = g.nodes().map(|t| 3.0 * t - 1.0).collect();
        assert!((g.trapezoid(&v) - 1.5).abs() < 1e-14);
        let w = g.trapezoid_weights();
        let s: f64 = w.iter().zip(&v).map(|(w, v)| w * v).sum();
        assert!((s - 1.5).abs() < 1e-14);
    }

    #[test]
    fn order_bounds() {
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(1.0).is_err());
        assert!(FractionalOrder::new(f64::NAN).is_err());
        let o = FractionalOrder::new(0.3).unwrap();
        assert_eq!(o.ceiling_n(), 1);
        assert!((o.complement().alpha() - 0.7).abs() < 1e-15);
    }
}
