//! Quadratic Lagrangians mixing integer derivatives, right-Caputo terms of
//! order 1/2 and a potential.

use std::fmt;
use std::sync::Arc;

use crate::error::{FracError, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Potential energy `U(x)` together with its derivative `U'(x)`.
#[derive(Clone)]
pub struct Potential {
    u: ScalarFn,
    du: ScalarFn,
    /// `(f, k)` when the force is affine, `F(x) = f - k x`.
    affine: Option<(f64, f64)>,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.affine {
            Some((force, k)) => write!(f, "Potential(F = {force} - {k} x)"),
            None => f.write_str("Potential(custom)"),
        }
    }
}

/// Abscissae at which a custom `U'` is checked against differences of `U`.
const PROBES: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
const PROBE_STEP: f64 = 1e-5;
const PROBE_TOLERANCE: f64 = 1e-6;

impl Potential {
    pub fn zero() -> Self {
        Self::linear_force(0.0, 0.0)
    }

    /// `U = k x^2 / 2`.
    pub fn harmonic(k: f64) -> Self {
        Self::linear_force(0.0, k)
    }

    /// `U = -f x`, a constant force `f`.
    pub fn constant_force(f: f64) -> Self {
        Self::linear_force(f, 0.0)
    }

    /// `U = -f x + k x^2 / 2`, the force `F = f - k x`.
    pub fn linear_force(f: f64, k: f64) -> Self {
        Self {
            u: Arc::new(move |x| -f * x + 0.5 * k * x * x),
            du: Arc::new(move |x| -f + k * x),
            affine: Some((f, k)),
        }
    }

    /// Arbitrary potential. `du` must agree with central differences of `u`
    /// to 1e-6 at a fixed set of probe points.
    pub fn custom(
        u: impl Fn(f64) -> f64 + Send + Sync + 'static,
        du: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        for &x in &PROBES {
            let fd = (u(x + PROBE_STEP) - u(x - PROBE_STEP)) / (2.0 * PROBE_STEP);
            let d = du(x);
            let gap = (fd - d).abs();
            if gap.is_nan() || gap > PROBE_TOLERANCE {
                return Err(FracError::Argument(format!(
                    "U' is inconsistent with U at x = {x}: difference quotient {fd}, U' = {d}"
                )));
            }
        }
        Ok(Self {
            u: Arc::new(u),
            du: Arc::new(du),
            affine: None,
        })
    }

    pub fn energy(&self, x: f64) -> f64 {
        (self.u)(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (self.du)(x)
    }

    /// `F = -U'`.
    pub fn force(&self, x: f64) -> f64 {
        -(self.du)(x)
    }

    pub fn affine_force(&self) -> Option<(f64, f64)> {
        self.affine
    }
}

/// A term `c · (left Caputo^(1/2) x^(derivative_order))^2`. The general
/// higher-order action admits such terms; none of the model Lagrangians uses
/// one, and evaluation rejects them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeftCaputoTerm {
    pub coefficient: f64,
    pub derivative_order: usize,
}

/// `L = m x'^2 / 2 - U(x) + γ/2 (C_r x)^2 + κ (C_r x')^2`, where `C_r` is
/// the right Caputo derivative of order 1/2 and `κ = λ / 2`.
#[derive(Debug, Clone)]
pub struct LagrangianSpec {
    mass: f64,
    gamma: f64,
    kappa: f64,
    potential: Potential,
    left_terms: Vec<LeftCaputoTerm>,
}

impl LagrangianSpec {
    /// Conservative Lagrangian `m x'^2 / 2 - U(x)`.
    pub fn new(mass: f64, potential: Potential) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(FracError::Argument(format!(
                "mass must be positive, got {mass}"
            )));
        }
        Ok(Self {
            mass,
            gamma: 0.0,
            kappa: 0.0,
            potential,
            left_terms: Vec::new(),
        })
    }

    /// Adds the friction energy `γ/2 (C_r x)^2`.
    pub fn with_friction(mut self, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(FracError::Argument(format!(
                "γ must be non-negative, got {gamma}"
            )));
        }
        self.gamma = gamma;
        Ok(self)
    }

    /// Adds the recoil energy `κ (C_r x')^2` with `κ = λ / 2`.
    pub fn with_recoil(mut self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(FracError::Argument(format!(
                "λ must be non-negative, got {lambda}"
            )));
        }
        self.kappa = 0.5 * lambda;
        Ok(self)
    }

    pub fn with_left_caputo(mut self, term: LeftCaputoTerm) -> Self {
        self.left_terms.push(term);
        self
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `λ = 2κ`, the coefficient in the equation of motion.
    pub fn lambda(&self) -> f64 {
        2.0 * self.kappa
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn left_caputo_terms(&self) -> &[LeftCaputoTerm] {
        &self.left_terms
    }

    pub fn friction_active(&self) -> bool {
        self.gamma > 0.0
    }

    pub fn recoil_active(&self) -> bool {
        self.kappa > 0.0
    }

    /// Highest integer derivative order entering the Lagrangian.
    pub fn n_int(&self) -> usize {
        if self.recoil_active() || self.left_terms.iter().any(|t| t.derivative_order >= 1) {
            2
        } else {
            1
        }
    }

    pub(crate) fn ensure_instantiated(&self) -> Result<()> {
        if self.left_terms.is_empty() {
            Ok(())
        } else {
            Err(FracError::NotInstantiated(
                "left-Caputo Lagrangian terms are not evaluated".into(),
            ))
        }
    }

    /// `L` from its ingredients at one instant.
    pub fn lagrangian(&self, x: f64, v: f64, q_half: f64, q_3half: f64) -> f64 {
        0.5 * self.mass * v * v - self.potential.energy(x)
            + 0.5 * self.gamma * q_half * q_half
            + self.kappa * q_3half * q_3half
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn custom_potential_is_probed() {
        assert!(Potential::custom(|x| x.powi(4), |x| 4.0 * x.powi(3)).is_ok());
        assert!(Potential::custom(|x| x.powi(4), |x| 3.0 * x.powi(3)).is_err());
    }

    #[test]
    fn builtin_forces() {
        let p = Potential::linear_force(2.0, 3.0);
        assert_eq!(p.force(1.0), -1.0);
        assert_eq!(p.energy(1.0), -0.5);
        assert_eq!(Potential::harmonic(1.0).energy(2.0), 2.0);
    }

    #[test]
    fn spec_validation_and_order() {
        assert!(LagrangianSpec::new(0.0, Potential::zero()).is_err());
        let s = LagrangianSpec::new(1.0, Potential::zero()).unwrap();
        assert!(s.clone().with_friction(-1.0).is_err());
        assert_eq!(s.n_int(), 1);
        let r = s.with_recoil(0.2).unwrap();
        assert_eq!(r.n_int(), 2);
        assert!((r.kappa() - 0.1).abs() < 1e-16);
        let l = r.with_left_caputo(LeftCaputoTerm {
            coefficient: 1.0,
            derivative_order: 0,
        });
        assert!(matches!(
            l.ensure_instantiated(),
            Err(FracError::NotInstantiated(_))
        ));
    }
}
