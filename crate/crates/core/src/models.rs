//! Linear friction and the radiating point charge: classical reference
//! solutions and the first-order fractional energy terms.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{FracError, Result};
use crate::fracops::{caputo_derivative, AnalyticPath, FractionalOrder, Grid, Side, Trajectory};
use crate::varcalc::{LagrangianSpec, Potential};

/// `m x'' + γ x' = F(x)` with `F = -U'`.
#[derive(Debug, Clone)]
pub struct FrictionModel {
    pub mass: f64,
    pub gamma: f64,
    pub potential: Potential,
    pub x0: f64,
    pub v0: f64,
}

/// `m x'' - λ x''' = F(x)`, `λ = 2e²/3c³`, with `F = f - k x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeModel {
    pub mass: f64,
    pub lambda: f64,
    pub force: f64,
    pub stiffness: f64,
    pub x0: f64,
    pub v0: f64,
    pub a0: f64,
}

/// Either model, for routines that treat both.
#[derive(Debug, Clone)]
pub enum Model {
    Friction(FrictionModel),
    Charge(ChargeModel),
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(FracError::Argument(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

fn check_non_negative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(FracError::Argument(format!(
            "{name} must be non-negative, got {v}"
        )))
    }
}

impl FrictionModel {
    pub fn new(mass: f64, gamma: f64, potential: Potential, x0: f64, v0: f64) -> Result<Self> {
        check_positive("mass", mass)?;
        check_non_negative("γ", gamma)?;
        Ok(Self {
            mass,
            gamma,
            potential,
            x0,
            v0,
        })
    }

    pub fn lagrangian(&self) -> Result<LagrangianSpec> {
        LagrangianSpec::new(self.mass, self.potential.clone())?.with_friction(self.gamma)
    }

    /// Reference solution on `[0, t_end]`. Affine forces use the closed form,
    /// which is valid for every `t`; other potentials are integrated.
    pub fn reference(&self, t_end: f64) -> Result<ReferenceSolution> {
        match self.potential.affine_force() {
            Some((f, k)) => Ok(ReferenceSolution(Arc::new(Reference::Exponential(
                ExponentialSum::friction(self.mass, self.gamma, f, k, self.x0, self.v0)?,
            )))),
            None => Ok(ReferenceSolution(Arc::new(Reference::Table(
                HermiteTable::integrate(self, t_end)?,
            )))),
        }
    }
}

impl ChargeModel {
    pub fn new(
        mass: f64,
        lambda: f64,
        force: f64,
        stiffness: f64,
        initial: [f64; 3],
    ) -> Result<Self> {
        check_positive("mass", mass)?;
        check_non_negative("λ", lambda)?;
        let [x0, v0, a0] = initial;
        Ok(Self {
            mass,
            lambda,
            force,
            stiffness,
            x0,
            v0,
            a0,
        })
    }

    pub fn lagrangian(&self) -> Result<LagrangianSpec> {
        LagrangianSpec::new(
            self.mass,
            Potential::linear_force(self.force, self.stiffness),
        )?
        .with_recoil(self.lambda)
    }

    /// Closed-form reference solution, valid for every `t`.
    ///
    /// With a constant force the solution is
    /// `x0 + v0 t + f t²/2m + (a0 - f/m) (e^(rt) - 1 - rt) / r²`, `r = m/λ`;
    /// choosing `a0 = f/m` removes the runaway term and leaves a polynomial.
    /// With `λ = 0` the initial acceleration must equal `F(x0)/m`.
    pub fn reference(&self) -> Result<ReferenceSolution> {
        Ok(ReferenceSolution(Arc::new(Reference::Exponential(
            ExponentialSum::charge(self)?,
        ))))
    }
}

/// `x(t) = p(t) + Re Σ c_i t^(j_i) e^(r_i t)` with a polynomial `p`.
#[derive(Debug, Clone, PartialEq)]
struct ExponentialSum {
    /// Coefficients of `p` in increasing degree.
    poly: Vec<f64>,
    /// `(c, r, j)`: `j = 1` marks the second member of a repeated root.
    modes: Vec<(Complex64, Complex64, u32)>,
}

impl ExponentialSum {
    fn friction(m: f64, gamma: f64, f: f64, k: f64, x0: f64, v0: f64) -> Result<Self> {
        // Particular solution.
        let poly = if k != 0.0 {
            vec![f / k]
        } else if gamma > 0.0 {
            vec![0.0, f / gamma]
        } else {
            vec![0.0, 0.0, f / (2.0 * m)]
        };
        let p0 = poly[0];
        let p1 = poly.get(1).copied().unwrap_or(0.0);
        let (d0, d1) = (x0 - p0, v0 - p1);
        // Roots of m r² + γ r + k = 0.
        let disc = Complex64::new(gamma * gamma - 4.0 * m * k, 0.0);
        let sq = disc.sqrt();
        let r1 = (-gamma + sq) / (2.0 * m);
        let r2 = (-gamma - sq) / (2.0 * m);
        let repeated = disc.norm() <= 1e-12 * (gamma * gamma + 4.0 * m * k.abs());
        let modes = if repeated {
            // (A + B t) e^(rt): A = d0, rA + B = d1.
            let r = Complex64::new(-gamma / (2.0 * m), 0.0);
            let a = Complex64::new(d0, 0.0);
            vec![(a, r, 0), (d1 - r * a, r, 1)]
        } else {
            // A + B = d0, r1 A + r2 B = d1.
            let a = (d1 - r2 * d0) / (r1 - r2);
            vec![(a, r1, 0), (d0 - a, r2, 0)]
        };
        Ok(Self { poly, modes })
    }

    fn charge(c: &ChargeModel) -> Result<Self> {
        let (m, lambda, f, k) = (c.mass, c.lambda, c.force, c.stiffness);
        if lambda == 0.0 {
            let want = (f - k * c.x0) / m;
            if (c.a0 - want).abs() > 1e-12 * want.abs().max(1.0) {
                return Err(FracError::Argument(format!(
                    "with λ = 0 the initial acceleration must be F(x0)/m = {want}, got {}",
                    c.a0
                )));
            }
            return Self::friction(m, 0.0, f, k, c.x0, c.v0);
        }
        if k == 0.0 {
            // x = x0 + v0 t + f t²/2m + q (e^(rt) - 1 - rt)/r², q = a0 - f/m.
            let r = m / lambda;
            let q = c.a0 - f / m;
            let amp = q / (r * r);
            let poly = vec![c.x0 - amp, c.v0 - amp * r, f / (2.0 * m)];
            let modes = if q == 0.0 {
                Vec::new()
            } else {
                vec![(Complex64::new(amp, 0.0), Complex64::new(r, 0.0), 0)]
            };
            return Ok(Self { poly, modes });
        }
        // λ r³ - m r² - k = 0, particular solution f/k.
        let roots = cubic_roots([-k / lambda, 0.0, -m / lambda])?;
        let d = [c.x0 - f / k, c.v0, c.a0];
        let coeffs = solve_vandermonde(&roots, &d)?;
        Ok(Self {
            poly: vec![f / k],
            modes: coeffs
                .into_iter()
                .zip(roots)
                .map(|(c, r)| (c, r, 0))
                .collect(),
        })
    }

    fn derivative(&self, order: usize, t: f64) -> f64 {
        let mut acc = 0.0;
        for (k, c) in self.poly.iter().enumerate().skip(order).rev() {
            let falling: f64 = ((k - order + 1)..=k).map(|m| m as f64).product();
            acc = acc * t + c * falling;
        }
        let n = order as i32;
        for &(c, r, j) in &self.modes {
            let e = (r * t).exp();
            let term = if j == 0 {
                c * r.powi(n) * e
            } else {
                // d^n [t e^(rt)] = (n r^(n-1) + r^n t) e^(rt)
                let lead = if n == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    r.powi(n - 1) * n as f64
                };
                c * (lead + r.powi(n) * t) * e
            };
            acc += term.re;
        }
        acc
    }
}

/// Roots of the monic cubic `z³ + c2 z² + c1 z + c0` by Durand-Kerner
/// iteration, given as `[c0, c1, c2]`.
fn cubic_roots(c: [f64; 3]) -> Result<[Complex64; 3]> {
    let p = |z: Complex64| ((z + c[2]) * z + c[1]) * z + c[0];
    let scale = 1.0 + c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z = [seed * scale, seed.powi(2) * scale, seed.powi(3) * scale];
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = p(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta <= 1e-15 * scale {
            return Ok(z);
        }
    }
    Err(FracError::Integration(
        "characteristic roots did not converge".into(),
    ))
}

/// Solve `Σ_i c_i r_i^j = d_j`, `j = 0, 1, 2`, by Gaussian elimination.
fn solve_vandermonde(r: &[Complex64; 3], d: &[f64; 3]) -> Result<Vec<Complex64>> {
    let mut a: Vec<Vec<Complex64>> = (0..3)
        .map(|j| {
            let mut row: Vec<Complex64> = r.iter().map(|ri| ri.powi(j as i32)).collect();
            row.push(Complex64::new(d[j], 0.0));
            row
        })
        .collect();
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|x, y| a[*x][col].norm().total_cmp(&a[*y][col].norm()))
            .expect("non-empty range");
        a.swap(col, pivot);
        if a[col][col].norm() <= 1e-13 {
            return Err(FracError::Argument(
                "repeated characteristic roots are not supported".into(),
            ));
        }
        for row in col + 1..3 {
            let factor = a[row][col] / a[col][col];
            let pivot = a[col].clone();
            for (k, v) in a[row].iter_mut().enumerate().skip(col) {
                *v -= factor * pivot[k];
            }
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); 3];
    for row in (0..3).rev() {
        let mut acc = a[row][3];
        for k in row + 1..3 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Fixed-step RK4 trajectory of `m x'' + γ x' = F(x)`, refined by halving
/// the step until two successive refinements agree to 1e-10, then stored as
/// a cubic Hermite table.
#[derive(Debug, Clone)]
struct HermiteTable {
    step: f64,
    x: Vec<f64>,
    v: Vec<f64>,
    model: FrictionModel,
}

const RK4_TOLERANCE: f64 = 1e-10;
const RK4_MAX_HALVINGS: u32 = 16;

impl HermiteTable {
    fn accel(model: &FrictionModel, x: f64, v: f64) -> f64 {
        (model.potential.force(x) - model.gamma * v) / model.mass
    }

    fn run(model: &FrictionModel, t_end: f64, steps: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let h = t_end / steps as f64;
        let (mut x, mut v) = (model.x0, model.v0);
        let mut xs = Vec::with_capacity(steps + 1);
        let mut vs = Vec::with_capacity(steps + 1);
        xs.push(x);
        vs.push(v);
        for _ in 0..steps {
            let a = |x: f64, v: f64| Self::accel(model, x, v);
            let (k1x, k1v) = (v, a(x, v));
            let (k2x, k2v) = (v + 0.5 * h * k1v, a(x + 0.5 * h * k1x, v + 0.5 * h * k1v));
            let (k3x, k3v) = (v + 0.5 * h * k2v, a(x + 0.5 * h * k2x, v + 0.5 * h * k2v));
            let (k4x, k4v) = (v + h * k3v, a(x + h * k3x, v + h * k3v));
            x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            if !(x.is_finite() && v.is_finite()) {
                return Err(FracError::Integration(format!(
                    "non-finite state after {} steps",
                    xs.len()
                )));
            }
            xs.push(x);
            vs.push(v);
        }
        Ok((xs, vs))
    }

    fn integrate(model: &FrictionModel, t_end: f64) -> Result<Self> {
        check_positive("integration horizon", t_end)?;
        let mut steps = 64usize;
        let (mut xs, mut vs) = Self::run(model, t_end, steps)?;
        for _ in 0..RK4_MAX_HALVINGS {
            let (fx, fv) = Self::run(model, t_end, 2 * steps)?;
            let gap = xs
                .iter()
                .zip(fx.iter().step_by(2))
                .chain(vs.iter().zip(fv.iter().step_by(2)))
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            steps *= 2;
            xs = fx;
            vs = fv;
            if gap <= RK4_TOLERANCE {
                return Ok(Self {
                    step: t_end / steps as f64,
                    x: xs,
                    v: vs,
                    model: model.clone(),
                });
            }
        }
        Err(FracError::Integration(format!(
            "RK4 did not reach {RK4_TOLERANCE} after {RK4_MAX_HALVINGS} halvings"
        )))
    }

    /// Position and velocity from the Hermite cubic through the bracketing
    /// nodes.
    fn state(&self, t: f64) -> Option<(f64, f64)> {
        let last = self.x.len() - 1;
        let u = t / self.step;
        if !(u >= -1e-9 && u <= last as f64 + 1e-9) {
            return None;
        }
        let i = (u.floor() as usize).min(last - 1);
        let s = u - i as f64;
        let h = self.step;
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let (m0, m1) = (self.v[i] * h, self.v[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let x = (2.0 * s3 - 3.0 * s2 + 1.0) * x0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * x1
            + (s3 - s2) * m1;
        let dx = ((6.0 * s2 - 6.0 * s) * x0
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (-6.0 * s2 + 6.0 * s) * x1
            + (3.0 * s2 - 2.0 * s) * m1)
            / h;
        Some((x, dx))
    }
}

/// Classical reference path, usable as an analytic pack.
#[derive(Debug, Clone)]
pub struct ReferenceSolution(Arc<Reference>);

#[derive(Debug)]
enum Reference {
    Exponential(ExponentialSum),
    Table(HermiteTable),
}

impl ReferenceSolution {
    /// `[x, x', x'', x''']` at `t`; the third derivative is absent for
    /// integrated paths.
    pub fn state(&self, t: f64) -> Option<[Option<f64>; 4]> {
        let x = self.derivative(0, t)?;
        Some([
            Some(x),
            self.derivative(1, t),
            self.derivative(2, t),
            self.derivative(3, t),
        ])
    }

    /// Samples on `grid` with this solution attached as the analytic pack.
    pub fn trajectory(&self, grid: Grid) -> Result<Trajectory> {
        Trajectory::from_path(grid, self.clone())
    }
}

impl AnalyticPath for ReferenceSolution {
    fn derivative(&self, order: usize, t: f64) -> Option<f64> {
        match &*self.0 {
            Reference::Exponential(e) => Some(e.derivative(order, t)),
            Reference::Table(table) => {
                let (x, v) = table.state(t)?;
                match order {
                    0 => Some(x),
                    1 => Some(v),
                    2 => Some(HermiteTable::accel(&table.model, x, v)),
                    _ => None,
                }
            }
        }
    }
}

/// `(x, x', x'')` of the friction model at `t >= 0`.
pub fn friction_reference_solution(model: &FrictionModel, t: f64) -> Result<(f64, f64, f64)> {
    let sol = model.reference(t.max(f64::EPSILON))?;
    let get = |k| {
        sol.derivative(k, t)
            .ok_or_else(|| FracError::Argument(format!("t = {t} is outside the reference horizon")))
    };
    Ok((get(0)?, get(1)?, get(2)?))
}

/// `(x, x', x'', x''')` of the charge model at `t`.
pub fn charge_reference_solution(model: &ChargeModel, t: f64) -> Result<(f64, f64, f64, f64)> {
    let sol = model.reference()?;
    let get = |k| {
        sol.derivative(k, t)
            .expect("closed forms cover every order")
    };
    Ok((get(0), get(1), get(2), get(3)))
}

/// Fractional energy at a window midpoint and its first-order law.
///
/// The law is stated with the lookahead span `τ = b - t` from the midpoint
/// to the right end of the window: `(2/π) γ x' Δx` with `Δx = x' τ`
/// (friction) or `(2/π) λ x''² τ` (charge). The ratio against the full width
/// is reported as well and tends to 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub width: f64,
    pub span: f64,
    pub term: f64,
    pub reference: f64,
    /// `term / reference`, absent when the reference vanishes.
    pub ratio: Option<f64>,
    pub full_window_ratio: Option<f64>,
}

/// `γ/2 (C_r^(1/2) x)²` or `λ/2 (C_r^(1/2) x')²` at the midpoint of
/// `window`, which needs an odd node count. The path is resampled from its
/// pack unless it already lives on `window`.
pub fn fractional_energy_term(
    model: &Model,
    traj: &Trajectory,
    window: Grid,
) -> Result<EnergyReport> {
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
    let k = window.len() / 2;
    let t = window.node(k);
    let span = window.b() - t;
    let two_over_pi = 2.0 / std::f64::consts::PI;
    let (term, reference) = match model {
        Model::Friction(m) => {
            let q = caputo_derivative(&w, FractionalOrder::HALF, Side::Right, t)?;
            let v = w.derivative_at(1, k)?;
            (
                0.5 * m.gamma * q * q,
                two_over_pi * m.gamma * v * (v * span),
            )
        }
        Model::Charge(m) => {
            let q = caputo_derivative(&w.derivative()?, FractionalOrder::HALF, Side::Right, t)?;
            let acc = w.derivative_at(2, k)?;
            (
                0.5 * m.lambda * q * q,
                two_over_pi * m.lambda * acc * acc * span,
            )
        }
    };
    let ratio = (reference != 0.0).then(|| term / reference);
    Ok(EnergyReport {
        width: window.width(),
        span,
        term,
        reference,
        ratio,
        full_window_ratio: ratio.map(|r| r * span / window.width()),
    })
}
