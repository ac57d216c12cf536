//! Product-quadrature rules for the left Riemann-Liouville kernel
//! `(t - u)^(β-1) / Γ(β)` on a uniform grid.
//!
//! Both rules integrate the kernel exactly against a piecewise-linear
//! interpolant. [`ProductTrapezoid`] interpolates the integrand itself and
//! evaluates `J^β f`; [`CellSlope`] interpolates a function `g` whose slope
//! is then integrated against `J^(1-β)`, which is the Caputo derivative of
//! the interpolant. Each node value is a sequential sum, so profiles computed
//! in parallel are bitwise identical to serial ones.

use rayon::prelude::*;

use super::gamma::gamma_positive;

/// `J^β f(t_k) ≈ h^β / Γ(β + 2) · Σ_j w_{k,j} f_j`.
#[derive(Debug, Clone)]
pub struct ProductTrapezoid {
    order: f64,
    scale: f64,
    /// m^(β+1)
    pow_next: Vec<f64>,
    /// m^β
    pow: Vec<f64>,
}

impl ProductTrapezoid {
    pub fn new(order: f64, h: f64, n_points: usize) -> Self {
        let pow_next = (0..=n_points)
            .map(|m| (m as f64).powf(order + 1.0))
            .collect();
        let pow = (0..=n_points).map(|m| (m as f64).powf(order)).collect();
        Self {
            order,
            scale: h.powf(order) / gamma_positive(order + 2.0),
            pow_next,
            pow,
        }
    }

    /// Unscaled weight of node `j` in the value at node `k` (j <= k, k >= 1).
    #[inline]
    fn weight(&self, k: usize, j: usize) -> f64 {
        if j == k {
            1.0
        } else if j == 0 {
            self.pow_next[k - 1] - (k as f64 - 1.0 - self.order) * self.pow[k]
        } else {
            let m = k - j;
            (self.pow_next[m + 1] + self.pow_next[m - 1]) - 2.0 * self.pow_next[m]
        }
    }

    pub fn at(&self, f: &[f64], k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for (j, fj) in f.iter().enumerate().take(k + 1) {
            acc += self.weight(k, j) * fj;
        }
        self.scale * acc
    }

    pub fn profile(&self, f: &[f64]) -> Vec<f64> {
        (0..f.len())
            .into_par_iter()
            .map(|k| self.at(f, k))
            .collect()
    }

    /// Transpose of the profile map applied to `v`.
    pub fn transpose(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        (0..n)
            .into_par_iter()
            .map(|j| {
                let mut acc = 0.0;
                for (k, vk) in v.iter().enumerate().skip(j.max(1)) {
                    acc += self.weight(k, j) * vk;
                }
                self.scale * acc
            })
            .collect()
    }
}

/// Caputo derivative of order β of the piecewise-linear interpolant:
/// `h^(-β) / Γ(2 - β) · Σ_{j<k} (g_{j+1} - g_j) · ((k-j)^(1-β) - (k-j-1)^(1-β))`.
#[derive(Debug, Clone)]
pub struct CellSlope {
    scale: f64,
    /// m^(1-β)
    pow: Vec<f64>,
}

impl CellSlope {
    pub fn new(order: f64, h: f64, n_points: usize) -> Self {
        let e = 1.0 - order;
        Self {
            scale: h.powf(-order) / gamma_positive(2.0 - order),
            pow: (0..=n_points).map(|m| (m as f64).powf(e)).collect(),
        }
    }

    pub fn at(&self, g: &[f64], k: usize) -> f64 {
        let mut acc = 0.0;
        for j in 0..k {
            let m = k - j;
            acc += (g[j + 1] - g[j]) * (self.pow[m] - self.pow[m - 1]);
        }
        self.scale * acc
    }

    pub fn profile(&self, g: &[f64]) -> Vec<f64> {
        (0..g.len())
            .into_par_iter()
            .map(|k| self.at(g, k))
            .collect()
    }
}
