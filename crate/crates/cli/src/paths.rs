//! Seeded smooth test paths. Each study draws from its own ChaCha8 stream so
//! adding draws to one study never shifts another.

use std::f64::consts::TAU;

use fracvar_core::{AnalyticPath, PolynomialPath};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::StudyKind;

pub fn rng(seed: u64, study: StudyKind) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(study as u64);
    r
}

/// `x(t) = offset + amplitude sin(omega t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SinePath {
    pub offset: f64,
    pub amplitude: f64,
    pub omega: f64,
    pub phase: f64,
}

impl SinePath {
    pub fn draw(rng: &mut ChaCha8Rng) -> Self {
        Self {
            offset: rng.random_range(-0.5..0.5),
            amplitude: rng.random_range(0.5..1.5),
            omega: rng.random_range(0.5..2.5),
            phase: rng.random_range(0.0..TAU),
        }
    }

    /// Redraw until `accept` holds; the draw sequence stays seed-determined.
    pub fn draw_until(rng: &mut ChaCha8Rng, accept: impl Fn(&SinePath) -> bool) -> Self {
        loop {
            let p = Self::draw(rng);
            if accept(&p) {
                return p;
            }
        }
    }

    pub fn value(&self, order: usize, t: f64) -> f64 {
        let arg = self.omega * t + self.phase;
        let scale = self.amplitude * self.omega.powi(order as i32);
        let wave = match order % 4 {
            0 => arg.sin(),
            1 => arg.cos(),
            2 => -arg.sin(),
            _ => -arg.cos(),
        };
        if order == 0 {
            self.offset + scale * wave
        } else {
            scale * wave
        }
    }

    /// `∫_a^b x`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let anti = |t: f64| {
            self.offset * t - self.amplitude / self.omega * (self.omega * t + self.phase).cos()
        };
        anti(b) - anti(a)
    }
}

impl AnalyticPath for SinePath {
    fn derivative(&self, order: usize, t: f64) -> Option<f64> {
        Some(self.value(order, t))
    }
}

/// A cubic with a nonvanishing third derivative, as a polynomial about 0.
pub fn draw_cubic(rng: &mut ChaCha8Rng) -> PolynomialPath {
    let c1 = rng.random_range(0.5..1.5);
    let c2 = rng.random_range(-0.5..0.5);
    let mag: f64 = rng.random_range(0.2..0.6);
    let c3 = if rng.random_bool(0.5) { mag } else { -mag };
    PolynomialPath::new(0.0, vec![0.0, c1, c2, c3])
}

/// Coefficients of `c0 + c1 t + c2 t² + c3 sin(freq t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedPath {
    pub coeffs: [f64; 4],
    pub freq: f64,
}

impl MixedPath {
    pub fn draw(rng: &mut ChaCha8Rng) -> Self {
        let mut coeffs = [0.0; 4];
        for c in &mut coeffs {
            *c = rng.random_range(-1.0..1.0);
        }
        Self {
            coeffs,
            freq: rng.random_range(0.5..3.0),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let c = self.coeffs;
        c[0] + c[1] * t + c[2] * t * t + c[3] * (self.freq * t).sin()
    }
}
