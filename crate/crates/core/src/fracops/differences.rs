//! Finite-difference stencils on uniform samples.
//!
//! First and second derivatives use second-order central stencils in the
//! interior and second-order one-sided stencils at the two endpoints. The
//! end stencils are written as exact mirror images of each other so that a
//! reversed sample vector yields the negated (first derivative) or identical
//! (second derivative) result bit for bit.

use crate::error::{FracError, Result};

/// First derivative estimates at every node. Needs at least 3 samples.
pub fn first_derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    debug_assert!(n >= 3);
    let inv = 1.0 / (2.0 * h);
    let mut d = Vec::with_capacity(n);
    d.push((-3.0 * values[0] + 4.0 * values[1] - values[2]) * inv);
    for i in 1..n - 1 {
        d.push((values[i + 1] - values[i - 1]) * inv);
    }
    d.push((3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) * inv);
    d
}

/// Transpose of [`first_derivative`] as a linear map, applied to `v`.
pub fn first_derivative_transpose(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    debug_assert!(n >= 3);
    let inv = 1.0 / (2.0 * h);
    let mut out = vec![0.0; n];
    out[0] += -3.0 * inv * v[0];
    out[1] += 4.0 * inv * v[0];
    out[2] += -inv * v[0];
    for i in 1..n - 1 {
        out[i + 1] += inv * v[i];
        out[i - 1] -= inv * v[i];
    }
    out[n - 1] += 3.0 * inv * v[n - 1];
    out[n - 2] += -4.0 * inv * v[n - 1];
    out[n - 3] += inv * v[n - 1];
    out
}

/// Second derivative estimates at every node.
///
/// Four-point one-sided stencils at the ends; with exactly three samples the
/// single available stencil is used at all nodes.
pub fn second_derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    debug_assert!(n >= 3);
    let inv = 1.0 / (h * h);
    let mut d = Vec::with_capacity(n);
    if n == 3 {
        let c = ((values[0] + values[2]) - 2.0 * values[1]) * inv;
        return vec![c; 3];
    }
    d.push((2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]) * inv);
    for i in 1..n - 1 {
        d.push(((values[i + 1] + values[i - 1]) - 2.0 * values[i]) * inv);
    }
    d.push((2.0 * values[n - 1] - 5.0 * values[n - 2] + 4.0 * values[n - 3] - values[n - 4]) * inv);
    d
}

/// Central third derivative at node `i`; needs two nodes of margin.
pub fn third_derivative_at(values: &[f64], h: f64, i: usize) -> Result<f64> {
    let n = values.len();
    if i < 2 || i + 2 >= n {
        return Err(FracError::Argument(format!(
            "third-derivative stencil needs two nodes of margin, node {i} of {n}"
        )));
    }
    Ok(
        (values[i + 2] - 2.0 * values[i + 1] + 2.0 * values[i - 1] - values[i - 2])
            / (2.0 * h * h * h),
    )
}
