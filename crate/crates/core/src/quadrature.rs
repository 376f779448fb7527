//! Gauss-Legendre rules on `[0, 1]` and averages of the force along a segment.

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::model::FieldModel;

/// Below `SWITCH_REL · (1 + |ξ|)` the closed-form difference quotient is
/// replaced by `Û′` at the midpoint.
pub const SWITCH_REL: f64 = 1e-8;
/// Below `BAND_REL · (1 + |ξ|)` the difference quotient loses too many digits
/// to cancellation; `Û′` is averaged by 3-point Gauss-Legendre instead.
pub const BAND_REL: f64 = 1e-3;

/// `s`-point Gauss-Legendre rule mapped to `[0, 1]`, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn stages(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ b_i f(c_i)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&c, &b)| b * f(c))
            .sum()
    }
}

/// Gauss-Legendre rule with `s ∈ {1, 2, 3}` nodes on `[0, 1]`.
pub fn gauss_legendre_rule(s: usize) -> Result<QuadratureRule> {
    let (nodes, weights) = match s {
        1 => (vec![0.5], vec![1.0]),
        2 => {
            let d = 3f64.sqrt() / 6.0;
            (vec![0.5 - d, 0.5 + d], vec![0.5, 0.5])
        }
        3 => {
            let d = 15f64.sqrt() / 10.0;
            (
                vec![0.5 - d, 0.5, 0.5 + d],
                vec![5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0],
            )
        }
        _ => {
            return Err(Error::config(format!(
                "Gauss-Legendre rule with {s} nodes is not available (supported: 1, 2, 3)"
            )))
        }
    };
    Ok(QuadratureRule { nodes, weights })
}

/// `Σ b_i F(x_from + c_i (x_to - x_from))`.
pub fn average_force_quadrature(
    model: &dyn FieldModel,
    x_from: Vec3,
    x_to: Vec3,
    rule: &QuadratureRule,
) -> Result<Vec3> {
    let dx = x_to - x_from;
    let mut acc = Vec3::ZERO;
    for (i, (&c, &b)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let f = model.force(x_from + dx * c).map_err(|e| Error::AtNode {
            node: i,
            source: Box::new(e),
        })?;
        acc += f * b;
    }
    Ok(acc)
}

/// `∫₀¹ F(x_from + τ(x_to - x_from)) dτ` in closed form for `U(x) = Û(aᵀx)`:
/// `-a (Û(aᵀx_to) - Û(aᵀx_from)) / (aᵀx_to - aᵀx_from)`.
///
/// Short segments fall back to `-a Û′` at the midpoint argument, and a band of
/// moderately short segments to a 3-point Gauss-Legendre average of `Û′`,
/// where the difference quotient would cancel catastrophically.
pub fn exact_linear_integral(model: &dyn FieldModel, x_from: Vec3, x_to: Vec3) -> Result<Vec3> {
    let ridge = model.ridge().ok_or_else(|| {
        Error::config(format!(
            "model '{}' has no linear-argument potential U(x) = Û(aᵀx)",
            model.name()
        ))
    })?;
    let a = ridge.direction();
    let xi0 = ridge.argument(x_from);
    let xi1 = ridge.argument(x_to);
    let d = xi1 - xi0;
    let scale = 1.0 + xi0.abs().max(xi1.abs());
    let mean_slope = if d.abs() < SWITCH_REL * scale {
        ridge.derivative(0.5 * (xi0 + xi1))
    } else if d.abs() < BAND_REL * scale {
        let gl = gauss_legendre_rule(3)?;
        gl.integrate(|c| ridge.derivative(xi0 + c * d))
    } else {
        (ridge.value(xi1) - ridge.value(xi0)) / d
    };
    Ok(-a * mean_slope)
}
