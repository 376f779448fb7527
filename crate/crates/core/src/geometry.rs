//! Three-vectors, particle states and the skew-symmetric matrices that act on them.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

/// Real 3-vector used for positions, velocities and field values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(e1: f64, e2: f64, e3: f64) -> Self {
        Self { e1, e2, e3 }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.e1 * other.e1 + self.e2 * other.e2 + self.e3 * other.e3
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.e2 * other.e3 - self.e3 * other.e2,
            self.e3 * other.e1 - self.e1 * other.e3,
            self.e1 * other.e2 - self.e2 * other.e1,
        )
    }

    pub fn norm_sqr(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Max-norm, the norm used for all solver residuals and error measurements.
    pub fn max_abs(self) -> f64 {
        self.e1.abs().max(self.e2.abs()).max(self.e3.abs())
    }

    pub fn is_finite(self) -> bool {
        self.e1.is_finite() && self.e2.is_finite() && self.e3.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.e1, self.e2, self.e3]
    }

    /// Midpoint of the segment between `self` and `other`.
    pub fn midpoint(self, other: Vec3) -> Vec3 {
        (self + other) * 0.5
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.e1,
            1 => &self.e2,
            2 => &self.e3,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.e1, self.e2, self.e3)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.e1 + o.e1, self.e2 + o.e2, self.e3 + o.e3)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.e1 - o.e1, self.e2 - o.e2, self.e3 - o.e3)
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.e1, -self.e2, -self.e3)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.e1 * s, self.e2 * s, self.e3 * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.e1 / s, self.e2 / s, self.e3 / s)
    }
}

/// Snapshot `(x, v, t)` of the particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    pub x: Vec3,
    pub v: Vec3,
    pub t: f64,
}

impl ParticleState {
    pub fn new(x: Vec3, v: Vec3, t: f64) -> Self {
        Self { x, v, t }
    }

    /// Max-norm distance over the six phase-space components.
    pub fn phase_distance(&self, other: &ParticleState) -> f64 {
        (self.x - other.x).max_abs().max((self.v - other.v).max_abs())
    }
}

/// Skew-symmetric 3×3 matrix generated by a vector `b`, acting as `w ↦ w × b`.
///
/// As a matrix:
///
/// ```text
/// [  0   b3  -b2 ]
/// [ -b3  0    b1 ]
/// [  b2 -b1   0  ]
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SkewMatrix3 {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

impl SkewMatrix3 {
    pub fn from_vector(b: Vec3) -> Self {
        Self {
            b1: b.e1,
            b2: b.e2,
            b3: b.e3,
        }
    }

    pub fn generator(&self) -> Vec3 {
        Vec3::new(self.b1, self.b2, self.b3)
    }

    pub fn apply(&self, w: Vec3) -> Vec3 {
        Vec3::new(
            self.b3 * w.e2 - self.b2 * w.e3,
            -self.b3 * w.e1 + self.b1 * w.e3,
            self.b2 * w.e1 - self.b1 * w.e2,
        )
    }

    /// Dense row-major entries.
    pub fn entries(&self) -> [[f64; 3]; 3] {
        [
            [0.0, self.b3, -self.b2],
            [-self.b3, 0.0, self.b1],
            [self.b2, -self.b1, 0.0],
        ]
    }
}

/// `B̃ w` for the magnetic field value `b`; equal to `w × b`.
pub fn btilde_apply(b: Vec3, w: Vec3) -> Vec3 {
    SkewMatrix3::from_vector(b).apply(w)
}

/// Skew-symmetric generator `S` of a one-parameter rotation group `e^{τS}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationGenerator {
    pub s: SkewMatrix3,
}

impl RotationGenerator {
    pub fn new(s: SkewMatrix3) -> Self {
        Self { s }
    }

    /// Generator with `S x = (x2, -x1, 0)`: rotations about the e3 axis.
    pub fn about_e3() -> Self {
        Self::new(SkewMatrix3::from_vector(Vec3::new(0.0, 0.0, 1.0)))
    }

    pub fn apply(&self, x: Vec3) -> Vec3 {
        self.s.apply(x)
    }

    /// `e^{τS} x` by the Rodrigues closed form
    /// `I + sin(τn)/n S + (1 - cos(τn))/n² S²` with `n = |generator|`.
    pub fn exp_apply(&self, tau: f64, x: Vec3) -> Vec3 {
        let n = self.s.generator().norm();
        if n == 0.0 || tau == 0.0 {
            return x;
        }
        let sx = self.s.apply(x);
        let ssx = self.s.apply(sx);
        let theta = tau * n;
        x + sx * (theta.sin() / n) + ssx * ((1.0 - theta.cos()) / (n * n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn btilde_unit_cases() {
        let b = Vec3::new(0.0, 0.0, 1.0);
        assert_eq!(btilde_apply(b, Vec3::new(1.0, 0.0, 0.0)), Vec3::new(0.0, -1.0, 0.0));
        assert_eq!(
            btilde_apply(Vec3::ZERO, Vec3::new(3.0, -2.0, 5.0)),
            Vec3::ZERO
        );
    }

    #[test]
    fn skew_entries_are_antisymmetric() {
        let m = SkewMatrix3::from_vector(Vec3::new(0.3, -1.7, 2.5)).entries();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[i][j], -m[j][i]);
            }
        }
    }

    #[test]
    fn entries_reproduce_apply() {
        let s = SkewMatrix3::from_vector(Vec3::new(0.4, 1.1, -0.9));
        let w = Vec3::new(-2.0, 0.5, 3.0);
        let m = s.entries();
        let dense = Vec3::new(
            m[0][0] * w.e1 + m[0][1] * w.e2 + m[0][2] * w.e3,
            m[1][0] * w.e1 + m[1][1] * w.e2 + m[1][2] * w.e3,
            m[2][0] * w.e1 + m[2][1] * w.e2 + m[2][2] * w.e3,
        );
        assert_eq!(dense, s.apply(w));
    }

    #[test]
    fn rotation_about_e3_matches_trigonometry() {
        let g = RotationGenerator::about_e3();
        let x = Vec3::new(1.0, 0.0, 0.5);
        // S x = (x2, -x1, 0) generates a clockwise rotation in the (e1, e2) plane.
        let tau = std::f64::consts::FRAC_PI_2;
        let r = g.exp_apply(tau, x);
        assert!((r - Vec3::new(0.0, -1.0, 0.5)).max_abs() < 1e-15);
        assert_eq!(g.exp_apply(0.0, x), x);
        let tau = 0.37;
        let r = g.exp_apply(tau, x);
        let expect = Vec3::new(tau.cos(), -tau.sin(), 0.5);
        assert!((r - expect).max_abs() < 1e-15);
    }

    #[test]
    fn exp_is_a_group_action() {
        let g = RotationGenerator::new(SkewMatrix3::from_vector(Vec3::new(0.2, -0.5, 0.9)));
        let x = Vec3::new(0.3, 1.2, -0.7);
        let a = g.exp_apply(0.4, g.exp_apply(0.9, x));
        let b = g.exp_apply(1.3, x);
        assert!((a - b).max_abs() < 1e-14);
        assert!((g.exp_apply(-1.3, b) - x).max_abs() < 1e-14);
        assert!((b.norm() - x.norm()).abs() < 1e-14);
    }
}
