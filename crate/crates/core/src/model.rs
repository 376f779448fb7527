//! Field models: the magnetic field `B`, the scalar potential `U` with its
//! force `F = -∇U`, and optionally a vector potential `A` with `∇ × A = B`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{ParticleState, RotationGenerator, Vec3};

/// Names accepted by [`builtin_model`].
pub const BUILTIN_MODELS: [&str; 3] = ["paper-sec6", "constant-B", "free-flight"];

/// Default finite-difference step for [`consistency_check`].
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Default pass threshold for finite-difference residuals.
pub const DEFAULT_FD_TOLERANCE: f64 = 1e-5;

/// Scalar profile of a potential of the form `U(x) = Û(aᵀx)`.
pub struct Ridge {
    direction: Vec3,
    profile: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    derivative: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Ridge {
    pub fn new(
        direction: Vec3,
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            direction,
            profile: Box::new(profile),
            derivative: Box::new(derivative),
        }
    }

    /// `Û ≡ 0` along `direction`.
    pub fn zero(direction: Vec3) -> Self {
        Self::new(direction, |_| 0.0, |_| 0.0)
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    /// `Û(ξ)`.
    pub fn value(&self, xi: f64) -> f64 {
        (self.profile)(xi)
    }

    /// `Û′(ξ)`.
    pub fn derivative(&self, xi: f64) -> f64 {
        (self.derivative)(xi)
    }

    /// `aᵀx`.
    pub fn argument(&self, x: Vec3) -> f64 {
        self.direction.dot(x)
    }
}

impl fmt::Debug for Ridge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ridge")
            .field("direction", &self.direction)
            .finish_non_exhaustive()
    }
}

/// Static electromagnetic configuration driving the particle.
///
/// Evaluators are pure; implementations must be safe to call from several
/// threads at once.
pub trait FieldModel: Send + Sync {
    fn name(&self) -> &str;

    fn magnetic_field(&self, x: Vec3) -> Result<Vec3>;

    fn potential(&self, x: Vec3) -> Result<f64>;

    /// `F(x) = -∇U(x)`.
    fn force(&self, x: Vec3) -> Result<Vec3>;

    /// `A(x)` with `∇ × A = B`, if the model provides one.
    fn vector_potential(&self, _x: Vec3) -> Result<Option<Vec3>> {
        Ok(None)
    }

    fn has_vector_potential(&self) -> bool {
        false
    }

    /// Rotation generator `S` under which `U` and `A` are invariant.
    fn symmetry(&self) -> Option<RotationGenerator> {
        None
    }

    /// Present when `U(x) = Û(aᵀx)`; enables the closed-form force average.
    fn ridge(&self) -> Option<&Ridge> {
        None
    }

    /// Initial state used when the caller supplies none.
    fn default_initial_state(&self) -> Option<ParticleState> {
        None
    }
}

impl fmt::Debug for dyn FieldModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldModel({})", self.name())
    }
}

/// `U(x) = 1/(100 r)`, `B(x) = (0, 0, r)` with `r = √(x1² + x2²)`, and
/// `A(x) = (-x2 r/3, x1 r/3, 0)`. Singular on the e3 axis.
#[derive(Debug, Clone, Copy, Default)]
pub struct AxialModel;

/// Below this cylindrical radius the axial model reports a domain error.
pub const AXIAL_MIN_RADIUS: f64 = 1e-12;

impl AxialModel {
    fn radius(x: Vec3) -> Result<f64> {
        let r = x.e1.hypot(x.e2);
        if r < AXIAL_MIN_RADIUS || !r.is_finite() {
            return Err(Error::Domain {
                point: x,
                reason: format!("cylindrical radius {r:e} below {AXIAL_MIN_RADIUS:e}"),
            });
        }
        Ok(r)
    }

    pub fn initial_state() -> ParticleState {
        ParticleState::new(Vec3::new(0.0, 1.0, 0.1), Vec3::new(0.09, 0.05, 0.20), 0.0)
    }
}

impl FieldModel for AxialModel {
    fn name(&self) -> &str {
        "paper-sec6"
    }

    fn magnetic_field(&self, x: Vec3) -> Result<Vec3> {
        Ok(Vec3::new(0.0, 0.0, Self::radius(x)?))
    }

    fn potential(&self, x: Vec3) -> Result<f64> {
        Ok(1.0 / (100.0 * Self::radius(x)?))
    }

    fn force(&self, x: Vec3) -> Result<Vec3> {
        let r = Self::radius(x)?;
        let c = 1.0 / (100.0 * r * r * r);
        Ok(Vec3::new(x.e1 * c, x.e2 * c, 0.0))
    }

    fn vector_potential(&self, x: Vec3) -> Result<Option<Vec3>> {
        let r3 = Self::radius(x)? / 3.0;
        Ok(Some(Vec3::new(-x.e2 * r3, x.e1 * r3, 0.0)))
    }

    fn has_vector_potential(&self) -> bool {
        true
    }

    fn symmetry(&self) -> Option<RotationGenerator> {
        Some(RotationGenerator::about_e3())
    }

    fn default_initial_state(&self) -> Option<ParticleState> {
        Some(Self::initial_state())
    }
}

/// Uniform field `B = (0, 0, b)` with `U ≡ 0` and symmetric gauge
/// `A = (-b x2/2, b x1/2, 0)`.
#[derive(Debug)]
pub struct UniformMagneticModel {
    b: f64,
    ridge: Ridge,
}

impl UniformMagneticModel {
    pub fn new(b: f64) -> Self {
        Self {
            b,
            ridge: Ridge::zero(Vec3::new(1.0, 0.0, 0.0)),
        }
    }

    pub fn strength(&self) -> f64 {
        self.b
    }
}

impl FieldModel for UniformMagneticModel {
    fn name(&self) -> &str {
        "constant-B"
    }

    fn magnetic_field(&self, _x: Vec3) -> Result<Vec3> {
        Ok(Vec3::new(0.0, 0.0, self.b))
    }

    fn potential(&self, _x: Vec3) -> Result<f64> {
        Ok(0.0)
    }

    fn force(&self, _x: Vec3) -> Result<Vec3> {
        Ok(Vec3::ZERO)
    }

    fn vector_potential(&self, x: Vec3) -> Result<Option<Vec3>> {
        let h = 0.5 * self.b;
        Ok(Some(Vec3::new(-h * x.e2, h * x.e1, 0.0)))
    }

    fn has_vector_potential(&self) -> bool {
        true
    }

    fn symmetry(&self) -> Option<RotationGenerator> {
        Some(RotationGenerator::about_e3())
    }

    fn ridge(&self) -> Option<&Ridge> {
        Some(&self.ridge)
    }

    fn default_initial_state(&self) -> Option<ParticleState> {
        Some(ParticleState::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), 0.0))
    }
}

/// No fields at all: `B = 0`, `U = 0`, `A = 0`.
#[derive(Debug)]
pub struct FreeFlightModel {
    ridge: Ridge,
}

impl Default for FreeFlightModel {
    fn default() -> Self {
        Self {
            ridge: Ridge::zero(Vec3::new(1.0, 0.0, 0.0)),
        }
    }
}

impl FieldModel for FreeFlightModel {
    fn name(&self) -> &str {
        "free-flight"
    }

    fn magnetic_field(&self, _x: Vec3) -> Result<Vec3> {
        Ok(Vec3::ZERO)
    }

    fn potential(&self, _x: Vec3) -> Result<f64> {
        Ok(0.0)
    }

    fn force(&self, _x: Vec3) -> Result<Vec3> {
        Ok(Vec3::ZERO)
    }

    fn vector_potential(&self, _x: Vec3) -> Result<Option<Vec3>> {
        Ok(Some(Vec3::ZERO))
    }

    fn has_vector_potential(&self) -> bool {
        true
    }

    fn symmetry(&self) -> Option<RotationGenerator> {
        Some(RotationGenerator::about_e3())
    }

    fn ridge(&self) -> Option<&Ridge> {
        Some(&self.ridge)
    }

    fn default_initial_state(&self) -> Option<ParticleState> {
        Some(ParticleState::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), 0.0))
    }
}

/// Looks up one of the [`BUILTIN_MODELS`].
pub fn builtin_model(name: &str) -> Result<Box<dyn FieldModel>> {
    match name {
        "paper-sec6" => Ok(Box::new(AxialModel)),
        "constant-B" => Ok(Box::new(UniformMagneticModel::new(1.0))),
        "free-flight" => Ok(Box::new(FreeFlightModel::default())),
        other => Err(Error::config(format!(
            "unknown model '{other}' (expected one of: {})",
            BUILTIN_MODELS.join(", ")
        ))),
    }
}

type VecFn = Box<dyn Fn(Vec3) -> Vec3 + Send + Sync>;
type ScalarFn = Box<dyn Fn(Vec3) -> f64 + Send + Sync>;

/// Field model assembled from closures. Evaluators never fail.
pub struct FnModel {
    name: String,
    magnetic: VecFn,
    potential: ScalarFn,
    force: VecFn,
    vector_potential: Option<VecFn>,
    symmetry: Option<RotationGenerator>,
    ridge: Option<Arc<Ridge>>,
}

impl FnModel {
    pub fn new(
        name: impl Into<String>,
        potential: impl Fn(Vec3) -> f64 + Send + Sync + 'static,
        force: impl Fn(Vec3) -> Vec3 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            magnetic: Box::new(|_| Vec3::ZERO),
            potential: Box::new(potential),
            force: Box::new(force),
            vector_potential: None,
            symmetry: None,
            ridge: None,
        }
    }

    /// Model whose potential is `Û(aᵀx)`; the force is `-a Û′(aᵀx)`.
    pub fn from_ridge(name: impl Into<String>, ridge: Ridge) -> Self {
        let a = ridge.direction();
        let ridge = Arc::new(ridge);
        let (pu, pf) = (ridge.clone(), ridge.clone());
        let mut model = Self::new(
            name,
            move |x| pu.value(pu.argument(x)),
            move |x| -a * pf.derivative(pf.argument(x)),
        );
        model.ridge = Some(ridge);
        model
    }

    pub fn with_magnetic_field(mut self, b: impl Fn(Vec3) -> Vec3 + Send + Sync + 'static) -> Self {
        self.magnetic = Box::new(b);
        self
    }

    pub fn with_vector_potential(
        mut self,
        a: impl Fn(Vec3) -> Vec3 + Send + Sync + 'static,
    ) -> Self {
        self.vector_potential = Some(Box::new(a));
        self
    }

    pub fn with_symmetry(mut self, s: RotationGenerator) -> Self {
        self.symmetry = Some(s);
        self
    }
}

impl fmt::Debug for FnModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnModel")
            .field("name", &self.name)
            .field("ridge", &self.ridge)
            .finish_non_exhaustive()
    }
}

impl FieldModel for FnModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn magnetic_field(&self, x: Vec3) -> Result<Vec3> {
        Ok((self.magnetic)(x))
    }

    fn potential(&self, x: Vec3) -> Result<f64> {
        Ok((self.potential)(x))
    }

    fn force(&self, x: Vec3) -> Result<Vec3> {
        Ok((self.force)(x))
    }

    fn vector_potential(&self, x: Vec3) -> Result<Option<Vec3>> {
        Ok(self.vector_potential.as_ref().map(|a| a(x)))
    }

    fn has_vector_potential(&self) -> bool {
        self.vector_potential.is_some()
    }

    fn symmetry(&self) -> Option<RotationGenerator> {
        self.symmetry
    }

    fn ridge(&self) -> Option<&Ridge> {
        self.ridge.as_deref()
    }
}

/// Largest finite-difference residuals found by [`consistency_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    /// `max |F(x) + ∇U(x)|` over the probes.
    pub force_residual: f64,
    pub force_worst_probe: Option<Vec3>,
    /// `max |curl A(x) - B(x)|`; `None` when the model has no vector potential.
    pub curl_residual: Option<f64>,
    pub curl_worst_probe: Option<Vec3>,
}

impl ConsistencyReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.force_residual <= tol && self.curl_residual.is_none_or(|c| c <= tol)
    }
}

fn unit(i: usize) -> Vec3 {
    match i {
        0 => Vec3::new(1.0, 0.0, 0.0),
        1 => Vec3::new(0.0, 1.0, 0.0),
        _ => Vec3::new(0.0, 0.0, 1.0),
    }
}

/// Central-difference gradient of the potential.
pub fn fd_gradient(model: &dyn FieldModel, x: Vec3, step: f64) -> Result<Vec3> {
    let mut g = [0.0; 3];
    for (i, gi) in g.iter_mut().enumerate() {
        let d = unit(i) * step;
        *gi = (model.potential(x + d)? - model.potential(x - d)?) / (2.0 * step);
    }
    Ok(g.into())
}

/// Central-difference curl of the vector potential, `None` if the model has none.
pub fn fd_curl(model: &dyn FieldModel, x: Vec3, step: f64) -> Result<Option<Vec3>> {
    if !model.has_vector_potential() {
        return Ok(None);
    }
    // jac[j] = ∂A/∂x_j
    let mut jac = [Vec3::ZERO; 3];
    for (j, col) in jac.iter_mut().enumerate() {
        let d = unit(j) * step;
        let (Some(ap), Some(am)) = (model.vector_potential(x + d)?, model.vector_potential(x - d)?)
        else {
            return Ok(None);
        };
        *col = (ap - am) / (2.0 * step);
    }
    Ok(Some(Vec3::new(
        jac[1].e3 - jac[2].e2,
        jac[2].e1 - jac[0].e3,
        jac[0].e2 - jac[1].e1,
    )))
}

/// Checks `F = -∇U` and, when `A` is present, `∇ × A = B` by central
/// differences at each probe.
pub fn consistency_check(
    model: &dyn FieldModel,
    probes: &[Vec3],
    fd_step: f64,
) -> Result<ConsistencyReport> {
    if !(fd_step > 0.0 && fd_step.is_finite()) {
        return Err(Error::config(format!("fd_step must be positive, got {fd_step}")));
    }
    let mut report = ConsistencyReport {
        force_residual: 0.0,
        force_worst_probe: None,
        curl_residual: None,
        curl_worst_probe: None,
    };
    for &p in probes {
        let r = (model.force(p)? + fd_gradient(model, p, fd_step)?).max_abs();
        if report.force_worst_probe.is_none() || r > report.force_residual {
            report.force_residual = r;
            report.force_worst_probe = Some(p);
        }
        if let Some(curl) = fd_curl(model, p, fd_step)? {
            let r = (curl - model.magnetic_field(p)?).max_abs();
            if report.curl_residual.is_none_or(|c| r > c) {
                report.curl_residual = Some(r);
                report.curl_worst_probe = Some(p);
            }
        }
    }
    Ok(report)
}
