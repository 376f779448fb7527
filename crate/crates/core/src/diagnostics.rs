//! Conserved quantities, trajectory records and error measurement.

use crate::error::{Error, Result};
use crate::geometry::{ParticleState, RotationGenerator, Vec3};
use crate::integrators::{integrate, IntegrationError, MethodKind, MethodSpec, SolverParams};
use crate::model::FieldModel;

/// `E(x, v) = ½|v|² + U(x)`.
pub fn energy(x: Vec3, v: Vec3, model: &dyn FieldModel) -> Result<f64> {
    Ok(0.5 * (v.e1 * v.e1 + v.e2 * v.e2 + v.e3 * v.e3) + model.potential(x)?)
}

/// `M(x, v) = (v + A(x))ᵀ S x`.
pub fn momentum(x: Vec3, v: Vec3, model: &dyn FieldModel, s: &RotationGenerator) -> Result<f64> {
    let a = model.vector_potential(x)?.ok_or_else(|| {
        Error::config(format!("model '{}' has no vector potential; momentum is undefined", model.name()))
    })?;
    Ok((v + a).dot(s.apply(x)))
}

/// Momentum with the model's own symmetry generator, when it has both a
/// generator and a vector potential.
pub fn model_momentum(x: Vec3, v: Vec3, model: &dyn FieldModel) -> Result<Option<f64>> {
    match model.symmetry() {
        Some(s) if model.has_vector_potential() => momentum(x, v, model, &s).map(Some),
        _ => Ok(None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceReport {
    /// `max |U(e^{τS}x) - U(x)|`.
    pub potential_deviation: f64,
    /// `max |e^{-τS} A(e^{τS}x) - A(x)|∞`.
    pub vector_potential_deviation: f64,
}

impl InvarianceReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.potential_deviation <= tol && self.vector_potential_deviation <= tol
    }
}

/// Evaluates the rotational invariance of `U` and `A` under `e^{τS}`.
pub fn invariance_check(
    model: &dyn FieldModel,
    s: &RotationGenerator,
    probes: &[Vec3],
    taus: &[f64],
) -> Result<InvarianceReport> {
    if !model.has_vector_potential() {
        return Err(Error::config(format!(
            "model '{}' has no vector potential; invariance check needs one",
            model.name()
        )));
    }
    let vector_potential = |x: Vec3| -> Result<Vec3> {
        model
            .vector_potential(x)?
            .ok_or_else(|| Error::config("vector potential disappeared"))
    };
    let mut report = InvarianceReport {
        potential_deviation: 0.0,
        vector_potential_deviation: 0.0,
    };
    for &x in probes {
        let u = model.potential(x)?;
        let a = vector_potential(x)?;
        for &tau in taus {
            let rx = s.exp_apply(tau, x);
            let du = (model.potential(rx)? - u).abs();
            let da = (s.exp_apply(-tau, vector_potential(rx)?) - a).max_abs();
            report.potential_deviation = report.potential_deviation.max(du);
            report.vector_potential_deviation = report.vector_potential_deviation.max(da);
        }
    }
    Ok(report)
}

/// One recorded point of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: Vec3,
    pub v: Vec3,
    pub energy: f64,
    pub momentum: Option<f64>,
    /// Fixed-point sweeps of the step that produced this sample.
    pub fp_iters: usize,
}

impl Sample {
    pub fn evaluate(state: &ParticleState, fp_iters: usize, model: &dyn FieldModel) -> Result<Self> {
        Ok(Self {
            t: state.t,
            x: state.x,
            v: state.v,
            energy: energy(state.x, state.v, model)?,
            momentum: model_momentum(state.x, state.v, model)?,
            fp_iters,
        })
    }

    pub fn state(&self) -> ParticleState {
        ParticleState::new(self.x, self.v, self.t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    model: String,
    method: MethodSpec,
    samples: Vec<Sample>,
    steps: usize,
    max_fp_iters: usize,
}

impl TrajectoryRecord {
    pub fn new(model: impl Into<String>, method: MethodSpec) -> Self {
        Self {
            model: model.into(),
            method,
            samples: Vec::new(),
            steps: 0,
            max_fp_iters: 0,
        }
    }

    pub(crate) fn push(&mut self, sample: Sample) {
        self.samples.push(sample);
    }

    pub(crate) fn note_step(&mut self, iters: usize) {
        self.steps += 1;
        self.max_fp_iters = self.max_fp_iters.max(iters);
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn method(&self) -> &MethodSpec {
        &self.method
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    /// Steps taken, including unsampled ones.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Largest fixed-point sweep count over all steps.
    pub fn max_fp_iters(&self) -> usize {
        self.max_fp_iters
    }

    /// # Panics
    /// If the record holds no samples.
    pub fn final_state(&self) -> ParticleState {
        self.samples.last().expect("empty trajectory record").state()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Energy,
    Momentum,
}

/// `(t, |Q(t) - Q(t₀)|)` for every sample.
pub fn drift_series(record: &TrajectoryRecord, quantity: Quantity) -> Result<Vec<(f64, f64)>> {
    let value = |s: &Sample| -> Result<f64> {
        match quantity {
            Quantity::Energy => Ok(s.energy),
            Quantity::Momentum => s
                .momentum
                .ok_or_else(|| Error::config(format!("record for model '{}' carries no momentum", record.model))),
        }
    };
    let Some(first) = record.samples.first() else {
        return Ok(Vec::new());
    };
    let q0 = value(first)?;
    record
        .samples
        .iter()
        .map(|s| Ok((s.t, (value(s)? - q0).abs())))
        .collect()
}

/// Largest entry of [`drift_series`].
pub fn max_drift(record: &TrajectoryRecord, quantity: Quantity) -> Result<f64> {
    Ok(drift_series(record, quantity)?
        .into_iter()
        .map(|(_, d)| d)
        .fold(0.0, f64::max))
}

/// Allowed disagreement between the final times of compared records.
pub const TIME_ALIGNMENT_TOL: f64 = 1e-12;

/// Max-norm of the `(x, v)` difference at the final sample of each record.
pub fn global_error(record: &TrajectoryRecord, oracle: &TrajectoryRecord) -> Result<f64> {
    let (Some(a), Some(b)) = (record.samples.last(), oracle.samples.last()) else {
        return Err(Error::config("cannot compare an empty trajectory record"));
    };
    if (a.t - b.t).abs() > TIME_ALIGNMENT_TOL {
        return Err(Error::Alignment {
            record_t: a.t,
            reference_t: b.t,
        });
    }
    Ok(a.state().phase_distance(&b.state()))
}

/// Step count and step size used by [`reference_oracle`]: `2¹⁴` steps over
/// the span, doubled until `|h| ≤ 10⁻³`.
pub fn reference_steps(t0: f64, t_end: f64) -> (usize, f64) {
    let span = t_end - t0;
    let mut n: usize = 1 << 14;
    while (span / n as f64).abs() > REFERENCE_MAX_STEP {
        n *= 2;
    }
    (n, span / n as f64)
}

pub const REFERENCE_MAX_STEP: f64 = 1e-3;

/// Solver settings of the reference integration.
pub fn reference_solver() -> SolverParams {
    SolverParams {
        tol: 1e-15,
        max_iters: 200,
    }
}

/// High-accuracy reference trajectory: EP with 3-point Gauss-Legendre at
/// the step from [`reference_steps`] and tolerance 1e-15. Only the initial
/// and final states are kept.
pub fn reference_oracle(
    state0: &ParticleState,
    model: &dyn FieldModel,
    t_end: f64,
) -> Result<TrajectoryRecord, IntegrationError> {
    let (n, h) = reference_steps(state0.t, t_end);
    let h = if h == 0.0 { 1.0 } else { h };
    let method = MethodSpec {
        kind: MethodKind::Epgl(3),
        h,
    };
    integrate(state0, model, &method, &reference_solver(), t_end, n.max(1))
}
