//! One-step maps for `ẍ = ẋ × B(x) + F(x)`.
//!
//! The energy-preserving (EP) scheme advances `(xₙ, vₙ)` by solving
//!
//! ```text
//! v₊ = vₙ + h·𝔉(xₙ, x₊) + h·((vₙ + v₊)/2) × B((xₙ + x₊)/2)
//! x₊ = xₙ + h·(vₙ + v₊)/2
//! ```
//!
//! where `𝔉` is the average of `F` over the segment `[xₙ, x₊]`, either in
//! closed form ([`MethodKind::EpExact`]) or by an `s`-point Gauss-Legendre
//! rule ([`MethodKind::Epgl`]). The second line is the reduced form of the
//! position update `x₊ = xₙ + h vₙ + (h²/2)(𝔉 + B̃ (vₙ + v₊)/2)`.
//!
//! The system is solved by fixed-point iteration on `v₊` alone.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::diagnostics::{Sample, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::geometry::{btilde_apply, ParticleState, Vec3};
use crate::model::FieldModel;
use crate::quadrature::{average_force_quadrature, exact_linear_integral, gauss_legendre_rule, QuadratureRule};

/// Fixed-point solver settings. Convergence is declared when the max-norm
/// change of the velocity iterate drops to `tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_iters: 100,
        }
    }
}

impl SolverParams {
    pub fn new(tol: f64, max_iters: usize) -> Result<Self> {
        let p = Self { tol, max_iters };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::config(format!("solver tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::config("solver max_iters must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodKind {
    /// EP with the closed-form force average for `U(x) = Û(aᵀx)`.
    EpExact,
    /// EP with an `s`-point Gauss-Legendre force average, `s ∈ {1, 2, 3}`.
    Epgl(usize),
    /// Explicit Boris pusher in synchronized one-step form.
    Boris,
}

impl MethodKind {
    pub fn label(&self) -> String {
        match self {
            MethodKind::EpExact => "ep-exact".to_string(),
            MethodKind::Epgl(s) => format!("ep{s}"),
            MethodKind::Boris => "boris".to_string(),
        }
    }

    pub fn is_implicit(&self) -> bool {
        !matches!(self, MethodKind::Boris)
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "boris" => Ok(MethodKind::Boris),
            "ep-exact" => Ok(MethodKind::EpExact),
            "ep1" => Ok(MethodKind::Epgl(1)),
            "ep2" => Ok(MethodKind::Epgl(2)),
            "ep3" => Ok(MethodKind::Epgl(3)),
            other => Err(Error::config(format!(
                "unknown method '{other}' (expected boris, ep1, ep2, ep3 or ep-exact)"
            ))),
        }
    }
}

/// A method together with its (constant) step size. Negative `h` integrates
/// backwards in time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSpec {
    pub kind: MethodKind,
    pub h: f64,
}

impl MethodSpec {
    pub fn new(kind: MethodKind, h: f64) -> Result<Self> {
        if h == 0.0 || !h.is_finite() {
            return Err(Error::config(format!("step size must be finite and nonzero, got {h}")));
        }
        if let MethodKind::Epgl(s) = kind {
            gauss_legendre_rule(s)?;
        }
        Ok(Self { kind, h })
    }

    pub fn with_step(&self, h: f64) -> Self {
        Self { kind: self.kind, h }
    }

    /// Checks requirements the method places on the model.
    pub fn check_model(&self, model: &dyn FieldModel) -> Result<()> {
        if self.kind == MethodKind::EpExact && model.ridge().is_none() {
            return Err(Error::config(format!(
                "method ep-exact needs a linear-argument potential, which model '{}' does not provide",
                model.name()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub state: ParticleState,
    /// Fixed-point sweeps used; zero for explicit methods.
    pub iters: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub value: Vec3,
    pub iters: usize,
    pub residual: f64,
}

/// Iterates `w ← map(w)` until `|w_new - w|∞ ≤ tol`.
pub fn fixed_point_solve<F>(initial_guess: Vec3, mut update_map: F, solver: &SolverParams) -> Result<FixedPoint>
where
    F: FnMut(Vec3) -> Result<Vec3>,
{
    let mut w = initial_guess;
    let mut residual = f64::INFINITY;
    for iter in 1..=solver.max_iters {
        let next = update_map(w)?;
        if !next.is_finite() {
            return Err(Error::Divergence { iters: iter, residual: f64::INFINITY });
        }
        residual = (next - w).max_abs();
        w = next;
        if residual <= solver.tol {
            return Ok(FixedPoint { value: w, iters: iter, residual });
        }
    }
    Err(Error::Divergence {
        iters: solver.max_iters,
        residual,
    })
}

enum ForceAverage {
    Quadrature(QuadratureRule),
    ClosedForm,
}

impl ForceAverage {
    fn for_kind(kind: MethodKind) -> Result<Self> {
        match kind {
            MethodKind::Epgl(s) => Ok(ForceAverage::Quadrature(gauss_legendre_rule(s)?)),
            MethodKind::EpExact => Ok(ForceAverage::ClosedForm),
            MethodKind::Boris => Err(Error::config("boris is not an energy-preserving method")),
        }
    }

    fn eval(&self, model: &dyn FieldModel, from: Vec3, to: Vec3) -> Result<Vec3> {
        match self {
            ForceAverage::Quadrature(rule) => average_force_quadrature(model, from, to, rule),
            ForceAverage::ClosedForm => exact_linear_integral(model, from, to),
        }
    }
}

fn ep_step_prepared(
    state: &ParticleState,
    model: &dyn FieldModel,
    average: &ForceAverage,
    h: f64,
    solver: &SolverParams,
) -> Result<StepResult> {
    let (x, v) = (state.x, state.v);
    let advance = |v_next: Vec3| x + (v + v_next) * (0.5 * h);
    let fp = fixed_point_solve(
        v,
        |v_next| {
            let x_next = advance(v_next);
            let f_avg = average.eval(model, x, x_next)?;
            let b_mid = model.magnetic_field(x.midpoint(x_next))?;
            Ok(v + f_avg * h + btilde_apply(b_mid, v.midpoint(v_next)) * h)
        },
        solver,
    )?;
    Ok(StepResult {
        state: ParticleState::new(advance(fp.value), fp.value, state.t + h),
        iters: fp.iters,
        residual: fp.residual,
    })
}

/// One step of the energy-preserving scheme (`EpExact` or `Epgl(s)`).
pub fn ep_step(
    state: &ParticleState,
    model: &dyn FieldModel,
    method: &MethodSpec,
    solver: &SolverParams,
) -> Result<StepResult> {
    method.check_model(model)?;
    let average = ForceAverage::for_kind(method.kind)?;
    ep_step_prepared(state, model, &average, method.h, solver)
}

/// One step of the Boris method in its synchronized one-step form.
///
/// With `v⁻ₙ = vₙ - (h/2) vₙ × Bₙ` and `v⁺ₙ = vₙ + (h/2) vₙ × Bₙ` (the
/// velocities on either side of the Boris rotation at `xₙ`):
///
/// ```text
/// v_{n+1/2} = v⁺ₙ + (h/2) F(xₙ)
/// x_{n+1}   = xₙ + h v_{n+1/2}
/// v_{n+1} - (h/2) v_{n+1} × B(x_{n+1}) = v_{n+1/2} + (h/2) F(x_{n+1})
/// ```
///
/// The last line is solved in closed form. Eliminating the velocities gives
/// the classical two-step Boris recursion, so positions coincide with the
/// staggered leapfrog form.
pub fn boris_step(state: &ParticleState, model: &dyn FieldModel, h: f64) -> Result<ParticleState> {
    let half = 0.5 * h;
    let (x, v) = (state.x, state.v);
    let v_half = v + (model.force(x)? + v.cross(model.magnetic_field(x)?)) * half;
    let x_next = x + v_half * h;
    let u = v_half + model.force(x_next)? * half;
    let t = model.magnetic_field(x_next)? * half;
    let v_next = (u + u.cross(t) + t * u.dot(t)) / (1.0 + t.norm_sqr());
    Ok(ParticleState::new(x_next, v_next, state.t + h))
}

/// Prepared stepping for one method on one model.
pub struct Stepper<'a> {
    model: &'a dyn FieldModel,
    method: MethodSpec,
    solver: SolverParams,
    average: Option<ForceAverage>,
}

impl<'a> Stepper<'a> {
    pub fn new(model: &'a dyn FieldModel, method: MethodSpec, solver: SolverParams) -> Result<Self> {
        solver.validate()?;
        method.check_model(model)?;
        let average = if method.kind.is_implicit() {
            Some(ForceAverage::for_kind(method.kind)?)
        } else {
            None
        };
        Ok(Self {
            model,
            method,
            solver,
            average,
        })
    }

    pub fn method(&self) -> &MethodSpec {
        &self.method
    }

    pub fn step(&self, state: &ParticleState) -> Result<StepResult> {
        match &self.average {
            Some(avg) => ep_step_prepared(state, self.model, avg, self.method.h, &self.solver),
            None => Ok(StepResult {
                state: boris_step(state, self.model, self.method.h)?,
                iters: 0,
                residual: 0.0,
            }),
        }
    }
}

/// Step failure during [`integrate`]; carries the samples recorded so far.
#[derive(Debug, Error)]
#[error("integration failed at step {step} (t = {time}): {source}")]
pub struct IntegrationError {
    pub step: usize,
    pub time: f64,
    #[source]
    pub source: Error,
    pub partial: Box<TrajectoryRecord>,
}

impl IntegrationError {
    fn new(step: usize, time: f64, source: Error, partial: TrajectoryRecord) -> Self {
        Self {
            step,
            time,
            source,
            partial: Box::new(partial),
        }
    }
}

/// Number of constant steps of size `h` from `t0` that fit in `t_end`.
/// Ratios within rounding of an integer are rounded, others truncated.
pub fn step_count(t0: f64, t_end: f64, h: f64) -> Result<usize> {
    if h == 0.0 || !h.is_finite() {
        return Err(Error::config(format!("step size must be finite and nonzero, got {h}")));
    }
    if !t_end.is_finite() {
        return Err(Error::config(format!("end time must be finite, got {t_end}")));
    }
    let ratio = (t_end - t0) / h;
    let nearest = ratio.round();
    let slack = 4.0 * f64::EPSILON * nearest.abs().max(1.0);
    let n = if (ratio - nearest).abs() <= slack { nearest } else { ratio.floor() };
    if n < 0.0 {
        return Err(Error::config(format!(
            "end time {t_end} lies behind start time {t0} for step size {h}"
        )));
    }
    Ok(n as usize)
}

/// Runs `method` from `state0` to `t_end`, keeping every `sample_every`-th
/// state plus the final one.
///
/// Times are computed as `t0 + k·h`. When `(t_end - t0)/h` is not an integer
/// the run stops at the last whole step before `t_end`.
pub fn integrate(
    state0: &ParticleState,
    model: &dyn FieldModel,
    method: &MethodSpec,
    solver: &SolverParams,
    t_end: f64,
    sample_every: usize,
) -> Result<TrajectoryRecord, IntegrationError> {
    let mut record = TrajectoryRecord::new(model.name(), *method);
    let fail = |e: Error, record: TrajectoryRecord| IntegrationError::new(0, state0.t, e, record);

    let setup = (|| {
        if sample_every == 0 {
            return Err(Error::config("sample_every must be at least 1"));
        }
        let n = step_count(state0.t, t_end, method.h)?;
        let stepper = Stepper::new(model, *method, *solver)?;
        Ok((n, stepper))
    })();
    let (n_steps, stepper) = match setup {
        Ok(v) => v,
        Err(e) => return Err(fail(e, record)),
    };
    match Sample::evaluate(state0, 0, model) {
        Ok(s) => record.push(s),
        Err(e) => return Err(fail(e, record)),
    }

    let t0 = state0.t;
    let mut state = *state0;
    for k in 1..=n_steps {
        let step = match stepper.step(&state) {
            Ok(s) => s,
            Err(e) => return Err(IntegrationError::new(k, state.t, e, record)),
        };
        state = step.state;
        state.t = t0 + k as f64 * method.h;
        record.note_step(step.iters);
        if k % sample_every == 0 || k == n_steps {
            match Sample::evaluate(&state, step.iters, model) {
                Ok(s) => record.push(s),
                Err(e) => return Err(IntegrationError::new(k, state.t, e, record)),
            }
        }
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::energy;
    use crate::model::{builtin_model, AxialModel, FnModel, UniformMagneticModel};

    fn sec6_state() -> ParticleState {
        AxialModel::initial_state()
    }

    #[test]
    fn fixed_point_identity() {
        let g = Vec3::new(1.0, -2.0, 3.0);
        let fp = fixed_point_solve(g, Ok, &SolverParams::default()).unwrap();
        assert_eq!(fp.value, g);
        assert_eq!(fp.iters, 1);
        assert_eq!(fp.residual, 0.0);
    }

    #[test]
    fn fixed_point_contraction() {
        let one = Vec3::new(1.0, 1.0, 1.0);
        let fp = fixed_point_solve(Vec3::ZERO, |w| Ok(w * 0.5 + one * 0.5), &SolverParams::default()).unwrap();
        // the change at sweep k is 2^-k, first ≤ 1e-13 at k = 44
        assert_eq!(fp.iters, 44);
        assert!((fp.value - one).max_abs() <= 1e-13);
    }

    #[test]
    fn fixed_point_divergence() {
        let one = Vec3::new(1.0, 1.0, 1.0);
        let err = fixed_point_solve(Vec3::ZERO, |w| Ok(w * 2.0 + one), &SolverParams::default()).unwrap_err();
        assert!(err.is_divergence());
    }

    #[test]
    fn fixed_point_propagates_map_errors() {
        let err = fixed_point_solve(Vec3::ZERO, |_| Err(Error::config("boom")), &SolverParams::default())
            .unwrap_err();
        assert!(err.is_config());
    }

    #[test]
    fn solver_params_validation() {
        assert!(SolverParams::new(0.0, 10).is_err());
        assert!(SolverParams::new(1e-12, 0).is_err());
        assert!(SolverParams::new(1e-12, 1).is_ok());
    }

    #[test]
    fn zero_step_rejected() {
        assert!(MethodSpec::new(MethodKind::Epgl(2), 0.0).unwrap_err().is_config());
        assert!(MethodSpec::new(MethodKind::Epgl(4), 0.1).unwrap_err().is_config());
    }

    #[test]
    fn method_labels_round_trip() {
        for kind in [MethodKind::Boris, MethodKind::EpExact, MethodKind::Epgl(1), MethodKind::Epgl(2), MethodKind::Epgl(3)] {
            assert_eq!(kind.label().parse::<MethodKind>().unwrap(), kind);
        }
        assert!("ep4".parse::<MethodKind>().is_err());
    }

    #[test]
    fn free_flight_is_exact() {
        let m = builtin_model("free-flight").unwrap();
        let s = ParticleState::new(Vec3::new(1.0, 2.0, 3.0), Vec3::new(0.5, -1.0, 0.25), 0.0);
        for kind in [MethodKind::Epgl(1), MethodKind::Epgl(3), MethodKind::EpExact] {
            let method = MethodSpec::new(kind, 0.3).unwrap();
            let r = ep_step(&s, m.as_ref(), &method, &SolverParams::default()).unwrap();
            assert_eq!(r.iters, 1);
            assert_eq!(r.state.v, s.v);
            assert!((r.state.x - (s.x + s.v * 0.3)).max_abs() < 1e-15);
        }
        let b = boris_step(&s, m.as_ref(), 0.3).unwrap();
        assert_eq!(b.x, s.x + s.v * 0.3);
        assert_eq!(b.v, s.v);
    }

    #[test]
    fn constant_field_speed_is_preserved() {
        let m = UniformMagneticModel::new(1.0);
        let s = ParticleState::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), 0.0);
        let method = MethodSpec::new(MethodKind::Epgl(2), 0.1).unwrap();
        let r = ep_step(&s, &m, &method, &SolverParams::default()).unwrap();
        assert!((r.state.v.norm() - 1.0).abs() < 1e-13);

        let b = boris_step(&s, &m, 0.1).unwrap();
        assert!((b.v.norm() - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn sec6_single_step_energy_and_reversal() {
        let m = AxialModel;
        let s0 = sec6_state();
        let e0 = energy(s0.x, s0.v, &m).unwrap();
        assert!((e0 - 0.0353).abs() < 1e-15);
        let solver = SolverParams::default();
        let fwd = MethodSpec::new(MethodKind::Epgl(2), 1.0 / 64.0).unwrap();
        let s1 = ep_step(&s0, &m, &fwd, &solver).unwrap().state;
        assert!((energy(s1.x, s1.v, &m).unwrap() - e0).abs() <= 1e-12);
        let back = ep_step(&s1, &m, &fwd.with_step(-1.0 / 64.0), &solver).unwrap().state;
        assert!(back.phase_distance(&s0) <= 1e-10);
        assert!(back.t.abs() < 1e-15);
    }

    #[test]
    fn position_update_is_the_reduced_form() {
        let m = AxialModel;
        let s0 = sec6_state();
        let h = 0.1;
        let method = MethodSpec::new(MethodKind::Epgl(3), h).unwrap();
        let r = ep_step(&s0, &m, &method, &SolverParams::default()).unwrap();
        let (x1, v1) = (r.state.x, r.state.v);
        assert!((x1 - s0.x - (s0.v + v1) * (h / 2.0)).max_abs() <= 1e-15);
        // the unreduced update x₊ = xₙ + h vₙ + h²/2 (𝔉 + B̃(mid) v̄)
        let rule = gauss_legendre_rule(3).unwrap();
        let f = average_force_quadrature(&m, s0.x, x1, &rule).unwrap();
        let b = m.magnetic_field(s0.x.midpoint(x1)).unwrap();
        let full = s0.x + s0.v * h + (f + btilde_apply(b, s0.v.midpoint(v1))) * (h * h / 2.0);
        assert!((full - x1).max_abs() <= 1e-14);
    }

    #[test]
    fn ep_exact_requires_ridge() {
        let method = MethodSpec::new(MethodKind::EpExact, 0.1).unwrap();
        let err = ep_step(&sec6_state(), &AxialModel, &method, &SolverParams::default()).unwrap_err();
        assert!(err.is_config());
    }

    #[test]
    fn ep_step_divergence_reports_residual() {
        let m = UniformMagneticModel::new(50.0);
        let s = ParticleState::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), 0.0);
        let method = MethodSpec::new(MethodKind::Epgl(1), 1.0).unwrap();
        let err = ep_step(&s, &m, &method, &SolverParams::default()).unwrap_err();
        match err {
            Error::Divergence { residual, .. } => assert!(residual > 0.0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn boris_is_second_order() {
        let m = AxialModel;
        let s0 = sec6_state();
        let solver = SolverParams::new(1e-15, 200).unwrap();
        let reference = {
            let method = MethodSpec::new(MethodKind::Epgl(3), 1.0 / 4096.0).unwrap();
            integrate(&s0, &m, &method, &solver, 1.0, 4096).unwrap().final_state()
        };
        let err = |h: f64| {
            let method = MethodSpec::new(MethodKind::Boris, h).unwrap();
            integrate(&s0, &m, &method, &solver, 1.0, 1_000_000)
                .unwrap()
                .final_state()
                .phase_distance(&reference)
        };
        let ratio = err(1.0 / 32.0) / err(1.0 / 64.0);
        assert!((3.4..4.6).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn boris_is_time_reversible() {
        let m = AxialModel;
        let s0 = sec6_state();
        let s1 = boris_step(&s0, &m, 0.1).unwrap();
        let back = boris_step(&s1, &m, -0.1).unwrap();
        assert!(back.phase_distance(&s0) < 1e-14);
    }

    #[test]
    fn step_count_rounding() {
        assert_eq!(step_count(0.0, 1.0, 0.25).unwrap(), 4);
        assert_eq!(step_count(0.0, 1.0, 0.1).unwrap(), 10);
        assert_eq!(step_count(0.0, 1.0, 0.3).unwrap(), 3);
        assert_eq!(step_count(0.0, 0.0, 0.3).unwrap(), 0);
        assert_eq!(step_count(1.0, 0.0, -0.25).unwrap(), 4);
        assert!(step_count(1.0, 0.0, 0.25).is_err());
    }

    #[test]
    fn integrate_zero_horizon() {
        let m = AxialModel;
        let method = MethodSpec::new(MethodKind::Epgl(1), 0.1).unwrap();
        let rec = integrate(&sec6_state(), &m, &method, &SolverParams::default(), 0.0, 1).unwrap();
        assert_eq!(rec.samples().len(), 1);
        assert_eq!(rec.steps(), 0);
    }

    #[test]
    fn integrate_free_flight() {
        let m = builtin_model("free-flight").unwrap();
        let s0 = ParticleState::new(Vec3::new(1.0, 0.0, -1.0), Vec3::new(0.3, 0.2, 0.1), 0.0);
        for kind in [MethodKind::Boris, MethodKind::Epgl(2), MethodKind::EpExact] {
            let method = MethodSpec::new(kind, 0.25).unwrap();
            let rec = integrate(&s0, m.as_ref(), &method, &SolverParams::default(), 1.0, 1).unwrap();
            assert_eq!(rec.steps(), 4);
            assert_eq!(rec.samples().len(), 5);
            let last = rec.final_state();
            assert_eq!(last.t, 1.0);
            assert!((last.x - (s0.x + s0.v)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn integrate_truncates_partial_step() {
        let m = builtin_model("free-flight").unwrap();
        let method = MethodSpec::new(MethodKind::Epgl(1), 0.3).unwrap();
        let rec = integrate(&sec6_state(), m.as_ref(), &method, &SolverParams::default(), 1.0, 10).unwrap();
        assert_eq!(rec.steps(), 3);
        assert!((rec.final_state().t - 0.9).abs() < 1e-15);
        // initial sample plus the final one
        assert_eq!(rec.samples().len(), 2);
    }

    #[test]
    fn integrate_reports_partial_record_on_failure() {
        struct HalfSpace;
        impl FieldModel for HalfSpace {
            fn name(&self) -> &str {
                "half-space"
            }
            fn magnetic_field(&self, _x: Vec3) -> Result<Vec3> {
                Ok(Vec3::ZERO)
            }
            fn potential(&self, x: Vec3) -> Result<f64> {
                self.force(x).map(|_| 0.0)
            }
            fn force(&self, x: Vec3) -> Result<Vec3> {
                if x.e1 < 0.0 {
                    return Err(Error::Domain { point: x, reason: "x1 < 0".into() });
                }
                Ok(Vec3::ZERO)
            }
        }
        let m = HalfSpace;
        let s0 = ParticleState::new(Vec3::new(0.6, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0), 0.0);
        let method = MethodSpec::new(MethodKind::Boris, 0.25).unwrap();
        let err = integrate(&s0, &m, &method, &SolverParams::default(), 1.0, 1).unwrap_err();
        assert_eq!(err.step, 3);
        assert!(matches!(err.source.root(), Error::Domain { .. }));
        assert_eq!(err.partial.samples().len(), err.step);
    }

    #[test]
    fn integrate_rejects_bad_config() {
        let m = FnModel::new("zero", |_| 0.0, |_| Vec3::ZERO);
        let method = MethodSpec::new(MethodKind::Epgl(1), 0.1).unwrap();
        let err = integrate(&sec6_state(), &m, &method, &SolverParams::default(), 1.0, 0).unwrap_err();
        assert!(err.source.is_config());
        let ep_exact = MethodSpec::new(MethodKind::EpExact, 0.1).unwrap();
        let err = integrate(&sec6_state(), &m, &ep_exact, &SolverParams::default(), 1.0, 1).unwrap_err();
        assert!(err.source.is_config());
    }
}
