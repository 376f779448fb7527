//! Pre-configured experiments (global-error convergence and long-time drift)
//! plus model validation.
//!
//! Cells (method × step size × horizon) are independent and run in parallel;
//! results are always reported in configuration order, so output files do not
//! depend on scheduling.

use std::fs;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::diagnostics::{
    global_error, invariance_check, max_drift, reference_oracle, reference_solver, reference_steps, Quantity,
    TrajectoryRecord,
};
use crate::error::{Error, Result};
use crate::geometry::{ParticleState, Vec3};
use crate::integrators::{integrate, MethodKind, MethodSpec, SolverParams};
use crate::model::{builtin_model, consistency_check, FieldModel, DEFAULT_FD_TOLERANCE};
use crate::output::{fmt_f64, write_trajectory_csv, Manifest};
use crate::quadrature::gauss_legendre_rule;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Stepsizes `2^-6 … 2^-9` of the convergence study.
pub fn default_convergence_stepsizes() -> Vec<f64> {
    (6..=9).map(|i| 0.5f64.powi(i)).collect()
}

pub fn default_methods() -> Vec<MethodKind> {
    vec![
        MethodKind::Boris,
        MethodKind::Epgl(1),
        MethodKind::Epgl(2),
        MethodKind::Epgl(3),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: String,
    pub methods: Vec<MethodKind>,
    pub stepsizes: Vec<f64>,
    pub horizons: Vec<f64>,
    /// Sampling stride for long-time runs; `None` samples every `⌈1/h⌉` steps.
    pub sample_every: Option<usize>,
    pub solver: SolverParams,
    pub out_dir: Option<PathBuf>,
    /// Defaults to the model's own initial state.
    pub initial_state: Option<ParticleState>,
}

impl ExperimentConfig {
    /// Global-error study: T ∈ {10, 100, 1000}, h = 2^-6 … 2^-9.
    pub fn convergence_defaults() -> Self {
        Self {
            model: "paper-sec6".to_string(),
            methods: default_methods(),
            stepsizes: default_convergence_stepsizes(),
            horizons: vec![10.0, 100.0, 1000.0],
            sample_every: None,
            solver: SolverParams::default(),
            out_dir: None,
            initial_state: None,
        }
    }

    /// Long-time drift study: h ∈ {0.1, 0.05} on [0, 10⁴].
    pub fn longtime_defaults() -> Self {
        Self {
            stepsizes: vec![0.1, 0.05],
            horizons: vec![10_000.0],
            ..Self::convergence_defaults()
        }
    }

    /// Long-time study shortened to T = 10³.
    pub fn longtime_ci() -> Self {
        Self {
            horizons: vec![1000.0],
            ..Self::longtime_defaults()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::config("method list is empty"));
        }
        if self.stepsizes.is_empty() || self.stepsizes.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::config("stepsizes must be a non-empty list of positive numbers"));
        }
        if self.horizons.is_empty() || self.horizons.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::config("horizons must be a non-empty list of positive numbers"));
        }
        if self.sample_every == Some(0) {
            return Err(Error::config("sample_every must be at least 1"));
        }
        self.solver.validate()?;
        for &kind in &self.methods {
            MethodSpec::new(kind, 1.0)?;
        }
        Ok(())
    }

    fn resolve(&self) -> Result<(Box<dyn FieldModel>, ParticleState)> {
        self.validate()?;
        let model = builtin_model(&self.model)?;
        let state0 = match self.initial_state.or_else(|| model.default_initial_state()) {
            Some(s) => s,
            None => return Err(Error::config(format!("model '{}' needs an initial state", self.model))),
        };
        Ok((model, state0))
    }

    fn manifest(&self, experiment: &str, state0: &ParticleState) -> Manifest {
        let mut m = Manifest::new();
        let list = |v: &[f64]| v.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(",");
        m.insert("experiment", experiment);
        m.insert("code_version", CODE_VERSION);
        m.insert("model", &self.model);
        m.insert(
            "methods",
            self.methods.iter().map(|k| k.label()).collect::<Vec<_>>().join(","),
        );
        m.insert("stepsizes", list(&self.stepsizes));
        m.insert("horizons", list(&self.horizons));
        m.insert("x0", list(&state0.x.to_array()));
        m.insert("v0", list(&state0.v.to_array()));
        m.insert("t0", fmt_f64(state0.t));
        m.insert("solver_tol", fmt_f64(self.solver.tol));
        m.insert("solver_max_iters", self.solver.max_iters);
        m
    }
}

/// Long-time sampling stride: about once per unit time.
pub fn longtime_stride(h: f64) -> usize {
    ((1.0 / h).ceil() as usize).max(1)
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<fs::File>) -> io::Result<()>) -> Result<()> {
    let io_err = |e: io::Error| Error::config(format!("cannot write {}: {e}", path.display()));
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(io_err)?;
    io::Write::flush(&mut w).map_err(io_err)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::config(format!("cannot create {}: {e}", dir.display())))
}

/// Outcome of one experiment cell; failures keep their message.
pub type CellStatus = std::result::Result<(), String>;

fn status_text(status: &CellStatus) -> String {
    match status {
        Ok(()) => "ok".to_string(),
        Err(msg) => format!("failed: {msg}"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub method: MethodKind,
    pub t_end: f64,
    pub h: f64,
    pub global_error: Option<f64>,
    /// `log(e(h_prev)/e(h)) / log(h_prev/h)` against the previous stepsize
    /// of the same method and horizon; `log₂` of the error ratio for halving.
    pub observed_order: Option<f64>,
    pub status: CellStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub manifest: Manifest,
}

impl ConvergenceTable {
    pub fn failures(&self) -> impl Iterator<Item = &ConvergenceRow> {
        self.rows.iter().filter(|r| r.status.is_err())
    }

    pub fn row(&self, method: MethodKind, t_end: f64, h: f64) -> Option<&ConvergenceRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.t_end == t_end && r.h == h)
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        let mut s = String::from("method,T,h,global_error,observed_order,status\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.method,
                fmt_f64(r.t_end),
                fmt_f64(r.h),
                opt(r.global_error),
                opt(r.observed_order),
                status_text(&r.status).replace(',', ";"),
            ));
        }
        s
    }
}

/// Integrates every (method, T, h) cell and compares the endpoint with
/// [`reference_oracle`]. Cell failures are recorded and the run continues.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ConvergenceTable> {
    let (model, state0) = config.resolve()?;
    let model = model.as_ref();

    let oracles: Vec<std::result::Result<TrajectoryRecord, String>> = config
        .horizons
        .par_iter()
        .map(|&t| reference_oracle(&state0, model, state0.t + t).map_err(|e| format!("reference: {e}")))
        .collect();

    let cells: Vec<(usize, MethodKind, f64)> = config
        .methods
        .iter()
        .flat_map(|&kind| {
            (0..config.horizons.len()).flat_map(move |ti| config.stepsizes.iter().map(move |&h| (ti, kind, h)))
        })
        .collect();

    let errors: Vec<std::result::Result<f64, String>> = cells
        .par_iter()
        .map(|&(ti, kind, h)| {
            let oracle = oracles[ti].as_ref().map_err(Clone::clone)?;
            let method = MethodSpec::new(kind, h).map_err(|e| e.to_string())?;
            let t_end = state0.t + config.horizons[ti];
            let rec = integrate(&state0, model, &method, &config.solver, t_end, usize::MAX)
                .map_err(|e| e.to_string())?;
            global_error(&rec, oracle).map_err(|e| e.to_string())
        })
        .collect();

    let mut rows = Vec::with_capacity(cells.len());
    for (i, (&(ti, kind, h), err)) in cells.iter().zip(errors).enumerate() {
        let first_of_group = i % config.stepsizes.len() == 0;
        let observed_order = match (&err, first_of_group) {
            (Ok(e), false) => {
                let prev: &ConvergenceRow = rows.last().expect("previous row exists");
                prev.global_error
                    .map(|pe| (pe / e).ln() / (prev.h / h).ln())
                    .filter(|o| o.is_finite())
            }
            _ => None,
        };
        rows.push(ConvergenceRow {
            method: kind,
            t_end: config.horizons[ti],
            h,
            global_error: err.as_ref().ok().copied(),
            observed_order,
            status: err.map(|_| ()),
        });
    }

    let mut manifest = config.manifest("convergence", &state0);
    for &t in &config.horizons {
        let (n, h_ref) = reference_steps(0.0, t);
        manifest.insert(
            format!("reference_T{}", fmt_f64(t)),
            format!(
                "ep3 h={} steps={} tol={}",
                fmt_f64(h_ref),
                n,
                fmt_f64(reference_solver().tol)
            ),
        );
    }
    for r in &rows {
        manifest.insert(
            format!("cell {} T={} h={}", r.method, fmt_f64(r.t_end), fmt_f64(r.h)),
            status_text(&r.status),
        );
    }
    let table = ConvergenceTable { rows, manifest };

    if let Some(dir) = &config.out_dir {
        ensure_dir(dir)?;
        let csv = table.to_csv();
        write_file(&dir.join("convergence.csv"), |w| io::Write::write_all(w, csv.as_bytes()))?;
        let manifest = table.manifest.render();
        write_file(&dir.join("manifest.txt"), |w| io::Write::write_all(w, manifest.as_bytes()))?;
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LongtimeRow {
    pub method: MethodKind,
    pub h: f64,
    pub t_end: f64,
    pub max_energy_drift: Option<f64>,
    pub max_momentum_drift: Option<f64>,
    pub max_fp_iters: usize,
    /// CSV file written for this cell, relative to the output directory.
    pub file: String,
    pub status: CellStatus,
}

#[derive(Debug, Clone)]
pub struct LongtimeSummary {
    pub rows: Vec<LongtimeRow>,
    pub manifest: Manifest,
    /// Full records, in row order; failed cells keep their partial record.
    pub records: Vec<TrajectoryRecord>,
}

impl LongtimeSummary {
    pub fn failures(&self) -> impl Iterator<Item = &LongtimeRow> {
        self.rows.iter().filter(|r| r.status.is_err())
    }

    pub fn row(&self, method: MethodKind, h: f64, t_end: f64) -> Option<&LongtimeRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.h == h && r.t_end == t_end)
    }
}

/// File name of a long-time cell's trajectory CSV.
pub fn longtime_file_name(method: MethodKind, h: f64, t_end: f64) -> String {
    format!("longtime_{}_h{}_T{}.csv", method.label(), fmt_f64(h), fmt_f64(t_end))
}

/// Integrates every (method, h, T) cell, recording energy and momentum drift.
/// With an output directory, writes one trajectory CSV per cell and a manifest.
pub fn run_longtime(config: &ExperimentConfig) -> Result<LongtimeSummary> {
    let (model, state0) = config.resolve()?;
    let model = model.as_ref();
    if let Some(dir) = &config.out_dir {
        ensure_dir(dir)?;
    }

    let cells: Vec<(MethodKind, f64, f64)> = config
        .methods
        .iter()
        .flat_map(|&kind| {
            config
                .stepsizes
                .iter()
                .flat_map(move |&h| config.horizons.iter().map(move |&t| (kind, h, t)))
        })
        .collect();

    let results: Vec<(LongtimeRow, TrajectoryRecord)> = cells
        .par_iter()
        .map(|&(kind, h, t_end)| {
            let stride = config.sample_every.unwrap_or_else(|| longtime_stride(h));
            let file = longtime_file_name(kind, h, t_end);
            let mut row = LongtimeRow {
                method: kind,
                h,
                t_end,
                max_energy_drift: None,
                max_momentum_drift: None,
                max_fp_iters: 0,
                file: file.clone(),
                status: Ok(()),
            };
            let method = match MethodSpec::new(kind, h) {
                Ok(m) => m,
                Err(e) => {
                    let placeholder = MethodSpec { kind, h };
                    row.status = Err(e.to_string());
                    return (row, TrajectoryRecord::new(model.name(), placeholder));
                }
            };
            let record = match integrate(&state0, model, &method, &config.solver, state0.t + t_end, stride) {
                Ok(rec) => rec,
                Err(e) => {
                    row.status = Err(e.to_string());
                    *e.partial
                }
            };
            row.max_energy_drift = max_drift(&record, Quantity::Energy).ok();
            row.max_momentum_drift = max_drift(&record, Quantity::Momentum).ok();
            row.max_fp_iters = record.max_fp_iters();
            if let Some(dir) = &config.out_dir {
                if let Err(e) = write_file(&dir.join(&file), |w| write_trajectory_csv(&record, w)) {
                    if row.status.is_ok() {
                        row.status = Err(e.to_string());
                    }
                }
            }
            (row, record)
        })
        .collect();

    let (rows, records): (Vec<_>, Vec<_>) = results.into_iter().unzip();

    let mut manifest = config.manifest("longtime", &state0);
    manifest.insert(
        "sample_every",
        config
            .sample_every
            .map(|s| s.to_string())
            .unwrap_or_else(|| "ceil(1/h)".to_string()),
    );
    for r in &rows {
        manifest.insert(
            format!("cell {} h={} T={}", r.method, fmt_f64(r.h), fmt_f64(r.t_end)),
            format!("{} file={}", status_text(&r.status), r.file),
        );
    }
    if let Some(dir) = &config.out_dir {
        let text = manifest.render();
        write_file(&dir.join("manifest.txt"), |w| io::Write::write_all(w, text.as_bytes()))?;
    }
    Ok(LongtimeSummary {
        rows,
        manifest,
        records,
    })
}

/// Off-axis probe points used by [`validate_model`].
pub fn standard_probes() -> Vec<Vec3> {
    vec![
        Vec3::new(0.0, 1.0, 0.1),
        Vec3::new(0.7, -0.4, 0.3),
        Vec3::new(-1.2, 0.5, -0.2),
        Vec3::new(0.3, 0.9, 2.0),
        Vec3::new(-0.6, -0.8, 0.0),
    ]
}

pub fn standard_taus() -> Vec<f64> {
    vec![0.0, 0.7, -1.3, std::f64::consts::FRAC_PI_2, 2.5]
}

pub const INVARIANCE_TOLERANCE: f64 = 1e-12;
pub const QUADRATURE_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationCheck {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl ValidationCheck {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
    /// Checks that could not run for this model.
    pub skipped: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(ValidationCheck::passed)
    }
}

/// Runs the finite-difference consistency checks, the invariance check and
/// the Gauss-Legendre exactness checks.
pub fn validate_model(model: &dyn FieldModel, probes: &[Vec3], fd_step: f64) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    let mut push = |name: &str, value: f64, tolerance: f64| {
        report.checks.push(ValidationCheck {
            name: name.to_string(),
            value,
            tolerance,
        })
    };

    let consistency = consistency_check(model, probes, fd_step)?;
    push("force = -grad U", consistency.force_residual, DEFAULT_FD_TOLERANCE);
    if let Some(c) = consistency.curl_residual {
        push("curl A = B", c, DEFAULT_FD_TOLERANCE);
    }

    let invariance = match model.symmetry() {
        Some(s) if model.has_vector_potential() => Some(invariance_check(model, &s, probes, &standard_taus())?),
        _ => None,
    };
    if let Some(inv) = invariance {
        push("U rotation invariance", inv.potential_deviation, INVARIANCE_TOLERANCE);
        push("A rotation invariance", inv.vector_potential_deviation, INVARIANCE_TOLERANCE);
    }

    for s in 1..=3 {
        let rule = gauss_legendre_rule(s)?;
        let worst = (0..2 * s as i32)
            .map(|k| (rule.integrate(|t| t.powi(k)) - 1.0 / (k as f64 + 1.0)).abs())
            .fold(0.0, f64::max);
        push(&format!("gauss-legendre s={s} exactness"), worst, QUADRATURE_TOLERANCE);
    }

    if !model.has_vector_potential() {
        report.skipped.push("curl A = B (no vector potential)".to_string());
    }
    if invariance.is_none() {
        report.skipped.push("rotation invariance (no symmetry generator or vector potential)".to_string());
    }
    Ok(report)
}
