//! Run configuration: strict JSON schema and validation.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Vector3};
use serde::Deserialize;
use thiserror::Error;

use string_pendulum::lgvi::SolverOptions;
use string_pendulum::model::{
    Discretization, InitialConditions, NodeLayout, PhysicalParams, VelocityProfile, DEFAULT_GRAVITY,
};
use string_pendulum::so3::Rotation;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("`{field}` {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error(transparent)]
    Model(#[from] string_pendulum::Error),
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    #[default]
    Lgvi,
    Reference,
    Both,
}

impl Integrator {
    pub fn runs_lgvi(self) -> bool {
        matches!(self, Integrator::Lgvi | Integrator::Both)
    }

    pub fn runs_reference(self) -> bool {
        matches!(self, Integrator::Reference | Integrator::Both)
    }
}

/// A fully validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: PhysicalParams,
    pub n_elements: usize,
    pub h: f64,
    pub duration: f64,
    pub initial: InitialConditions,
    pub solver: SolverOptions,
    pub series_stride: usize,
    pub snapshot_stride: usize,
    pub out_dir: PathBuf,
    pub integrator: Integrator,
}

impl RunConfig {
    pub fn discretization(&self) -> Discretization {
        Discretization::new(&self.params, self.n_elements, self.h).expect("validated at load")
    }

    /// Number of steps `K = T/h`.
    pub fn steps(&self) -> usize {
        (self.duration / self.h).round() as usize
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mu_bar: f64,
    l: f64,
    #[serde(rename = "EA")]
    ea: f64,
    #[serde(rename = "M")]
    body_mass: f64,
    rho_c: [f64; 3],
    #[serde(rename = "J")]
    inertia: [[f64; 3]; 3],
    #[serde(default = "default_gravity")]
    g: f64,
    #[serde(rename = "N")]
    n: usize,
    h: f64,
    #[serde(rename = "T")]
    duration: f64,
    initial: RawInitial,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    output: RawOutput,
}

fn default_gravity() -> f64 {
    DEFAULT_GRAVITY
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawLayout {
    StraightE1,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawAttitude {
    Identity,
}

#[derive(Debug, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
enum RawProfile {
    #[default]
    TipOnly,
    LinearRamp,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    layout: RawLayout,
    body_velocity: [f64; 3],
    body_omega: [f64; 3],
    attitude: RawAttitude,
    #[serde(default)]
    velocity_profile: RawProfile,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawSolver {
    fixed_point_tol: f64,
    newton_tol: f64,
    max_fixed_point_iters: usize,
    max_newton_iters: usize,
}

impl Default for RawSolver {
    fn default() -> Self {
        let d = SolverOptions::default();
        RawSolver {
            fixed_point_tol: d.fixed_point_tol,
            newton_tol: d.newton_tol,
            max_fixed_point_iters: d.max_fixed_point_iters,
            max_newton_iters: d.max_newton_iters,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawOutput {
    series_stride: usize,
    snapshot_stride: usize,
}

impl Default for RawOutput {
    fn default() -> Self {
        RawOutput {
            series_stride: 100,
            snapshot_stride: 1000,
        }
    }
}

/// Parses and validates a configuration document. The output directory and
/// integrator take their defaults (`out`, LGVI only).
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let params = PhysicalParams {
        mu_bar: raw.mu_bar,
        length: raw.l,
        axial_stiffness: raw.ea,
        body_mass: raw.body_mass,
        rho_c: Vector3::from(raw.rho_c),
        inertia: Matrix3::from_fn(|i, j| raw.inertia[i][j]),
        gravity: raw.g,
    };
    params.validate()?;
    Discretization::new(&params, raw.n, raw.h)?;
    if !(raw.duration.is_finite() && raw.duration > 0.0) {
        return Err(invalid("T", format!("must be finite and > 0, got {}", raw.duration)));
    }
    let steps = (raw.duration / raw.h).round();
    if steps < 1.0 || (steps * raw.h - raw.duration).abs() > 1e-9 * raw.duration {
        return Err(invalid("T", format!("must be a positive multiple of h = {}", raw.h)));
    }
    if steps > u32::MAX as f64 {
        return Err(invalid("T", "implies too many steps"));
    }

    let finite = |v: &[f64; 3]| v.iter().all(|c| c.is_finite());
    if !finite(&raw.initial.body_velocity) {
        return Err(invalid("initial.body_velocity", "must be finite"));
    }
    if !finite(&raw.initial.body_omega) {
        return Err(invalid("initial.body_omega", "must be finite"));
    }
    let RawLayout::StraightE1 = raw.initial.layout;
    let RawAttitude::Identity = raw.initial.attitude;
    let initial = InitialConditions {
        layout: NodeLayout::StraightE1,
        body_velocity: Vector3::from(raw.initial.body_velocity),
        body_omega: Vector3::from(raw.initial.body_omega),
        attitude: Rotation::identity(),
        velocity_profile: match raw.initial.velocity_profile {
            RawProfile::TipOnly => VelocityProfile::TipOnly,
            RawProfile::LinearRamp => VelocityProfile::LinearRamp,
        },
    };

    let solver = SolverOptions {
        fixed_point_tol: raw.solver.fixed_point_tol,
        newton_tol: raw.solver.newton_tol,
        max_fixed_point_iters: raw.solver.max_fixed_point_iters,
        max_newton_iters: raw.solver.max_newton_iters,
    };
    solver.validate()?;

    if raw.output.series_stride == 0 {
        return Err(invalid("output.series_stride", "must be ≥ 1"));
    }
    if raw.output.snapshot_stride == 0 {
        return Err(invalid("output.snapshot_stride", "must be ≥ 1"));
    }

    Ok(RunConfig {
        params,
        n_elements: raw.n,
        h: raw.h,
        duration: raw.duration,
        initial,
        solver,
        series_stride: raw.output.series_stride,
        snapshot_stride: raw.output.snapshot_stride,
        out_dir: PathBuf::from("out"),
        integrator: Integrator::Lgvi,
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
