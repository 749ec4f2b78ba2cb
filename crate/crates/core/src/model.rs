//! Physical parameters, the finite-element discretization of the string, and
//! the state containers shared by both integrators.
//!
//! Node `0` is the fixed pivot and node `N` carries the rigid body. Element
//! `a` joins nodes `a` and `a + 1`. Gravity acts along `+e₃`; positive `e₃`
//! points down.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::so3::{AxialVector, Rotation};

/// Gravitational acceleration used when none is given (m/s²).
pub const DEFAULT_GRAVITY: f64 = 9.81;

/// Element length below which the elastic model is singular (m).
pub const COLLAPSE_TOL: f64 = 1e-12;

/// Unit vector of the gravity direction.
pub fn gravity_direction() -> Vector3<f64> {
    Vector3::z()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    /// Mass per unit unstretched length (kg/m).
    pub mu_bar: f64,
    /// Unstretched string length (m).
    pub length: f64,
    /// Axial stiffness EA (N).
    pub axial_stiffness: f64,
    /// Rigid body mass (kg).
    pub body_mass: f64,
    /// Attachment point to center of mass, body frame (m).
    pub rho_c: Vector3<f64>,
    /// Inertia about the attachment point, body frame (kg·m²).
    pub inertia: Matrix3<f64>,
    /// Gravitational acceleration (m/s²).
    pub gravity: f64,
}

impl PhysicalParams {
    /// Rubber string with an elliptic-cylinder body: 0.025 kg/m, 1 m,
    /// EA = 40 N, 0.1 kg, offset (0.04, 0.01, 0.05) m.
    pub fn rubber_string() -> Self {
        PhysicalParams {
            mu_bar: 0.025,
            length: 1.0,
            axial_stiffness: 40.0,
            body_mass: 0.1,
            rho_c: Vector3::new(0.04, 0.01, 0.05),
            inertia: Matrix3::new(
                0.38, -0.04, -0.20, //
                -0.04, 0.58, -0.05, //
                -0.20, -0.05, 0.30,
            ),
            gravity: DEFAULT_GRAVITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("mu_bar", self.mu_bar)?;
        positive("l", self.length)?;
        positive("EA", self.axial_stiffness)?;
        positive("M", self.body_mass)?;
        if !(self.gravity.is_finite() && self.gravity >= 0.0) {
            return Err(Error::invalid(
                "g",
                format!("must be finite and ≥ 0, got {}", self.gravity),
            ));
        }
        if !self.rho_c.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("rho_c", "entries must be finite"));
        }
        let j = &self.inertia;
        if !j.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("J", "entries must be finite"));
        }
        let asym = (j - j.transpose()).norm();
        if asym > 1e-12 {
            return Err(Error::invalid("J", format!("must be symmetric (‖J − Jᵀ‖ = {asym:e})")));
        }
        if j.cholesky().is_none() {
            return Err(Error::invalid("J", "must be positive definite"));
        }
        if nonstandard_inertia(j).cholesky().is_none() {
            return Err(Error::invalid(
                "J",
                "principal moments violate the triangle inequality (½tr(J)·I − J is not positive definite)",
            ));
        }
        Ok(())
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and > 0, got {value}")))
    }
}

/// `J_d = ½ tr(J) I − J`.
pub fn nonstandard_inertia(j: &Matrix3<f64>) -> Matrix3<f64> {
    Matrix3::identity() * (0.5 * j.trace()) - j
}

/// Element count, time step, and the per-element constants derived from
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    n_elements: usize,
    h: f64,
    element_length: f64,
    element_mass: f64,
    element_stiffness: f64,
    j_d: Matrix3<f64>,
}

impl Discretization {
    pub fn new(params: &PhysicalParams, n_elements: usize, h: f64) -> Result<Self> {
        params.validate()?;
        if n_elements < 2 {
            return Err(Error::invalid("N", format!("must be ≥ 2, got {n_elements}")));
        }
        positive("h", h)?;
        let u = params.length / n_elements as f64;
        Ok(Discretization {
            n_elements,
            h,
            element_length: u,
            element_mass: params.mu_bar * u,
            element_stiffness: params.axial_stiffness / u,
            j_d: nonstandard_inertia(&params.inertia),
        })
    }

    /// Number of elements `N`; there are `N + 1` nodes.
    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn n_nodes(&self) -> usize {
        self.n_elements + 1
    }

    /// Time step `h` (s).
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Unstretched element length `u = l/N` (m).
    pub fn element_length(&self) -> f64 {
        self.element_length
    }

    /// Element mass `m = μ̄u` (kg).
    pub fn element_mass(&self) -> f64 {
        self.element_mass
    }

    /// Element stiffness `κ = EA/u` (N/m).
    pub fn element_stiffness(&self) -> f64 {
        self.element_stiffness
    }

    pub fn j_d(&self) -> &Matrix3<f64> {
        &self.j_d
    }

    /// Same spatial discretization with a different time step.
    pub fn with_time_step(&self, h: f64) -> Result<Self> {
        positive("h", h)?;
        Ok(Discretization { h, ..self.clone() })
    }
}

/// Gradient of the element energy `½κ(‖x‖ − u)²` with respect to the
/// element vector `x = r_{a+1} − r_a`.
pub fn elastic_force_gradient(x: &Vector3<f64>, disc: &Discretization) -> Result<Vector3<f64>> {
    let len = x.norm();
    if len.is_nan() || len <= COLLAPSE_TOL {
        return Err(Error::CollapsedElement {
            element: None,
            length: len,
        });
    }
    Ok(x * (disc.element_stiffness * (len - disc.element_length) / len))
}

/// Elastic gradients of every element of `nodes`.
pub(crate) fn element_gradients(nodes: &[Vector3<f64>], disc: &Discretization) -> Result<Vec<Vector3<f64>>> {
    nodes
        .windows(2)
        .enumerate()
        .map(|(a, w)| {
            elastic_force_gradient(&(w[1] - w[0]), disc).map_err(|e| match e {
                Error::CollapsedElement { length, .. } => Error::CollapsedElement {
                    element: Some(a),
                    length,
                },
                e => e,
            })
        })
        .collect()
}

/// A point `g_k` of the discrete configuration space.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub nodes: Vec<Vector3<f64>>,
    pub attitude: Rotation,
}

impl Configuration {
    /// `g · f`: translate every node and right-multiply the attitude.
    pub fn advance(&self, f: &Update) -> Configuration {
        let nodes = self.nodes.iter().zip(&f.deltas).map(|(r, d)| r + d).collect();
        Configuration {
            nodes,
            attitude: f.apply_to(&self.attitude),
        }
    }

    pub fn body_node(&self) -> &Vector3<f64> {
        self.nodes.last().expect("configuration has nodes")
    }

    pub(crate) fn check_pivot(&self) -> Result<()> {
        match self.nodes.first() {
            Some(r) if *r == Vector3::zeros() => Ok(()),
            Some(r) => Err(Error::InvalidInitialCondition(format!(
                "pivot node must be at the origin, found {:?}",
                r.as_slice()
            ))),
            None => Err(Error::InvalidInitialCondition("configuration has no nodes".into())),
        }
    }
}

/// A group element `f_k` advancing `g_k` to `g_{k+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Update {
    pub deltas: Vec<Vector3<f64>>,
    pub rotation: Rotation,
}

impl Update {
    pub fn identity(n_nodes: usize) -> Self {
        Update {
            deltas: vec![Vector3::zeros(); n_nodes],
            rotation: Rotation::identity(),
        }
    }

    /// `R · F`.
    pub fn apply_to(&self, r: &Rotation) -> Rotation {
        r.compose_near_identity(&self.rotation)
    }
}

/// Positions, velocities, attitude and body angular velocity at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousState {
    pub nodes: Vec<Vector3<f64>>,
    pub velocities: Vec<Vector3<f64>>,
    pub attitude: Rotation,
    /// Body-frame angular velocity Ω (rad/s).
    pub omega: AxialVector,
}

impl ContinuousState {
    pub fn configuration(&self) -> Configuration {
        Configuration {
            nodes: self.nodes.clone(),
            attitude: self.attitude,
        }
    }

    pub fn body_velocity(&self) -> &Vector3<f64> {
        self.velocities.last().expect("state has nodes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeLayout {
    /// Unstretched and straight along `+e₁`: `r_a = a·u·e₁`.
    StraightE1,
    /// Caller-supplied positions for all `N + 1` nodes.
    Explicit(Vec<Vector3<f64>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocityProfile {
    /// Only the body node moves; the string starts at rest.
    TipOnly,
    /// Node velocities grow linearly from the pivot to the body velocity.
    LinearRamp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialConditions {
    pub layout: NodeLayout,
    pub body_velocity: Vector3<f64>,
    pub body_omega: AxialVector,
    pub attitude: Rotation,
    pub velocity_profile: VelocityProfile,
}

impl Default for InitialConditions {
    /// Horizontal string at rest, body moving at (0, 0.2, −0.5) m/s.
    fn default() -> Self {
        InitialConditions {
            layout: NodeLayout::StraightE1,
            body_velocity: Vector3::new(0.0, 0.2, -0.5),
            body_omega: Vector3::zeros(),
            attitude: Rotation::identity(),
            velocity_profile: VelocityProfile::TipOnly,
        }
    }
}

impl InitialConditions {
    pub fn at_rest() -> Self {
        InitialConditions {
            body_velocity: Vector3::zeros(),
            ..Default::default()
        }
    }
}

pub fn build_initial_state(
    params: &PhysicalParams,
    disc: &Discretization,
    initial: &InitialConditions,
) -> Result<ContinuousState> {
    params.validate()?;
    let n_nodes = disc.n_nodes();
    let nodes = match &initial.layout {
        NodeLayout::StraightE1 => (0..n_nodes)
            .map(|a| Vector3::new(a as f64 * disc.element_length(), 0.0, 0.0))
            .collect(),
        NodeLayout::Explicit(nodes) => {
            if nodes.len() != n_nodes {
                return Err(Error::InvalidInitialCondition(format!(
                    "expected {n_nodes} nodes, got {}",
                    nodes.len()
                )));
            }
            nodes.clone()
        }
    };
    let config = Configuration {
        nodes,
        attitude: initial.attitude,
    };
    config.check_pivot()?;
    element_gradients(&config.nodes, disc)?;

    let finite = |v: &Vector3<f64>| v.iter().all(|c| c.is_finite());
    if !finite(&initial.body_velocity) || !finite(&initial.body_omega) {
        return Err(Error::InvalidInitialCondition("velocities must be finite".into()));
    }
    let n = disc.n_elements();
    let velocities = (0..n_nodes)
        .map(|a| match initial.velocity_profile {
            VelocityProfile::TipOnly if a == n => initial.body_velocity,
            VelocityProfile::TipOnly => Vector3::zeros(),
            VelocityProfile::LinearRamp => initial.body_velocity * (a as f64 / n as f64),
        })
        .collect();
    Ok(ContinuousState {
        nodes: config.nodes,
        velocities,
        attitude: config.attitude,
        omega: initial.body_omega,
    })
}
