//! Energy, momentum, and shape observables on continuous states and on
//! discrete `(g_k, f_k)` pairs.
//!
//! String integrals use the same linear shape functions as the
//! discretization, so the kinetic energy and angular momentum here are the
//! exact ones of the semi-discrete model.

use nalgebra::Vector3;

use crate::error::Result;
use crate::lgvi::forward_momenta;
use crate::model::{gravity_direction, Configuration, ContinuousState, Discretization, PhysicalParams, Update};
use crate::so3::{exp_so3, hat, log_so3};

/// Energy components in joules. Potentials are signed so that
/// `total = string_kinetic + body_kinetic + elastic + gravitational`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub string_kinetic: f64,
    pub body_kinetic: f64,
    pub elastic: f64,
    pub gravitational: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    fn new(string_kinetic: f64, body_kinetic: f64, elastic: f64, gravitational: f64) -> Self {
        EnergyBreakdown {
            string_kinetic,
            body_kinetic,
            elastic,
            gravitational,
            total: string_kinetic + body_kinetic + elastic + gravitational,
        }
    }
}

pub fn energy(state: &ContinuousState, params: &PhysicalParams, disc: &Discretization) -> EnergyBreakdown {
    let m = disc.element_mass();
    let mass = params.body_mass;
    let e3 = gravity_direction();
    let v = &state.velocities;
    let r = &state.nodes;

    let string_kinetic: f64 = v
        .windows(2)
        .map(|w| m / 6.0 * (w[0].norm_squared() + w[0].dot(&w[1]) + w[1].norm_squared()))
        .sum();
    let vb = state.body_velocity();
    let rot = state.attitude.matrix();
    let body_kinetic = 0.5 * mass * vb.norm_squared()
        + 0.5 * state.omega.dot(&(params.inertia * state.omega))
        + mass * vb.dot(&(rot * hat(&state.omega) * params.rho_c));

    let string_gravity: f64 = r
        .windows(2)
        .map(|w| -0.5 * m * params.gravity * (w[0] + w[1]).dot(&e3))
        .sum();
    let body_gravity = -mass * params.gravity * (r[r.len() - 1] + rot * params.rho_c).dot(&e3);
    let elastic = strain_energy_per_element(&state.nodes, disc).iter().sum();

    EnergyBreakdown::new(string_kinetic, body_kinetic, elastic, string_gravity + body_gravity)
}

/// Midpoint state of the step `g → g·f`: velocities `Δr/h`, angular
/// velocity `log(F)/h`, positions `r + Δr/2`, attitude `R_k·exp(log(F)/2)`.
pub fn midpoint_state(g: &Configuration, f: &Update, disc: &Discretization) -> Result<ContinuousState> {
    let h = disc.h();
    let log_f = log_so3(&f.rotation)?;
    Ok(ContinuousState {
        nodes: g.nodes.iter().zip(&f.deltas).map(|(r, d)| r + d * 0.5).collect(),
        velocities: f.deltas.iter().map(|d| d / h).collect(),
        attitude: g.attitude.compose(&exp_so3(&(log_f * 0.5))),
        omega: log_f / h,
    })
}

/// Energy of the midpoint reconstruction of the step `g → g·f`.
pub fn discrete_energy(
    g: &Configuration,
    f: &Update,
    params: &PhysicalParams,
    disc: &Discretization,
) -> Result<EnergyBreakdown> {
    Ok(energy(&midpoint_state(g, f, disc)?, params, disc))
}

/// Total angular momentum about `e₃` (kg·m²/s).
pub fn angular_momentum_e3(state: &ContinuousState, params: &PhysicalParams, disc: &Discretization) -> f64 {
    let m = disc.element_mass();
    let mass = params.body_mass;
    let r = &state.nodes;
    let v = &state.velocities;

    let mut total: Vector3<f64> = (0..r.len() - 1)
        .map(|a| {
            let (r0, r1, v0, v1) = (&r[a], &r[a + 1], &v[a], &v[a + 1]);
            (2.0 * r0.cross(v0) + r0.cross(v1) + r1.cross(v0) + 2.0 * r1.cross(v1)) * (m / 6.0)
        })
        .sum();
    let rb = &r[r.len() - 1];
    let vb = state.body_velocity();
    let rot = state.attitude.matrix();
    let offset = rot * params.rho_c;
    total += mass * rb.cross(&(vb + rot * hat(&state.omega) * params.rho_c));
    total -= mass * vb.cross(&offset);
    total += rot * (params.inertia * state.omega);
    total.dot(&gravity_direction())
}

/// Discrete momentum map about `e₃` carried by the step `g → g·f`.
///
/// Built from the momenta conjugate to the update at the end of the step;
/// it is exactly constant along any sequence of updates satisfying the
/// discrete Euler–Lagrange equations.
pub fn discrete_angular_momentum_e3(
    g: &Configuration,
    f: &Update,
    params: &PhysicalParams,
    disc: &Discretization,
) -> Result<f64> {
    let (p, mu) = forward_momenta(g, f, params, disc)?;
    let next = g.advance(f);
    let translational: Vector3<f64> = next.nodes.iter().zip(&p).map(|(r, p)| r.cross(p)).sum();
    let rotational = next.attitude.matrix() * mu;
    Ok((translational + rotational).dot(&gravity_direction()))
}

/// Deformed length `Σ‖r_{a+1} − r_a‖` (m).
pub fn stretched_length(nodes: &[Vector3<f64>]) -> f64 {
    nodes.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// `½κ(‖r_{a+1} − r_a‖ − u)²` for each element (J).
pub fn strain_energy_per_element(nodes: &[Vector3<f64>], disc: &Discretization) -> Vec<f64> {
    let kappa = disc.element_stiffness();
    let u = disc.element_length();
    nodes
        .windows(2)
        .map(|w| {
            let s = (w[1] - w[0]).norm() - u;
            0.5 * kappa * s * s
        })
        .collect()
}
