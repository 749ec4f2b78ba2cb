//! Discrete Lagrangian of the string–body system and the residuals of its
//! discrete Euler–Lagrange equations.

use nalgebra::{Matrix3, Vector3};

use crate::error::Result;
use crate::model::{element_gradients, gravity_direction, Configuration, Discretization, PhysicalParams, Update};
use crate::so3::{hat, vee_antisymmetrized, Rotation};

/// Contribution of element `a` (nodes `a`, `a + 1`) to `L_d(g, f)`.
pub fn element_lagrangian(
    g: &Configuration,
    f: &Update,
    a: usize,
    params: &PhysicalParams,
    disc: &Discretization,
) -> f64 {
    let h = disc.h();
    let m = disc.element_mass();
    let kappa = disc.element_stiffness();
    let u = disc.element_length();
    let e3 = gravity_direction();
    let (r0, r1) = (&g.nodes[a], &g.nodes[a + 1]);
    let (d0, d1) = (&f.deltas[a], &f.deltas[a + 1]);

    let kinetic = m / (6.0 * h) * (d0.dot(d0) + d0.dot(d1) + d1.dot(d1));
    let gravity = 0.25 * h * m * params.gravity * (2.0 * r0 + 2.0 * r1 + d0 + d1).dot(&e3);
    let stretch_now = (r1 - r0).norm() - u;
    let stretch_next = (r1 + d1 - r0 - d0).norm() - u;
    kinetic + gravity - 0.25 * h * kappa * (stretch_now * stretch_now + stretch_next * stretch_next)
}

/// Rigid-body contribution to `L_d(g, f)`.
pub fn body_lagrangian(g: &Configuration, f: &Update, params: &PhysicalParams, disc: &Discretization) -> f64 {
    let h = disc.h();
    let mass = params.body_mass;
    let mg = mass * params.gravity;
    let e3 = gravity_direction();
    let r = g.attitude.matrix();
    let fm = f.rotation.matrix();
    let rn = g.body_node();
    let dn = f.deltas.last().expect("update has nodes");
    let identity = nalgebra::Matrix3::identity();

    let translational = 0.5 / h * mass * dn.dot(dn);
    let rotational = ((identity - fm) * disc.j_d()).trace() / h;
    let coupling = mass / h * dn.dot(&(r * (fm - identity) * params.rho_c));
    let potential_now = 0.5 * h * mg * (rn + r * params.rho_c).dot(&e3);
    let potential_next = 0.5 * h * mg * (rn + dn + r * fm * params.rho_c).dot(&e3);
    translational + rotational + coupling + potential_now + potential_next
}

/// `L_d(g, f)`: the sum of every element contribution and the body term.
pub fn discrete_lagrangian(
    g: &Configuration,
    f: &Update,
    params: &PhysicalParams,
    disc: &Discretization,
) -> Result<f64> {
    element_gradients(&g.nodes, disc)?;
    element_gradients(&g.advance(f).nodes, disc)?;
    let string: f64 = (0..disc.n_elements())
        .map(|a| element_lagrangian(g, f, a, params, disc))
        .sum();
    Ok(string + body_lagrangian(g, f, params, disc))
}

/// Residuals of the translational equations for nodes `1..=N`.
///
/// `rotation` is the update `F_k` taking `g` to `g_next`; the previous
/// attitude is read from `g_prev`.
pub fn node_residuals(
    g_prev: &Configuration,
    g: &Configuration,
    g_next: &Configuration,
    rotation: &Rotation,
    params: &PhysicalParams,
    disc: &Discretization,
) -> Result<Vec<Vector3<f64>>> {
    let n = disc.n_elements();
    let h = disc.h();
    let m = disc.element_mass();
    let mass = params.body_mass;
    let e3 = gravity_direction();
    let grad = element_gradients(&g.nodes, disc)?;
    let dd: Vec<Vector3<f64>> = (0..=n)
        .map(|a| g_next.nodes[a] - 2.0 * g.nodes[a] + g_prev.nodes[a])
        .collect();

    let mut out = Vec::with_capacity(n);
    for a in 1..n {
        out.push(
            m / (6.0 * h) * (dd[a - 1] + 4.0 * dd[a] + dd[a + 1]) - h * m * params.gravity * e3 + h * grad[a - 1]
                - h * grad[a],
        );
    }
    let r = g.attitude.matrix();
    let attitude_term = (r * rotation.matrix() - 2.0 * r + g_prev.attitude.matrix()) * params.rho_c;
    out.push(
        (mass + m / 3.0) / h * dd[n] + m / (6.0 * h) * dd[n - 1] + h * grad[n - 1] + mass / h * attitude_term
            - h * (mass + 0.5 * m) * params.gravity * e3,
    );
    Ok(out)
}

/// Residual of the attitude equation. `dd_last` is the second difference
/// `r_{k+1,N} − 2r_{k,N} + r_{k−1,N}` of the body node.
pub fn rotation_residual(
    rotation: &Rotation,
    previous_rotation: &Rotation,
    attitude: &Rotation,
    dd_last: &Vector3<f64>,
    params: &PhysicalParams,
    disc: &Discretization,
) -> Vector3<f64> {
    let eye = Matrix3::identity();
    rotation_residual_from_increment(
        &(rotation.matrix() - eye),
        &(previous_rotation.matrix() - eye),
        attitude,
        dd_last,
        params,
        disc,
    )
}

/// [`rotation_residual`] in terms of `E = F_k − I` and `E_prev = F_{k−1} − I`,
/// which avoids cancellation against `J_d` when `F` is near the identity.
pub(crate) fn rotation_residual_from_increment(
    increment: &Matrix3<f64>,
    previous_increment: &Matrix3<f64>,
    attitude: &Rotation,
    dd_last: &Vector3<f64>,
    params: &PhysicalParams,
    disc: &Discretization,
) -> Vector3<f64> {
    let h = disc.h();
    let jd = disc.j_d();
    let mass = params.body_mass;
    let rho_hat = hat(&params.rho_c);
    let rt = attitude.matrix().transpose();
    let inertial = vee_antisymmetrized(&(increment * jd)) + vee_antisymmetrized(&(previous_increment.transpose() * jd));
    inertial / h + rho_hat * rt * (dd_last * (mass / h) - gravity_direction() * (h * mass * params.gravity))
}

/// Discrete momenta conjugate to the update `f` at the end of the step:
/// `∂L_d/∂Δr_a` for every node (zero at the pivot), and the left-trivialized
/// derivative of `L_d` with respect to `F`, in the body frame.
pub(crate) fn forward_momenta(
    g: &Configuration,
    f: &Update,
    params: &PhysicalParams,
    disc: &Discretization,
) -> Result<(Vec<Vector3<f64>>, Vector3<f64>)> {
    let n = disc.n_elements();
    let h = disc.h();
    let m = disc.element_mass();
    let mass = params.body_mass;
    let e3 = gravity_direction();
    let next = g.advance(f);
    let grad = element_gradients(&next.nodes, disc)?;
    let d = &f.deltas;

    let mut p = vec![Vector3::zeros(); n + 1];
    for a in 1..n {
        p[a] =
            m / (6.0 * h) * (d[a - 1] + 4.0 * d[a] + d[a + 1]) + 0.5 * h * m * params.gravity * e3 + 0.5 * h * grad[a]
                - 0.5 * h * grad[a - 1];
    }
    let r = g.attitude.matrix();
    let fm = f.rotation.matrix();
    let identity = nalgebra::Matrix3::identity();
    p[n] = (mass + m / 3.0) / h * d[n]
        + m / (6.0 * h) * d[n - 1]
        + mass / h * (r * (fm - identity) * params.rho_c)
        + 0.5 * h * (mass + 0.5 * m) * params.gravity * e3
        - 0.5 * h * grad[n - 1];

    let a_k = r.transpose() * (d[n] * (mass / h) + e3 * (0.5 * h * mass * params.gravity));
    let mu = vee_antisymmetrized(&(disc.j_d() * fm)) / h + hat(&params.rho_c) * fm.transpose() * a_k;
    Ok((p, mu))
}
