//! Reference integrator: the same finite-element semi-discretization written
//! as an ODE in `(r, ṙ, R, Ω)` and advanced by a fourth-order Runge–Kutta
//! scheme. The attitude is carried by Munthe-Kaas stages so every component,
//! `R` included, is fourth-order accurate.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::model::{element_gradients, gravity_direction, ContinuousState, Discretization, PhysicalParams};
use crate::so3::{exp_so3, hat, AxialVector};

/// The semi-discrete equations of motion. The time step stored in `disc`
/// is not used; [`rk4_step`] takes its own.
#[derive(Debug, Clone)]
pub struct SemiDiscreteSystem {
    pub params: PhysicalParams,
    pub disc: Discretization,
}

impl SemiDiscreteSystem {
    pub fn new(params: PhysicalParams, disc: Discretization) -> Result<Self> {
        params.validate()?;
        Ok(SemiDiscreteSystem { params, disc })
    }
}

/// Node accelerations (pivot entry zero) and `Ω̇`.
#[derive(Debug, Clone, PartialEq)]
pub struct Accelerations {
    pub nodes: Vec<Vector3<f64>>,
    pub omega_dot: AxialVector,
}

/// Solves the generalized mass system for `(r̈_1, …, r̈_N, Ω̇)`.
pub fn generalized_accelerations(state: &ContinuousState, sys: &SemiDiscreteSystem) -> Result<Accelerations> {
    let params = &sys.params;
    let n = sys.disc.n_elements();
    let m = sys.disc.element_mass();
    let mass = params.body_mass;
    let g = params.gravity;
    let e3 = gravity_direction();
    let grad = element_gradients(&state.nodes, &sys.disc)?;
    let rot = state.attitude.matrix();
    let omega_hat = hat(&state.omega);
    let rho_hat = hat(&params.rho_c);

    let dim = 3 * n + 3;
    let mut mm = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    let block = |mm: &mut DMatrix<f64>, i: usize, j: usize, b: &Matrix3<f64>| {
        mm.fixed_view_mut::<3, 3>(3 * i, 3 * j).copy_from(b);
    };
    let eye = Matrix3::identity();

    // Unknown block i ↔ node i + 1; block n ↔ Ω̇.
    for i in 0..n {
        let node = i + 1;
        let diag = if node == n { mass + m / 3.0 } else { 4.0 * m / 6.0 };
        block(&mut mm, i, i, &(eye * diag));
        if i + 1 < n {
            block(&mut mm, i, i + 1, &(eye * (m / 6.0)));
            block(&mut mm, i + 1, i, &(eye * (m / 6.0)));
        }
        let force = if node == n {
            -mass * rot * omega_hat * omega_hat * params.rho_c + e3 * ((mass + 0.5 * m) * g) - grad[n - 1]
        } else {
            e3 * (m * g) + grad[node] - grad[node - 1]
        };
        rhs.fixed_rows_mut::<3>(3 * i).copy_from(&force);
    }
    let coupling = -mass * rot * rho_hat;
    block(&mut mm, n - 1, n, &coupling);
    block(&mut mm, n, n - 1, &coupling.transpose());
    block(&mut mm, n, n, &params.inertia);
    let body = -omega_hat * (params.inertia * state.omega) + mass * g * rho_hat * rot.transpose() * e3;
    rhs.fixed_rows_mut::<3>(3 * n).copy_from(&body);

    let chol = mm.cholesky().ok_or(Error::MassMatrixNotPositiveDefinite)?;
    let sol = chol.solve(&rhs);

    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(Vector3::zeros());
    nodes.extend((0..n).map(|i| Vector3::from(sol.fixed_rows::<3>(3 * i))));
    Ok(Accelerations {
        nodes,
        omega_dot: Vector3::from(sol.fixed_rows::<3>(3 * n)),
    })
}

/// Time derivative of the non-attitude components.
struct Slope {
    velocities: Vec<Vector3<f64>>,
    accelerations: Vec<Vector3<f64>>,
    omega: AxialVector,
    omega_dot: AxialVector,
}

fn slope(state: &ContinuousState, sys: &SemiDiscreteSystem) -> Result<Slope> {
    let acc = generalized_accelerations(state, sys)?;
    Ok(Slope {
        velocities: state.velocities.clone(),
        accelerations: acc.nodes,
        omega: state.omega,
        omega_dot: acc.omega_dot,
    })
}

/// `dexp⁻¹_θ(ω)` truncated after the second bracket.
fn dexp_inv(theta: &AxialVector, omega: &AxialVector) -> AxialVector {
    omega - 0.5 * theta.cross(omega) + theta.cross(&theta.cross(omega)) / 12.0
}

/// Stage state `y₀ + Σ c_j·k_j` with the attitude `R₀·exp(θ)`.
fn stage(base: &ContinuousState, theta: &AxialVector, increments: &[(f64, &Slope)]) -> ContinuousState {
    let mut s = ContinuousState {
        attitude: base.attitude.compose(&exp_so3(theta)),
        ..base.clone()
    };
    for (c, k) in increments {
        for (r, v) in s.nodes.iter_mut().zip(&k.velocities) {
            *r += v * *c;
        }
        for (v, a) in s.velocities.iter_mut().zip(&k.accelerations) {
            *v += a * *c;
        }
        s.omega += k.omega_dot * *c;
    }
    s
}

/// One classical RK4 step of size `dt`.
pub fn rk4_step(state: &ContinuousState, dt: f64, sys: &SemiDiscreteSystem) -> Result<ContinuousState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", format!("must be finite and > 0, got {dt}")));
    }
    let k1 = slope(state, sys)?;
    let w1 = k1.omega;

    let theta2 = w1 * (0.5 * dt);
    let k2 = slope(&stage(state, &theta2, &[(0.5 * dt, &k1)]), sys)?;
    let w2 = dexp_inv(&theta2, &k2.omega);

    let theta3 = w2 * (0.5 * dt);
    let k3 = slope(&stage(state, &theta3, &[(0.5 * dt, &k2)]), sys)?;
    let w3 = dexp_inv(&theta3, &k3.omega);

    let theta4 = w3 * dt;
    let k4 = slope(&stage(state, &theta4, &[(dt, &k3)]), sys)?;
    let w4 = dexp_inv(&theta4, &k4.omega);

    let theta = (w1 + 2.0 * w2 + 2.0 * w3 + w4) * (dt / 6.0);
    let c = dt / 6.0;
    Ok(stage(
        state,
        &theta,
        &[(c, &k1), (2.0 * c, &k2), (2.0 * c, &k3), (c, &k4)],
    ))
}
