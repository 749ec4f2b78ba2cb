//! Lie group variational integrator.
//!
//! Given `(g_{k−1}, f_{k−1})`, one step finds `f_k` from the discrete
//! Euler–Lagrange equations and advances `g_{k+1} = g_k · f_k`. The node
//! updates are linear in the unknowns once `F_k` is fixed; `F_k` solves a
//! three-dimensional implicit equation handled by Newton's method on Cayley
//! parameters. The two solves alternate until `F_k` stops changing.

mod lagrangian;
mod tridiagonal;

use nalgebra::{Matrix3, Vector3};

pub use lagrangian::{body_lagrangian, discrete_lagrangian, element_lagrangian, node_residuals, rotation_residual};
pub(crate) use lagrangian::{forward_momenta, rotation_residual_from_increment};
pub use tridiagonal::{assemble_and_factor_mass, NodeMassMatrix};

use crate::error::{Error, Result};
use crate::model::{
    element_gradients, gravity_direction, Configuration, ContinuousState, Discretization, PhysicalParams, Update,
};
use crate::so3::{cayley, cayley_increment, cayley_inv, exp_so3, AxialVector, Rotation};

/// Forward-difference step for the Newton Jacobian (Cayley parameters).
const JACOBIAN_STEP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Bound on `‖x_new − x_old‖∞` between fixed-point sweeps (rad).
    pub fixed_point_tol: f64,
    /// Bound on the attitude residual, relative to `‖J_d‖_F` (rad/s).
    pub newton_tol: f64,
    pub max_fixed_point_iters: usize,
    pub max_newton_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            fixed_point_tol: 1e-12,
            newton_tol: 1e-12,
            max_fixed_point_iters: 50,
            max_newton_iters: 50,
        }
    }
}

impl SolverOptions {
    /// Both tolerances set to `tol`, default iteration caps.
    pub fn with_tolerance(tol: f64) -> Self {
        SolverOptions {
            fixed_point_tol: tol,
            newton_tol: tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("fixed_point_tol", self.fixed_point_tol),
            ("newton_tol", self.newton_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field, format!("must be finite and > 0, got {v}")));
            }
        }
        if self.max_fixed_point_iters == 0 {
            return Err(Error::invalid("max_fixed_point_iters", "must be ≥ 1"));
        }
        if self.max_newton_iters == 0 {
            return Err(Error::invalid("max_newton_iters", "must be ≥ 1"));
        }
        Ok(())
    }
}

/// First update `f_0`: `Δr_a = h·v_a(0)`, `F_0 = exp(h·Ω(0))`.
pub fn initialize_first_update(state0: &ContinuousState, disc: &Discretization) -> Update {
    let h = disc.h();
    Update {
        deltas: state0.velocities.iter().map(|v| v * h).collect(),
        rotation: exp_so3(&(state0.omega * h)),
    }
}

/// Outcome of [`solve_rotation_update`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSolution {
    pub rotation: Rotation,
    /// Cayley parameters of `rotation`.
    pub cayley: AxialVector,
    pub iterations: usize,
    /// Norm of the attitude residual at `rotation`.
    pub residual: f64,
}

/// Solves the attitude equation for `F_k` by Newton's method on the Cayley
/// parameters, starting from `guess`. The Jacobian is a forward-difference
/// approximation rebuilt every iteration.
pub fn solve_rotation_update(
    previous_rotation: &Rotation,
    attitude: &Rotation,
    dd_last: &Vector3<f64>,
    params: &PhysicalParams,
    disc: &Discretization,
    opts: &SolverOptions,
    guess: &AxialVector,
) -> Result<RotationSolution> {
    let tol = opts.newton_tol * disc.j_d().norm();
    let previous_increment = previous_rotation.matrix() - Matrix3::identity();
    let residual_at = |x: &AxialVector| {
        rotation_residual_from_increment(
            &cayley_increment(x),
            &previous_increment,
            attitude,
            dd_last,
            params,
            disc,
        )
    };

    let mut x = *guess;
    let mut res = residual_at(&x);
    let mut iterations = 0;
    while res.norm().is_nan() || res.norm() > tol {
        if iterations == opts.max_newton_iters || !res.norm().is_finite() {
            return Err(Error::NewtonNotConverged {
                iterations,
                residual: res.norm(),
            });
        }
        let mut jac = Matrix3::zeros();
        for i in 0..3 {
            let mut xp = x;
            xp[i] += JACOBIAN_STEP;
            jac.set_column(i, &((residual_at(&xp) - res) / JACOBIAN_STEP));
        }
        let step = jac.lu().solve(&(-res)).ok_or(Error::NewtonNotConverged {
            iterations,
            residual: res.norm(),
        })?;
        x += step;
        res = residual_at(&x);
        iterations += 1;
    }
    Ok(RotationSolution {
        rotation: cayley(&x),
        cayley: x,
        iterations,
        residual: res.norm(),
    })
}

/// Per-step solver statistics returned with each update.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// The update `f_k` just computed.
    pub update: Update,
    pub fixed_point_iterations: usize,
    /// Newton iterations summed over all fixed-point sweeps.
    pub newton_iterations: usize,
}

/// Integrator state `(g_{k−1}, g_k, f_{k−1})` plus the factored node matrix.
///
/// A stepper is advanced in place by [`Stepper::step`]; distinct steppers
/// share nothing.
#[derive(Debug, Clone)]
pub struct Stepper {
    params: PhysicalParams,
    disc: Discretization,
    opts: SolverOptions,
    mass: NodeMassMatrix,
    previous: Configuration,
    current: Configuration,
    previous_update: Update,
    step_index: usize,
}

impl Stepper {
    /// Starts from `g_0` and `f_0`; the stepper is positioned at `k = 1`.
    pub fn new(
        params: PhysicalParams,
        disc: Discretization,
        opts: SolverOptions,
        g0: Configuration,
        f0: Update,
    ) -> Result<Self> {
        params.validate()?;
        opts.validate()?;
        g0.check_pivot()?;
        if g0.nodes.len() != disc.n_nodes() || f0.deltas.len() != disc.n_nodes() {
            return Err(Error::InvalidInitialCondition(format!(
                "expected {} nodes in configuration and update",
                disc.n_nodes()
            )));
        }
        if f0.deltas[0] != Vector3::zeros() {
            return Err(Error::InvalidInitialCondition("pivot displacement must be zero".into()));
        }
        let mass = assemble_and_factor_mass(&params, &disc)?;
        let current = g0.advance(&f0);
        element_gradients(&g0.nodes, &disc)?;
        Ok(Stepper {
            params,
            disc,
            opts,
            mass,
            previous: g0,
            current,
            previous_update: f0,
            step_index: 1,
        })
    }

    /// Starts from a continuous state using [`initialize_first_update`].
    pub fn from_state(
        params: PhysicalParams,
        disc: Discretization,
        opts: SolverOptions,
        state0: &ContinuousState,
    ) -> Result<Self> {
        let f0 = initialize_first_update(state0, &disc);
        Stepper::new(params, disc, opts, state0.configuration(), f0)
    }

    pub fn current(&self) -> &Configuration {
        &self.current
    }

    pub fn previous(&self) -> &Configuration {
        &self.previous
    }

    pub fn previous_update(&self) -> &Update {
        &self.previous_update
    }

    /// Index `k` of the current configuration `g_k`.
    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn options(&self) -> &SolverOptions {
        &self.opts
    }

    pub fn mass_matrix(&self) -> &NodeMassMatrix {
        &self.mass
    }

    /// Node updates `Δr_{k,·}` solving the translational equations for a
    /// candidate `F_k`. The pivot entry is zero.
    pub fn solve_node_updates(&self, rotation: &Rotation) -> Result<Vec<Vector3<f64>>> {
        let base = self.known_forcing()?;
        Ok(self.node_updates_with(&base, rotation))
    }

    /// Right-hand side of the node equations without the `F_k` term.
    fn known_forcing(&self) -> Result<Vec<Vector3<f64>>> {
        let n = self.disc.n_elements();
        let h = self.disc.h();
        let m = self.disc.element_mass();
        let g = self.params.gravity;
        let mass = self.params.body_mass;
        let e3 = gravity_direction();
        let grad = element_gradients(&self.current.nodes, &self.disc)?;

        let mut b: Vec<Vector3<f64>> = (1..n).map(|a| e3 * (h * m * g) + (grad[a] - grad[a - 1]) * h).collect();
        let r = self.current.attitude.matrix();
        let history = (-2.0 * r + self.previous.attitude.matrix()) * self.params.rho_c;
        b.push(e3 * (h * (mass + 0.5 * m) * g) - grad[n - 1] * h - history * (mass / h));
        Ok(b)
    }

    fn node_updates_with(&self, base: &[Vector3<f64>], rotation: &Rotation) -> Vec<Vector3<f64>> {
        let n = self.disc.n_elements();
        let mut b = base.to_vec();
        let forcing = self.current.attitude.matrix() * rotation.matrix() * self.params.rho_c;
        b[n - 1] -= forcing * (self.params.body_mass / self.disc.h());
        let dd = self.mass.solve(&b);
        let mut deltas = Vec::with_capacity(n + 1);
        deltas.push(Vector3::zeros());
        deltas.extend(self.previous_update.deltas[1..].iter().zip(&dd).map(|(d, s)| d + s));
        deltas
    }

    /// Computes `f_k` and advances the stepper to `(g_{k+1}, f_k)`.
    pub fn step(&mut self) -> Result<StepReport> {
        self.try_step().map_err(|e| e.at_step(self.step_index))
    }

    fn try_step(&mut self) -> Result<StepReport> {
        let n = self.disc.n_elements();
        let base = self.known_forcing()?;
        let previous_rotation = self.previous_update.rotation;
        let last_previous = self.previous_update.deltas[n];

        let mut x = cayley_inv(&previous_rotation)?;
        let mut newton_iterations = 0;
        let mut change = f64::INFINITY;
        for sweep in 1..=self.opts.max_fixed_point_iters {
            let deltas = self.node_updates_with(&base, &cayley(&x));
            let dd_last = deltas[n] - last_previous;
            let sol = solve_rotation_update(
                &previous_rotation,
                &self.current.attitude,
                &dd_last,
                &self.params,
                &self.disc,
                &self.opts,
                &x,
            )?;
            newton_iterations += sol.iterations;
            change = (sol.cayley - x).amax();
            x = sol.cayley;
            if change <= self.opts.fixed_point_tol {
                // Node equations are re-solved with the converged F_k.
                let update = Update {
                    deltas: self.node_updates_with(&base, &sol.rotation),
                    rotation: sol.rotation,
                };
                let next = self.current.advance(&update);
                self.previous = std::mem::replace(&mut self.current, next);
                self.previous_update = update.clone();
                self.step_index += 1;
                return Ok(StepReport {
                    update,
                    fixed_point_iterations: sweep,
                    newton_iterations,
                });
            }
        }
        Err(Error::FixedPointNotConverged {
            iterations: self.opts.max_fixed_point_iters,
            change,
        })
    }
}
