#![allow(dead_code)]

use string_pendulum::diagnostics::{discrete_angular_momentum_e3, discrete_energy};
use string_pendulum::lgvi::{SolverOptions, Stepper};
use string_pendulum::model::{
    build_initial_state, Configuration, ContinuousState, Discretization, InitialConditions, PhysicalParams, Update,
};

pub fn rubber(h: f64) -> (PhysicalParams, Discretization) {
    let p = PhysicalParams::rubber_string();
    let d = Discretization::new(&p, 20, h).unwrap();
    (p, d)
}

pub fn rubber_state(p: &PhysicalParams, d: &Discretization) -> ContinuousState {
    build_initial_state(p, d, &InitialConditions::default()).unwrap()
}

/// Calls `visit(k, g_k, f_k)` for `k = 0 .. steps − 1`; returns the largest
/// fixed-point iteration count.
pub fn run_lgvi(
    params: &PhysicalParams,
    disc: &Discretization,
    opts: SolverOptions,
    state0: &ContinuousState,
    steps: usize,
    mut visit: impl FnMut(usize, &Configuration, &Update),
) -> usize {
    let mut stepper = Stepper::from_state(params.clone(), disc.clone(), opts, state0).unwrap();
    visit(0, stepper.previous(), stepper.previous_update());
    let mut worst = 0;
    for k in 1..steps {
        let g = stepper.current().clone();
        let report = stepper.step().unwrap();
        worst = worst.max(report.fixed_point_iterations);
        visit(k, &g, &report.update);
    }
    worst
}

pub struct Conservation {
    pub energy: Vec<f64>,
    pub momentum: Vec<f64>,
    pub max_orthogonality: f64,
}

pub fn conservation_run(h: f64, t_end: f64, opts: SolverOptions) -> Conservation {
    let (p, d) = rubber(h);
    let s = rubber_state(&p, &d);
    let steps = (t_end / h).round() as usize;
    let mut out = Conservation {
        energy: Vec::with_capacity(steps),
        momentum: Vec::with_capacity(steps),
        max_orthogonality: 0.0,
    };
    run_lgvi(&p, &d, opts, &s, steps, |_, g, f| {
        out.energy.push(discrete_energy(g, f, &p, &d).unwrap().total);
        out.momentum.push(discrete_angular_momentum_e3(g, f, &p, &d).unwrap());
        out.max_orthogonality = out.max_orthogonality.max(g.attitude.orthogonality_error());
    });
    out
}

/// Least-squares slope of `y` against `t_k = k·dt`.
pub fn trend_slope(y: &[f64], dt: f64) -> f64 {
    let n = y.len() as f64;
    let t_mean = dt * (n - 1.0) / 2.0;
    let y_mean = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (k, v) in y.iter().enumerate() {
        let t = k as f64 * dt - t_mean;
        sxy += t * (v - y_mean);
        sxx += t * t;
    }
    sxy / sxx
}

/// Half the peak-to-peak spread of `y` about its least-squares line.
pub fn oscillation_amplitude(y: &[f64], dt: f64) -> f64 {
    let slope = trend_slope(y, dt);
    let (lo, hi) = y
        .iter()
        .enumerate()
        .map(|(k, v)| v - slope * k as f64 * dt)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    0.5 * (hi - lo)
}

pub fn max_deviation(y: &[f64]) -> f64 {
    y.iter().map(|v| (v - y[0]).abs()).fold(0.0, f64::max)
}

pub fn report(criterion: u32, name: &str, pass: bool, detail: String) {
    println!(
        "criterion {criterion} ({name}): {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}
