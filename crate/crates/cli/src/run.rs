//! Orchestration of LGVI and reference runs.
//!
//! Series rows are taken every `series_stride` steps for `k = 0 … K − 1`.
//! An LGVI row pairs `g_k` with the update `f_k`: positions, orthogonality
//! and stretched length belong to `t_k`, while velocities and energies are
//! the step averages over `[t_k, t_{k+1}]`. Snapshots cover `k = 0 … K`.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::thread;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use nalgebra::Vector3;

use string_pendulum::diagnostics::{
    angular_momentum_e3, discrete_angular_momentum_e3, energy, midpoint_state, strain_energy_per_element,
    stretched_length, EnergyBreakdown,
};
use string_pendulum::lgvi::Stepper;
use string_pendulum::model::{build_initial_state, Configuration, ContinuousState, Discretization};
use string_pendulum::refint::{rk4_step, SemiDiscreteSystem};
use string_pendulum::so3::Rotation;

use crate::config::RunConfig;
use crate::output::{write_compare, CompareRow, SeriesRow, SeriesWriter, Snapshot};

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub integrator: &'static str,
    pub steps: usize,
    /// `(E_last − E_0) / |E_0|` between the first and last step.
    pub energy_drift: f64,
    pub max_orthogonality: f64,
    pub max_fixed_point_iters: usize,
    pub wall_time: Duration,
}

type Outcome = Result<(RunSummary, Vec<Sample>)>;

/// Positions and attitude at one series sample, kept for comparison.
#[derive(Debug, Clone)]
struct Sample {
    t: f64,
    nodes: Vec<Vector3<f64>>,
    attitude: Rotation,
}

struct Recorder<'a> {
    config: &'a RunConfig,
    disc: Discretization,
    label: &'static str,
    series: SeriesWriter<BufWriter<File>>,
    snapshot_dir: std::path::PathBuf,
    samples: Vec<Sample>,
    first_energy: Option<f64>,
    last_energy: f64,
    max_orthogonality: f64,
}

impl<'a> Recorder<'a> {
    fn new(config: &'a RunConfig, label: &'static str) -> Result<Self> {
        let path = config.out_dir.join(format!("series_{label}.csv"));
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let snapshot_dir = config.out_dir.join(format!("snapshots_{label}"));
        fs::create_dir_all(&snapshot_dir).with_context(|| format!("creating {}", snapshot_dir.display()))?;
        Ok(Recorder {
            config,
            disc: config.discretization(),
            label,
            series: SeriesWriter::new(BufWriter::new(file))?,
            snapshot_dir,
            samples: Vec::new(),
            first_energy: None,
            last_energy: 0.0,
            max_orthogonality: 0.0,
        })
    }

    fn configuration(&mut self, k: usize, g: &Configuration) -> Result<()> {
        self.max_orthogonality = self.max_orthogonality.max(g.attitude.orthogonality_error());
        if !k.is_multiple_of(self.config.snapshot_stride) {
            return Ok(());
        }
        let snap = Snapshot {
            t: k as f64 * self.config.h,
            nodes: g.nodes.iter().map(|r| [r.x, r.y, r.z]).collect(),
            rotation: std::array::from_fn(|i| std::array::from_fn(|j| g.attitude.matrix()[(i, j)])),
            strain_energy: strain_energy_per_element(&g.nodes, &self.disc),
        };
        let path = self.snapshot_dir.join(format!("step_{k:09}.json"));
        fs::write(&path, snap.to_json()?).with_context(|| format!("writing {}", path.display()))
    }

    /// Records row `k` from the observed state; `g` supplies positions.
    fn row(
        &mut self,
        k: usize,
        g: &Configuration,
        observed: &ContinuousState,
        pi3: f64,
        fp_iters: usize,
    ) -> Result<()> {
        let e: EnergyBreakdown = energy(observed, &self.config.params, &self.disc);
        self.first_energy.get_or_insert(e.total);
        self.last_energy = e.total;
        if !k.is_multiple_of(self.config.series_stride) {
            return Ok(());
        }
        let t = k as f64 * self.config.h;
        let v = observed.body_velocity();
        let w = observed.omega;
        self.series.write(&SeriesRow {
            t,
            t_str: e.string_kinetic,
            t_rb: e.body_kinetic,
            v_elastic: e.elastic,
            v_grav: e.gravitational,
            e_total: e.total,
            pi3,
            orth_err: g.attitude.orthogonality_error(),
            stretched_len: stretched_length(&g.nodes),
            v_body_x: v.x,
            v_body_y: v.y,
            v_body_z: v.z,
            omega_x: w.x,
            omega_y: w.y,
            omega_z: w.z,
            fp_iters: fp_iters as u32,
        })?;
        self.samples.push(Sample {
            t,
            nodes: g.nodes.clone(),
            attitude: g.attitude,
        });
        Ok(())
    }

    fn finish(self, max_fixed_point_iters: usize, started: Instant) -> Outcome {
        self.series.finish()?;
        let e0 = self.first_energy.unwrap_or(0.0);
        Ok((
            RunSummary {
                integrator: self.label,
                steps: self.config.steps(),
                energy_drift: (self.last_energy - e0) / e0.abs(),
                max_orthogonality: self.max_orthogonality,
                max_fixed_point_iters,
                wall_time: started.elapsed(),
            },
            self.samples,
        ))
    }
}

fn run_lgvi(config: &RunConfig) -> Outcome {
    let started = Instant::now();
    let disc = config.discretization();
    let params = &config.params;
    let state0 = build_initial_state(params, &disc, &config.initial)?;
    let mut stepper = Stepper::from_state(params.clone(), disc.clone(), config.solver, &state0)?;
    let mut rec = Recorder::new(config, "lgvi")?;
    let mut worst = 0;
    for k in 0..config.steps() {
        let (g, f, fp) = if k == 0 {
            (stepper.previous().clone(), stepper.previous_update().clone(), 0)
        } else {
            let g = stepper.current().clone();
            let report = stepper.step()?;
            (g, report.update, report.fixed_point_iterations)
        };
        worst = worst.max(fp);
        rec.configuration(k, &g)?;
        let observed = midpoint_state(&g, &f, &disc)?;
        let pi3 = discrete_angular_momentum_e3(&g, &f, params, &disc)?;
        rec.row(k, &g, &observed, pi3, fp)?;
    }
    rec.configuration(config.steps(), stepper.current())?;
    rec.finish(worst, started)
}

fn run_reference(config: &RunConfig) -> Outcome {
    let started = Instant::now();
    let disc = config.discretization();
    let params = &config.params;
    let sys = SemiDiscreteSystem::new(params.clone(), disc.clone())?;
    let mut state = build_initial_state(params, &disc, &config.initial)?;
    let mut rec = Recorder::new(config, "reference")?;
    for k in 0..config.steps() {
        if k > 0 {
            state = rk4_step(&state, config.h, &sys).with_context(|| format!("reference step {k}"))?;
        }
        let g = state.configuration();
        rec.configuration(k, &g)?;
        let pi3 = angular_momentum_e3(&state, params, &disc);
        rec.row(k, &g, &state, pi3, 0)?;
    }
    let last = rk4_step(&state, config.h, &sys).with_context(|| format!("reference step {}", config.steps()))?;
    rec.configuration(config.steps(), &last.configuration())?;
    rec.finish(0, started)
}

fn compare(lgvi: &[Sample], reference: &[Sample]) -> Vec<CompareRow> {
    lgvi.iter()
        .zip(reference)
        .map(|(a, b)| {
            let gaps: Vec<f64> = a.nodes.iter().zip(&b.nodes).map(|(x, y)| (x - y).norm()).collect();
            CompareRow {
                t: a.t,
                max_node_gap: gaps.iter().copied().fold(0.0, f64::max),
                body_node_gap: gaps[gaps.len() - 1],
                attitude_gap: a.attitude.angle_to(&b.attitude),
            }
        })
        .collect()
}

/// Runs the selected integrator(s) and writes every output file under
/// `config.out_dir`. With both selected, the two runs proceed on separate
/// threads and `compare.csv` is written afterwards.
pub fn run(config: &RunConfig) -> Result<Vec<RunSummary>> {
    fs::create_dir_all(&config.out_dir).with_context(|| format!("creating {}", config.out_dir.display()))?;
    let (lgvi, reference) = thread::scope(|scope| {
        let lgvi = config
            .integrator
            .runs_lgvi()
            .then(|| scope.spawn(|| run_lgvi(config).context("LGVI run failed")));
        let reference = config
            .integrator
            .runs_reference()
            .then(|| scope.spawn(|| run_reference(config).context("reference run failed")));
        let join = |h: Option<thread::ScopedJoinHandle<'_, Outcome>>| {
            h.map(|h| h.join().expect("integrator thread panicked")).transpose()
        };
        (join(lgvi), join(reference))
    });
    let (lgvi, reference) = (lgvi?, reference?);

    if let (Some((_, a)), Some((_, b))) = (&lgvi, &reference) {
        write_csv(&config.out_dir.join("compare.csv"), &compare(a, b))?;
    }
    Ok(lgvi.into_iter().chain(reference).map(|(s, _)| s).collect())
}

fn write_csv(path: &Path, rows: &[CompareRow]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_compare(BufWriter::new(file), rows)?;
    Ok(())
}
