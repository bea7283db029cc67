//! Closed-loop simulation of the walking engine on the pendulum model itself.
//!
//! Each control cycle ticks the engine, runs one LQG step per horizontal
//! plane, evaluates the multibody ZMP of the simulated masses, checks it
//! against the support polygon and then advances the sampled plant with
//! process noise and any scheduled impulses. Sagittal motion is world x and
//! uses the two-mass model; frontal motion is world y with the torso folded
//! into a single mass.

mod polygon;
mod tracking;

pub use polygon::ConvexPolygon;
pub use tracking::{track_reference, ReferencePoint, TrackingRun, TrackingSetup};

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::{DVector, Matrix4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::control::{lqg_step, AxisController, ControlConfig};
use crate::dynamics::{
    build_two_mass_system, discretize, model_bodies, natural_frequency, step_dynamics, zmp_multibody, ControlInput,
    DiscreteSystem, LinearSystem, ModelParams, PendulumState,
};
use crate::engine::{Engine, EngineCommand, EngineConfig, EngineOutput, Phase};
use crate::error::{Error, Result};
use crate::estimation::{FilterState, NoiseModel};
use crate::planner::{Side, StepCommand};

/// Standard deviations of the injected noise.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseLevels {
    /// COM position measurement (m).
    pub com: f64,
    /// Torso angle measurement (rad).
    pub torso: f64,
    /// Additive process noise on every plant state per cycle.
    pub process: f64,
}

/// Instantaneous COM velocity change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Impulse {
    pub time: f64,
    #[serde(default)]
    pub dx: f64,
    #[serde(default)]
    pub dy: f64,
}

/// A scripted command. `gait = true` walks with the configured gait; `stop = true` stops.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimedCommand {
    pub time: f64,
    pub stop: bool,
    pub gait: bool,
    pub l_sx: Option<f64>,
    pub l_sy: Option<f64>,
    pub l_stheta: Option<f64>,
    pub t_ss: Option<f64>,
    pub t_ds: Option<f64>,
}

impl TimedCommand {
    pub fn gait(time: f64) -> Self {
        Self { time, gait: true, ..Default::default() }
    }

    pub fn walk(time: f64, cmd: StepCommand) -> Self {
        Self {
            time,
            l_sx: Some(cmd.l_sx),
            l_sy: Some(cmd.l_sy),
            l_stheta: Some(cmd.l_stheta),
            t_ss: Some(cmd.t_ss),
            t_ds: Some(cmd.t_ds),
            ..Default::default()
        }
    }

    pub fn stop(time: f64) -> Self {
        Self { time, stop: true, ..Default::default() }
    }

    /// Resolve against the engine configuration. A gait without a positive
    /// single-support time means standing still.
    pub fn resolve(&self, cfg: &EngineConfig) -> EngineCommand {
        if self.stop {
            return EngineCommand::Stop;
        }
        let base = cfg.gait.command(cfg.t_ds);
        let cmd = if self.gait {
            base
        } else {
            StepCommand {
                l_sx: self.l_sx.unwrap_or(0.0),
                l_sy: self.l_sy.unwrap_or(0.0),
                l_stheta: self.l_stheta.unwrap_or(0.0),
                t_ss: self.t_ss.unwrap_or(base.t_ss),
                t_ds: self.t_ds.unwrap_or(base.t_ds),
            }
        };
        if cmd.is_walking() {
            EngineCommand::Walk(cmd)
        } else {
            EngineCommand::None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub duration: f64,
    pub seed: u64,
    pub noise: NoiseLevels,
    pub disturbances: Vec<Impulse>,
    pub commands: Vec<TimedCommand>,
    /// The ZMP must stay this far inside the support polygon.
    pub support_margin: f64,
    /// Consecutive violating cycles that count as a fall.
    pub fall_dwell: usize,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            duration: 10.0,
            seed: 0,
            noise: NoiseLevels::default(),
            disturbances: Vec::new(),
            commands: Vec::new(),
            support_margin: 0.0,
            fall_dwell: 3,
        }
    }
}

impl Scenario {
    /// Walk with the configured gait from t = 0.
    pub fn gait_walk(duration: f64, seed: u64, noise: NoiseLevels) -> Self {
        Self { duration, seed, noise, commands: vec![TimedCommand::gait(0.0)], ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::Config(format!("scenario duration must be positive, got {}", self.duration)));
        }
        let sorted = |times: &mut dyn Iterator<Item = f64>| {
            let v: Vec<f64> = times.collect();
            v.iter().all(|t| t.is_finite()) && v.windows(2).all(|w| w[0] <= w[1])
        };
        if !sorted(&mut self.commands.iter().map(|c| c.time)) {
            return Err(Error::Config("command times must be finite and ascending".into()));
        }
        if !sorted(&mut self.disturbances.iter().map(|d| d.time)) {
            return Err(Error::Config("disturbance times must be finite and ascending".into()));
        }
        let n = &self.noise;
        if !(n.com >= 0.0 && n.torso >= 0.0 && n.process >= 0.0) {
            return Err(Error::Config("noise levels must be non-negative".into()));
        }
        if self.fall_dwell == 0 {
            return Err(Error::Config("fall_dwell must be at least one cycle".into()));
        }
        if !(self.support_margin >= 0.0) {
            return Err(Error::Config("support_margin must be non-negative".into()));
        }
        Ok(())
    }

    pub fn samples(&self, dt: f64) -> usize {
        (self.duration / dt + 1e-9).floor() as usize + 1
    }
}

/// Everything the closed loop needs besides the scenario.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub model: ModelParams,
    pub engine: EngineConfig,
    pub control: ControlConfig,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.engine.validate()?;
        self.control.validate()
    }
}

/// ZMP outside the support polygon shrunk by `margin`, for one sample.
pub fn zmp_outside(zmp: [f64; 2], polygon: &ConvexPolygon, margin: f64) -> bool {
    !polygon.contains_with_margin(zmp, margin)
}

/// Dwell-filtered fall detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FallDetector {
    pub margin: f64,
    pub dwell: usize,
    count: usize,
    fallen: bool,
}

impl FallDetector {
    pub fn new(margin: f64, dwell: usize) -> Self {
        Self { margin, dwell: dwell.max(1), count: 0, fallen: false }
    }

    /// Feed one sample; returns whether a fall has been detected so far.
    pub fn update(&mut self, zmp: [f64; 2], polygon: &ConvexPolygon) -> bool {
        if zmp_outside(zmp, polygon, self.margin) {
            self.count += 1;
        } else {
            self.count = 0;
        }
        self.fallen |= self.count >= self.dwell;
        self.fallen
    }

    pub fn fallen(&self) -> bool {
        self.fallen
    }
}

/// Fall check over a ZMP history with a fixed polygon.
pub fn detect_fall(zmps: &[[f64; 2]], polygon: &ConvexPolygon, margin: f64, dwell: usize) -> bool {
    let mut d = FallDetector::new(margin, dwell);
    zmps.iter().fold(false, |_, z| d.update(*z, polygon))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSample {
    pub t: f64,
    pub phase: Phase,
    pub support_side: Side,
    pub truth: [PendulumState; 2],
    pub estimate: [PendulumState; 2],
    pub reference: [PendulumState; 2],
    pub zmp_ref: [f64; 2],
    pub input: [ControlInput; 2],
    pub zmp: [f64; 2],
    /// Signed distance of the ZMP to the support polygon, positive inside.
    pub zmp_margin: f64,
    pub fell: bool,
}

impl SimSample {
    pub const CSV_HEADER: &'static str = "t,x_c,xd_c,theta_to,thetad_to,y_c,yd_c,\
est_x_c,est_xd_c,est_theta_to,est_thetad_to,est_y_c,est_yd_c,\
ref_x_c,ref_xd_c,ref_theta_to,ref_y_c,ref_yd_c,zmp_ref_x,zmp_ref_y,\
p_x,p_y,thetadd_to,zmp_x,zmp_y,zmp_margin,phase,support_side,fell";

    pub fn csv_row(&self) -> String {
        let [sx, fx] = self.truth;
        let [se, fe] = self.estimate;
        let [sr, fr] = self.reference;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.t,
            sx.x_c,
            sx.xd_c,
            sx.theta_to,
            sx.thetad_to,
            fx.x_c,
            fx.xd_c,
            se.x_c,
            se.xd_c,
            se.theta_to,
            se.thetad_to,
            fe.x_c,
            fe.xd_c,
            sr.x_c,
            sr.xd_c,
            sr.theta_to,
            fr.x_c,
            fr.xd_c,
            self.zmp_ref[0],
            self.zmp_ref[1],
            self.input[0].p_x,
            self.input[1].p_x,
            self.input[0].thetadd_to,
            self.zmp[0],
            self.zmp[1],
            self.zmp_margin,
            self.phase.as_str(),
            self.support_side.as_str(),
            u8::from(self.fell)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunStatus {
    Completed,
    Fell { time: f64 },
    Diverged { time: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSummary {
    pub delta_x: f64,
    pub delta_y: f64,
    pub elapsed: f64,
    /// Scheduled scenario length.
    pub duration: f64,
    pub status: RunStatus,
    pub steps: usize,
    pub final_heading: f64,
}

impl SimSummary {
    pub fn fell(&self) -> bool {
        matches!(self.status, RunStatus::Fell { .. })
    }

    pub fn diverged(&self) -> bool {
        matches!(self.status, RunStatus::Diverged { .. })
    }

    pub fn mean_speed(&self) -> f64 {
        if self.duration > 0.0 {
            self.delta_x / self.duration
        } else {
            0.0
        }
    }

    pub fn fitness(&self) -> f64 {
        evaluate_summary(self)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "delta_x = {}", self.delta_x);
        let _ = writeln!(s, "delta_y = {}", self.delta_y);
        let _ = writeln!(s, "elapsed = {}", self.elapsed);
        let _ = writeln!(s, "duration = {}", self.duration);
        let _ = writeln!(s, "mean_speed = {}", self.mean_speed());
        let _ = writeln!(s, "steps = {}", self.steps);
        let _ = writeln!(s, "final_heading = {}", self.final_heading);
        let _ = writeln!(s, "fell = {}", self.fell());
        let _ = writeln!(s, "diverged = {}", self.diverged());
        let _ = writeln!(s, "fitness = {}", self.fitness());
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub samples: Vec<SimSample>,
    pub summary: SimSummary,
}

impl SimTrace {
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.samples.len() * 400);
        s.push_str(SimSample::CSV_HEADER);
        s.push('\n');
        for row in &self.samples {
            s.push_str(&row.csv_row());
            s.push('\n');
        }
        s
    }

    /// `Err(Diverged)` if the run blew up.
    pub fn check(&self) -> Result<()> {
        match self.summary.status {
            RunStatus::Diverged { time } => Err(Error::Diverged { time }),
            _ => Ok(()),
        }
    }
}

/// Fall penalty of the walking fitness.
pub const FALL_PENALTY: f64 = 100.0;

fn evaluate_summary(s: &SimSummary) -> f64 {
    match s.status {
        RunStatus::Diverged { .. } => FALL_PENALTY,
        RunStatus::Fell { .. } => -s.delta_x.abs() + s.delta_y.abs() + FALL_PENALTY,
        RunStatus::Completed => -s.delta_x.abs() + s.delta_y.abs(),
    }
}

/// Walking fitness, minimized: forward progress lowers it, drift and falls raise it.
pub fn evaluate_fitness(trace: &SimTrace) -> f64 {
    evaluate_summary(&trace.summary)
}

struct Plane {
    nominal: ModelParams,
    ctrl: AxisController,
    nm: NoiseModel,
    filter: FilterState,
    x_i: DVector<f64>,
    x: PendulumState,
}

impl Plane {
    fn new(nominal: ModelParams, control: &ControlConfig, dt: f64, x0: PendulumState) -> Result<Self> {
        let sys = build_two_mass_system(&nominal, nominal.nominal_omega()?);
        let dsys = discretize(&sys, dt)?;
        let ctrl = AxisController::synthesize(&dsys, &control.weights(), &control.dare, control.integrator_limit)?;
        let x_i = ctrl.zero_integrator();
        Ok(Self {
            nominal,
            ctrl,
            nm: control.noise_model(),
            filter: FilterState::new(x0, Matrix4::identity() * 1e-4),
            x_i,
            x: x0,
        })
    }

    /// Parameters at the current COM height; the torso rides rigidly on the lower body.
    fn at_height(&self, z: f64) -> ModelParams {
        ModelParams { z_c: z, z_to: self.nominal.z_to + (z - self.nominal.z_c), ..self.nominal }
    }
}

/// Plant matrices keyed by the exact vertical reference, which repeats every step.
#[derive(Default)]
struct PlantCache {
    map: HashMap<(u64, u64), [(LinearSystem, DiscreteSystem); 2]>,
}

impl PlantCache {
    fn get(
        &mut self,
        planes: &[Plane; 2],
        z: f64,
        zdd: f64,
        omega: f64,
        dt: f64,
    ) -> Result<[(LinearSystem, DiscreteSystem); 2]> {
        let key = (z.to_bits(), zdd.to_bits());
        if let Some(v) = self.map.get(&key) {
            return Ok(*v);
        }
        if self.map.len() > 4096 {
            self.map.clear();
        }
        let build = |plane: &Plane| -> Result<(LinearSystem, DiscreteSystem)> {
            let sys = build_two_mass_system(&plane.at_height(z), omega);
            Ok((sys, discretize(&sys, dt)?))
        };
        let out = [build(&planes[0])?, build(&planes[1])?];
        self.map.insert(key, out);
        Ok(out)
    }
}

fn measure(x: &PendulumState, nm: &NoiseModel, noise: &NoiseLevels, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let mut y = nm.observe(x);
    if noise.com > 0.0 {
        y[0] += Normal::new(0.0, noise.com).expect("finite sigma").sample(rng);
    }
    if noise.torso > 0.0 && y.len() > 1 {
        y[1] += Normal::new(0.0, noise.torso).expect("finite sigma").sample(rng);
    }
    y
}

fn reference_states(out: &EngineOutput) -> [PendulumState; 2] {
    [
        PendulumState::new(out.com[0].pos, out.com[0].vel, out.theta_to, out.thetad_to),
        PendulumState::new(out.com[1].pos, out.com[1].vel, 0.0, 0.0),
    ]
}

fn support_polygon(out: &EngineOutput, cfg: &EngineConfig) -> ConvexPolygon {
    let (l, w) = (cfg.constraints.foot_length, cfg.constraints.foot_width);
    if out.phase == Phase::SingleSupport {
        ConvexPolygon::foot(&out.support, l, w)
    } else {
        ConvexPolygon::two_feet(&out.support, &out.other_foot, l, w)
    }
}

fn build_planes(cfg: &SimConfig) -> Result<[Plane; 2]> {
    let dt = cfg.engine.control_dt;
    Ok([
        Plane::new(cfg.model, &cfg.control, dt, PendulumState::default())?,
        Plane::new(cfg.model.without_torso(), &cfg.control, dt, PendulumState::default())?,
    ])
}

/// Sagittal and frontal trackers for a configuration, as the closed loop builds them.
pub fn synthesize_controllers(cfg: &SimConfig) -> Result<[AxisController; 2]> {
    cfg.validate()?;
    let [a, b] = build_planes(cfg)?;
    Ok([a.ctrl, b.ctrl])
}

fn simulate(scenario: &Scenario, cfg: &SimConfig, mut sink: impl FnMut(SimSample)) -> Result<SimSummary> {
    scenario.validate()?;
    cfg.validate()?;
    let dt = cfg.engine.control_dt;
    let g = cfg.model.g;
    let mut engine = Engine::new(cfg.engine.clone(), &cfg.model)?;
    let mut planes = build_planes(cfg)?;
    let mut cache = PlantCache::default();
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let process =
        (scenario.noise.process > 0.0).then(|| Normal::new(0.0, scenario.noise.process).expect("finite sigma"));
    let mut detector = FallDetector::new(scenario.support_margin, scenario.fall_dwell);

    let start = [planes[0].x.x_c, planes[1].x.x_c];
    let mut y: [DVector<f64>; 2] = [0, 1].map(|i| measure(&planes[i].x, &planes[i].nm, &scenario.noise, &mut rng));
    let n = scenario.samples(dt);
    let mut next_cmd = 0;
    let mut next_impulse = 0;
    let mut status = RunStatus::Completed;
    let mut last_t = 0.0;
    let mut last_heading = 0.0;

    for k in 0..n {
        let t = k as f64 * dt;
        let mut cmd = EngineCommand::None;
        while next_cmd < scenario.commands.len() && scenario.commands[next_cmd].time < t + dt - 1e-9 {
            let resolved = scenario.commands[next_cmd].resolve(&cfg.engine);
            if resolved != EngineCommand::None {
                cmd = resolved;
            }
            next_cmd += 1;
        }
        let out = engine.tick(dt, cmd)?;
        last_t = t;
        last_heading = out.heading;

        let omega = match natural_frequency(out.z_com, out.zdd_com, g) {
            Ok(w) => w,
            Err(_) => {
                // Negative vertical force: the feet leave the ground.
                status = RunStatus::Fell { time: t };
                break;
            }
        };
        let systems = cache.get(&planes, out.z_com, out.zdd_com, omega, dt)?;
        let refs = reference_states(&out);
        let accel_ref = [(out.com[0].acc, out.thetadd_to), (out.com[1].acc, 0.0)];

        let mut inputs = [ControlInput::default(); 2];
        let mut estimates = [PendulumState::default(); 2];
        let mut zmp = [0.0; 2];
        for i in 0..2 {
            let (sys, dsys) = &systems[i];
            let plane = &mut planes[i];
            let ff = if cfg.control.feedforward {
                sys.inverse_input(&refs[i], accel_ref[i].0, accel_ref[i].1).unwrap_or_default()
            } else {
                ControlInput::default()
            };
            let step = lqg_step(&plane.ctrl, &plane.filter, dsys, &plane.nm, &y[i], &refs[i], &ff, &plane.x_i)?;
            inputs[i] = step.u;
            estimates[i] = step.posterior.x_hat;
            plane.filter = step.filter;
            plane.x_i = step.x_i;
            let xdd = sys.com_accel(&plane.x, &step.u);
            let bodies = model_bodies(&plane.at_height(out.z_com), &plane.x, xdd, step.u.thetadd_to, out.zdd_com);
            zmp[i] = zmp_multibody(&bodies, g).unwrap_or(f64::NAN);
        }

        let finite = inputs.iter().all(|u| u.p_x.is_finite() && u.thetadd_to.is_finite())
            && planes.iter().all(|p| p.x.is_finite() && p.filter.x_hat.is_finite())
            && zmp.iter().all(|z| z.is_finite());
        if !finite {
            status = RunStatus::Diverged { time: t };
            break;
        }

        let polygon = support_polygon(&out, &cfg.engine);
        let zmp_margin = polygon.signed_distance(zmp);
        let fell = detector.update(zmp, &polygon);
        sink(SimSample {
            t,
            phase: out.phase,
            support_side: out.support_side,
            truth: [planes[0].x, planes[1].x],
            estimate: estimates,
            reference: refs,
            zmp_ref: out.zmp_ref,
            input: inputs,
            zmp,
            zmp_margin,
            fell,
        });
        if fell {
            status = RunStatus::Fell { time: t };
            break;
        }
        if k + 1 == n {
            break;
        }

        for i in 0..2 {
            let plane = &mut planes[i];
            let mut x = step_dynamics(&systems[i].1, &plane.x, &inputs[i]).to_vector();
            if let Some(dist) = &process {
                for v in x.iter_mut() {
                    *v += dist.sample(&mut rng);
                }
            }
            plane.x = PendulumState::from_vector(&x);
        }
        while next_impulse < scenario.disturbances.len() && scenario.disturbances[next_impulse].time < t + dt - 1e-9 {
            let imp = scenario.disturbances[next_impulse];
            planes[0].x.xd_c += imp.dx;
            planes[1].x.xd_c += imp.dy;
            next_impulse += 1;
        }
        if !planes.iter().all(|p| p.x.is_finite()) {
            status = RunStatus::Diverged { time: t + dt };
            break;
        }
        for i in 0..2 {
            y[i] = measure(&planes[i].x, &planes[i].nm, &scenario.noise, &mut rng);
        }
    }

    let finite_or_zero = |v: f64| if v.is_finite() { v } else { 0.0 };
    Ok(SimSummary {
        delta_x: finite_or_zero(planes[0].x.x_c - start[0]),
        delta_y: finite_or_zero(planes[1].x.x_c - start[1]),
        elapsed: last_t,
        duration: scenario.duration,
        status,
        steps: engine.steps_started(),
        final_heading: last_heading,
    })
}

/// Run a scenario and keep every sample.
pub fn run_scenario(scenario: &Scenario, cfg: &SimConfig) -> Result<SimTrace> {
    let mut samples = Vec::with_capacity(scenario.samples(cfg.engine.control_dt));
    let summary = simulate(scenario, cfg, |s| samples.push(s))?;
    Ok(SimTrace { samples, summary })
}

/// Run a scenario keeping only the summary.
pub fn run_summary(scenario: &Scenario, cfg: &SimConfig) -> Result<SimSummary> {
    simulate(scenario, cfg, |_| {})
}
