//! Four-phase walking state machine.
//!
//! The engine advances on a fixed control cycle. Phase changes are driven by
//! timers that count whole cycles, so every step lasts an integer number of
//! ticks and the references line up exactly with the controller samples.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dynamics::ModelParams;
use crate::error::{Error, Result};
use crate::planner::{
    next_footstep, sinusoid_trajectories, step_boundary_target, swing_trajectory, zmp_reference_at, AxisSample,
    ComSegment, Footstep, Side, SinusoidSpec, StepCommand, StepConstraints, SwingSpec,
};

/// The eight walking parameters tuned by the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaitParams {
    pub step_x: f64,
    pub step_y: f64,
    pub step_theta: f64,
    pub z_swing: f64,
    pub t_ss: f64,
    pub ti_to: f64,
    pub a_z: f64,
    pub a_to: f64,
}

impl Default for GaitParams {
    fn default() -> Self {
        Self { step_x: 0.05, step_y: 0.0, step_theta: 0.0, z_swing: 0.03, t_ss: 0.4, ti_to: 0.0, a_z: 0.0, a_to: 0.0 }
    }
}

impl GaitParams {
    pub const NAMES: [&'static str; 8] = ["step_x", "step_y", "step_theta", "z_swing", "t_ss", "ti_to", "a_z", "a_to"];

    pub fn to_array(&self) -> [f64; 8] {
        [self.step_x, self.step_y, self.step_theta, self.z_swing, self.t_ss, self.ti_to, self.a_z, self.a_to]
    }

    pub fn from_array(v: [f64; 8]) -> Self {
        Self {
            step_x: v[0],
            step_y: v[1],
            step_theta: v[2],
            z_swing: v[3],
            t_ss: v[4],
            ti_to: v[5],
            a_z: v[6],
            a_to: v[7],
        }
    }

    pub fn zero() -> Self {
        Self::from_array([0.0; 8])
    }

    pub fn command(&self, t_ds: f64) -> StepCommand {
        StepCommand { l_sx: self.step_x, l_sy: self.step_y, l_stheta: self.step_theta, t_ss: self.t_ss, t_ds }
    }
}

/// Largest change of each command field per step boundary.
///
/// Timing fields are not rate limited; they take the target value at the next boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateLimits {
    pub l_sx: f64,
    pub l_sy: f64,
    pub l_stheta: f64,
}

impl Default for RateLimits {
    fn default() -> Self {
        Self { l_sx: 0.02, l_sy: 0.01, l_stheta: 0.1 }
    }
}

fn approach(current: f64, target: f64, limit: f64) -> f64 {
    current + (target - current).clamp(-limit, limit)
}

pub fn command_smoothing(current: &StepCommand, target: &StepCommand, limits: &RateLimits) -> StepCommand {
    StepCommand {
        l_sx: approach(current.l_sx, target.l_sx, limits.l_sx),
        l_sy: approach(current.l_sy, target.l_sy, limits.l_sy),
        l_stheta: approach(current.l_stheta, target.l_stheta, limits.l_stheta),
        t_ss: target.t_ss,
        t_ds: target.t_ds,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub gait: GaitParams,
    pub init_duration: f64,
    pub control_dt: f64,
    pub t_ds: f64,
    pub a_arm: f64,
    pub constraints: StepConstraints,
    pub rate_limits: RateLimits,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            gait: GaitParams::default(),
            init_duration: 1.0,
            control_dt: 0.02,
            t_ds: 0.0,
            a_arm: 0.0,
            constraints: StepConstraints::default(),
            rate_limits: RateLimits::default(),
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        if !(self.control_dt > 0.0) || !finite(self.control_dt) {
            return Err(Error::Config(format!("control_dt must be positive, got {}", self.control_dt)));
        }
        if !(self.init_duration > 0.0) || !finite(self.init_duration) {
            return Err(Error::Config(format!("init_duration must be positive, got {}", self.init_duration)));
        }
        if !(self.t_ds >= 0.0) {
            return Err(Error::Config(format!("t_ds must be non-negative, got {}", self.t_ds)));
        }
        if self.gait.to_array().iter().any(|v| !finite(*v)) {
            return Err(Error::Config("gait parameters must be finite".into()));
        }
        if self.gait.a_z < 0.0 || self.gait.a_to < 0.0 || self.a_arm < 0.0 || self.gait.z_swing < 0.0 {
            return Err(Error::Config("amplitudes and swing height must be non-negative".into()));
        }
        let r = &self.rate_limits;
        if !(r.l_sx > 0.0 && r.l_sy > 0.0 && r.l_stheta > 0.0) {
            return Err(Error::Config("rate limits must be positive".into()));
        }
        let c = &self.constraints;
        if !(c.lateral_separation > 0.0 && c.foot_length > 0.0 && c.foot_width > 0.0) {
            return Err(Error::Config("foot dimensions and lateral separation must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Idle,
    Initialize,
    SingleSupport,
    DoubleSupport,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Idle => "idle",
            Phase::Initialize => "initialize",
            Phase::SingleSupport => "single_support",
            Phase::DoubleSupport => "double_support",
        }
    }

    pub fn both_feet_down(self) -> bool {
        self != Phase::SingleSupport
    }
}

/// Current phase with its timer, both in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkPhase {
    pub phase: Phase,
    pub phase_timer: f64,
    pub phase_duration: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EngineCommand {
    None,
    Walk(StepCommand),
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub time: f64,
    pub from: Phase,
    pub to: Phase,
}

/// References for one control cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineOutput {
    pub time: f64,
    pub phase: Phase,
    pub support_side: Side,
    pub support: Footstep,
    /// The other foot's planted pose; while swinging, where it lifted off.
    pub other_foot: Footstep,
    pub com: [AxisSample; 2],
    pub z_com: f64,
    pub zdd_com: f64,
    pub zmp_ref: [f64; 2],
    pub swing_foot: [f64; 3],
    pub theta_to: f64,
    pub thetad_to: f64,
    pub thetadd_to: f64,
    pub arm: f64,
    pub heading: f64,
    pub step_index: usize,
    pub command: StepCommand,
}

impl EngineOutput {
    pub const CSV_HEADER: &'static str =
        "t,phase,support_side,step,com_x,com_y,com_vx,com_vy,z_com,zmp_ref_x,zmp_ref_y,\
swing_x,swing_y,swing_z,theta_to,arm,heading";

    pub fn is_finite(&self) -> bool {
        let com = self.com.iter().all(|a| a.pos.is_finite() && a.vel.is_finite() && a.acc.is_finite());
        com && [self.z_com, self.zdd_com, self.theta_to, self.thetad_to, self.thetadd_to, self.arm, self.heading]
            .iter()
            .chain(self.zmp_ref.iter())
            .chain(self.swing_foot.iter())
            .all(|v| v.is_finite())
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.time,
            self.phase.as_str(),
            self.support_side.as_str(),
            self.step_index,
            self.com[0].pos,
            self.com[1].pos,
            self.com[0].vel,
            self.com[1].vel,
            self.z_com,
            self.zmp_ref[0],
            self.zmp_ref[1],
            self.swing_foot[0],
            self.swing_foot[1],
            self.swing_foot[2],
            self.theta_to,
            self.arm,
            self.heading
        )
    }
}

pub fn outputs_to_csv(outputs: &[EngineOutput]) -> String {
    let mut s = String::with_capacity(outputs.len() * 160);
    s.push_str(EngineOutput::CSV_HEADER);
    s.push('\n');
    for o in outputs {
        s.push_str(&o.csv_row());
        s.push('\n');
    }
    s
}

/// Reference trace in the planner export layout.
pub fn references_to_csv(outputs: &[EngineOutput]) -> String {
    let mut s = format!("{}\n", crate::planner::REFERENCE_CSV_HEADER);
    for o in outputs {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            o.time,
            o.zmp_ref[0],
            o.zmp_ref[1],
            o.com[0].pos,
            o.com[1].pos,
            o.z_com,
            o.swing_foot[0],
            o.swing_foot[1],
            o.swing_foot[2],
            o.theta_to
        );
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ComPath {
    Hold([f64; 2]),
    Blend { from: [f64; 2], to: [f64; 2], duration: f64 },
    Pendulum(ComSegment),
}

impl ComPath {
    fn sample(&self, t: f64) -> Result<[AxisSample; 2]> {
        match *self {
            ComPath::Hold(p) => Ok(p.map(|pos| AxisSample { pos, vel: 0.0, acc: 0.0 })),
            ComPath::Blend { from, to, duration } => {
                let s = (t / duration).clamp(0.0, 1.0);
                let w = PI / duration;
                let mut out = [AxisSample::default(); 2];
                for i in 0..2 {
                    let d = to[i] - from[i];
                    out[i] = AxisSample {
                        pos: from[i] + d * 0.5 * (1.0 - (PI * s).cos()),
                        vel: d * 0.5 * w * (PI * s).sin(),
                        acc: d * 0.5 * w * w * (PI * s).cos(),
                    };
                }
                Ok(out)
            }
            ComPath::Pendulum(seg) => seg.sample(t),
        }
    }

    fn end(&self) -> Result<[f64; 2]> {
        Ok(match *self {
            ComPath::Hold(p) => p,
            ComPath::Blend { to, .. } => to,
            ComPath::Pendulum(seg) => {
                let s = seg.sample(seg.duration)?;
                [s[0].pos, s[1].pos]
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct StepState {
    support: Footstep,
    swing_from: Footstep,
    swing_to: Footstep,
    command: StepCommand,
    ss_ticks: usize,
    ds_ticks: usize,
    centering: bool,
}

impl StepState {
    fn t_ss(&self, dt: f64) -> f64 {
        self.ss_ticks as f64 * dt
    }

    fn step_time(&self, dt: f64) -> f64 {
        (self.ss_ticks + self.ds_ticks) as f64 * dt
    }
}

#[derive(Debug, Clone)]
pub struct Engine {
    cfg: EngineConfig,
    z_0: f64,
    phi: f64,
    omega_plan: f64,
    phase: Phase,
    tick_in_phase: usize,
    phase_ticks: usize,
    ticks: u64,
    feet: [Footstep; 2],
    first_support: Side,
    current: StepCommand,
    target: Option<StepCommand>,
    stop_requested: bool,
    resume_after_stop: bool,
    step: Option<StepState>,
    com_path: ComPath,
    torso_hold: f64,
    step_count: usize,
    transitions: Vec<Transition>,
    max_com_jump: f64,
    max_com_vel_jump: f64,
    clamped: bool,
}

fn foot_index(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
    }
}

impl Engine {
    pub fn new(cfg: EngineConfig, model: &ModelParams) -> Result<Self> {
        cfg.validate()?;
        model.validate()?;
        let half = 0.5 * cfg.constraints.lateral_separation;
        let feet = [Footstep::new(0.0, half, 0.0, Side::Left), Footstep::new(0.0, -half, 0.0, Side::Right)];
        Ok(Self {
            z_0: model.z_c,
            phi: model.phi,
            omega_plan: (model.g / model.z_c).sqrt(),
            phase: Phase::Idle,
            tick_in_phase: 0,
            phase_ticks: 0,
            ticks: 0,
            feet,
            first_support: Side::Right,
            current: StepCommand { l_sx: 0.0, l_sy: 0.0, l_stheta: 0.0, t_ss: cfg.gait.t_ss, t_ds: cfg.t_ds },
            target: None,
            stop_requested: false,
            resume_after_stop: false,
            step: None,
            com_path: ComPath::Hold([0.0, 0.0]),
            torso_hold: 0.0,
            step_count: 0,
            transitions: Vec::new(),
            max_com_jump: 0.0,
            max_com_vel_jump: 0.0,
            clamped: false,
            cfg,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn phase(&self) -> WalkPhase {
        let dt = self.cfg.control_dt;
        WalkPhase {
            phase: self.phase,
            phase_timer: self.tick_in_phase as f64 * dt,
            phase_duration: self.phase_ticks as f64 * dt,
        }
    }

    pub fn time(&self) -> f64 {
        self.ticks as f64 * self.cfg.control_dt
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn steps_started(&self) -> usize {
        self.step_count
    }

    /// Largest COM reference position jump observed at a phase boundary.
    pub fn max_com_jump(&self) -> f64 {
        self.max_com_jump
    }

    /// Largest COM reference velocity jump observed at a phase boundary.
    pub fn max_com_velocity_jump(&self) -> f64 {
        self.max_com_vel_jump
    }

    /// Whether any command or foot placement has been clamped to the step constraints.
    pub fn clamped(&self) -> bool {
        self.clamped
    }

    pub fn active_command(&self) -> StepCommand {
        self.current
    }

    pub fn feet(&self) -> [Footstep; 2] {
        self.feet
    }

    fn ticks_for(&self, duration: f64) -> usize {
        (duration / self.cfg.control_dt).round() as usize
    }

    fn gait_sinusoids(&self) -> SinusoidSpec {
        SinusoidSpec {
            a_z: self.cfg.gait.a_z,
            phi: self.phi,
            a_to: self.cfg.gait.a_to,
            ti_to: self.cfg.gait.ti_to,
            a_arm: self.cfg.a_arm,
        }
    }

    fn record(&mut self, to: Phase) {
        self.transitions.push(Transition { time: self.time(), from: self.phase, to });
        self.phase = to;
        self.tick_in_phase = 0;
    }

    fn set_com_path(&mut self, next: ComPath, t_end_prev: f64) -> Result<()> {
        let old = self.com_path.sample(t_end_prev)?;
        let new = next.sample(0.0)?;
        for i in 0..2 {
            self.max_com_jump = self.max_com_jump.max((old[i].pos - new[i].pos).abs());
            self.max_com_vel_jump = self.max_com_vel_jump.max((old[i].vel - new[i].vel).abs());
        }
        self.com_path = next;
        Ok(())
    }

    fn center(&self) -> [f64; 2] {
        [0.5 * (self.feet[0].x + self.feet[1].x), 0.5 * (self.feet[0].y + self.feet[1].y)]
    }

    fn enter_initialize(&mut self, cmd: StepCommand) -> Result<()> {
        self.first_support = crate::planner::first_support(&cmd);
        self.current = StepCommand { l_sx: 0.0, l_sy: 0.0, l_stheta: 0.0, ..cmd };
        self.target = Some(cmd);
        self.stop_requested = false;
        self.resume_after_stop = false;
        self.record(Phase::Initialize);
        self.phase_ticks = self.ticks_for(self.cfg.init_duration).max(1);
        let support = self.feet[foot_index(self.first_support)];
        let from = self.center();
        self.set_com_path(
            ComPath::Blend {
                from,
                to: [support.x, support.y],
                duration: self.phase_ticks as f64 * self.cfg.control_dt,
            },
            0.0,
        )
    }

    fn start_step(&mut self, support_side: Side, prev_duration: f64) -> Result<()> {
        let dt = self.cfg.control_dt;
        let support = self.feet[foot_index(support_side)];
        let swing_from = self.feet[foot_index(support_side.other())];
        let centering = self.stop_requested;
        let (command, swing_to) = if centering {
            let cmd = StepCommand { l_sx: 0.0, l_sy: 0.0, l_stheta: 0.0, ..self.current };
            let sep = self.cfg.constraints.lateral_separation * swing_from.side.sign();
            let (s, c) = support.heading.sin_cos();
            (cmd, Footstep::new(support.x - s * sep, support.y + c * sep, support.heading, swing_from.side))
        } else {
            if let Some(target) = self.target {
                self.current = command_smoothing(&self.current, &target, &self.cfg.rate_limits);
            }
            let (next, clamped) = next_footstep(&support, &self.current, &self.cfg.constraints);
            self.clamped |= clamped;
            (self.current, next)
        };
        let ss_ticks = self.ticks_for(command.t_ss).max(1);
        let ds_ticks = self.ticks_for(command.t_ds);
        let step = StepState { support, swing_from, swing_to, command, ss_ticks, ds_ticks, centering };
        let duration = step.step_time(dt);
        let path = ComPath::Pendulum(ComSegment {
            r_zmp: [support.x, support.y],
            x_0: self.com_path.end()?,
            x_f: [step_boundary_target(support.x, swing_to.x), step_boundary_target(support.y, swing_to.y)],
            duration,
            omega: self.omega_plan,
        });
        self.set_com_path(path, prev_duration)?;
        self.step = Some(step);
        self.step_count += 1;
        self.record(Phase::SingleSupport);
        self.phase_ticks = ss_ticks;
        Ok(())
    }

    fn finish_step(&mut self) -> Result<()> {
        let dt = self.cfg.control_dt;
        let step = self.step.expect("finishing a step that was started");
        self.feet[foot_index(step.swing_to.side)] = step.swing_to;
        let duration = step.step_time(dt);
        if step.centering {
            self.record(Phase::Idle);
            self.phase_ticks = 0;
            self.step = None;
            let center = self.center();
            self.set_com_path(ComPath::Hold(center), duration)?;
            self.torso_hold = self.cfg.gait.ti_to;
            self.current = StepCommand { l_sx: 0.0, l_sy: 0.0, l_stheta: 0.0, ..self.current };
            self.stop_requested = false;
            if self.resume_after_stop {
                if let Some(cmd) = self.target {
                    self.enter_initialize(cmd)?;
                }
            } else {
                self.target = None;
            }
            return Ok(());
        }
        self.start_step(step.swing_to.side, duration)
    }

    fn handle_command(&mut self, cmd: EngineCommand) -> Result<()> {
        match cmd {
            EngineCommand::None => {}
            EngineCommand::Walk(c) => {
                if !c.is_walking() || !(c.t_ds >= 0.0) {
                    return Err(Error::Contract(format!("walk command needs T_ss > 0 and T_ds ≥ 0, got {c:?}")));
                }
                if self.phase == Phase::Idle {
                    self.enter_initialize(c)?;
                } else {
                    self.target = Some(c);
                    if self.stop_requested {
                        if self.step.is_some_and(|s| s.centering) {
                            self.resume_after_stop = true;
                        } else {
                            self.stop_requested = false;
                        }
                    }
                }
            }
            EngineCommand::Stop => {
                if self.phase != Phase::Idle {
                    self.stop_requested = true;
                    self.resume_after_stop = false;
                }
            }
        }
        Ok(())
    }

    /// Advance one control cycle and return the references for it.
    pub fn tick(&mut self, dt: f64, cmd: EngineCommand) -> Result<EngineOutput> {
        if (dt - self.cfg.control_dt).abs() > 1e-12 {
            return Err(Error::Contract(format!("tick dt {dt} differs from control_dt {}", self.cfg.control_dt)));
        }
        self.handle_command(cmd)?;

        // Expired timers fire before producing this cycle's output.
        loop {
            match self.phase {
                Phase::Initialize if self.tick_in_phase >= self.phase_ticks => {
                    let duration = self.phase_ticks as f64 * self.cfg.control_dt;
                    let side = self.first_support;
                    self.start_step(side, duration)?;
                }
                Phase::SingleSupport if self.tick_in_phase >= self.phase_ticks => {
                    let step = self.step.expect("single support has a step");
                    self.record(Phase::DoubleSupport);
                    self.phase_ticks = step.ds_ticks;
                    self.tick_in_phase = 0;
                }
                Phase::DoubleSupport if self.tick_in_phase >= self.phase_ticks => self.finish_step()?,
                _ => break,
            }
        }

        let out = self.output()?;
        self.tick_in_phase += 1;
        self.ticks += 1;
        Ok(out)
    }

    fn output(&self) -> Result<EngineOutput> {
        let dt = self.cfg.control_dt;
        let sin = self.gait_sinusoids();
        let standing_z = self.z_0 + sin.a_z * self.phi.cos();
        let local = self.tick_in_phase as f64 * dt;
        let mut out = EngineOutput {
            time: self.time(),
            phase: self.phase,
            support_side: self.first_support,
            support: self.feet[foot_index(self.first_support)],
            other_foot: self.feet[foot_index(self.first_support.other())],
            com: [AxisSample::default(); 2],
            z_com: standing_z,
            zdd_com: 0.0,
            zmp_ref: [0.0; 2],
            swing_foot: [0.0; 3],
            theta_to: self.torso_hold,
            thetad_to: 0.0,
            thetadd_to: 0.0,
            arm: 0.0,
            heading: self.feet[foot_index(self.first_support)].heading,
            step_index: self.step_count,
            command: self.current,
        };
        match self.phase {
            Phase::Idle => {
                out.com = self.com_path.sample(0.0)?;
                out.zmp_ref = [out.com[0].pos, out.com[1].pos];
                out.swing_foot = [out.other_foot.x, out.other_foot.y, 0.0];
            }
            Phase::Initialize => {
                let duration = self.phase_ticks as f64 * dt;
                out.com = self.com_path.sample(local)?;
                let omega2 = self.omega_plan * self.omega_plan;
                out.zmp_ref = [0, 1].map(|i| out.com[i].pos - out.com[i].acc / omega2);
                out.swing_foot = [out.other_foot.x, out.other_foot.y, 0.0];
                let s = local / duration;
                let d = sin.ti_to - self.torso_hold;
                let w = PI / duration;
                out.theta_to = self.torso_hold + d * 0.5 * (1.0 - (PI * s).cos());
                out.thetad_to = d * 0.5 * w * (PI * s).sin();
                out.thetadd_to = d * 0.5 * w * w * (PI * s).cos();
            }
            Phase::SingleSupport | Phase::DoubleSupport => {
                let step = self.step.expect("support phases have a step");
                let tau = if self.phase == Phase::SingleSupport { local } else { step.t_ss(dt) + local };
                let t_ss = step.t_ss(dt);
                let step_time = step.step_time(dt);
                out.support_side = step.support.side;
                out.support = step.support;
                out.other_foot = step.swing_from;
                out.heading = step.support.heading;
                out.command = step.command;
                out.com = self.com_path.sample(tau)?;
                let timing = StepCommand { t_ss, t_ds: step_time - t_ss, ..step.command };
                let (zx, zy) = zmp_reference_at((step.support.x, step.support.y), &timing, tau)?;
                out.zmp_ref = [zx, zy];
                let swing = SwingSpec {
                    z_swing: self.cfg.gait.z_swing,
                    start: [step.swing_from.x, step.swing_from.y, 0.0],
                    target: [step.swing_to.x, step.swing_to.y, 0.0],
                };
                out.swing_foot = swing_trajectory(&swing, tau, t_ss);
                if self.phase == Phase::DoubleSupport {
                    out.other_foot = step.swing_to;
                }
                let s = sinusoid_trajectories(&sin, tau, step_time, self.z_0)?;
                out.z_com = s.z_com;
                out.zdd_com = s.zdd_com;
                out.theta_to = s.theta_to;
                out.thetad_to = s.thetad_to;
                out.thetadd_to = s.thetadd_to;
                out.arm = s.arm;
            }
        }
        Ok(out)
    }

    /// Human-readable dump of the machine state.
    pub fn diagnostic(&self) -> String {
        let p = self.phase();
        let mut s = String::new();
        let _ = writeln!(s, "time            {:.4}", self.time());
        let _ = writeln!(s, "phase           {} ({:.3}/{:.3} s)", p.phase.as_str(), p.phase_timer, p.phase_duration);
        let _ = writeln!(s, "steps started   {}", self.step_count);
        let _ = writeln!(s, "active command  {:?}", self.current);
        let _ = writeln!(s, "target command  {:?}", self.target);
        let _ = writeln!(s, "stop requested  {}", self.stop_requested);
        for f in &self.feet {
            let _ = writeln!(s, "{:<5} foot      ({:.4}, {:.4}) heading {:.4}", f.side.as_str(), f.x, f.y, f.heading);
        }
        let _ = writeln!(s, "max COM jump    {:e}", self.max_com_jump);
        let _ = writeln!(s, "clamped         {}", self.clamped);
        s
    }
}
