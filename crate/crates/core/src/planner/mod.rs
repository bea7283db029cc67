//! Hierarchical reference generation.
//!
//! Footsteps feed a ZMP reference, the swing foot follows a cubic spline
//! between its old and new placement, three sinusoids drive COM height, torso
//! pitch and arms, and the horizontal COM comes from the analytic LIPM
//! solution between step boundaries.

mod com;
mod footsteps;
mod references;
mod spline;

pub use com::{com_state, com_trajectory, step_boundary_target, AxisSample, ComSegment};
pub use footsteps::{
    first_support, next_footstep, plan_footsteps, Footstep, FootstepPlan, Side, StepCommand, StepConstraints,
};
pub use references::{plan_references, references_csv, ReferenceSample, ReferenceSpec, REFERENCE_CSV_HEADER};
pub use spline::{BoundaryCondition, CubicSpline};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::{com_height, com_height_accel, ModelParams};
use crate::error::{Error, Result};

/// ZMP reference within one step.
///
/// Single support holds the ZMP on the support foot; double support blends
/// by the commanded step displacement over `T_ds`.
pub fn zmp_reference(plan: &FootstepPlan, cmd: &StepCommand, t: f64, i: usize) -> Result<(f64, f64)> {
    let f = plan
        .steps
        .get(i)
        .ok_or_else(|| Error::Contract(format!("step index {i} outside a plan of {} steps", plan.steps.len())))?;
    zmp_reference_at((f.x, f.y), cmd, t)
}

/// [`zmp_reference`] for an explicit support-foot position.
pub fn zmp_reference_at(support: (f64, f64), cmd: &StepCommand, t: f64) -> Result<(f64, f64)> {
    let step_time = cmd.t_ss + cmd.t_ds;
    if !(0.0..step_time).contains(&t) {
        return Err(Error::Contract(format!("t = {t} outside the step [0, {step_time})")));
    }
    if t < cmd.t_ss {
        return Ok(support);
    }
    let s = (t - cmd.t_ss) / cmd.t_ds;
    Ok((support.0 + cmd.l_sx * s, support.1 + cmd.l_sy * s))
}

/// Swing-foot apex and endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwingSpec {
    pub z_swing: f64,
    pub start: [f64; 3],
    pub target: [f64; 3],
}

/// Swing-foot position at `t ∈ [0, T_ss]`.
///
/// Horizontal components use a natural cubic through start, midpoint and
/// target; height uses a cubic clamped to zero slope at liftoff and touchdown
/// through `0 → Z_swing → 0`.
pub fn swing_trajectory(spec: &SwingSpec, t: f64, t_ss: f64) -> [f64; 3] {
    let knots = [0.0, 0.5 * t_ss, t_ss];
    let t = t.clamp(0.0, t_ss);
    let mut out = [0.0; 3];
    for (axis, value) in out.iter_mut().enumerate().take(2) {
        let (a, b) = (spec.start[axis], spec.target[axis]);
        let spline = CubicSpline::new(&knots, &[a, 0.5 * (a + b), b], BoundaryCondition::Natural)
            .expect("three increasing knots");
        *value = spline.eval(t);
    }
    let z = CubicSpline::new(&knots, &[0.0, spec.z_swing, 0.0], BoundaryCondition::Clamped(0.0, 0.0))
        .expect("three increasing knots");
    out[2] = z.eval(t);
    out
}

/// Global sinusoid amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SinusoidSpec {
    pub a_z: f64,
    pub phi: f64,
    pub a_to: f64,
    pub ti_to: f64,
    pub a_arm: f64,
}

/// Sinusoid outputs with the derivatives the controller needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidSample {
    pub z_com: f64,
    pub zdd_com: f64,
    pub theta_to: f64,
    pub thetad_to: f64,
    pub thetadd_to: f64,
    pub arm: f64,
}

pub fn sinusoid_trajectories(spec: &SinusoidSpec, t: f64, step_time: f64, z_0: f64) -> Result<SinusoidSample> {
    let vertical = ModelParams { z_c: z_0, a_z: spec.a_z, phi: spec.phi, step_time, ..Default::default() };
    let z_com = com_height(t, &vertical)?;
    let zdd_com = com_height_accel(t, &vertical)?;
    let w = 2.0 * PI / step_time;
    let phase = w * t;
    Ok(SinusoidSample {
        z_com,
        zdd_com,
        theta_to: spec.ti_to + spec.a_to * phase.sin(),
        thetad_to: spec.a_to * w * phase.cos(),
        thetadd_to: -spec.a_to * w * w * phase.sin(),
        arm: spec.a_arm * (phase + PI).sin(),
    })
}
