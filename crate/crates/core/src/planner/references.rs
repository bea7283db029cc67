use std::fmt::Write as _;

use super::{
    next_footstep, sinusoid_trajectories, step_boundary_target, swing_trajectory, zmp_reference_at, AxisSample,
    ComSegment, Footstep, FootstepPlan, SinusoidSpec, StepCommand, StepConstraints, SwingSpec,
};
use crate::error::{Error, Result};

pub const REFERENCE_CSV_HEADER: &str = "t,r_zmp_x,r_zmp_y,com_x,com_y,z_com,swing_x,swing_y,swing_z,theta_to_ref";

/// One sample of the open-loop reference bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSample {
    pub t: f64,
    pub zmp: (f64, f64),
    pub com: [AxisSample; 2],
    pub z_com: f64,
    pub swing: [f64; 3],
    pub theta_to: f64,
}

/// Settings shared by every step of an open-loop reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSpec {
    pub cmd: StepCommand,
    pub z_swing: f64,
    pub sinusoids: SinusoidSpec,
    pub z_0: f64,
    pub g: f64,
    pub dt: f64,
}

/// Sample the references for every step of `plan`, starting with the COM
/// centred between `start` and the foot alongside it.
///
/// Step `k` stands on the previous placement (`start` for the first) with
/// the swing foot travelling to `plan.steps[k]`.
pub fn plan_references(
    plan: &FootstepPlan,
    start: &Footstep,
    constraints: &StepConstraints,
    spec: &ReferenceSpec,
) -> Result<Vec<ReferenceSample>> {
    let step_time = spec.cmd.step_time();
    if !(spec.dt > 0.0) || !(spec.cmd.t_ss > 0.0) {
        return Err(Error::Contract("references need a positive tick and single-support time".into()));
    }
    let ticks = (step_time / spec.dt).round().max(1.0) as usize;
    let quantized = ticks as f64 * spec.dt;
    let cmd = StepCommand {
        t_ss: spec.cmd.t_ss * quantized / step_time,
        t_ds: spec.cmd.t_ds * quantized / step_time,
        ..spec.cmd
    };
    let omega = (spec.g / spec.z_0).sqrt();

    let (mut other, _) = next_footstep(start, &StepCommand { l_sx: 0.0, l_sy: 0.0, l_stheta: 0.0, ..cmd }, constraints);
    let mut support = *start;
    let mut com = [step_boundary_target(support.x, other.x), step_boundary_target(support.y, other.y)];
    let mut out = Vec::with_capacity(plan.steps.len() * ticks);
    for (k, target) in plan.steps.iter().enumerate() {
        let x_f = [step_boundary_target(support.x, target.x), step_boundary_target(support.y, target.y)];
        let segment = ComSegment { r_zmp: [support.x, support.y], x_0: com, x_f, duration: quantized, omega };
        let swing =
            SwingSpec { z_swing: spec.z_swing, start: [other.x, other.y, 0.0], target: [target.x, target.y, 0.0] };
        for j in 0..ticks {
            let t = j as f64 * spec.dt;
            let s = sinusoid_trajectories(&spec.sinusoids, t, quantized, spec.z_0)?;
            out.push(ReferenceSample {
                t: (k * ticks + j) as f64 * spec.dt,
                zmp: zmp_reference_at((support.x, support.y), &cmd, t)?,
                com: segment.sample(t)?,
                z_com: s.z_com,
                swing: swing_trajectory(&swing, t, cmd.t_ss),
                theta_to: s.theta_to,
            });
        }
        com = x_f;
        other = support;
        support = *target;
    }
    Ok(out)
}

pub fn references_csv(samples: &[ReferenceSample]) -> String {
    let mut s = String::with_capacity(64 + samples.len() * 120);
    s.push_str(REFERENCE_CSV_HEADER);
    s.push('\n');
    for r in samples {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.t, r.zmp.0, r.zmp.1, r.com[0].pos, r.com[1].pos, r.z_com, r.swing[0], r.swing[1], r.swing[2], r.theta_to
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::{plan_footsteps, Side};
    use approx::assert_abs_diff_eq;

    fn spec(l_sx: f64) -> ReferenceSpec {
        ReferenceSpec {
            cmd: StepCommand { l_sx, ..Default::default() },
            z_swing: 0.03,
            sinusoids: SinusoidSpec::default(),
            z_0: 0.23,
            g: 9.81,
            dt: 0.02,
        }
    }

    #[test]
    fn references_follow_the_plan() {
        let c = StepConstraints::default();
        let start = Footstep { x: 0.0, y: -0.05, heading: 0.0, side: Side::Right };
        let s = spec(0.05);
        let plan = plan_footsteps(&s.cmd, 3, &start, &c);
        let refs = plan_references(&plan, &start, &c, &s).unwrap();
        assert_eq!(refs.len(), 60);
        assert_abs_diff_eq!(refs[0].com[0].pos, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(refs[0].com[1].pos, 0.0, epsilon = 1e-12);
        assert_eq!(refs[25].zmp, (plan.steps[0].x, plan.steps[0].y));
        // Swing lands where the plan says at the end of each step.
        let end = swing_trajectory(
            &SwingSpec {
                z_swing: 0.03,
                start: [plan.steps[0].x, plan.steps[0].y, 0.0],
                target: [plan.steps[2].x, plan.steps[2].y, 0.0],
            },
            0.4,
            0.4,
        );
        assert_abs_diff_eq!(end[0], plan.steps[2].x, epsilon = 1e-12);
        for w in refs.windows(2) {
            assert!((w[1].com[0].pos - w[0].com[0].pos).abs() < 0.02);
        }
        assert_eq!(references_csv(&refs).lines().count(), 61);
        assert_eq!(references_csv(&[]), format!("{REFERENCE_CSV_HEADER}\n"));
    }
}
