//! Footstep placement for a curved sidestepping walk, plus the open-loop
//! references that go with it.

use biped_lqg::planner::{
    plan_footsteps, plan_references, Footstep, ReferenceSpec, Side, SinusoidSpec, StepCommand, StepConstraints,
};
use biped_lqg::Result;

fn main() -> Result<()> {
    let constraints = StepConstraints::default();
    let cmd = StepCommand { l_sx: 0.05, l_sy: 0.02, l_stheta: 0.15, t_ss: 0.4, t_ds: 0.0 };
    let start = Footstep::new(0.0, -0.05, 0.0, Side::Right);
    let plan = plan_footsteps(&cmd, 10, &start, &constraints);
    print!("{}", plan.to_csv());

    let spec = ReferenceSpec {
        cmd,
        z_swing: 0.03,
        sinusoids: SinusoidSpec { a_z: 0.005, a_to: 0.05, ..Default::default() },
        z_0: 0.23,
        g: 9.81,
        dt: 0.02,
    };
    let refs = plan_references(&plan, &start, &constraints, &spec)?;
    let highest = refs.iter().map(|r| r.swing[2]).fold(0.0, f64::max);
    println!("{} reference samples, swing apex {highest:.3} m", refs.len());
    if let Some(last) = refs.last() {
        println!("final COM ({:.3}, {:.3})", last.com[0].pos, last.com[1].pos);
    }
    Ok(())
}
