//! The two-mass pendulum: continuous model, its exact discretization, and the
//! ZMP it produces.

use biped_lqg::dynamics::{
    build_two_mass_system, discretize, model_bodies, step_dynamics, zmp_multibody, ControlInput, ModelParams,
    PendulumState,
};
use biped_lqg::Result;

fn main() -> Result<()> {
    let p = ModelParams::default();
    let omega = p.nominal_omega()?;
    let sys = build_two_mass_system(&p, omega);
    let dsys = discretize(&sys, 0.02)?;
    println!("omega = {omega:.4} rad/s");
    println!("A =\n{}", sys.a);
    println!("Ad (dt = 0.02) =\n{}", dsys.ad);

    // With the ZMP pinned at the origin a 1 cm offset runs away.
    let mut x = PendulumState::new(0.01, 0.0, 0.0, 0.0);
    let u = ControlInput::new(0.0, 0.0);
    for k in 0..=25 {
        if k % 5 == 0 {
            let xdd = sys.com_accel(&x, &u);
            let zmp = zmp_multibody(&model_bodies(&p, &x, xdd, 0.0, 0.0), p.g)?;
            println!("t = {:.2}  x_c = {:+.5}  xd_c = {:+.5}  zmp = {:+.2e}", k as f64 * 0.02, x.x_c, x.xd_c, zmp);
        }
        x = step_dynamics(&dsys, &x, &u);
    }
    Ok(())
}
