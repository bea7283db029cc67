//! Integral LQR synthesis on the default plant and a step in the COM reference.

use biped_lqg::control::{AxisController, ControlConfig};
use biped_lqg::dynamics::{build_two_mass_system, discretize, ModelParams};
use biped_lqg::sim::{track_reference, ReferencePoint, TrackingSetup};
use biped_lqg::Result;

fn main() -> Result<()> {
    let model = ModelParams::default();
    let control = ControlConfig::default();
    let dsys = discretize(&build_two_mass_system(&model, model.nominal_omega()?), 0.02)?;
    let ctrl = AxisController::synthesize(&dsys, &control.weights(), &control.dare, control.integrator_limit)?;
    println!("K =\n{}", ctrl.gain.k);
    println!("Riccati residual      {:.3e}", ctrl.dare_residual);
    println!("closed-loop radius    {:.6}", ctrl.closed_loop_radius);

    let setup = TrackingSetup { steps: 250, ..Default::default() };
    let run = track_reference(&setup, |_| ReferencePoint::constant(0.05))?;
    for (t, x) in run.t.iter().zip(&run.truth).step_by(25) {
        println!("t = {t:4.2}  x_c = {:.6}  error = {:+.2e}", x.x_c, x.x_c - 0.05);
    }
    Ok(())
}
