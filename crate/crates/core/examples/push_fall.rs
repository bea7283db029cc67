//! Shoving a standing robot: small pushes are absorbed, large ones are not.
//!
//! A point-foot pendulum can absorb a velocity change of at most
//! `omega * d`, with `d` the distance from the COM to the edge of the foot.

use biped_lqg::sim::{run_summary, Impulse, Scenario, SimConfig};
use biped_lqg::Result;

fn main() -> Result<()> {
    let cfg = SimConfig::default();
    let omega = cfg.model.nominal_omega()?;
    let reach = 0.5 * cfg.engine.constraints.foot_length;
    println!("capture bound ~ {:.2} m/s", omega * reach);
    for dx in [0.1, 0.2, 0.3, 0.5, 1.0, 1.5] {
        let scenario =
            Scenario { duration: 4.0, disturbances: vec![Impulse { time: 1.0, dx, dy: 0.0 }], ..Default::default() };
        let s = run_summary(&scenario, &cfg)?;
        println!("push {dx:.1} m/s -> {:?}", s.status);
    }
    Ok(())
}
