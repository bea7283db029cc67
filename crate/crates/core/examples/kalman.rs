//! Closed-loop tracking with noisy position sensing: how much the filter
//! cleans up the COM measurement.

use biped_lqg::sim::{track_reference, NoiseLevels, ReferencePoint, TrackingSetup};
use biped_lqg::Result;

fn main() -> Result<()> {
    println!("sigma    measured   estimated  ratio");
    for sigma in [0.002, 0.005, 0.01, 0.02] {
        let setup = TrackingSetup {
            steps: 2000,
            noise: NoiseLevels { com: sigma, torso: sigma, process: 0.0 },
            seed: 3,
            ..Default::default()
        };
        let run = track_reference(&setup, |_| ReferencePoint::constant(0.0))?;
        let (m, e) = (run.measurement_rmse(), run.estimate_rmse());
        println!("{sigma:<8} {m:.6}   {e:.6}   {:.3}", e / m);
    }
    Ok(())
}
