//! Ten seconds of straight walking through the full closed loop.
//!
//! Pass a directory to also write the trace: `cargo run --example walk_forward -- out`

use biped_lqg::engine::Phase;
use biped_lqg::sim::{run_scenario, NoiseLevels, Scenario, SimConfig};
use biped_lqg::Result;

fn main() -> Result<()> {
    let cfg = SimConfig::default();
    let trace = run_scenario(&Scenario::gait_walk(10.0, 0, NoiseLevels::default()), &cfg)?;
    print!("{}", trace.summary.to_text());

    let single: Vec<f64> =
        trace.samples.iter().filter(|s| s.phase == Phase::SingleSupport).map(|s| s.zmp_margin).collect();
    let inside = single.iter().filter(|m| **m >= 0.005).count();
    let worst = single.iter().copied().fold(f64::INFINITY, f64::min);
    println!(
        "ZMP at least 5 mm inside the foot in {inside}/{} single-support samples (worst {worst:.4} m)",
        single.len()
    );

    if let Some(dir) = std::env::args().nth(1) {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(format!("{dir}/walk_forward.csv"), trace.to_csv())?;
    }
    Ok(())
}
