//! Stepping forward, sideways and turning at once, then stopping.

use biped_lqg::planner::StepCommand;
use biped_lqg::sim::{run_scenario, Scenario, SimConfig, TimedCommand};
use biped_lqg::Result;

fn main() -> Result<()> {
    let cmd = StepCommand { l_sx: 0.04, l_sy: 0.02, l_stheta: 0.1, t_ss: 0.4, t_ds: 0.0 };
    let scenario = Scenario {
        duration: 12.0,
        commands: vec![TimedCommand::walk(0.0, cmd), TimedCommand::stop(10.0)],
        ..Default::default()
    };
    let trace = run_scenario(&scenario, &SimConfig::default())?;
    for s in trace.samples.iter().step_by(50) {
        println!("t = {:5.2}  {:<15} com = ({:+.3}, {:+.3})", s.t, s.phase.as_str(), s.truth[0].x_c, s.truth[1].x_c);
    }
    let summary = &trace.summary;
    // The last step before idling only brings the feet together.
    println!("{} steps, heading {:.3} rad", summary.steps, summary.final_heading);
    Ok(())
}
