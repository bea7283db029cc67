//! A GA campaign over the gait parameters.
//!
//! `cargo run --release --example ga_campaign -- [generations] [seed]`

use biped_lqg::optimizer::{optimize, GAConfig};
use biped_lqg::sim::SimConfig;
use biped_lqg::Result;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let generations = args.next().and_then(|a| a.parse().ok()).unwrap_or(10);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let cfg = GAConfig { generations, seed, ..Default::default() };
    let result = optimize(&SimConfig::default(), &cfg, |r| {
        println!("generation {:>3}  best {:>9.4}  mean {:>9.4}", r.generation, r.best, r.mean);
    })?;
    print!("{}", result.summary_text());
    Ok(())
}
