//! Command-line front end.
//!
//! Exit codes: 0 success, 1 unreadable or invalid input, 2 the robot fell,
//! 3 the closed loop diverged or the controller could not be synthesized.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{gait_to_toml, load_scenario, AppConfig};
use crate::error::{Error, Result};
use crate::optimizer::{evaluation_seed, optimize};
use crate::planner::{
    first_support, plan_footsteps, plan_references, references_csv, Footstep, ReferenceSpec, SinusoidSpec,
};
use crate::sim::{run_scenario, RunStatus, SimConfig, SimTrace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FELL: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "biped-lqg", version, about = "Two-mass LIPM walking engine with LQG control")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; defaults to the config's `output_dir`, then `out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario through the closed loop.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Scenario file; overrides the config's `scenario`.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a GA campaign over the gait parameters.
    Optimize {
        #[command(flatten)]
        common: Common,
        /// Overrides the campaign's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write the footstep plan and open-loop references for the configured gait.
    Plan {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Check a config (and scenario) and synthesize the controllers.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Diverged { .. } | Error::NoConvergence { .. } | Error::Numerical(_) | Error::SingularConfiguration => {
            EXIT_DIVERGED
        }
        _ => EXIT_INPUT,
    }
}

fn status_code(status: RunStatus) -> i32 {
    match status {
        RunStatus::Completed => EXIT_OK,
        RunStatus::Fell { .. } => EXIT_FELL,
        RunStatus::Diverged { .. } => EXIT_DIVERGED,
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Simulate { common, scenario, seed } => simulate(common, scenario.as_deref(), *seed),
        Command::Optimize { common, seed } => optimize_cmd(common, *seed),
        Command::Plan { common, steps } => plan(common, *steps),
        Command::Validate { config, scenario } => validate(config, scenario.as_deref()),
    }
}

fn output_dir(common: &Common, cfg: &AppConfig) -> Result<PathBuf> {
    let dir = common.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_trace(dir: &Path, prefix: &str, trace: &SimTrace) -> Result<()> {
    write(dir, &format!("{prefix}trace.csv"), &trace.to_csv())?;
    write(dir, &format!("{prefix}summary.txt"), &trace.summary.to_text())
}

fn simulate(common: &Common, scenario: Option<&Path>, seed: Option<u64>) -> Result<i32> {
    let cfg = AppConfig::load(&common.config)?;
    let path = scenario
        .map(Path::to_path_buf)
        .or_else(|| cfg.scenario.clone())
        .ok_or_else(|| Error::Config("no scenario: pass --scenario or set `scenario` in the config".into()))?;
    let mut scenario = load_scenario(&path)?;
    if let Some(s) = seed {
        scenario.seed = s;
    }
    let dir = output_dir(common, &cfg)?;
    let trace = run_scenario(&scenario, &cfg.sim())?;
    write_trace(&dir, "", &trace)?;
    if !common.quiet {
        print!("{}", trace.summary.to_text());
    }
    Ok(status_code(trace.summary.status))
}

fn optimize_cmd(common: &Common, seed: Option<u64>) -> Result<i32> {
    let cfg = AppConfig::load(&common.config)?;
    let mut ga = cfg.ga.clone();
    if let Some(s) = seed {
        ga.seed = s;
    }
    let dir = output_dir(common, &cfg)?;
    let base = cfg.sim();
    let quiet = common.quiet;
    let result = optimize(&base, &ga, |r| {
        if !quiet {
            println!("generation {:>3}  best {:>10.5}  mean {:>10.5}", r.generation, r.best, r.mean);
        }
    })?;
    write(&dir, "ga_history.csv", &result.history_csv())?;
    write(&dir, "ga_summary.txt", &result.summary_text())?;
    write(
        &dir,
        "best_gait.toml",
        &gait_to_toml(&result.best, &format!("GA best gait, mean fitness {}", result.best_fitness)),
    )?;

    let verify = SimConfig { engine: crate::engine::EngineConfig { gait: result.best, ..base.engine.clone() }, ..base };
    let scenario = crate::sim::Scenario::gait_walk(
        ga.eval.duration,
        evaluation_seed(ga.seed, ga.generations + 1, 0, 0),
        ga.eval.noise,
    );
    let trace = run_scenario(&scenario, &verify)?;
    write_trace(&dir, "best_", &trace)?;
    if !quiet {
        print!("{}", result.summary_text());
    }
    Ok(status_code(trace.summary.status))
}

fn plan(common: &Common, steps: usize) -> Result<i32> {
    let cfg = AppConfig::load(&common.config)?;
    let dir = output_dir(common, &cfg)?;
    let engine = &cfg.engine;
    let cmd = engine.gait.command(engine.t_ds);
    let half = 0.5 * engine.constraints.lateral_separation;
    let side = first_support(&cmd);
    let start = Footstep::new(0.0, side.sign() * half, 0.0, side);
    let footsteps = plan_footsteps(&cmd, steps, &start, &engine.constraints);
    let spec = ReferenceSpec {
        cmd,
        z_swing: engine.gait.z_swing,
        sinusoids: SinusoidSpec {
            a_z: engine.gait.a_z,
            phi: cfg.model.phi,
            a_to: engine.gait.a_to,
            ti_to: engine.gait.ti_to,
            a_arm: engine.a_arm,
        },
        z_0: cfg.model.z_c,
        g: cfg.model.g,
        dt: engine.control_dt,
    };
    let refs = plan_references(&footsteps, &start, &engine.constraints, &spec)?;
    write(&dir, "footsteps.csv", &footsteps.to_csv())?;
    write(&dir, "references.csv", &references_csv(&refs))?;
    if !common.quiet {
        println!(
            "planned {steps} steps ({} reference samples){}",
            refs.len(),
            if footsteps.clamped { ", command clamped" } else { "" }
        );
    }
    Ok(EXIT_OK)
}

fn validate(config: &Path, scenario: Option<&Path>) -> Result<i32> {
    let cfg = AppConfig::load(config)?;
    if let Some(path) = scenario.map(Path::to_path_buf).or_else(|| cfg.scenario.clone()) {
        load_scenario(&path)?;
    }
    crate::sim::synthesize_controllers(&cfg.sim())?;
    println!("{}: ok", config.display());
    Ok(EXIT_OK)
}
