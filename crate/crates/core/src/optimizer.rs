//! Real-coded genetic algorithm over the eight gait parameters.
//!
//! Evaluations run in parallel, but every random draw that affects a result
//! is derived from the master seed and the evaluation's position in the run,
//! so results do not depend on thread scheduling.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::GaitParams;
use crate::error::{Error, Result};
use crate::sim::{run_summary, NoiseLevels, Scenario, SimConfig, FALL_PENALTY};

/// Search box for each gait parameter, as `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GABounds {
    pub step_x: [f64; 2],
    pub step_y: [f64; 2],
    pub step_theta: [f64; 2],
    pub z_swing: [f64; 2],
    pub t_ss: [f64; 2],
    pub ti_to: [f64; 2],
    pub a_z: [f64; 2],
    pub a_to: [f64; 2],
}

impl Default for GABounds {
    fn default() -> Self {
        Self {
            step_x: [0.0, 0.12],
            step_y: [-0.05, 0.05],
            step_theta: [-0.3, 0.3],
            z_swing: [0.01, 0.06],
            t_ss: [0.2, 0.8],
            ti_to: [-0.2, 0.2],
            a_z: [0.0, 0.04],
            a_to: [0.0, 0.15],
        }
    }
}

impl GABounds {
    pub fn ranges(&self) -> [[f64; 2]; 8] {
        [self.step_x, self.step_y, self.step_theta, self.z_swing, self.t_ss, self.ti_to, self.a_z, self.a_to]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, [lo, hi]) in GaitParams::NAMES.iter().zip(self.ranges()) {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Config(format!("bounds for {name} must satisfy min < max, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    pub fn contains(&self, g: &GaitParams) -> bool {
        g.to_array().iter().zip(self.ranges()).all(|(v, [lo, hi])| *v >= lo && *v <= hi)
    }

    pub fn clamp(&self, genome: [f64; 8]) -> [f64; 8] {
        let r = self.ranges();
        std::array::from_fn(|i| genome[i].clamp(r[i][0], r[i][1]))
    }

    /// One tenth of each range; the default mutation width.
    pub fn tenth_ranges(&self) -> [f64; 8] {
        self.ranges().map(|[lo, hi]| 0.1 * (hi - lo))
    }
}

/// How one candidate is scored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub duration: f64,
    pub noise: NoiseLevels,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { duration: 10.0, noise: NoiseLevels { com: 0.005, torso: 0.005, process: 0.0 } }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GAConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    /// Per-gene mutation standard deviation; defaults to a tenth of each default range.
    pub mutation_sigma: [f64; 8],
    pub elitism: usize,
    pub tournament: usize,
    pub repeats: usize,
    pub seed: u64,
    pub bounds: GABounds,
    pub eval: EvalConfig,
}

impl Default for GAConfig {
    fn default() -> Self {
        let bounds = GABounds::default();
        Self {
            population: 20,
            generations: 30,
            crossover_rate: 0.9,
            mutation_rate: 0.2,
            mutation_sigma: bounds.tenth_ranges(),
            elitism: 2,
            tournament: 3,
            repeats: 3,
            seed: 1,
            bounds,
            eval: EvalConfig::default(),
        }
    }
}

impl GAConfig {
    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()?;
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if self.population < 2 {
            return Err(Error::Config("population must be at least 2".into()));
        }
        if !unit(self.crossover_rate) || !unit(self.mutation_rate) {
            return Err(Error::Config("crossover and mutation rates must lie in [0, 1]".into()));
        }
        if self.mutation_sigma.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return Err(Error::Config("mutation sigmas must be finite and non-negative".into()));
        }
        if self.repeats == 0 || self.tournament == 0 {
            return Err(Error::Config("repeats and tournament size must be at least 1".into()));
        }
        if self.elitism > self.population {
            return Err(Error::Config("elitism cannot exceed the population".into()));
        }
        if !(self.eval.duration > 0.0) {
            return Err(Error::Config("evaluation duration must be positive".into()));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer, used to derive independent stream seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Noise seed for one simulation of the campaign.
pub fn evaluation_seed(master: u64, generation: usize, index: usize, repeat: usize) -> u64 {
    [generation as u64, index as u64, repeat as u64].iter().fold(mix(master), |h, v| mix(h ^ v))
}

/// Mean walking fitness of a gait over `repeats` noisy runs.
///
/// A diverged run scores as a fall with no progress.
pub fn evaluate(gait: &GaitParams, base: &SimConfig, eval: &EvalConfig, seeds: &[u64]) -> Result<f64> {
    if seeds.is_empty() {
        return Err(Error::Contract("evaluate needs at least one repeat".into()));
    }
    let mut cfg = base.clone();
    cfg.engine.gait = *gait;
    let mut total = 0.0;
    for &seed in seeds {
        let scenario = Scenario::gait_walk(eval.duration, seed, eval.noise);
        total += match run_summary(&scenario, &cfg) {
            Ok(s) => s.fitness(),
            Err(Error::Diverged { .. }) => FALL_PENALTY,
            Err(e) => return Err(e),
        };
    }
    Ok(total / seeds.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Best fitness found so far.
    pub best: f64,
    pub mean: f64,
    pub best_genome: GaitParams,
    pub distinct_genomes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GAResult {
    pub best: GaitParams,
    pub best_fitness: f64,
    pub history: Vec<GenerationRecord>,
    pub evaluations: usize,
}

impl GAResult {
    pub fn initial_best(&self) -> f64 {
        self.history[0].best
    }

    pub fn history_csv(&self) -> String {
        let mut s = String::from("generation,best,mean");
        for n in GaitParams::NAMES {
            s.push(',');
            s.push_str(n);
        }
        s.push('\n');
        for r in &self.history {
            let _ = write!(s, "{},{},{}", r.generation, r.best, r.mean);
            for v in r.best_genome.to_array() {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
        s
    }

    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "generations = {}", self.history.len().saturating_sub(1));
        let _ = writeln!(s, "evaluations = {}", self.evaluations);
        let _ = writeln!(s, "initial_best = {}", self.initial_best());
        let _ = writeln!(s, "best_fitness = {}", self.best_fitness);
        for (n, v) in GaitParams::NAMES.iter().zip(self.best.to_array()) {
            let _ = writeln!(s, "{n} = {v}");
        }
        s
    }
}

#[derive(Debug, Clone, Copy)]
struct Individual {
    genome: [f64; 8],
    fitness: f64,
}

fn evaluate_batch(
    genomes: &[[f64; 8]],
    generation: usize,
    first_index: usize,
    base: &SimConfig,
    cfg: &GAConfig,
) -> Result<Vec<Individual>> {
    genomes
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let seeds: Vec<u64> =
                (0..cfg.repeats).map(|r| evaluation_seed(cfg.seed, generation, first_index + i, r)).collect();
            let fitness = evaluate(&GaitParams::from_array(*g), base, &cfg.eval, &seeds)?;
            Ok(Individual { genome: *g, fitness })
        })
        .collect()
}

fn tournament<'a>(pop: &'a [Individual], size: usize, rng: &mut ChaCha8Rng) -> &'a Individual {
    let mut best = &pop[rng.gen_range(0..pop.len())];
    for _ in 1..size {
        let c = &pop[rng.gen_range(0..pop.len())];
        if c.fitness < best.fitness {
            best = c;
        }
    }
    best
}

fn record(generation: usize, pop: &[Individual], best: &Individual) -> GenerationRecord {
    let mean = pop.iter().map(|i| i.fitness).sum::<f64>() / pop.len() as f64;
    let mut genomes: Vec<[u64; 8]> = pop.iter().map(|i| i.genome.map(f64::to_bits)).collect();
    genomes.sort_unstable();
    genomes.dedup();
    GenerationRecord {
        generation,
        best: best.fitness,
        mean,
        best_genome: GaitParams::from_array(best.genome),
        distinct_genomes: genomes.len(),
    }
}

/// Run a campaign, calling `progress` after every generation.
pub fn optimize(base: &SimConfig, cfg: &GAConfig, mut progress: impl FnMut(&GenerationRecord)) -> Result<GAResult> {
    cfg.validate()?;
    base.validate()?;
    let ranges = cfg.bounds.ranges();
    let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed ^ 0x6761));
    let initial: Vec<[f64; 8]> =
        (0..cfg.population).map(|_| std::array::from_fn(|i| rng.gen_range(ranges[i][0]..=ranges[i][1]))).collect();
    let mut pop = evaluate_batch(&initial, 0, 0, base, cfg)?;
    let mut evaluations = pop.len() * cfg.repeats;

    let better = |a: &Individual, b: &Individual| a.fitness < b.fitness;
    let mut best = *pop.iter().reduce(|a, b| if better(b, a) { b } else { a }).expect("non-empty population");
    let mut history = vec![record(0, &pop, &best)];
    progress(&history[0]);

    let sigma = cfg.mutation_sigma;
    for generation in 1..=cfg.generations {
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&a, &b| pop[a].fitness.total_cmp(&pop[b].fitness).then(a.cmp(&b)));
        let elites: Vec<Individual> = order.iter().take(cfg.elitism).map(|&i| pop[i]).collect();

        let mut children = Vec::with_capacity(cfg.population - elites.len());
        while elites.len() + children.len() < cfg.population {
            let a = tournament(&pop, cfg.tournament, &mut rng).genome;
            let b = tournament(&pop, cfg.tournament, &mut rng).genome;
            let mut child = a;
            if rng.gen::<f64>() < cfg.crossover_rate {
                for i in 0..8 {
                    let w = rng.gen_range(-0.1..=1.1);
                    child[i] = w * a[i] + (1.0 - w) * b[i];
                }
            }
            for i in 0..8 {
                if sigma[i] > 0.0 && rng.gen::<f64>() < cfg.mutation_rate {
                    child[i] += Normal::new(0.0, sigma[i]).expect("finite sigma").sample(&mut rng);
                }
            }
            children.push(cfg.bounds.clamp(child));
        }
        let evaluated = evaluate_batch(&children, generation, elites.len(), base, cfg)?;
        evaluations += evaluated.len() * cfg.repeats;
        pop = elites.into_iter().chain(evaluated).collect();

        for ind in &pop {
            if better(ind, &best) {
                best = *ind;
            }
        }
        history.push(record(generation, &pop, &best));
        progress(history.last().expect("just pushed"));
    }

    Ok(GAResult { best: GaitParams::from_array(best.genome), best_fitness: best.fitness, history, evaluations })
}
