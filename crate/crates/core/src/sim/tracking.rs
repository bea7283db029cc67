//! Single-plane LQG tracking of an arbitrary reference, without the gait machinery.

use nalgebra::Matrix4;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{measure, NoiseLevels};
use crate::control::{lqg_step, AxisController, ControlConfig};
use crate::dynamics::{build_two_mass_system, discretize, step_dynamics, ControlInput, ModelParams, PendulumState};
use crate::error::{Error, Result};
use crate::estimation::FilterState;

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingSetup {
    pub model: ModelParams,
    pub control: ControlConfig,
    pub dt: f64,
    pub steps: usize,
    pub noise: NoiseLevels,
    pub seed: u64,
    pub initial: PendulumState,
}

impl Default for TrackingSetup {
    fn default() -> Self {
        Self {
            model: ModelParams::default(),
            control: ControlConfig::default(),
            dt: 0.02,
            steps: 500,
            noise: NoiseLevels::default(),
            seed: 0,
            initial: PendulumState::default(),
        }
    }
}

/// Desired state with the accelerations that realize it.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReferencePoint {
    pub state: PendulumState,
    pub xdd: f64,
    pub thetadd: f64,
}

impl ReferencePoint {
    pub fn constant(x_c: f64) -> Self {
        Self { state: PendulumState::new(x_c, 0.0, 0.0, 0.0), ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrackingRun {
    pub t: Vec<f64>,
    pub truth: Vec<PendulumState>,
    /// Measurement-updated estimates.
    pub estimate: Vec<PendulumState>,
    pub measurement: Vec<Vec<f64>>,
    pub reference: Vec<PendulumState>,
    pub input: Vec<ControlInput>,
}

impl TrackingRun {
    /// RMSE of `x_c − ref` over samples with `t ≥ from`.
    pub fn tracking_rmse(&self, from: f64) -> f64 {
        rmse(
            self.t
                .iter()
                .zip(self.truth.iter().zip(&self.reference))
                .filter(|(t, _)| **t >= from)
                .map(|(_, (x, r))| x.x_c - r.x_c),
        )
    }

    pub fn estimate_rmse(&self) -> f64 {
        rmse(self.truth.iter().zip(&self.estimate).map(|(x, e)| x.x_c - e.x_c))
    }

    pub fn measurement_rmse(&self) -> f64 {
        rmse(self.truth.iter().zip(&self.measurement).map(|(x, y)| x.x_c - y[0]))
    }
}

fn rmse(errors: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = errors.fold((0.0, 0usize), |(s, n), e| (s + e * e, n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

/// Closed-loop tracking on the nominal-height model of one plane.
pub fn track_reference(setup: &TrackingSetup, reference: impl Fn(f64) -> ReferencePoint) -> Result<TrackingRun> {
    setup.model.validate()?;
    setup.control.validate()?;
    let sys = build_two_mass_system(&setup.model, setup.model.nominal_omega()?);
    let dsys = discretize(&sys, setup.dt)?;
    let ctrl = AxisController::synthesize(
        &dsys,
        &setup.control.weights(),
        &setup.control.dare,
        setup.control.integrator_limit,
    )?;
    let nm = setup.control.noise_model();
    let mut rng = ChaCha8Rng::seed_from_u64(setup.seed);
    let process = (setup.noise.process > 0.0).then(|| Normal::new(0.0, setup.noise.process).expect("finite sigma"));

    let mut x = setup.initial;
    let mut filter = FilterState::new(x, Matrix4::identity() * 1e-4);
    let mut x_i = ctrl.zero_integrator();
    let mut run = TrackingRun::default();
    for k in 0..setup.steps {
        let t = k as f64 * setup.dt;
        let r = reference(t);
        let y = measure(&x, &nm, &setup.noise, &mut rng);
        let ff = if setup.control.feedforward {
            sys.inverse_input(&r.state, r.xdd, r.thetadd).unwrap_or_default()
        } else {
            ControlInput::default()
        };
        let step = lqg_step(&ctrl, &filter, &dsys, &nm, &y, &r.state, &ff, &x_i)?;
        run.t.push(t);
        run.truth.push(x);
        run.estimate.push(step.posterior.x_hat);
        run.measurement.push(y.iter().copied().collect());
        run.reference.push(r.state);
        run.input.push(step.u);

        let mut next = step_dynamics(&dsys, &x, &step.u).to_vector();
        if let Some(dist) = &process {
            for v in next.iter_mut() {
                *v += dist.sample(&mut rng);
            }
        }
        x = PendulumState::from_vector(&next);
        if !x.is_finite() {
            return Err(Error::Diverged { time: t + setup.dt });
        }
        filter = step.filter;
        x_i = step.x_i;
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holds_zero_reference() {
        let run = track_reference(&TrackingSetup::default(), |_| ReferencePoint::constant(0.0)).unwrap();
        assert!(run.truth.iter().all(|x| x.x_c == 0.0));
    }

    #[test]
    fn integrator_removes_offset() {
        let setup = TrackingSetup {
            control: ControlConfig { feedforward: false, ..Default::default() },
            steps: 251,
            ..Default::default()
        };
        let run = track_reference(&setup, |_| ReferencePoint::constant(0.05)).unwrap();
        assert!((run.truth.last().unwrap().x_c - 0.05).abs() < 1e-6);
    }
}
