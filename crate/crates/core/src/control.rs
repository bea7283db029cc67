//! Integral-augmented LQR synthesis and the LQG tracking loop.
//!
//! The plant is sampled, so the gain comes from the discrete algebraic
//! Riccati equation on the plant augmented with one integrator per tracked
//! output. Each control cycle runs
//! `kf_update → control law → integrate error → kf_predict`.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{ControlInput, DiscreteSystem, PendulumState};
use crate::error::{Error, Result};
use crate::estimation::{kf_predict, kf_update, FilterState, NoiseModel};

/// Quadratic cost weights on `[state; integrators]` and on the input.
#[derive(Debug, Clone, PartialEq)]
pub struct CostWeights {
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub m_i: usize,
}

impl CostWeights {
    pub fn diagonal(state: [f64; 4], integrators: &[f64], input: [f64; 2]) -> Self {
        let q: Vec<f64> = state.iter().chain(integrators).copied().collect();
        Self {
            q: DMatrix::from_diagonal(&DVector::from_vec(q)),
            r: DMatrix::from_diagonal(&DVector::from_vec(input.to_vec())),
            m_i: integrators.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = 4 + self.m_i;
        if self.q.shape() != (n, n) || self.r.shape() != (2, 2) {
            return Err(Error::Config(format!(
                "cost weights must be {n}x{n} and 2x2, got {:?} and {:?}",
                self.q.shape(),
                self.r.shape()
            )));
        }
        if !is_symmetric(&self.q) || !is_symmetric(&self.r) {
            return Err(Error::Config("cost weights must be symmetric".into()));
        }
        if self.q.clone().symmetric_eigenvalues().min() < -1e-12 {
            return Err(Error::Config("state weight Q must be positive semidefinite".into()));
        }
        if self.r.clone().symmetric_eigenvalues().min() <= 0.0 {
            return Err(Error::Config("input weight R must be positive definite".into()));
        }
        Ok(())
    }
}

impl Default for CostWeights {
    fn default() -> Self {
        Self::diagonal([400.0, 10.0, 50.0, 1.0], &[10_000.0], [1.0, 0.1])
    }
}

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    m.is_square() && (m - m.transpose()).abs().max() <= 1e-12 * m.abs().max().max(1.0)
}

/// Plant stacked with error integrators `x_i(k+1) = x_i(k) + dt (C_track x(k) − ref(k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedSystem {
    pub a_aug: DMatrix<f64>,
    pub b_aug: DMatrix<f64>,
    pub c_track: DMatrix<f64>,
}

/// Output selector: `x_c` alone, or `x_c` and `θ_to`.
pub fn tracked_outputs(m_i: usize) -> Result<DMatrix<f64>> {
    match m_i {
        1 => Ok(DMatrix::from_row_slice(1, 4, &[1.0, 0.0, 0.0, 0.0])),
        2 => Ok(DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0])),
        _ => Err(Error::Config(format!("number of integrated outputs must be 1 or 2, got {m_i}"))),
    }
}

pub fn augment_with_integrator(dsys: &DiscreteSystem, c_track: &DMatrix<f64>, dt: f64) -> AugmentedSystem {
    assert_eq!(c_track.ncols(), 4, "tracked-output selector must have 4 columns");
    let m_i = c_track.nrows();
    let n = 4 + m_i;
    let mut a = DMatrix::zeros(n, n);
    for i in 0..4 {
        for j in 0..4 {
            a[(i, j)] = dsys.ad[(i, j)];
        }
    }
    for i in 0..m_i {
        for j in 0..4 {
            a[(4 + i, j)] = dt * c_track[(i, j)];
        }
        a[(4 + i, 4 + i)] = 1.0;
    }
    let mut b = DMatrix::zeros(n, 2);
    for i in 0..4 {
        for j in 0..2 {
            b[(i, j)] = dsys.bd[(i, j)];
        }
    }
    AugmentedSystem { a_aug: a, b_aug: b, c_track: c_track.clone() }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DareOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DareOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100_000 }
    }
}

fn riccati_map(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    p: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let at_p = a.transpose() * p;
    let at_p_b = &at_p * b;
    let s = r + b.transpose() * p * b;
    let s_inv = s.try_inverse().ok_or_else(|| Error::Numerical("R + BᵀPB is singular".into()))?;
    let next = &at_p * a - &at_p_b * s_inv * at_p_b.transpose() + q;
    Ok((&next + next.transpose()) * 0.5)
}

/// Frobenius norm of `P − (AᵀPA − AᵀPB(R+BᵀPB)⁻¹BᵀPA + Q)`.
pub fn dare_residual(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    p: &DMatrix<f64>,
) -> Result<f64> {
    Ok((p - riccati_map(a, b, q, r, p)?).norm())
}

/// Solve the DARE by backward Riccati iteration from `P₀ = Q`.
pub fn solve_dare(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    opts: &DareOptions,
) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if !a.is_square() || b.nrows() != n || q.shape() != (n, n) || r.shape() != (b.ncols(), b.ncols()) {
        return Err(Error::Contract("inconsistent DARE dimensions".into()));
    }
    const STALL_LIMIT: usize = 10;
    let mut p = q.clone();
    let mut prev_step = f64::INFINITY;
    let mut stalled = 0;
    let mut averaged = false;
    let mut step = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let next = riccati_map(a, b, q, r, &p)?;
        step = (&next - &p).norm();
        if !step.is_finite() {
            return Err(Error::Numerical("Riccati iterate is not finite".into()));
        }
        if step < opts.tol {
            return Ok(next);
        }
        if step >= prev_step {
            stalled += 1;
        } else {
            stalled = 0;
        }
        if stalled >= STALL_LIMIT {
            if averaged {
                break;
            }
            // oscillating between two iterates: take their mean once
            p = (&p + &next) * 0.5;
            averaged = true;
            stalled = 0;
            prev_step = f64::INFINITY;
            continue;
        }
        prev_step = step;
        p = next;
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, last_step: step })
}

/// Feedback gain partitioned as `[K_x | K_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    pub k: DMatrix<f64>,
}

impl GainMatrix {
    pub fn state_part(&self) -> DMatrix<f64> {
        self.k.columns(0, 4).into_owned()
    }

    pub fn integrator_part(&self) -> DMatrix<f64> {
        self.k.columns(4, self.k.ncols() - 4).into_owned()
    }
}

/// `K = (R + BᵀPB)⁻¹ BᵀPA`.
pub fn lqr_gain(a: &DMatrix<f64>, b: &DMatrix<f64>, r: &DMatrix<f64>, p: &DMatrix<f64>) -> Result<GainMatrix> {
    let bt_p = b.transpose() * p;
    let s = r + &bt_p * b;
    let s_inv = s.try_inverse().ok_or_else(|| Error::Numerical("R + BᵀPB is singular".into()))?;
    Ok(GainMatrix { k: s_inv * bt_p * a })
}

pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.clone().complex_eigenvalues().iter().map(|c: &Complex<f64>| c.norm()).fold(0.0, f64::max)
}

fn tracking_error(x_hat: &PendulumState, x_des: &PendulumState, x_i: &DVector<f64>) -> DVector<f64> {
    let e = x_hat.to_vector() - x_des.to_vector();
    DVector::from_iterator(4 + x_i.len(), e.iter().chain(x_i.iter()).copied())
}

/// `u = −K [x̂ − x_des; x_i]`.
pub fn control_law(k: &GainMatrix, x_hat: &PendulumState, x_des: &PendulumState, x_i: &DVector<f64>) -> ControlInput {
    assert_eq!(k.k.ncols(), 4 + x_i.len(), "gain and integrator dimensions disagree");
    let u = -(&k.k * tracking_error(x_hat, x_des, x_i));
    ControlInput::new(u[0], u[1])
}

/// A synthesized single-axis LQG tracker.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisController {
    pub gain: GainMatrix,
    pub c_track: DMatrix<f64>,
    pub integrator_limit: f64,
    /// Riccati residual of the synthesized solution.
    pub dare_residual: f64,
    /// Spectral radius of the augmented closed loop.
    pub closed_loop_radius: f64,
}

impl AxisController {
    pub fn synthesize(
        dsys: &DiscreteSystem,
        weights: &CostWeights,
        opts: &DareOptions,
        integrator_limit: f64,
    ) -> Result<Self> {
        weights.validate()?;
        let c_track = tracked_outputs(weights.m_i)?;
        let aug = augment_with_integrator(dsys, &c_track, dsys.dt);
        let p = solve_dare(&aug.a_aug, &aug.b_aug, &weights.q, &weights.r, opts)?;
        let gain = lqr_gain(&aug.a_aug, &aug.b_aug, &weights.r, &p)?;
        let residual = dare_residual(&aug.a_aug, &aug.b_aug, &weights.q, &weights.r, &p)?;
        let closed = &aug.a_aug - &aug.b_aug * &gain.k;
        Ok(Self {
            gain,
            c_track,
            integrator_limit,
            dare_residual: residual,
            closed_loop_radius: spectral_radius(&closed),
        })
    }

    pub fn integrator_dim(&self) -> usize {
        self.c_track.nrows()
    }

    pub fn zero_integrator(&self) -> DVector<f64> {
        DVector::zeros(self.integrator_dim())
    }
}

/// Result of one LQG control cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct LqgStep {
    pub u: ControlInput,
    /// Measurement-updated estimate for this cycle.
    pub posterior: FilterState,
    pub filter: FilterState,
    pub x_i: DVector<f64>,
}

/// One cycle of the LQG loop for a single axis.
///
/// `feedforward` is added to the feedback law; it carries the input that
/// realizes the reference trajectory exactly on the nominal model (zero for a
/// pure regulator).
#[allow(clippy::too_many_arguments)]
pub fn lqg_step(
    ctrl: &AxisController,
    fs: &FilterState,
    dsys: &DiscreteSystem,
    nm: &NoiseModel,
    y: &DVector<f64>,
    x_des: &PendulumState,
    feedforward: &ControlInput,
    x_i: &DVector<f64>,
) -> Result<LqgStep> {
    let posterior = kf_update(fs, y, nm)?;
    let fb = control_law(&ctrl.gain, &posterior.x_hat, x_des, x_i);
    let u = ControlInput::new(fb.p_x + feedforward.p_x, fb.thetadd_to + feedforward.thetadd_to);

    let output = &ctrl.c_track * nalgebra::DVector::from_column_slice(posterior.x_hat.to_vector().as_slice());
    let reference = &ctrl.c_track * nalgebra::DVector::from_column_slice(x_des.to_vector().as_slice());
    let lim = ctrl.integrator_limit;
    let x_i_next = (x_i + (output - reference) * dsys.dt).map(|v| v.clamp(-lim, lim));

    let filter = kf_predict(&posterior, dsys, &u, nm);
    Ok(LqgStep { u, posterior, filter, x_i: x_i_next })
}

/// Controller and estimator settings shared by both planes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlConfig {
    pub q_state: [f64; 4],
    pub q_integrator: f64,
    pub r_input: [f64; 2],
    pub integrator_limit: f64,
    pub dare: DareOptions,
    pub q_proc: f64,
    pub r_com: f64,
    pub r_torso: f64,
    /// Add the reference's inverse-dynamics input to the feedback law.
    pub feedforward: bool,
}

impl Default for ControlConfig {
    fn default() -> Self {
        Self {
            q_state: [400.0, 10.0, 50.0, 1.0],
            q_integrator: 10_000.0,
            r_input: [1.0, 0.1],
            integrator_limit: 10.0,
            dare: DareOptions::default(),
            q_proc: 1e-6,
            r_com: 1e-4,
            r_torso: 1e-4,
            feedforward: true,
        }
    }
}

impl ControlConfig {
    pub fn weights(&self) -> CostWeights {
        CostWeights::diagonal(self.q_state, &[self.q_integrator], self.r_input)
    }

    pub fn noise_model(&self) -> NoiseModel {
        NoiseModel::positions(self.q_proc, self.r_com, self.r_torso)
    }

    pub fn validate(&self) -> Result<()> {
        self.weights().validate()?;
        self.noise_model().validate()?;
        if !(self.integrator_limit > 0.0) {
            return Err(Error::Config("integrator_limit must be positive".into()));
        }
        if !(self.dare.tol > 0.0) || self.dare.max_iter == 0 {
            return Err(Error::Config("Riccati tolerance and iteration cap must be positive".into()));
        }
        Ok(())
    }
}
