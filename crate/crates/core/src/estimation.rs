//! Linear Kalman filter over the per-axis pendulum state.

use nalgebra::{DMatrix, DVector, Dyn, Matrix4, OMatrix, U4};

use crate::dynamics::{ControlInput, DiscreteSystem, PendulumState};
use crate::error::{Error, Result};

/// Measurement matrix: `m` rows, one column per state entry.
pub type MeasurementMatrix = OMatrix<f64, Dyn, U4>;

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub q_proc: Matrix4<f64>,
    pub r_meas: DMatrix<f64>,
    pub c: MeasurementMatrix,
}

impl NoiseModel {
    /// Position-only sensing: `x_c` and `θ_to` are measured, velocities are estimated.
    pub fn positions(q: f64, r_com: f64, r_torso: f64) -> Self {
        let mut c = MeasurementMatrix::zeros(2);
        c[(0, 0)] = 1.0;
        c[(1, 2)] = 1.0;
        Self {
            q_proc: Matrix4::identity() * q,
            r_meas: DMatrix::from_diagonal(&DVector::from_vec(vec![r_com, r_torso])),
            c,
        }
    }

    pub fn measurement_dim(&self) -> usize {
        self.c.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.measurement_dim();
        if self.r_meas.shape() != (m, m) {
            return Err(Error::Config(format!(
                "measurement covariance is {:?}, expected {m}x{m}",
                self.r_meas.shape()
            )));
        }
        if (self.q_proc - self.q_proc.transpose()).abs().max() > 1e-12 {
            return Err(Error::Config("process covariance must be symmetric".into()));
        }
        if self.q_proc.symmetric_eigenvalues().min() < -1e-12 {
            return Err(Error::Config("process covariance must be positive semidefinite".into()));
        }
        if (&self.r_meas - self.r_meas.transpose()).abs().max() > 1e-12 {
            return Err(Error::Config("measurement covariance must be symmetric".into()));
        }
        if self.r_meas.clone().symmetric_eigenvalues().min() <= 0.0 {
            return Err(Error::Config("measurement covariance must be positive definite".into()));
        }
        Ok(())
    }

    /// Noise-free measurement of a state.
    pub fn observe(&self, x: &PendulumState) -> DVector<f64> {
        let y = &self.c * x.to_vector();
        DVector::from_iterator(y.nrows(), y.iter().copied())
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::positions(1e-6, 1e-4, 1e-4)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    pub x_hat: PendulumState,
    pub p: Matrix4<f64>,
}

impl FilterState {
    pub fn new(x_hat: PendulumState, p: Matrix4<f64>) -> Self {
        Self { x_hat, p }
    }
}

fn symmetrize(p: Matrix4<f64>) -> Matrix4<f64> {
    (p + p.transpose()) * 0.5
}

/// Time update.
pub fn kf_predict(fs: &FilterState, dsys: &DiscreteSystem, u: &ControlInput, nm: &NoiseModel) -> FilterState {
    let x = dsys.ad * fs.x_hat.to_vector() + dsys.bd * u.to_vector();
    let p = dsys.ad * fs.p * dsys.ad.transpose() + nm.q_proc;
    FilterState { x_hat: PendulumState::from_vector(&x), p: symmetrize(p) }
}

/// Measurement update, returning the posterior and the Kalman gain used.
pub fn kf_update_with_gain(
    fs: &FilterState,
    y: &DVector<f64>,
    nm: &NoiseModel,
) -> Result<(FilterState, OMatrix<f64, U4, Dyn>)> {
    let m = nm.measurement_dim();
    if y.len() != m {
        return Err(Error::Contract(format!("measurement has {} entries, expected {m}", y.len())));
    }
    let c = &nm.c;
    let pct = fs.p * c.transpose();
    let s = c * &pct + &nm.r_meas;
    let s_inv = s.try_inverse().ok_or_else(|| Error::Numerical("innovation covariance is singular".into()))?;
    let k = &pct * s_inv;

    let x = fs.x_hat.to_vector();
    let innovation = y - c * x;
    let x_new = x + &k * innovation;
    let p_new = (Matrix4::identity() - &k * c) * fs.p;
    Ok((FilterState { x_hat: PendulumState::from_vector(&x_new), p: symmetrize(p_new) }, k))
}

pub fn kf_update(fs: &FilterState, y: &DVector<f64>, nm: &NoiseModel) -> Result<FilterState> {
    kf_update_with_gain(fs, y, nm).map(|(fs, _)| fs)
}
