//! Abstract dynamics of the walking robot.
//!
//! The robot is reduced to a lower-body point mass riding a linear inverted
//! pendulum plus a torso mass on a rod of length `l`. Per planar axis the
//! resulting model is linear in the state `[x_c, ẋ_c, θ_to, θ̇_to]` and the
//! input `[p_x, θ̈_to]`:
//!
//! ```text
//! ẍ_c = μ (x_c + αl/(1+α) θ_to − p_x) − αβl/(1+αβ) θ̈_to
//! α = m_to/m_c,  β = z_to/z_c,  μ = (1+α)/(1+αβ) ω²
//! ```
//!
//! With `m_to = 0` this collapses to the plain LIPM `ẍ_c = ω² (x_c − p_x)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix4, Matrix4x2, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of the two-mass model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Lower-body mass (kg).
    pub m_c: f64,
    /// Torso mass (kg).
    pub m_to: f64,
    /// Torso rod length (m).
    pub l: f64,
    /// Baseline lower-body COM height `z_0` (m).
    pub z_c: f64,
    /// Torso height (m).
    pub z_to: f64,
    /// Vertical COM oscillation amplitude (m).
    pub a_z: f64,
    /// Phase shift of the vertical oscillation (rad).
    pub phi: f64,
    /// Gravity (m/s²).
    pub g: f64,
    /// `T_ss + T_ds` (s).
    pub step_time: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { m_c: 3.0, m_to: 1.5, l: 0.17, z_c: 0.23, z_to: 0.40, a_z: 0.0, phi: 0.0, g: 9.81, step_time: 0.4 }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m_c", self.m_c),
            ("m_to", self.m_to),
            ("l", self.l),
            ("z_c", self.z_c),
            ("z_to", self.z_to),
            ("g", self.g),
            ("step_time", self.step_time),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("model.{name} must be positive, got {v}")));
            }
        }
        if !(self.a_z >= 0.0 && self.a_z < self.z_c) {
            return Err(Error::Config(format!("model.a_z must lie in [0, z_c), got {}", self.a_z)));
        }
        if !self.phi.is_finite() {
            return Err(Error::Config("model.phi must be finite".into()));
        }
        Ok(())
    }

    /// The frontal-plane variant: torso mass removed.
    pub fn without_torso(&self) -> Self {
        Self { m_to: 0.0, ..*self }
    }

    /// Natural frequency at rest height with no vertical acceleration.
    pub fn nominal_omega(&self) -> Result<f64> {
        natural_frequency(self.z_c, 0.0, self.g)
    }
}

/// Per-axis pendulum state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PendulumState {
    pub x_c: f64,
    pub xd_c: f64,
    pub theta_to: f64,
    pub thetad_to: f64,
}

impl PendulumState {
    pub fn new(x_c: f64, xd_c: f64, theta_to: f64, thetad_to: f64) -> Self {
        Self { x_c, xd_c, theta_to, thetad_to }
    }

    pub fn to_vector(&self) -> Vector4<f64> {
        Vector4::new(self.x_c, self.xd_c, self.theta_to, self.thetad_to)
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|v| v.is_finite())
    }
}

/// Per-axis control input: commanded ZMP and torso angular acceleration.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput {
    pub p_x: f64,
    pub thetadd_to: f64,
}

impl ControlInput {
    pub fn new(p_x: f64, thetadd_to: f64) -> Self {
        Self { p_x, thetadd_to }
    }

    pub fn to_vector(&self) -> Vector2<f64> {
        Vector2::new(self.p_x, self.thetadd_to)
    }

    pub fn from_vector(v: &Vector2<f64>) -> Self {
        Self::new(v[0], v[1])
    }
}

/// Continuous-time two-mass system `ẋ = A x + B u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSystem {
    pub a: Matrix4<f64>,
    pub b: Matrix4x2<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub l: f64,
}

impl LinearSystem {
    pub fn derivative(&self, x: &Vector4<f64>, u: &Vector2<f64>) -> Vector4<f64> {
        self.a * x + self.b * u
    }

    /// Lower-body COM acceleration for the given state and input.
    pub fn com_accel(&self, x: &PendulumState, u: &ControlInput) -> f64 {
        self.derivative(&x.to_vector(), &u.to_vector())[1]
    }

    /// Input that holds `ẍ_c = xdd` and `θ̈_to = thetadd` at state `x`.
    ///
    /// Returns `None` when `μ = 0` (ZMP has no authority over the COM).
    pub fn inverse_input(&self, x: &PendulumState, xdd: f64, thetadd: f64) -> Option<ControlInput> {
        if self.mu == 0.0 {
            return None;
        }
        let torso_offset = self.a[(1, 2)] / self.mu;
        let p = x.x_c + torso_offset * x.theta_to - (xdd - self.b[(1, 1)] * thetadd) / self.mu;
        Some(ControlInput::new(p, thetadd))
    }
}

/// Zero-order-hold discretization of a [`LinearSystem`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteSystem {
    pub ad: Matrix4<f64>,
    pub bd: Matrix4x2<f64>,
    pub dt: f64,
}

/// `ω = sqrt((g + z̈)/z)`.
///
/// A vanishing vertical force (`g + z̈ = 0`) is the free-fall limit and yields zero.
pub fn natural_frequency(z: f64, zdd: f64, g: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("COM height must be positive, got {z}")));
    }
    let support = g + zdd;
    if !(support >= 0.0) {
        return Err(Error::Domain(format!("vertical force g + z̈ = {support} is negative (robot leaves the ground)")));
    }
    Ok((support / z).sqrt())
}

fn check_step_time(p: &ModelParams) -> Result<()> {
    if !(p.step_time > 0.0) {
        return Err(Error::Config(format!("step_time must be positive, got {}", p.step_time)));
    }
    Ok(())
}

/// Vertical COM trajectory `z_0 + A_z cos(2π t/T + φ)`.
pub fn com_height(t: f64, p: &ModelParams) -> Result<f64> {
    check_step_time(p)?;
    Ok(p.z_c + p.a_z * (2.0 * PI * t / p.step_time + p.phi).cos())
}

/// Second time derivative of [`com_height`].
pub fn com_height_accel(t: f64, p: &ModelParams) -> Result<f64> {
    check_step_time(p)?;
    let w = 2.0 * PI / p.step_time;
    Ok(-p.a_z * w * w * (w * t + p.phi).cos())
}

/// Plain LIPM: `ẍ_c = ω² (x_c − p_x)`.
pub fn lipm_accel(x_c: f64, p_x: f64, omega: f64) -> f64 {
    omega * omega * (x_c - p_x)
}

/// One body in the multibody ZMP sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass {
    pub m: f64,
    pub x: f64,
    pub z: f64,
    pub xdd: f64,
    pub zdd: f64,
}

/// Multibody ZMP along one horizontal axis.
pub fn zmp_multibody(bodies: &[PointMass], g: f64) -> Result<f64> {
    if bodies.is_empty() {
        return Err(Error::Contract("zmp_multibody needs at least one mass".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for b in bodies {
        num += b.m * b.x * (b.zdd + g) - b.m * b.z * b.xdd;
        den += b.m * (b.zdd + g);
    }
    if den == 0.0 || !den.is_finite() {
        return Err(Error::SingularConfiguration);
    }
    Ok(num / den)
}

/// The two masses of the model for ZMP evaluation.
///
/// Both masses share the vertical acceleration `zdd`; the torso sits at `x_c + l θ_to`.
pub fn model_bodies(p: &ModelParams, x: &PendulumState, xdd_c: f64, thetadd_to: f64, zdd: f64) -> [PointMass; 2] {
    [
        PointMass { m: p.m_c, x: x.x_c, z: p.z_c, xdd: xdd_c, zdd },
        PointMass { m: p.m_to, x: x.x_c + p.l * x.theta_to, z: p.z_to, xdd: xdd_c + p.l * thetadd_to, zdd },
    ]
}

/// Assemble the continuous state-space matrices of the two-mass model.
pub fn build_two_mass_system(p: &ModelParams, omega: f64) -> LinearSystem {
    let alpha = p.m_to / p.m_c;
    let beta = p.z_to / p.z_c;
    let mu = (1.0 + alpha) / (1.0 + alpha * beta) * omega * omega;
    let l = p.l;

    #[rustfmt::skip]
    let a = Matrix4::new(
        0.0, 1.0, 0.0,                          0.0,
        mu,  0.0, mu * alpha * l / (1.0 + alpha), 0.0,
        0.0, 0.0, 0.0,                          1.0,
        0.0, 0.0, 0.0,                          0.0,
    );
    #[rustfmt::skip]
    let b = Matrix4x2::new(
        0.0, 0.0,
        -mu, -alpha * beta * l / (1.0 + alpha * beta),
        0.0, 0.0,
        0.0, 1.0,
    );
    LinearSystem { a, b, alpha, beta, mu, l }
}

/// Matrix exponential by scaling and squaring of a Taylor series.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(m.is_square(), "expm needs a square matrix");
    let n = m.nrows();
    let norm = m.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = m / 2f64.powi(squarings);

    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..40 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if term.abs().max() <= 1e-18 * sum.abs().max() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Zero-order-hold discretization via the augmented exponential `exp([[A, B], [0, 0]] dt)`.
pub fn discretize(sys: &LinearSystem, dt: f64) -> Result<DiscreteSystem> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Contract(format!("sample period must be positive, got {dt}")));
    }
    let mut aug = DMatrix::<f64>::zeros(6, 6);
    aug.view_mut((0, 0), (4, 4)).copy_from(&(sys.a * dt));
    aug.view_mut((0, 4), (4, 2)).copy_from(&(sys.b * dt));
    let e = expm(&aug);
    let ad = Matrix4::from_fn(|i, j| e[(i, j)]);
    let bd = Matrix4x2::from_fn(|i, j| e[(i, j + 4)]);
    Ok(DiscreteSystem { ad, bd, dt })
}

/// `x(k+1) = Ad x(k) + Bd u(k)`.
pub fn step_dynamics(dsys: &DiscreteSystem, x: &PendulumState, u: &ControlInput) -> PendulumState {
    PendulumState::from_vector(&(dsys.ad * x.to_vector() + dsys.bd * u.to_vector()))
}
