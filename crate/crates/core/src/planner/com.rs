use crate::error::{Error, Result};

/// Position, velocity and acceleration of one COM axis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AxisSample {
    pub pos: f64,
    pub vel: f64,
    pub acc: f64,
}

/// Analytic LIPM solution between two boundary positions, with derivatives.
pub fn com_state(r_zmp: f64, x_0: f64, x_f: f64, t_0: f64, t_f: f64, omega: f64, t: f64) -> Result<AxisSample> {
    if !(t_0 < t_f) {
        return Err(Error::Contract(format!("degenerate interval [{t_0}, {t_f}]")));
    }
    let den = (omega * (t_0 - t_f)).sinh();
    if den == 0.0 || !den.is_finite() {
        return Err(Error::Contract(format!("sinh(ω(t_0 − t_f)) = {den} for ω = {omega}")));
    }
    let tol = 1e-9 * (t_f - t_0).max(1.0);
    if t < t_0 - tol || t > t_f + tol {
        return Err(Error::Contract(format!("t = {t} outside [{t_0}, {t_f}]")));
    }
    let (a, b) = (omega * (t - t_0), omega * (t - t_f));
    let pos = r_zmp + ((r_zmp - x_f) * a.sinh() + (x_0 - r_zmp) * b.sinh()) / den;
    let vel = omega * ((r_zmp - x_f) * a.cosh() + (x_0 - r_zmp) * b.cosh()) / den;
    Ok(AxisSample { pos, vel, acc: omega * omega * (pos - r_zmp) })
}

pub fn com_trajectory(r_zmp: f64, x_0: f64, x_f: f64, t_0: f64, t_f: f64, omega: f64, t: f64) -> Result<f64> {
    com_state(r_zmp, x_0, x_f, t_0, t_f, omega, t).map(|s| s.pos)
}

/// COM target at the end of a step: halfway between current and next support.
pub fn step_boundary_target(f_i: f64, f_next: f64) -> f64 {
    0.5 * (f_i + f_next)
}

/// One step's COM reference in both horizontal axes, time measured from step start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComSegment {
    pub r_zmp: [f64; 2],
    pub x_0: [f64; 2],
    pub x_f: [f64; 2],
    pub duration: f64,
    pub omega: f64,
}

impl ComSegment {
    pub fn sample(&self, t: f64) -> Result<[AxisSample; 2]> {
        let t = t.clamp(0.0, self.duration);
        let x = com_state(self.r_zmp[0], self.x_0[0], self.x_f[0], 0.0, self.duration, self.omega, t)?;
        let y = com_state(self.r_zmp[1], self.x_0[1], self.x_f[1], 0.0, self.duration, self.omega, t)?;
        Ok([x, y])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const W: f64 = 6.26418;

    #[test]
    fn boundary_values() {
        assert_abs_diff_eq!(com_trajectory(0.01, -0.02, 0.03, 0.0, 0.4, W, 0.0).unwrap(), -0.02, epsilon = 1e-15);
        assert_abs_diff_eq!(com_trajectory(0.01, -0.02, 0.03, 0.0, 0.4, W, 0.4).unwrap(), 0.03, epsilon = 1e-15);
    }

    #[test]
    fn equilibrium_is_constant() {
        for k in 0..=10 {
            let x = com_trajectory(0.07, 0.07, 0.07, 1.0, 1.4, W, 1.0 + 0.04 * k as f64).unwrap();
            assert_abs_diff_eq!(x, 0.07, epsilon = 1e-15);
        }
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(com_trajectory(0.0, 0.0, 0.0, 0.4, 0.4, W, 0.4).is_err());
        assert!(com_trajectory(0.0, 0.0, 0.0, 0.0, 0.4, 0.0, 0.2).is_err());
        assert!(com_trajectory(0.0, 0.0, 0.0, 0.0, 0.4, W, 0.5).is_err());
    }

    fn rk4(x0: f64, v0: f64, r: f64, omega: f64, t_end: f64, steps: usize) -> (f64, f64) {
        let h = t_end / steps as f64;
        let f = |x: f64, v: f64| (v, omega * omega * (x - r));
        let (mut x, mut v) = (x0, v0);
        for _ in 0..steps {
            let (k1x, k1v) = f(x, v);
            let (k2x, k2v) = f(x + 0.5 * h * k1x, v + 0.5 * h * k1v);
            let (k3x, k3v) = f(x + 0.5 * h * k2x, v + 0.5 * h * k2v);
            let (k4x, k4v) = f(x + h * k3x, v + h * k3v);
            x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        (x, v)
    }

    #[test]
    fn matches_shooting_oracle() {
        // Find the initial velocity that lands on x_f by bisection, then integrate to mid-step.
        let (r, x0, xf, tf) = (0.0, -0.02, 0.03, 0.4);
        let (mut lo, mut hi) = (-5.0, 5.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if rk4(x0, mid, r, W, tf, 4000).0 > xf {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let v0 = 0.5 * (lo + hi);
        let (x_mid, v_mid) = rk4(x0, v0, r, W, 0.2, 2000);
        let s = com_state(r, x0, xf, 0.0, tf, W, 0.2).unwrap();
        assert_abs_diff_eq!(s.pos, x_mid, epsilon = 1e-6);
        assert_abs_diff_eq!(s.vel, v_mid, epsilon = 1e-6);
        assert_abs_diff_eq!(com_state(r, x0, xf, 0.0, tf, W, 0.0).unwrap().vel, v0, epsilon = 1e-6);
    }

    #[test]
    fn satisfies_lipm_ode() {
        let (r, x0, xf) = (0.05, 0.02, 0.09);
        let h = 1e-4;
        let mut worst = 0.0f64;
        for k in 1..40 {
            let t = 0.01 * k as f64;
            let x = |t| com_trajectory(r, x0, xf, 0.0, 0.4, W, t).unwrap();
            let xdd = (x(t + h) - 2.0 * x(t) + x(t - h)) / (h * h);
            worst = worst.max((xdd - W * W * (x(t) - r)).abs());
        }
        assert!(worst < 1e-5, "residual {worst}");
    }

    #[test]
    fn analytic_velocity_matches_difference() {
        let h = 1e-6;
        let t = 0.13;
        let x = |t| com_trajectory(0.05, 0.02, 0.09, 0.0, 0.4, W, t).unwrap();
        let v = com_state(0.05, 0.02, 0.09, 0.0, 0.4, W, t).unwrap().vel;
        assert_abs_diff_eq!(v, (x(t + h) - x(t - h)) / (2.0 * h), epsilon = 1e-7);
    }

    #[test]
    fn midpoint_targets() {
        assert_abs_diff_eq!(step_boundary_target(0.1, 0.3), 0.2, epsilon = 1e-15);
        assert_eq!(step_boundary_target(0.25, 0.25), 0.25);
        assert_eq!(step_boundary_target(-0.05, 0.05), 0.0);
    }

    #[test]
    fn consecutive_segments_are_continuous() {
        let f = [0.0, 0.05, 0.10, 0.15];
        let mut x0 = 0.0;
        let mut prev_end: Option<AxisSample> = None;
        for i in 0..3 {
            let xf = step_boundary_target(f[i], f[i + 1]);
            let seg = ComSegment { r_zmp: [f[i], 0.0], x_0: [x0, 0.0], x_f: [xf, 0.0], duration: 0.4, omega: W };
            let start = seg.sample(0.0).unwrap()[0];
            if let Some(end) = prev_end {
                assert_abs_diff_eq!(start.pos, end.pos, epsilon = 1e-15);
                assert!((start.vel - end.vel).abs() < 0.5);
            }
            prev_end = Some(seg.sample(0.4).unwrap()[0]);
            x0 = xf;
        }
    }
}
