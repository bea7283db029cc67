use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    /// Zero second derivative at both ends.
    Natural,
    /// Prescribed first derivative at the first and last knot.
    Clamped(f64, f64),
}

/// Piecewise-cubic C² interpolant, stored as knot values and second derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    pub fn new(knots: &[f64], values: &[f64], bc: BoundaryCondition) -> Result<Self> {
        let n = knots.len();
        if n < 2 || values.len() != n {
            return Err(Error::Contract("spline needs at least two knots and one value per knot".into()));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Contract("spline knots must be strictly increasing".into()));
        }
        let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<f64> = (0..n - 1).map(|i| (values[i + 1] - values[i]) / h[i]).collect();

        // Tridiagonal system in the knot second derivatives.
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        match bc {
            BoundaryCondition::Natural => {
                diag[0] = 1.0;
                diag[n - 1] = 1.0;
            }
            BoundaryCondition::Clamped(d0, d1) => {
                diag[0] = 2.0 * h[0];
                sup[0] = h[0];
                rhs[0] = 6.0 * (slope[0] - d0);
                sub[n - 1] = h[n - 2];
                diag[n - 1] = 2.0 * h[n - 2];
                rhs[n - 1] = 6.0 * (d1 - slope[n - 2]);
            }
        }
        for i in 1..n - 1 {
            sub[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * (slope[i] - slope[i - 1]);
        }
        // Thomas algorithm
        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut second = vec![0.0; n];
        second[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            second[i] = (rhs[i] - sup[i] * second[i + 1]) / diag[i];
        }
        Ok(Self { knots: knots.to_vec(), values: values.to_vec(), second })
    }

    fn segment(&self, t: f64) -> usize {
        let last = self.knots.len() - 2;
        self.knots[1..=last].iter().take_while(|&&k| t >= k).count()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let h = t1 - t0;
        let a = (t1 - t) / h;
        let b = (t - t0) / h;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h / 6.0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let h = t1 - t0;
        let a = (t1 - t) / h;
        let b = (t - t0) / h;
        (self.values[i + 1] - self.values[i]) / h
            + ((1.0 - 3.0 * a * a) * self.second[i] + (3.0 * b * b - 1.0) * self.second[i + 1]) * h / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};

    /// Independent oracle: solve the full 4(n−1) coefficient system densely.
    fn dense_spline(knots: &[f64], values: &[f64], bc: BoundaryCondition, t: f64) -> f64 {
        let segs = knots.len() - 1;
        let m = 4 * segs;
        let mut a = DMatrix::<f64>::zeros(m, m);
        let mut b = DVector::<f64>::zeros(m);
        let mut row = 0;
        // piece i: c0 + c1 s + c2 s² + c3 s³, s = t − t_i
        for i in 0..segs {
            let h = knots[i + 1] - knots[i];
            a[(row, 4 * i)] = 1.0;
            b[row] = values[i];
            row += 1;
            for k in 0..4 {
                a[(row, 4 * i + k)] = h.powi(k as i32);
            }
            b[row] = values[i + 1];
            row += 1;
            if i + 1 < segs {
                for k in 1..4 {
                    a[(row, 4 * i + k)] = k as f64 * h.powi(k as i32 - 1);
                }
                a[(row, 4 * (i + 1) + 1)] = -1.0;
                row += 1;
                a[(row, 4 * i + 2)] = 2.0;
                a[(row, 4 * i + 3)] = 6.0 * h;
                a[(row, 4 * (i + 1) + 2)] = -2.0;
                row += 1;
            }
        }
        let hl = knots[segs] - knots[segs - 1];
        match bc {
            BoundaryCondition::Natural => {
                a[(row, 2)] = 2.0;
                row += 1;
                a[(row, 4 * (segs - 1) + 2)] = 2.0;
                a[(row, 4 * (segs - 1) + 3)] = 6.0 * hl;
            }
            BoundaryCondition::Clamped(d0, d1) => {
                a[(row, 1)] = 1.0;
                b[row] = d0;
                row += 1;
                a[(row, 4 * (segs - 1) + 1)] = 1.0;
                a[(row, 4 * (segs - 1) + 2)] = 2.0 * hl;
                a[(row, 4 * (segs - 1) + 3)] = 3.0 * hl * hl;
                b[row] = d1;
            }
        }
        let c = a.lu().solve(&b).unwrap();
        let i = (0..segs).rev().find(|&i| t >= knots[i]).unwrap_or(0);
        let s = t - knots[i];
        c[4 * i] + c[4 * i + 1] * s + c[4 * i + 2] * s * s + c[4 * i + 3] * s * s * s
    }

    #[test]
    fn matches_dense_oracle() {
        let knots = [0.0, 0.3, 0.45, 1.0, 1.2];
        let values = [0.1, -0.2, 0.4, 0.0, 0.3];
        for bc in [BoundaryCondition::Natural, BoundaryCondition::Clamped(0.5, -1.0)] {
            let s = CubicSpline::new(&knots, &values, bc).unwrap();
            for k in 0..=60 {
                let t = 1.2 * k as f64 / 60.0;
                assert_abs_diff_eq!(s.eval(t), dense_spline(&knots, &values, bc, t), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn swing_quarter_point_against_oracle() {
        let knots = [0.0, 0.2, 0.4];
        let x = CubicSpline::new(&knots, &[0.0, 0.1, 0.2], BoundaryCondition::Natural).unwrap();
        let z = CubicSpline::new(&knots, &[0.0, 0.04, 0.0], BoundaryCondition::Clamped(0.0, 0.0)).unwrap();
        let x_oracle = dense_spline(&knots, &[0.0, 0.1, 0.2], BoundaryCondition::Natural, 0.1);
        let z_oracle = dense_spline(&knots, &[0.0, 0.04, 0.0], BoundaryCondition::Clamped(0.0, 0.0), 0.1);
        assert_abs_diff_eq!(x_oracle, 0.05, epsilon = 1e-12);
        assert_abs_diff_eq!(z_oracle, 0.02, epsilon = 1e-12);
        assert_abs_diff_eq!(x.eval(0.1), x_oracle, epsilon = 1e-10);
        assert_abs_diff_eq!(z.eval(0.1), z_oracle, epsilon = 1e-10);
    }

    #[test]
    fn c1_continuity_and_clamped_slopes() {
        let s = CubicSpline::new(&[0.0, 0.2, 0.4], &[0.0, 0.05, 0.0], BoundaryCondition::Clamped(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(s.derivative(0.0), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.derivative(0.4), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.derivative(0.2 - 1e-12), s.derivative(0.2 + 1e-12), epsilon = 1e-9);
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(CubicSpline::new(&[0.0], &[1.0], BoundaryCondition::Natural).is_err());
        assert!(CubicSpline::new(&[0.0, 0.0], &[1.0, 2.0], BoundaryCondition::Natural).is_err());
        assert!(CubicSpline::new(&[0.0, 1.0], &[1.0], BoundaryCondition::Natural).is_err());
    }
}
