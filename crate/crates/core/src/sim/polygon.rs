use crate::planner::Footstep;

/// Convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<[f64; 2]>,
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl ConvexPolygon {
    /// Convex hull by the monotone-chain method. Collinear points are dropped.
    pub fn hull(points: &[[f64; 2]]) -> Self {
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup();
        if pts.len() < 3 {
            return Self { vertices: pts };
        }
        let mut lower: Vec<[f64; 2]> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<[f64; 2]> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Self { vertices: lower }
    }

    pub fn foot_corners(f: &Footstep, length: f64, width: f64) -> [[f64; 2]; 4] {
        let (s, c) = f.heading.sin_cos();
        let (hl, hw) = (0.5 * length, 0.5 * width);
        [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)].map(|(dx, dy)| [f.x + c * dx - s * dy, f.y + s * dx + c * dy])
    }

    pub fn foot(f: &Footstep, length: f64, width: f64) -> Self {
        Self::hull(&Self::foot_corners(f, length, width))
    }

    pub fn two_feet(a: &Footstep, b: &Footstep, length: f64, width: f64) -> Self {
        let mut pts = Self::foot_corners(a, length, width).to_vec();
        pts.extend(Self::foot_corners(b, length, width));
        Self::hull(&pts)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn centroid(&self) -> [f64; 2] {
        let n = self.vertices.len() as f64;
        let s = self.vertices.iter().fold([0.0, 0.0], |acc, v| [acc[0] + v[0], acc[1] + v[1]]);
        [s[0] / n, s[1] / n]
    }

    /// Distance from `p` to the boundary, positive inside.
    ///
    /// Outside, this is the largest violated edge distance, which is a lower
    /// bound of the Euclidean distance and exact near edges.
    pub fn signed_distance(&self, p: [f64; 2]) -> f64 {
        let n = self.vertices.len();
        let mut d = f64::INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let len = (b[0] - a[0]).hypot(b[1] - a[1]);
            d = d.min(cross(a, b, p) / len);
        }
        d
    }

    /// Whether `p` lies in the polygon shrunk by `margin`; the boundary counts as inside.
    pub fn contains_with_margin(&self, p: [f64; 2], margin: f64) -> bool {
        self.signed_distance(p) >= margin
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::Side;
    use approx::assert_abs_diff_eq;

    #[test]
    fn square_distances() {
        let sq = ConvexPolygon::hull(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]]);
        assert_eq!(sq.vertices().len(), 4);
        assert_abs_diff_eq!(sq.signed_distance([0.5, 0.5]), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(sq.signed_distance([0.5, 1.2]), -0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(sq.signed_distance([0.1, 0.5]), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn rotated_foot() {
        let f = Footstep::new(1.0, 2.0, std::f64::consts::FRAC_PI_2, Side::Left);
        let poly = ConvexPolygon::foot(&f, 0.16, 0.09);
        // Heading +90°: the long axis points along world y.
        assert!(poly.contains_with_margin([1.0, 2.075], 0.0));
        assert!(!poly.contains_with_margin([1.075, 2.0], 0.0));
        assert_abs_diff_eq!(poly.centroid()[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn two_feet_hull_covers_gap() {
        let l = Footstep::new(0.0, 0.05, 0.0, Side::Left);
        let r = Footstep::new(0.0, -0.05, 0.0, Side::Right);
        let poly = ConvexPolygon::two_feet(&l, &r, 0.16, 0.09);
        assert_eq!(poly.vertices().len(), 4);
        assert_abs_diff_eq!(poly.signed_distance([0.0, 0.0]), 0.08, epsilon = 1e-12);
    }
}
