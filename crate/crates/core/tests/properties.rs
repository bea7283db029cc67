use biped_lqg::dynamics::{ModelParams, PendulumState};
use biped_lqg::engine::{command_smoothing, Engine, EngineCommand, EngineConfig, RateLimits};
use biped_lqg::estimation::{kf_update, FilterState, NoiseModel};
use biped_lqg::optimizer::GABounds;
use biped_lqg::planner::{
    com_state, next_footstep, BoundaryCondition, CubicSpline, Footstep, Side, StepCommand, StepConstraints,
};
use biped_lqg::sim::{ConvexPolygon, FallDetector};
use nalgebra::{DVector, Matrix4};
use proptest::prelude::*;

fn step_command() -> impl Strategy<Value = StepCommand> {
    (-0.3..0.3f64, -0.15..0.15f64, -1.0..1.0f64, 0.2..0.8f64).prop_map(|(l_sx, l_sy, l_stheta, t_ss)| StepCommand {
        l_sx,
        l_sy,
        l_stheta,
        t_ss,
        t_ds: 0.0,
    })
}

proptest! {
    #[test]
    fn footsteps_respect_constraints(cmd in step_command(), heading in -3.0..3.0f64, left in any::<bool>()) {
        let c = StepConstraints::default();
        let side = if left { Side::Left } else { Side::Right };
        let support = Footstep::new(0.2, -0.1, heading, side);
        let (next, _) = next_footstep(&support, &cmd, &c);
        prop_assert_eq!(next.side, side.other());
        prop_assert!((next.heading - support.heading).abs() <= c.max_step_rotation + 1e-12);
        // Displacement in the new foot's frame.
        let (s, co) = next.heading.sin_cos();
        let (dx, dy) = (next.x - support.x, next.y - support.y);
        let forward = co * dx + s * dy;
        let lateral = -s * dx + co * dy;
        prop_assert!(forward.abs() <= c.max_step_length + 1e-12);
        prop_assert!(next.side.sign() * lateral >= 0.5 * c.lateral_separation - c.crossing_margin - 1e-12);
        prop_assert!((lateral - next.side.sign() * c.lateral_separation).abs() <= c.max_step_width + 1e-12);
    }

    #[test]
    fn spline_passes_through_knots(values in prop::collection::vec(-1.0..1.0f64, 3..8), natural in any::<bool>()) {
        let knots: Vec<f64> = (0..values.len()).map(|i| i as f64 * 0.1 + (i * i) as f64 * 0.01).collect();
        let bc = if natural { BoundaryCondition::Natural } else { BoundaryCondition::Clamped(0.3, -0.2) };
        let s = CubicSpline::new(&knots, &values, bc).unwrap();
        for (k, v) in knots.iter().zip(&values) {
            prop_assert!((s.eval(*k) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn com_segment_hits_both_ends(r in -0.2..0.2f64, x0 in -0.2..0.2f64, xf in -0.2..0.2f64, len in 0.1..1.0f64, z in 0.15..0.4f64) {
        let omega = (9.81 / z).sqrt();
        let a = com_state(r, x0, xf, 0.0, len, omega, 0.0).unwrap();
        let b = com_state(r, x0, xf, 0.0, len, omega, len).unwrap();
        prop_assert!((a.pos - x0).abs() < 1e-12 && (b.pos - xf).abs() < 1e-12);
        prop_assert!((a.acc - omega * omega * (x0 - r)).abs() < 1e-9);
    }

    #[test]
    fn hull_contains_its_points(points in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 3..20)) {
        let pts: Vec<[f64; 2]> = points.iter().map(|(x, y)| [*x, *y]).collect();
        let hull = ConvexPolygon::hull(&pts);
        prop_assume!(!hull.is_degenerate());
        for p in &pts {
            prop_assert!(hull.signed_distance(*p) >= -1e-12);
        }
        prop_assert!(hull.signed_distance(hull.centroid()) > 0.0);
    }

    #[test]
    fn fall_detection_latches(zmps in prop::collection::vec((-0.2..0.2f64, -0.1..0.1f64), 1..60), dwell in 1usize..5) {
        let foot = ConvexPolygon::foot(&Footstep::new(0.0, 0.0, 0.0, Side::Left), 0.16, 0.09);
        let mut d = FallDetector::new(0.0, dwell);
        let mut was = false;
        for (x, y) in zmps {
            let now = d.update([x, y], &foot);
            prop_assert!(!was || now);
            was = now;
        }
    }

    #[test]
    fn smoothing_respects_rate_limits(a in step_command(), b in step_command()) {
        let lim = RateLimits::default();
        let s = command_smoothing(&a, &b, &lim);
        prop_assert!((s.l_sx - a.l_sx).abs() <= lim.l_sx + 1e-15);
        prop_assert!((s.l_sy - a.l_sy).abs() <= lim.l_sy + 1e-15);
        prop_assert!((s.l_stheta - a.l_stheta).abs() <= lim.l_stheta + 1e-15);
        prop_assert_eq!(s.t_ss, b.t_ss);
    }

    #[test]
    fn ga_clamp_stays_inside(genome in prop::array::uniform8(-5.0..5.0f64)) {
        let b = GABounds::default();
        let g = biped_lqg::engine::GaitParams::from_array(b.clamp(genome));
        prop_assert!(b.contains(&g));
    }

    #[test]
    fn measurement_update_shrinks_covariance(p_diag in prop::array::uniform4(1e-6..1.0f64), y0 in -1.0..1.0f64, y1 in -1.0..1.0f64) {
        let nm = NoiseModel::positions(1e-6, 1e-4, 1e-4);
        let fs = FilterState::new(PendulumState::default(), Matrix4::from_diagonal(&p_diag.into()));
        let post = kf_update(&fs, &DVector::from_vec(vec![y0, y1]), &nm).unwrap();
        prop_assert!(post.p.trace() <= fs.p.trace() + 1e-15);
        let sym = (post.p - post.p.transpose()).abs().max();
        prop_assert!(sym < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn engine_outputs_stay_continuous(cmds in prop::collection::vec((step_command(), 0u8..10), 1..6)) {
        let model = ModelParams::default();
        let mut engine = Engine::new(EngineConfig::default(), &model).unwrap();
        let mut schedule = Vec::new();
        for (cmd, kind) in cmds {
            let c = match kind { 0 => EngineCommand::Stop, 1 => EngineCommand::None, _ => EngineCommand::Walk(cmd) };
            schedule.extend(std::iter::once(c).chain(std::iter::repeat_n(EngineCommand::None, 60)));
        }
        for c in schedule {
            let out = engine.tick(0.02, c).unwrap();
            prop_assert!(out.is_finite());
            prop_assert!(out.swing_foot[2] >= -1e-12);
        }
        prop_assert!(engine.max_com_jump() < 1e-9, "{}", engine.max_com_jump());
    }
}
