use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use terradyn_core::geometry::{contact_angle, contains, ellipse_point, surface_frame, TipContact};
use terradyn_core::{EllipseBody, Point2, Vec2};

/// Dense-grid search for the furthest-forward intersection of the circle
/// about `base` with the upper half ellipse. Each sign change on the grid is
/// refined by one secant step.
fn grid_oracle(base: Point2, length: f64, body: &EllipseBody, samples: usize) -> Option<f64> {
    let f = |phi: f64| {
        let (x, y) = (body.r_x() * phi.cos() + body.x_r(), body.r_y() * phi.sin());
        ((x - base.x).powi(2) + (y - base.y).powi(2)).sqrt() - length
    };
    let h = PI / (samples - 1) as f64;
    let mut best: Option<(f64, f64)> = None;
    let mut prev = (0.0, f(0.0));
    for k in 1..samples {
        let phi = k as f64 * h;
        let v = f(phi);
        if (prev.1 < 0.0) != (v < 0.0) {
            let root = prev.0 - prev.1 * (phi - prev.0) / (v - prev.1);
            let x = body.r_x() * root.cos();
            if best.is_none_or(|(bx, _)| x > bx) {
                best = Some((x, root));
            }
        }
        prev = (phi, v);
    }
    best.map(|(_, phi)| phi)
}

fn random_touching_config(rng: &mut ChaCha8Rng) -> (EllipseBody, Point2, f64) {
    loop {
        let r_y = rng.random_range(0.02..0.08);
        let r_x = r_y * rng.random_range(1.0..2.5);
        let body = EllipseBody::new(r_x, r_y, rng.random_range(-0.2..0.2), 0.1).unwrap();
        let length = rng.random_range(0.01..0.05);
        let base = Vec2::new(
            body.x_r() + rng.random_range(-1.2..1.2) * r_x,
            rng.random_range(0.2..1.5) * r_y + length,
        );
        if let Ok(TipContact::Touching(_)) = contact_angle(base, length, &body) {
            return (body, base, length);
        }
    }
}

#[test]
fn contact_angle_matches_dense_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let (body, base, length) = random_touching_config(&mut rng);
        let got = contact_angle(base, length, &body).unwrap().angle().unwrap();
        let want = grid_oracle(base, length, &body, 1_000_000).expect("oracle finds a root");
        assert!((got - want).abs() < 1e-6, "case {case}: {got} vs {want} ({body:?}, {base:?}, {length})");
    }
}

#[test]
fn fixed_configuration_matches_dense_grid() {
    let body = EllipseBody::new(0.09, 0.05, 0.05, 0.087).unwrap();
    let base = Vec2::new(0.05, 0.06);
    let got = contact_angle(base, 0.027, &body).unwrap().angle().unwrap();
    let want = grid_oracle(base, 0.027, &body, 1_000_000).unwrap();
    assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    // the root really lies on both curves
    let p = ellipse_point(got, &body).unwrap();
    assert!(((p - base).norm() - 0.027).abs() < 1e-12);
}

/// Closed-form intersection of two circles; upper point furthest forward.
fn circle_oracle(center: Point2, radius: f64, base: Point2, length: f64) -> Option<f64> {
    let d_vec = base - center;
    let d = d_vec.norm();
    let a = (radius * radius - length * length + d * d) / (2.0 * d);
    let h2 = radius * radius - a * a;
    if h2 < 0.0 {
        return None;
    }
    let h = h2.sqrt();
    let mid = center + d_vec * (a / d);
    let perp = Vec2::new(-d_vec.y / d, d_vec.x / d);
    [mid + perp * h, mid - perp * h]
        .into_iter()
        .filter(|p| p.y >= 0.0)
        .max_by(|p, q| p.x.total_cmp(&q.x))
        .map(|p| (p.y).atan2(p.x - center.x))
}

#[test]
fn circular_shell_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    while checked < 200 {
        let r = rng.random_range(0.02..0.08);
        let body = EllipseBody::new(r, r, rng.random_range(-0.1..0.1), 0.1).unwrap();
        let length = rng.random_range(0.01..0.05);
        let base = Vec2::new(body.x_r() + rng.random_range(-1.0..1.0) * r, rng.random_range(0.3..1.2) * r + length);
        let Ok(TipContact::Touching(got)) = contact_angle(base, length, &body) else {
            continue;
        };
        let want = circle_oracle(Vec2::new(body.x_r(), 0.0), r, base, length).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        checked += 1;
    }
}

#[test]
fn frames_are_orthonormal_inward_and_backward() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let r_y = rng.random_range(0.01..0.1);
        let body = EllipseBody::new(r_y * rng.random_range(1.0..3.0), r_y, rng.random_range(-1.0..1.0), 0.1).unwrap();
        let phi = rng.random_range(-PI..PI);
        let (n, t) = surface_frame(phi, &body);
        assert!((n.norm() - 1.0).abs() < 1e-12);
        assert!((t.norm() - 1.0).abs() < 1e-12);
        assert!(n.dot(t).abs() < 1e-12);
        let p = ellipse_point(phi, &body).unwrap();
        assert!(contains(p + n * (1e-6 * body.r_y()), &body));
        if phi > 0.0 && phi < PI {
            assert!(t.x <= 0.0);
        }
    }
}

#[test]
fn contact_from_directly_above_is_apex() {
    let body = EllipseBody::default().at(0.1);
    let phi = contact_angle(Vec2::new(0.1, body.r_y() + 0.027), 0.027, &body).unwrap().angle().unwrap();
    assert!((phi - FRAC_PI_2).abs() < 1e-6);
}
