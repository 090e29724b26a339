use super::Pose2D;
use crate::math::normalize_angle;

/// Exact integration of a constant body-frame twist `(vx, vy, wz)` over `dt`.
/// For `wz != 0` the base follows the circular arc of the twist.
pub fn integrate_twist(pose: &Pose2D, vx: f64, vy: f64, wz: f64, dt: f64) -> Pose2D {
    let a = wz * dt;
    let (dx, dy) = if a == 0.0 {
        (vx * dt, vy * dt)
    } else if a.abs() < 1e-6 {
        // sin(a)/a and (1-cos a)/a by series; the closed form loses digits here.
        let a2 = a * a;
        let s = dt * (1.0 - a2 / 6.0 + a2 * a2 / 120.0);
        let c = dt * (a / 2.0 - a * a2 / 24.0);
        (vx * s - vy * c, vx * c + vy * s)
    } else {
        let (sin, cos) = a.sin_cos();
        let s = sin / wz;
        let c = (1.0 - cos) / wz;
        (vx * s - vy * c, vx * c + vy * s)
    };
    let (st, ct) = pose.theta.sin_cos();
    Pose2D {
        x: pose.x + ct * dx - st * dy,
        y: pose.y + st * dx + ct * dy,
        theta: normalize_angle(pose.theta + a),
    }
}
