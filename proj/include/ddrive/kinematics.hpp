#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace ddrive {

inline constexpr double kPi = 3.14159265358979323846;

// |w| below this is treated as straight-line motion (no finite turn radius).
inline constexpr double kStraightEps = 1e-9;

// Wraps an angle to (-pi, pi].
inline double normalize_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

struct Pose {
    double x = 0.0;      // m, global frame
    double y = 0.0;      // m, global frame
    double theta = 0.0;  // rad, normalized to (-pi, pi]
};

struct WorldVelocity {
    double dx = 0.0;      // m/s
    double dy = 0.0;      // m/s
    double dtheta = 0.0;  // rad/s
};

// Velocity of the spin center expressed in the robot frame.
struct BodyTwist {
    double v_c = 0.0;  // m/s along the forward axis
    double w = 0.0;    // rad/s yaw rate
};

struct WheelSpeeds {
    double v_l = 0.0;  // m/s signed rim speed, left
    double v_r = 0.0;  // m/s signed rim speed, right
};

struct ChassisGeometry {
    double d_w;  // m, wheel track
    double r_w;  // m, wheel radius

    ChassisGeometry(double track, double radius) : d_w(track), r_w(radius) {
        if (!(d_w > 0.0) || !(r_w > 0.0))
            throw std::invalid_argument("chassis geometry must be positive");
    }
    // Pivot offset from the spin center to either wheel.
    double l() const { return d_w / 2.0; }
};

// Mounting constants of one wheel: angular position alpha, wheel-plane
// angle beta, and the arm length l from the spin center.
struct WheelMount {
    double alpha;
    double beta;
    double l;
};

inline WheelMount left_wheel_mount(double l) { return {-kPi / 2.0, kPi, l}; }
inline WheelMount right_wheel_mount(double l) { return {kPi / 2.0, 0.0, l}; }

// Rotation of a world-frame velocity into the robot frame:
//   [ cos t  sin t  0 ]
//   [-sin t  cos t  0 ] * v
//   [ 0      0      1 ]
inline WorldVelocity world_to_body(double theta, const WorldVelocity& v) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * v.dx + s * v.dy, -s * v.dx + c * v.dy, v.dtheta};
}

// Transpose of the rotation above; recovers the world frame.
inline WorldVelocity body_to_world(double theta, const WorldVelocity& v) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * v.dx - s * v.dy, s * v.dx + c * v.dy, v.dtheta};
}

// v_c = (v_r + v_l)/2, w = (v_r - v_l)/d_w
inline BodyTwist forward_kinematics(const WheelSpeeds& ws, const ChassisGeometry& g) {
    return {(ws.v_r + ws.v_l) / 2.0, (ws.v_r - ws.v_l) / g.d_w};
}

// v_r = v_c + (d_w/2) w, v_l = v_c - (d_w/2) w; exact inverse of the above.
inline WheelSpeeds inverse_kinematics(const BodyTwist& t, const ChassisGeometry& g) {
    const double half = g.d_w / 2.0;
    return {t.v_c - half * t.w, t.v_c + half * t.w};
}

inline double wheel_rim_speed(double omega_w, double r_w) {
    if (!(r_w > 0.0)) throw std::invalid_argument("wheel radius must be positive");
    return omega_w * r_w;
}

// Projection of the wheel's no-side-slip constraint:
//   [cos(a+b), sin(a+b), l sin b] . R(theta) . v
// Zero iff the motion does not slide the wheel sideways.
inline double sliding_constraint_residual(const WheelMount& m, double theta,
                                          const WorldVelocity& v) {
    const WorldVelocity b = world_to_body(theta, v);
    const double ab = m.alpha + m.beta;
    return std::cos(ab) * b.dx + std::sin(ab) * b.dy + m.l * std::sin(m.beta) * b.dtheta;
}

// Rolling-direction projection of the same wheel velocity:
//   [sin(a+b), -cos(a+b), -l cos b] . R(theta) . v
inline double rolling_speed_projection(const WheelMount& m, double theta,
                                       const WorldVelocity& v) {
    const WorldVelocity b = world_to_body(theta, v);
    const double ab = m.alpha + m.beta;
    return std::sin(ab) * b.dx - std::cos(ab) * b.dy - m.l * std::cos(m.beta) * b.dtheta;
}

// Differential degrees of freedom left after c_f sliding constraints.
inline int ddof(int dof_workspace, int c_f) {
    if (c_f < 0 || c_f > dof_workspace)
        throw std::invalid_argument("constraint count must lie in [0, dof_workspace]");
    return dof_workspace - c_f;
}

// Turn radius v_c/w, or nullopt when the motion is straight.
inline std::optional<double> icr_radius(const WheelSpeeds& ws, const ChassisGeometry& g) {
    const BodyTwist t = forward_kinematics(ws, g);
    if (std::abs(t.w) < kStraightEps) return std::nullopt;
    return t.v_c / t.w;
}

// Arc-exact unicycle update; falls back to an Euler step when the turn
// over dt is below the straight threshold.
inline Pose integrate_pose(const Pose& p, const BodyTwist& t, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    Pose out = p;
    if (std::abs(t.w * dt) < kStraightEps) {
        out.x += t.v_c * std::cos(p.theta) * dt;
        out.y += t.v_c * std::sin(p.theta) * dt;
        out.theta = normalize_angle(p.theta + t.w * dt);
        return out;
    }
    const double th1 = p.theta + t.w * dt;
    const double r = t.v_c / t.w;
    out.x += r * (std::sin(th1) - std::sin(p.theta));
    out.y += r * (std::cos(p.theta) - std::cos(th1));
    out.theta = normalize_angle(th1);
    return out;
}

}  // namespace ddrive
