#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ddrive/kinematics.hpp"

namespace ddrive {

inline constexpr double kGravity = 9.81;

// Permanent-magnet DC motor, quasi-static electrical model (armature
// inductance neglected).
struct MotorParams {
    double r_a;         // ohm
    double k_t;         // N*m/A
    double k_e;         // V*s/rad
    double j;           // kg*m^2, rotor + wheel
    double b;           // N*m*s/rad viscous friction
    double v_max;       // V at full PWM
    double gear_ratio;  // folded into k_t/k_e for the reference motor

    void validate() const {
        if (!(r_a > 0.0 && k_t > 0.0 && k_e > 0.0 && j > 0.0 && b > 0.0 && v_max > 0.0 &&
              gear_ratio > 0.0))
            throw std::invalid_argument("motor parameters must be strictly positive");
    }
};

// Desk-scale reference motor used by the shipped scenarios and tests.
// Invented constants; not taken from any datasheet.
inline MotorParams alex_ref_motor() {
    return {2.0, 0.05, 0.05, 1e-4, 1e-4, 6.0, 1.0};
}

inline double pwm_to_voltage(const MotorParams& p, int pwm) {
    if (pwm < -255 || pwm > 255) throw std::invalid_argument("pwm out of [-255, 255]");
    return static_cast<double>(pwm) / 255.0 * p.v_max;
}

struct MotorStep {
    double omega;    // rad/s after the step
    double current;  // A
    double torque;   // N*m produced
};

// I = (V - k_e*w)/r_a, T = k_t*I, then an explicit Euler step of
// J*dw/dt = T - T_load - b*w.
inline MotorStep motor_step(const MotorParams& p, double v, double omega, double t_load,
                            double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const double current = (v - p.k_e * omega) / p.r_a;
    const double torque = p.k_t * current;
    const double omega_next = omega + dt * (torque - t_load - p.b * omega) / p.j;
    return {omega_next, current, torque};
}

// No-load steady-state speed of the closed electrical/mechanical model.
inline double no_load_speed(const MotorParams& p, double v) {
    return p.k_t * v / (p.r_a * p.b + p.k_t * p.k_e);
}

inline double stall_torque(const MotorParams& p, double v) { return p.k_t * v / p.r_a; }

// Quadrature-style encoder: counts = floor(angle / 2pi * cpr).
struct EncoderModel {
    int counts_per_rev;
    double angle = 0.0;  // rad, accumulated

    explicit EncoderModel(int cpr) : counts_per_rev(cpr) {
        if (cpr <= 0) throw std::invalid_argument("counts_per_rev must be positive");
    }
    long long read() const {
        return static_cast<long long>(
            std::floor(angle / (2.0 * kPi) * static_cast<double>(counts_per_rev)));
    }
};

// Piecewise-linear slope angle over distance traveled; flat extension
// beyond the knots.
class TerrainProfile {
public:
    TerrainProfile() = default;
    explicit TerrainProfile(std::vector<std::pair<double, double>> knots)
        : knots_(std::move(knots)) {
        for (size_t i = 0; i < knots_.size(); ++i) {
            if (std::abs(knots_[i].second) >= kPi / 2.0)
                throw std::invalid_argument("slope magnitude must be below pi/2");
            if (i > 0 && !(knots_[i].first > knots_[i - 1].first))
                throw std::invalid_argument("terrain knots must increase in distance");
        }
    }

    double slope_at(double s) const {
        if (knots_.empty()) return 0.0;
        if (s <= knots_.front().first) return knots_.front().second;
        for (size_t i = 0; i + 1 < knots_.size(); ++i) {
            const auto& [s0, a0] = knots_[i];
            const auto& [s1, a1] = knots_[i + 1];
            if (s <= s1) return a0 + (s - s0) / (s1 - s0) * (a1 - a0);
        }
        return knots_.back().second;
    }

    bool flat() const { return knots_.empty(); }
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

private:
    std::vector<std::pair<double, double>> knots_;  // (distance m, slope rad)
};

// Gravity load torque per wheel, split equally across the two wheels.
inline double slope_load_torque(const TerrainProfile& t, double s, double mass,
                                const ChassisGeometry& g) {
    if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
    return mass * kGravity * std::sin(t.slope_at(s)) * g.r_w / 2.0;
}

// Fully specified 64-bit generator (splitmix64) so traces never depend on
// library implementation details.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // Uniform in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    // Standard normal via Box-Muller.
    double next_gauss() {
        double u1 = next_unit();
        while (u1 <= 0.0) u1 = next_unit();
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

private:
    std::uint64_t state_;
};

}  // namespace ddrive
