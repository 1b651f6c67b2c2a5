#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ddrive/kinematics.hpp"

namespace ddrive {

struct PidGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
};

inline void validate(const PidGains& g) {
    if (g.kp < 0.0 || g.ki < 0.0 || g.kd < 0.0)
        throw std::invalid_argument("PID gains must be nonnegative");
}

// Signed integer PWM command, clamped to [-255, 255], rounded half away
// from zero.
inline int pwm_saturate(double u) {
    const double v = std::clamp(u, -255.0, 255.0);
    return static_cast<int>(v >= 0.0 ? std::floor(v + 0.5) : std::ceil(v - 0.5));
}

// Discrete PID: rectangular integral, backward-difference derivative with a
// zero first step. The integral state stores the raw error sum so that the
// gains can change between steps without disturbing it.
class PidController {
public:
    explicit PidController(PidGains gains,
                           double output_limit = 255.0,
                           double integral_limit = std::numeric_limits<double>::quiet_NaN())
        : gains_(gains), output_limit_(output_limit), integral_limit_(integral_limit) {
        validate(gains);
        if (!(output_limit > 0.0)) throw std::invalid_argument("output limit must be positive");
    }

    double update(double error, double dt) { return update_with(gains_, error, dt); }

    // Runs one step with the supplied gains (used by the fuzzy scheduler).
    double update_with(const PidGains& g, double error, double dt) {
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
        integral_ += error * dt;
        const double ilim = effective_integral_limit(g.ki);
        integral_ = std::clamp(integral_, -ilim, ilim);
        const double de = first_step_ ? 0.0 : (error - prev_error_) / dt;
        first_step_ = false;
        prev_error_ = error;
        const double u = g.kp * error + g.ki * integral_ + g.kd * de;
        return std::clamp(u, -output_limit_, output_limit_);
    }

    void reset() {
        integral_ = 0.0;
        prev_error_ = 0.0;
        first_step_ = true;
    }

    const PidGains& gains() const { return gains_; }
    double output_limit() const { return output_limit_; }
    double integral() const { return integral_; }
    double prev_error() const { return prev_error_; }
    bool first_step() const { return first_step_; }

private:
    double effective_integral_limit(double ki) const {
        if (!std::isnan(integral_limit_)) return integral_limit_;
        if (ki > 0.0) return output_limit_ / ki;
        return std::numeric_limits<double>::infinity();
    }

    PidGains gains_;
    double output_limit_;
    double integral_limit_;  // NaN = derive from output_limit/ki
    double integral_ = 0.0;
    double prev_error_ = 0.0;
    bool first_step_ = true;
};

// Pure spin about the chassis center: equal and opposite rim speeds.
inline WheelSpeeds steering_command(double w_target, const ChassisGeometry& g) {
    const double v = w_target * g.d_w / 2.0;
    return {-v, v};
}

// Straight-line motion: both wheels at the commanded speed.
inline WheelSpeeds forward_command(double v_target) { return {v_target, v_target}; }

}  // namespace ddrive
