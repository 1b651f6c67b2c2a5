#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <variant>

#include "ddrive/fuzzy_pid.hpp"
#include "ddrive/pid.hpp"

namespace ddrive {

enum class SetpointId { O_LF = 0, O_L, O_LB, O_F, O_B, O_RF, O_R, O_RB };
inline constexpr int kNumSetpoints = 8;

inline const char* setpoint_name(SetpointId id) {
    static constexpr const char* names[] = {"O_LF", "O_L", "O_LB", "O_F",
                                            "O_B",  "O_RF", "O_R", "O_RB"};
    return names[static_cast<int>(id)];
}

inline std::optional<SetpointId> setpoint_from_name(const std::string& s) {
    for (int i = 0; i < kNumSetpoints; ++i)
        if (s == setpoint_name(static_cast<SetpointId>(i)))
            return static_cast<SetpointId>(i);
    return std::nullopt;
}

struct Setpoint {
    long long distance_counts;  // > 0
    double phi;                 // rad in (-pi, pi], rotation before the leg
};

class SetpointTable {
public:
    void set(SetpointId id, Setpoint sp) {
        if (sp.distance_counts <= 0)
            throw std::invalid_argument("setpoint distance must be positive counts");
        if (!(sp.phi > -kPi - 1e-12 && sp.phi <= kPi + 1e-12))
            throw std::invalid_argument("setpoint heading must lie in (-pi, pi]");
        entries_[static_cast<int>(id)] = sp;
    }
    const Setpoint& get(SetpointId id) const {
        const auto& e = entries_[static_cast<int>(id)];
        if (!e) throw std::invalid_argument(std::string("setpoint not defined: ") +
                                            setpoint_name(id));
        return *e;
    }
    bool has(SetpointId id) const { return entries_[static_cast<int>(id)].has_value(); }

private:
    std::array<std::optional<Setpoint>, kNumSetpoints> entries_;
};

// Wheel counts for an in-place rotation by phi: each wheel rolls an arc of
// phi * d_w/2.
inline long long rotation_counts(double phi, const ChassisGeometry& g, int counts_per_rev) {
    const double wheel_angle = phi * g.l() / g.r_w;
    return std::llround(wheel_angle / (2.0 * kPi) * static_cast<double>(counts_per_rev));
}

enum class AutopilotPhase { Idle = 0, Rotating, Translating, Disconnected };

inline const char* phase_name(AutopilotPhase p) {
    static constexpr const char* names[] = {"idle", "rotating", "translating", "disconnected"};
    return names[static_cast<int>(p)];
}

// One wheel loop: either a plain PID or the fuzzy-scheduled one.
struct ControllerSpec {
    PidGains gains;
    double output_limit = 255.0;
    bool use_fuzzy = false;
    FuzzyScales scales;
    FuzzyInputGains input;
};

class WheelController {
public:
    explicit WheelController(const ControllerSpec& spec) : impl_(make(spec)) {}

    struct Out {
        double u;
        PidGains effective;
    };

    Out step(double error, double dt) {
        if (auto* pid = std::get_if<PidController>(&impl_))
            return {pid->update(error, dt), pid->gains()};
        auto& fz = std::get<FuzzyPidController>(impl_);
        const FuzzyPidStep s = fz.update(error, dt);
        return {s.u, s.effective};
    }

    void reset() {
        if (auto* pid = std::get_if<PidController>(&impl_))
            pid->reset();
        else
            std::get<FuzzyPidController>(impl_).reset();
    }

private:
    static std::variant<PidController, FuzzyPidController> make(const ControllerSpec& spec) {
        if (spec.use_fuzzy)
            return FuzzyPidController(spec.gains, spec.scales, spec.input, spec.output_limit);
        return PidController(spec.gains, spec.output_limit);
    }

    std::variant<PidController, FuzzyPidController> impl_;
};

struct AutopilotConfig {
    ChassisGeometry chassis{0.15, 0.03};
    int counts_per_rev = 360;
    long long watchdog_limit = 50;   // counts
    long long tolerance = 5;         // counts
    ControllerSpec forward;          // translation loops
    ControllerSpec steering;         // rotation loops
};

// Rotate-then-translate setpoint mission with per-wheel count loops and an
// encoder-consistency watchdog. During rotation the wheels must move in
// opposite directions, so the watchdog monitors |enc_l + enc_r|; during
// translation it monitors |enc_l - enc_r|. Disconnected is absorbing until
// reset() and always commands zero PWM.
class Autopilot {
public:
    explicit Autopilot(AutopilotConfig cfg, SetpointTable table)
        : cfg_(cfg), table_(std::move(table)) {}

    void command(SetpointId id, long long enc_l, long long enc_r) {
        if (phase_ == AutopilotPhase::Disconnected)
            throw std::logic_error("autopilot is disconnected; reset first");
        const Setpoint& sp = table_.get(id);
        const long long hc = rotation_counts(sp.phi, cfg_.chassis, cfg_.counts_per_rev);
        distance_target_ = sp.distance_counts;
        base_ = {enc_l, enc_r};
        if (hc == 0) {
            enter_translating();
        } else {
            rotation_target_ = hc;
            phase_ = AutopilotPhase::Rotating;
            make_controllers(cfg_.steering);
        }
    }

    struct StepResult {
        int pwm_l = 0;
        int pwm_r = 0;
        AutopilotPhase phase = AutopilotPhase::Idle;
        PidGains gains_l, gains_r;
    };

    StepResult step(long long enc_l, long long enc_r, double dt) {
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
        StepResult out;
        const long long pl = enc_l - base_[0];
        const long long pr = enc_r - base_[1];

        if (phase_ == AutopilotPhase::Rotating) {
            if (std::llabs(pl + pr) > cfg_.watchdog_limit) {
                phase_ = AutopilotPhase::Disconnected;
            } else {
                const long long el = -rotation_target_ - pl;
                const long long er = rotation_target_ - pr;
                if (std::llabs(el) <= cfg_.tolerance && std::llabs(er) <= cfg_.tolerance) {
                    base_ = {enc_l, enc_r};
                    enter_translating();
                } else {
                    out = control(static_cast<double>(el), static_cast<double>(er), dt);
                }
            }
        } else if (phase_ == AutopilotPhase::Translating) {
            if (std::llabs(pl - pr) > cfg_.watchdog_limit) {
                phase_ = AutopilotPhase::Disconnected;
            } else {
                const long long el = distance_target_ - pl;
                const long long er = distance_target_ - pr;
                if (std::llabs(el) <= cfg_.tolerance && std::llabs(er) <= cfg_.tolerance) {
                    phase_ = AutopilotPhase::Idle;
                } else {
                    out = control(static_cast<double>(el), static_cast<double>(er), dt);
                }
            }
        }
        out.phase = phase_;
        return out;
    }

    AutopilotPhase phase() const { return phase_; }

    void reset() {
        phase_ = AutopilotPhase::Idle;
        wheels_ = {};
    }

private:
    void enter_translating() {
        phase_ = AutopilotPhase::Translating;
        make_controllers(cfg_.forward);
    }

    void make_controllers(const ControllerSpec& spec) {
        wheels_ = {WheelController(spec), WheelController(spec)};
    }

    StepResult control(double el, double er, double dt) {
        StepResult out;
        auto l = (*wheels_)[0].step(el, dt);
        auto r = (*wheels_)[1].step(er, dt);
        out.pwm_l = pwm_saturate(l.u);
        out.pwm_r = pwm_saturate(r.u);
        out.gains_l = l.effective;
        out.gains_r = r.effective;
        return out;
    }

    AutopilotConfig cfg_;
    SetpointTable table_;
    AutopilotPhase phase_ = AutopilotPhase::Idle;
    long long rotation_target_ = 0;
    long long distance_target_ = 0;
    std::array<long long, 2> base_{0, 0};
    std::optional<std::array<WheelController, 2>> wheels_;
};

}  // namespace ddrive
