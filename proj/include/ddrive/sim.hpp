#pragma once

#include <array>

#include "ddrive/kinematics.hpp"
#include "ddrive/plant.hpp"

namespace ddrive {

struct SimConfig {
    MotorParams motor = alex_ref_motor();
    ChassisGeometry chassis{0.15, 0.03};
    TerrainProfile terrain;
    double mass = 2.0;             // kg
    int counts_per_rev = 360;
    // Persistent per-wheel multiplicative load imbalance (1.0 = symmetric).
    double load_factor_l = 1.0;
    double load_factor_r = 1.0;
    // Optional per-step multiplicative disturbances, drawn from the seeded
    // generator; both default off so traces are noise-free unless asked.
    double load_noise = 0.0;
    double encoder_noise = 0.0;
    std::uint64_t seed = 0;
};

struct SimState {
    Pose pose;
    std::array<double, 2> omega{0.0, 0.0};   // rad/s, L then R
    std::array<EncoderModel, 2> encoder;
    double distance = 0.0;  // m, signed forward travel
    double time = 0.0;      // s

    explicit SimState(int cpr) : encoder{EncoderModel(cpr), EncoderModel(cpr)} {}
};

class Simulator {
public:
    explicit Simulator(SimConfig cfg) : cfg_(cfg), state_(cfg.counts_per_rev), rng_(cfg.seed) {
        cfg_.motor.validate();
    }

    // Advances the plant by dt under the given PWM commands: slope load on
    // both wheels, quasi-static motors, wheel rim speeds composed into a
    // body twist, arc-exact pose update, encoders advanced.
    void step(int pwm_l, int pwm_r, double dt) {
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
        const double t_load = slope_load_torque(cfg_.terrain, state_.distance, cfg_.mass,
                                                cfg_.chassis);
        const int pwm[2] = {pwm_l, pwm_r};
        const double factor[2] = {cfg_.load_factor_l, cfg_.load_factor_r};
        WheelSpeeds rim;
        for (int i = 0; i < 2; ++i) {
            double load = t_load * factor[i];
            if (cfg_.load_noise > 0.0) load *= 1.0 + cfg_.load_noise * rng_.next_gauss();
            const double v = pwm_to_voltage(cfg_.motor, pwm[i]);
            const MotorStep ms = motor_step(cfg_.motor, v, state_.omega[i], load, dt);
            last_motor_[i] = ms;
            state_.omega[i] = ms.omega;
            double dang = ms.omega * dt;
            if (cfg_.encoder_noise > 0.0) dang *= 1.0 + cfg_.encoder_noise * rng_.next_gauss();
            state_.encoder[i].angle += dang;
        }
        rim.v_l = wheel_rim_speed(state_.omega[0], cfg_.chassis.r_w);
        rim.v_r = wheel_rim_speed(state_.omega[1], cfg_.chassis.r_w);
        const BodyTwist twist = forward_kinematics(rim, cfg_.chassis);
        state_.pose = integrate_pose(state_.pose, twist, dt);
        state_.distance += twist.v_c * dt;
        state_.time += dt;
        last_twist_ = twist;
        last_rim_ = rim;
    }

    const SimState& state() const { return state_; }
    const SimConfig& config() const { return cfg_; }
    const BodyTwist& last_twist() const { return last_twist_; }
    const WheelSpeeds& last_rim() const { return last_rim_; }
    long long encoder_count(int wheel) const { return state_.encoder[wheel].read(); }
    double slope() const { return cfg_.terrain.slope_at(state_.distance); }

private:
    SimConfig cfg_;
    SimState state_;
    DeterministicRng rng_;
    BodyTwist last_twist_;
    WheelSpeeds last_rim_;
};

}  // namespace ddrive
