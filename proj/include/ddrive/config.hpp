#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddrive/autopilot.hpp"
#include "ddrive/sim.hpp"
#include "ddrive/tuning.hpp"

namespace ddrive::config {

struct ParseError : std::runtime_error {
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_no(line) {}
    int line_no;
};

enum class ControllerKind { Pid, FuzzyPid };

// Everything a scenario file can specify. Defaults mirror the reference
// desk-scale setup.
struct ScenarioConfig {
    SimConfig plant;
    AutopilotConfig autopilot;
    SetpointTable setpoints;
    std::vector<SetpointId> mission;
    ControllerKind controller = ControllerKind::Pid;

    double dt_plant = 0.001;
    double dt_control = 0.01;
    double duration = 30.0;
    long long target_counts = 2000;   // tuning scenarios
    double tune_output_limit = 255.0;

    void validate() const {
        if (!(dt_plant > 0.0) || !(dt_control > 0.0) || !(duration > 0.0))
            throw std::runtime_error("time steps and duration must be positive");
        const double ratio = dt_control / dt_plant;
        if (std::abs(ratio - std::llround(ratio)) > 1e-9 || ratio < 1.0)
            throw std::runtime_error("dt_control must be an integer multiple of dt_plant");
    }

    tuning::TuneScenario tune_scenario() const {
        return {plant, target_counts, dt_control, dt_plant, duration, tune_output_limit};
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double to_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ParseError(line, "expected a number, got '" + v + "'");
    }
}

inline long long to_ll(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ParseError(line, "expected an integer, got '" + v + "'");
    }
}

}  // namespace detail

// Line-oriented format: [section] headers, key = value pairs, '#' comments.
// Unknown sections or keys are rejected with the offending line number.
inline ScenarioConfig parse_scenario(std::istream& in) {
    ScenarioConfig cfg;
    std::vector<std::pair<double, double>> knots;
    bool fuzzy_requested = false;
    FuzzyScales scales;
    FuzzyInputGains input;
    PidGains gains;
    double output_limit = 255.0;

    std::string section, line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) throw ParseError(line_no, "expected key = value");

        auto num = [&] { return detail::to_double(val, line_no); };
        auto integer = [&] { return detail::to_ll(val, line_no); };

        if (section == "plant") {
            if (key == "motor") {
                if (val != "alex-ref")
                    throw ParseError(line_no, "unknown motor config '" + val + "'");
                cfg.plant.motor = alex_ref_motor();
            } else if (key == "r_a") cfg.plant.motor.r_a = num();
            else if (key == "k_t") cfg.plant.motor.k_t = num();
            else if (key == "k_e") cfg.plant.motor.k_e = num();
            else if (key == "j") cfg.plant.motor.j = num();
            else if (key == "b") cfg.plant.motor.b = num();
            else if (key == "v_max") cfg.plant.motor.v_max = num();
            else if (key == "gear_ratio") cfg.plant.motor.gear_ratio = num();
            else if (key == "mass") cfg.plant.mass = num();
            else if (key == "load_factor_l") cfg.plant.load_factor_l = num();
            else if (key == "load_factor_r") cfg.plant.load_factor_r = num();
            else if (key == "load_noise") cfg.plant.load_noise = num();
            else if (key == "encoder_noise") cfg.plant.encoder_noise = num();
            else throw ParseError(line_no, "unknown plant key '" + key + "'");
        } else if (section == "chassis") {
            if (key == "track")
                cfg.plant.chassis = ChassisGeometry(num(), cfg.plant.chassis.r_w);
            else if (key == "wheel_radius")
                cfg.plant.chassis = ChassisGeometry(cfg.plant.chassis.d_w, num());
            else throw ParseError(line_no, "unknown chassis key '" + key + "'");
        } else if (section == "encoder") {
            if (key == "counts_per_rev") cfg.plant.counts_per_rev = static_cast<int>(integer());
            else throw ParseError(line_no, "unknown encoder key '" + key + "'");
        } else if (section == "terrain") {
            if (key == "knot") {
                std::istringstream kv(val);
                double s, deg;
                if (!(kv >> s >> deg)) throw ParseError(line_no, "knot needs: distance_m slope_deg");
                knots.emplace_back(s, deg * kPi / 180.0);
            } else throw ParseError(line_no, "unknown terrain key '" + key + "'");
        } else if (section == "controller") {
            if (key == "type") {
                if (val == "pid") fuzzy_requested = false;
                else if (val == "fuzzy-pid") fuzzy_requested = true;
                else throw ParseError(line_no, "controller type must be pid or fuzzy-pid");
            } else if (key == "kp") gains.kp = num();
            else if (key == "ki") gains.ki = num();
            else if (key == "kd") gains.kd = num();
            else if (key == "output_limit") output_limit = num();
            else if (key == "s_p") scales.s_p = num();
            else if (key == "s_i") scales.s_i = num();
            else if (key == "s_d") scales.s_d = num();
            else if (key == "k_e") input.k_e = num();
            else if (key == "k_ec") input.k_ec = num();
            else throw ParseError(line_no, "unknown controller key '" + key + "'");
        } else if (section == "autopilot") {
            if (key == "watchdog_limit") cfg.autopilot.watchdog_limit = integer();
            else if (key == "tolerance") cfg.autopilot.tolerance = integer();
            else throw ParseError(line_no, "unknown autopilot key '" + key + "'");
        } else if (section == "setpoints") {
            const auto id = setpoint_from_name(key);
            if (!id) throw ParseError(line_no, "unknown setpoint id '" + key + "'");
            std::istringstream kv(val);
            long long counts;
            double phi_deg;
            if (!(kv >> counts >> phi_deg))
                throw ParseError(line_no, "setpoint needs: distance_counts heading_deg");
            try {
                cfg.setpoints.set(*id, {counts, phi_deg * kPi / 180.0});
            } catch (const std::exception& e) {
                throw ParseError(line_no, e.what());
            }
        } else if (section == "mission") {
            if (key == "sequence") {
                std::istringstream kv(val);
                std::string name;
                while (kv >> name) {
                    const auto id = setpoint_from_name(name);
                    if (!id) throw ParseError(line_no, "unknown setpoint id '" + name + "'");
                    cfg.mission.push_back(*id);
                }
            } else throw ParseError(line_no, "unknown mission key '" + key + "'");
        } else if (section == "sim") {
            if (key == "dt_plant") cfg.dt_plant = num();
            else if (key == "dt_control") cfg.dt_control = num();
            else if (key == "duration") cfg.duration = num();
            else if (key == "seed") cfg.plant.seed = static_cast<std::uint64_t>(integer());
            else if (key == "target_counts") cfg.target_counts = integer();
            else if (key == "output_limit") cfg.tune_output_limit = num();
            else throw ParseError(line_no, "unknown sim key '" + key + "'");
        } else if (section.empty()) {
            throw ParseError(line_no, "key outside any [section]");
        } else {
            throw ParseError(line_no, "unknown section '" + section + "'");
        }
    }

    if (!knots.empty()) cfg.plant.terrain = TerrainProfile(knots);
    cfg.controller = fuzzy_requested ? ControllerKind::FuzzyPid : ControllerKind::Pid;
    ControllerSpec spec{gains, output_limit, fuzzy_requested, scales, input};
    cfg.autopilot.forward = spec;
    cfg.autopilot.steering = spec;
    cfg.autopilot.chassis = cfg.plant.chassis;
    cfg.autopilot.counts_per_rev = cfg.plant.counts_per_rev;
    cfg.validate();
    return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_scenario(in);
}

}  // namespace ddrive::config
