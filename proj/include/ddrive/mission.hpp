#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "ddrive/config.hpp"

namespace ddrive {

// Fixed-format float for CSV cells: 9 significant digits, C locale assumed.
inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline constexpr const char* kTraceHeader =
    "time,x,y,theta,v_c,w,v_l,v_r,enc_l,enc_r,pwm_l,pwm_r,kp,ki,kd,state,slope";

enum class MissionStatus { Completed, Disconnected, Timeout };

inline const char* mission_status_name(MissionStatus s) {
    switch (s) {
        case MissionStatus::Completed: return "completed";
        case MissionStatus::Disconnected: return "disconnected";
        case MissionStatus::Timeout: return "timeout";
    }
    return "?";
}

struct MissionResult {
    MissionStatus status = MissionStatus::Timeout;
    double end_time = 0.0;
    long long final_error_counts = 0;  // worst wheel, last leg
    Pose final_pose;
    long long max_divergence = 0;      // max |enc_l - enc_r| seen while translating
};

// Runs the configured setpoint mission, writing one trace row per control
// period. Rows carry the state at the period start and the commands applied
// over it; gain columns report the left wheel's effective gains.
inline MissionResult run_mission(const config::ScenarioConfig& cfg, std::ostream& trace) {
    cfg.validate();
    Simulator sim(cfg.plant);
    Autopilot ap(cfg.autopilot, cfg.setpoints);

    trace << kTraceHeader << '\n';

    MissionResult res;
    std::size_t leg = 0;
    if (cfg.mission.empty()) throw std::runtime_error("mission sequence is empty");
    ap.command(cfg.mission[leg], sim.encoder_count(0), sim.encoder_count(1));

    const int steps = static_cast<int>(std::llround(cfg.duration / cfg.dt_control));
    const int sub = static_cast<int>(std::llround(cfg.dt_control / cfg.dt_plant));
    long long target = cfg.setpoints.get(cfg.mission[leg]).distance_counts;

    for (int k = 0; k < steps; ++k) {
        const long long enc_l = sim.encoder_count(0);
        const long long enc_r = sim.encoder_count(1);
        const auto out = ap.step(enc_l, enc_r, cfg.dt_control);

        if (out.phase == AutopilotPhase::Translating)
            res.max_divergence = std::max(res.max_divergence, std::llabs(enc_l - enc_r));

        const auto& st = sim.state();
        trace << csv_num(st.time) << ',' << csv_num(st.pose.x) << ',' << csv_num(st.pose.y)
              << ',' << csv_num(st.pose.theta) << ',' << csv_num(sim.last_twist().v_c) << ','
              << csv_num(sim.last_twist().w) << ',' << csv_num(sim.last_rim().v_l) << ','
              << csv_num(sim.last_rim().v_r) << ',' << enc_l << ',' << enc_r << ','
              << out.pwm_l << ',' << out.pwm_r << ',' << csv_num(out.gains_l.kp) << ','
              << csv_num(out.gains_l.ki) << ',' << csv_num(out.gains_l.kd) << ','
              << phase_name(out.phase) << ',' << csv_num(sim.slope()) << '\n';

        if (out.phase == AutopilotPhase::Disconnected) {
            res.status = MissionStatus::Disconnected;
            res.end_time = st.time;
            break;
        }
        if (out.phase == AutopilotPhase::Idle) {
            if (++leg >= cfg.mission.size()) {
                res.status = MissionStatus::Completed;
                res.end_time = st.time;
                break;
            }
            ap.command(cfg.mission[leg], enc_l, enc_r);
            target = cfg.setpoints.get(cfg.mission[leg]).distance_counts;
        }
        for (int s = 0; s < sub; ++s) sim.step(out.pwm_l, out.pwm_r, cfg.dt_plant);
    }

    const auto& st = sim.state();
    if (res.status == MissionStatus::Timeout) res.end_time = st.time;
    res.final_pose = st.pose;
    // Remaining error of the current leg, worst wheel (0 if the mission ended).
    if (res.status != MissionStatus::Completed) {
        const long long el = target - sim.encoder_count(0);
        const long long er = target - sim.encoder_count(1);
        res.final_error_counts = std::max(std::llabs(el), std::llabs(er));
    }
    return res;
}

inline void write_summary(const MissionResult& r, std::ostream& os) {
    os << "status=" << mission_status_name(r.status) << '\n'
       << "t_end=" << csv_num(r.end_time) << '\n'
       << "final_error_counts=" << r.final_error_counts << '\n'
       << "max_divergence=" << r.max_divergence << '\n'
       << "pose=" << csv_num(r.final_pose.x) << ' ' << csv_num(r.final_pose.y) << ' '
       << csv_num(r.final_pose.theta) << '\n';
}

}  // namespace ddrive
