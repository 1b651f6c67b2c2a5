#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ddrive/color.hpp"
#include "ddrive/fuzzy_pid.hpp"
#include "ddrive/mission.hpp"
#include "ddrive/tuning.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitMissionFailed = 3;

int cmd_sim(const std::string& config_path, const std::string& out_path,
            std::optional<std::uint64_t> seed) {
    ddrive::config::ScenarioConfig cfg;
    try {
        cfg = ddrive::config::load_scenario(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (seed) cfg.plant.seed = *seed;

    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "config error: cannot open output file " << out_path << '\n';
        return kExitConfig;
    }
    try {
        const auto res = ddrive::run_mission(cfg, out);
        ddrive::write_summary(res, std::cout);
        return res.status == ddrive::MissionStatus::Completed ? kExitOk : kExitMissionFailed;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}

int cmd_tune(const std::string& config_path, const std::string& method,
             const std::string& out_path) {
    ddrive::config::ScenarioConfig cfg;
    try {
        cfg = ddrive::config::load_scenario(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    const auto sc = cfg.tune_scenario();

    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "config error: cannot open output file " << out_path << '\n';
        return kExitConfig;
    }
    out << "method,step,kp,ki,kd,note\n";
    using ddrive::csv_num;
    try {
        if (method == "zn") {
            const auto u = ddrive::tuning::find_ultimate_gain(sc);
            out << "zn,0," << csv_num(u.k_u) << ",0,0,ultimate gain (P_u=" << csv_num(u.p_u)
                << ")\n";
            int step = 1;
            for (auto kind : {ddrive::tuning::ZnKind::P, ddrive::tuning::ZnKind::PI,
                              ddrive::tuning::ZnKind::PID}) {
                const auto g = ddrive::tuning::zn_gains(u, kind);
                const char* name = kind == ddrive::tuning::ZnKind::P
                                       ? "P"
                                       : (kind == ddrive::tuning::ZnKind::PI ? "PI" : "PID");
                out << "zn," << step++ << ',' << csv_num(g.kp) << ',' << csv_num(g.ki) << ','
                    << csv_num(g.kd) << ',' << name << '\n';
                if (kind == ddrive::tuning::ZnKind::PID) {
                    std::cout << "[gains]\nkp = " << csv_num(g.kp) << "\nki = " << csv_num(g.ki)
                              << "\nkd = " << csv_num(g.kd) << '\n';
                }
            }
        } else if (method == "new") {
            const auto r = ddrive::tuning::new_method_tune(sc);
            for (const auto& s : r.log)
                out << "new," << s.step << ',' << csv_num(s.gains.kp) << ','
                    << csv_num(s.gains.ki) << ',' << csv_num(s.gains.kd) << ',' << s.note
                    << '\n';
            out << "new,5," << csv_num(r.gains.kp) << ',' << csv_num(r.gains.ki) << ','
                << csv_num(r.gains.kd) << ",final (decay=" << csv_num(r.decay_after_halving)
                << " sse=" << csv_num(r.final_sse) << ")\n";
            std::cout << "[gains]\nkp = " << csv_num(r.gains.kp)
                      << "\nki = " << csv_num(r.gains.ki) << "\nkd = " << csv_num(r.gains.kd)
                      << '\n';
        } else {
            std::cerr << "usage error: unknown method '" << method << "' (zn|new)\n";
            return kExitConfig;
        }
    } catch (const ddrive::tuning::NoUltimateGain&) {
        out << method << ",0,0,0,0,no ultimate gain found\n";
        std::cout << "no ultimate gain found\n";
    }
    return kExitOk;
}

int cmd_color(const std::string& color_arg, double distance, double noise,
              std::uint64_t seed, const std::string& raw_triple) {
    using namespace ddrive::color;
    const auto& cal = reference_calibration();
    const auto& rules = reference_rules();

    ChannelReading reading{};
    if (!raw_triple.empty()) {
        std::istringstream is(raw_triple);
        char c1, c2;
        if (!(is >> reading.r >> c1 >> reading.g >> c2 >> reading.b) || c1 != ',' || c2 != ',') {
            std::cerr << "usage error: --raw expects r,g,b\n";
            return kExitConfig;
        }
    } else {
        const auto cls = color_from_name(color_arg);
        if (!cls) {
            std::cerr << "usage error: unknown color '" << color_arg << "'\n";
            return kExitConfig;
        }
        try {
            reading = simulate_sensor(*cls, distance, cal, noise, seed);
        } catch (const std::exception& e) {
            std::cerr << "usage error: " << e.what() << '\n';
            return kExitConfig;
        }
    }

    const auto mfs = calibrate_memberships(cal, rules);
    std::cout << "reading=" << ddrive::csv_num(reading.r) << ',' << ddrive::csv_num(reading.g)
              << ',' << ddrive::csv_num(reading.b) << '\n';
    try {
        const auto cl = classify(reading, mfs, rules, cal);
        std::cout << "winner=" << color_name(cl.winner)
                  << " activation=" << ddrive::csv_num(cl.activation) << '\n';
        for (int i = 0; i < kNumColors; ++i)
            std::cout << "  " << color_name(static_cast<ColorClass>(i)) << '='
                      << ddrive::csv_num(cl.activations[i]) << '\n';
        if (cl.ambiguous.size() > 1) {
            std::cout << "ambiguous=";
            for (std::size_t i = 0; i < cl.ambiguous.size(); ++i)
                std::cout << (i ? "," : "") << color_name(cl.ambiguous[i]);
            std::cout << '\n';
        }
    } catch (const std::exception& e) {
        std::cout << "winner=none (" << e.what() << ")\n";
    }
    return kExitOk;
}

int cmd_fuzzy(double e, double ec) {
    using namespace ddrive::fuzzy;
    const auto var = LinguisticVariable::uniform(-3.0, 3.0);
    const auto de = fuzzify(var, e);
    const auto dec = fuzzify(var, ec);
    const double dkp = defuzzify_centroid(var, infer(tables::kp_rules(), de, dec));
    const double dki = defuzzify_centroid(var, infer(tables::ki_rules(), de, dec));
    const double dkd = defuzzify_centroid(var, infer(tables::kd_rules(), de, dec));
    std::cout << "dkp=" << ddrive::csv_num(dkp) << " dki=" << ddrive::csv_num(dki)
              << " dkd=" << ddrive::csv_num(dkd) << '\n';
    return kExitOk;
}

int cmd_kin(const std::string& wheels, const std::string& twist, double track, double radius) {
    try {
        const ddrive::ChassisGeometry g(track, radius);
        if (!wheels.empty()) {
            std::istringstream is(wheels);
            double vl, vr;
            char c;
            if (!(is >> vl >> c >> vr) || c != ',')
                throw std::runtime_error("--wheels expects vl,vr");
            const auto t = ddrive::forward_kinematics({vl, vr}, g);
            std::cout << "v_c=" << ddrive::csv_num(t.v_c) << " w=" << ddrive::csv_num(t.w);
            const auto r = ddrive::icr_radius({vl, vr}, g);
            if (r)
                std::cout << " r_c=" << ddrive::csv_num(*r) << '\n';
            else
                std::cout << " r_c=straight\n";
        } else if (!twist.empty()) {
            std::istringstream is(twist);
            double vc, w;
            char c;
            if (!(is >> vc >> c >> w) || c != ',')
                throw std::runtime_error("--twist expects v_c,w");
            const auto ws = ddrive::inverse_kinematics({vc, w}, g);
            std::cout << "v_l=" << ddrive::csv_num(ws.v_l) << " v_r=" << ddrive::csv_num(ws.v_r)
                      << '\n';
        } else {
            throw std::runtime_error("one of --wheels or --twist is required");
        }
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"differential-drive control simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path = "trace.csv", format = "csv";
    std::optional<std::uint64_t> seed_override;

    auto* sim = app.add_subcommand("sim", "run a scenario mission");
    sim->add_option("--config", config_path)->required();
    sim->add_option("--out", out_path);
    sim->add_option("--format", format)->check(CLI::IsMember({"csv"}));
    std::uint64_t seed_val = 0;
    auto* seed_opt = sim->add_option("--seed", seed_val);

    std::string method = "zn";
    auto* tune = app.add_subcommand("tune", "run an automated tuning procedure");
    tune->add_option("--config", config_path)->required();
    tune->add_option("--method", method);
    tune->add_option("--out", out_path);

    std::string color_name, raw_triple;
    double distance = 8.0, noise = 0.0;
    std::uint64_t color_seed = 0;
    auto* color = app.add_subcommand("color", "classify a surface color");
    color->add_option("--color", color_name);
    color->add_option("--distance", distance);
    color->add_option("--noise", noise);
    color->add_option("--seed", color_seed);
    color->add_option("--raw", raw_triple);

    double e = 0.0, ec = 0.0;
    auto* fuzzy = app.add_subcommand("fuzzy", "evaluate the gain-scheduling tables");
    fuzzy->add_option("--e", e);
    fuzzy->add_option("--ec", ec);

    std::string wheels, twist;
    double track = 0.15, radius = 0.03;
    auto* kin = app.add_subcommand("kin", "one-shot kinematics evaluation");
    kin->add_option("--wheels", wheels);
    kin->add_option("--twist", twist);
    kin->add_option("--track", track);
    kin->add_option("--radius", radius);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (sim->parsed()) {
        if (*seed_opt) seed_override = seed_val;
        return cmd_sim(config_path, out_path, seed_override);
    }
    if (tune->parsed()) return cmd_tune(config_path, method, out_path);
    if (color->parsed()) {
        if (color_name.empty() && raw_triple.empty()) {
            std::cerr << "usage error: need --color or --raw\n";
            return kExitConfig;
        }
        return cmd_color(color_name, distance, noise, color_seed, raw_triple);
    }
    if (fuzzy->parsed()) return cmd_fuzzy(e, ec);
    if (kin->parsed()) return cmd_kin(wheels, twist, track, radius);
    return kExitConfig;
}
