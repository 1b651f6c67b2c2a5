#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddrive/pid.hpp"
#include "ddrive/sim.hpp"

namespace ddrive::tuning {

// Uniformly sampled closed-loop error signal.
struct ErrorTrace {
    double dt;                // s between samples
    std::vector<double> e;    // error per sample

    double duration() const { return dt * static_cast<double>(e.size()); }
};

struct OscillationAnalysis {
    std::vector<std::size_t> peak_index;
    std::vector<double> peak_value;
    double mean_period = 0.0;   // s, mean spacing of prominent peaks
    double decay_ratio = 0.0;   // mean successive peak ratio, 0 if < 2 peaks
    bool sustained = false;
};

namespace detail {

// Local maxima with topographic prominence >= 1% of max |e| and at least
// 3 samples between kept peaks.
inline std::vector<std::size_t> prominent_peaks(const std::vector<double>& tr,
                                                std::size_t min_sep = 3,
                                                double prom_frac = 0.01) {
    std::vector<std::size_t> out;
    double amax = 0.0;
    for (double v : tr) amax = std::max(amax, std::abs(v));
    if (amax <= 0.0) return out;
    const double thresh = prom_frac * amax;
    for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
        if (!(tr[i] > tr[i - 1] && tr[i] >= tr[i + 1])) continue;
        double min_l = tr[i];
        for (std::size_t j = i; j > 0 && tr[j - 1] <= tr[i];) {
            --j;
            min_l = std::min(min_l, tr[j]);
        }
        double min_r = tr[i];
        for (std::size_t j = i; j + 1 < tr.size() && tr[j + 1] <= tr[i];) {
            ++j;
            min_r = std::min(min_r, tr[j]);
        }
        if (tr[i] - std::max(min_l, min_r) < thresh) continue;
        if (!out.empty() && i - out.back() < min_sep) continue;
        out.push_back(i);
    }
    return out;
}

}  // namespace detail

// Peak bookkeeping over the whole trace; "sustained" judges only the last
// third so decaying transients and sub-prominence jitter do not count.
inline OscillationAnalysis analyze_oscillation(const ErrorTrace& t) {
    if (t.e.size() < 3) throw std::invalid_argument("trace too short to analyze");
    OscillationAnalysis a;
    a.peak_index = detail::prominent_peaks(t.e);
    for (std::size_t i : a.peak_index) a.peak_value.push_back(t.e[i]);

    if (a.peak_index.size() >= 2) {
        double rsum = 0.0;
        int rn = 0;
        for (std::size_t k = 0; k + 1 < a.peak_value.size(); ++k) {
            if (a.peak_value[k] > 0.0) {
                rsum += a.peak_value[k + 1] / a.peak_value[k];
                ++rn;
            }
        }
        if (rn > 0) a.decay_ratio = rsum / rn;
        double dsum = 0.0;
        for (std::size_t k = 0; k + 1 < a.peak_index.size(); ++k)
            dsum += static_cast<double>(a.peak_index[k + 1] - a.peak_index[k]);
        a.mean_period = dsum / static_cast<double>(a.peak_index.size() - 1) * t.dt;
    }

    const std::size_t tail_start = t.e.size() * 2 / 3;
    std::vector<double> tail_vals;
    for (std::size_t k = 0; k < a.peak_index.size(); ++k)
        if (a.peak_index[k] >= tail_start) tail_vals.push_back(a.peak_value[k]);
    if (tail_vals.size() >= 3) {
        double rsum = 0.0;
        int rn = 0;
        bool ok = true;
        for (std::size_t k = 0; k + 1 < tail_vals.size(); ++k) {
            if (tail_vals[k] > 0.0) {
                const double r = tail_vals[k + 1] / tail_vals[k];
                if (!std::isfinite(r)) ok = false;
                rsum += r;
                ++rn;
            }
        }
        if (ok && rn > 0) {
            const double mr = rsum / rn;
            a.sustained = mr >= 0.9 && mr <= 1.1;
        }
    }
    return a;
}

struct ResponseMetrics {
    std::optional<double> rise_time;      // s, 10% -> 90% of setpoint
    double overshoot = 0.0;               // fraction of |setpoint|
    std::optional<double> settling_time;  // s, last exit from the 2% band
    double steady_state_error = 0.0;      // mean error over the trailing 10%
};

inline ResponseMetrics response_metrics(const ErrorTrace& t, double setpoint) {
    if (t.e.empty()) throw std::invalid_argument("empty trace");
    ResponseMetrics m;
    std::optional<double> t10, t90;
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.e.size(); ++i) {
        const double y = setpoint - t.e[i];
        peak = std::max(peak, y);
        if (!t10 && y >= 0.1 * setpoint) t10 = static_cast<double>(i) * t.dt;
        if (!t90 && y >= 0.9 * setpoint) t90 = static_cast<double>(i) * t.dt;
    }
    if (t10 && t90) m.rise_time = *t90 - *t10;
    if (setpoint != 0.0) m.overshoot = std::max(0.0, (peak - setpoint) / std::abs(setpoint));

    const double band = 0.02 * std::abs(setpoint);
    std::optional<std::size_t> last_out;
    for (std::size_t i = 0; i < t.e.size(); ++i)
        if (std::abs(t.e[i]) > band) last_out = i;
    if (!last_out)
        m.settling_time = 0.0;
    else if (*last_out + 1 < t.e.size())
        m.settling_time = static_cast<double>(*last_out + 1) * t.dt;

    const std::size_t n = std::max<std::size_t>(1, t.e.size() / 10);
    double sum = 0.0;
    for (std::size_t i = t.e.size() - n; i < t.e.size(); ++i) sum += t.e[i];
    m.steady_state_error = sum / static_cast<double>(n);
    return m;
}

// Step-setpoint scenario: both wheels run the same count-error PID toward a
// fixed target; the recorded error is the left wheel's.
struct TuneScenario {
    SimConfig plant;
    long long target_counts = 2000;
    double dt_control = 0.06;
    double dt_plant = 0.001;
    double duration = 30.0;
    double output_limit = 255.0;
};

inline ErrorTrace run_step_response(const TuneScenario& sc, const PidGains& gains) {
    Simulator sim(sc.plant);
    PidController pid_l(gains, sc.output_limit), pid_r(gains, sc.output_limit);
    const int steps = static_cast<int>(std::llround(sc.duration / sc.dt_control));
    const int sub = static_cast<int>(std::llround(sc.dt_control / sc.dt_plant));
    if (sub < 1) throw std::invalid_argument("control period must be a multiple of plant step");
    ErrorTrace trace{sc.dt_control, {}};
    trace.e.reserve(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
        const double el = static_cast<double>(sc.target_counts - sim.encoder_count(0));
        const double er = static_cast<double>(sc.target_counts - sim.encoder_count(1));
        trace.e.push_back(el);
        const int pwm_l = pwm_saturate(pid_l.update(el, sc.dt_control));
        const int pwm_r = pwm_saturate(pid_r.update(er, sc.dt_control));
        for (int s = 0; s < sub; ++s) sim.step(pwm_l, pwm_r, sc.dt_plant);
    }
    return trace;
}

struct UltimateGain {
    double k_u;  // proportional gain at the oscillation boundary
    double p_u;  // s, oscillation period there
};

struct NoUltimateGain : std::runtime_error {
    NoUltimateGain() : std::runtime_error("no ultimate gain found") {}
};

// Geometric P-gain sweep until the loop oscillation is sustained, then
// bisection to a 1% bracket. Deterministic: same scenario, same answer.
inline UltimateGain find_ultimate_gain(const TuneScenario& sc, double kp_start = 0.05,
                                       double kp_factor = 2.0, double kp_max = 64.0) {
    if (!(kp_start > 0.0) || !(kp_factor > 1.0))
        throw std::invalid_argument("need kp_start > 0 and kp_factor > 1");
    const auto sustained = [&](double kp) {
        return analyze_oscillation(run_step_response(sc, {kp, 0.0, 0.0})).sustained;
    };
    double lo = kp_start, hi = 0.0, kp = kp_start, prev = kp_start;
    bool found = false;
    while (kp <= kp_max) {
        if (sustained(kp)) {
            hi = kp;
            lo = prev;
            found = true;
            break;
        }
        prev = kp;
        kp *= kp_factor;
    }
    if (!found) throw NoUltimateGain();
    while (hi - lo > 0.01 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (sustained(mid))
            hi = mid;
        else
            lo = mid;
    }
    const auto a = analyze_oscillation(run_step_response(sc, {hi, 0.0, 0.0}));
    if (!(a.mean_period > 0.0)) throw NoUltimateGain();
    return {hi, a.mean_period};
}

enum class ZnKind { P, PI, PID };

inline PidGains zn_gains(const UltimateGain& u, ZnKind kind) {
    if (!(u.k_u > 0.0) || !(u.p_u > 0.0))
        throw std::invalid_argument("ultimate gain and period must be positive");
    switch (kind) {
        case ZnKind::P:
            return {0.50 * u.k_u, 0.0, 0.0};
        case ZnKind::PI: {
            const double kp = 0.45 * u.k_u;
            return {kp, 1.2 * kp / u.p_u, 0.0};
        }
        case ZnKind::PID: {
            const double kp = 0.60 * u.k_u;
            return {kp, 2.0 * kp / u.p_u, kp * u.p_u / 8.0};
        }
    }
    throw std::invalid_argument("unknown controller kind");
}

struct TuneStep {
    int step;
    PidGains gains;
    std::string note;
};

struct NewMethodResult {
    PidGains gains;
    UltimateGain ultimate;
    double decay_after_halving = 0.0;
    double final_sse = 0.0;  // counts, |mean| of trailing window
    std::vector<TuneStep> log;
};

// Four-step hybrid procedure: raise kp to sustained oscillation, halve it,
// grow ki geometrically until the offset is gone, then grow kd while the
// settling time still improves. The steering variant skips the ki step.
inline NewMethodResult new_method_tune(const TuneScenario& sc, bool steering_variant = false,
                                       double ki_start = 1e-4, double ki_max = 10.0,
                                       double kd_start = 1e-3, double kd_max = 100.0) {
    NewMethodResult r;
    r.ultimate = find_ultimate_gain(sc);
    r.log.push_back({1, {r.ultimate.k_u, 0.0, 0.0}, "sustained oscillation"});

    const double kp = 0.5 * r.ultimate.k_u;
    {
        const auto a = analyze_oscillation(run_step_response(sc, {kp, 0.0, 0.0}));
        r.decay_after_halving = a.decay_ratio;
    }
    r.log.push_back({2, {kp, 0.0, 0.0}, "halved"});

    const double sp = static_cast<double>(sc.target_counts);
    double ki = 0.0;
    if (!steering_variant) {
        ki = ki_start;
        for (;;) {
            const auto m = response_metrics(run_step_response(sc, {kp, ki, 0.0}), sp);
            if (std::abs(m.steady_state_error) < 0.01 * std::abs(sp)) break;
            ki *= 2.0;
            if (ki > ki_max) throw std::runtime_error("ki search exhausted");
        }
        r.log.push_back({3, {kp, ki, 0.0}, "offset corrected"});
    }

    auto settling = [&](double kd) {
        return response_metrics(run_step_response(sc, {kp, ki, kd}), sp).settling_time;
    };
    std::optional<double> best = settling(0.0);
    double kd = 0.0, cand = kd_start;
    while (cand <= kd_max) {
        const auto st = settling(cand);
        if (st && (!best || *st < *best)) {
            best = st;
            kd = cand;
            cand *= 2.0;
        } else {
            break;
        }
    }
    r.log.push_back({4, {kp, ki, kd}, "derivative added"});

    r.gains = {kp, ki, kd};
    const auto m = response_metrics(run_step_response(sc, r.gains), sp);
    r.final_sse = std::abs(m.steady_state_error);
    return r;
}

enum class GainAxis { Kp, Ki, Kd };

struct EffectsComparison {
    PidGains base, increased;
    ResponseMetrics before, after;
};

// Before/after comparison for one gain raised by the given factor.
inline EffectsComparison effects_check(const TuneScenario& sc, const PidGains& base,
                                       GainAxis which, double factor) {
    if (!(factor > 1.0)) throw std::invalid_argument("factor must exceed 1");
    PidGains inc = base;
    switch (which) {
        case GainAxis::Kp: inc.kp *= factor; break;
        case GainAxis::Ki: inc.ki *= factor; break;
        case GainAxis::Kd: inc.kd *= factor; break;
    }
    const double sp = static_cast<double>(sc.target_counts);
    EffectsComparison c{base, inc, {}, {}};
    c.before = response_metrics(run_step_response(sc, base), sp);
    c.after = response_metrics(run_step_response(sc, inc), sp);
    return c;
}

}  // namespace ddrive::tuning
