#pragma once

#include <algorithm>

#include "ddrive/fuzzy.hpp"
#include "ddrive/pid.hpp"

namespace ddrive {

// Per-output scaling of the defuzzified adjustments.
struct FuzzyScales {
    double s_p = 0.0;
    double s_i = 0.0;
    double s_d = 0.0;
};

// Input quantization gains mapping crisp error / error rate onto the
// [-3, 3] universes (clamped there).
struct FuzzyInputGains {
    double k_e = 1.0;
    double k_ec = 1.0;
};

struct FuzzyPidStep {
    double u = 0.0;
    PidGains effective;
    double dkp = 0.0, dki = 0.0, dkd = 0.0;  // defuzzified table outputs
};

// PID with online gain scheduling: each step fuzzifies the scaled error and
// error rate, runs the three rule tables, and shifts the base gains by the
// scaled defuzzified outputs. Gains are floored at zero. With all scales
// zero the output trace is identical to the plain controller's.
class FuzzyPidController {
public:
    FuzzyPidController(PidGains base, FuzzyScales scales, FuzzyInputGains input,
                       double output_limit = 255.0)
        : base_(base),
          scales_(scales),
          input_(input),
          e_var_(fuzzy::LinguisticVariable::uniform(-3.0, 3.0)),
          ec_var_(fuzzy::LinguisticVariable::uniform(-3.0, 3.0)),
          out_var_(fuzzy::LinguisticVariable::uniform(-3.0, 3.0)),
          inner_(base, output_limit) {
        validate(base);
    }

    FuzzyPidStep update(double error, double dt) {
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
        // Error rate from the raw error, then scaled by k_ec.
        const double ec = inner_.first_step() ? 0.0 : (error - inner_.prev_error()) / dt;
        const auto de = fuzzy::fuzzify(e_var_, input_.k_e * error);
        const auto dec = fuzzy::fuzzify(ec_var_, input_.k_ec * ec);

        FuzzyPidStep out;
        out.dkp = fuzzy::defuzzify_centroid(out_var_, fuzzy::infer(fuzzy::tables::kp_rules(), de, dec));
        out.dki = fuzzy::defuzzify_centroid(out_var_, fuzzy::infer(fuzzy::tables::ki_rules(), de, dec));
        out.dkd = fuzzy::defuzzify_centroid(out_var_, fuzzy::infer(fuzzy::tables::kd_rules(), de, dec));
        out.effective.kp = std::max(0.0, base_.kp + scales_.s_p * out.dkp);
        out.effective.ki = std::max(0.0, base_.ki + scales_.s_i * out.dki);
        out.effective.kd = std::max(0.0, base_.kd + scales_.s_d * out.dkd);
        out.u = inner_.update_with(out.effective, error, dt);
        return out;
    }

    void reset() { inner_.reset(); }

    const PidGains& base_gains() const { return base_; }
    const FuzzyScales& scales() const { return scales_; }
    const PidController& inner() const { return inner_; }

private:
    PidGains base_;
    FuzzyScales scales_;
    FuzzyInputGains input_;
    fuzzy::LinguisticVariable e_var_, ec_var_, out_var_;
    PidController inner_;
};

}  // namespace ddrive
