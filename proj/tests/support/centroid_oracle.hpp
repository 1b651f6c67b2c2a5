#pragma once

#include <algorithm>
#include <vector>

#include "ddrive/fuzzy.hpp"

namespace ddrive::testsupport {

// Independent centroid oracle: trapezoid integration over a 10x-density
// uniform grid refined with every membership kink, clip corner, and
// bisected pairwise crossing of the clipped terms. Exact for the piecewise
// linear aggregate, derived separately from the library's event sweep.
inline double centroid_oracle(const fuzzy::LinguisticVariable& v,
                              const fuzzy::TermDegrees& agg) {
    using fuzzy::kNumTerms;
    const auto clipped = [&](int t, double x) {
        return std::min(v.terms[t].eval(x), agg[t]);
    };
    const auto mu = [&](double x) {
        double m = 0.0;
        for (int t = 0; t < kNumTerms; ++t)
            if (agg[t] > 0.0) m = std::max(m, clipped(t, x));
        return m;
    };

    std::vector<double> xs;
    const int n = 10 * 1000;
    xs.reserve(n + 64);
    for (int i = 0; i <= n; ++i) xs.push_back(v.lo + (v.hi - v.lo) * i / n);
    for (int t = 0; t < kNumTerms; ++t) {
        if (agg[t] <= 0.0) continue;
        const auto& m = v.terms[t];
        for (double x : {m.a, m.b, m.c})
            if (x >= v.lo && x <= v.hi) xs.push_back(x);
        if (agg[t] < 1.0) {
            if (!m.left_shoulder && m.b > m.a) xs.push_back(m.a + agg[t] * (m.b - m.a));
            if (!m.right_shoulder && m.c > m.b) xs.push_back(m.c - agg[t] * (m.c - m.b));
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<double> extra;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        for (int s = 0; s < kNumTerms; ++s) {
            if (agg[s] <= 0.0) continue;
            for (int t = s + 1; t < kNumTerms; ++t) {
                if (agg[t] <= 0.0) continue;
                double a = xs[k], b = xs[k + 1];
                double fa = clipped(s, a) - clipped(t, a);
                const double fb = clipped(s, b) - clipped(t, b);
                if ((fa > 0.0 && fb < 0.0) || (fa < 0.0 && fb > 0.0)) {
                    for (int it = 0; it < 60; ++it) {
                        const double m = 0.5 * (a + b);
                        const double fm = clipped(s, m) - clipped(t, m);
                        if ((fa > 0.0) == (fm > 0.0)) {
                            a = m;
                            fa = fm;
                        } else {
                            b = m;
                        }
                    }
                    extra.push_back(0.5 * (a + b));
                }
            }
        }
    }
    xs.insert(xs.end(), extra.begin(), extra.end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    double area = 0.0, moment = 0.0;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        const double x0 = xs[k], x1 = xs[k + 1];
        const double m0 = mu(x0), m1 = mu(x1);
        area += (x1 - x0) * (m0 + m1) / 2.0;
        moment += (x1 - x0) * ((2.0 * x0 + x1) * m0 + (x0 + 2.0 * x1) * m1) / 6.0;
    }
    return moment / area;
}

}  // namespace ddrive::testsupport
