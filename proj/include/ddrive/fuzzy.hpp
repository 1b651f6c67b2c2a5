#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddrive::fuzzy {

enum class Term { NB = 0, NM, NS, ZO, PS, PM, PB };
inline constexpr int kNumTerms = 7;

inline const char* term_name(Term t) {
    static constexpr const char* names[] = {"NB", "NM", "NS", "ZO", "PS", "PM", "PB"};
    return names[static_cast<int>(t)];
}

inline Term term_from_name(const std::string& s) {
    for (int i = 0; i < kNumTerms; ++i)
        if (s == term_name(static_cast<Term>(i))) return static_cast<Term>(i);
    throw std::invalid_argument("unknown term code: " + s);
}

// Triangle with optional saturation below a / above c (shoulder terms).
struct MembershipFunction {
    double a, b, c;           // feet and peak, a <= b <= c
    bool left_shoulder = false;   // value 1 for x <= b
    bool right_shoulder = false;  // value 1 for x >= b

    double eval(double x) const {
        if (left_shoulder && x <= b) return 1.0;
        if (right_shoulder && x >= b) return 1.0;
        if (x <= a || x >= c) return 0.0;
        if (x <= b) return b == a ? 1.0 : (x - a) / (b - a);
        return c == b ? 1.0 : (c - x) / (c - b);
    }
};

using TermDegrees = std::array<double, kNumTerms>;

// Seven-term Ruspini partition over [lo, hi]; NB and PB are shoulders.
struct LinguisticVariable {
    double lo, hi;
    std::array<MembershipFunction, kNumTerms> terms;
    std::array<double, kNumTerms> peaks;

    static LinguisticVariable uniform(double lo, double hi) {
        std::array<double, kNumTerms> p{};
        for (int i = 0; i < kNumTerms; ++i)
            p[i] = lo + (hi - lo) * i / (kNumTerms - 1);
        return from_peaks(lo, hi, p);
    }

    static LinguisticVariable from_peaks(double lo, double hi,
                                         const std::array<double, kNumTerms>& p) {
        if (!(lo < hi)) throw std::invalid_argument("universe must be nonempty");
        for (int i = 1; i < kNumTerms; ++i)
            if (!(p[i] > p[i - 1])) throw std::invalid_argument("term peaks must increase");
        LinguisticVariable v{lo, hi, {}, p};
        for (int i = 0; i < kNumTerms; ++i) {
            const double a = i == 0 ? lo : p[i - 1];
            const double c = i == kNumTerms - 1 ? hi : p[i + 1];
            v.terms[i] = {a, p[i], c, i == 0, i == kNumTerms - 1};
        }
        return v;
    }
};

inline TermDegrees fuzzify(const LinguisticVariable& v, double x) {
    x = std::clamp(x, v.lo, v.hi);
    TermDegrees d{};
    for (int i = 0; i < kNumTerms; ++i) d[i] = v.terms[i].eval(x);
    return d;
}

// 7x7 rule grid, rows indexed by the EC term, columns by the E term.
struct RuleTable {
    std::array<std::array<Term, kNumTerms>, kNumTerms> cell;

    Term at(Term ec, Term e) const { return cell[static_cast<int>(ec)][static_cast<int>(e)]; }
};

// Mamdani min-AND per rule, max aggregation per output term.
inline TermDegrees infer(const RuleTable& rules, const TermDegrees& e, const TermDegrees& ec) {
    TermDegrees out{};
    for (int i = 0; i < kNumTerms; ++i) {
        if (ec[i] <= 0.0) continue;
        for (int j = 0; j < kNumTerms; ++j) {
            if (e[j] <= 0.0) continue;
            const double s = std::min(e[j], ec[i]);
            const int o = static_cast<int>(rules.cell[i][j]);
            out[o] = std::max(out[o], s);
        }
    }
    return out;
}

namespace detail {

// Collects the x positions where some clipped term MF has a kink:
// feet, peak, and the two points where the triangle crosses its clip level.
inline void clipped_breakpoints(const MembershipFunction& m, double deg, double lo,
                                double hi, std::vector<double>& out) {
    out.push_back(m.a);
    out.push_back(m.b);
    out.push_back(m.c);
    if (deg > 0.0 && deg < 1.0) {
        if (!m.left_shoulder && m.b > m.a) out.push_back(m.a + deg * (m.b - m.a));
        if (!m.right_shoulder && m.c > m.b) out.push_back(m.c - deg * (m.c - m.b));
    }
    (void)lo;
    (void)hi;
}

}  // namespace detail

// Centroid of the union (pointwise max) of each term clipped at its degree.
// The aggregate is piecewise linear, so the integral is evaluated exactly
// over a breakpoint-refined grid rather than by raw sampling; the universe
// is still conceptually resolved at 1001 base points, but accuracy does not
// depend on it.
inline double defuzzify_centroid(const LinguisticVariable& v, const TermDegrees& agg) {
    bool any = false;
    for (double d : agg) {
        if (d < -1e-15 || d > 1.0 + 1e-12)
            throw std::invalid_argument("degrees must lie in [0, 1]");
        any = any || d > 0.0;
    }
    if (!any) throw std::domain_error("no rule fired");

    const auto mu = [&](double x) {
        double m = 0.0;
        for (int i = 0; i < kNumTerms; ++i)
            if (agg[i] > 0.0) m = std::max(m, std::min(v.terms[i].eval(x), agg[i]));
        return m;
    };

    std::vector<double> bp{v.lo, v.hi};
    for (int i = 0; i < kNumTerms; ++i)
        if (agg[i] > 0.0) detail::clipped_breakpoints(v.terms[i], agg[i], v.lo, v.hi, bp);
    for (double& x : bp) x = std::clamp(x, v.lo, v.hi);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-14; }),
             bp.end());

    // Each clipped MF is linear inside a cell; insert pairwise crossings so
    // the pointwise max switches only at grid points.
    std::vector<double> refined;
    refined.reserve(bp.size() * 2);
    for (size_t k = 0; k + 1 < bp.size(); ++k) {
        const double x0 = bp[k], x1 = bp[k + 1];
        refined.push_back(x0);
        std::array<double, kNumTerms> f0{}, f1{};
        for (int i = 0; i < kNumTerms; ++i) {
            if (agg[i] <= 0.0) continue;
            f0[i] = std::min(v.terms[i].eval(x0), agg[i]);
            f1[i] = std::min(v.terms[i].eval(x1), agg[i]);
        }
        for (int i = 0; i < kNumTerms; ++i) {
            if (agg[i] <= 0.0) continue;
            for (int j = i + 1; j < kNumTerms; ++j) {
                if (agg[j] <= 0.0) continue;
                const double d0 = f0[i] - f0[j], d1 = f1[i] - f1[j];
                if ((d0 > 0.0 && d1 < 0.0) || (d0 < 0.0 && d1 > 0.0))
                    refined.push_back(x0 + (x1 - x0) * d0 / (d0 - d1));
            }
        }
    }
    refined.push_back(bp.back());
    std::sort(refined.begin(), refined.end());

    double area = 0.0, moment = 0.0;
    for (size_t k = 0; k + 1 < refined.size(); ++k) {
        const double x0 = refined[k], x1 = refined[k + 1];
        if (x1 - x0 < 1e-15) continue;
        const double m0 = mu(x0), m1 = mu(x1);
        area += (x1 - x0) * (m0 + m1) / 2.0;
        moment += (x1 - x0) * ((2.0 * x0 + x1) * m0 + (x0 + 2.0 * x1) * m1) / 6.0;
    }
    if (area <= 0.0) throw std::domain_error("no rule fired");
    return std::clamp(moment / area, v.lo, v.hi);
}

namespace tables {

namespace detail {
inline RuleTable parse_rows(const char* const (&rows)[kNumTerms]) {
    RuleTable t{};
    for (int i = 0; i < kNumTerms; ++i) {
        std::istringstream is(rows[i]);
        std::string code;
        for (int j = 0; j < kNumTerms; ++j) {
            if (!(is >> code)) throw std::logic_error("malformed rule row");
            t.cell[i][j] = term_from_name(code);
        }
    }
    return t;
}
}  // namespace detail

// Proportional-gain adjustment rules, rows = EC, columns = E.
inline const RuleTable& kp_rules() {
    static const RuleTable t = detail::parse_rows({
        "PB PB PM PM PS ZO ZO",
        "PB PB PM PS PS ZO NS",
        "PM PM PM PS ZO NS NS",
        "PM PM PS ZO NS NM NM",
        "PS PS ZO NS NS NM NM",
        "PS ZO NS NM NM NM NB",
        "ZO ZO NM NM NM NB NB",
    });
    return t;
}

inline const RuleTable& ki_rules() {
    static const RuleTable t = detail::parse_rows({
        "NB NB NB NB NM ZO ZO",
        "NB NB NB NB NM ZO ZO",
        "NM NM NM NM ZO PS PS",
        "NM NM NS ZO PS PM PM",
        "NS NS ZO PM PM PM PM",
        "ZO ZO PM PB PB PB PB",
        "ZO ZO PM PB PB PB PB",
    });
    return t;
}

inline const RuleTable& kd_rules() {
    static const RuleTable t = detail::parse_rows({
        "PS NS NB NB NB NM PS",
        "PS NS NB NM NM NS ZO",
        "ZO NS NM NM NS NS ZO",
        "ZO NS NS NS NS NS ZO",
        "ZO ZO ZO ZO ZO ZO ZO",
        "PB NS PS PS PS PS PB",
        "PB PM PM PM PS PS PB",
    });
    return t;
}

}  // namespace tables

// Plain-text grid format: 7 rows of 7 two-letter term codes.
inline std::string to_grid(const RuleTable& t) {
    std::string out;
    for (int i = 0; i < kNumTerms; ++i) {
        for (int j = 0; j < kNumTerms; ++j) {
            if (j) out += ' ';
            out += term_name(t.cell[i][j]);
        }
        out += '\n';
    }
    return out;
}

// Variable format: one line, "lo hi p0 p1 p2 p3 p4 p5 p6".
inline std::string to_text(const LinguisticVariable& v) {
    std::ostringstream os;
    os.precision(17);
    os << v.lo << ' ' << v.hi;
    for (double p : v.peaks) os << ' ' << p;
    os << '\n';
    return os.str();
}

inline LinguisticVariable variable_from_text(const std::string& text) {
    std::istringstream is(text);
    double lo, hi;
    std::array<double, kNumTerms> peaks{};
    if (!(is >> lo >> hi)) throw std::invalid_argument("variable text needs lo hi");
    for (int i = 0; i < kNumTerms; ++i)
        if (!(is >> peaks[i])) throw std::invalid_argument("variable text needs 7 peaks");
    return LinguisticVariable::from_peaks(lo, hi, peaks);
}

inline RuleTable from_grid(const std::string& text) {
    std::istringstream is(text);
    RuleTable t{};
    std::string code;
    for (int i = 0; i < kNumTerms; ++i)
        for (int j = 0; j < kNumTerms; ++j) {
            if (!(is >> code)) throw std::invalid_argument("grid needs 49 term codes");
            t.cell[i][j] = term_from_name(code);
        }
    if (is >> code) throw std::invalid_argument("grid has trailing content");
    return t;
}

}  // namespace ddrive::fuzzy
