#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddrive/plant.hpp"

namespace ddrive::color {

enum class ColorClass { Black = 0, Green, Red, Orange, Blue, Purple, White };
inline constexpr int kNumColors = 7;

inline const char* color_name(ColorClass c) {
    static constexpr const char* names[] = {"black", "green",  "red",  "orange",
                                            "blue",  "purple", "white"};
    return names[static_cast<int>(c)];
}

inline std::optional<ColorClass> color_from_name(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    for (int i = 0; i < kNumColors; ++i)
        if (s == color_name(static_cast<ColorClass>(i))) return static_cast<ColorClass>(i);
    return std::nullopt;
}

enum class Channel { R = 0, G, B };

// Period-like sensor output per filter channel; larger = darker.
struct ChannelReading {
    double r, g, b;

    double at(Channel c) const {
        switch (c) {
            case Channel::R: return r;
            case Channel::G: return g;
            case Channel::B: return b;
        }
        return 0.0;
    }
    void validate() const {
        if (!(r > 0.0 && g > 0.0 && b > 0.0))
            throw std::invalid_argument("channel readings must be positive");
    }
};

// Near (2 cm) and far (8 cm) reference readings per color.
struct ColorCalibration {
    std::array<ChannelReading, kNumColors> near;
    std::array<ChannelReading, kNumColors> far;

    double channel_min(Channel c) const {
        double m = near[0].at(c);
        for (int i = 0; i < kNumColors; ++i)
            m = std::min({m, near[i].at(c), far[i].at(c)});
        return m;
    }
    double channel_max(Channel c) const {
        double m = near[0].at(c);
        for (int i = 0; i < kNumColors; ++i)
            m = std::max({m, near[i].at(c), far[i].at(c)});
        return m;
    }
};

// Bench calibration readings for the seven reference surfaces.
inline const ColorCalibration& reference_calibration() {
    static const ColorCalibration cal = {
        // near (2 cm): r, g, b
        {{{433, 390, 263},
          {199, 125, 138},
          {92, 234, 170},
          {80, 166, 151},
          {186, 94, 52},
          {128, 112, 60},
          {51, 41, 34}}},
        // far (8 cm)
        {{{571, 527, 364},
          {355, 296, 258},
          {252, 399, 258},
          {197, 302, 253},
          {367, 286, 191},
          {294, 306, 202},
          {85, 80, 59}}},
    };
    return cal;
}

// Simulated sensor: per-channel linear interpolation between the near and
// far calibration points, with optional multiplicative gaussian noise.
inline ChannelReading simulate_sensor(ColorClass c, double distance_cm,
                                      const ColorCalibration& cal, double noise_stddev,
                                      std::uint64_t seed) {
    if (!(distance_cm >= 2.0 && distance_cm <= 8.0))
        throw std::invalid_argument("distance must lie in [2, 8] cm");
    const int i = static_cast<int>(c);
    const double t = (distance_cm - 2.0) / 6.0;
    ChannelReading out{
        cal.near[i].r + t * (cal.far[i].r - cal.near[i].r),
        cal.near[i].g + t * (cal.far[i].g - cal.near[i].g),
        cal.near[i].b + t * (cal.far[i].b - cal.near[i].b),
    };
    if (noise_stddev > 0.0) {
        DeterministicRng rng(seed);
        auto jitter = [&](double v) {
            return std::max(1e-9, v * (1.0 + noise_stddev * rng.next_gauss()));
        };
        out.r = jitter(out.r);
        out.g = jitter(out.g);
        out.b = jitter(out.b);
    }
    return out;
}

// Frequency-proportional brightness, normalized per channel against the
// calibration extremes: the channel's brightest calibration point maps to
// 1, the darkest to 0.
inline double raw_to_intensity(double raw, Channel ch, const ColorCalibration& cal) {
    if (!(raw > 0.0)) throw std::invalid_argument("raw reading must be positive");
    const double lo = cal.channel_min(ch), hi = cal.channel_max(ch);
    const double v = (1.0 / raw - 1.0 / hi) / (1.0 / lo - 1.0 / hi);
    return std::clamp(v, 0.0, 1.0);
}

enum class Label { Low = 0, Med, High };

inline const char* label_name(Label l) {
    static constexpr const char* names[] = {"LOW", "MED", "HIGH"};
    return names[static_cast<int>(l)];
}

// One brightness label per color per channel (the 7x9 one-hot rule grid).
struct ColorRuleSet {
    std::array<std::array<Label, 3>, kNumColors> label;

    Label at(ColorClass c, Channel ch) const {
        return label[static_cast<int>(c)][static_cast<int>(ch)];
    }
    std::array<std::array<int, 9>, kNumColors> as_binary_matrix() const {
        std::array<std::array<int, 9>, kNumColors> m{};
        for (int c = 0; c < kNumColors; ++c)
            for (int ch = 0; ch < 3; ++ch)
                m[c][3 * ch + static_cast<int>(label[c][ch])] = 1;
        return m;
    }
};

// Recognition rules for the seven reference colors.
inline const ColorRuleSet& reference_rules() {
    using L = Label;
    static const ColorRuleSet rs = {{{
        {L::Low, L::Low, L::Low},    // black
        {L::Med, L::Med, L::Med},    // green
        {L::Low, L::Med, L::Low},    // red
        {L::Low, L::Med, L::Med},    // orange
        {L::Med, L::Low, L::Low},    // blue
        {L::Med, L::Low, L::Med},    // purple
        {L::Med, L::Med, L::Med},    // white
    }}};
    return rs;
}

// Three-term partition over normalized intensity [0, 1]. When no rule on a
// channel uses HIGH, the partition degenerates to LOW/MED with MED holding
// the upper shoulder; `high_present` records which form was built.
struct ChannelPartition {
    double p_low, p_med;
    double p_high = 1.0;
    bool high_present = true;

    std::array<double, 3> degrees(double x) const {
        x = std::clamp(x, 0.0, 1.0);
        if (x <= p_low) return {1.0, 0.0, 0.0};
        if (x <= p_med) {
            const double t = (x - p_low) / (p_med - p_low);
            return {1.0 - t, t, 0.0};
        }
        if (!high_present) return {0.0, 1.0, 0.0};
        if (x >= p_high) return {0.0, 0.0, 1.0};
        const double t = (x - p_med) / (p_high - p_med);
        return {0.0, 1.0 - t, t};
    }
};

struct ChannelMFs {
    std::array<ChannelPartition, 3> channel;
};

namespace detail {
inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
}  // namespace detail

// Builds each channel's LOW/MED/HIGH partition from the calibration
// intensities grouped by the rule labels: every peak is the median of its
// group. An unused LOW anchors at 0 and an unused HIGH at 1 (shoulder
// edges); an unused MED has no anchor and is rejected.
inline ChannelMFs calibrate_memberships(const ColorCalibration& cal, const ColorRuleSet& rules) {
    ChannelMFs out;
    for (int ch = 0; ch < 3; ++ch) {
        const Channel channel = static_cast<Channel>(ch);
        std::array<std::vector<double>, 3> groups;
        for (int c = 0; c < kNumColors; ++c) {
            const int lab = static_cast<int>(rules.label[c][ch]);
            groups[lab].push_back(raw_to_intensity(cal.near[c].at(channel), channel, cal));
            groups[lab].push_back(raw_to_intensity(cal.far[c].at(channel), channel, cal));
        }
        if (groups[1].empty())
            throw std::runtime_error(std::string("rule label unused on channel: MED/") +
                                     "RGB"[ch]);
        ChannelPartition p{};
        p.p_low = groups[0].empty() ? 0.0 : detail::median(groups[0]);
        p.p_med = detail::median(groups[1]);
        p.high_present = !groups[2].empty();
        p.p_high = p.high_present ? detail::median(groups[2]) : 1.0;
        if (!(p.p_low < p.p_med) || (p.high_present && !(p.p_med < p.p_high)))
            throw std::runtime_error("label group medians are not increasing");
        out.channel[ch] = p;
    }
    return out;
}

inline std::array<double, 3> fuzzify_channel(double intensity, const ChannelMFs& mfs,
                                             Channel ch) {
    if (!(intensity >= 0.0 && intensity <= 1.0))
        throw std::invalid_argument("intensity must lie in [0, 1]");
    return mfs.channel[static_cast<int>(ch)].degrees(intensity);
}

struct Classification {
    ColorClass winner;
    double activation;
    std::array<double, kNumColors> activations;
    std::vector<ColorClass> ambiguous;  // all classes within 1e-9 of the winner
};

// Mamdani AND over the three channel degrees selected by each color's rule
// row; argmax winner with ties reported (and broken by enumeration order).
inline Classification classify(const ChannelReading& reading, const ChannelMFs& mfs,
                               const ColorRuleSet& rules, const ColorCalibration& cal) {
    reading.validate();
    std::array<std::array<double, 3>, 3> deg{};
    for (int ch = 0; ch < 3; ++ch) {
        const Channel channel = static_cast<Channel>(ch);
        deg[ch] = fuzzify_channel(raw_to_intensity(reading.at(channel), channel, cal), mfs,
                                  channel);
    }
    Classification out{};
    double best = -1.0;
    for (int c = 0; c < kNumColors; ++c) {
        double a = 1.0;
        for (int ch = 0; ch < 3; ++ch)
            a = std::min(a, deg[ch][static_cast<int>(rules.label[c][ch])]);
        out.activations[c] = a;
        if (a > best) best = a;
    }
    if (best <= 0.0) throw std::runtime_error("unrecognized color");
    for (int c = 0; c < kNumColors; ++c)
        if (std::abs(out.activations[c] - best) <= 1e-9)
            out.ambiguous.push_back(static_cast<ColorClass>(c));
    out.winner = out.ambiguous.front();
    out.activation = best;
    return out;
}

// Rank of a 7x9 binary matrix over the rationals (Bareiss fraction-free
// elimination, exact in 64-bit for a 0/1 matrix this size).
inline int binary_matrix_rank(const std::array<std::array<int, 9>, kNumColors>& bin) {
    constexpr int rows = kNumColors, cols = 9;
    long long m[rows][cols];
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m[i][j] = bin[i][j];

    int rank = 0;
    long long prev = 1;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int pivot = -1;
        for (int i = rank; i < rows; ++i)
            if (m[i][col] != 0) {
                pivot = i;
                break;
            }
        if (pivot < 0) continue;
        for (int j = 0; j < cols; ++j) std::swap(m[rank][j], m[pivot][j]);
        for (int i = rank + 1; i < rows; ++i) {
            for (int j = col + 1; j < cols; ++j)
                m[i][j] = (m[rank][col] * m[i][j] - m[i][col] * m[rank][j]) / prev;
            m[i][col] = 0;
        }
        prev = m[rank][col];
        ++rank;
    }
    return rank;
}

inline int rule_matrix_rank(const ColorRuleSet& rules) {
    return binary_matrix_rank(rules.as_binary_matrix());
}

// CSV resources: one row per color, transcribed values only.
inline std::string calibration_to_csv(const ColorCalibration& cal) {
    std::ostringstream os;
    os << "color,far_r,far_g,far_b,near_r,near_g,near_b\n";
    for (int c = 0; c < kNumColors; ++c) {
        const auto& f = cal.far[c];
        const auto& n = cal.near[c];
        os << color_name(static_cast<ColorClass>(c)) << ',' << f.r << ',' << f.g << ',' << f.b
           << ',' << n.r << ',' << n.g << ',' << n.b << '\n';
    }
    return os.str();
}

inline std::string rules_to_csv(const ColorRuleSet& rules) {
    std::ostringstream os;
    os << "color,r_low,r_med,r_high,g_low,g_med,g_high,b_low,b_med,b_high\n";
    const auto bin = rules.as_binary_matrix();
    for (int c = 0; c < kNumColors; ++c) {
        os << color_name(static_cast<ColorClass>(c));
        for (int j = 0; j < 9; ++j) os << ',' << bin[c][j];
        os << '\n';
    }
    return os.str();
}

}  // namespace ddrive::color
