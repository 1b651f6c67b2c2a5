#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "ddrive/fuzzy.hpp"
#include "support/centroid_oracle.hpp"

using namespace ddrive::fuzzy;

namespace {

const LinguisticVariable kVar = LinguisticVariable::uniform(-3.0, 3.0);

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    EXPECT_TRUE(in) << "missing " << path;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST(Fuzzify, PeakAndMidpointAndClamp) {
    auto d = fuzzify(kVar, 0.0);
    EXPECT_DOUBLE_EQ(d[static_cast<int>(Term::ZO)], 1.0);
    for (int i = 0; i < kNumTerms; ++i)
        if (i != static_cast<int>(Term::ZO)) EXPECT_DOUBLE_EQ(d[i], 0.0);

    d = fuzzify(kVar, 0.5);
    EXPECT_DOUBLE_EQ(d[static_cast<int>(Term::ZO)], 0.5);
    EXPECT_DOUBLE_EQ(d[static_cast<int>(Term::PS)], 0.5);

    d = fuzzify(kVar, 17.0);
    EXPECT_DOUBLE_EQ(d[static_cast<int>(Term::PB)], 1.0);
}

TEST(Fuzzify, PartitionOfUnityAndCoverage) {
    for (int i = 0; i <= 1000; ++i) {
        const double x = -3.0 + 6.0 * i / 1000.0;
        const auto d = fuzzify(kVar, x);
        double sum = 0.0, mx = 0.0;
        for (double v : d) {
            sum += v;
            mx = std::max(mx, v);
        }
        EXPECT_NEAR(sum, 1.0, 1e-9) << "x=" << x;
        EXPECT_GT(mx, 0.0) << "x=" << x;
    }
}

TEST(Infer, PaperCells) {
    TermDegrees e{}, ec{};
    e[static_cast<int>(Term::NB)] = 1.0;
    ec[static_cast<int>(Term::NB)] = 1.0;
    auto out = infer(tables::kp_rules(), e, ec);
    EXPECT_DOUBLE_EQ(out[static_cast<int>(Term::PB)], 1.0);

    e = {};
    ec = {};
    e[static_cast<int>(Term::ZO)] = 1.0;
    ec[static_cast<int>(Term::ZO)] = 1.0;
    out = infer(tables::kd_rules(), e, ec);
    EXPECT_DOUBLE_EQ(out[static_cast<int>(Term::NS)], 1.0);
}

TEST(Infer, TwoActiveRulesAgainstKpTable) {
    // e split between ZO and PS, ec entirely ZO; row ZO of the kp table maps
    // E=ZO -> ZO and E=PS -> NS, so both fire at strength 0.5.
    TermDegrees e{}, ec{};
    e[static_cast<int>(Term::ZO)] = 0.5;
    e[static_cast<int>(Term::PS)] = 0.5;
    ec[static_cast<int>(Term::ZO)] = 1.0;
    const auto out = infer(tables::kp_rules(), e, ec);
    EXPECT_DOUBLE_EQ(out[static_cast<int>(Term::ZO)], 0.5);
    EXPECT_DOUBLE_EQ(out[static_cast<int>(Term::NS)], 0.5);
    for (int i = 0; i < kNumTerms; ++i)
        if (i != static_cast<int>(Term::ZO) && i != static_cast<int>(Term::NS))
            EXPECT_DOUBLE_EQ(out[i], 0.0);
}

TEST(Infer, MinMaxContraction) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        TermDegrees e{}, ec{};
        double mx = 0.0;
        for (int i = 0; i < kNumTerms; ++i) {
            e[i] = d(rng);
            ec[i] = d(rng);
            mx = std::max({mx, e[i], ec[i]});
        }
        const auto out = infer(tables::ki_rules(), e, ec);
        for (double v : out) EXPECT_LE(v, mx + 1e-15);
    }
}

TEST(DefuzzifyCentroid, SymmetricAndShoulder) {
    TermDegrees agg{};
    agg[static_cast<int>(Term::ZO)] = 1.0;
    EXPECT_NEAR(defuzzify_centroid(kVar, agg), 0.0, 1e-9);

    agg = {};
    agg[static_cast<int>(Term::PB)] = 1.0;
    const double c = defuzzify_centroid(kVar, agg);
    EXPECT_NEAR(c, ddrive::testsupport::centroid_oracle(kVar, agg), 1e-9);
    EXPECT_NEAR(c, 8.0 / 3.0, 1e-12);  // right triangle on [2, 3]
}

TEST(DefuzzifyCentroid, BetweenPeaksAndScalingInvariance) {
    TermDegrees agg{};
    agg[static_cast<int>(Term::NS)] = 0.5;
    agg[static_cast<int>(Term::ZO)] = 0.5;
    const double c = defuzzify_centroid(kVar, agg);
    EXPECT_GT(c, -1.0);
    EXPECT_LT(c, 0.0);
    EXPECT_NEAR(c, ddrive::testsupport::centroid_oracle(kVar, agg), 1e-9);

    // Clipping a symmetric interior triangle scales area about its center.
    for (double k : {1.0, 0.7, 0.3, 0.05}) {
        TermDegrees zo{};
        zo[static_cast<int>(Term::ZO)] = k;
        EXPECT_NEAR(defuzzify_centroid(kVar, zo), 0.0, 1e-9) << "k=" << k;
    }
}

TEST(DefuzzifyCentroid, NoRuleFired) {
    EXPECT_THROW(defuzzify_centroid(kVar, TermDegrees{}), std::domain_error);
}

TEST(DefuzzifyCentroid, AgreesWithTenXDensityOracle) {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> deg(0.05, 1.0);
    std::uniform_int_distribution<int> nterms(1, 3);
    std::uniform_int_distribution<int> pick(0, kNumTerms - 1);
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
        TermDegrees agg{};
        const int n = nterms(rng);
        for (int j = 0; j < n; ++j) agg[pick(rng)] = deg(rng);
        bool any = false;
        for (double v : agg) any = any || v > 0.0;
        if (!any) agg[3] = 0.5;
        const double got = defuzzify_centroid(kVar, agg);
        const double want = ddrive::testsupport::centroid_oracle(kVar, agg);
        worst = std::max(worst, std::abs(got - want));
    }
    EXPECT_LE(worst, 1e-6 * (kVar.hi - kVar.lo));
}

TEST(RuleTables, PaperSpotChecks) {
    EXPECT_EQ(tables::kp_rules().at(Term::PM, Term::PB), Term::NB);
    EXPECT_EQ(tables::ki_rules().at(Term::NB, Term::PS), Term::NM);
    for (int e = 0; e < kNumTerms; ++e)
        EXPECT_EQ(tables::kd_rules().at(Term::PS, static_cast<Term>(e)), Term::ZO);
}

TEST(RuleTables, GridRoundTripAndShippedResources) {
    const struct {
        const RuleTable& table;
        const char* file;
    } cases[] = {
        {tables::kp_rules(), "/rules_kp.grid"},
        {tables::ki_rules(), "/rules_ki.grid"},
        {tables::kd_rules(), "/rules_kd.grid"},
    };
    for (const auto& c : cases) {
        const std::string grid = to_grid(c.table);
        const RuleTable back = from_grid(grid);
        for (int i = 0; i < kNumTerms; ++i)
            for (int j = 0; j < kNumTerms; ++j)
                EXPECT_EQ(back.cell[i][j], c.table.cell[i][j]);
        EXPECT_EQ(grid, read_file(std::string(DDRIVE_DATA_DIR) + c.file)) << c.file;
    }
    EXPECT_THROW(from_grid("NB NB"), std::invalid_argument);
    EXPECT_THROW(from_grid(to_grid(tables::kp_rules()) + " ZO"), std::invalid_argument);
}
