#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "symptomnet/metrics.hpp"

namespace symptomnet {
namespace {

// Exhaustive pair counting.
double auc_oracle(const std::vector<double>& s, const std::vector<int>& y) {
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[j] != 0) continue;
            pairs += 1.0;
            wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
        }
    }
    return wins / pairs;
}

struct Sample {
    std::vector<double> s;
    std::vector<int> y;
    std::vector<std::string> g;
};

Sample random_sample(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Sample out;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = u(rng);
        out.y.push_back(u(rng) < p ? 1 : 0);
        out.s.push_back(std::round(p * 20.0) / 20.0);  // coarse grid forces ties and bin edges
        out.g.push_back(u(rng) < 0.4 ? "a" : "b");
    }
    return out;
}

TEST(RocAuc, HandExample) {
    EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1}), 0.75);
}

TEST(RocAuc, SeparatedAndTied) {
    EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{0, 0, 1, 1}), 1.0);
    EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.3, 0.3, 0.3, 0.3}, std::vector<int>{0, 1, 0, 1}), 0.5);
}

TEST(RocAuc, MatchesPairCountingOracle) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = random_sample(rng, 300);
        EXPECT_NEAR(roc_auc(d.s, d.y), auc_oracle(d.s, d.y), 1e-12);
    }
}

TEST(RocAuc, SingleClassRejected) {
    EXPECT_THROW(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), MetricError);
    EXPECT_THROW(roc_auc(std::vector<double>{0.1}, std::vector<int>{1, 0}), MetricError);
}

TEST(Ece, TwoBinHandExample) {
    const std::vector<double> s{0.2, 0.4, 0.6, 0.8};
    const std::vector<int> y{0, 1, 1, 1};
    EXPECT_NEAR(ece(s, y, 2), 0.25, 1e-12);
    EXPECT_NEAR(mce(s, y, 2), 0.3, 1e-12);
}

TEST(Ece, BinsAreRightClosed) {
    EXPECT_EQ(bin_index(0.0, 10), 0u);
    EXPECT_EQ(bin_index(0.1, 10), 0u);
    EXPECT_EQ(bin_index(0.1000001, 10), 1u);
    EXPECT_EQ(bin_index(0.5, 2), 0u);
    EXPECT_EQ(bin_index(1.0, 10), 9u);
    EXPECT_THROW(bin_index(1.5, 10), MetricError);
}

TEST(Ece, ZeroWhenScoresEqualBinPositiveRate) {
    const std::vector<double> s{0.25, 0.25, 0.25, 0.25, 0.75, 0.75, 0.75, 0.75};
    const std::vector<int> y{1, 0, 0, 0, 1, 1, 1, 0};
    EXPECT_NEAR(ece(s, y), 0.0, 1e-15);
    EXPECT_NEAR(mce(s, y), 0.0, 1e-15);
}

TEST(Ece, CurveAgreesWithEceAndNeverExceedsMce) {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = random_sample(rng, 400);
        const auto curve = calibration_curve(d.s, d.y);
        double from_curve = 0.0, worst = 0.0;
        std::size_t total = 0;
        for (const auto& b : curve) {
            ASSERT_GT(b.count, 0u);
            total += b.count;
            const double gap = std::fabs(b.mean_score - b.positive_rate);
            from_curve += static_cast<double>(b.count) * gap;
            worst = std::max(worst, gap);
        }
        EXPECT_EQ(total, d.s.size());
        EXPECT_NEAR(ece(d.s, d.y), from_curve / static_cast<double>(total), 1e-12);
        EXPECT_NEAR(mce(d.s, d.y), worst, 1e-12);
        EXPECT_LE(ece(d.s, d.y), mce(d.s, d.y) + 1e-15);
    }
}

TEST(Ece, EmptyBinsOmitted) {
    const auto curve = calibration_curve(std::vector<double>{0.05, 0.95}, std::vector<int>{0, 1});
    ASSERT_EQ(curve.size(), 2u);
    EXPECT_EQ(curve[0].bin, 0u);
    EXPECT_EQ(curve[1].bin, 9u);
}

TEST(Brier, KnownValuesAndDirectSum) {
    EXPECT_DOUBLE_EQ(brier(std::vector<double>{0, 1, 1}, std::vector<int>{0, 1, 1}), 0.0);
    EXPECT_DOUBLE_EQ(brier(std::vector<double>{0.5, 0.5}, std::vector<int>{0, 1}), 0.25);
    std::mt19937_64 rng(23);
    const auto d = random_sample(rng, 500);
    double sum = 0.0;
    for (std::size_t i = 0; i < d.s.size(); ++i) sum += (d.s[i] - d.y[i]) * (d.s[i] - d.y[i]);
    EXPECT_NEAR(brier(d.s, d.y), sum / static_cast<double>(d.s.size()), 1e-12);
}

// Group a: 5 positives (4 called), 5 negatives (1 called): TPR 0.8, FPR 0.2.
// Group b: 5 positives (3 called), 10 negatives (3 called): TPR 0.6, FPR 0.3.
Sample equalized_odds_fixture() {
    Sample d;
    const auto add = [&](const char* g, int label, int called, int total) {
        for (int i = 0; i < total; ++i) {
            d.g.push_back(g);
            d.y.push_back(label);
            d.s.push_back(i < called ? 0.9 : 0.1);
        }
    };
    add("a", 1, 4, 5);
    add("a", 0, 1, 5);
    add("b", 1, 3, 5);
    add("b", 0, 3, 10);
    return d;
}

TEST(EqualizedOdds, HandExample) {
    const auto d = equalized_odds_fixture();
    EXPECT_NEAR(equalized_odds_difference(d.s, d.y, d.g), 0.2, 1e-12);
    const auto eo = equalized_odds(d.s, d.y, d.g);
    ASSERT_TRUE(eo.defined);
    EXPECT_NEAR(eo.groups.at("a").tpr, 0.8, 1e-12);
    EXPECT_NEAR(eo.groups.at("b").fpr, 0.3, 1e-12);
    EXPECT_NEAR(eo.ratio, std::min(0.6 / 0.8, 0.2 / 0.3), 1e-12);
}

TEST(EqualizedOdds, IdenticalGroupsGiveZero) {
    Sample d;
    for (const char* g : {"a", "b"}) {
        for (auto [s, y] : std::vector<std::pair<double, int>>{{0.9, 1}, {0.2, 1}, {0.7, 0}, {0.1, 0}}) {
            d.s.push_back(s);
            d.y.push_back(y);
            d.g.push_back(g);
        }
    }
    EXPECT_EQ(equalized_odds_difference(d.s, d.y, d.g), 0.0);
}

TEST(EqualizedOdds, MissingClassIsUndefined) {
    const std::vector<double> s{0.9, 0.1, 0.8};
    const std::vector<int> y{1, 0, 1};
    const std::vector<std::string> g{"a", "a", "b"};
    EXPECT_FALSE(equalized_odds(s, y, g).defined);
    EXPECT_THROW(equalized_odds_difference(s, y, g), MetricError);
}

TEST(EqualizedOdds, MatchesPerGroupConfusionOracle) {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = random_sample(rng, 300);
        std::map<std::string, std::array<double, 4>> c;  // tp, fn, fp, tn
        for (std::size_t i = 0; i < d.s.size(); ++i) {
            const bool called = d.s[i] >= 0.5;
            auto& m = c[d.g[i]];
            if (d.y[i] == 1) ++m[called ? 0 : 1];
            else ++m[called ? 2 : 3];
        }
        const auto tpr = [&](const std::string& g) { return c[g][0] / (c[g][0] + c[g][1]); };
        const auto fpr = [&](const std::string& g) { return c[g][2] / (c[g][2] + c[g][3]); };
        const double expected = std::max(std::fabs(tpr("a") - tpr("b")), std::fabs(fpr("a") - fpr("b")));
        EXPECT_NEAR(equalized_odds_difference(d.s, d.y, d.g), expected, 1e-12);
    }
}

TEST(PrevalenceMetrics, FormulaForcedExample) {
    const auto m = prevalence_metrics(Confusion{3, 1, 6, 2});
    EXPECT_NEAR(m.ppv.value, 0.75, 1e-12);
    EXPECT_NEAR(m.npv.value, 0.75, 1e-12);
    EXPECT_NEAR(m.lr_plus.value, (3.0 / 5.0) / (1.0 / 7.0), 1e-12);
    EXPECT_NEAR(m.lr_plus.value, 4.2, 1e-12);
    EXPECT_NEAR(m.lr_minus.value, (2.0 / 5.0) / (6.0 / 7.0), 1e-12);
    EXPECT_NEAR(m.lr_minus.value, 0.467, 1e-3);
    EXPECT_NEAR(m.prevalence, 5.0 / 12.0, 1e-12);
}

TEST(PrevalenceMetrics, PerfectClassifierFlagsInfiniteLrPlus) {
    const auto m = prevalence_metrics(std::vector<double>{0.9, 0.8, 0.1, 0.2}, std::vector<int>{1, 1, 0, 0});
    EXPECT_DOUBLE_EQ(m.ppv.value, 1.0);
    EXPECT_DOUBLE_EQ(m.npv.value, 1.0);
    EXPECT_EQ(m.lr_plus.kind, FlaggedValue::Kind::Infinite);
    EXPECT_TRUE(m.lr_minus.finite());
    EXPECT_DOUBLE_EQ(m.lr_minus.value, 0.0);
}

TEST(PrevalenceMetrics, NoPositiveCallsLeavesPpvUndefined) {
    const auto m = prevalence_metrics(std::vector<double>{0.1, 0.2, 0.3}, std::vector<int>{1, 0, 0});
    EXPECT_EQ(m.ppv.kind, FlaggedValue::Kind::Undefined);
    EXPECT_FALSE(std::isnan(m.ppv.value));
}

TEST(PrevalenceMetrics, OddsIdentityOnRandomConfusions) {
    std::mt19937_64 rng(25);
    std::uniform_int_distribution<std::size_t> cell(1, 500);
    for (int trial = 0; trial < 1000; ++trial) {
        const Confusion c{cell(rng), cell(rng), cell(rng), cell(rng)};
        const auto m = prevalence_metrics(c);
        const double prior_odds = m.prevalence / (1.0 - m.prevalence);
        EXPECT_NEAR(m.ppv.value / (1.0 - m.ppv.value), m.lr_plus.value * prior_odds, 1e-9);
        EXPECT_NEAR((1.0 - m.npv.value) / m.npv.value, m.lr_minus.value * prior_odds, 1e-9);
    }
}

TEST(PrevalenceMetrics, ComplementSymmetry) {
    // Flipping labels and reflecting scores about the threshold swaps ppv and
    // npv. Scores sit off the threshold so both partitions are complementary.
    std::mt19937_64 rng(26);
    auto d = random_sample(rng, 400);
    for (auto& v : d.s)
        if (v == 0.5) v = 0.55;
    std::vector<double> s2;
    std::vector<int> y2;
    for (std::size_t i = 0; i < d.s.size(); ++i) {
        s2.push_back(1.0 - d.s[i]);
        y2.push_back(1 - d.y[i]);
    }
    const auto a = prevalence_metrics(d.s, d.y);
    const auto b = prevalence_metrics(s2, y2);
    EXPECT_NEAR(a.ppv.value, b.npv.value, 1e-12);
    EXPECT_NEAR(a.npv.value, b.ppv.value, 1e-12);
    EXPECT_NEAR(a.lr_plus.value, 1.0 / b.lr_minus.value, 1e-9);
}

TEST(Pearson, KnownValues) {
    const std::vector<double> x{1, 2, 3};
    EXPECT_NEAR(pearson_r(x, x), 1.0, 1e-15);
    EXPECT_NEAR(pearson_r(x, std::vector<double>{-1, -2, -3}), -1.0, 1e-15);
    // Centered x = (-1, 0, 1), y = (-4/3, -1/3, 5/3): r = 3 / sqrt(2 * 14/3).
    EXPECT_NEAR(pearson_r(x, std::vector<double>{1, 2, 4}), 3.0 / std::sqrt(28.0 / 3.0), 1e-12);
    EXPECT_NEAR(pearson_r(x, std::vector<double>{1, 2, 4}), 0.9820, 1e-4);
    EXPECT_THROW(pearson_r(x, std::vector<double>{2, 2, 2}), MetricError);
}

TEST(Fairness, IdenticalGroupsHaveZeroDifferences) {
    std::mt19937_64 rng(27);
    const auto d = random_sample(rng, 200);
    Sample both;
    for (const char* g : {"x", "y"}) {
        for (std::size_t i = 0; i < d.s.size(); ++i) {
            both.s.push_back(d.s[i]);
            both.y.push_back(d.y[i]);
            both.g.push_back(g);
        }
    }
    const auto r = fairness_report(both.s, both.y, both.g);
    EXPECT_EQ(r.ece_difference, 0.0);
    EXPECT_EQ(r.brier_difference, 0.0);
    EXPECT_EQ(r.equalized_odds.difference, 0.0);
    EXPECT_EQ(r.groups.at("x").roc_auc, r.groups.at("y").roc_auc);
}

TEST(Fairness, SymmetricUnderGroupRelabelling) {
    std::mt19937_64 rng(28);
    const auto d = random_sample(rng, 500);
    std::vector<std::string> swapped;
    for (const auto& g : d.g) swapped.push_back(g == "a" ? "b" : "a");
    const auto r1 = fairness_report(d.s, d.y, d.g);
    const auto r2 = fairness_report(d.s, d.y, swapped);
    EXPECT_DOUBLE_EQ(r1.ece_difference, r2.ece_difference);
    EXPECT_DOUBLE_EQ(r1.brier_difference, r2.brier_difference);
    EXPECT_DOUBLE_EQ(r1.equalized_odds.difference, r2.equalized_odds.difference);
    EXPECT_NEAR(r1.brier_difference,
                std::fabs(r1.groups.at("a").brier - r1.groups.at("b").brier), 1e-15);
}

TEST(Fairness, RequiresExactlyTwoGroups) {
    const std::vector<double> s{0.1, 0.9, 0.4};
    const std::vector<int> y{0, 1, 1};
    const std::vector<std::string> g{"a", "b", "c"};
    EXPECT_THROW(fairness_report(s, y, g), MetricError);
}

}  // namespace
}  // namespace symptomnet
