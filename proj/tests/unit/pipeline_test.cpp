#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "symptomnet/binning.hpp"
#include "symptomnet/calibration.hpp"
#include "symptomnet/metrics.hpp"
#include "symptomnet/targets.hpp"

namespace symptomnet {
namespace {

// numpy-style linear quantile at position (n - 1) * p of the sorted sample.
double quantile_oracle(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double h = static_cast<double>(v.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

TEST(QuartileBins, OneToEight) {
    const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8};
    const auto b = fit_quartile_bins(v);
    EXPECT_DOUBLE_EQ(b.b1, 2.75);
    EXPECT_DOUBLE_EQ(b.b2, 4.5);
    EXPECT_DOUBLE_EQ(b.b3, 6.25);
    EXPECT_FALSE(b.degenerate);
}

TEST(QuartileBins, MatchesQuantileOracleOnRandomSamples) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 3.0);
    for (std::size_t n : {4u, 5u, 17u, 100u}) {
        std::vector<double> v(n);
        for (auto& x : v) x = g(rng);
        const auto b = fit_quartile_bins(v);
        EXPECT_DOUBLE_EQ(b.b1, quantile_oracle(v, 0.25));
        EXPECT_DOUBLE_EQ(b.b2, quantile_oracle(v, 0.5));
        EXPECT_DOUBLE_EQ(b.b3, quantile_oracle(v, 0.75));
    }
}

TEST(QuartileBins, ConstantInputIsDegenerateAndBinsLow) {
    const std::vector<double> v(10, 0.4);
    const auto b = fit_quartile_bins(v);
    EXPECT_TRUE(b.degenerate);
    EXPECT_EQ(b.b1, 0.4);
    EXPECT_EQ(b.b3, 0.4);
    for (double x : v) EXPECT_EQ(apply_bins(x, b), 0u);
}

TEST(QuartileBins, UniformSampleBoundariesAndShares) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(10000);
    for (auto& x : v) x = u(rng);
    const auto b = fit_quartile_bins(v);
    EXPECT_NEAR(b.b1, 0.25, 0.02);
    EXPECT_NEAR(b.b2, 0.50, 0.02);
    EXPECT_NEAR(b.b3, 0.75, 0.02);
    std::array<std::size_t, 4> counts{};
    for (double x : v) ++counts[apply_bins(x, b)];
    for (auto c : counts) EXPECT_NEAR(static_cast<double>(c) / 10000.0, 0.25, 0.02);
}

TEST(QuartileBins, Errors) {
    EXPECT_THROW(fit_quartile_bins(std::vector<double>{1, 2, 3}), BinningError);
    EXPECT_THROW(fit_quartile_bins(std::vector<double>{1, 2, 3, std::nan("")}), BinningError);
    const QuartileBins b{1, 2, 3, false};
    EXPECT_THROW(apply_bins(std::numeric_limits<double>::infinity(), b), BinningError);
}

TEST(ApplyBins, BoundariesBelongToLowerBin) {
    const QuartileBins b{1, 2, 3, false};
    EXPECT_EQ(apply_bins(1.0, b), 0u);
    EXPECT_EQ(apply_bins(1.5, b), 1u);
    EXPECT_EQ(apply_bins(2.0, b), 1u);
    EXPECT_EQ(apply_bins(3.0, b), 2u);
    EXPECT_EQ(apply_bins(3.0001, b), 3u);
    EXPECT_EQ(apply_bins(-100.0, b), 0u);
    EXPECT_EQ(apply_bins(100.0, b), 3u);
}

TEST(Targets, BinarizeSymptom) {
    EXPECT_TRUE(binarize_symptom(2));
    EXPECT_TRUE(binarize_symptom(3));
    EXPECT_FALSE(binarize_symptom(1));
    EXPECT_FALSE(binarize_symptom(0));
    EXPECT_THROW(binarize_symptom(4), TargetError);
    EXPECT_THROW(binarize_symptom(-1), TargetError);
}

TEST(Targets, ConditionTarget) {
    EXPECT_EQ(condition_target(12, true, kPhq8Max), TargetLabel::Present);
    EXPECT_EQ(condition_target(5, false, kPhq8Max), TargetLabel::Absent);
    EXPECT_EQ(condition_target(12, false, kPhq8Max), TargetLabel::Undefined);
    EXPECT_EQ(condition_target(5, true, kPhq8Max), TargetLabel::Undefined);
    EXPECT_EQ(condition_target(10, std::nullopt, kGad7Max), TargetLabel::Undefined);
    EXPECT_EQ(condition_target(10, true, kGad7Max), TargetLabel::Present);
    EXPECT_THROW(condition_target(22, true, kGad7Max), TargetError);
    EXPECT_THROW(condition_target(-1, true, kPhq8Max), TargetError);
}

TEST(Targets, ConditionTargetPartitionsEveryInput) {
    for (int total = 0; total <= kPhq8Max; ++total) {
        for (std::optional<bool> d : {std::optional<bool>(true), std::optional<bool>(false), std::optional<bool>()}) {
            const auto label = condition_target(total, d, kPhq8Max);
            const bool present = total >= 10 && d == true;
            const bool absent = total < 10 && d == false;
            EXPECT_EQ(label, present ? TargetLabel::Present : absent ? TargetLabel::Absent : TargetLabel::Undefined);
        }
    }
}

TEST(Targets, DsmAllSevere) {
    std::array<int, 8> dep;
    dep.fill(3);
    std::array<int, 7> anx;
    anx.fill(3);
    const auto t = dsm_targets(dep, anx);
    EXPECT_TRUE(t.mdd);
    EXPECT_TRUE(t.other_depression);
    EXPECT_TRUE(t.gad);
}

TEST(Targets, DsmSomaticOnlyIsNotMdd) {
    const std::array<int, 8> dep{0, 1, 2, 2, 3, 2, 2, 0};  // five somatic items, no mood or anhedonia
    const std::array<int, 7> anx{};
    const auto t = dsm_targets(dep, anx);
    EXPECT_FALSE(t.mdd);
    EXPECT_TRUE(t.other_depression);
    EXPECT_FALSE(t.gad);
}

TEST(Targets, DsmMatchesDirectRuleEvaluation) {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> item(0, 3);
    for (int trial = 0; trial < 2000; ++trial) {
        std::array<int, 8> dep;
        std::array<int, 7> anx;
        for (auto& x : dep) x = item(rng);
        for (auto& x : anx) x = item(rng);
        int dep_present = 0, anx_present = 0;
        for (int x : dep) dep_present += x >= 2;
        for (int x : anx) anx_present += x >= 2;
        const bool core_dep = dep[0] >= 2 || dep[1] >= 2;
        const bool core_anx = anx[0] >= 2 || anx[1] >= 2;
        const auto t = dsm_targets(dep, anx);
        EXPECT_EQ(t.mdd, dep_present >= 5 && core_dep);
        EXPECT_EQ(t.other_depression, dep_present >= 4);
        EXPECT_EQ(t.gad, anx_present >= 5 && core_anx);
    }
    std::array<int, 8> bad{};
    bad[3] = 4;
    EXPECT_THROW(dsm_targets(bad, {}), TargetError);
}

TEST(Isotonic, PavHandTrace) {
    const std::vector<double> x{0.1, 0.2, 0.3};
    const std::vector<double> y{0, 1, 0};
    const auto map = fit_isotonic(x, y);
    EXPECT_DOUBLE_EQ(map.predict(0.1), 0.0);
    EXPECT_DOUBLE_EQ(map.predict(0.2), 0.5);
    EXPECT_DOUBLE_EQ(map.predict(0.3), 0.5);

    const std::vector<int> labels{0, 1, 0};
    const auto cal = fit_calibrator(x, labels, CalibratorOptions{1, 0, false});
    EXPECT_DOUBLE_EQ(calibrate(cal, 0.1), 0.0);
    EXPECT_DOUBLE_EQ(calibrate(cal, 0.2), 0.5);
    EXPECT_DOUBLE_EQ(calibrate(cal, 0.3), 0.5);
}

TEST(Isotonic, TiesAreMergedBeforePooling) {
    const std::vector<double> x{0.5, 0.5, 0.7};
    const std::vector<double> y{0, 1, 1};
    const auto map = fit_isotonic(x, y);
    EXPECT_DOUBLE_EQ(map.predict(0.5), 0.5);
    EXPECT_DOUBLE_EQ(map.predict(0.7), 1.0);
    EXPECT_DOUBLE_EQ(map.predict(0.6), 0.75);
}

TEST(Isotonic, AllOnesMapsToOne) {
    const std::vector<double> x{0.1, 0.4, 0.9};
    const std::vector<double> y{1, 1, 1};
    const auto map = fit_isotonic(x, y);
    for (double s : {0.0, 0.1, 0.5, 1.0}) EXPECT_DOUBLE_EQ(map.predict(s), 1.0);
}

TEST(Calibrator, SingleClassLabelsRejected) {
    const std::vector<double> x{0.1, 0.4, 0.9};
    const std::vector<int> ones{1, 1, 1};
    EXPECT_THROW(fit_calibrator(x, ones), CalibrationError);
    const std::vector<int> ok{0, 1, 1};
    const std::vector<double> out_of_range{0.1, 1.4, 0.9};
    EXPECT_THROW(fit_calibrator(out_of_range, ok), CalibrationError);
}

TEST(Calibrator, ClampsOutsideKnots) {
    const std::vector<double> x{0.2, 0.4, 0.6, 0.8};
    const std::vector<int> y{0, 0, 1, 1};
    const auto cal = fit_calibrator(x, y, CalibratorOptions{1, 0, false});
    EXPECT_DOUBLE_EQ(calibrate(cal, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(calibrate(cal, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(calibrate(cal, 0.5), 0.5);
    EXPECT_THROW(calibrate(cal, std::nan("")), CalibrationError);
}

TEST(Calibrator, NearIdentityOnCalibratedData) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> s(20000);
    std::vector<int> y(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = std::round(u(rng) * 10.0) / 10.0;
        y[i] = u(rng) < s[i] ? 1 : 0;
    }
    const auto cal = fit_calibrator(s, y, CalibratorOptions{10, 5, true});
    for (int k = 0; k <= 10; ++k) EXPECT_NEAR(calibrate(cal, k / 10.0), k / 10.0, 0.05);
}

TEST(Calibrator, BagsSeededFromMasterSeedAndDeterministic) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> s(500);
    std::vector<int> y(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = u(rng);
        y[i] = u(rng) < s[i] * s[i] ? 1 : 0;
    }
    const auto a = fit_calibrator(s, y, CalibratorOptions{10, 100, true});
    const auto b = fit_calibrator(s, y, CalibratorOptions{10, 100, true});
    ASSERT_EQ(a.bags.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(a.bag_seeds[i], 100u + i);
        EXPECT_EQ(a.bags[i].x, b.bags[i].x);
        EXPECT_EQ(a.bags[i].y, b.bags[i].y);
    }
    // Prediction is the mean of the bag outputs.
    double mean = 0.0;
    for (const auto& bag : a.bags) mean += bag.predict(0.37);
    EXPECT_NEAR(calibrate(a, 0.37), mean / 10.0, 1e-15);
}

TEST(Calibrator, MonotoneAndInUnitInterval) {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> s(1000);
    std::vector<int> y(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = u(rng);
        y[i] = u(rng) < 0.2 + 0.6 * s[i] ? 1 : 0;
    }
    const auto cal = fit_calibrator(s, y);
    for (int k = 0; k < 2000; ++k) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        const double ca = calibrate(cal, a), cb = calibrate(cal, b);
        EXPECT_LE(ca, cb);
        EXPECT_GE(ca, 0.0);
        EXPECT_LE(cb, 1.0);
    }
}

TEST(Calibrator, ReducesEceAndKeepsRanking) {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto draw = [&](std::size_t n, std::vector<double>& s, std::vector<int>& y) {
        s.resize(n);
        y.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double p = u(rng);
            y[i] = u(rng) < p ? 1 : 0;
            s[i] = std::sqrt(p);  // systematically overconfident
        }
    };
    std::vector<double> s_fit, s_test;
    std::vector<int> y_fit, y_test;
    draw(5000, s_fit, y_fit);
    draw(5000, s_test, y_test);
    const auto cal = fit_calibrator(s_fit, y_fit);
    std::vector<double> calibrated;
    for (double v : s_test) calibrated.push_back(calibrate(cal, v));
    EXPECT_LT(ece(calibrated, y_test), ece(s_test, y_test));
    EXPECT_GE(roc_auc(calibrated, y_test), roc_auc(s_test, y_test) - 0.005);
}

}  // namespace
}  // namespace symptomnet
