#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "symptomnet/estimation.hpp"
#include "symptomnet/synth.hpp"

namespace symptomnet {
namespace {

NetworkSpec parent_child() { return NetworkSpec{{{"P", {"0", "1"}}, {"C", {"0", "1"}}}, {{"P", "C"}}}; }

DatasetTable rows(const std::vector<std::pair<int, int>>& pc) {
    std::vector<int> p, c;
    for (auto [a, b] : pc) {
        p.push_back(a);
        c.push_back(b);
    }
    DatasetTable t;
    t.add_discrete("P", {"0", "1"}, p);
    t.add_discrete("C", {"0", "1"}, c);
    return t;
}

// Parent 0: child counts [3, 1]; parent 1: child counts [0, 2].
DatasetTable hand_counted() { return rows({{0, 0}, {0, 0}, {0, 0}, {0, 1}, {1, 1}, {1, 1}}); }

TEST(Bdeu, PseudoCountSplitsEssOverCells) {
    EXPECT_EQ(bdeu_pseudo_count(8000.0, 2, 16), 250.0);
    EXPECT_EQ(bdeu_pseudo_count(4.0, 2, 2), 1.0);
}

TEST(Bdeu, HandCountFixture) {
    const auto cpds = fit_bdeu(parent_child(), hand_counted(), EssConfig{4.0});
    const TabularCPD& c = cpds[1];
    ASSERT_EQ(c.child, "C");
    EXPECT_NEAR(c.at(0, 0), 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(c.at(1, 0), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(c.at(0, 1), 1.0 / 4.0, 1e-12);
    EXPECT_NEAR(c.at(1, 1), 3.0 / 4.0, 1e-12);
    // Root: counts [4, 2] plus pseudo 2 each.
    EXPECT_NEAR(cpds[0].at(0, 0), 6.0 / 10.0, 1e-12);
}

TEST(Bdeu, EmptyDatasetGivesUniformCpds) {
    const NetworkSpec spec = assessment_network();
    const auto cpds = fit_bdeu(spec, DatasetTable{}, EssConfig{8000.0});
    ASSERT_EQ(cpds.size(), spec.nodes.size());
    for (const auto& cpd : cpds) {
        for (double v : cpd.values) EXPECT_NEAR(v, 1.0 / static_cast<double>(cpd.child_cardinality), 1e-15);
    }
}

TEST(Bdeu, ConvergesToMleAsEssVanishes) {
    const auto mle = fit_mle(parent_child(), hand_counted());
    const auto bdeu = fit_bdeu(parent_child(), hand_counted(), EssConfig{1e-9});
    for (std::size_t i = 0; i < mle.size(); ++i) {
        for (std::size_t k = 0; k < mle[i].values.size(); ++k) {
            EXPECT_NEAR(bdeu[i].values[k], mle[i].values[k], 1e-6);
        }
    }
}

TEST(Bdeu, InvariantToRowOrder) {
    std::mt19937_64 rng(3);
    const auto net = testing::random_network(rng, 6);
    const DatasetTable data = forward_sample(net, 500, 9);
    std::vector<std::size_t> perm(data.rows());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto a = fit_bdeu(net.spec(), data, EssConfig{10.0});
    const auto b = fit_bdeu(net.spec(), data.select_rows(perm), EssConfig{10.0});
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].values, b[i].values);
}

TEST(Bdeu, LargerEssMovesTowardUniform) {
    std::mt19937_64 rng(4);
    const auto net = testing::random_network(rng, 5);
    const DatasetTable data = forward_sample(net, 300, 1);
    std::vector<std::vector<TabularCPD>> fits;
    for (double ess : {0.5, 5.0, 50.0, 500.0}) fits.push_back(fit_bdeu(net.spec(), data, EssConfig{ess}));
    for (std::size_t f = 1; f < fits.size(); ++f) {
        for (std::size_t i = 0; i < fits[f].size(); ++i) {
            const double u = 1.0 / static_cast<double>(fits[f][i].child_cardinality);
            for (std::size_t k = 0; k < fits[f][i].values.size(); ++k) {
                EXPECT_LE(std::fabs(fits[f][i].values[k] - u), std::fabs(fits[f - 1][i].values[k] - u) + 1e-15);
            }
        }
    }
}

TEST(Bdeu, OutputPassesValidation) {
    std::mt19937_64 rng(5);
    const auto net = testing::random_network(rng, 8);
    const auto cpds = fit_bdeu(net.spec(), forward_sample(net, 200, 2), EssConfig{8.0});
    EXPECT_TRUE(validate_network(net.spec(), cpds).ok());
}

TEST(Bdeu, MissingColumnAndForeignLabelAreErrors) {
    DatasetTable only_parent;
    only_parent.add_discrete("P", {"0", "1"}, {0, 1});
    EXPECT_THROW(fit_bdeu(parent_child(), only_parent, EssConfig{1.0}), EstimationError);

    DatasetTable bad;
    bad.add_discrete("P", {"0", "1"}, {0, 1});
    bad.add_discrete("C", {"0", "7"}, {1, 1});
    EXPECT_ANY_THROW(fit_bdeu(parent_child(), bad, EssConfig{1.0}));
    EXPECT_THROW(fit_bdeu(parent_child(), hand_counted(), EssConfig{0.0}), EstimationError);
}

TEST(Bdeu, MissingValueIsRejected) {
    DatasetTable t;
    t.add_discrete("P", {"0", "1"}, {0, DiscreteColumn::kMissing});
    t.add_discrete("C", {"0", "1"}, {0, 1});
    EXPECT_THROW(fit_bdeu(parent_child(), t, EssConfig{1.0}), EstimationError);
}

TEST(Mle, CountRatio) {
    const auto cpds = fit_mle(parent_child(), hand_counted());
    EXPECT_DOUBLE_EQ(cpds[1].at(0, 0), 0.75);
    EXPECT_DOUBLE_EQ(cpds[1].at(1, 0), 0.25);
}

TEST(Mle, DeterministicCopyGivesZeroOneCpd) {
    const auto cpds = fit_mle(parent_child(), rows({{0, 0}, {1, 1}, {0, 0}, {1, 1}}));
    EXPECT_EQ(cpds[1].values, (std::vector<double>{1.0, 0.0, 0.0, 1.0}));
}

TEST(Mle, UnobservedConfigurationNamesNodeAndConfiguration) {
    try {
        fit_mle(parent_child(), rows({{0, 0}, {0, 1}}));
        FAIL() << "expected EstimationError";
    } catch (const EstimationError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("'C'"), std::string::npos) << what;
        EXPECT_NE(what.find("P=1"), std::string::npos) << what;
    }
}

TEST(Counts, LayoutMatchesCpdValues) {
    const auto counts = count_configurations(parent_child(), hand_counted(), "C");
    EXPECT_EQ(counts, (std::vector<double>{3.0, 0.0, 1.0, 2.0}));
}

}  // namespace
}  // namespace symptomnet
