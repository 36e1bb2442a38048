#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "symptomnet/inference.hpp"
#include "symptomnet/network.hpp"
#include "symptomnet/synth.hpp"
#include "symptomnet/workflow.hpp"

namespace symptomnet::testing {

inline std::vector<std::string> state_labels(std::size_t card) {
    std::vector<std::string> out;
    for (std::size_t s = 0; s < card; ++s) out.push_back(std::to_string(s));
    return out;
}

// A -> B -> C with P(A=1)=0.3, P(B=1|A)=(0.2, 0.8), P(C=1|B)=(0.1, 0.9).
inline BayesianNetwork chain_network() {
    NetworkSpec spec{{{"A", {"0", "1"}}, {"B", {"0", "1"}}, {"C", {"0", "1"}}}, {{"A", "B"}, {"B", "C"}}};
    std::vector<TabularCPD> cpds{
        {"A", {}, 2, {0.7, 0.3}},
        {"B", {"A"}, 2, {0.8, 0.2, 0.2, 0.8}},
        {"C", {"B"}, 2, {0.9, 0.1, 0.1, 0.9}},
    };
    return BayesianNetwork::create(spec, cpds);
}

inline std::vector<double> random_column(std::size_t card, std::mt19937_64& rng, double zero_rate = 0.0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> col(card);
    double total = 0.0;
    for (auto& v : col) {
        v = unit(rng) < zero_rate ? 0.0 : 0.05 + unit(rng);
        total += v;
    }
    if (total == 0.0) {
        col[0] = 1.0;
        total = 1.0;
    }
    for (auto& v : col) v /= total;
    return col;
}

// Random DAG over `nodes` variables (names n0, n1, ...; a random permutation
// fixes the causal order) with cardinalities in [2, 4], at most three parents
// per node and a joint state space of at most `max_joint` configurations.
inline BayesianNetwork random_network(std::mt19937_64& rng, std::size_t nodes, std::size_t max_joint = 1u << 18,
                                      double zero_rate = 0.0) {
    std::uniform_int_distribution<std::size_t> card_dist(2, 4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::size_t> cards(nodes);
    for (;;) {
        std::size_t joint = 1;
        for (auto& c : cards) {
            c = card_dist(rng);
            joint *= c;
        }
        if (joint <= max_joint) break;
    }
    std::vector<std::size_t> perm(nodes);
    for (std::size_t i = 0; i < nodes; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);

    NetworkSpec spec;
    for (std::size_t i = 0; i < nodes; ++i) spec.nodes.push_back({"n" + std::to_string(i), state_labels(cards[i])});
    const double edge_rate = 2.0 / static_cast<double>(std::max<std::size_t>(nodes, 2));
    for (std::size_t j = 1; j < nodes; ++j) {
        std::size_t parents = 0;
        for (std::size_t i = 0; i < j && parents < 3; ++i) {
            if (unit(rng) < edge_rate) {
                spec.edges.emplace_back(spec.nodes[perm[i]].name, spec.nodes[perm[j]].name);
                ++parents;
            }
        }
    }
    std::vector<TabularCPD> cpds;
    for (const auto& node : spec.nodes) {
        TabularCPD cpd{node.name, spec.parents_of(node.name), node.cardinality(), {}};
        std::size_t cols = 1;
        for (const auto& p : cpd.parents) cols *= spec.node(p).cardinality();
        cpd.values.assign(node.cardinality() * cols, 0.0);
        for (std::size_t c = 0; c < cols; ++c) {
            const auto col = random_column(node.cardinality(), rng, zero_rate);
            for (std::size_t s = 0; s < node.cardinality(); ++s) cpd.values[s * cols + c] = col[s];
        }
        cpds.push_back(std::move(cpd));
    }
    return BayesianNetwork::create(spec, cpds);
}

// Random CPDs for a fixed structure.
inline std::vector<TabularCPD> random_cpds(const NetworkSpec& spec, std::mt19937_64& rng) {
    std::vector<TabularCPD> cpds;
    for (const auto& node : spec.nodes) {
        TabularCPD cpd{node.name, spec.parents_of(node.name), node.cardinality(), {}};
        std::size_t cols = 1;
        for (const auto& p : cpd.parents) cols *= spec.node(p).cardinality();
        cpd.values.assign(node.cardinality() * cols, 0.0);
        for (std::size_t c = 0; c < cols; ++c) {
            const auto col = random_column(node.cardinality(), rng);
            for (std::size_t s = 0; s < node.cardinality(); ++s) cpd.values[s * cols + c] = col[s];
        }
        cpds.push_back(std::move(cpd));
    }
    return cpds;
}

// P(child = k | parents) proportional to exp(beta * x_k * (m - 0.35)), where
// x_k and the mean parent level m are scaled to [0, 1]; higher parent states
// push the child upward and roots lean toward low states.
inline std::vector<TabularCPD> monotone_cpds(const NetworkSpec& spec, double beta) {
    std::vector<TabularCPD> cpds;
    for (const auto& node : spec.nodes) {
        TabularCPD cpd{node.name, spec.parents_of(node.name), node.cardinality(), {}};
        std::vector<std::size_t> pcards;
        std::size_t cols = 1;
        for (const auto& p : cpd.parents) {
            pcards.push_back(spec.node(p).cardinality());
            cols *= pcards.back();
        }
        const std::size_t card = node.cardinality();
        cpd.values.assign(card * cols, 0.0);
        for (std::size_t c = 0; c < cols; ++c) {
            double level = 0.0;
            std::size_t rest = c;
            for (std::size_t k = pcards.size(); k-- > 0;) {
                level += static_cast<double>(rest % pcards[k]) / static_cast<double>(pcards[k] - 1);
                rest /= pcards[k];
            }
            level = pcards.empty() ? 0.0 : level / static_cast<double>(pcards.size());
            double total = 0.0;
            std::vector<double> w(card);
            for (std::size_t s = 0; s < card; ++s) {
                const double x = static_cast<double>(s) / static_cast<double>(card - 1);
                w[s] = std::exp(beta * x * (level - 0.35));
                total += w[s];
            }
            for (std::size_t s = 0; s < card; ++s) cpd.values[s * cols + c] = w[s] / total;
        }
        cpds.push_back(std::move(cpd));
    }
    return cpds;
}

// Up to `max_nodes` observed nodes with uniformly drawn states.
inline EvidenceMap random_evidence(const BayesianNetwork& net, std::mt19937_64& rng, std::size_t max_nodes) {
    std::vector<std::string> names = net.spec().node_names();
    std::shuffle(names.begin(), names.end(), rng);
    std::uniform_int_distribution<std::size_t> count(0, std::min(max_nodes, names.size() - 1));
    const std::size_t k = count(rng);
    EvidenceMap ev;
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> state(0, net.cardinality(names[i]) - 1);
        ev[names[i]] = state(rng);
    }
    return ev;
}

// Full assessment network fitted on a small generated cohort; built once per process.
inline const NetworkFile& fitted_assessment_model() {
    static const NetworkFile model = [] {
        auto config = GeneratorConfig::defaults();
        config.n = 4000;
        return fit_network_file(assessment_network(), sample_cohort(config), EssConfig{8000.0});
    }();
    return model;
}

inline const BayesianNetwork& fitted_assessment_network() {
    static const BayesianNetwork net = BayesianNetwork::create(fitted_assessment_model().spec, fitted_assessment_model().cpds);
    return net;
}

}  // namespace symptomnet::testing
