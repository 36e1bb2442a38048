#include "symptomnet/inference.hpp"

#include <algorithm>
#include <limits>

namespace symptomnet {

namespace {

struct FilteredEvidence {
    EvidenceMap used;
    EvidenceMap ignored;
};

FilteredEvidence filter_evidence(const BayesianNetwork& net, const EvidenceMap& evidence) {
    FilteredEvidence out;
    for (const auto& [node, state] : evidence) {
        if (!net.contains(node)) throw InvalidQuery(node, "unknown evidence node '" + node + "'");
        if (state >= net.cardinality(node)) {
            throw InvalidQuery(node, "state " + std::to_string(state) + " out of range for node '" + node + "'");
        }
        if (net.marks().detached.count(node)) {
            out.ignored.emplace(node, state);
        } else {
            out.used.emplace(node, state);
        }
    }
    return out;
}

void check_query(const BayesianNetwork& net, const std::vector<std::string>& query, const EvidenceMap& used) {
    for (const auto& q : query) {
        if (!net.contains(q)) throw InvalidQuery(q, "unknown query node '" + q + "'");
        if (used.count(q)) throw InvalidQuery(q, "node '" + q + "' is both queried and observed");
    }
}

// Query and evidence nodes plus all their ancestors; everything else sums out to one.
std::set<std::string> relevant_nodes(const BayesianNetwork& net, const std::string& target, const EvidenceMap& used) {
    std::set<std::string> keep;
    std::vector<std::string> stack{target};
    for (const auto& [node, state] : used) stack.push_back(node);
    while (!stack.empty()) {
        std::string n = std::move(stack.back());
        stack.pop_back();
        if (!keep.insert(n).second) continue;
        for (const auto& p : net.cpd(n).parents) stack.push_back(p);
    }
    return keep;
}

std::vector<Factor> reduced_factors(const BayesianNetwork& net, const std::set<std::string>& nodes,
                                    const EvidenceMap& used) {
    std::vector<Factor> factors;
    factors.reserve(nodes.size());
    for (const auto& n : nodes) {
        Factor f = net.cpd_factor(n);
        for (const auto& [var, state] : used) {
            if (f.contains(var)) f = factor_reduce(f, var, state);
        }
        factors.push_back(std::move(f));
    }
    return factors;
}

std::vector<std::string> min_fill_order(const std::vector<Factor>& factors, std::set<std::string> hidden) {
    std::map<std::string, std::set<std::string>> adj;
    for (const auto& f : factors) {
        for (const auto& a : f.scope()) {
            adj[a];
            for (const auto& b : f.scope()) {
                if (a != b) adj[a].insert(b);
            }
        }
    }
    std::vector<std::string> order;
    order.reserve(hidden.size());
    while (!hidden.empty()) {
        const std::string* best = nullptr;
        std::size_t best_fill = std::numeric_limits<std::size_t>::max();
        // std::set iterates lexicographically, so the first minimum wins ties.
        for (const auto& var : hidden) {
            const auto& nbrs = adj[var];
            std::size_t fill = 0;
            for (auto a = nbrs.begin(); a != nbrs.end(); ++a) {
                for (auto b = std::next(a); b != nbrs.end(); ++b) {
                    if (!adj[*a].count(*b)) ++fill;
                }
            }
            if (fill < best_fill) {
                best_fill = fill;
                best = &var;
            }
        }
        const std::string var = *best;
        const auto nbrs = adj[var];
        for (const auto& a : nbrs) {
            for (const auto& b : nbrs) {
                if (a != b) adj[a].insert(b);
            }
            adj[a].erase(var);
        }
        adj.erase(var);
        hidden.erase(var);
        order.push_back(var);
    }
    return order;
}

std::vector<double> run_elimination(std::vector<Factor> factors, const std::vector<std::string>& order,
                                    const std::string& target) {
    for (const auto& var : order) {
        Factor joint;
        bool touched = false;
        std::vector<Factor> rest;
        rest.reserve(factors.size());
        for (auto& f : factors) {
            if (f.contains(var)) {
                joint = touched ? factor_product(joint, f) : std::move(f);
                touched = true;
            } else {
                rest.push_back(std::move(f));
            }
        }
        if (!touched) continue;
        rest.push_back(factor_marginalize(joint, var));
        factors = std::move(rest);
    }
    Factor result;
    for (const auto& f : factors) result = factor_product(result, f);
    for (const auto& var : std::vector<std::string>(result.scope())) {
        if (var != target) result = factor_marginalize(result, var);
    }
    const double mass = result.sum();
    if (!(mass > 0.0)) throw InconsistentEvidence();
    std::vector<double> out = result.values();
    for (double& v : out) v /= mass;
    return out;
}

PosteriorReport eliminate_impl(const BayesianNetwork& net, const std::vector<std::string>& query,
                               const EvidenceMap& evidence, const std::vector<std::string>* explicit_order) {
    auto filtered = filter_evidence(net, evidence);
    check_query(net, query, filtered.used);

    PosteriorReport report;
    report.evidence = filtered.used;
    report.ignored_evidence = filtered.ignored;
    report.interventions = net.marks().isolated;
    for (const auto& target : query) {
        const auto nodes = relevant_nodes(net, target, filtered.used);
        auto factors = reduced_factors(net, nodes, filtered.used);
        std::set<std::string> hidden;
        for (const auto& n : nodes) {
            if (n != target && !filtered.used.count(n)) hidden.insert(n);
        }
        std::vector<std::string> order;
        if (explicit_order) {
            for (const auto& v : *explicit_order) {
                if (hidden.count(v)) order.push_back(v);
            }
            if (order.size() != hidden.size()) {
                throw InferenceError("elimination order does not cover every hidden variable");
            }
        } else {
            order = min_fill_order(factors, hidden);
        }
        report.marginals[target] = run_elimination(std::move(factors), order, target);
    }
    return report;
}

std::vector<double> one_hot(std::size_t card, std::size_t state) {
    std::vector<double> v(card, 0.0);
    v[state] = 1.0;
    return v;
}

}  // namespace

const std::vector<double>& PosteriorReport::at(const std::string& node) const {
    auto it = marginals.find(node);
    if (it == marginals.end()) throw InvalidQuery(node, "node '" + node + "' was not queried");
    return it->second;
}

double ConditionProbabilities::at(const std::string& condition) const {
    auto it = present.find(condition);
    if (it == present.end()) throw InvalidQuery(condition, "no probability for '" + condition + "'");
    return it->second;
}

PosteriorReport eliminate_variables(const BayesianNetwork& network, const std::vector<std::string>& query,
                                    const EvidenceMap& evidence) {
    return eliminate_impl(network, query, evidence, nullptr);
}

PosteriorReport eliminate_variables(const BayesianNetwork& network, const std::vector<std::string>& query,
                                    const EvidenceMap& evidence, const std::vector<std::string>& elimination_order) {
    return eliminate_impl(network, query, evidence, &elimination_order);
}

PosteriorReport brute_force_joint(const BayesianNetwork& network, const std::vector<std::string>& query,
                                  const EvidenceMap& evidence) {
    auto filtered = filter_evidence(network, evidence);
    check_query(network, query, filtered.used);

    const auto& nodes = network.spec().nodes;
    const std::size_t n = nodes.size();
    std::size_t total = 1;
    for (const auto& node : nodes) {
        if (total > kBruteForceLimit / node.cardinality()) {
            throw StateSpaceTooLarge("joint state space exceeds " + std::to_string(kBruteForceLimit));
        }
        total *= node.cardinality();
    }

    // Parent positions per node, for fast CPD column lookup.
    std::vector<std::vector<std::size_t>> parent_pos(n);
    std::vector<std::size_t> cards(n);
    for (std::size_t i = 0; i < n; ++i) {
        cards[i] = nodes[i].cardinality();
        for (const auto& p : network.cpds()[i].parents) parent_pos[i].push_back(network.index_of(p));
    }
    std::vector<std::size_t> state(n, 0);
    std::vector<bool> fixed(n, false);
    for (const auto& [node, s] : filtered.used) {
        const std::size_t i = network.index_of(node);
        state[i] = s;
        fixed[i] = true;
    }

    std::vector<std::size_t> query_idx;
    for (const auto& q : query) query_idx.push_back(network.index_of(q));
    std::vector<std::vector<double>> acc(query.size());
    for (std::size_t k = 0; k < query.size(); ++k) acc[k].assign(cards[query_idx[k]], 0.0);

    double mass = 0.0;
    while (true) {
        double joint = 1.0;
        for (std::size_t i = 0; i < n && joint > 0.0; ++i) {
            std::size_t config = 0;
            for (std::size_t p : parent_pos[i]) config = config * cards[p] + state[p];
            joint *= network.cpds()[i].at(state[i], config);
        }
        mass += joint;
        for (std::size_t k = 0; k < query.size(); ++k) acc[k][state[query_idx[k]]] += joint;

        std::size_t i = n;
        while (i-- > 0) {
            if (fixed[i]) continue;
            if (++state[i] < cards[i]) break;
            state[i] = 0;
        }
        if (i == std::numeric_limits<std::size_t>::max()) break;
    }
    if (!(mass > 0.0)) throw InconsistentEvidence();

    PosteriorReport report;
    report.evidence = filtered.used;
    report.ignored_evidence = filtered.ignored;
    report.interventions = network.marks().isolated;
    for (std::size_t k = 0; k < query.size(); ++k) {
        for (double& v : acc[k]) v /= mass;
        report.marginals[query[k]] = std::move(acc[k]);
    }
    return report;
}

BayesianNetwork apply_do(const BayesianNetwork& network, const InterventionSet& interventions) {
    if (interventions.empty()) return network;
    std::map<std::string, std::vector<double>> priors;
    for (const auto& x : interventions) {
        if (!network.contains(x)) throw InvalidQuery(x, "unknown intervention node '" + x + "'");
        priors[x] = eliminate_variables(network, {x}, {}).at(x);
    }

    NetworkSpec spec;
    spec.nodes = network.spec().nodes;
    for (const auto& e : network.spec().edges) {
        if (!interventions.count(e.first) && !interventions.count(e.second)) spec.edges.push_back(e);
    }

    InterventionMarks marks = network.marks();
    std::vector<TabularCPD> cpds;
    cpds.reserve(spec.nodes.size());
    for (const auto& node : spec.nodes) {
        const TabularCPD& old = network.cpd(node.name);
        if (interventions.count(node.name)) {
            cpds.push_back({node.name, {}, node.cardinality(), priors.at(node.name)});
            marks.isolated.insert(node.name);
            marks.detached.insert(node.name);
            continue;
        }
        std::vector<std::string> cut;
        for (const auto& p : old.parents) {
            if (interventions.count(p)) cut.push_back(p);
        }
        if (cut.empty()) {
            cpds.push_back(old);
            continue;
        }
        // The cut parent is now an independent root with its prior marginal,
        // so it is summed out of the child's table.
        Factor f = network.cpd_factor(node.name);
        for (const auto& p : cut) {
            f = factor_product(f, Factor({p}, {network.cardinality(p)}, priors.at(p)));
            f = factor_marginalize(f, p);
        }
        std::vector<std::string> kept{node.name};
        for (const auto& p : old.parents) {
            if (!interventions.count(p)) kept.push_back(p);
        }
        f = f.reordered(kept);
        kept.erase(kept.begin());
        if (kept.empty()) marks.detached.insert(node.name);
        cpds.push_back({node.name, std::move(kept), node.cardinality(), f.values()});
    }
    return BayesianNetwork::create(std::move(spec), std::move(cpds), std::move(marks));
}

BayesianNetwork apply_strict_do(const BayesianNetwork& network, const std::map<std::string, std::size_t>& values) {
    if (values.empty()) return network;
    for (const auto& [x, v] : values) {
        if (!network.contains(x)) throw InvalidQuery(x, "unknown intervention node '" + x + "'");
        if (v >= network.cardinality(x)) throw InvalidQuery(x, "intervention state out of range for '" + x + "'");
    }
    NetworkSpec spec;
    spec.nodes = network.spec().nodes;
    for (const auto& e : network.spec().edges) {
        if (!values.count(e.second)) spec.edges.push_back(e);
    }
    InterventionMarks marks = network.marks();
    std::vector<TabularCPD> cpds;
    for (const auto& node : spec.nodes) {
        auto it = values.find(node.name);
        if (it == values.end()) {
            cpds.push_back(network.cpd(node.name));
            continue;
        }
        cpds.push_back({node.name, {}, node.cardinality(), one_hot(node.cardinality(), it->second)});
        marks.fixed[node.name] = it->second;
        marks.detached.insert(node.name);
    }
    return BayesianNetwork::create(std::move(spec), std::move(cpds), std::move(marks));
}

std::map<std::string, std::vector<double>> marginals_with_observed(const BayesianNetwork& network,
                                                                   const std::vector<std::string>& nodes,
                                                                   const EvidenceMap& evidence) {
    auto filtered = filter_evidence(network, evidence);
    std::map<std::string, std::vector<double>> out;
    std::vector<std::string> unobserved;
    for (const auto& n : nodes) {
        if (!network.contains(n)) throw InvalidQuery(n, "unknown node '" + n + "'");
        auto it = filtered.used.find(n);
        if (it != filtered.used.end()) {
            out[n] = one_hot(network.cardinality(n), it->second);
        } else {
            unobserved.push_back(n);
        }
    }
    if (!unobserved.empty() || !filtered.used.empty()) {
        // Runs even when everything is observed so inconsistent evidence still fails.
        std::vector<std::string> q = unobserved;
        std::string probe;
        if (q.empty()) {
            for (const auto& node : network.spec().nodes) {
                if (!filtered.used.count(node.name)) {
                    probe = node.name;
                    break;
                }
            }
            if (!probe.empty()) q.push_back(probe);
        }
        auto report = eliminate_variables(network, q, filtered.used);
        for (const auto& n : unobserved) out[n] = report.at(n);
    }
    return out;
}

ConditionProbabilities query_conditions(const BayesianNetwork& network, const EvidenceMap& evidence,
                                        const InterventionSet& interventions, const ModelLayout& layout) {
    const BayesianNetwork mutilated = apply_do(network, interventions);
    const auto conditions = layout.condition_names();
    const auto marginals = marginals_with_observed(mutilated, conditions, evidence);
    ConditionProbabilities out;
    for (const auto& c : conditions) out.present[c] = marginals.at(c).at(1);
    return out;
}

SeverityReport expected_severity(const BayesianNetwork& network, const EvidenceMap& evidence,
                                 const InterventionSet& interventions, const ModelLayout& layout) {
    const BayesianNetwork mutilated = apply_do(network, interventions);
    const auto marginals = marginals_with_observed(mutilated, layout.symptoms(), evidence);
    SeverityReport out;
    for (const auto& group : layout.conditions) {
        double total = 0.0;
        for (const auto& s : group.symptoms) {
            const auto& p = marginals.at(s);
            double e = 0.0;
            for (std::size_t k = 0; k < p.size(); ++k) e += static_cast<double>(k) * p[k];
            out.symptoms[s] = e;
            total += e;
        }
        out.conditions[group.condition] = total;
    }
    return out;
}

ContributionReport symptom_contributions(const BayesianNetwork& network, const EvidenceMap& evidence,
                                         const InterventionSet& interventions, const ModelLayout& layout) {
    const BayesianNetwork mutilated = apply_do(network, interventions);
    const auto conditions = layout.condition_names();
    const auto base = marginals_with_observed(mutilated, conditions, evidence);
    ContributionReport out;
    for (const auto& symptom : layout.symptoms()) {
        EvidenceMap reduced = evidence;
        bool removed = reduced.erase(symptom) > 0;
        for (const auto& s : layout.surrogates_of(symptom)) removed = reduced.erase(s) > 0 || removed;
        if (!removed) {
            for (const auto& c : conditions) out[c][symptom] = 0.0;
            continue;
        }
        const auto without = marginals_with_observed(mutilated, conditions, reduced);
        for (const auto& c : conditions) out[c][symptom] = base.at(c).at(1) - without.at(c).at(1);
    }
    return out;
}

}  // namespace symptomnet
