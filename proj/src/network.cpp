#include "symptomnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <sstream>

namespace symptomnet {

const NodeSpec* NetworkSpec::find(std::string_view name) const {
    for (const auto& n : nodes) {
        if (n.name == name) return &n;
    }
    return nullptr;
}

const NodeSpec& NetworkSpec::node(std::string_view name) const {
    if (const auto* n = find(name)) return *n;
    throw NetworkError("unknown node '" + std::string(name) + "'");
}

std::vector<std::string> NetworkSpec::node_names() const {
    std::vector<std::string> out;
    out.reserve(nodes.size());
    for (const auto& n : nodes) out.push_back(n.name);
    return out;
}

std::vector<std::string> NetworkSpec::parents_of(std::string_view child) const {
    std::vector<std::string> out;
    for (const auto& [p, c] : edges) {
        if (c == child && std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    return out;
}

std::vector<std::string> NetworkSpec::children_of(std::string_view parent) const {
    std::vector<std::string> out;
    for (const auto& [p, c] : edges) {
        if (p == parent && std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
    return out;
}

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::BadCardinality: return "bad-cardinality";
        case ViolationKind::DuplicateNode: return "duplicate-node";
        case ViolationKind::DuplicateState: return "duplicate-state";
        case ViolationKind::UnknownNode: return "unknown-node";
        case ViolationKind::SelfLoop: return "self-loop";
        case ViolationKind::DuplicateEdge: return "duplicate-edge";
        case ViolationKind::Cycle: return "cycle";
        case ViolationKind::MissingCpd: return "missing-cpd";
        case ViolationKind::DuplicateCpd: return "duplicate-cpd";
        case ViolationKind::ParentMismatch: return "parent-mismatch";
        case ViolationKind::DimensionMismatch: return "dimension-mismatch";
        case ViolationKind::OutOfRange: return "out-of-range";
        case ViolationKind::NotNormalized: return "not-normalized";
    }
    return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
    return std::any_of(violations.begin(), violations.end(),
                       [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << to_string(violations[i].kind) << " at '" << violations[i].node << "'";
        if (!violations[i].detail.empty()) os << ": " << violations[i].detail;
    }
    return os.str();
}

namespace {

// Returns a node on a cycle among nodes with unresolved in-degree, or "".
std::string find_cycle_node(const NetworkSpec& spec, const std::set<std::string>& remaining) {
    if (remaining.empty()) return {};
    // Walking parents inside the unresolved set must revisit a node, and the
    // first revisited node lies on a cycle.
    std::string current = *remaining.begin();
    std::set<std::string> seen;
    while (seen.insert(current).second) {
        std::string next;
        for (const auto& p : spec.parents_of(current)) {
            if (remaining.count(p)) {
                next = p;
                break;
            }
        }
        if (next.empty()) return current;
        current = next;
    }
    return current;
}

struct KahnResult {
    std::vector<std::string> order;
    std::set<std::string> remaining;
};

KahnResult kahn(const NetworkSpec& spec) {
    std::map<std::string, std::size_t> indegree;
    std::map<std::string, std::vector<std::string>> children;
    for (const auto& n : spec.nodes) indegree.emplace(n.name, 0);
    std::set<Edge> unique_edges(spec.edges.begin(), spec.edges.end());
    for (const auto& [p, c] : unique_edges) {
        if (!indegree.count(p) || !indegree.count(c)) continue;
        ++indegree[c];
        children[p].push_back(c);
    }
    std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
    for (const auto& [name, d] : indegree) {
        if (d == 0) ready.push(name);
    }
    KahnResult result;
    while (!ready.empty()) {
        std::string n = ready.top();
        ready.pop();
        result.order.push_back(n);
        for (const auto& c : children[n]) {
            if (--indegree[c] == 0) ready.push(c);
        }
    }
    for (const auto& [name, d] : indegree) {
        if (d > 0) result.remaining.insert(name);
    }
    return result;
}

}  // namespace

ValidationReport validate_structure(const NetworkSpec& spec) {
    ValidationReport report;
    auto add = [&](ViolationKind k, std::string node, std::string detail = {}) {
        report.violations.push_back({k, std::move(node), std::move(detail)});
    };

    std::set<std::string> names;
    for (const auto& n : spec.nodes) {
        if (!names.insert(n.name).second) add(ViolationKind::DuplicateNode, n.name);
        if (n.cardinality() < 2) {
            add(ViolationKind::BadCardinality, n.name, "cardinality must be at least 2");
        }
        std::set<std::string> labels(n.states.begin(), n.states.end());
        if (labels.size() != n.states.size()) add(ViolationKind::DuplicateState, n.name);
    }

    std::set<Edge> seen;
    for (const auto& e : spec.edges) {
        const auto& [p, c] = e;
        if (!names.count(p)) add(ViolationKind::UnknownNode, p, "edge parent does not exist");
        if (!names.count(c)) add(ViolationKind::UnknownNode, c, "edge child does not exist");
        if (p == c) add(ViolationKind::SelfLoop, p);
        if (!seen.insert(e).second) add(ViolationKind::DuplicateEdge, c, "edge " + p + " -> " + c);
    }

    auto k = kahn(spec);
    if (!k.remaining.empty()) {
        add(ViolationKind::Cycle, find_cycle_node(spec, k.remaining), "graph is not acyclic");
    }
    return report;
}

ValidationReport validate_network(const NetworkSpec& spec, const std::vector<TabularCPD>& cpds) {
    ValidationReport report = validate_structure(spec);
    auto add = [&](ViolationKind k, std::string node, std::string detail = {}) {
        report.violations.push_back({k, std::move(node), std::move(detail)});
    };

    std::map<std::string, const TabularCPD*> by_child;
    for (const auto& cpd : cpds) {
        if (!spec.find(cpd.child)) {
            add(ViolationKind::UnknownNode, cpd.child, "CPD for unknown node");
            continue;
        }
        if (!by_child.emplace(cpd.child, &cpd).second) add(ViolationKind::DuplicateCpd, cpd.child);
    }

    for (const auto& node : spec.nodes) {
        auto it = by_child.find(node.name);
        if (it == by_child.end()) {
            add(ViolationKind::MissingCpd, node.name);
            continue;
        }
        const TabularCPD& cpd = *it->second;
        const auto expected_parents = spec.parents_of(node.name);
        if (cpd.parents != expected_parents) {
            add(ViolationKind::ParentMismatch, node.name, "CPD parents differ from graph parents");
            continue;
        }
        std::size_t columns = 1;
        bool parents_known = true;
        for (const auto& p : cpd.parents) {
            const auto* pn = spec.find(p);
            if (!pn) {
                parents_known = false;
                break;
            }
            columns *= pn->cardinality();
        }
        if (!parents_known) continue;
        if (cpd.child_cardinality != node.cardinality() ||
            cpd.values.size() != node.cardinality() * columns) {
            add(ViolationKind::DimensionMismatch, node.name,
                "expected " + std::to_string(node.cardinality()) + " x " + std::to_string(columns) +
                    " table, got " + std::to_string(cpd.values.size()) + " entries");
            continue;
        }
        bool in_range = true;
        for (double v : cpd.values) {
            if (!(v >= 0.0 && v <= 1.0)) in_range = false;
        }
        if (!in_range) add(ViolationKind::OutOfRange, node.name, "entries must lie in [0, 1]");
        for (std::size_t col = 0; col < columns; ++col) {
            double total = 0.0;
            for (std::size_t s = 0; s < node.cardinality(); ++s) total += cpd.at(s, col);
            if (!(std::fabs(total - 1.0) <= kNormalizationTolerance)) {
                std::ostringstream detail;
                detail << "parent configuration " << col << " sums to " << total;
                add(ViolationKind::NotNormalized, node.name, detail.str());
            }
        }
    }
    return report;
}

std::vector<std::string> topological_order(const NetworkSpec& spec) {
    auto k = kahn(spec);
    if (!k.remaining.empty()) throw CycleError(find_cycle_node(spec, k.remaining));
    return k.order;
}

BayesianNetwork BayesianNetwork::create(NetworkSpec spec, std::vector<TabularCPD> cpds, InterventionMarks marks) {
    const auto report = validate_network(spec, cpds);
    if (!report.ok()) throw NetworkError("invalid network: " + report.summary());

    BayesianNetwork net;
    net.order_ = topological_order(spec);
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) net.index_.emplace(spec.nodes[i].name, i);
    net.cpds_.resize(spec.nodes.size());
    for (auto& cpd : cpds) {
        const std::size_t i = net.index_.at(cpd.child);
        net.cpds_[i] = std::move(cpd);
    }
    net.spec_ = std::move(spec);
    for (const auto& name : marks.isolated) net.index_of(name);
    for (const auto& name : marks.detached) net.index_of(name);
    net.marks_ = std::move(marks);
    return net;
}

bool BayesianNetwork::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

std::size_t BayesianNetwork::index_of(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw NetworkError("unknown node '" + std::string(name) + "'");
    return it->second;
}

Factor BayesianNetwork::cpd_factor(std::string_view name) const {
    const TabularCPD& cpd = cpds_[index_of(name)];
    std::vector<std::string> scope{cpd.child};
    std::vector<std::size_t> cards{cpd.child_cardinality};
    for (const auto& p : cpd.parents) {
        scope.push_back(p);
        cards.push_back(cardinality(p));
    }
    return Factor(std::move(scope), std::move(cards), cpd.values);
}

std::vector<TabularCPD> uniform_cpds(const NetworkSpec& spec) {
    std::vector<TabularCPD> out;
    out.reserve(spec.nodes.size());
    for (const auto& node : spec.nodes) {
        TabularCPD cpd;
        cpd.child = node.name;
        cpd.parents = spec.parents_of(node.name);
        cpd.child_cardinality = node.cardinality();
        std::size_t columns = 1;
        for (const auto& p : cpd.parents) columns *= spec.node(p).cardinality();
        cpd.values.assign(node.cardinality() * columns, 1.0 / static_cast<double>(node.cardinality()));
        out.push_back(std::move(cpd));
    }
    return out;
}

}  // namespace symptomnet
