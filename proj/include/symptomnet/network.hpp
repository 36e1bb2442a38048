#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "symptomnet/factor.hpp"

namespace symptomnet {

struct NodeSpec {
    std::string name;
    std::vector<std::string> states;

    std::size_t cardinality() const { return states.size(); }
};

using Edge = std::pair<std::string, std::string>;  // (parent, child)

struct NetworkSpec {
    std::vector<NodeSpec> nodes;
    std::vector<Edge> edges;

    const NodeSpec* find(std::string_view name) const;
    const NodeSpec& node(std::string_view name) const;
    std::vector<std::string> node_names() const;
    // Parents in edge declaration order; this is the CPD parent order.
    std::vector<std::string> parents_of(std::string_view child) const;
    std::vector<std::string> children_of(std::string_view parent) const;
};

// Conditional probability table for one node.
//
// `values` is row-major over (child state, parent configuration); the parent
// configuration index is itself row-major over `parents` in declared order
// (last parent varies fastest). Serialized tables use the same order, so files
// are bit-stable.
struct TabularCPD {
    std::string child;
    std::vector<std::string> parents;
    std::size_t child_cardinality = 0;
    std::vector<double> values;

    std::size_t column_count() const {
        return child_cardinality == 0 ? 0 : values.size() / child_cardinality;
    }
    double at(std::size_t child_state, std::size_t parent_config) const {
        return values[child_state * column_count() + parent_config];
    }
};

enum class ViolationKind {
    BadCardinality,
    DuplicateNode,
    DuplicateState,
    UnknownNode,
    SelfLoop,
    DuplicateEdge,
    Cycle,
    MissingCpd,
    DuplicateCpd,
    ParentMismatch,
    DimensionMismatch,
    OutOfRange,
    NotNormalized,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string node;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool has(ViolationKind kind) const;
    std::string summary() const;
};

inline constexpr double kNormalizationTolerance = 1e-9;

ValidationReport validate_structure(const NetworkSpec& spec);
ValidationReport validate_network(const NetworkSpec& spec, const std::vector<TabularCPD>& cpds);

class NetworkError : public std::invalid_argument {
public:
    explicit NetworkError(const std::string& what) : std::invalid_argument(what) {}
};

class CycleError : public NetworkError {
public:
    explicit CycleError(std::string node)
        : NetworkError("cycle detected through node '" + node + "'"), node_(std::move(node)) {}
    const std::string& node() const { return node_; }

private:
    std::string node_;
};

// Kahn's algorithm; ready nodes are taken in lexicographic order.
std::vector<std::string> topological_order(const NetworkSpec& spec);

// Bookkeeping left behind by a do-operation. Evidence on `detached` nodes is
// ignored by queries; `isolated` nodes carry their pre-intervention marginal.
struct InterventionMarks {
    std::set<std::string> isolated;
    std::set<std::string> detached;
    std::map<std::string, std::size_t> fixed;  // strict-do set values
};

// A validated, parameterized network. Immutable after construction.
class BayesianNetwork {
public:
    // Throws NetworkError carrying the validation summary if invalid.
    static BayesianNetwork create(NetworkSpec spec, std::vector<TabularCPD> cpds,
                                  InterventionMarks marks = {});

    const NetworkSpec& spec() const { return spec_; }
    const std::vector<TabularCPD>& cpds() const { return cpds_; }
    const std::vector<std::string>& order() const { return order_; }
    const InterventionMarks& marks() const { return marks_; }

    std::size_t size() const { return spec_.nodes.size(); }
    bool contains(std::string_view name) const;
    std::size_t index_of(std::string_view name) const;
    const NodeSpec& node(std::string_view name) const { return spec_.nodes[index_of(name)]; }
    const TabularCPD& cpd(std::string_view name) const { return cpds_[index_of(name)]; }
    std::size_t cardinality(std::string_view name) const { return node(name).cardinality(); }

    Factor cpd_factor(std::string_view name) const;

private:
    BayesianNetwork() = default;

    NetworkSpec spec_;
    std::vector<TabularCPD> cpds_;  // aligned with spec_.nodes
    std::vector<std::string> order_;
    std::map<std::string, std::size_t, std::less<>> index_;
    InterventionMarks marks_;
};

// Uniform CPDs for every node, with parents taken from the structure.
std::vector<TabularCPD> uniform_cpds(const NetworkSpec& spec);

}  // namespace symptomnet
