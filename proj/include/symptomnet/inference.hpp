#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "symptomnet/network.hpp"
#include "symptomnet/assessment_model.hpp"

namespace symptomnet {

using EvidenceMap = std::map<std::string, std::size_t>;
using InterventionSet = std::set<std::string>;

class InferenceError : public std::runtime_error {
public:
    explicit InferenceError(const std::string& what) : std::runtime_error(what) {}
};

class InconsistentEvidence : public InferenceError {
public:
    InconsistentEvidence() : InferenceError("evidence has probability zero under the network") {}
};

// Unknown node, state out of range, or a node both queried and observed.
class InvalidQuery : public InferenceError {
public:
    InvalidQuery(std::string node, const std::string& what) : InferenceError(what), node_(std::move(node)) {}
    const std::string& node() const { return node_; }

private:
    std::string node_;
};

class StateSpaceTooLarge : public InferenceError {
public:
    explicit StateSpaceTooLarge(const std::string& what) : InferenceError(what) {}
};

struct PosteriorReport {
    std::map<std::string, std::vector<double>> marginals;
    EvidenceMap evidence;          // evidence that entered the computation
    EvidenceMap ignored_evidence;  // evidence dropped because its node is detached
    InterventionSet interventions;

    const std::vector<double>& at(const std::string& node) const;
};

// Exact per-node posteriors P(node | evidence) by variable elimination.
// Nodes irrelevant to the query (barren descendants) are pruned first and the
// remaining variables are eliminated in min-fill order, ties broken by name.
PosteriorReport eliminate_variables(const BayesianNetwork& network, const std::vector<std::string>& query,
                                    const EvidenceMap& evidence);

// Same, eliminating hidden variables in the given order. Every hidden
// variable must appear; extra names are ignored. For order-independence tests.
PosteriorReport eliminate_variables(const BayesianNetwork& network, const std::vector<std::string>& query,
                                    const EvidenceMap& evidence, const std::vector<std::string>& elimination_order);

// Full joint enumeration. Throws StateSpaceTooLarge above kBruteForceLimit.
inline constexpr std::size_t kBruteForceLimit = std::size_t{1} << 24;
PosteriorReport brute_force_joint(const BayesianNetwork& network, const std::vector<std::string>& query,
                                  const EvidenceMap& evidence);

// Full isolation: each intervened node loses incoming and outgoing edges and
// takes its pre-intervention marginal; children left without parents are
// detached as well, and evidence on detached nodes is ignored.
BayesianNetwork apply_do(const BayesianNetwork& network, const InterventionSet& interventions);

// Textbook do(X = x): incoming edges cut, X fixed to x, outgoing edges kept.
BayesianNetwork apply_strict_do(const BayesianNetwork& network, const std::map<std::string, std::size_t>& values);

struct ConditionProbabilities {
    std::map<std::string, double> present;  // P(condition = present | evidence, do(...))

    double at(const std::string& condition) const;
};

ConditionProbabilities query_conditions(const BayesianNetwork& network, const EvidenceMap& evidence,
                                        const InterventionSet& interventions,
                                        const ModelLayout& layout = assessment_layout());

struct SeverityReport {
    std::map<std::string, double> symptoms;    // sum_k k * P(severity = k)
    std::map<std::string, double> conditions;  // summed over each condition's symptoms
};

SeverityReport expected_severity(const BayesianNetwork& network, const EvidenceMap& evidence,
                                 const InterventionSet& interventions, const ModelLayout& layout = assessment_layout());

// contributions[condition][symptom] = P(condition | evidence) minus the same
// probability with the symptom's own evidence and its surrogates' removed.
using ContributionReport = std::map<std::string, std::map<std::string, double>>;

ContributionReport symptom_contributions(const BayesianNetwork& network, const EvidenceMap& evidence,
                                         const InterventionSet& interventions,
                                         const ModelLayout& layout = assessment_layout());

// Posteriors for the requested nodes; nodes that are themselves observed get a
// point mass instead of an error. Used by the higher-level queries.
std::map<std::string, std::vector<double>> marginals_with_observed(const BayesianNetwork& network,
                                                                   const std::vector<std::string>& nodes,
                                                                   const EvidenceMap& evidence);

}  // namespace symptomnet
