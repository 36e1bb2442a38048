#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symptomnet/binning.hpp"
#include "symptomnet/calibration.hpp"
#include "symptomnet/dataset.hpp"
#include "symptomnet/estimation.hpp"
#include "symptomnet/inference.hpp"
#include "symptomnet/network.hpp"
#include "symptomnet/assessment_model.hpp"
#include "symptomnet/serialization.hpp"

namespace symptomnet {

// Adds a discrete quartile column for every binned surrogate whose raw score
// column is present and whose discrete column is not.
DatasetTable discretize_surrogates(const DatasetTable& data, const QuartileBinner& binners);

// Fits quartile bins on the raw surrogate scores (when the discrete column is
// absent and rows exist) and then BDeu CPDs on the discretized table.
NetworkFile fit_network_file(const NetworkSpec& spec, const DatasetTable& data, EssConfig ess,
                             const ModelLayout& layout = assessment_layout());

// Evidence for one record restricted to `nodes`; missing cells are skipped.
EvidenceMap record_evidence(const DatasetTable& discretized, std::size_t row, const std::vector<std::string>& nodes,
                            const BayesianNetwork& network);

// Surrogate nodes of the layout that exist in the network, optionally one family only.
std::vector<std::string> evidence_nodes(const BayesianNetwork& network, const ModelLayout& layout,
                                        const std::optional<std::string>& family = std::nullopt);

struct ScoredRecords {
    std::map<std::string, std::vector<double>> conditions;        // P(present) per record
    std::map<std::string, std::vector<double>> symptom_presence;  // P(severity >= 2) per record
    std::map<std::string, std::vector<double>> severity_totals;   // expected severity per condition
};

ScoredRecords score_records(const BayesianNetwork& network, const DatasetTable& discretized,
                            const std::vector<std::string>& evidence, const ModelLayout& layout, bool with_symptoms);

// Binary labels of a condition column (present = 1) and the rows where defined.
struct LabelColumn {
    std::vector<int> labels;
    std::vector<std::size_t> rows;
};
LabelColumn condition_labels(const DatasetTable& data, const std::string& column);

CalibratorSet fit_calibrators(const std::map<std::string, std::vector<double>>& scores,
                              const std::map<std::string, std::vector<int>>& labels, CalibratorOptions options);

struct EvaluateOptions {
    double threshold = 0.5;
    std::size_t bins = kDefaultBins;
    bool single_family = true;
};

// Evaluation report with condition (raw and calibrated), symptom, severity,
// DSM-like target, fairness, prevalence, comorbidity and single-family sections.
Json evaluate_report(const NetworkFile& model, const CalibratorSet& calibrators, const DatasetTable& data,
                     EvaluateOptions options = {}, const ModelLayout& layout = assessment_layout());

// Calibration curve rows (condition, stage, bin, mean score, positive rate, count).
std::string calibration_curve_csv(const Json& report);

// One query: echoes the request and returns posteriors, expected severities,
// contributions and raw/calibrated condition probabilities.
struct QueryRequest {
    EvidenceMap evidence;
    InterventionSet interventions;
    std::vector<std::string> query;
};

// Accepts state indices or state labels. Throws InvalidQuery naming the node.
std::size_t parse_state(const BayesianNetwork& network, const std::string& node, const Json& value);
QueryRequest parse_query(const Json& json, const BayesianNetwork& network);
Json run_query(const BayesianNetwork& network, const CalibratorSet* calibrators, const QueryRequest& request,
               const ModelLayout& layout = assessment_layout());

}  // namespace symptomnet
