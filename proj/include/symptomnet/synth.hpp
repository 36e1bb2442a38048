#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "symptomnet/dataset.hpp"
#include "symptomnet/network.hpp"
#include "symptomnet/assessment_model.hpp"

namespace symptomnet {

class GeneratorError : public std::invalid_argument {
public:
    explicit GeneratorError(const std::string& what) : std::invalid_argument(what) {}
};

using Rng = std::mt19937_64;

// Ancestral sampling in topological order; one discrete column per node.
DatasetTable forward_sample(const BayesianNetwork& network, std::size_t n, std::uint64_t seed);

// Class-conditional unit Gaussians separated by sqrt(2) * Phi^-1(target_auc),
// squashed through the logistic function. The second overload places the
// class mean at `class_position` in [0, 1] along that separation (0 absent,
// 1 present); fractional positions simulate cross-symptom leakage.
double surrogate_score(bool symptom_present, double target_auc, Rng& rng);
double surrogate_score(double class_position, double target_auc, Rng& rng);

struct GroupSpec {
    std::string column;
    std::vector<std::string> levels;
    std::vector<double> fractions;
};

struct SplitSpec {
    std::string name;
    double fraction;
};

struct GeneratorConfig {
    std::size_t n = 30000;
    std::uint64_t seed = 20240611;
    double depression_prevalence = 0.30;
    double anxiety_prevalence = 0.30;
    double anxiety_given_depression = 0.42;
    // Mean of the latent severity when the symptom's condition is present (0 when absent).
    double symptom_sharpness = 1.6;
    std::map<std::string, double> symptom_sharpness_overrides;
    // Latent cut points giving ordinal severities 0..3.
    std::vector<double> severity_cutpoints{0.0, 1.0, 1.6};
    std::map<std::string, double> surrogate_auc;  // surrogate node -> target; defaults per layout
    std::vector<GroupSpec> groups;
    double diagnosis_noise = 0.10;
    // Fraction of a surrogate's signal taken from the other symptoms of the same condition.
    double surrogate_leak = 0.0;
    std::vector<SplitSpec> splits;

    static GeneratorConfig defaults(const ModelLayout& layout = assessment_layout());
    // Throws GeneratorError naming the offending field.
    void validate(const ModelLayout& layout = assessment_layout()) const;
};

struct Cohort {
    std::map<std::string, DatasetTable> splits;  // keyed by split name
    std::vector<std::string> split_order;
};

// One record per user. Conditions come from the 2x2 joint fixed by the two
// prevalences and P(anxiety | depression); severities from a latent ordinal
// model whose mean shifts with the symptom's condition; surrogate scores
// depend only on the binarized severity (plus optional leakage).
DatasetTable sample_cohort(const GeneratorConfig& config, const ModelLayout& layout = assessment_layout());

// Splits consecutive records, so user ids never overlap across splits.
Cohort split_cohort(const DatasetTable& table, const GeneratorConfig& config);

// Column registry of generated cohorts, in CSV order.
std::vector<std::string> cohort_columns(const GeneratorConfig& config, const ModelLayout& layout = assessment_layout());

inline constexpr const char* kUserIdColumn = "user_id";
inline constexpr const char* kDiagnosisColumn = "diagnosis";
inline constexpr const char* kPhq8Column = "phq8_total";
inline constexpr const char* kGad7Column = "gad7_total";

std::string target_column(std::string_view condition);
std::string total_column(std::string_view condition);

}  // namespace symptomnet
