#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "symptomnet/network.hpp"

namespace symptomnet {

inline constexpr std::string_view kDepression = "Depression";
inline constexpr std::string_view kAnxiety = "Anxiety";

inline constexpr std::string_view kReadingMM = "reading-MM";
inline constexpr std::string_view kMoodAudio = "mood-audio";
inline constexpr std::string_view kMoodLinguistic = "mood-linguistic";

// Condition node labels and ordinal symptom/surrogate labels.
inline const std::vector<std::string> kConditionStates{"absent", "present"};
inline const std::vector<std::string> kOrdinalStates{"0", "1", "2", "3"};

struct SurrogateDef {
    std::string node;     // e.g. "sleep-mood-linguistic"
    std::string symptom;  // e.g. "Sleep"
    std::string family;   // reading-MM | mood-audio | mood-linguistic
    double target_auc;    // discrimination of the upstream model for its symptom
};

struct ConditionGroup {
    std::string condition;
    std::vector<std::string> symptoms;
};

// Roles of the nodes in an assessment network: which nodes are conditions,
// which symptoms belong to each, and which observable surrogates hang off
// each symptom. Queries use it to find condition nodes and the evidence
// attached to a symptom.
struct ModelLayout {
    std::vector<ConditionGroup> conditions;
    std::vector<SurrogateDef> surrogates;

    std::vector<std::string> condition_names() const;
    std::vector<std::string> symptoms() const;
    std::vector<std::string> surrogates_of(std::string_view symptom) const;
    std::vector<std::string> family_nodes(std::string_view family) const;
    std::vector<std::string> families() const;
    const ConditionGroup* condition_of(std::string_view symptom) const;
    const SurrogateDef* surrogate(std::string_view node) const;
};

ModelLayout assessment_layout();

struct AssessmentNetworkOptions {
    // Depression -> Anxiety edge carrying the comorbidity dependence.
    bool condition_edge = true;
};

// Two conditions, fifteen four-level symptoms, the retained inter-symptom
// edges and one four-level quartile node per surrogate model.
NetworkSpec assessment_network(AssessmentNetworkOptions options = {});

}  // namespace symptomnet
