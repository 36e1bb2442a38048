#include "symptomnet/assessment_model.hpp"

#include <algorithm>
#include <utility>

namespace symptomnet {

namespace {

struct SymptomRow {
    const char* symptom;
    const char* stem;
    std::vector<std::pair<std::string_view, double>> surrogates;
};

// Surrogate discrimination per symptom (development split ROC-AUC).
const std::vector<SymptomRow>& depression_rows() {
    static const std::vector<SymptomRow> rows{
        {"Anhedonia", "anhedonia", {{kMoodAudio, 0.674}, {kMoodLinguistic, 0.715}}},
        {"LowMood", "low-mood", {{kMoodAudio, 0.712}, {kMoodLinguistic, 0.779}}},
        {"Sleep", "sleep", {{kReadingMM, 0.620}, {kMoodAudio, 0.662}, {kMoodLinguistic, 0.684}}},
        {"LowEnergy", "low-energy", {{kReadingMM, 0.634}, {kMoodAudio, 0.692}, {kMoodLinguistic, 0.724}}},
        {"Appetite", "appetite", {{kReadingMM, 0.620}}},
        {"Worthlessness", "worthlessness", {{kMoodAudio, 0.691}, {kMoodLinguistic, 0.746}}},
        {"Concentration", "concentration", {{kReadingMM, 0.601}, {kMoodAudio, 0.649}}},
        {"Psychomotor", "psychomotor", {{kReadingMM, 0.638}, {kMoodAudio, 0.680}}},
    };
    return rows;
}

const std::vector<SymptomRow>& anxiety_rows() {
    static const std::vector<SymptomRow> rows{
        {"Nervousness", "nervousness", {{kMoodAudio, 0.709}, {kMoodLinguistic, 0.742}}},
        {"UncontrollableWorry", "uncontrollable-worry", {{kMoodAudio, 0.695}, {kMoodLinguistic, 0.733}}},
        {"ExcessiveWorry", "excessive-worry", {{kMoodAudio, 0.692}, {kMoodLinguistic, 0.735}}},
        {"TroubleRelaxing", "trouble-relaxing", {{kReadingMM, 0.607}, {kMoodLinguistic, 0.714}}},
        {"Restlessness", "restlessness", {{kReadingMM, 0.624}, {kMoodLinguistic, 0.652}}},
        {"Irritability", "irritability", {{kReadingMM, 0.623}, {kMoodAudio, 0.677}}},
        {"Dread", "dread", {{kMoodAudio, 0.654}, {kMoodLinguistic, 0.682}}},
    };
    return rows;
}

const std::vector<Edge>& inter_symptom_edges() {
    static const std::vector<Edge> edges{
        {"LowEnergy", "Anhedonia"},        {"Worthlessness", "LowMood"},
        {"Appetite", "LowEnergy"},         {"TroubleRelaxing", "Restlessness"},
        {"Psychomotor", "Restlessness"},   {"TroubleRelaxing", "Concentration"},
    };
    return edges;
}

}  // namespace

std::vector<std::string> ModelLayout::condition_names() const {
    std::vector<std::string> out;
    for (const auto& c : conditions) out.push_back(c.condition);
    return out;
}

std::vector<std::string> ModelLayout::symptoms() const {
    std::vector<std::string> out;
    for (const auto& c : conditions) out.insert(out.end(), c.symptoms.begin(), c.symptoms.end());
    return out;
}

std::vector<std::string> ModelLayout::surrogates_of(std::string_view symptom) const {
    std::vector<std::string> out;
    for (const auto& s : surrogates) {
        if (s.symptom == symptom) out.push_back(s.node);
    }
    return out;
}

std::vector<std::string> ModelLayout::family_nodes(std::string_view family) const {
    std::vector<std::string> out;
    for (const auto& s : surrogates) {
        if (s.family == family) out.push_back(s.node);
    }
    return out;
}

std::vector<std::string> ModelLayout::families() const {
    std::vector<std::string> out;
    for (const auto& s : surrogates) {
        if (std::find(out.begin(), out.end(), s.family) == out.end()) out.push_back(s.family);
    }
    return out;
}

const ConditionGroup* ModelLayout::condition_of(std::string_view symptom) const {
    for (const auto& c : conditions) {
        if (std::find(c.symptoms.begin(), c.symptoms.end(), symptom) != c.symptoms.end()) return &c;
    }
    return nullptr;
}

const SurrogateDef* ModelLayout::surrogate(std::string_view node) const {
    for (const auto& s : surrogates) {
        if (s.node == node) return &s;
    }
    return nullptr;
}

ModelLayout assessment_layout() {
    ModelLayout layout;
    auto add_group = [&](std::string_view condition, const std::vector<SymptomRow>& rows) {
        ConditionGroup group{std::string(condition), {}};
        for (const auto& row : rows) {
            group.symptoms.emplace_back(row.symptom);
            for (const auto& [family, auc] : row.surrogates) {
                layout.surrogates.push_back(
                    {std::string(row.stem) + "-" + std::string(family), row.symptom, std::string(family), auc});
            }
        }
        layout.conditions.push_back(std::move(group));
    };
    add_group(kDepression, depression_rows());
    add_group(kAnxiety, anxiety_rows());
    return layout;
}

NetworkSpec assessment_network(AssessmentNetworkOptions options) {
    const ModelLayout layout = assessment_layout();
    NetworkSpec spec;
    for (const auto& c : layout.conditions) spec.nodes.push_back({c.condition, kConditionStates});
    for (const auto& s : layout.symptoms()) spec.nodes.push_back({s, kOrdinalStates});
    for (const auto& s : layout.surrogates) spec.nodes.push_back({s.node, kOrdinalStates});

    for (const auto& c : layout.conditions) {
        for (const auto& s : c.symptoms) spec.edges.emplace_back(c.condition, s);
    }
    for (const auto& e : inter_symptom_edges()) spec.edges.push_back(e);
    if (options.condition_edge) spec.edges.emplace_back(std::string(kDepression), std::string(kAnxiety));
    for (const auto& s : layout.surrogates) spec.edges.emplace_back(s.symptom, s.node);
    return spec;
}

}  // namespace symptomnet
