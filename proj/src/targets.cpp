#include "symptomnet/targets.hpp"

namespace symptomnet {

namespace {

void check_item(int score) {
    if (score < 0 || score > 3) throw TargetError("item score " + std::to_string(score) + " outside 0..3");
}

}  // namespace

std::string_view to_string(TargetLabel label) {
    switch (label) {
        case TargetLabel::Absent: return "absent";
        case TargetLabel::Present: return "present";
        case TargetLabel::Undefined: return "undefined";
    }
    return "undefined";
}

bool binarize_symptom(int item_score) {
    check_item(item_score);
    return item_score >= 2;
}

TargetLabel condition_target(int total, std::optional<bool> diagnosis, int scale_max) {
    if (total < 0 || total > scale_max) {
        throw TargetError("total " + std::to_string(total) + " outside 0.." + std::to_string(scale_max));
    }
    if (!diagnosis) return TargetLabel::Undefined;
    if (total >= 10 && *diagnosis) return TargetLabel::Present;
    if (total < 10 && !*diagnosis) return TargetLabel::Absent;
    return TargetLabel::Undefined;
}

DsmTargets dsm_targets(const std::array<int, 8>& depression_items, const std::array<int, 7>& anxiety_items) {
    int dep_present = 0;
    for (int s : depression_items) dep_present += binarize_symptom(s) ? 1 : 0;
    int anx_present = 0;
    for (int s : anxiety_items) anx_present += binarize_symptom(s) ? 1 : 0;

    const bool core_depression = binarize_symptom(depression_items[0]) || binarize_symptom(depression_items[1]);
    const bool core_anxiety = binarize_symptom(anxiety_items[0]) || binarize_symptom(anxiety_items[1]);

    DsmTargets out;
    out.mdd = dep_present >= 5 && core_depression;
    out.other_depression = dep_present >= 4;
    out.gad = anx_present >= 5 && core_anxiety;
    return out;
}

}  // namespace symptomnet
