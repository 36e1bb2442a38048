#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace symptomnet {

class TargetError : public std::out_of_range {
public:
    explicit TargetError(const std::string& what) : std::out_of_range(what) {}
};

enum class TargetLabel { Absent, Present, Undefined };

std::string_view to_string(TargetLabel label);

// Item scores run 0..3; "half or more days" (2 or 3) counts as present.
bool binarize_symptom(int item_score);

// PHQ-8 runs 0..24, GAD-7 0..21.
inline constexpr int kPhq8Max = 24;
inline constexpr int kGad7Max = 21;

// Present needs total >= 10 together with a reported diagnosis; absent needs
// total < 10 with no diagnosis. Anything else (including an unknown
// diagnosis) is undefined and excluded from evaluation.
TargetLabel condition_target(int total, std::optional<bool> diagnosis, int scale_max);

struct DsmTargets {
    bool mdd = false;
    bool other_depression = false;
    bool gad = false;
};

// Depression items in the order Anhedonia, LowMood, Sleep, LowEnergy, Appetite,
// Worthlessness, Concentration, Psychomotor. Anxiety items in the order
// Nervousness, UncontrollableWorry, ExcessiveWorry, TroubleRelaxing,
// Restlessness, Irritability, Dread.
DsmTargets dsm_targets(const std::array<int, 8>& depression_items, const std::array<int, 7>& anxiety_items);

}  // namespace symptomnet
