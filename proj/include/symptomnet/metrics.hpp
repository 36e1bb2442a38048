#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace symptomnet {

class MetricError : public std::invalid_argument {
public:
    explicit MetricError(const std::string& what) : std::invalid_argument(what) {}
};

// Mann-Whitney form: (wins + 0.5 * ties) / (positives * negatives).
double roc_auc(std::span<const double> scores, std::span<const int> labels);

inline constexpr std::size_t kDefaultBins = 10;

struct CalibrationBin {
    std::size_t bin = 0;  // index of the equal-width bin
    double mean_score = 0.0;
    double positive_rate = 0.0;
    std::size_t count = 0;
};

// Equal-width bins over [0, 1], right-closed: (k/m, (k+1)/m], with 0 in the
// first bin and 1 in the last. Empty bins are omitted. Scores outside [0, 1] throw MetricError.
std::size_t bin_index(double score, std::size_t m);
std::vector<CalibrationBin> calibration_curve(std::span<const double> scores, std::span<const int> labels,
                                              std::size_t m = kDefaultBins);

double ece(std::span<const double> scores, std::span<const int> labels, std::size_t m = kDefaultBins);
double mce(std::span<const double> scores, std::span<const int> labels, std::size_t m = kDefaultBins);
double brier(std::span<const double> scores, std::span<const int> labels);

// A ratio that may have a zero denominator.
struct FlaggedValue {
    enum class Kind { Finite, Infinite, Undefined };
    double value = 0.0;
    Kind kind = Kind::Finite;

    bool finite() const { return kind == Kind::Finite; }
    static FlaggedValue ratio(double num, double den);
};

struct Confusion {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// Scores at or above the threshold are called positive.
Confusion confusion_at(std::span<const double> scores, std::span<const int> labels, double threshold);

struct PrevalenceMetrics {
    Confusion confusion;
    double prevalence = 0.0;
    FlaggedValue ppv, npv, lr_plus, lr_minus;
};

PrevalenceMetrics prevalence_metrics(std::span<const double> scores, std::span<const int> labels,
                                     double threshold = 0.5);
PrevalenceMetrics prevalence_metrics(const Confusion& confusion);

struct GroupRates {
    double tpr = 0.0;
    double fpr = 0.0;
    std::size_t n = 0;
};

struct EqualizedOdds {
    bool defined = false;  // false when some group lacks a class
    std::string reason;
    double difference = 0.0;  // max(|dTPR|, |dFPR|) across groups
    double ratio = 1.0;       // min(TPR ratio, FPR ratio), ratio = smallest / largest
    std::map<std::string, GroupRates> groups;
};

EqualizedOdds equalized_odds(std::span<const double> scores, std::span<const int> labels,
                             std::span<const std::string> groups, double threshold = 0.5);
// Throws MetricError when undefined.
double equalized_odds_difference(std::span<const double> scores, std::span<const int> labels,
                                 std::span<const std::string> groups, double threshold = 0.5);

double pearson_r(std::span<const double> x, std::span<const double> y);

struct MetricsReport {
    std::size_t n = 0;
    std::optional<double> roc_auc;  // absent when only one class occurs
    double ece = 0.0;
    double mce = 0.0;
    double brier = 0.0;
    std::vector<CalibrationBin> calibration_curve;
};

MetricsReport metrics_report(std::span<const double> scores, std::span<const int> labels, std::size_t m = kDefaultBins);

struct FairnessReport {
    std::map<std::string, MetricsReport> groups;
    double ece_difference = 0.0;
    double brier_difference = 0.0;
    EqualizedOdds equalized_odds;
};

// Exactly two groups; differences are absolute values.
FairnessReport fairness_report(std::span<const double> scores, std::span<const int> labels,
                               std::span<const std::string> groups, double threshold = 0.5,
                               std::size_t m = kDefaultBins);

}  // namespace symptomnet
