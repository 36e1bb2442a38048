#include "symptomnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace symptomnet {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw MetricError("scores and labels differ in length");
    if (scores.empty()) throw MetricError("metric needs at least one record");
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) throw MetricError("scores must be finite");
        if (labels[i] != 0 && labels[i] != 1) throw MetricError("labels must be 0 or 1");
    }
}

void check_probabilities(std::span<const double> scores) {
    for (double s : scores) {
        if (s < 0.0 || s > 1.0) throw MetricError("scores must be probabilities in [0, 1]");
    }
}

struct BinStats {
    double score_sum = 0.0;
    double positives = 0.0;
    std::size_t count = 0;
};

std::vector<BinStats> bin_stats(std::span<const double> scores, std::span<const int> labels, std::size_t m) {
    check_inputs(scores, labels);
    check_probabilities(scores);
    if (m == 0) throw MetricError("bin count must be positive");
    std::vector<BinStats> bins(m);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        auto& b = bins[bin_index(scores[i], m)];
        b.score_sum += scores[i];
        b.positives += labels[i];
        ++b.count;
    }
    return bins;
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    check_inputs(scores, labels);
    const std::size_t n = scores.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Tie-averaged ranks; the positive rank sum gives wins + ties / 2.
    double positives = 0.0;
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            if (labels[idx[k]] == 1) {
                positives += 1.0;
                rank_sum += avg_rank;
            }
        }
        i = j;
    }
    const double negatives = static_cast<double>(n) - positives;
    if (positives == 0.0 || negatives == 0.0) throw MetricError("ROC-AUC needs both classes");
    return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

std::size_t bin_index(double score, std::size_t m) {
    if (m == 0) throw MetricError("need at least one bin");
    if (!(score >= 0.0 && score <= 1.0)) throw MetricError("scores must lie in [0, 1]");
    const double md = static_cast<double>(m);
    auto b = static_cast<std::ptrdiff_t>(std::ceil(score * md)) - 1;
    b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(m) - 1);
    // Correct for rounding in score * m so the edges k/m stay right-closed.
    while (b > 0 && score <= static_cast<double>(b) / md) --b;
    while (b + 1 < static_cast<std::ptrdiff_t>(m) && score > static_cast<double>(b + 1) / md) ++b;
    return static_cast<std::size_t>(b);
}

std::vector<CalibrationBin> calibration_curve(std::span<const double> scores, std::span<const int> labels,
                                              std::size_t m) {
    const auto bins = bin_stats(scores, labels, m);
    std::vector<CalibrationBin> out;
    for (std::size_t k = 0; k < bins.size(); ++k) {
        if (bins[k].count == 0) continue;
        const double c = static_cast<double>(bins[k].count);
        out.push_back({k, bins[k].score_sum / c, bins[k].positives / c, bins[k].count});
    }
    return out;
}

double ece(std::span<const double> scores, std::span<const int> labels, std::size_t m) {
    const auto curve = calibration_curve(scores, labels, m);
    const double n = static_cast<double>(scores.size());
    double total = 0.0;
    for (const auto& b : curve) {
        total += static_cast<double>(b.count) / n * std::fabs(b.mean_score - b.positive_rate);
    }
    return total;
}

double mce(std::span<const double> scores, std::span<const int> labels, std::size_t m) {
    double worst = 0.0;
    for (const auto& b : calibration_curve(scores, labels, m)) {
        worst = std::max(worst, std::fabs(b.mean_score - b.positive_rate));
    }
    return worst;
}

double brier(std::span<const double> scores, std::span<const int> labels) {
    check_inputs(scores, labels);
    check_probabilities(scores);
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double d = scores[i] - labels[i];
        total += d * d;
    }
    return total / static_cast<double>(scores.size());
}

FlaggedValue FlaggedValue::ratio(double num, double den) {
    if (den != 0.0) return {num / den, Kind::Finite};
    if (num == 0.0) return {0.0, Kind::Undefined};
    return {std::numeric_limits<double>::infinity(), Kind::Infinite};
}

Confusion confusion_at(std::span<const double> scores, std::span<const int> labels, double threshold) {
    check_inputs(scores, labels);
    Confusion c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool called = scores[i] >= threshold;
        if (labels[i] == 1) {
            called ? ++c.tp : ++c.fn;
        } else {
            called ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

PrevalenceMetrics prevalence_metrics(const Confusion& c) {
    const double tp = static_cast<double>(c.tp);
    const double fp = static_cast<double>(c.fp);
    const double tn = static_cast<double>(c.tn);
    const double fn = static_cast<double>(c.fn);
    if (tp + fn == 0.0 || tn + fp == 0.0) throw MetricError("prevalence metrics need both classes");
    PrevalenceMetrics out;
    out.confusion = c;
    out.prevalence = (tp + fn) / (tp + fn + tn + fp);
    out.ppv = FlaggedValue::ratio(tp, tp + fp);
    out.npv = FlaggedValue::ratio(tn, tn + fn);
    const double sensitivity = tp / (tp + fn);
    const double specificity = tn / (tn + fp);
    out.lr_plus = FlaggedValue::ratio(sensitivity, 1.0 - specificity);
    out.lr_minus = FlaggedValue::ratio(1.0 - sensitivity, specificity);
    return out;
}

PrevalenceMetrics prevalence_metrics(std::span<const double> scores, std::span<const int> labels, double threshold) {
    return prevalence_metrics(confusion_at(scores, labels, threshold));
}

EqualizedOdds equalized_odds(std::span<const double> scores, std::span<const int> labels,
                             std::span<const std::string> groups, double threshold) {
    check_inputs(scores, labels);
    if (groups.size() != scores.size()) throw MetricError("group column length differs from scores");
    std::map<std::string, Confusion> per_group;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        auto& c = per_group[groups[i]];
        const bool called = scores[i] >= threshold;
        if (labels[i] == 1) {
            called ? ++c.tp : ++c.fn;
        } else {
            called ? ++c.fp : ++c.tn;
        }
    }
    EqualizedOdds out;
    if (per_group.size() < 2) {
        out.reason = "equalized odds needs at least two groups";
        return out;
    }
    for (const auto& [name, c] : per_group) {
        if (c.tp + c.fn == 0 || c.fp + c.tn == 0) {
            out.reason = "group '" + name + "' lacks a class";
            return out;
        }
        GroupRates r;
        r.tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
        r.fpr = static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
        r.n = c.tp + c.fn + c.fp + c.tn;
        out.groups.emplace(name, r);
    }
    double tpr_lo = 1.0, tpr_hi = 0.0, fpr_lo = 1.0, fpr_hi = 0.0;
    for (const auto& [name, r] : out.groups) {
        tpr_lo = std::min(tpr_lo, r.tpr);
        tpr_hi = std::max(tpr_hi, r.tpr);
        fpr_lo = std::min(fpr_lo, r.fpr);
        fpr_hi = std::max(fpr_hi, r.fpr);
    }
    auto ratio = [](double lo, double hi) { return hi == 0.0 ? 1.0 : lo / hi; };
    out.defined = true;
    out.difference = std::max(tpr_hi - tpr_lo, fpr_hi - fpr_lo);
    out.ratio = std::min(ratio(tpr_lo, tpr_hi), ratio(fpr_lo, fpr_hi));
    return out;
}

double equalized_odds_difference(std::span<const double> scores, std::span<const int> labels,
                                 std::span<const std::string> groups, double threshold) {
    const auto eo = equalized_odds(scores, labels, groups, threshold);
    if (!eo.defined) throw MetricError(eo.reason);
    return eo.difference;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw MetricError("correlation inputs differ in length");
    if (x.size() < 2) throw MetricError("correlation needs at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw MetricError("correlation undefined for zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

MetricsReport metrics_report(std::span<const double> scores, std::span<const int> labels, std::size_t m) {
    MetricsReport r;
    r.n = scores.size();
    r.calibration_curve = calibration_curve(scores, labels, m);
    const double n = static_cast<double>(scores.size());
    for (const auto& b : r.calibration_curve) {
        const double gap = std::fabs(b.mean_score - b.positive_rate);
        r.ece += static_cast<double>(b.count) / n * gap;
        r.mce = std::max(r.mce, gap);
    }
    r.brier = brier(scores, labels);
    const bool both = std::any_of(labels.begin(), labels.end(), [](int l) { return l == 1; }) &&
                      std::any_of(labels.begin(), labels.end(), [](int l) { return l == 0; });
    if (both) r.roc_auc = roc_auc(scores, labels);
    return r;
}

FairnessReport fairness_report(std::span<const double> scores, std::span<const int> labels,
                               std::span<const std::string> groups, double threshold, std::size_t m) {
    check_inputs(scores, labels);
    if (groups.size() != scores.size()) throw MetricError("group column length differs from scores");
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < groups.size(); ++i) members[groups[i]].push_back(i);
    if (members.size() != 2) {
        throw MetricError("fairness report needs exactly two groups, found " + std::to_string(members.size()));
    }
    FairnessReport out;
    for (const auto& [name, rows] : members) {
        std::vector<double> s;
        std::vector<int> l;
        for (auto i : rows) {
            s.push_back(scores[i]);
            l.push_back(labels[i]);
        }
        out.groups.emplace(name, metrics_report(s, l, m));
    }
    const auto& a = out.groups.begin()->second;
    const auto& b = std::next(out.groups.begin())->second;
    out.ece_difference = std::fabs(a.ece - b.ece);
    out.brier_difference = std::fabs(a.brier - b.brier);
    out.equalized_odds = equalized_odds(scores, labels, groups, threshold);
    return out;
}

}  // namespace symptomnet
