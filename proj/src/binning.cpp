#include "symptomnet/binning.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace symptomnet {

namespace {

double interpolated_quantile(const std::vector<double>& sorted, double p) {
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

QuartileBins fit_quartile_bins(std::span<const double> values) {
    if (values.size() < 4) {
        throw BinningError("quartile bins need at least 4 values, got " + std::to_string(values.size()));
    }
    std::vector<double> sorted(values.begin(), values.end());
    for (double v : sorted) {
        if (!std::isfinite(v)) throw BinningError("quartile bins need finite values");
    }
    std::sort(sorted.begin(), sorted.end());
    QuartileBins bins;
    bins.b1 = interpolated_quantile(sorted, 0.25);
    bins.b2 = interpolated_quantile(sorted, 0.50);
    bins.b3 = interpolated_quantile(sorted, 0.75);
    bins.degenerate = sorted.front() == sorted.back();
    return bins;
}

std::size_t apply_bins(double value, const QuartileBins& bins) {
    if (!std::isfinite(value)) throw BinningError("cannot bin a non-finite value");
    if (value <= bins.b1) return 0;
    if (value <= bins.b2) return 1;
    if (value <= bins.b3) return 2;
    return 3;
}

}  // namespace symptomnet
