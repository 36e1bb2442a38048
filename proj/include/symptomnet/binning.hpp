#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>

namespace symptomnet {

class BinningError : public std::invalid_argument {
public:
    explicit BinningError(const std::string& what) : std::invalid_argument(what) {}
};

// Cut points on one surrogate's raw score scale: q0 <= b1 < q1 <= b2 < q2 <= b3 < q3.
struct QuartileBins {
    double b1 = 0.0;
    double b2 = 0.0;
    double b3 = 0.0;
    // All training values identical; everything falls into q0.
    bool degenerate = false;
};

// Empirical 25/50/75% quantiles, linearly interpolated between order
// statistics at position (n - 1) * p. Needs at least four finite values.
QuartileBins fit_quartile_bins(std::span<const double> values);

// Boundary values fall into the lower bin.
std::size_t apply_bins(double value, const QuartileBins& bins);

// Per-surrogate cut points, keyed by surrogate node name.
using QuartileBinner = std::map<std::string, QuartileBins>;

}  // namespace symptomnet
