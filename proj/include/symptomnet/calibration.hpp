#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace symptomnet {

class CalibrationError : public std::invalid_argument {
public:
    explicit CalibrationError(const std::string& what) : std::invalid_argument(what) {}
};

// Monotone non-decreasing map given by knots; linear between knots and
// clamped to the end values outside them.
struct IsotonicMap {
    std::vector<double> x;
    std::vector<double> y;

    double predict(double score) const;
};

// Least-squares non-decreasing fit by pool-adjacent-violators. Tied inputs are
// merged first (mean target, weight = multiplicity).
IsotonicMap fit_isotonic(std::span<const double> x, std::span<const double> y);

struct CalibratorOptions {
    std::size_t n_bags = 10;
    std::uint64_t seed = 0;
    // Without resampling every bag sees the full training set.
    bool bootstrap = true;
};

// Bagged isotonic calibrator for one condition. Bag i draws a same-size
// bootstrap resample with std::mt19937_64 seeded by `seed + i`; the prediction
// is the mean of the bag outputs.
struct Calibrator {
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> bag_seeds;
    std::vector<IsotonicMap> bags;

    double predict(double score) const;
};

// Throws CalibrationError unless both label classes occur and scores lie in [0, 1].
Calibrator fit_calibrator(std::span<const double> scores, std::span<const int> labels, CalibratorOptions options = {});

// Throws CalibrationError for non-finite scores.
double calibrate(const Calibrator& calibrator, double score);

// One calibrator per condition name.
using CalibratorSet = std::map<std::string, Calibrator>;

}  // namespace symptomnet
