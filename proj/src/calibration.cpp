#include "symptomnet/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace symptomnet {

double IsotonicMap::predict(double score) const {
    if (x.empty()) throw CalibrationError("isotonic map has no knots");
    if (score <= x.front()) return y.front();
    if (score >= x.back()) return y.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), score) - x.begin());
    const std::size_t lo = hi - 1;
    const double t = (score - x[lo]) / (x[hi] - x[lo]);
    return y[lo] + t * (y[hi] - y[lo]);
}

IsotonicMap fit_isotonic(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw CalibrationError("isotonic fit needs equally long inputs");
    if (x.empty()) throw CalibrationError("isotonic fit needs at least one point");

    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

    // Merge tied inputs.
    struct Block {
        double x;
        double sum;
        double weight;
        double mean() const { return sum / weight; }
    };
    std::vector<Block> points;
    for (std::size_t i : idx) {
        if (!points.empty() && points.back().x == x[i]) {
            points.back().sum += y[i];
            points.back().weight += 1.0;
        } else {
            points.push_back({x[i], y[i], 1.0});
        }
    }

    // Pool adjacent violators; each pooled block remembers how many points it spans.
    struct Pool {
        double sum;
        double weight;
        std::size_t count;
    };
    std::vector<Pool> stack;
    for (const auto& p : points) {
        stack.push_back({p.sum, p.weight, 1});
        while (stack.size() > 1) {
            const Pool& top = stack.back();
            const Pool& below = stack[stack.size() - 2];
            if (below.sum / below.weight <= top.sum / top.weight) break;
            Pool merged{below.sum + top.sum, below.weight + top.weight, below.count + top.count};
            stack.pop_back();
            stack.back() = merged;
        }
    }

    IsotonicMap map;
    map.x.reserve(points.size());
    map.y.reserve(points.size());
    std::size_t k = 0;
    for (const auto& pool : stack) {
        const double value = pool.sum / pool.weight;
        for (std::size_t j = 0; j < pool.count; ++j, ++k) {
            map.x.push_back(points[k].x);
            map.y.push_back(value);
        }
    }
    return map;
}

double Calibrator::predict(double score) const {
    if (bags.empty()) throw CalibrationError("calibrator has no bags");
    double total = 0.0;
    for (const auto& bag : bags) total += bag.predict(score);
    return std::clamp(total / static_cast<double>(bags.size()), 0.0, 1.0);
}

Calibrator fit_calibrator(std::span<const double> scores, std::span<const int> labels, CalibratorOptions options) {
    if (scores.size() != labels.size()) throw CalibrationError("scores and labels differ in length");
    if (options.n_bags == 0) throw CalibrationError("calibrator needs at least one bag");
    bool has_pos = false;
    bool has_neg = false;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!(scores[i] >= 0.0 && scores[i] <= 1.0)) throw CalibrationError("scores must lie in [0, 1]");
        if (labels[i] == 1) {
            has_pos = true;
        } else if (labels[i] == 0) {
            has_neg = true;
        } else {
            throw CalibrationError("labels must be 0 or 1");
        }
    }
    if (!has_pos || !has_neg) throw CalibrationError("calibration labels contain a single class");

    const std::size_t n = scores.size();
    Calibrator cal;
    cal.seed = options.seed;
    std::vector<double> xs(n);
    std::vector<double> ys(n);
    for (std::size_t b = 0; b < options.n_bags; ++b) {
        const std::uint64_t bag_seed = options.seed + b;
        std::mt19937_64 rng(bag_seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = options.bootstrap ? pick(rng) : i;
            xs[i] = scores[j];
            ys[i] = static_cast<double>(labels[j]);
        }
        cal.bag_seeds.push_back(bag_seed);
        cal.bags.push_back(fit_isotonic(xs, ys));
    }
    return cal;
}

double calibrate(const Calibrator& calibrator, double score) {
    if (!std::isfinite(score)) throw CalibrationError("cannot calibrate a non-finite score");
    return calibrator.predict(score);
}

}  // namespace symptomnet
