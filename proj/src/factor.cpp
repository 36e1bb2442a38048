#include "symptomnet/factor.hpp"

#include <algorithm>
#include <numeric>

namespace symptomnet {

namespace {

std::vector<std::size_t> strides_of(const std::vector<std::size_t>& cards) {
    std::vector<std::size_t> strides(cards.size(), 1);
    for (std::size_t i = cards.size(); i-- > 1;) {
        strides[i - 1] = strides[i] * cards[i];
    }
    return strides;
}

std::size_t product_of(const std::vector<std::size_t>& cards) {
    return std::accumulate(cards.begin(), cards.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Factor::Factor(std::vector<std::string> scope, std::vector<std::size_t> cards, std::vector<double> values)
    : scope_(std::move(scope)), cards_(std::move(cards)), values_(std::move(values)) {
    if (scope_.size() != cards_.size()) {
        throw FactorError("factor scope and cardinality lists differ in length");
    }
    for (std::size_t i = 0; i < scope_.size(); ++i) {
        if (cards_[i] == 0) {
            throw FactorError("variable '" + scope_[i] + "' has zero cardinality");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (scope_[i] == scope_[j]) {
                throw FactorError("variable '" + scope_[i] + "' repeated in factor scope");
            }
        }
    }
    if (values_.size() != product_of(cards_)) {
        throw FactorError("factor has " + std::to_string(values_.size()) + " values, expected " +
                          std::to_string(product_of(cards_)));
    }
    for (double v : values_) {
        if (!(v >= 0.0)) {
            throw FactorError("factor values must be nonnegative");
        }
    }
}

bool Factor::contains(std::string_view var) const {
    return std::find(scope_.begin(), scope_.end(), var) != scope_.end();
}

std::size_t Factor::position(std::string_view var) const {
    auto it = std::find(scope_.begin(), scope_.end(), var);
    if (it == scope_.end()) {
        throw FactorError("variable '" + std::string(var) + "' not in factor scope");
    }
    return static_cast<std::size_t>(it - scope_.begin());
}

double Factor::at(std::span<const std::size_t> assignment) const {
    if (assignment.size() != scope_.size()) {
        throw FactorError("assignment length does not match factor scope");
    }
    std::size_t index = 0;
    for (std::size_t i = 0; i < scope_.size(); ++i) {
        if (assignment[i] >= cards_[i]) {
            throw FactorError("state out of range for '" + scope_[i] + "'");
        }
        index = index * cards_[i] + assignment[i];
    }
    return values_[index];
}

double Factor::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

Factor Factor::reordered(const std::vector<std::string>& order) const {
    if (order.size() != scope_.size()) {
        throw FactorError("reorder target is not a permutation of the scope");
    }
    std::vector<std::size_t> src_pos(order.size());
    std::vector<std::size_t> new_cards(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        src_pos[i] = position(order[i]);
        new_cards[i] = cards_[src_pos[i]];
    }
    const auto src_strides = strides_of(cards_);
    std::vector<double> out(values_.size());
    std::vector<std::size_t> assignment(order.size(), 0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        std::size_t src = 0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            src += assignment[i] * src_strides[src_pos[i]];
        }
        out[k] = values_[src];
        for (std::size_t i = order.size(); i-- > 0;) {
            if (++assignment[i] < new_cards[i]) break;
            assignment[i] = 0;
        }
    }
    return Factor(order, std::move(new_cards), std::move(out));
}

Factor factor_product(const Factor& f, const Factor& g) {
    std::vector<std::string> scope = f.scope();
    std::vector<std::size_t> cards = f.cards();
    for (std::size_t j = 0; j < g.scope().size(); ++j) {
        const auto& var = g.scope()[j];
        auto it = std::find(scope.begin(), scope.end(), var);
        if (it == scope.end()) {
            scope.push_back(var);
            cards.push_back(g.cards()[j]);
        } else if (cards[static_cast<std::size_t>(it - scope.begin())] != g.cards()[j]) {
            throw FactorError("cardinality mismatch on shared variable '" + var + "'");
        }
    }

    // Per output variable, the stride it contributes to each input's index.
    const auto f_strides = strides_of(f.cards());
    const auto g_strides = strides_of(g.cards());
    const std::size_t n = scope.size();
    std::vector<std::size_t> step_f(n, 0), step_g(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < f.scope().size()) step_f[i] = f_strides[i];
        for (std::size_t j = 0; j < g.scope().size(); ++j) {
            if (g.scope()[j] == scope[i]) step_g[i] = g_strides[j];
        }
    }

    const std::size_t total = product_of(cards);
    std::vector<double> out(total);
    std::vector<std::size_t> assignment(n, 0);
    std::size_t fi = 0;
    std::size_t gi = 0;
    const auto& fv = f.values();
    const auto& gv = g.values();
    for (std::size_t k = 0; k < total; ++k) {
        out[k] = fv[fi] * gv[gi];
        for (std::size_t i = n; i-- > 0;) {
            if (++assignment[i] < cards[i]) {
                fi += step_f[i];
                gi += step_g[i];
                break;
            }
            fi -= step_f[i] * (cards[i] - 1);
            gi -= step_g[i] * (cards[i] - 1);
            assignment[i] = 0;
        }
    }
    return Factor(std::move(scope), std::move(cards), std::move(out));
}

namespace {

// Shared walk for marginalize/reduce: visits every input entry with the output
// index it maps to once `pos` is dropped from the scope.
template <typename Visit>
Factor drop_variable(const Factor& f, std::size_t pos, Visit&& visit) {
    std::vector<std::string> scope = f.scope();
    std::vector<std::size_t> cards = f.cards();
    scope.erase(scope.begin() + static_cast<std::ptrdiff_t>(pos));
    cards.erase(cards.begin() + static_cast<std::ptrdiff_t>(pos));

    const std::size_t inner = strides_of(f.cards())[pos];
    const std::size_t card = f.cards()[pos];
    const std::size_t outer = f.size() / (inner * card);
    std::vector<double> out(outer * inner, 0.0);
    const auto& in = f.values();
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t s = 0; s < card; ++s) {
            const std::size_t base = (o * card + s) * inner;
            for (std::size_t i = 0; i < inner; ++i) {
                visit(out[o * inner + i], s, in[base + i]);
            }
        }
    }
    return Factor(std::move(scope), std::move(cards), std::move(out));
}

}  // namespace

Factor factor_marginalize(const Factor& f, std::string_view var) {
    return drop_variable(f, f.position(var), [](double& acc, std::size_t, double v) { acc += v; });
}

Factor factor_reduce(const Factor& f, std::string_view var, std::size_t state) {
    const std::size_t pos = f.position(var);
    if (state >= f.cards()[pos]) {
        throw FactorError("state " + std::to_string(state) + " out of range for '" + std::string(var) + "'");
    }
    return drop_variable(f, pos, [state](double& acc, std::size_t s, double v) {
        if (s == state) acc = v;
    });
}

Factor factor_normalize(const Factor& f) {
    const double mass = f.sum();
    if (!(mass > 0.0)) {
        throw FactorError("cannot normalize a factor with zero mass");
    }
    std::vector<double> values = f.values();
    for (double& v : values) v /= mass;
    return Factor(f.scope(), f.cards(), std::move(values));
}

}  // namespace symptomnet
