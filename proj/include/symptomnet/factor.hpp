#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace symptomnet {

class FactorError : public std::invalid_argument {
public:
    explicit FactorError(const std::string& what) : std::invalid_argument(what) {}
};

// Nonnegative table over an ordered set of discrete variables. Values are
// row-major: the first scope variable varies slowest.
class Factor {
public:
    Factor() : values_{1.0} {}
    Factor(std::vector<std::string> scope, std::vector<std::size_t> cards, std::vector<double> values);

    const std::vector<std::string>& scope() const { return scope_; }
    const std::vector<std::size_t>& cards() const { return cards_; }
    const std::vector<double>& values() const { return values_; }

    std::size_t size() const { return values_.size(); }
    bool contains(std::string_view var) const;
    // Position of `var` in the scope; throws FactorError when absent.
    std::size_t position(std::string_view var) const;
    std::size_t cardinality(std::string_view var) const { return cards_[position(var)]; }

    double at(std::span<const std::size_t> assignment) const;
    double sum() const;

    // Value lookup keyed by the variables of another ordering. `order` must be a
    // permutation of the scope; used to compare factors after alignment.
    Factor reordered(const std::vector<std::string>& order) const;

private:
    std::vector<std::string> scope_;
    std::vector<std::size_t> cards_;
    std::vector<double> values_;
};

Factor factor_product(const Factor& f, const Factor& g);
Factor factor_marginalize(const Factor& f, std::string_view var);
Factor factor_reduce(const Factor& f, std::string_view var, std::size_t state);
// Divides by the total mass; throws FactorError if the mass is zero.
Factor factor_normalize(const Factor& f);

}  // namespace symptomnet
