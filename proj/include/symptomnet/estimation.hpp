#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "symptomnet/dataset.hpp"
#include "symptomnet/network.hpp"

namespace symptomnet {

class EstimationError : public std::invalid_argument {
public:
    explicit EstimationError(const std::string& what) : std::invalid_argument(what) {}
};

struct EssConfig {
    double equivalent_sample_size = 8000.0;
};

// BDeu pseudo count added to every (child state, parent configuration) cell.
double bdeu_pseudo_count(double ess, std::size_t child_cardinality, std::size_t parent_configurations);

// Observed counts for one node, laid out like TabularCPD::values.
std::vector<double> count_configurations(const NetworkSpec& spec, const DatasetTable& data,
                                         const std::string& node);

// Every network node must be a discrete column whose labels are node states.
// Rows with a missing network-node value are rejected with an error.
std::vector<TabularCPD> fit_bdeu(const NetworkSpec& spec, const DatasetTable& data, EssConfig ess);

// Maximum likelihood; throws if some parent configuration never occurs.
std::vector<TabularCPD> fit_mle(const NetworkSpec& spec, const DatasetTable& data);

}  // namespace symptomnet
