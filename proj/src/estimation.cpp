#include "symptomnet/estimation.hpp"

#include <cmath>
#include <map>

namespace symptomnet {

namespace {

struct EncodedData {
    std::map<std::string, std::vector<int>> codes;
    std::size_t rows = 0;
};

EncodedData encode(const NetworkSpec& spec, const DatasetTable& data) {
    const auto report = validate_structure(spec);
    if (!report.ok()) throw EstimationError("invalid network structure: " + report.summary());

    EncodedData enc;
    enc.rows = data.rows();
    for (const auto& node : spec.nodes) {
        // A table without rows carries no counts, so absent columns are harmless.
        if (!data.has(node.name) && data.rows() == 0) {
            enc.codes.emplace(node.name, std::vector<int>{});
            continue;
        }
        if (!data.has(node.name)) throw EstimationError("missing column '" + node.name + "'");
        if (data.is_numeric(node.name)) {
            throw EstimationError("column '" + node.name + "' must hold state labels, found numbers");
        }
        std::vector<int> codes;
        try {
            codes = data.codes_in(node.name, node.states);
        } catch (const DatasetError& e) {
            throw EstimationError(e.what());
        }
        for (std::size_t r = 0; r < codes.size(); ++r) {
            if (codes[r] == DiscreteColumn::kMissing) {
                throw EstimationError("row " + std::to_string(r) + " has no value for node '" + node.name +
                                      "'; all network nodes must be observed");
            }
        }
        enc.codes.emplace(node.name, std::move(codes));
    }
    return enc;
}

std::size_t configurations(const NetworkSpec& spec, const std::vector<std::string>& parents) {
    std::size_t n = 1;
    for (const auto& p : parents) n *= spec.node(p).cardinality();
    return n;
}

std::vector<double> counts_for(const NetworkSpec& spec, const EncodedData& enc, const NodeSpec& node,
                               const std::vector<std::string>& parents) {
    const std::size_t columns = configurations(spec, parents);
    std::vector<double> counts(node.cardinality() * columns, 0.0);
    const auto& child_codes = enc.codes.at(node.name);
    std::vector<const std::vector<int>*> parent_codes;
    std::vector<std::size_t> parent_cards;
    for (const auto& p : parents) {
        parent_codes.push_back(&enc.codes.at(p));
        parent_cards.push_back(spec.node(p).cardinality());
    }
    for (std::size_t r = 0; r < enc.rows; ++r) {
        std::size_t config = 0;
        for (std::size_t k = 0; k < parents.size(); ++k) {
            config = config * parent_cards[k] + static_cast<std::size_t>((*parent_codes[k])[r]);
        }
        counts[static_cast<std::size_t>(child_codes[r]) * columns + config] += 1.0;
    }
    return counts;
}

std::string describe_config(const NetworkSpec& spec, const std::vector<std::string>& parents, std::size_t config) {
    std::vector<std::string> parts(parents.size());
    for (std::size_t k = parents.size(); k-- > 0;) {
        const auto& node = spec.node(parents[k]);
        parts[k] = parents[k] + "=" + node.states[config % node.cardinality()];
        config /= node.cardinality();
    }
    std::string out;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (k) out += ", ";
        out += parts[k];
    }
    return out.empty() ? "(no parents)" : out;
}

}  // namespace

double bdeu_pseudo_count(double ess, std::size_t child_cardinality, std::size_t parent_configurations) {
    return ess / (static_cast<double>(child_cardinality) * static_cast<double>(parent_configurations));
}

std::vector<double> count_configurations(const NetworkSpec& spec, const DatasetTable& data, const std::string& node) {
    const auto enc = encode(spec, data);
    return counts_for(spec, enc, spec.node(node), spec.parents_of(node));
}

std::vector<TabularCPD> fit_bdeu(const NetworkSpec& spec, const DatasetTable& data, EssConfig ess) {
    if (!(ess.equivalent_sample_size > 0.0) || !std::isfinite(ess.equivalent_sample_size)) {
        throw EstimationError("equivalent sample size must be a positive finite number");
    }
    const auto enc = encode(spec, data);
    std::vector<TabularCPD> out;
    out.reserve(spec.nodes.size());
    for (const auto& node : spec.nodes) {
        const auto parents = spec.parents_of(node.name);
        const std::size_t columns = configurations(spec, parents);
        const std::size_t card = node.cardinality();
        const double pseudo = bdeu_pseudo_count(ess.equivalent_sample_size, card, columns);
        std::vector<double> cells = counts_for(spec, enc, node, parents);
        for (double& c : cells) c += pseudo;
        for (std::size_t col = 0; col < columns; ++col) {
            double total = 0.0;
            for (std::size_t s = 0; s < card; ++s) total += cells[s * columns + col];
            for (std::size_t s = 0; s < card; ++s) cells[s * columns + col] /= total;
        }
        out.push_back({node.name, parents, card, std::move(cells)});
    }
    return out;
}

std::vector<TabularCPD> fit_mle(const NetworkSpec& spec, const DatasetTable& data) {
    const auto enc = encode(spec, data);
    std::vector<TabularCPD> out;
    out.reserve(spec.nodes.size());
    for (const auto& node : spec.nodes) {
        const auto parents = spec.parents_of(node.name);
        const std::size_t columns = configurations(spec, parents);
        const std::size_t card = node.cardinality();
        std::vector<double> cells = counts_for(spec, enc, node, parents);
        for (std::size_t col = 0; col < columns; ++col) {
            double total = 0.0;
            for (std::size_t s = 0; s < card; ++s) total += cells[s * columns + col];
            if (total == 0.0) {
                throw EstimationError("node '" + node.name + "': parent configuration " +
                                      describe_config(spec, parents, col) + " never observed");
            }
            for (std::size_t s = 0; s < card; ++s) cells[s * columns + col] /= total;
        }
        out.push_back({node.name, parents, card, std::move(cells)});
    }
    return out;
}

}  // namespace symptomnet
