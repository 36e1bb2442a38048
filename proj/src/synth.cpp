#include "symptomnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "symptomnet/targets.hpp"

namespace symptomnet {

namespace {

std::size_t draw_categorical(const TabularCPD& cpd, std::size_t config, double u) {
    double acc = 0.0;
    for (std::size_t s = 0; s + 1 < cpd.child_cardinality; ++s) {
        acc += cpd.at(s, config);
        if (u < acc) return s;
    }
    return cpd.child_cardinality - 1;
}

std::size_t draw_index(const std::vector<double>& probs, double u) {
    double acc = 0.0;
    for (std::size_t s = 0; s + 1 < probs.size(); ++s) {
        acc += probs[s];
        if (u < acc) return s;
    }
    return probs.size() - 1;
}

bool in_open_unit(double v) { return v > 0.0 && v < 1.0; }
bool in_closed_unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

DatasetTable forward_sample(const BayesianNetwork& network, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto& nodes = network.spec().nodes;
    std::vector<std::vector<int>> codes(nodes.size(), std::vector<int>(n));

    std::vector<std::size_t> order;
    for (const auto& name : network.order()) order.push_back(network.index_of(name));
    std::vector<std::vector<std::size_t>> parent_idx(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (const auto& p : network.cpds()[i].parents) parent_idx[i].push_back(network.index_of(p));
    }

    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i : order) {
            std::size_t config = 0;
            for (std::size_t p : parent_idx[i]) {
                config = config * nodes[p].cardinality() + static_cast<std::size_t>(codes[p][r]);
            }
            codes[i][r] = static_cast<int>(draw_categorical(network.cpds()[i], config, unit(rng)));
        }
    }

    DatasetTable table;
    for (std::size_t i = 0; i < nodes.size(); ++i) table.add_discrete(nodes[i].name, nodes[i].states, std::move(codes[i]));
    return table;
}

double surrogate_score(double class_position, double target_auc, Rng& rng) {
    if (!(target_auc > 0.5 && target_auc < 1.0)) throw GeneratorError("surrogate target AUC must lie in (0.5, 1)");
    static const boost::math::normal_distribution<double> standard;
    const double separation = std::sqrt(2.0) * boost::math::quantile(standard, target_auc);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double latent = noise(rng) + separation * (class_position - 0.5);
    return 1.0 / (1.0 + std::exp(-latent));
}

double surrogate_score(bool symptom_present, double target_auc, Rng& rng) {
    return surrogate_score(symptom_present ? 1.0 : 0.0, target_auc, rng);
}

GeneratorConfig GeneratorConfig::defaults(const ModelLayout& layout) {
    GeneratorConfig c;
    for (const auto& s : layout.surrogates) c.surrogate_auc[s.node] = s.target_auc;
    c.groups = {
        {"age_group", {"<35", ">=35"}, {0.5, 0.5}},
        {"sex", {"female", "male"}, {0.65, 0.35}},
        {"device", {"laptop", "smartphone"}, {0.6, 0.4}},
    };
    c.splits = {{"development", 2.0 / 3.0}, {"calibration", 1.0 / 6.0}, {"test", 1.0 / 6.0}};
    return c;
}

void GeneratorConfig::validate(const ModelLayout& layout) const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw GeneratorError("generator config '" + field + "': " + why);
    };
    if (!in_closed_unit(depression_prevalence)) fail("depression_prevalence", "must lie in [0, 1]");
    if (!in_closed_unit(anxiety_prevalence)) fail("anxiety_prevalence", "must lie in [0, 1]");
    if (!in_closed_unit(anxiety_given_depression)) fail("anxiety_given_depression", "must lie in [0, 1]");
    if (!in_closed_unit(diagnosis_noise)) fail("diagnosis_noise", "must lie in [0, 1]");
    if (!in_closed_unit(surrogate_leak)) fail("surrogate_leak", "must lie in [0, 1]");
    if (!std::isfinite(symptom_sharpness)) fail("symptom_sharpness", "must be finite");
    for (const auto& [name, v] : symptom_sharpness_overrides) {
        if (!std::isfinite(v)) fail("symptom_sharpness_overrides." + name, "must be finite");
    }
    if (severity_cutpoints.size() != 3 || !std::is_sorted(severity_cutpoints.begin(), severity_cutpoints.end())) {
        fail("severity_cutpoints", "need three non-decreasing cut points");
    }

    const double both = anxiety_given_depression * depression_prevalence;
    const double lower = std::max(0.0, depression_prevalence + anxiety_prevalence - 1.0);
    const double upper = std::min(depression_prevalence, anxiety_prevalence);
    if (both < lower - 1e-12 || both > upper + 1e-12) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "joint prevalence %.4f outside Frechet bounds [%.4f, %.4f]", both, lower,
                      upper);
        fail("anxiety_given_depression", buf);
    }

    for (const auto& s : layout.surrogates) {
        auto it = surrogate_auc.find(s.node);
        if (it == surrogate_auc.end()) fail("surrogate_auc." + s.node, "missing target");
        if (!in_open_unit(2.0 * (it->second - 0.5))) fail("surrogate_auc." + s.node, "must lie in (0.5, 1)");
    }
    for (const auto& g : groups) {
        if (g.levels.empty() || g.levels.size() != g.fractions.size()) {
            fail("groups." + g.column, "levels and fractions must be nonempty and equally long");
        }
        double total = 0.0;
        for (double f : g.fractions) {
            if (!in_closed_unit(f)) fail("groups." + g.column, "fractions must lie in [0, 1]");
            total += f;
        }
        if (std::fabs(total - 1.0) > 1e-9) fail("groups." + g.column, "fractions must sum to 1");
    }
    if (splits.empty()) fail("splits", "need at least one split");
    double total = 0.0;
    for (const auto& s : splits) {
        if (!in_closed_unit(s.fraction)) fail("splits." + s.name, "fraction must lie in [0, 1]");
        total += s.fraction;
    }
    if (std::fabs(total - 1.0) > 1e-9) fail("splits", "fractions must sum to 1");
}

std::string target_column(std::string_view condition) {
    std::string out(condition);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out + "_target";
}

std::string total_column(std::string_view condition) {
    if (condition == kDepression) return kPhq8Column;
    if (condition == kAnxiety) return kGad7Column;
    std::string out(condition);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out + "_total";
}

std::vector<std::string> cohort_columns(const GeneratorConfig& config, const ModelLayout& layout) {
    std::vector<std::string> cols{kUserIdColumn};
    for (const auto& g : config.groups) cols.push_back(g.column);
    cols.push_back(kDiagnosisColumn);
    for (const auto& c : layout.condition_names()) cols.push_back(c);
    for (const auto& c : layout.condition_names()) cols.push_back(target_column(c));
    for (const auto& c : layout.condition_names()) cols.push_back(total_column(c));
    for (const auto& s : layout.symptoms()) cols.push_back(s);
    for (const auto& s : layout.surrogates) cols.push_back(score_column(s.node));
    return cols;
}

DatasetTable sample_cohort(const GeneratorConfig& config, const ModelLayout& layout) {
    config.validate(layout);
    if (layout.conditions.size() != 2) throw GeneratorError("cohort generator expects exactly two conditions");

    const std::size_t n = config.n;
    Rng rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double pd = config.depression_prevalence;
    const double pa = config.anxiety_prevalence;
    const double p11 = config.anxiety_given_depression * pd;
    // Joint over (first condition, second condition): 00, 01, 10, 11.
    const std::vector<double> joint{std::max(0.0, 1.0 - pd - pa + p11), std::max(0.0, pa - p11),
                                    std::max(0.0, pd - p11), p11};

    const auto symptoms = layout.symptoms();
    std::vector<std::size_t> symptom_condition(symptoms.size());
    std::vector<double> sharpness(symptoms.size());
    for (std::size_t k = 0; k < symptoms.size(); ++k) {
        const auto* group = layout.condition_of(symptoms[k]);
        symptom_condition[k] = group == &layout.conditions[0] ? 0 : 1;
        auto it = config.symptom_sharpness_overrides.find(symptoms[k]);
        sharpness[k] = it == config.symptom_sharpness_overrides.end() ? config.symptom_sharpness : it->second;
    }
    std::vector<std::size_t> surrogate_symptom(layout.surrogates.size());
    for (std::size_t j = 0; j < layout.surrogates.size(); ++j) {
        surrogate_symptom[j] = static_cast<std::size_t>(
            std::find(symptoms.begin(), symptoms.end(), layout.surrogates[j].symptom) - symptoms.begin());
    }

    std::vector<std::vector<int>> group_codes(config.groups.size(), std::vector<int>(n));
    std::vector<int> diagnosis(n);
    std::vector<std::vector<int>> condition(2, std::vector<int>(n));
    std::vector<std::vector<int>> target(2, std::vector<int>(n));
    std::vector<std::vector<double>> totals(2, std::vector<double>(n));
    std::vector<std::vector<int>> severity(symptoms.size(), std::vector<int>(n));
    std::vector<std::vector<double>> scores(layout.surrogates.size(), std::vector<double>(n));
    std::vector<std::string> user_ids(n);

    const int scale_max[2] = {static_cast<int>(layout.conditions[0].symptoms.size()) * 3,
                              static_cast<int>(layout.conditions[1].symptoms.size()) * 3};
    std::vector<double> present(symptoms.size());
    for (std::size_t r = 0; r < n; ++r) {
        char id[32];
        std::snprintf(id, sizeof(id), "u%07zu", r + 1);
        user_ids[r] = id;
        for (std::size_t g = 0; g < config.groups.size(); ++g) {
            group_codes[g][r] = static_cast<int>(draw_index(config.groups[g].fractions, unit(rng)));
        }
        const std::size_t cell = draw_index(joint, unit(rng));
        const int cond[2] = {static_cast<int>(cell >> 1), static_cast<int>(cell & 1)};
        condition[0][r] = cond[0];
        condition[1][r] = cond[1];

        const bool any_condition = cond[0] || cond[1];
        const bool flip = unit(rng) < config.diagnosis_noise;
        diagnosis[r] = (any_condition != flip) ? 1 : 0;

        int sum[2] = {0, 0};
        for (std::size_t k = 0; k < symptoms.size(); ++k) {
            const std::size_t c = symptom_condition[k];
            const double latent = gauss(rng) + (cond[c] ? sharpness[k] : 0.0);
            int level = 0;
            for (double cut : config.severity_cutpoints) level += latent > cut ? 1 : 0;
            severity[k][r] = level;
            present[k] = level >= 2 ? 1.0 : 0.0;
            sum[c] += level;
        }
        for (std::size_t c = 0; c < 2; ++c) {
            totals[c][r] = sum[c];
            target[c][r] = static_cast<int>(condition_target(sum[c], diagnosis[r] == 1, scale_max[c]));
        }

        for (std::size_t j = 0; j < layout.surrogates.size(); ++j) {
            const std::size_t k = surrogate_symptom[j];
            double position = present[k];
            if (config.surrogate_leak > 0.0) {
                double others = 0.0;
                std::size_t count = 0;
                for (std::size_t m = 0; m < symptoms.size(); ++m) {
                    if (m != k && symptom_condition[m] == symptom_condition[k]) {
                        others += present[m];
                        ++count;
                    }
                }
                if (count) position = (1.0 - config.surrogate_leak) * position + config.surrogate_leak * others / count;
            }
            scores[j][r] = surrogate_score(position, config.surrogate_auc.at(layout.surrogates[j].node), rng);
        }
    }

    // TargetLabel enumerators are Absent, Present, Undefined.
    const std::vector<std::string> target_domain{"absent", "present", "undefined"};
    DatasetTable table;
    table.add_labels(kUserIdColumn, user_ids, user_ids);
    for (std::size_t g = 0; g < config.groups.size(); ++g) {
        table.add_discrete(config.groups[g].column, config.groups[g].levels, std::move(group_codes[g]));
    }
    table.add_discrete(kDiagnosisColumn, {"no", "yes"}, std::move(diagnosis));
    const auto conditions = layout.condition_names();
    for (std::size_t c = 0; c < 2; ++c) table.add_discrete(conditions[c], kConditionStates, std::move(condition[c]));
    for (std::size_t c = 0; c < 2; ++c) table.add_discrete(target_column(conditions[c]), target_domain, std::move(target[c]));
    for (std::size_t c = 0; c < 2; ++c) table.add_numeric(total_column(conditions[c]), std::move(totals[c]));
    for (std::size_t k = 0; k < symptoms.size(); ++k) table.add_discrete(symptoms[k], kOrdinalStates, std::move(severity[k]));
    for (std::size_t j = 0; j < layout.surrogates.size(); ++j) {
        table.add_numeric(score_column(layout.surrogates[j].node), std::move(scores[j]));
    }
    return table;
}

Cohort split_cohort(const DatasetTable& table, const GeneratorConfig& config) {
    Cohort cohort;
    const std::size_t n = table.rows();
    std::size_t start = 0;
    for (std::size_t i = 0; i < config.splits.size(); ++i) {
        const bool last = i + 1 == config.splits.size();
        const std::size_t count =
            last ? n - start : std::min(n - start, static_cast<std::size_t>(std::floor(config.splits[i].fraction * n + 1e-9)));
        std::vector<std::size_t> rows(count);
        std::iota(rows.begin(), rows.end(), start);
        cohort.splits.emplace(config.splits[i].name, table.select_rows(rows));
        cohort.split_order.push_back(config.splits[i].name);
        start += count;
    }
    return cohort;
}

}  // namespace symptomnet
