#include "symptomnet/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "symptomnet/estimation.hpp"
#include "symptomnet/metrics.hpp"
#include "symptomnet/synth.hpp"
#include "symptomnet/targets.hpp"

namespace symptomnet {

namespace {

double expected_value(const std::vector<double>& p) {
    double e = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) e += static_cast<double>(k) * p[k];
    return e;
}

template <typename T>
std::vector<T> pick(const std::vector<T>& values, const std::vector<std::size_t>& rows) {
    std::vector<T> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(values.at(r));
    return out;
}

Json optional_auc(std::span<const double> scores, std::span<const int> labels) {
    const bool pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
    const bool neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
    if (!pos || !neg) return nullptr;
    return roc_auc(scores, labels);
}

// Binarized severity labels of a symptom column; missing cells excluded.
LabelColumn symptom_labels(const DatasetTable& data, const std::string& symptom) {
    const auto codes = data.codes_in(symptom, kOrdinalStates);
    LabelColumn out;
    for (std::size_t r = 0; r < codes.size(); ++r) {
        if (codes[r] == DiscreteColumn::kMissing) continue;
        out.rows.push_back(r);
        out.labels.push_back(binarize_symptom(codes[r]) ? 1 : 0);
    }
    return out;
}

std::vector<std::string> group_columns(const DatasetTable& data) {
    std::vector<std::string> out;
    for (const auto& g : GeneratorConfig::defaults().groups) {
        if (data.has(g.column) && !data.is_numeric(g.column)) out.push_back(g.column);
    }
    return out;
}

Json dsm_section(const DatasetTable& data, const std::string& condition, const std::vector<double>& scores,
                 const ModelLayout& layout) {
    const auto symptoms = layout.symptoms();
    if (symptoms.size() != 15) return nullptr;
    for (const auto& s : symptoms) {
        if (!data.has(s)) return nullptr;
    }
    std::vector<std::vector<int>> codes;
    for (const auto& s : symptoms) codes.push_back(data.codes_in(s, kOrdinalStates));
    std::vector<int> mdd, other, gad;
    std::vector<double> kept;
    for (std::size_t r = 0; r < data.rows(); ++r) {
        std::array<int, 8> dep{};
        std::array<int, 7> anx{};
        bool complete = true;
        for (std::size_t i = 0; i < 15; ++i) {
            const int c = codes[i][r];
            if (c == DiscreteColumn::kMissing) complete = false;
            if (i < 8) dep[i] = c; else anx[i - 8] = c;
        }
        if (!complete) continue;
        const auto t = dsm_targets(dep, anx);
        mdd.push_back(t.mdd ? 1 : 0);
        other.push_back(t.other_depression ? 1 : 0);
        gad.push_back(t.gad ? 1 : 0);
        kept.push_back(scores[r]);
    }
    Json out = Json::object();
    if (condition == kDepression) {
        out["mdd"] = optional_auc(kept, mdd);
        out["other_depression"] = optional_auc(kept, other);
    } else if (condition == kAnxiety) {
        out["gad"] = optional_auc(kept, gad);
    }
    return out;
}

}  // namespace

DatasetTable discretize_surrogates(const DatasetTable& data, const QuartileBinner& binners) {
    DatasetTable out = data;
    for (const auto& [node, bins] : binners) {
        const std::string raw = score_column(node);
        if (out.has(node) || !out.has(raw)) continue;
        const auto& values = out.numeric(raw).values;
        std::vector<int> codes(values.size(), DiscreteColumn::kMissing);
        for (std::size_t r = 0; r < values.size(); ++r) {
            if (std::isfinite(values[r])) codes[r] = static_cast<int>(apply_bins(values[r], bins));
        }
        out.add_discrete(node, kOrdinalStates, std::move(codes));
    }
    return out;
}

NetworkFile fit_network_file(const NetworkSpec& spec, const DatasetTable& data, EssConfig ess,
                             const ModelLayout& layout) {
    NetworkFile file;
    file.spec = spec;
    if (data.rows() > 0) {
        for (const auto& s : layout.surrogates) {
            const std::string raw = score_column(s.node);
            if (!spec.find(s.node) || data.has(s.node) || !data.has(raw)) continue;
            std::vector<double> finite;
            for (double v : data.numeric(raw).values) {
                if (std::isfinite(v)) finite.push_back(v);
            }
            try {
                file.binners.emplace(s.node, fit_quartile_bins(finite));
            } catch (const BinningError& e) {
                throw BinningError("column '" + raw + "': " + e.what());
            }
        }
    }
    file.cpds = fit_bdeu(spec, discretize_surrogates(data, file.binners), ess);
    return file;
}

EvidenceMap record_evidence(const DatasetTable& discretized, std::size_t row, const std::vector<std::string>& nodes,
                            const BayesianNetwork& network) {
    EvidenceMap ev;
    for (const auto& n : nodes) {
        if (!discretized.has(n)) continue;
        const auto& col = discretized.discrete(n);
        const int code = col.codes.at(row);
        if (code == DiscreteColumn::kMissing) continue;
        const auto& states = network.node(n).states;
        const auto it = std::find(states.begin(), states.end(), col.domain.at(code));
        if (it == states.end()) {
            throw DatasetError("column '" + n + "' row " + std::to_string(row) + ": unknown state '" +
                               col.domain.at(code) + "'");
        }
        ev.emplace(n, static_cast<std::size_t>(it - states.begin()));
    }
    return ev;
}

std::vector<std::string> evidence_nodes(const BayesianNetwork& network, const ModelLayout& layout,
                                        const std::optional<std::string>& family) {
    std::vector<std::string> out;
    for (const auto& s : layout.surrogates) {
        if (family && s.family != *family) continue;
        if (network.contains(s.node)) out.push_back(s.node);
    }
    return out;
}

ScoredRecords score_records(const BayesianNetwork& network, const DatasetTable& discretized,
                            const std::vector<std::string>& evidence, const ModelLayout& layout, bool with_symptoms) {
    const auto conditions = layout.condition_names();
    std::vector<std::string> query = conditions;
    if (with_symptoms) {
        for (const auto& s : layout.symptoms()) query.push_back(s);
    }
    ScoredRecords out;
    for (const auto& c : conditions) out.conditions[c].reserve(discretized.rows());
    for (std::size_t r = 0; r < discretized.rows(); ++r) {
        const auto ev = record_evidence(discretized, r, evidence, network);
        const auto marginals = marginals_with_observed(network, query, ev);
        for (const auto& c : conditions) out.conditions[c].push_back(marginals.at(c).at(1));
        if (!with_symptoms) continue;
        for (const auto& group : layout.conditions) {
            double total = 0.0;
            for (const auto& s : group.symptoms) {
                const auto& p = marginals.at(s);
                double present = 0.0;
                for (std::size_t k = 2; k < p.size(); ++k) present += p[k];
                out.symptom_presence[s].push_back(present);
                total += expected_value(p);
            }
            out.severity_totals[group.condition].push_back(total);
        }
    }
    return out;
}

LabelColumn condition_labels(const DatasetTable& data, const std::string& column) {
    const auto& col = data.discrete(column);
    LabelColumn out;
    for (std::size_t r = 0; r < col.codes.size(); ++r) {
        const int code = col.codes[r];
        if (code == DiscreteColumn::kMissing) continue;
        const std::string& label = col.domain.at(code);
        if (label == "present" || label == "yes" || label == "1") {
            out.labels.push_back(1);
        } else if (label == "absent" || label == "no" || label == "0") {
            out.labels.push_back(0);
        } else if (label == to_string(TargetLabel::Undefined)) {
            continue;
        } else {
            throw DatasetError("column '" + column + "' row " + std::to_string(r) + ": '" + label +
                               "' is not a binary label");
        }
        out.rows.push_back(r);
    }
    return out;
}

CalibratorSet fit_calibrators(const std::map<std::string, std::vector<double>>& scores,
                              const std::map<std::string, std::vector<int>>& labels, CalibratorOptions options) {
    CalibratorSet out;
    for (const auto& [condition, s] : scores) {
        const auto it = labels.find(condition);
        if (it == labels.end()) throw CalibrationError("no labels for '" + condition + "'");
        try {
            out.emplace(condition, fit_calibrator(s, it->second, options));
        } catch (const CalibrationError& e) {
            throw CalibrationError("calibrator for '" + condition + "': " + e.what());
        }
    }
    return out;
}

Json evaluate_report(const NetworkFile& model, const CalibratorSet& calibrators, const DatasetTable& data,
                     EvaluateOptions options, const ModelLayout& layout) {
    const BayesianNetwork network = BayesianNetwork::create(model.spec, model.cpds);
    const DatasetTable table = discretize_surrogates(data, model.binners);
    const auto full = evidence_nodes(network, layout);
    const ScoredRecords scored = score_records(network, table, full, layout, true);
    const auto groups = group_columns(table);

    Json report{{"n", table.rows()}, {"threshold", options.threshold}, {"bins", options.bins}};

    Json conditions = Json::object();
    for (const auto& condition : layout.condition_names()) {
        Json section = Json::object();
        const auto& raw = scored.conditions.at(condition);
        std::vector<double> calibrated;
        const auto cal = calibrators.find(condition);
        if (cal != calibrators.end()) {
            for (double p : raw) calibrated.push_back(calibrate(cal->second, p));
        }
        const auto& final_scores = calibrated.empty() ? raw : calibrated;

        if (table.has(condition)) {
            const auto lab = condition_labels(table, condition);
            const auto u = pick(raw, lab.rows);
            section["uncalibrated"] = to_json(metrics_report(u, lab.labels, options.bins));
            if (!calibrated.empty()) {
                const auto c = pick(calibrated, lab.rows);
                section["calibrated"] = to_json(metrics_report(c, lab.labels, options.bins));
            }
            const auto f = pick(final_scores, lab.rows);
            section["prevalence_metrics"] = to_json(prevalence_metrics(f, lab.labels, options.threshold));
            Json fairness = Json::object();
            for (const auto& g : groups) {
                std::vector<std::string> levels;
                const auto& col = table.discrete(g);
                for (auto r : lab.rows) {
                    const int code = col.codes[r];
                    levels.push_back(code == DiscreteColumn::kMissing ? std::string() : col.domain.at(code));
                }
                try {
                    fairness[g] = to_json(fairness_report(f, lab.labels, levels, options.threshold, options.bins));
                } catch (const MetricError& e) {
                    fairness[g] = Json{{"error", e.what()}};
                }
            }
            section["fairness"] = std::move(fairness);
        }
        const std::string target = target_column(condition);
        if (table.has(target)) {
            const auto lab = condition_labels(table, target);
            const auto f = pick(final_scores, lab.rows);
            section["target_definition"] = Json{{"n", lab.rows.size()}, {"roc_auc", optional_auc(f, lab.labels)}};
        }
        const std::string total = total_column(condition);
        if (table.has(total) && table.is_numeric(total)) {
            const auto& totals = table.numeric(total).values;
            std::vector<double> x, y;
            const auto& expected = scored.severity_totals.at(condition);
            for (std::size_t r = 0; r < totals.size(); ++r) {
                if (!std::isfinite(totals[r])) continue;
                x.push_back(expected[r]);
                y.push_back(totals[r]);
            }
            Json sev{{"n", x.size()}};
            try {
                sev["pearson_r"] = pearson_r(x, y);
            } catch (const MetricError&) {
                sev["pearson_r"] = nullptr;
            }
            section["severity"] = std::move(sev);
        }
        if (Json dsm = dsm_section(table, condition, final_scores, layout); !dsm.is_null()) {
            section["dsm_targets"] = std::move(dsm);
        }
        conditions[condition] = std::move(section);
    }

    if (options.single_family) {
        Json by_family = Json::object();
        for (const auto& family : layout.families()) {
            const auto nodes = evidence_nodes(network, layout, family);
            if (nodes.empty()) continue;
            const ScoredRecords partial = score_records(network, table, nodes, layout, false);
            Json entry = Json::object();
            for (const auto& condition : layout.condition_names()) {
                if (!table.has(condition)) continue;
                const auto lab = condition_labels(table, condition);
                entry[condition] = optional_auc(pick(partial.conditions.at(condition), lab.rows), lab.labels);
            }
            by_family[family] = std::move(entry);
        }
        Json all = Json::object();
        for (const auto& condition : layout.condition_names()) {
            if (!table.has(condition)) continue;
            const auto lab = condition_labels(table, condition);
            all[condition] = optional_auc(pick(scored.conditions.at(condition), lab.rows), lab.labels);
        }
        report["single_family"] = Json{{"all", std::move(all)}, {"families", std::move(by_family)}};
    }

    Json symptoms = Json::object();
    for (const auto& symptom : layout.symptoms()) {
        if (!table.has(symptom)) continue;
        const auto lab = symptom_labels(table, symptom);
        Json entry{{"n", lab.rows.size()},
                   {"roc_auc", optional_auc(pick(scored.symptom_presence.at(symptom), lab.rows), lab.labels)}};
        Json surrogates = Json::object();
        Json best = nullptr;
        for (const auto& node : layout.surrogates_of(symptom)) {
            const std::string raw = score_column(node);
            if (!table.has(raw)) continue;
            const auto& values = table.numeric(raw).values;
            std::vector<double> s;
            std::vector<int> l;
            for (std::size_t i = 0; i < lab.rows.size(); ++i) {
                const double v = values[lab.rows[i]];
                if (!std::isfinite(v)) continue;
                s.push_back(v);
                l.push_back(lab.labels[i]);
            }
            Json auc = optional_auc(s, l);
            if (!auc.is_null() && (best.is_null() || auc.get<double>() > best.get<double>())) best = auc;
            surrogates[node] = std::move(auc);
        }
        entry["surrogate_auc"] = std::move(surrogates);
        entry["best_surrogate_auc"] = std::move(best);
        symptoms[symptom] = std::move(entry);
    }

    const auto names = layout.condition_names();
    Json comorbidity = Json::object();
    if (names.size() == 2) {
        for (std::size_t i = 0; i < 2; ++i) {
            const auto& given = names[i];
            const auto& other = names[1 - i];
            const auto m = marginals_with_observed(network, {other}, EvidenceMap{{given, 1}});
            comorbidity["P(" + other + "|" + given + ")"] = m.at(other).at(1);
        }
    }

    report["conditions"] = std::move(conditions);
    report["symptoms"] = std::move(symptoms);
    report["comorbidity"] = std::move(comorbidity);
    return report;
}

std::string calibration_curve_csv(const Json& report) {
    std::ostringstream os;
    os << "condition,stage,bin,mean_score,positive_rate,count\n";
    for (const auto& [condition, section] : report.at("conditions").items()) {
        for (const char* stage : {"uncalibrated", "calibrated"}) {
            if (!section.contains(stage)) continue;
            for (const auto& b : section.at(stage).at("calibration_curve")) {
                os << condition << ',' << stage << ',' << b.at("bin").get<std::size_t>() << ','
                   << format_number(b.at("mean_score").get<double>()) << ','
                   << format_number(b.at("positive_rate").get<double>()) << ','
                   << b.at("count").get<std::size_t>() << '\n';
            }
        }
    }
    return os.str();
}

namespace {

Json state_names(const BayesianNetwork& network, const EvidenceMap& ev) {
    Json out = Json::object();
    for (const auto& [node, state] : ev) out[node] = network.node(node).states.at(state);
    return out;
}

}  // namespace

std::size_t parse_state(const BayesianNetwork& network, const std::string& node, const Json& value) {
    if (!network.contains(node)) throw InvalidQuery(node, "unknown node '" + node + "'");
    const auto& states = network.node(node).states;
    if (value.is_number_integer()) {
        const auto idx = value.get<std::int64_t>();
        if (idx < 0 || static_cast<std::size_t>(idx) >= states.size()) {
            throw InvalidQuery(node, "state " + std::to_string(idx) + " out of range for node '" + node + "'");
        }
        return static_cast<std::size_t>(idx);
    }
    if (value.is_string()) {
        const auto label = value.get<std::string>();
        const auto it = std::find(states.begin(), states.end(), label);
        if (it == states.end()) throw InvalidQuery(node, "node '" + node + "' has no state '" + label + "'");
        return static_cast<std::size_t>(it - states.begin());
    }
    throw InvalidQuery(node, "state for node '" + node + "' must be an index or a label");
}

QueryRequest parse_query(const Json& json, const BayesianNetwork& network) {
    if (!json.is_object()) throw FormatError("query must be a JSON object");
    QueryRequest request;
    if (json.contains("evidence")) {
        const auto& ev = json.at("evidence");
        if (!ev.is_object()) throw FormatError("'evidence' must be an object of node: state");
        for (const auto& [node, value] : ev.items()) request.evidence[node] = parse_state(network, node, value);
    }
    if (json.contains("interventions")) {
        for (const auto& n : json.at("interventions")) {
            if (!n.is_string()) throw FormatError("'interventions' must be a list of node names");
            const auto node = n.get<std::string>();
            if (!network.contains(node)) throw InvalidQuery(node, "unknown node '" + node + "'");
            request.interventions.insert(node);
        }
    }
    if (json.contains("query")) {
        for (const auto& n : json.at("query")) {
            if (!n.is_string()) throw FormatError("'query' must be a list of node names");
            const auto node = n.get<std::string>();
            if (!network.contains(node)) throw InvalidQuery(node, "unknown node '" + node + "'");
            request.query.push_back(node);
        }
    }
    return request;
}

Json run_query(const BayesianNetwork& network, const CalibratorSet* calibrators, const QueryRequest& request,
               const ModelLayout& layout) {
    const BayesianNetwork mutilated = apply_do(network, request.interventions);
    EvidenceMap used, ignored;
    for (const auto& [node, state] : request.evidence) {
        (mutilated.marks().detached.count(node) ? ignored : used).emplace(node, state);
    }
    std::vector<std::string> nodes = layout.condition_names();
    for (const auto& s : layout.symptoms()) nodes.push_back(s);
    for (const auto& q : request.query) {
        if (std::find(nodes.begin(), nodes.end(), q) == nodes.end()) nodes.push_back(q);
    }
    const auto marginals = marginals_with_observed(mutilated, nodes, request.evidence);

    Json posteriors = Json::object();
    for (const auto& n : nodes) posteriors[n] = marginals.at(n);

    Json severity = Json::object();
    Json totals = Json::object();
    for (const auto& group : layout.conditions) {
        double total = 0.0;
        for (const auto& s : group.symptoms) {
            const double e = expected_value(marginals.at(s));
            severity[s] = e;
            total += e;
        }
        totals[group.condition] = total;
    }

    Json conditions = Json::object();
    for (const auto& c : layout.condition_names()) {
        const double raw = marginals.at(c).at(1);
        Json entry{{"raw", raw}, {"calibrated", nullptr}};
        if (calibrators) {
            const auto it = calibrators->find(c);
            if (it != calibrators->end()) entry["calibrated"] = calibrate(it->second, raw);
        }
        conditions[c] = std::move(entry);
    }

    Json contributions = Json::object();
    for (const auto& [c, per_symptom] : symptom_contributions(network, request.evidence, request.interventions, layout)) {
        Json entry = Json::object();
        for (const auto& [s, delta] : per_symptom) entry[s] = delta;
        contributions[c] = std::move(entry);
    }

    Json isolated = Json::array();
    for (const auto& n : request.interventions) isolated.push_back(n);
    Json detached = Json::array();
    for (const auto& n : mutilated.marks().detached) detached.push_back(n);

    return Json{{"evidence", state_names(network, used)},
                {"ignored_evidence", state_names(network, ignored)},
                {"interventions", std::move(isolated)},
                {"detached", std::move(detached)},
                {"conditions", std::move(conditions)},
                {"posteriors", std::move(posteriors)},
                {"expected_severity", Json{{"symptoms", std::move(severity)}, {"conditions", std::move(totals)}}},
                {"contributions", std::move(contributions)}};
}

}  // namespace symptomnet
