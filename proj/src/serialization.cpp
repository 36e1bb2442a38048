#include "symptomnet/serialization.hpp"

#include <fstream>
#include <sstream>

namespace symptomnet {

namespace {

template <typename T>
T field(const Json& json, const char* key) {
    if (!json.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    try {
        return json.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

template <typename T>
void optional_field(const Json& json, const char* key, T& out) {
    if (json.contains(key)) out = field<T>(json, key);
}

}  // namespace

Json binner_to_json(const QuartileBinner& binner) {
    Json out = Json::object();
    for (const auto& [node, bins] : binner) {
        out[node] = Json{{"bounds", {bins.b1, bins.b2, bins.b3}}, {"degenerate", bins.degenerate}};
    }
    return out;
}

QuartileBinner binner_from_json(const Json& json) {
    if (!json.is_object()) throw FormatError("binners must be an object");
    QuartileBinner out;
    for (const auto& [node, entry] : json.items()) {
        const auto bounds = field<std::vector<double>>(entry, "bounds");
        if (bounds.size() != 3 || bounds[0] > bounds[1] || bounds[1] > bounds[2]) {
            throw FormatError("binner '" + node + "' needs three non-decreasing bounds");
        }
        QuartileBins bins{bounds[0], bounds[1], bounds[2], false};
        optional_field(entry, "degenerate", bins.degenerate);
        out.emplace(node, bins);
    }
    return out;
}

Json network_to_json(const NetworkFile& file) {
    Json nodes = Json::array();
    for (const auto& n : file.spec.nodes) nodes.push_back(Json{{"name", n.name}, {"states", n.states}});
    Json edges = Json::array();
    for (const auto& [p, c] : file.spec.edges) edges.push_back(Json::array({p, c}));
    Json cpds = Json::array();
    for (const auto& cpd : file.cpds) {
        Json table = Json::array();
        const std::size_t cols = cpd.column_count();
        for (std::size_t s = 0; s < cpd.child_cardinality; ++s) {
            Json row = Json::array();
            for (std::size_t c = 0; c < cols; ++c) row.push_back(cpd.at(s, c));
            table.push_back(std::move(row));
        }
        cpds.push_back(Json{{"child", cpd.child}, {"parents", cpd.parents}, {"table", std::move(table)}});
    }
    Json out{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"cpds", std::move(cpds)}};
    if (!file.binners.empty()) out["binners"] = binner_to_json(file.binners);
    return out;
}

NetworkFile network_from_json(const Json& json) {
    if (!json.is_object()) throw FormatError("network file must be a JSON object");
    NetworkFile file;
    for (const auto& n : field<Json>(json, "nodes")) {
        file.spec.nodes.push_back({field<std::string>(n, "name"), field<std::vector<std::string>>(n, "states")});
    }
    for (const auto& e : field<Json>(json, "edges")) {
        if (!e.is_array() || e.size() != 2) throw FormatError("each edge must be a [parent, child] pair");
        file.spec.edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    if (json.contains("cpds")) {
        for (const auto& c : json.at("cpds")) {
            TabularCPD cpd;
            cpd.child = field<std::string>(c, "child");
            cpd.parents = field<std::vector<std::string>>(c, "parents");
            const auto rows = field<std::vector<std::vector<double>>>(c, "table");
            cpd.child_cardinality = rows.size();
            for (const auto& row : rows) {
                if (row.size() != rows.front().size()) {
                    throw FormatError("CPD table for '" + cpd.child + "' has ragged rows");
                }
                cpd.values.insert(cpd.values.end(), row.begin(), row.end());
            }
            file.cpds.push_back(std::move(cpd));
        }
    }
    if (json.contains("binners")) file.binners = binner_from_json(json.at("binners"));
    return file;
}

Json calibrators_to_json(const CalibratorSet& calibrators) {
    Json out = Json::object();
    for (const auto& [condition, cal] : calibrators) {
        Json bags = Json::array();
        for (std::size_t b = 0; b < cal.bags.size(); ++b) {
            bags.push_back(Json{{"seed", cal.bag_seeds.at(b)}, {"x", cal.bags[b].x}, {"y", cal.bags[b].y}});
        }
        out[condition] = Json{{"seed", cal.seed}, {"bags", std::move(bags)}};
    }
    return Json{{"calibrators", std::move(out)}};
}

CalibratorSet calibrators_from_json(const Json& json) {
    CalibratorSet out;
    const Json all = field<Json>(json, "calibrators");
    if (!all.is_object()) throw FormatError("'calibrators' must be an object");
    for (const auto& [condition, entry] : all.items()) {
        Calibrator cal;
        cal.seed = field<std::uint64_t>(entry, "seed");
        for (const auto& bag : field<Json>(entry, "bags")) {
            IsotonicMap map{field<std::vector<double>>(bag, "x"), field<std::vector<double>>(bag, "y")};
            if (map.x.empty() || map.x.size() != map.y.size()) {
                throw FormatError("calibrator '" + condition + "' has a malformed bag");
            }
            for (std::size_t i = 1; i < map.x.size(); ++i) {
                if (!(map.x[i - 1] < map.x[i]) || map.y[i - 1] > map.y[i]) {
                    throw FormatError("calibrator '" + condition + "' bag is not monotone");
                }
            }
            cal.bag_seeds.push_back(field<std::uint64_t>(bag, "seed"));
            cal.bags.push_back(std::move(map));
        }
        if (cal.bags.empty()) throw FormatError("calibrator '" + condition + "' has no bags");
        out.emplace(condition, std::move(cal));
    }
    return out;
}

Json config_to_json(const GeneratorConfig& c) {
    Json groups = Json::array();
    for (const auto& g : c.groups) {
        groups.push_back(Json{{"column", g.column}, {"levels", g.levels}, {"fractions", g.fractions}});
    }
    Json splits = Json::array();
    for (const auto& s : c.splits) splits.push_back(Json{{"name", s.name}, {"fraction", s.fraction}});
    Json auc = Json::object();
    for (const auto& [k, v] : c.surrogate_auc) auc[k] = v;
    Json overrides = Json::object();
    for (const auto& [k, v] : c.symptom_sharpness_overrides) overrides[k] = v;
    return Json{
        {"n", c.n},
        {"seed", c.seed},
        {"depression_prevalence", c.depression_prevalence},
        {"anxiety_prevalence", c.anxiety_prevalence},
        {"anxiety_given_depression", c.anxiety_given_depression},
        {"symptom_sharpness", c.symptom_sharpness},
        {"symptom_sharpness_overrides", std::move(overrides)},
        {"severity_cutpoints", c.severity_cutpoints},
        {"surrogate_auc", std::move(auc)},
        {"groups", std::move(groups)},
        {"diagnosis_noise", c.diagnosis_noise},
        {"surrogate_leak", c.surrogate_leak},
        {"splits", std::move(splits)},
    };
}

GeneratorConfig config_from_json(const Json& json, const ModelLayout& layout) {
    if (!json.is_object()) throw FormatError("generator config must be a JSON object");
    GeneratorConfig c = GeneratorConfig::defaults(layout);
    optional_field(json, "n", c.n);
    optional_field(json, "seed", c.seed);
    optional_field(json, "depression_prevalence", c.depression_prevalence);
    optional_field(json, "anxiety_prevalence", c.anxiety_prevalence);
    optional_field(json, "anxiety_given_depression", c.anxiety_given_depression);
    optional_field(json, "symptom_sharpness", c.symptom_sharpness);
    optional_field(json, "severity_cutpoints", c.severity_cutpoints);
    optional_field(json, "diagnosis_noise", c.diagnosis_noise);
    optional_field(json, "surrogate_leak", c.surrogate_leak);
    if (json.contains("symptom_sharpness_overrides")) {
        c.symptom_sharpness_overrides = field<std::map<std::string, double>>(json, "symptom_sharpness_overrides");
    }
    if (json.contains("surrogate_auc")) {
        for (const auto& [k, v] : field<std::map<std::string, double>>(json, "surrogate_auc")) c.surrogate_auc[k] = v;
    }
    if (json.contains("groups")) {
        c.groups.clear();
        for (const auto& g : json.at("groups")) {
            c.groups.push_back({field<std::string>(g, "column"), field<std::vector<std::string>>(g, "levels"),
                                field<std::vector<double>>(g, "fractions")});
        }
    }
    if (json.contains("splits")) {
        c.splits.clear();
        for (const auto& s : json.at("splits")) c.splits.push_back({field<std::string>(s, "name"), field<double>(s, "fraction")});
    }
    return c;
}

Json to_json(const FlaggedValue& value) {
    switch (value.kind) {
        case FlaggedValue::Kind::Finite: return value.value;
        case FlaggedValue::Kind::Infinite: return "inf";
        case FlaggedValue::Kind::Undefined: return nullptr;
    }
    return nullptr;
}

Json to_json(const MetricsReport& r) {
    Json curve = Json::array();
    for (const auto& b : r.calibration_curve) {
        curve.push_back(Json{{"bin", b.bin}, {"mean_score", b.mean_score}, {"positive_rate", b.positive_rate},
                             {"count", b.count}});
    }
    Json out{{"n", r.n}};
    out["roc_auc"] = r.roc_auc ? Json(*r.roc_auc) : Json(nullptr);
    out["ece"] = r.ece;
    out["mce"] = r.mce;
    out["brier"] = r.brier;
    out["calibration_curve"] = std::move(curve);
    return out;
}

Json to_json(const PrevalenceMetrics& m) {
    return Json{{"tp", m.confusion.tp},   {"fp", m.confusion.fp},         {"tn", m.confusion.tn},
                {"fn", m.confusion.fn},   {"prevalence", m.prevalence},   {"ppv", to_json(m.ppv)},
                {"npv", to_json(m.npv)},  {"lr_plus", to_json(m.lr_plus)}, {"lr_minus", to_json(m.lr_minus)}};
}

Json to_json(const EqualizedOdds& eo) {
    Json out{{"defined", eo.defined}};
    if (!eo.defined) {
        out["reason"] = eo.reason;
        return out;
    }
    out["difference"] = eo.difference;
    out["ratio"] = eo.ratio;
    Json groups = Json::object();
    for (const auto& [name, r] : eo.groups) groups[name] = Json{{"n", r.n}, {"tpr", r.tpr}, {"fpr", r.fpr}};
    out["groups"] = std::move(groups);
    return out;
}

Json to_json(const FairnessReport& r) {
    Json groups = Json::object();
    for (const auto& [name, m] : r.groups) {
        groups[name] = Json{{"n", m.n}, {"roc_auc", m.roc_auc ? Json(*m.roc_auc) : Json(nullptr)},
                            {"ece", m.ece}, {"brier", m.brier}};
    }
    return Json{{"groups", std::move(groups)},
                {"ece_difference", r.ece_difference},
                {"brier_difference", r.brier_difference},
                {"equalized_odds", to_json(r.equalized_odds)}};
}

std::string dump(const Json& json) { return json.dump(2) + "\n"; }

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

Json read_json_file(const std::filesystem::path& path) {
    try {
        return Json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open '" + path.string() + "' for writing");
    os << text;
    if (!os) throw FormatError("failed writing '" + path.string() + "'");
}

}  // namespace symptomnet
