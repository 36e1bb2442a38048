#include "symptomnet/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>
#include <httplib.h>

#include "symptomnet/manifest.hpp"
#include "symptomnet/assessment_model.hpp"
#include "symptomnet/service.hpp"
#include "symptomnet/synth.hpp"
#include "symptomnet/workflow.hpp"

namespace symptomnet {

namespace {

namespace fs = std::filesystem;

// Reports a user-facing failure with exit code 1.
class CliError : public std::runtime_error {
public:
    explicit CliError(const std::string& what) : std::runtime_error(what) {}
};

NetworkFile load_network(const fs::path& path) {
    NetworkFile file = network_from_json(read_json_file(path));
    if (file.cpds.empty()) throw CliError("'" + path.string() + "' has no CPDs; run fit first");
    BayesianNetwork::create(file.spec, file.cpds);
    return file;
}

CalibratorSet load_calibrators(const std::string& path) {
    if (path.empty()) return {};
    return calibrators_from_json(read_json_file(path));
}

void record(const std::string& manifest, const std::string& role, const fs::path& file) {
    if (manifest.empty()) return;
    const fs::path mpath(manifest);
    RunManifest m = fs::exists(mpath) ? read_manifest(mpath) : RunManifest{};
    m.add(role, file, mpath.parent_path());
    write_manifest(mpath, m);
}

void check_manifest(const std::string& manifest, const std::vector<std::string>& inputs) {
    if (manifest.empty()) return;
    const fs::path mpath(manifest);
    const RunManifest m = read_manifest(mpath);
    for (const auto& f : inputs) {
        if (!f.empty()) m.verify_file(f, mpath.parent_path());
    }
}

std::pair<std::string, std::string> split_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw CliError("evidence '" + text + "' must look like NODE=STATE");
    return {text.substr(0, eq), text.substr(eq + 1)};
}

struct GenerateArgs {
    std::string config, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
    GeneratorConfig config = a.config.empty() ? GeneratorConfig::defaults() : config_from_json(read_json_file(a.config));
    if (a.seed) config.seed = *a.seed;
    if (a.n) config.n = *a.n;
    config.validate();
    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    const Cohort cohort = split_cohort(sample_cohort(config), config);
    RunManifest manifest;
    manifest.seeds["generator"] = config.seed;
    const fs::path cfg = dir / "config.json";
    write_text_file(cfg, dump(config_to_json(config)));
    manifest.add("config", cfg, dir);
    for (const auto& name : cohort.split_order) {
        const fs::path p = dir / (name + ".csv");
        cohort.splits.at(name).write_csv(p);
        manifest.add(name, p, dir);
        out << name << ": " << cohort.splits.at(name).rows() << " records -> " << p.string() << "\n";
    }
    write_manifest(dir / "manifest.json", manifest);
    return 0;
}

int cmd_export_spec(const std::string& path, bool no_condition_edge, std::ostream& out) {
    NetworkFile file;
    file.spec = assessment_network(AssessmentNetworkOptions{!no_condition_edge});
    write_text_file(path, dump(network_to_json(file)));
    out << "wrote " << file.spec.nodes.size() << "-node structure to " << path << "\n";
    return 0;
}

struct FitArgs {
    std::string data, spec, out, manifest;
    double ess = 8000.0;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    check_manifest(a.manifest, {a.data});
    const NetworkSpec spec = a.spec.empty() ? assessment_network() : network_from_json(read_json_file(a.spec)).spec;
    const auto report = validate_structure(spec);
    if (!report.ok()) throw CliError("invalid network spec: " + report.summary());
    const DatasetTable data = DatasetTable::read_csv(a.data);
    const NetworkFile file = fit_network_file(spec, data, EssConfig{a.ess});
    BayesianNetwork::create(file.spec, file.cpds);
    for (const auto& [node, bins] : file.binners) {
        if (bins.degenerate) err << "warning: surrogate '" << node << "' has constant scores; every record falls in q0\n";
    }
    write_text_file(a.out, dump(network_to_json(file)));
    record(a.manifest, "network", a.out);
    out << "fitted " << file.cpds.size() << " CPDs on " << data.rows() << " records (ess " << a.ess << ") -> "
        << a.out << "\n";
    return 0;
}

struct ScoreArgs {
    std::string data, network, out, family;
};

int cmd_score(const ScoreArgs& a, std::ostream& out) {
    const NetworkFile model = load_network(a.network);
    const BayesianNetwork network = BayesianNetwork::create(model.spec, model.cpds);
    const ModelLayout layout = assessment_layout();
    std::optional<std::string> family;
    if (!a.family.empty()) {
        const auto families = layout.families();
        if (std::find(families.begin(), families.end(), a.family) == families.end()) {
            throw CliError("unknown surrogate family '" + a.family + "'");
        }
        family = a.family;
    }
    const DatasetTable data = discretize_surrogates(DatasetTable::read_csv(a.data), model.binners);
    const auto scored = score_records(network, data, evidence_nodes(network, layout, family), layout, false);
    DatasetTable table;
    if (data.has(kUserIdColumn)) {
        const auto& col = data.discrete(kUserIdColumn);
        table.add_discrete(kUserIdColumn, col.domain, col.codes);
    }
    for (const auto& [condition, values] : scored.conditions) table.add_numeric(score_column(condition), values);
    table.write_csv(a.out);
    out << "scored " << data.rows() << " records -> " << a.out << "\n";
    return 0;
}

struct CalibrateArgs {
    std::string scores, labels, out, manifest;
    std::size_t bags = 10;
    std::uint64_t seed = 0;
};

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out) {
    check_manifest(a.manifest, {a.labels});
    const DatasetTable scores = DatasetTable::read_csv(a.scores);
    const DatasetTable labels = DatasetTable::read_csv(a.labels);
    if (scores.rows() != labels.rows()) {
        throw CliError("scores have " + std::to_string(scores.rows()) + " rows but labels have " +
                       std::to_string(labels.rows()));
    }
    std::map<std::string, std::vector<double>> s;
    std::map<std::string, std::vector<int>> l;
    for (const auto& condition : assessment_layout().condition_names()) {
        const std::string col = score_column(condition);
        if (!scores.has(col)) continue;
        if (!labels.has(condition)) throw CliError("labels file has no '" + condition + "' column");
        const auto lab = condition_labels(labels, condition);
        const auto& values = scores.numeric(col).values;
        for (auto r : lab.rows) s[condition].push_back(values[r]);
        l[condition] = lab.labels;
    }
    if (s.empty()) throw CliError("scores file has no condition score columns");
    const CalibratorSet cals = fit_calibrators(s, l, CalibratorOptions{a.bags, a.seed, true});
    write_text_file(a.out, dump(calibrators_to_json(cals)));
    record(a.manifest, "calibrators", a.out);
    out << "fitted " << cals.size() << " calibrators with " << a.bags << " bags -> " << a.out << "\n";
    return 0;
}

struct EvaluateArgs {
    std::string data, network, calibrator, report, curve, manifest;
    double threshold = 0.5;
    std::size_t bins = kDefaultBins;
    bool no_single_family = false;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
    check_manifest(a.manifest, {a.data, a.network, a.calibrator});
    const NetworkFile model = load_network(a.network);
    const CalibratorSet cals = load_calibrators(a.calibrator);
    const DatasetTable data = DatasetTable::read_csv(a.data);
    EvaluateOptions options{a.threshold, a.bins, !a.no_single_family};
    const Json report = evaluate_report(model, cals, data, options);
    write_text_file(a.report, dump(report));
    if (!a.curve.empty()) write_text_file(a.curve, calibration_curve_csv(report));
    for (const auto& [condition, section] : report.at("conditions").items()) {
        const Json& m = section.contains("calibrated") ? section.at("calibrated") : section.at("uncalibrated");
        out << condition << ": roc_auc " << m.at("roc_auc").dump() << " ece " << m.at("ece").dump() << "\n";
    }
    out << "report -> " << a.report << "\n";
    return 0;
}

struct QueryArgs {
    std::string network, calibrator, request, out;
    std::vector<std::string> evidence, isolate, query;
};

int cmd_query(const QueryArgs& a, std::ostream& out) {
    const NetworkFile model = load_network(a.network);
    const CalibratorSet cals = load_calibrators(a.calibrator);
    const BayesianNetwork network = BayesianNetwork::create(model.spec, model.cpds);
    Json body = a.request.empty() ? Json::object() : read_json_file(a.request);
    if (!a.evidence.empty() && !body.contains("evidence")) body["evidence"] = Json::object();
    for (const auto& e : a.evidence) {
        const auto [node, state] = split_assignment(e);
        body["evidence"][node] = state;
    }
    for (const auto& n : a.isolate) body["interventions"].push_back(n);
    for (const auto& n : a.query) body["query"].push_back(n);
    const QueryRequest request = parse_query(body, network);
    const std::string text = dump(run_query(network, cals.empty() ? nullptr : &cals, request));
    if (a.out.empty()) {
        out << text;
    } else {
        write_text_file(a.out, text);
    }
    return 0;
}

struct ServeArgs {
    std::string network, calibrator, host = "127.0.0.1";
    int port = 8080;
};

int cmd_serve(const ServeArgs& a, std::ostream& out) {
    Service service(load_network(a.network), load_calibrators(a.calibrator));
    httplib::Server server;
    service.mount(server);
    const int port = a.port == 0 ? server.bind_to_any_port(a.host) : (server.bind_to_port(a.host, a.port) ? a.port : -1);
    if (port < 0) throw CliError("cannot bind " + a.host + ":" + std::to_string(a.port));
    out << "listening on http://" << a.host << ":" << port << std::endl;
    server.listen_after_bind();
    return 0;
}

int cmd_verify(const std::string& manifest, std::ostream& out) {
    const fs::path mpath(manifest);
    const RunManifest m = read_manifest(mpath);
    m.verify(mpath.parent_path());
    out << "verified " << m.artifacts.size() << " artifacts\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Symptom-level Bayesian network assessment toolkit", "symptomnet"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate a synthetic cohort with development/calibration/test splits");
    generate->add_option("--config", gen.config, "Generator config JSON (defaults when omitted)")->check(CLI::ExistingFile);
    generate->add_option("--out-dir", gen.out_dir, "Output directory")->required();
    generate->add_option("--seed", gen.seed, "Override the config seed");
    generate->add_option("--n", gen.n, "Override the record count");

    std::string spec_out;
    bool no_condition_edge = false;
    auto* export_spec = app.add_subcommand("export-spec", "Write the default network structure as a spec file");
    export_spec->add_option("--out", spec_out, "Output JSON")->required();
    export_spec->add_flag("--no-condition-edge", no_condition_edge, "Drop the Depression -> Anxiety edge");

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Fit quartile binners and BDeu CPDs");
    fit->add_option("--data", fit_args.data, "Training CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--network-spec", fit_args.spec, "Structure JSON (default structure when omitted)")
        ->check(CLI::ExistingFile);
    fit->add_option("--ess", fit_args.ess, "Equivalent sample size")->check(CLI::NonNegativeNumber);
    fit->add_option("--out", fit_args.out, "Output network JSON")->required();
    fit->add_option("--manifest", fit_args.manifest, "Run manifest to verify inputs against and record into");

    ScoreArgs score_args;
    auto* score = app.add_subcommand("score", "Write raw condition probabilities per record");
    score->add_option("--data", score_args.data, "Cohort CSV")->required()->check(CLI::ExistingFile);
    score->add_option("--network", score_args.network, "Fitted network JSON")->required()->check(CLI::ExistingFile);
    score->add_option("--out", score_args.out, "Output CSV")->required();
    score->add_option("--family", score_args.family, "Use only this surrogate family's evidence");

    CalibrateArgs cal_args;
    auto* calibrate = app.add_subcommand("calibrate", "Fit bagged isotonic calibrators");
    calibrate->add_option("--scores", cal_args.scores, "Scores CSV from 'score'")->required()->check(CLI::ExistingFile);
    calibrate->add_option("--labels", cal_args.labels, "CSV with condition label columns, row-aligned")
        ->required()
        ->check(CLI::ExistingFile);
    calibrate->add_option("--bags", cal_args.bags, "Number of bootstrap bags")->check(CLI::PositiveNumber);
    calibrate->add_option("--seed", cal_args.seed, "Seed of the first bag");
    calibrate->add_option("--out", cal_args.out, "Output calibrator JSON")->required();
    calibrate->add_option("--manifest", cal_args.manifest, "Run manifest to verify inputs against and record into");

    EvaluateArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "Evaluate a fitted network on a labelled cohort");
    evaluate->add_option("--data", eval_args.data, "Cohort CSV")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--network", eval_args.network, "Fitted network JSON")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--calibrator", eval_args.calibrator, "Calibrator JSON")->check(CLI::ExistingFile);
    evaluate->add_option("--threshold", eval_args.threshold, "Decision threshold")->check(CLI::Range(0.0, 1.0));
    evaluate->add_option("--bins", eval_args.bins, "Calibration bins")->check(CLI::PositiveNumber);
    evaluate->add_option("--report", eval_args.report, "Output report JSON")->required();
    evaluate->add_option("--curve", eval_args.curve, "Output calibration-curve CSV");
    evaluate->add_option("--manifest", eval_args.manifest, "Run manifest to verify inputs against");
    evaluate->add_flag("--no-single-family", eval_args.no_single_family, "Skip single-family queries");

    QueryArgs query_args;
    auto* query = app.add_subcommand("query", "Answer one posterior query");
    query->add_option("--network", query_args.network, "Fitted network JSON")->required()->check(CLI::ExistingFile);
    query->add_option("--calibrator", query_args.calibrator, "Calibrator JSON")->check(CLI::ExistingFile);
    query->add_option("--request", query_args.request, "Request JSON {evidence, interventions, query}")
        ->check(CLI::ExistingFile);
    query->add_option("--evidence", query_args.evidence, "NODE=STATE (repeatable)");
    query->add_option("--isolate", query_args.isolate, "Node to do-isolate (repeatable)");
    query->add_option("--query", query_args.query, "Extra node to report (repeatable)");
    query->add_option("--out", query_args.out, "Output JSON (stdout when omitted)");

    ServeArgs serve_args;
    auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
    serve->add_option("--network", serve_args.network, "Fitted network JSON")->required()->check(CLI::ExistingFile);
    serve->add_option("--calibrator", serve_args.calibrator, "Calibrator JSON")->check(CLI::ExistingFile);
    serve->add_option("--host", serve_args.host, "Bind address");
    serve->add_option("--port", serve_args.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));

    std::string manifest_path;
    auto* verify = app.add_subcommand("verify", "Check every artifact of a run manifest");
    verify->add_option("--manifest", manifest_path, "Manifest JSON")->required()->check(CLI::ExistingFile);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*generate) return cmd_generate(gen, out);
        if (*export_spec) return cmd_export_spec(spec_out, no_condition_edge, out);
        if (*fit) return cmd_fit(fit_args, out, err);
        if (*score) return cmd_score(score_args, out);
        if (*calibrate) return cmd_calibrate(cal_args, out);
        if (*evaluate) return cmd_evaluate(eval_args, out);
        if (*query) return cmd_query(query_args, out);
        if (*serve) return cmd_serve(serve_args, out);
        if (*verify) return cmd_verify(manifest_path, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace symptomnet
