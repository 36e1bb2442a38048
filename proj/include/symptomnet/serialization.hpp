#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "symptomnet/binning.hpp"
#include "symptomnet/calibration.hpp"
#include "symptomnet/metrics.hpp"
#include "symptomnet/network.hpp"
#include "symptomnet/synth.hpp"

namespace symptomnet {

using Json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Network file: {"nodes": [{"name", "states"}], "edges": [[parent, child]],
// "cpds": [{"child", "parents", "table"}], "binners": {...}}. "table" holds one
// row per child state, columns in parent-configuration order. "cpds" may be
// empty for a structure-only spec and "binners" is optional.
struct NetworkFile {
    NetworkSpec spec;
    std::vector<TabularCPD> cpds;
    QuartileBinner binners;
};

Json network_to_json(const NetworkFile& file);
NetworkFile network_from_json(const Json& json);

Json binner_to_json(const QuartileBinner& binner);
QuartileBinner binner_from_json(const Json& json);

Json calibrators_to_json(const CalibratorSet& calibrators);
CalibratorSet calibrators_from_json(const Json& json);

// Every field is written, so the file documents the defaults in force.
Json config_to_json(const GeneratorConfig& config);
// Fields absent from `json` keep their default values.
GeneratorConfig config_from_json(const Json& json, const ModelLayout& layout = assessment_layout());

Json to_json(const FlaggedValue& value);
Json to_json(const MetricsReport& report);
Json to_json(const PrevalenceMetrics& metrics);
Json to_json(const EqualizedOdds& odds);
Json to_json(const FairnessReport& report);

// Two-space indentation plus a trailing newline; stable byte output.
std::string dump(const Json& json);
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace symptomnet
