#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "resman/orchestrator.hpp"

namespace resman {

// Configuration problems exit with code 1; runtime failures with 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FleetEntry {
    std::string type;  // S1, S2 or S3
    int count = 0;
};

// Everything a run needs, with the reference experimental values as defaults:
// the three server models, the four-instance catalog, a 3-5-1 two-channel
// topology, population 10, 200 generations, 80% training split.
struct RunConfig {
    std::uint64_t seed = 42;
    int pws_minutes = 5;
    std::string out_dir = ".";
    std::string trace_path;
    char delimiter = ',';

    std::vector<FleetEntry> fleet{{"S1", 4}, {"S2", 3}, {"S3", 3}};
    VmCatalog catalog = VmCatalog::standard();

    Topology topology{3, 5, 1, 2};
    TrainerConfig trainer;
    double edp_alpha = 0.8;
    GaConfig ga;

    std::vector<ScenarioKind> scenarios{ScenarioKind::OA, ScenarioKind::PA, ScenarioKind::PWA,
                                        ScenarioKind::WPWA};
    PlacementEngine engine = PlacementEngine::Ga;
    int warmup_intervals = 10;
    int retrain_generations = 25;
    ReferenceCapacity reference;
    int k_max = 8;

    WorkloadSpec synth;
    std::vector<int> pws_set{10, 20, 30, 60};
};

nlohmann::json to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& doc);

// Throws ConfigError naming the offending field and its legal range.
void validate(const RunConfig& cfg);

// Reads, parses and validates; missing file or bad JSON throw ConfigError.
RunConfig load_config(const std::string& path);

std::vector<ServerSpec> build_fleet(const RunConfig& cfg);
OrchestratorConfig orchestrator_config(const RunConfig& cfg);

ScenarioKind scenario_kind_from(const std::string& name);
PlacementEngine engine_from(const std::string& name);

}  // namespace resman
