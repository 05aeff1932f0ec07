#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "resman/autoscaler.hpp"
#include "resman/placement.hpp"
#include "resman/traces.hpp"
#include "resman/training.hpp"

namespace resman {

// The four provisioning policies compared by the harness:
//   OA   - sizes VMs from the actual next-interval demand (oracle) + clustering
//   PA   - sizes VMs from padded predictions + clustering
//   PWA  - padded predictions, each task sized individually (no clustering)
//   WPWA - no prediction; each task sized for its worst observed demand
enum class ScenarioKind { OA = 0, PA = 1, PWA = 2, WPWA = 3 };

enum class PlacementEngine { Ga, BestFit, RandomFit };

struct Scenario {
    ScenarioKind kind = ScenarioKind::PA;
    PlacementEngine engine = PlacementEngine::Ga;
};

const char* to_string(ScenarioKind kind);
const char* to_string(PlacementEngine engine);

// Capacity a trace demand fraction of 1.0 corresponds to; defaults to the
// largest catalog instance so a saturated task needs exactly one Xlarge VM.
struct ReferenceCapacity {
    double cpu_mips = 2000.0;
    double mem_gb = 3.0;
};

struct OrchestratorConfig {
    int pws_minutes = 5;         // aggregation/forecast interval
    int warmup_intervals = 10;   // history used for the initial training
    Topology topology{3, 5, 1, 2};
    TrainerConfig trainer;
    int retrain_generations = 25;  // per-interval budget, continuing the population
    double edp_alpha = 0.8;
    GaConfig ga;
    ReferenceCapacity reference;
    int k_max = 8;
};

struct IntervalMetrics {
    int interval = 0;
    double ru = 0.0;
    double power_watts = 0.0;
    int active_pms = 0;
    std::array<int, 4> vm_counts{};              // per VmSize
    std::array<double, 2> prediction_error{};    // normalized MSE across tasks; NaN when n/a
    int capacity_violations = 0;
    int placement_churn = 0;      // tasks whose server changed vs previous interval
    int placed_tasks = 0;
    int zero_demand_tasks = 0;    // tasks with no demand this interval (no VM spawned)
    std::string error;            // non-empty: interval failed, numbers are zeroed
};

struct ScenarioResult {
    Scenario scenario;
    std::vector<IntervalMetrics> intervals;
};

// Runs one scenario over the traces: per interval, forecast or read demand,
// size VMs, place them, then charge the actual demand. Infeasible intervals
// record an error entry and the run continues.
ScenarioResult run_scenario(const Scenario& scenario, const std::vector<TaskSeries>& traces,
                            const std::vector<ServerSpec>& servers, const VmCatalog& catalog,
                            const OrchestratorConfig& config, std::uint64_t seed);

struct ScenarioSummary {
    Scenario scenario;
    int intervals = 0;
    int error_intervals = 0;
    double mean_ru = 0.0;
    double mean_pw = 0.0;
    double mean_apms = 0.0;
    long violations = 0;
    long zero_demand_tasks = 0;
    double power_saving_pct = 0.0;     // vs the WPWA row, when present
    double ru_improvement_pct = 0.0;
};

struct ComparisonReport {
    std::vector<ScenarioSummary> rows;  // in ScenarioKind order of the inputs
};

// Means over the non-error intervals plus savings relative to WPWA.
// Throws when the runs cover different interval counts.
ComparisonReport compare_scenarios(const std::vector<ScenarioResult>& results);

// Side-by-side single multi-channel training vs one single-channel training
// per resource, over a set of forecast window sizes.
struct PredictionReportRow {
    int pws_minutes = 0;
    double multi_xi_cpu = 0.0, multi_xi_mem = 0.0;
    double multi_ms = 0.0;
    double multi_bytes = 0.0;
    double siso_xi_cpu = 0.0, siso_xi_mem = 0.0;
    double siso_ms = 0.0;     // total of the per-resource trainings
    double siso_bytes = 0.0;
};

struct PredictionReport {
    std::vector<PredictionReportRow> rows;
};

PredictionReport prediction_report(const TaskSeries& series, const std::vector<int>& pws_list,
                                   const Topology& topology, const TrainerConfig& trainer,
                                   std::uint64_t seed);

// Analytic footprint of one trainer run: population + scratch genomes + the
// training windows.
double trainer_memory_bytes(const Topology& topology, int population, std::size_t windows);

}  // namespace resman
