#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "resman/autoscaler.hpp"
#include "resman/rng.hpp"

namespace resman {

struct ServerSpec {
    std::string id;
    int pe = 0;
    double mips_per_pe = 0.0;
    double ram_gb = 0.0;
    double storage_gb = 0.0;
    double pw_max = 0.0;
    double pw_min = 0.0;
    double pw_idle = 0.0;

    double cpu_capacity() const { return pe * mips_per_pe; }
    // replacement power per unit of CPU capacity; lower first when re-placing
    double power_density() const { return (pw_max - pw_min) / cpu_capacity(); }

    // the three reference machines: S1 2x2660/4GB 135/93.7W,
    // S2 4x3067/8GB 113/42.3W, S3 12x3067/16GB 222/58.4W
    static ServerSpec s1(const std::string& id = "S1");
    static ServerSpec s2(const std::string& id = "S2");
    static ServerSpec s3(const std::string& id = "S3");
};

// A VM to place: typed, with the demand it was provisioned for. The demand is
// what the VM asks of its server (never above the type's capacity).
struct VmInstance {
    std::string id;
    VmSize type = VmSize::Small;
    double cpu_mips = 0.0;
    double ram_gb = 0.0;
};

struct PlacementCost {
    double utilization = 0.0;  // maximized, in [0,1]
    double power_watts = 0.0;  // minimized
};

// a dominates b iff a is at least as good on both objectives and strictly
// better on one
bool dominates(const PlacementCost& a, const PlacementCost& b);

struct Feasibility {
    bool ok = true;
    // per server: remaining [cpu, ram] after hosting its VMs (negative when
    // overloaded)
    std::vector<std::array<double, 2>> slack;
};

// genes[j] = index of the server hosting VM j
Feasibility feasibility(const std::vector<int>& genes, const std::vector<ServerSpec>& servers,
                        const std::vector<VmInstance>& vms);

// Mean over active servers of the mean cpu/ram demand fraction; an empty
// datacenter scores 0.
double resource_utilization(const std::vector<int>& genes, const std::vector<ServerSpec>& servers,
                            const std::vector<VmInstance>& vms);

// Active servers draw (pw_max - pw_min) * cpu_fraction + pw_idle; servers
// hosting nothing are off and draw 0.
double power_watts(const std::vector<int>& genes, const std::vector<ServerSpec>& servers,
                   const std::vector<VmInstance>& vms);

PlacementCost evaluate_cost(const std::vector<int>& genes, const std::vector<ServerSpec>& servers,
                            const std::vector<VmInstance>& vms);

int active_server_count(const std::vector<int>& genes, std::size_t server_count);

// Fast non-dominated sort: domination counts and sets, then front peeling.
// fronts[0] holds the indices of the mutually non-dominated costs; the rank of
// a front-k member is k+1.
std::vector<std::vector<int>> non_dominated_fronts(const std::vector<PlacementCost>& costs);

// Evicts the most recently assigned VMs from every overloaded server, then
// re-places each on the feasible server with the lowest power density,
// preferring already-active servers over opening an empty one. Returns nullopt
// when no feasible placement is found for an evicted VM.
std::optional<std::vector<int>> repair(std::vector<int> genes, const std::vector<ServerSpec>& servers,
                                       const std::vector<VmInstance>& vms);

// Throws "infeasible instance" when the aggregate demand exceeds the aggregate
// capacity on either resource.
void check_aggregate_feasible(const std::vector<ServerSpec>& servers,
                              const std::vector<VmInstance>& vms);

struct Allocation {
    std::vector<int> genes;
    PlacementCost cost;
    int active_servers = 0;
};

struct GaConfig {
    int population = 20;
    int generations = 200;
    double crossover_rate = 1.0;   // applied to every pair by default
    double mutation_rate = 0.05;   // per gene
    std::uint64_t seed = 1;
};

struct GaResult {
    Allocation best;
    std::vector<double> best_power_history;  // front-1 minimum power per generation
    int discarded_children = 0;              // children whose repair failed
};

// Multi-objective GA: random repaired population, one-point crossover with a
// random mate, per-gene mutation, repair, then survival of the best
// `population` from parents+children by (front rank, power, -utilization).
// Returns the front-1 member with minimum power (ties: maximum utilization).
GaResult place_ga(const std::vector<VmInstance>& vms, const std::vector<ServerSpec>& servers,
                  const GaConfig& config);

// VMs in the given order; each lands on the feasible server that leaves the
// least CPU slack after placement (ties: least RAM slack, then lowest index).
Allocation place_best_fit(const std::vector<VmInstance>& vms, const std::vector<ServerSpec>& servers);

// VMs in the given order onto a uniformly random feasible server.
Allocation place_random_fit(const std::vector<VmInstance>& vms, const std::vector<ServerSpec>& servers,
                            std::uint64_t seed);

}  // namespace resman
