#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "resman/rng.hpp"

namespace resman {

// One task's demand in absolute units, [cpu MIPS, memory GB].
struct TaskDemand {
    std::string task_id;
    std::vector<double> demand;
};

struct Clustering {
    int k = 0;
    std::vector<std::vector<double>> centroids;
    std::vector<int> assignment;        // point -> cluster
    double wcss = 0.0;                  // within-cluster sum of squares
    std::vector<double> wcss_history;   // per Lloyd iteration, non-increasing
    int reseeds = 0;                    // empty-cluster repairs performed
};

// Lloyd iterations from a seeded sample of k distinct points, until the
// assignment stabilizes or max_iters. Ties break toward the lower cluster
// index; an emptied cluster is re-seeded at the point farthest from its
// centroid.
Clustering kmeans(const std::vector<TaskDemand>& points, int k, std::uint64_t seed,
                  int max_iters = 100);

// Best of `restarts` independently seeded runs by final objective; Lloyd
// iterations are cheap and a single random init lands in poor local optima
// often enough to distort the elbow curve.
Clustering kmeans_best(const std::vector<TaskDemand>& points, int k, std::uint64_t seed,
                       int restarts = 5, int max_iters = 100);

// Elbow pick for the cluster count: the K in [2, k_max-1] maximizing the
// second difference of wcss(K), ties toward the smaller K. Fewer than 3
// points (or no interior candidate) degenerates to the largest usable K.
int elbow_k(const std::vector<TaskDemand>& points, int k_max, std::uint64_t seed);

enum class VmSize { Small = 0, Medium = 1, Large = 2, XLarge = 3 };

struct VmType {
    VmSize size = VmSize::Small;
    std::string name;
    int pe = 0;
    double mips = 0.0;
    double ram_gb = 0.0;
    double storage_gb = 0.0;
};

struct VmCatalog {
    std::array<VmType, 4> types;

    // small(1 PE, 500 MIPS, 0.5 GB), medium(2, 1000, 1), large(3, 1500, 2),
    // Xlarge(4, 2000, 3); storage 40/60/80/100 GB.
    static VmCatalog standard();
    const VmType& by_size(VmSize s) const { return types[static_cast<std::size_t>(s)]; }
};

// Maps a cluster's per-resource [min, max] demand envelope to a VM type:
// band conditions small -> large, otherwise Xlarge; when every band fails on a
// straddling cluster, the smallest type covering the max demand wins. Throws
// when the max demand exceeds the largest instance.
VmSize select_vm_type(const std::vector<double>& z_min, const std::vector<double>& z_max,
                      const VmCatalog& catalog);

struct VmDemand {
    std::array<int, 4> counts{};        // per VmSize, sums to the task count
    std::vector<VmSize> cluster_type;   // cluster -> chosen type
    std::vector<VmSize> task_type;      // task -> chosen type (via its cluster)
    Clustering clustering;
};

// elbow -> kmeans -> per-cluster type mapping; one VM per task.
VmDemand autoscale(const std::vector<TaskDemand>& tasks, const VmCatalog& catalog,
                   std::uint64_t seed, int k_max = 8);

}  // namespace resman
