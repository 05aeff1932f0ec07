#include "resman/autoscaler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace resman {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

int nearest_centroid(const std::vector<double>& p, const std::vector<std::vector<double>>& centroids) {
    int best = 0;
    double best_d = sq_dist(p, centroids[0]);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double d = sq_dist(p, centroids[c]);
        if (d < best_d) {  // strict: ties stay with the lower index
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

}  // namespace

Clustering kmeans(const std::vector<TaskDemand>& points, int k, std::uint64_t seed, int max_iters) {
    const std::size_t m = points.size();
    if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    if (static_cast<std::size_t>(k) > m)
        throw std::invalid_argument("kmeans: k=" + std::to_string(k) + " exceeds " +
                                    std::to_string(m) + " points");
    for (const auto& p : points) {
        if (p.demand.size() != points.front().demand.size())
            throw std::invalid_argument("kmeans: inconsistent demand dimensions");
        for (double v : p.demand)
            if (!std::isfinite(v) || v < 0.0)
                throw std::invalid_argument("kmeans: demands must be finite and non-negative");
    }
    const std::size_t dim = points.front().demand.size();

    Clustering out;
    out.k = k;
    Rng rng(seed);
    std::vector<std::size_t> picked;
    for (int c = 0; c < k; ++c) {
        const std::size_t idx = rng.below_excluding(m, picked);
        picked.push_back(idx);
        out.centroids.push_back(points[idx].demand);
    }

    out.assignment.assign(m, -1);
    std::vector<int> prev_assignment;
    std::vector<std::vector<double>> snap_centroids;
    std::vector<int> snap_assignment;
    for (int iter = 0; iter < max_iters; ++iter) {
        prev_assignment = out.assignment;
        snap_centroids = out.centroids;
        snap_assignment = out.assignment;

        for (std::size_t i = 0; i < m; ++i)
            out.assignment[i] = nearest_centroid(points[i].demand, out.centroids);

        // repair emptied clusters before the mean update
        for (;;) {
            std::vector<int> sizes(static_cast<std::size_t>(k), 0);
            for (int a : out.assignment) ++sizes[static_cast<std::size_t>(a)];
            int empty = -1;
            for (int c = 0; c < k; ++c)
                if (sizes[static_cast<std::size_t>(c)] == 0) { empty = c; break; }
            if (empty < 0) break;

            // farthest point whose cluster keeps at least one other member
            std::size_t who = m;
            double far_d = -1.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (sizes[static_cast<std::size_t>(out.assignment[i])] < 2) continue;
                const double d = sq_dist(points[i].demand, out.centroids[static_cast<std::size_t>(out.assignment[i])]);
                if (d > far_d) {
                    far_d = d;
                    who = i;
                }
            }
            if (who == m) break;  // cannot happen while k <= m, but stay safe
            out.centroids[static_cast<std::size_t>(empty)] = points[who].demand;
            out.assignment[who] = empty;
            ++out.reseeds;
        }

        // mean update
        std::vector<std::vector<double>> sums(static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < m; ++i) {
            const auto c = static_cast<std::size_t>(out.assignment[i]);
            for (std::size_t d = 0; d < dim; ++d) sums[c][d] += points[i].demand[d];
            ++sizes[c];
        }
        for (int c = 0; c < k; ++c)
            for (std::size_t d = 0; d < dim; ++d)
                out.centroids[static_cast<std::size_t>(c)][d] =
                    sums[static_cast<std::size_t>(c)][d] / sizes[static_cast<std::size_t>(c)];

        double wcss = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            wcss += sq_dist(points[i].demand, out.centroids[static_cast<std::size_t>(out.assignment[i])]);
        if (!out.wcss_history.empty() && wcss > out.wcss_history.back()) {
            // rounding pushed the objective up; roll back and stop
            out.centroids = std::move(snap_centroids);
            out.assignment = std::move(snap_assignment);
            break;
        }
        out.wcss_history.push_back(wcss);

        // converged: the last mean update left the centroids unchanged, so the
        // assignment is an argmin against the final centroids
        if (out.assignment == prev_assignment) break;
    }

    out.wcss = out.wcss_history.back();
    return out;
}

Clustering kmeans_best(const std::vector<TaskDemand>& points, int k, std::uint64_t seed,
                       int restarts, int max_iters) {
    if (restarts < 1) throw std::invalid_argument("kmeans_best: restarts must be >= 1");
    Clustering best;
    for (int r = 0; r < restarts; ++r) {
        auto c = kmeans(points, k, derive_seed(seed, 101 + static_cast<std::uint64_t>(r)), max_iters);
        if (r == 0 || c.wcss < best.wcss) best = std::move(c);
    }
    return best;
}

int elbow_k(const std::vector<TaskDemand>& points, int k_max, std::uint64_t seed) {
    if (k_max < 2) throw std::invalid_argument("elbow_k: k_max must be >= 2");
    if (points.size() < 3) return 1;
    bool all_same = true;
    for (const auto& p : points)
        if (p.demand != points.front().demand) { all_same = false; break; }
    if (all_same) return 1;  // identical points: nothing to split
    const int k_top = std::min<int>(k_max, static_cast<int>(points.size()));
    if (k_top < 3) return k_top;

    std::vector<double> wcss;
    for (int k = 1; k <= k_top; ++k)
        wcss.push_back(kmeans_best(points, k, derive_seed(seed, static_cast<std::uint64_t>(k))).wcss);

    int best_k = 2;
    double best_curve = -std::numeric_limits<double>::infinity();
    for (int k = 2; k <= k_top - 1; ++k) {
        const double curve = wcss[static_cast<std::size_t>(k - 2)] -
                             2.0 * wcss[static_cast<std::size_t>(k - 1)] +
                             wcss[static_cast<std::size_t>(k)];
        if (curve > best_curve) {  // strict: ties keep the smaller K
            best_curve = curve;
            best_k = k;
        }
    }
    return best_k;
}

VmCatalog VmCatalog::standard() {
    VmCatalog c;
    c.types = {VmType{VmSize::Small, "small", 1, 500.0, 0.5, 40.0},
               VmType{VmSize::Medium, "medium", 2, 1000.0, 1.0, 60.0},
               VmType{VmSize::Large, "large", 3, 1500.0, 2.0, 80.0},
               VmType{VmSize::XLarge, "Xlarge", 4, 2000.0, 3.0, 100.0}};
    return c;
}

VmSize select_vm_type(const std::vector<double>& z_min, const std::vector<double>& z_max,
                      const VmCatalog& catalog) {
    if (z_min.size() != 2 || z_max.size() != 2)
        throw std::invalid_argument("select_vm_type: expected [cpu, mem] envelopes");

    const auto caps = [&](VmSize s) {
        const VmType& t = catalog.by_size(s);
        return std::array<double, 2>{t.mips, t.ram_gb};
    };
    const auto covers = [&](VmSize s) {
        const auto c = caps(s);
        return z_max[0] <= c[0] && z_max[1] <= c[1];
    };
    const auto above = [&](VmSize s) {  // whole cluster strictly above this type
        const auto c = caps(s);
        return z_min[0] > c[0] && z_min[1] > c[1];
    };

    if (covers(VmSize::Small)) return VmSize::Small;
    if (above(VmSize::Small) && covers(VmSize::Medium)) return VmSize::Medium;
    if (above(VmSize::Medium) && covers(VmSize::Large)) return VmSize::Large;
    if (!covers(VmSize::XLarge))
        throw std::runtime_error("select_vm_type: demand exceeds largest instance");
    // straddling cluster: smallest type that still covers the max demand
    for (VmSize s : {VmSize::Medium, VmSize::Large})
        if (covers(s)) return s;
    return VmSize::XLarge;
}

VmDemand autoscale(const std::vector<TaskDemand>& tasks, const VmCatalog& catalog,
                   std::uint64_t seed, int k_max) {
    if (tasks.empty()) throw std::invalid_argument("autoscale: no tasks");

    const int k = elbow_k(tasks, k_max, derive_seed(seed, 1));
    VmDemand out;
    out.clustering = kmeans_best(tasks, k, derive_seed(seed, 2));

    out.cluster_type.resize(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        std::vector<double> z_min(2, std::numeric_limits<double>::infinity());
        std::vector<double> z_max(2, -std::numeric_limits<double>::infinity());
        bool any = false;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            if (out.clustering.assignment[i] != c) continue;
            any = true;
            for (std::size_t d = 0; d < 2; ++d) {
                z_min[d] = std::min(z_min[d], tasks[i].demand[d]);
                z_max[d] = std::max(z_max[d], tasks[i].demand[d]);
            }
        }
        if (!any) throw std::logic_error("autoscale: empty cluster survived kmeans");
        out.cluster_type[static_cast<std::size_t>(c)] = select_vm_type(z_min, z_max, catalog);
    }

    out.task_type.reserve(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const VmSize s =
            out.cluster_type[static_cast<std::size_t>(out.clustering.assignment[i])];
        out.task_type.push_back(s);
        ++out.counts[static_cast<std::size_t>(s)];
    }
    return out;
}

}  // namespace resman
