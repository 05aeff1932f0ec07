#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "resman/autoscaler.hpp"

using namespace resman;

namespace {

std::vector<TaskDemand> points_of(std::initializer_list<std::pair<double, double>> pts) {
    std::vector<TaskDemand> out;
    int i = 0;
    for (auto [c, m] : pts) out.push_back({"t" + std::to_string(i++), {c, m}});
    return out;
}

void blob(double cx, double cy, int n, double spread_x, double spread_y, Rng& rng,
          std::vector<TaskDemand>& into) {
    for (int i = 0; i < n; ++i)
        into.push_back({"b" + std::to_string(into.size()),
                        {cx + rng.uniform(-spread_x, spread_x), cy + rng.uniform(-spread_y, spread_y)}});
}

double sqd(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return acc;
}

void check_clustering_invariants(const std::vector<TaskDemand>& pts, const Clustering& c) {
    // wcss non-increasing across iterations
    for (std::size_t i = 1; i < c.wcss_history.size(); ++i)
        CHECK(c.wcss_history[i] <= c.wcss_history[i - 1]);
    // every assignment is an argmin over the final centroids
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double mine = sqd(pts[i].demand, c.centroids[static_cast<std::size_t>(c.assignment[i])]);
        for (const auto& mu : c.centroids) CHECK(mine <= sqd(pts[i].demand, mu) + 1e-12);
    }
    // all clusters non-empty
    std::vector<int> sizes(static_cast<std::size_t>(c.k), 0);
    for (int a : c.assignment) ++sizes[static_cast<std::size_t>(a)];
    for (int s : sizes) CHECK(s > 0);
}

}  // namespace

TEST_CASE("kmeans: K=1 gives the mean and m*variance as wcss") {
    auto pts = points_of({{1, 2}, {3, 4}, {5, 6}, {7, 0}});
    auto c = kmeans(pts, 1, 9);
    REQUIRE(c.centroids.size() == 1);
    CHECK(c.centroids[0][0] == doctest::Approx(4.0));
    CHECK(c.centroids[0][1] == doctest::Approx(3.0));

    double expected = 0;
    for (const auto& p : pts) expected += sqd(p.demand, {4.0, 3.0});
    CHECK(c.wcss == doctest::Approx(expected).epsilon(1e-12));
    check_clustering_invariants(pts, c);
}

TEST_CASE("kmeans: K equal to the point count zeroes the objective") {
    auto pts = points_of({{1, 1}, {2, 2}, {3, 3}});
    auto c = kmeans(pts, 3, 4);
    CHECK(c.wcss == doctest::Approx(0.0));
    std::vector<int> seen = c.assignment;
    std::sort(seen.begin(), seen.end());
    CHECK(seen == std::vector<int>{0, 1, 2});
}

TEST_CASE("kmeans: two separated blobs are labelled by blob membership") {
    Rng rng(100);
    std::vector<TaskDemand> pts;
    blob(100, 100, 12, 5, 5, rng, pts);
    blob(1000, 900, 10, 5, 5, rng, pts);
    auto c = kmeans(pts, 2, 31);
    check_clustering_invariants(pts, c);
    // every point in the same blob must share a label, and the blobs differ
    for (int i = 1; i < 12; ++i) CHECK(c.assignment[static_cast<std::size_t>(i)] == c.assignment[0]);
    for (std::size_t i = 13; i < pts.size(); ++i) CHECK(c.assignment[i] == c.assignment[12]);
    CHECK(c.assignment[0] != c.assignment[12]);
}

TEST_CASE("kmeans: k out of range and bad demands error") {
    auto pts = points_of({{1, 1}, {2, 2}});
    CHECK_THROWS_AS(kmeans(pts, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(kmeans(pts, 0, 1), std::invalid_argument);
    auto bad = points_of({{1, 1}});
    bad[0].demand[0] = -2.0;
    CHECK_THROWS_AS(kmeans(bad, 1, 1), std::invalid_argument);
}

TEST_CASE("kmeans: deterministic for a fixed seed") {
    Rng rng(7);
    std::vector<TaskDemand> pts;
    blob(50, 50, 30, 30, 3, rng, pts);
    auto a = kmeans(pts, 4, 77);
    auto b = kmeans(pts, 4, 77);
    CHECK(a.assignment == b.assignment);
    CHECK(a.centroids == b.centroids);
    CHECK(a.wcss == b.wcss);
}

TEST_CASE("kmeans: randomized stress keeps the invariants") {
    Rng rng(2021);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<TaskDemand> pts;
        const int n = 5 + static_cast<int>(rng.below(40));
        for (int i = 0; i < n; ++i)
            pts.push_back({"p" + std::to_string(i), {rng.uniform(0, 2000), rng.uniform(0, 3)}});
        const int k = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(std::min(n, 8))));
        auto c = kmeans(pts, k, 1000 + static_cast<std::uint64_t>(trial));
        check_clustering_invariants(pts, c);
    }
}

TEST_CASE("kmeans: duplicate points exercise the empty-cluster reseed") {
    // two coincident heavy points plus a far singleton forces an initial pick
    // of identical centroids for some seed, emptying one cluster
    auto pts = points_of({{5, 5}, {5, 5}, {5, 5}, {400, 2}});
    bool reseed_seen = false;
    for (std::uint64_t seed = 0; seed < 60 && !reseed_seen; ++seed) {
        auto c = kmeans(pts, 3, seed);
        check_clustering_invariants(pts, c);
        if (c.reseeds > 0) reseed_seen = true;
    }
    CHECK(reseed_seen);
}

TEST_CASE("elbow_k: four separated blobs produce four clusters") {
    // pairwise-equidistant blob centres (regular tetrahedron) make the knee
    // at 4 unambiguous: any grouping into fewer clusters is equally bad, so
    // the objective stays flat until K=4 and collapses there
    Rng rng(8);
    const double s = 1000.0;
    const std::vector<std::vector<double>> centers = {
        {0, 0, 0},
        {s, 0, 0},
        {s / 2, s * std::sqrt(3.0) / 2, 0},
        {s / 2, s * std::sqrt(3.0) / 6, s * std::sqrt(2.0 / 3.0)},
    };
    std::vector<TaskDemand> pts;
    for (const auto& c : centers)
        for (int i = 0; i < 15; ++i)
            pts.push_back({"b" + std::to_string(pts.size()),
                           {c[0] + 200 + rng.uniform(-3, 3), c[1] + 200 + rng.uniform(-3, 3),
                            c[2] + 200 + rng.uniform(-3, 3)}});
    CHECK(elbow_k(pts, 8, 5) == 4);
}

TEST_CASE("elbow_k: matches an independent recomputation of the knee rule") {
    Rng rng(907);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<TaskDemand> pts;
        const int n = 10 + static_cast<int>(rng.below(30));
        for (int i = 0; i < n; ++i)
            pts.push_back({"p" + std::to_string(i), {rng.uniform(0, 2000), rng.uniform(0, 3)}});
        const std::uint64_t seed = 40 + static_cast<std::uint64_t>(trial);
        const int got = elbow_k(pts, 8, seed);

        // oracle: recompute the per-K objective and take the max-curvature K,
        // ties to the smaller K
        const int k_top = std::min<int>(8, n);
        std::vector<double> wcss;
        for (int k = 1; k <= k_top; ++k)
            wcss.push_back(kmeans_best(pts, k, derive_seed(seed, static_cast<std::uint64_t>(k))).wcss);
        int best_k = 2;
        double best = -1e300;
        for (int k = 2; k <= k_top - 1; ++k) {
            const double curve = wcss[static_cast<std::size_t>(k - 2)] -
                                 2 * wcss[static_cast<std::size_t>(k - 1)] +
                                 wcss[static_cast<std::size_t>(k)];
            if (curve > best) {
                best = curve;
                best_k = k;
            }
        }
        CHECK(got == best_k);
    }
}

TEST_CASE("elbow_k: degenerate inputs") {
    CHECK(elbow_k(points_of({{1, 1}, {2, 2}}), 8, 3) == 1);  // fewer than 3 points
    CHECK(elbow_k(points_of({{1, 1}}), 8, 3) == 1);
    CHECK_THROWS_AS(elbow_k(points_of({{1, 1}}), 1, 3), std::invalid_argument);
}

TEST_CASE("VmCatalog::standard capacities strictly increase") {
    auto cat = VmCatalog::standard();
    for (int i = 1; i < 4; ++i) {
        const auto& a = cat.types[static_cast<std::size_t>(i - 1)];
        const auto& b = cat.types[static_cast<std::size_t>(i)];
        CHECK(b.pe > a.pe);
        CHECK(b.mips > a.mips);
        CHECK(b.ram_gb > a.ram_gb);
        CHECK(b.storage_gb > a.storage_gb);
    }
    CHECK(cat.by_size(VmSize::Small).mips == 500.0);
    CHECK(cat.by_size(VmSize::XLarge).ram_gb == 3.0);
}

TEST_CASE("select_vm_type follows the band rules") {
    auto cat = VmCatalog::standard();
    SUBCASE("everything within the small instance") {
        CHECK(select_vm_type({100, 0.1}, {500, 0.5}, cat) == VmSize::Small);
    }
    SUBCASE("band between small and medium") {
        CHECK(select_vm_type({600, 0.6}, {1000, 1.0}, cat) == VmSize::Medium);
    }
    SUBCASE("band between medium and large") {
        CHECK(select_vm_type({1100, 1.1}, {1500, 2.0}, cat) == VmSize::Large);
    }
    SUBCASE("beyond the large band lands on Xlarge") {
        CHECK(select_vm_type({1800, 2.5}, {1800, 2.5}, cat) == VmSize::XLarge);
    }
    SUBCASE("boundary demands take the smaller type (inclusive comparison)") {
        CHECK(select_vm_type({500, 0.5}, {500, 0.5}, cat) == VmSize::Small);
        CHECK(select_vm_type({1000, 1.0}, {1000, 1.0}, cat) == VmSize::Medium);
    }
    SUBCASE("straddling cluster falls back to the smallest covering type") {
        // min below the small band, max above it: no band condition holds
        CHECK(select_vm_type({300, 0.2}, {800, 0.8}, cat) == VmSize::Medium);
        CHECK(select_vm_type({300, 0.2}, {1400, 1.5}, cat) == VmSize::Large);
    }
    SUBCASE("mixed resources push to the type covering both") {
        // cpu tiny but memory needs a large instance
        CHECK(select_vm_type({100, 1.8}, {100, 1.8}, cat) == VmSize::Large);
    }
    SUBCASE("demand beyond the largest instance errors") {
        CHECK_THROWS_WITH_AS(select_vm_type({100, 0.1}, {2100, 0.5}, cat),
                             doctest::Contains("largest instance"), std::runtime_error);
    }
}

TEST_CASE("autoscale: homogeneous tiny load becomes one small cluster") {
    std::vector<TaskDemand> tasks;
    for (int i = 0; i < 12; ++i) tasks.push_back({"t" + std::to_string(i), {120.0, 0.2}});
    auto out = autoscale(tasks, VmCatalog::standard(), 5);
    CHECK(out.clustering.k == 1);
    CHECK(out.counts[0] == 12);
    CHECK(out.counts[1] + out.counts[2] + out.counts[3] == 0);
    for (auto s : out.task_type) CHECK(s == VmSize::Small);
}

TEST_CASE("autoscale: conserves tasks and covers every cluster envelope") {
    Rng rng(64);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<TaskDemand> tasks;
        const int n = 20 + static_cast<int>(rng.below(60));
        for (int i = 0; i < n; ++i)
            tasks.push_back({"t" + std::to_string(i), {rng.uniform(10, 2000), rng.uniform(0.05, 3.0)}});
        auto out = autoscale(tasks, VmCatalog::standard(), 900 + static_cast<std::uint64_t>(trial));

        CHECK(out.counts[0] + out.counts[1] + out.counts[2] + out.counts[3] == n);
        REQUIRE(out.task_type.size() == tasks.size());

        const auto cat = VmCatalog::standard();
        // every mapped VM covers its cluster's max demand on both resources
        for (int c = 0; c < out.clustering.k; ++c) {
            double max_cpu = 0, max_mem = 0;
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                if (out.clustering.assignment[i] != c) continue;
                max_cpu = std::max(max_cpu, tasks[i].demand[0]);
                max_mem = std::max(max_mem, tasks[i].demand[1]);
            }
            const auto& vt = cat.by_size(out.cluster_type[static_cast<std::size_t>(c)]);
            CHECK(vt.mips >= max_cpu);
            CHECK(vt.ram_gb >= max_mem);
        }
    }
}

TEST_CASE("autoscale: deterministic and rejects empty input") {
    std::vector<TaskDemand> tasks;
    CHECK_THROWS_AS(autoscale(tasks, VmCatalog::standard(), 1), std::invalid_argument);

    Rng rng(3);
    for (int i = 0; i < 25; ++i)
        tasks.push_back({"t" + std::to_string(i), {rng.uniform(10, 1800), rng.uniform(0.1, 2.8)}});
    auto a = autoscale(tasks, VmCatalog::standard(), 42);
    auto b = autoscale(tasks, VmCatalog::standard(), 42);
    CHECK(a.counts == b.counts);
    CHECK(a.task_type == b.task_type);
}
