#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "resman/placement.hpp"

using namespace resman;

namespace {

VmInstance vm_of(std::string id, VmSize type, double cpu, double ram) {
    return {std::move(id), type, cpu, ram};
}

VmInstance typed_vm(std::string id, VmSize type) {
    const auto cat = VmCatalog::standard();
    const auto& t = cat.by_size(type);
    return {std::move(id), type, t.mips, t.ram_gb};  // provisioned at full type capacity
}

// brute-force front decomposition: repeatedly peel the mutually non-dominated
// subset, using only the dominance predicate
std::vector<std::vector<int>> fronts_oracle(const std::vector<PlacementCost>& costs) {
    std::vector<int> remaining(costs.size());
    for (std::size_t i = 0; i < costs.size(); ++i) remaining[i] = static_cast<int>(i);
    std::vector<std::vector<int>> fronts;
    while (!remaining.empty()) {
        std::vector<int> front, rest;
        for (int i : remaining) {
            bool dominated = false;
            for (int j : remaining)
                if (i != j && dominates(costs[static_cast<std::size_t>(j)],
                                        costs[static_cast<std::size_t>(i)])) {
                    dominated = true;
                    break;
                }
            (dominated ? rest : front).push_back(i);
        }
        fronts.push_back(std::move(front));
        remaining = std::move(rest);
    }
    return fronts;
}

// exhaustive minimum power over all feasible assignments
double optimum_power(const std::vector<VmInstance>& vms, const std::vector<ServerSpec>& servers) {
    const std::size_t q = vms.size(), p = servers.size();
    std::vector<int> genes(q, 0);
    double best = std::numeric_limits<double>::infinity();
    for (;;) {
        if (feasibility(genes, servers, vms).ok)
            best = std::min(best, power_watts(genes, servers, vms));
        std::size_t pos = 0;
        while (pos < q && ++genes[pos] == static_cast<int>(p)) genes[pos++] = 0;
        if (pos == q) break;
    }
    return best;
}

}  // namespace

TEST_CASE("server specs match the reference machines") {
    const auto s1 = ServerSpec::s1();
    CHECK(s1.cpu_capacity() == doctest::Approx(5320.0));
    CHECK(s1.ram_gb == 4.0);
    CHECK(ServerSpec::s2().cpu_capacity() == doctest::Approx(12268.0));
    CHECK(ServerSpec::s3().cpu_capacity() == doctest::Approx(36804.0));
}

TEST_CASE("feasibility: empty VM list leaves full slack") {
    const std::vector<ServerSpec> servers{ServerSpec::s1(), ServerSpec::s2()};
    auto f = feasibility({}, servers, {});
    CHECK(f.ok);
    CHECK(f.slack[0][0] == doctest::Approx(5320.0));
    CHECK(f.slack[0][1] == doctest::Approx(4.0));
    CHECK(f.slack[1][0] == doctest::Approx(12268.0));
}

TEST_CASE("feasibility: a small VM fits S1, eleven do not") {
    const std::vector<ServerSpec> servers{ServerSpec::s1()};
    {
        const std::vector<VmInstance> one{typed_vm("v0", VmSize::Small)};
        CHECK(feasibility({0}, servers, one).ok);
    }
    {
        std::vector<VmInstance> eleven;
        std::vector<int> genes(11, 0);
        for (int i = 0; i < 11; ++i) eleven.push_back(typed_vm("v" + std::to_string(i), VmSize::Small));
        auto f = feasibility(genes, servers, eleven);
        CHECK(!f.ok);
        CHECK(f.slack[0][0] == doctest::Approx(5320.0 - 5500.0));  // CPU overload
    }
}

TEST_CASE("resource_utilization") {
    SUBCASE("no VMs scores zero") {
        const std::vector<ServerSpec> servers{ServerSpec::s1()};
        CHECK(resource_utilization({}, servers, {}) == 0.0);
    }
    SUBCASE("one fully packed server scores one") {
        ServerSpec s{"T", 1, 1000.0, 2.0, 10.0, 100.0, 50.0, 50.0};
        const std::vector<VmInstance> vms{vm_of("a", VmSize::XLarge, 1000.0, 2.0)};
        CHECK(resource_utilization({0}, {s}, vms) == doctest::Approx(1.0));
    }
    SUBCASE("S2 hosting one medium VM") {
        const std::vector<ServerSpec> servers{ServerSpec::s2()};
        const std::vector<VmInstance> vms{typed_vm("m", VmSize::Medium)};
        const double expected = (1000.0 / 12268.0 + 1.0 / 8.0) / 2.0;
        CHECK(resource_utilization({0}, servers, vms) == doctest::Approx(expected).epsilon(1e-9));
        CHECK(expected == doctest::Approx(0.1032).epsilon(1e-3));
    }
    SUBCASE("inactive servers do not dilute the mean") {
        const std::vector<ServerSpec> servers{ServerSpec::s2(), ServerSpec::s1()};
        const std::vector<VmInstance> vms{typed_vm("m", VmSize::Medium)};
        const double expected = (1000.0 / 12268.0 + 1.0 / 8.0) / 2.0;
        CHECK(resource_utilization({0}, servers, vms) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("power model point values") {
    const std::vector<ServerSpec> servers{ServerSpec::s1()};
    SUBCASE("no active servers draw nothing") { CHECK(power_watts({}, servers, {}) == 0.0); }
    SUBCASE("S1 at full CPU load draws 135 W") {
        // 2000+2000+660+660 = 5320 MIPS, RAM 1+1+1+1 = 4 GB
        std::vector<VmInstance> vms{vm_of("a", VmSize::XLarge, 2000, 1), vm_of("b", VmSize::XLarge, 2000, 1),
                                    vm_of("c", VmSize::Medium, 660, 1), vm_of("d", VmSize::Medium, 660, 1)};
        CHECK(power_watts({0, 0, 0, 0}, servers, vms) == doctest::Approx(135.0).epsilon(1e-12));
    }
    SUBCASE("S1 active but idle draws 93.7 W") {
        std::vector<VmInstance> vms{vm_of("z", VmSize::Small, 0.0, 0.5)};
        CHECK(power_watts({0}, servers, vms) == doctest::Approx(93.7).epsilon(1e-12));
    }
}

TEST_CASE("power is monotone in added VMs") {
    Rng rng(15);
    const std::vector<ServerSpec> servers{ServerSpec::s1(), ServerSpec::s2(), ServerSpec::s3()};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<VmInstance> vms;
        std::vector<int> genes;
        const int n = 1 + static_cast<int>(rng.below(6));
        for (int j = 0; j < n; ++j) {
            vms.push_back(vm_of("v" + std::to_string(j), VmSize::Small, rng.uniform(0, 400),
                                rng.uniform(0.05, 0.5)));
            genes.push_back(static_cast<int>(rng.below(servers.size())));
        }
        const double before = power_watts(genes, servers, vms);
        vms.push_back(vm_of("extra", VmSize::Small, rng.uniform(0, 400), rng.uniform(0.05, 0.5)));
        genes.push_back(static_cast<int>(rng.below(servers.size())));
        CHECK(power_watts(genes, servers, vms) >= before - 1e-12);
    }
}

TEST_CASE("dominates") {
    CHECK(dominates({0.7, 100}, {0.6, 120}));       // better on both
    CHECK(!dominates({0.7, 100}, {0.7, 100}));      // equal never dominates
    CHECK(!dominates({0.7, 100}, {0.8, 110}));      // trade-off pair
    CHECK(!dominates({0.8, 110}, {0.7, 100}));
    CHECK(dominates({0.8, 90}, {0.7, 100}));        // better on both again
    CHECK(dominates({0.7, 100}, {0.7, 110}));       // same utilization, less power

    Rng rng(77);
    for (int i = 0; i < 300; ++i) {
        PlacementCost a{rng.uniform(), rng.uniform(0, 300)};
        PlacementCost b{rng.uniform(), rng.uniform(0, 300)};
        CHECK(!dominates(a, a));                       // irreflexive
        CHECK(!(dominates(a, b) && dominates(b, a)));  // antisymmetric
    }
}

TEST_CASE("non_dominated_fronts: degenerate shapes") {
    SUBCASE("single point") {
        auto fronts = non_dominated_fronts({{0.5, 100}});
        REQUIRE(fronts.size() == 1);
        CHECK(fronts[0] == std::vector<int>{0});
    }
    SUBCASE("a dominance chain peels one front per element") {
        auto fronts = non_dominated_fronts({{0.9, 50}, {0.8, 60}, {0.7, 70}});
        REQUIRE(fronts.size() == 3);
        CHECK(fronts[0] == std::vector<int>{0});
        CHECK(fronts[1] == std::vector<int>{1});
        CHECK(fronts[2] == std::vector<int>{2});
    }
    SUBCASE("empty input") { CHECK(non_dominated_fronts({}).empty()); }
}

TEST_CASE("non_dominated_fronts matches the pairwise oracle") {
    Rng rng(404);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<PlacementCost> costs;
        const int n = 1 + static_cast<int>(rng.below(50));
        for (int i = 0; i < n; ++i) {
            // duplicates included on purpose
            if (i > 0 && rng.uniform() < 0.2)
                costs.push_back(costs[rng.below(costs.size())]);
            else
                costs.push_back({rng.uniform(), std::floor(rng.uniform(50, 400))});
        }
        auto got = non_dominated_fronts(costs);
        auto want = fronts_oracle(costs);
        REQUIRE(got.size() == want.size());
        for (std::size_t f = 0; f < got.size(); ++f) {
            std::set<int> a(got[f].begin(), got[f].end());
            std::set<int> b(want[f].begin(), want[f].end());
            CHECK(a == b);
        }
    }
}

TEST_CASE("repair") {
    const std::vector<ServerSpec> servers{ServerSpec::s1("A"), ServerSpec::s1("B")};
    SUBCASE("feasible genes come back unchanged") {
        std::vector<VmInstance> vms{typed_vm("a", VmSize::Small), typed_vm("b", VmSize::Small)};
        auto fixed = repair({0, 1}, servers, vms);
        REQUIRE(fixed.has_value());
        CHECK(*fixed == std::vector<int>{0, 1});
    }
    SUBCASE("one overloaded server spills its newest VM to the empty one") {
        // RAM overload on A: 9 smalls = 4.5 GB > 4 GB
        std::vector<VmInstance> vms;
        std::vector<int> genes(9, 0);
        for (int i = 0; i < 9; ++i) vms.push_back(typed_vm("v" + std::to_string(i), VmSize::Small));
        auto fixed = repair(genes, servers, vms);
        REQUIRE(fixed.has_value());
        CHECK(feasibility(*fixed, servers, vms).ok);
        CHECK((*fixed)[8] == 1);  // the most recently assigned VM moved
        for (int i = 0; i < 8; ++i) CHECK((*fixed)[static_cast<std::size_t>(i)] == 0);
    }
    SUBCASE("impossible loads signal failure") {
        std::vector<VmInstance> vms;
        std::vector<int> genes(20, 0);
        for (int i = 0; i < 20; ++i) vms.push_back(typed_vm("v" + std::to_string(i), VmSize::XLarge));
        CHECK(!repair(genes, servers, vms).has_value());
        CHECK_THROWS_WITH_AS(check_aggregate_feasible(servers, vms),
                             doctest::Contains("infeasible instance"), std::runtime_error);
    }
}

TEST_CASE("place_ga: a forced instance and determinism") {
    const std::vector<ServerSpec> servers{ServerSpec::s1()};
    const std::vector<VmInstance> vms{typed_vm("only", VmSize::Medium)};
    GaConfig cfg;
    cfg.generations = 10;
    cfg.seed = 3;
    auto a = place_ga(vms, servers, cfg);
    CHECK(a.best.genes == std::vector<int>{0});
    CHECK(a.best.cost.power_watts ==
          doctest::Approx((135.0 - 93.7) * (1000.0 / 5320.0) + 93.7).epsilon(1e-12));
    CHECK(a.best.active_servers == 1);

    auto b = place_ga(vms, servers, cfg);
    CHECK(a.best.genes == b.best.genes);
    CHECK(a.best.cost.power_watts == b.best.cost.power_watts);
}

TEST_CASE("place_ga: near-optimal against the exhaustive oracle, elitist in power") {
    Rng rng(2222);
    const std::vector<ServerSpec> all{ServerSpec::s1("S1"), ServerSpec::s2("S2"), ServerSpec::s3("S3")};
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<ServerSpec> servers(all.begin(), all.begin() + 2 + rng.below(2));
        std::vector<VmInstance> vms;
        const int q = 3 + static_cast<int>(rng.below(3));
        for (int j = 0; j < q; ++j)
            vms.push_back(typed_vm("v" + std::to_string(j),
                                   static_cast<VmSize>(rng.below(3))));  // up to large
        if (!feasibility(std::vector<int>(vms.size(), 0), servers, vms).ok &&
            !repair(std::vector<int>(vms.size(), 0), servers, vms))
            continue;

        GaConfig cfg;
        cfg.generations = 120;
        cfg.seed = 50 + static_cast<std::uint64_t>(trial);
        auto res = place_ga(vms, servers, cfg);
        CHECK(feasibility(res.best.genes, servers, vms).ok);

        const double opt = optimum_power(vms, servers);
        CHECK(res.best.cost.power_watts <= 1.05 * opt + 1e-9);

        for (std::size_t g = 1; g < res.best_power_history.size(); ++g)
            CHECK(res.best_power_history[g] <= res.best_power_history[g - 1] + 1e-12);
    }
}

TEST_CASE("place_ga: empty VM list is a zero-cost allocation") {
    GaConfig cfg;
    auto res = place_ga({}, {ServerSpec::s1()}, cfg);
    CHECK(res.best.genes.empty());
    CHECK(res.best.cost.power_watts == 0.0);
    CHECK(res.best.active_servers == 0);
}

TEST_CASE("place_best_fit") {
    SUBCASE("tightest feasible server wins") {
        // both fit; B leaves 10 MIPS slack vs A's 100
        ServerSpec a{"A", 1, 1000.0, 64.0, 100.0, 100.0, 50.0, 50.0};
        ServerSpec b{"B", 1, 910.0, 64.0, 100.0, 100.0, 50.0, 50.0};
        const std::vector<VmInstance> vms{vm_of("v", VmSize::Small, 900.0, 0.5)};
        auto alloc = place_best_fit(vms, {a, b});
        CHECK(alloc.genes == std::vector<int>{1});
    }
    SUBCASE("an unplaceable VM errors with its id") {
        const std::vector<VmInstance> vms{vm_of("huge", VmSize::XLarge, 99999.0, 1.0)};
        CHECK_THROWS_WITH_AS(place_best_fit(vms, {ServerSpec::s1()}), doctest::Contains("huge"),
                             std::runtime_error);
    }
    SUBCASE("filling a server exactly, then spilling to the next-tightest") {
        ServerSpec x{"X", 1, 1000.0, 64.0, 100.0, 100.0, 50.0, 50.0};
        ServerSpec y{"Y", 1, 2000.0, 64.0, 100.0, 100.0, 50.0, 50.0};
        std::vector<VmInstance> vms{vm_of("a", VmSize::Medium, 600.0, 1.0),
                                    vm_of("b", VmSize::Small, 400.0, 1.0),
                                    vm_of("c", VmSize::Small, 300.0, 1.0)};
        auto alloc = place_best_fit(vms, {x, y});
        CHECK(alloc.genes == std::vector<int>{0, 0, 1});
        CHECK(feasibility(alloc.genes, {x, y}, vms).ok);
    }
}

TEST_CASE("place_random_fit") {
    SUBCASE("single feasible server is forced") {
        const std::vector<ServerSpec> servers{ServerSpec::s1()};
        const std::vector<VmInstance> vms{typed_vm("v", VmSize::Small)};
        CHECK(place_random_fit(vms, servers, 9).genes == std::vector<int>{0});
    }
    SUBCASE("fixed seed reproduces") {
        const std::vector<ServerSpec> servers{ServerSpec::s1(), ServerSpec::s2(), ServerSpec::s3()};
        std::vector<VmInstance> vms;
        for (int i = 0; i < 10; ++i) vms.push_back(typed_vm("v" + std::to_string(i), VmSize::Small));
        CHECK(place_random_fit(vms, servers, 31).genes == place_random_fit(vms, servers, 31).genes);
    }
    SUBCASE("two equal feasible servers split about 50/50") {
        const std::vector<ServerSpec> servers{ServerSpec::s1("A"), ServerSpec::s1("B")};
        const std::vector<VmInstance> vms{typed_vm("v", VmSize::Small)};
        int first = 0;
        for (std::uint64_t seed = 0; seed < 1000; ++seed)
            if (place_random_fit(vms, servers, seed).genes[0] == 0) ++first;
        CHECK(first > 450);
        CHECK(first < 550);
    }
    SUBCASE("no feasible server errors") {
        const std::vector<VmInstance> vms{vm_of("v", VmSize::XLarge, 99999.0, 1.0)};
        CHECK_THROWS_AS(place_random_fit(vms, {ServerSpec::s1()}, 1), std::runtime_error);
    }
}
