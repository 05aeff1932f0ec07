#include "resman/placement.hpp"
#include <set>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace resman {

ServerSpec ServerSpec::s1(const std::string& id) {
    return {id, 2, 2660.0, 4.0, 160.0, 135.0, 93.7, 93.7};
}
ServerSpec ServerSpec::s2(const std::string& id) {
    return {id, 4, 3067.0, 8.0, 250.0, 113.0, 42.3, 42.3};
}
ServerSpec ServerSpec::s3(const std::string& id) {
    return {id, 12, 3067.0, 16.0, 500.0, 222.0, 58.4, 58.4};
}

bool dominates(const PlacementCost& a, const PlacementCost& b) {
    const bool no_worse = a.utilization >= b.utilization && a.power_watts <= b.power_watts;
    const bool better = a.utilization > b.utilization || a.power_watts < b.power_watts;
    return no_worse && better;
}

namespace {

struct Loads {
    std::vector<double> cpu, ram;
};

Loads accumulate(const std::vector<int>& genes, const std::vector<ServerSpec>& servers,
                 const std::vector<VmInstance>& vms) {
    if (genes.size() != vms.size())
        throw std::invalid_argument("placement: gene count must equal VM count");
    Loads l;
    l.cpu.assign(servers.size(), 0.0);
    l.ram.assign(servers.size(), 0.0);
    for (std::size_t j = 0; j < vms.size(); ++j) {
        const int s = genes[j];
        if (s < 0 || static_cast<std::size_t>(s) >= servers.size())
            throw std::invalid_argument("placement: gene " + std::to_string(j) + " out of range");
        l.cpu[static_cast<std::size_t>(s)] += vms[j].cpu_mips;
        l.ram[static_cast<std::size_t>(s)] += vms[j].ram_gb;
    }
    return l;
}

}  // namespace

Feasibility feasibility(const std::vector<int>& genes, const std::vector<ServerSpec>& servers,
                        const std::vector<VmInstance>& vms) {
    const Loads l = accumulate(genes, servers, vms);
    Feasibility f;
    f.slack.resize(servers.size());
    for (std::size_t i = 0; i < servers.size(); ++i) {
        f.slack[i] = {servers[i].cpu_capacity() - l.cpu[i], servers[i].ram_gb - l.ram[i]};
        if (f.slack[i][0] < 0.0 || f.slack[i][1] < 0.0) f.ok = false;
    }
    return f;
}

int active_server_count(const std::vector<int>& genes, std::size_t server_count) {
    std::vector<bool> active(server_count, false);
    for (int g : genes) active[static_cast<std::size_t>(g)] = true;
    return static_cast<int>(std::count(active.begin(), active.end(), true));
}

double resource_utilization(const std::vector<int>& genes, const std::vector<ServerSpec>& servers,
                            const std::vector<VmInstance>& vms) {
    const Loads l = accumulate(genes, servers, vms);
    double cpu_frac = 0.0, ram_frac = 0.0;
    int active = 0;
    for (std::size_t i = 0; i < servers.size(); ++i) {
        if (l.cpu[i] == 0.0 && l.ram[i] == 0.0) continue;
        ++active;
        cpu_frac += l.cpu[i] / servers[i].cpu_capacity();
        ram_frac += l.ram[i] / servers[i].ram_gb;
    }
    if (active == 0) return 0.0;
    return (cpu_frac + ram_frac) / (2.0 * active);
}

double power_watts(const std::vector<int>& genes, const std::vector<ServerSpec>& servers,
                   const std::vector<VmInstance>& vms) {
    const Loads l = accumulate(genes, servers, vms);
    std::vector<bool> active(servers.size(), false);
    for (int g : genes) active[static_cast<std::size_t>(g)] = true;
    double total = 0.0;
    for (std::size_t i = 0; i < servers.size(); ++i) {
        if (!active[i]) continue;  // powered off
        const double frac = l.cpu[i] / servers[i].cpu_capacity();
        total += (servers[i].pw_max - servers[i].pw_min) * frac + servers[i].pw_idle;
    }
    return total;
}

PlacementCost evaluate_cost(const std::vector<int>& genes, const std::vector<ServerSpec>& servers,
                            const std::vector<VmInstance>& vms) {
    return {resource_utilization(genes, servers, vms), power_watts(genes, servers, vms)};
}

std::vector<std::vector<int>> non_dominated_fronts(const std::vector<PlacementCost>& costs) {
    const std::size_t n = costs.size();
    std::vector<std::vector<int>> dominated_by_me(n);  // indices i dominates
    std::vector<int> dominator_count(n, 0);

    std::vector<std::vector<int>> fronts;
    std::vector<int> first;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (dominates(costs[i], costs[j]))
                dominated_by_me[i].push_back(static_cast<int>(j));
            else if (dominates(costs[j], costs[i]))
                ++dominator_count[i];
        }
        if (dominator_count[i] == 0) first.push_back(static_cast<int>(i));
    }
    if (first.empty()) return fronts;  // only possible when costs is empty
    fronts.push_back(std::move(first));

    std::size_t current = 0;
    while (current < fronts.size()) {
        std::vector<int> next;
        for (int i : fronts[current]) {
            for (int j : dominated_by_me[static_cast<std::size_t>(i)]) {
                if (--dominator_count[static_cast<std::size_t>(j)] == 0) next.push_back(j);
            }
        }
        if (!next.empty()) fronts.push_back(std::move(next));
        ++current;
    }
    return fronts;
}

void check_aggregate_feasible(const std::vector<ServerSpec>& servers,
                              const std::vector<VmInstance>& vms) {
    double cpu = 0, ram = 0, cap_cpu = 0, cap_ram = 0;
    for (const auto& v : vms) {
        cpu += v.cpu_mips;
        ram += v.ram_gb;
    }
    for (const auto& s : servers) {
        cap_cpu += s.cpu_capacity();
        cap_ram += s.ram_gb;
    }
    if (cpu > cap_cpu || ram > cap_ram)
        throw std::runtime_error("infeasible instance: aggregate demand exceeds datacenter capacity");
}

std::optional<std::vector<int>> repair(std::vector<int> genes, const std::vector<ServerSpec>& servers,
                                       const std::vector<VmInstance>& vms) {
    Loads l = accumulate(genes, servers, vms);

    std::vector<std::size_t> evicted;
    for (std::size_t i = 0; i < servers.size(); ++i) {
        if (l.cpu[i] <= servers[i].cpu_capacity() && l.ram[i] <= servers[i].ram_gb) continue;
        // walk the VMs on this server newest-first until it fits
        for (std::size_t jj = vms.size(); jj-- > 0;) {
            if (genes[jj] != static_cast<int>(i)) continue;
            evicted.push_back(jj);
            l.cpu[i] -= vms[jj].cpu_mips;
            l.ram[i] -= vms[jj].ram_gb;
            genes[jj] = -1;
            if (l.cpu[i] <= servers[i].cpu_capacity() && l.ram[i] <= servers[i].ram_gb) break;
        }
    }

    // oldest evictions first keeps the walk order stable
    std::reverse(evicted.begin(), evicted.end());
    for (std::size_t jj : evicted) {
        int choice = -1;
        double choice_density = std::numeric_limits<double>::infinity();
        bool choice_active = false;
        for (std::size_t i = 0; i < servers.size(); ++i) {
            if (l.cpu[i] + vms[jj].cpu_mips > servers[i].cpu_capacity()) continue;
            if (l.ram[i] + vms[jj].ram_gb > servers[i].ram_gb) continue;
            const bool active = l.cpu[i] > 0.0 || l.ram[i] > 0.0;
            const double density = servers[i].power_density();
            // active servers first, then lowest density, then lowest index
            if (choice < 0 || (active && !choice_active) ||
                (active == choice_active && density < choice_density)) {
                choice = static_cast<int>(i);
                choice_density = density;
                choice_active = active;
            }
        }
        if (choice < 0) return std::nullopt;
        genes[jj] = choice;
        l.cpu[static_cast<std::size_t>(choice)] += vms[jj].cpu_mips;
        l.ram[static_cast<std::size_t>(choice)] += vms[jj].ram_gb;
    }
    return genes;
}

namespace {

Allocation finish_allocation(std::vector<int> genes, const std::vector<ServerSpec>& servers,
                             const std::vector<VmInstance>& vms) {
    Allocation a;
    a.cost = evaluate_cost(genes, servers, vms);
    a.active_servers = active_server_count(genes, servers.size());
    a.genes = std::move(genes);
    return a;
}

}  // namespace

GaResult place_ga(const std::vector<VmInstance>& vms, const std::vector<ServerSpec>& servers,
                  const GaConfig& config) {
    if (servers.empty()) throw std::invalid_argument("place_ga: no servers");
    if (config.population < 2) throw std::invalid_argument("place_ga: population must be >= 2");
    check_aggregate_feasible(servers, vms);

    GaResult result;
    if (vms.empty()) {
        result.best = finish_allocation({}, servers, vms);
        return result;
    }

    Rng rng(config.seed);
    const std::size_t q = vms.size();
    const std::size_t p = servers.size();

    struct Member {
        std::vector<int> genes;
        PlacementCost cost;
    };
    std::vector<Member> pop;
    pop.reserve(static_cast<std::size_t>(config.population));
    std::vector<std::size_t> shuffled(p);
    int attempts = 0;
    while (pop.size() < static_cast<std::size_t>(config.population)) {
        if (++attempts > config.population * 200)
            throw std::runtime_error("infeasible instance: could not build a feasible population");
        // random allocation over a random-sized server subset; small subsets
        // seed consolidated members, full ones keep the spread-out extreme
        for (std::size_t i = 0; i < p; ++i) shuffled[i] = i;
        const std::size_t subset = 1 + rng.below(p);
        for (std::size_t i = 0; i < subset; ++i)
            std::swap(shuffled[i], shuffled[i + rng.below(p - i)]);
        std::vector<int> genes(q);
        for (auto& g : genes) g = static_cast<int>(shuffled[rng.below(subset)]);
        auto fixed = repair(std::move(genes), servers, vms);
        if (!fixed) continue;
        Member m;
        m.genes = std::move(*fixed);
        m.cost = evaluate_cost(m.genes, servers, vms);
        pop.push_back(std::move(m));
    }

    const auto mutate_genes = [&](std::vector<int>& genes) {
        for (auto& g : genes)
            if (rng.uniform() < config.mutation_rate) g = static_cast<int>(rng.below(p));
    };

    for (int gen = 0; gen < config.generations; ++gen) {
        std::vector<Member> pool = pop;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            const std::size_t mate = rng.below(pop.size());
            std::vector<int> c1, c2;
            if (q >= 2 && rng.uniform() < config.crossover_rate) {
                const std::size_t cp = 1 + rng.below(q - 1);
                c1.assign(pop[i].genes.begin(), pop[i].genes.end());
                std::copy(pop[mate].genes.begin() + static_cast<long>(cp), pop[mate].genes.end(),
                          c1.begin() + static_cast<long>(cp));
                c2.assign(pop[mate].genes.begin(), pop[mate].genes.end());
                std::copy(pop[i].genes.begin() + static_cast<long>(cp), pop[i].genes.end(),
                          c2.begin() + static_cast<long>(cp));
            } else {
                c1 = pop[i].genes;
                c2 = pop[mate].genes;
            }
            mutate_genes(c1);
            mutate_genes(c2);
            for (auto* child : {&c1, &c2}) {
                auto fixed = repair(std::move(*child), servers, vms);
                if (!fixed) {
                    ++result.discarded_children;
                    continue;
                }
                Member m;
                m.genes = std::move(*fixed);
                m.cost = evaluate_cost(m.genes, servers, vms);
                pool.push_back(std::move(m));
            }
        }

        std::vector<PlacementCost> costs;
        costs.reserve(pool.size());
        for (const auto& m : pool) costs.push_back(m.cost);
        const auto fronts = non_dominated_fronts(costs);
        std::vector<int> rank(pool.size(), 0);
        for (std::size_t f = 0; f < fronts.size(); ++f)
            for (int idx : fronts[f]) rank[static_cast<std::size_t>(idx)] = static_cast<int>(f);

        std::vector<std::size_t> order(pool.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (rank[a] != rank[b]) return rank[a] < rank[b];
            if (pool[a].cost.power_watts != pool[b].cost.power_watts)
                return pool[a].cost.power_watts < pool[b].cost.power_watts;
            return pool[a].cost.utilization > pool[b].cost.utilization;
        });

        // survivors: best first, duplicates last, so the elitist truncation
        // does not collapse the population onto clones of one allocation
        std::vector<Member> next;
        next.reserve(pop.size());
        std::vector<std::size_t> skipped;
        std::set<std::vector<int>> seen;
        for (std::size_t s = 0; s < order.size() && next.size() < pop.size(); ++s) {
            if (seen.insert(pool[order[s]].genes).second)
                next.push_back(pool[order[s]]);
            else
                skipped.push_back(order[s]);
        }
        for (std::size_t s = 0; s < skipped.size() && next.size() < pop.size(); ++s)
            next.push_back(pool[skipped[s]]);
        pop = std::move(next);
        result.best_power_history.push_back(pop.front().cost.power_watts);
    }

    // return the front-1 member with minimum power, ties to max utilization
    std::vector<PlacementCost> costs;
    costs.reserve(pop.size());
    for (const auto& m : pop) costs.push_back(m.cost);
    const auto fronts = non_dominated_fronts(costs);
    const Member* best = nullptr;
    for (int idx : fronts.front()) {
        const Member& m = pop[static_cast<std::size_t>(idx)];
        if (!best || m.cost.power_watts < best->cost.power_watts ||
            (m.cost.power_watts == best->cost.power_watts &&
             m.cost.utilization > best->cost.utilization))
            best = &m;
    }
    result.best = finish_allocation(best->genes, servers, vms);
    return result;
}

Allocation place_best_fit(const std::vector<VmInstance>& vms, const std::vector<ServerSpec>& servers) {
    if (servers.empty()) throw std::invalid_argument("place_best_fit: no servers");
    std::vector<double> cpu(servers.size(), 0.0), ram(servers.size(), 0.0);
    std::vector<int> genes(vms.size(), -1);
    for (std::size_t j = 0; j < vms.size(); ++j) {
        int choice = -1;
        double best_cpu_slack = std::numeric_limits<double>::infinity();
        double best_ram_slack = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < servers.size(); ++i) {
            const double cpu_after = servers[i].cpu_capacity() - cpu[i] - vms[j].cpu_mips;
            const double ram_after = servers[i].ram_gb - ram[i] - vms[j].ram_gb;
            if (cpu_after < 0.0 || ram_after < 0.0) continue;
            if (cpu_after < best_cpu_slack ||
                (cpu_after == best_cpu_slack && ram_after < best_ram_slack)) {
                choice = static_cast<int>(i);
                best_cpu_slack = cpu_after;
                best_ram_slack = ram_after;
            }
        }
        if (choice < 0)
            throw std::runtime_error("place_best_fit: no feasible server for VM '" + vms[j].id + "'");
        genes[j] = choice;
        cpu[static_cast<std::size_t>(choice)] += vms[j].cpu_mips;
        ram[static_cast<std::size_t>(choice)] += vms[j].ram_gb;
    }
    return finish_allocation(std::move(genes), servers, vms);
}

Allocation place_random_fit(const std::vector<VmInstance>& vms, const std::vector<ServerSpec>& servers,
                            std::uint64_t seed) {
    if (servers.empty()) throw std::invalid_argument("place_random_fit: no servers");
    Rng rng(seed);
    std::vector<double> cpu(servers.size(), 0.0), ram(servers.size(), 0.0);
    std::vector<int> genes(vms.size(), -1);
    std::vector<int> feasible;
    for (std::size_t j = 0; j < vms.size(); ++j) {
        feasible.clear();
        for (std::size_t i = 0; i < servers.size(); ++i) {
            if (cpu[i] + vms[j].cpu_mips > servers[i].cpu_capacity()) continue;
            if (ram[i] + vms[j].ram_gb > servers[i].ram_gb) continue;
            feasible.push_back(static_cast<int>(i));
        }
        if (feasible.empty())
            throw std::runtime_error("place_random_fit: no feasible server for VM '" + vms[j].id + "'");
        genes[j] = feasible[rng.below(feasible.size())];
        cpu[static_cast<std::size_t>(genes[j])] += vms[j].cpu_mips;
        ram[static_cast<std::size_t>(genes[j])] += vms[j].ram_gb;
    }
    return finish_allocation(std::move(genes), servers, vms);
}

}  // namespace resman
