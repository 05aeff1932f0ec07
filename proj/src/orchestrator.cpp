#include "resman/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace resman {

const char* to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::OA: return "OA";
        case ScenarioKind::PA: return "PA";
        case ScenarioKind::PWA: return "PWA";
        case ScenarioKind::WPWA: return "WPWA";
    }
    return "?";
}

const char* to_string(PlacementEngine engine) {
    switch (engine) {
        case PlacementEngine::Ga: return "ga";
        case PlacementEngine::BestFit: return "best-fit";
        case PlacementEngine::RandomFit: return "random-fit";
    }
    return "?";
}

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct TaskPredictor {
    DeTrainer trainer;
    std::vector<ResourceBounds> bounds;  // at the last prediction
    std::vector<double> last_pred;       // raw normalized outputs
    bool has_pred = false;
    std::vector<double> err_prev{0.0, 0.0}, err_curr{0.0, 0.0};

    TaskPredictor(const Topology& t, const TrainerConfig& cfg) : trainer(t, cfg) {}
};

TaskSeries prefix_of(const TaskSeries& s, std::size_t count) {
    TaskSeries p;
    p.vm_id = s.vm_id;
    p.interval_minutes = s.interval_minutes;
    p.resources = s.resources;
    p.timestamps.assign(s.timestamps.begin(), s.timestamps.begin() + static_cast<long>(count));
    p.demands.assign(s.demands.begin(), s.demands.begin() + static_cast<long>(count));
    return p;
}

// Metrics charge the workload the tasks actually present, not the
// reservation the placement packed; scenario differences then flow purely
// through the chosen allocations and the violation counts. Per-server
// fractions saturate at 1 for the rare case where actuals exceed what was
// reserved.
struct ChargedMetrics {
    double ru = 0.0;
    double power_watts = 0.0;
};

ChargedMetrics charge_actuals(const std::vector<int>& genes, const std::vector<ServerSpec>& servers,
                              const std::vector<std::array<double, 2>>& used) {
    std::vector<double> cpu(servers.size(), 0.0), ram(servers.size(), 0.0);
    std::vector<bool> active(servers.size(), false);
    for (std::size_t j = 0; j < genes.size(); ++j) {
        const auto s = static_cast<std::size_t>(genes[j]);
        cpu[s] += used[j][0];
        ram[s] += used[j][1];
        active[s] = true;
    }
    ChargedMetrics out;
    int count = 0;
    for (std::size_t i = 0; i < servers.size(); ++i) {
        if (!active[i]) continue;
        ++count;
        const double fc = std::min(1.0, cpu[i] / servers[i].cpu_capacity());
        const double fm = std::min(1.0, ram[i] / servers[i].ram_gb);
        out.ru += (fc + fm) / 2.0;
        out.power_watts += (servers[i].pw_max - servers[i].pw_min) * fc + servers[i].pw_idle;
    }
    if (count > 0) out.ru /= count;
    return out;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& scenario, const std::vector<TaskSeries>& raw_traces,
                            const std::vector<ServerSpec>& servers, const VmCatalog& catalog,
                            const OrchestratorConfig& config, std::uint64_t seed) {
    if (raw_traces.empty()) throw std::invalid_argument("run_scenario: no traces");
    if (servers.empty()) throw std::invalid_argument("run_scenario: no servers");

    std::vector<TaskSeries> traces;
    traces.reserve(raw_traces.size());
    for (const auto& t : raw_traces) traces.push_back(aggregate(t, config.pws_minutes));

    std::size_t horizon = traces.front().size();
    for (const auto& t : traces) {
        horizon = std::min(horizon, t.size());
        if (t.resources.size() != 2)
            throw std::invalid_argument("run_scenario: traces must carry exactly [cpu, mem]");
    }
    const int warmup = config.warmup_intervals;
    const bool predictive = scenario.kind == ScenarioKind::PA || scenario.kind == ScenarioKind::PWA;
    if (horizon < static_cast<std::size_t>(warmup) + 2)
        throw std::invalid_argument("run_scenario: traces cover " + std::to_string(horizon) +
                                    " intervals; need at least warmup+2 = " +
                                    std::to_string(warmup + 2));
    if (predictive && warmup < config.topology.lags + 2)
        throw std::invalid_argument("run_scenario: warmup must cover at least lags+2 intervals");

    const std::size_t ntasks = traces.size();
    std::vector<TaskPredictor> predictors;
    if (predictive) {
        predictors.reserve(ntasks);
        for (std::size_t v = 0; v < ntasks; ++v) {
            TrainerConfig cfg = config.trainer;
            cfg.seed = derive_seed(seed, 7000 + v);
            predictors.emplace_back(config.topology, cfg);
        }
    }

    ScenarioResult result;
    result.scenario = scenario;
    std::vector<int> prev_genes;
    std::vector<std::string> prev_ids;
    bool prev_ok = false;

    for (std::size_t t = static_cast<std::size_t>(warmup) - 1; t + 1 < horizon; ++t) {
        const int interval = static_cast<int>(t) + 1;
        IntervalMetrics m;
        m.interval = interval;
        m.prediction_error = {kNan, kNan};

        // demand the VMs are provisioned for, as a fraction of the reference
        std::vector<std::array<double, 2>> provision(ntasks);
        double pred_err_cpu = 0.0, pred_err_mem = 0.0;
        try {
            for (std::size_t v = 0; v < ntasks; ++v) {
                const auto& series = traces[v];
                switch (scenario.kind) {
                    case ScenarioKind::OA:
                        provision[v] = {series.demands[t + 1][0], series.demands[t + 1][1]};
                        break;
                    case ScenarioKind::WPWA: {
                        double cpu = 0.0, mem = 0.0;
                        for (std::size_t i = 0; i <= t; ++i) {
                            cpu = std::max(cpu, series.demands[i][0]);
                            mem = std::max(mem, series.demands[i][1]);
                        }
                        provision[v] = {cpu, mem};
                        break;
                    }
                    case ScenarioKind::PA:
                    case ScenarioKind::PWA: {
                        auto& tp = predictors[v];
                        const auto norm = normalize(prefix_of(series, t + 1));

                        // settle the previous forecast's error before predicting on
                        if (tp.has_pred) {
                            for (std::size_t k = 0; k < 2; ++k) {
                                const auto [lo, hi] = tp.bounds[k];
                                const double actual_norm =
                                    hi > lo ? (series.demands[t][k] - lo) / (hi - lo) : 0.0;
                                const double e = tp.last_pred[k] - actual_norm;
                                tp.err_prev[k] = tp.err_curr[k];
                                tp.err_curr[k] = e * e;
                            }
                        }

                        const auto windows = make_windows(norm, config.topology.lags);
                        const bool first = !tp.trainer.initialized();
                        tp.trainer.run(windows, first ? config.trainer.max_generations
                                                      : config.retrain_generations);
                        if (first) {
                            tp.err_prev = tp.trainer.best_fitness().per_channel;
                            tp.err_curr = tp.trainer.best_fitness().per_channel;
                        }

                        const auto n = static_cast<std::size_t>(config.topology.lags);
                        std::vector<double> inputs(n * 2);
                        for (std::size_t i = 0; i < n; ++i)
                            for (std::size_t k = 0; k < 2; ++k)
                                inputs[i * 2 + k] = norm.values[t + 1 - n + i][k];
                        const auto raw = forward(tp.trainer.best_genome(), config.topology, inputs);

                        for (std::size_t k = 0; k < 2; ++k) {
                            const double pad =
                                error_padding(tp.err_prev[k], tp.err_curr[k], config.edp_alpha);
                            const double padded = std::clamp(raw[k] + pad, 0.0, 1.0);
                            provision[v][k] =
                                denormalize(padded, norm.bounds[k].lo, norm.bounds[k].hi);

                            const auto [lo, hi] = norm.bounds[k];
                            const double next_norm =
                                hi > lo ? (series.demands[t + 1][k] - lo) / (hi - lo) : 0.0;
                            const double e = raw[k] - next_norm;
                            (k == 0 ? pred_err_cpu : pred_err_mem) += e * e;
                        }
                        tp.bounds = norm.bounds;
                        tp.last_pred = raw;
                        tp.has_pred = true;
                        break;
                    }
                }
            }

            // absolute units; tasks with no demand spawn no VM
            std::vector<TaskDemand> demands;
            std::vector<std::size_t> task_of_demand;
            for (std::size_t v = 0; v < ntasks; ++v) {
                const double cpu = provision[v][0] * config.reference.cpu_mips;
                const double mem = provision[v][1] * config.reference.mem_gb;
                if (cpu == 0.0 && mem == 0.0) {
                    ++m.zero_demand_tasks;
                    continue;
                }
                demands.push_back({traces[v].vm_id, {cpu, mem}});
                task_of_demand.push_back(v);
            }

            std::vector<VmInstance> vms;
            vms.reserve(demands.size());
            if (!demands.empty()) {
                const bool clustered =
                    scenario.kind == ScenarioKind::OA || scenario.kind == ScenarioKind::PA;
                std::vector<VmSize> types(demands.size());
                if (clustered) {
                    const auto plan = autoscale(demands, catalog,
                                                derive_seed(seed, 1000 + static_cast<std::uint64_t>(t)),
                                                config.k_max);
                    types = plan.task_type;
                } else {
                    for (std::size_t d = 0; d < demands.size(); ++d)
                        types[d] = select_vm_type(demands[d].demand, demands[d].demand, catalog);
                }
                for (std::size_t d = 0; d < demands.size(); ++d) {
                    vms.push_back({demands[d].task_id, types[d], demands[d].demand[0],
                                   demands[d].demand[1]});
                    ++m.vm_counts[static_cast<std::size_t>(types[d])];
                }
            }

            Allocation alloc;
            if (!vms.empty()) {
                switch (scenario.engine) {
                    case PlacementEngine::Ga: {
                        GaConfig ga = config.ga;
                        ga.seed = derive_seed(seed, 3000 + static_cast<std::uint64_t>(t));
                        alloc = place_ga(vms, servers, ga).best;
                        break;
                    }
                    case PlacementEngine::BestFit:
                        alloc = place_best_fit(vms, servers);
                        break;
                    case PlacementEngine::RandomFit:
                        alloc = place_random_fit(vms, servers,
                                                 derive_seed(seed, 5000 + static_cast<std::uint64_t>(t)));
                        break;
                }
            }

            m.active_pms = alloc.active_servers;
            m.placed_tasks = static_cast<int>(vms.size());

            // charge the actual next-interval demand against the sized VMs;
            // demand beyond the VM type's capacity is a violation event
            std::vector<std::array<double, 2>> used(vms.size());
            for (std::size_t d = 0; d < vms.size(); ++d) {
                const std::size_t v = task_of_demand[d];
                const double cpu = traces[v].demands[t + 1][0] * config.reference.cpu_mips;
                const double mem = traces[v].demands[t + 1][1] * config.reference.mem_gb;
                const auto& type = catalog.by_size(vms[d].type);
                if (cpu > type.mips || mem > type.ram_gb) ++m.capacity_violations;
                used[d] = {cpu, mem};
            }
            // a task whose provision rounded to nothing still demanding work
            // counts as a violation of its (absent) VM
            for (std::size_t v = 0; v < ntasks; ++v) {
                if (provision[v][0] > 0.0 || provision[v][1] > 0.0) continue;
                if (traces[v].demands[t + 1][0] > 0.0 || traces[v].demands[t + 1][1] > 0.0)
                    ++m.capacity_violations;
            }
            const auto charged = charge_actuals(alloc.genes, servers, used);
            m.ru = charged.ru;
            m.power_watts = charged.power_watts;

            if (predictive) {
                m.prediction_error = {pred_err_cpu / static_cast<double>(ntasks),
                                      pred_err_mem / static_cast<double>(ntasks)};
            }

            if (prev_ok && !vms.empty()) {
                for (std::size_t d = 0; d < vms.size(); ++d) {
                    for (std::size_t pd = 0; pd < prev_ids.size(); ++pd) {
                        if (prev_ids[pd] != vms[d].id) continue;
                        if (prev_genes[pd] != alloc.genes[d]) ++m.placement_churn;
                        break;
                    }
                }
            }
            prev_genes = alloc.genes;
            prev_ids.clear();
            for (const auto& v : vms) prev_ids.push_back(v.id);
            prev_ok = true;
        } catch (const std::exception& e) {
            m = IntervalMetrics{};
            m.interval = interval;
            m.prediction_error = {kNan, kNan};
            m.error = e.what();
            prev_ok = false;
        }
        result.intervals.push_back(std::move(m));
    }
    return result;
}

ComparisonReport compare_scenarios(const std::vector<ScenarioResult>& results) {
    if (results.empty()) throw std::invalid_argument("compare_scenarios: no results");
    for (const auto& r : results)
        if (r.intervals.size() != results.front().intervals.size())
            throw std::invalid_argument("compare_scenarios: interval counts differ between runs");

    ComparisonReport report;
    const ScenarioSummary* wpwa = nullptr;
    for (const auto& r : results) {
        ScenarioSummary s;
        s.scenario = r.scenario;
        s.intervals = static_cast<int>(r.intervals.size());
        double ru = 0, pw = 0, apms = 0;
        int ok = 0;
        for (const auto& m : r.intervals) {
            if (!m.error.empty()) {
                ++s.error_intervals;
                continue;
            }
            ++ok;
            ru += m.ru;
            pw += m.power_watts;
            apms += m.active_pms;
            s.violations += m.capacity_violations;
            s.zero_demand_tasks += m.zero_demand_tasks;
        }
        if (ok > 0) {
            s.mean_ru = ru / ok;
            s.mean_pw = pw / ok;
            s.mean_apms = apms / ok;
        }
        report.rows.push_back(s);
    }
    for (const auto& row : report.rows)
        if (row.scenario.kind == ScenarioKind::WPWA) wpwa = &row;
    if (wpwa && wpwa->mean_pw > 0.0 && wpwa->mean_ru > 0.0) {
        for (auto& row : report.rows) {
            row.power_saving_pct = 100.0 * (wpwa->mean_pw - row.mean_pw) / wpwa->mean_pw;
            row.ru_improvement_pct = 100.0 * (row.mean_ru - wpwa->mean_ru) / wpwa->mean_ru;
        }
    }
    return report;
}

double trainer_memory_bytes(const Topology& topology, int population, std::size_t windows) {
    const double genome_bytes = 8.0 * genome_length(topology);
    const double window_bytes =
        8.0 * static_cast<double>(windows) *
        (static_cast<double>(topology.lags) * topology.channels + topology.channels);
    // per member: genome + per-channel fitness + scalar + rates and draws
    const double member_bytes = genome_bytes + 8.0 * topology.channels + 8.0 + 32.0;
    // per run: strategy probabilities, period counters, bookkeeping
    const double fixed_bytes = 256.0;
    return member_bytes * population + 4.0 * genome_bytes + window_bytes + fixed_bytes;
}

PredictionReport prediction_report(const TaskSeries& series, const std::vector<int>& pws_list,
                                   const Topology& topology, const TrainerConfig& trainer,
                                   std::uint64_t seed) {
    if (topology.channels != 2)
        throw std::invalid_argument("prediction_report: expects a two-resource topology");
    using clock = std::chrono::steady_clock;

    PredictionReport report;
    for (int pws : pws_list) {
        PredictionReportRow row;
        row.pws_minutes = pws;
        const auto agg = aggregate(series, pws);
        const auto norm = normalize(agg);

        TrainerConfig cfg = trainer;
        cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(pws));

        {
            const auto start = clock::now();
            const auto windows = make_windows(norm, topology.lags);
            const auto out = train_adaptive_de(windows, topology, cfg);
            row.multi_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
            row.multi_xi_cpu = out.validation_fitness.per_channel[0];
            row.multi_xi_mem = out.validation_fitness.per_channel[1];
            row.multi_bytes = trainer_memory_bytes(topology, cfg.population, windows.size());
        }
        {
            Topology single = topology;
            single.channels = 1;
            const auto start = clock::now();
            const auto windows = make_windows(norm, topology.lags);
            double xi[2];
            for (int k = 0; k < 2; ++k) {
                const auto view = select_channel(windows, 2, k);
                const auto out = train_adaptive_de(view, single, cfg);
                xi[k] = out.validation_fitness.per_channel[0];
                row.siso_bytes += trainer_memory_bytes(single, cfg.population, view.size());
            }
            row.siso_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
            row.siso_xi_cpu = xi[0];
            row.siso_xi_mem = xi[1];
        }
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace resman
