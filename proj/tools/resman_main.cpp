#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

#include "resman/config.hpp"
#include "resman/csv.hpp"
#include "resman/orchestrator.hpp"

namespace fs = std::filesystem;
using namespace resman;

namespace {

void require_file(const std::string& path, const std::string& what) {
    if (path.empty()) throw ConfigError("config error: " + what + ": no path configured");
    if (!fs::exists(path)) throw ConfigError("config error: " + what + " not found: " + path);
}

std::vector<TaskSeries> read_trace(const RunConfig& cfg) {
    require_file(cfg.trace_path, "trace file");
    std::ifstream in(cfg.trace_path);
    if (!in) throw ConfigError("config error: cannot open trace file: " + cfg.trace_path);
    return parse_trace(in, cfg.delimiter);
}

const TaskSeries& pick_series(const std::vector<TaskSeries>& traces, const std::string& vm) {
    if (traces.empty()) throw std::runtime_error("trace contains no series");
    if (vm.empty()) return traces.front();
    for (const auto& s : traces)
        if (s.vm_id == vm) return s;
    throw ConfigError("config error: vm '" + vm + "' not present in the trace");
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::string sanitize(std::string text, char delim) {
    for (char& c : text)
        if (c == delim || c == '\n') c = ';';
    return text;
}

void write_convergence(const fs::path& path, const std::vector<GenerationRecord>& history) {
    auto out = open_out(path);
    out << "generation,best_xi_cpu,best_xi_mem,best_scalar,g1,g2,g3,w1,w2,mean_mr,mean_cr,updated\n";
    for (const auto& r : history) {
        out << r.generation;
        out << ',' << (r.best_per_channel.size() > 0 ? csv::format_double(r.best_per_channel[0]) : "");
        out << ',' << (r.best_per_channel.size() > 1 ? csv::format_double(r.best_per_channel[1]) : "");
        out << ',' << csv::format_double(r.best_scalar);
        for (double g : r.mutation_probs) out << ',' << csv::format_double(g);
        for (double w : r.crossover_probs) out << ',' << csv::format_double(w);
        out << ',' << csv::format_double(r.mean_mutation_rate) << ','
            << csv::format_double(r.mean_crossover_rate) << ',' << r.updated_members << '\n';
    }
}

void write_metrics(const fs::path& path, const ScenarioResult& res) {
    auto out = open_out(path);
    out << "interval,ru,power_watts,active_pms,vm_small,vm_medium,vm_large,vm_xlarge,"
           "xi_cpu,xi_mem,violations,churn,placed,zero_demand,error\n";
    for (const auto& m : res.intervals) {
        out << m.interval << ',' << csv::format_double(m.ru) << ','
            << csv::format_double(m.power_watts) << ',' << m.active_pms;
        for (int c : m.vm_counts) out << ',' << c;
        out << ',' << csv::format_double(m.prediction_error[0]) << ','
            << csv::format_double(m.prediction_error[1]) << ',' << m.capacity_violations << ','
            << m.placement_churn << ',' << m.placed_tasks << ',' << m.zero_demand_tasks << ','
            << sanitize(m.error, ',') << '\n';
    }
}

ScenarioResult read_metrics(const fs::path& path, Scenario scenario) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config error: metrics file not found: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty metrics file: " + path.string());
    ScenarioResult res;
    res.scenario = scenario;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = csv::split(line, ',');
        if (f.size() < 15)
            throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) +
                                     ": expected 15 fields");
        const std::string ctx = path.string() + ":" + std::to_string(line_no);
        IntervalMetrics m;
        m.interval = static_cast<int>(csv::parse_int(f[0], ctx));
        m.ru = csv::parse_double(f[1], ctx);
        m.power_watts = csv::parse_double(f[2], ctx);
        m.active_pms = static_cast<int>(csv::parse_int(f[3], ctx));
        for (int c = 0; c < 4; ++c)
            m.vm_counts[static_cast<std::size_t>(c)] =
                static_cast<int>(csv::parse_int(f[static_cast<std::size_t>(4 + c)], ctx));
        m.prediction_error[0] = csv::parse_double(f[8], ctx);
        m.prediction_error[1] = csv::parse_double(f[9], ctx);
        m.capacity_violations = static_cast<int>(csv::parse_int(f[10], ctx));
        m.placement_churn = static_cast<int>(csv::parse_int(f[11], ctx));
        m.placed_tasks = static_cast<int>(csv::parse_int(f[12], ctx));
        m.zero_demand_tasks = static_cast<int>(csv::parse_int(f[13], ctx));
        m.error = f[14];
        res.intervals.push_back(std::move(m));
    }
    return res;
}

nlohmann::json summary_json(const ComparisonReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"scenario", to_string(r.scenario.kind)},
                        {"engine", to_string(r.scenario.engine)},
                        {"intervals", r.intervals},
                        {"error_intervals", r.error_intervals},
                        {"mean_ru", r.mean_ru},
                        {"mean_power_watts", r.mean_pw},
                        {"mean_active_pms", r.mean_apms},
                        {"capacity_violations", r.violations},
                        {"zero_demand_tasks", r.zero_demand_tasks},
                        {"power_saving_pct_vs_wpwa", r.power_saving_pct},
                        {"ru_improvement_pct_vs_wpwa", r.ru_improvement_pct}});
    }
    return {{"rows", rows}};
}

void write_summary(const fs::path& dir, const ComparisonReport& report) {
    {
        auto out = open_out(dir / "summary.csv");
        out << "scenario,engine,intervals,error_intervals,mean_ru,mean_power_watts,mean_active_pms,"
               "violations,power_saving_pct,ru_improvement_pct\n";
        for (const auto& r : report.rows) {
            out << to_string(r.scenario.kind) << ',' << to_string(r.scenario.engine) << ','
                << r.intervals << ',' << r.error_intervals << ',' << csv::format_double(r.mean_ru)
                << ',' << csv::format_double(r.mean_pw) << ',' << csv::format_double(r.mean_apms)
                << ',' << r.violations << ',' << csv::format_double(r.power_saving_pct) << ','
                << csv::format_double(r.ru_improvement_pct) << '\n';
        }
    }
    auto out = open_out(dir / "summary.json");
    out << summary_json(report).dump(2) << '\n';
}

void print_summary(const ComparisonReport& report) {
    std::printf("%-6s %-10s %10s %14s %12s %11s %9s\n", "run", "engine", "mean RU", "mean PW (W)",
                "mean APMs", "violations", "saving%");
    for (const auto& r : report.rows) {
        std::printf("%-6s %-10s %10.4f %14.2f %12.2f %11ld %9.2f\n", to_string(r.scenario.kind),
                    to_string(r.scenario.engine), r.mean_ru, r.mean_pw, r.mean_apms, r.violations,
                    r.power_saving_pct);
    }
}

// --- subcommands -------------------------------------------------------------

int cmd_gen(const RunConfig& cfg, bool dry_run) {
    if (dry_run) {
        std::puts("config ok");
        return 0;
    }
    fs::create_directories(cfg.out_dir);
    const auto series = synth_workload(cfg.synth, cfg.seed);
    auto out = open_out(fs::path(cfg.out_dir) / "trace.csv");
    if (series.empty()) {
        out << "timestamp" << cfg.delimiter << "vm_id";
        for (const auto& [name, p] : cfg.synth.patterns) out << cfg.delimiter << name;
        out << '\n';
    } else {
        write_trace(out, series, cfg.delimiter);
    }
    std::printf("wrote %s (%d tasks)\n", (fs::path(cfg.out_dir) / "trace.csv").c_str(),
                cfg.synth.tasks);
    return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& vm, bool dry_run) {
    require_file(cfg.trace_path, "trace file");
    if (dry_run) {
        std::puts("config ok");
        return 0;
    }
    const auto traces = read_trace(cfg);
    const auto& series = pick_series(traces, vm);
    if (static_cast<int>(series.resources.size()) != cfg.topology.channels)
        throw ConfigError("config error: topology.channels: trace has " +
                          std::to_string(series.resources.size()) + " resources (got " +
                          std::to_string(cfg.topology.channels) + ")");

    const auto agg = aggregate(series, cfg.pws_minutes);
    const auto norm = normalize(agg);
    const auto windows = make_windows(norm, cfg.topology.lags);

    TrainerConfig tcfg = cfg.trainer;
    tcfg.seed = derive_seed(cfg.seed, 11);
    const auto outcome = train_adaptive_de(windows, cfg.topology, tcfg);

    Predictor predictor(cfg.topology, series.resources, outcome.best, norm.bounds, cfg.edp_alpha);
    predictor.reset_errors(outcome.train_fitness.per_channel);
    predictor.provenance = {"adaptive-de", cfg.seed, outcome.generations_run,
                            outcome.train_fitness.scalar, outcome.validation_fitness.scalar};

    fs::create_directories(cfg.out_dir);
    {
        auto out = open_out(fs::path(cfg.out_dir) / "predictor.json");
        out << predictor.to_json().dump(2) << '\n';
    }
    write_convergence(fs::path(cfg.out_dir) / "convergence.csv", outcome.history);
    std::printf("trained vm '%s': %d generations, train xi %.6g, validation xi %.6g%s\n",
                series.vm_id.c_str(), outcome.generations_run, outcome.train_fitness.scalar,
                outcome.validation_fitness.scalar, outcome.stopped_early ? " (converged)" : "");
    return 0;
}

int cmd_predict(const RunConfig& cfg, const std::string& predictor_path, const std::string& vm,
                bool dry_run) {
    const std::string ppath =
        predictor_path.empty() ? (fs::path(cfg.out_dir) / "predictor.json").string() : predictor_path;
    require_file(ppath, "predictor artifact");
    require_file(cfg.trace_path, "trace file");
    if (dry_run) {
        std::puts("config ok");
        return 0;
    }

    std::ifstream pin(ppath);
    nlohmann::json doc;
    pin >> doc;
    const auto predictor = Predictor::from_json(doc);

    const auto traces = read_trace(cfg);
    const auto& series = pick_series(traces, vm);
    const auto agg = aggregate(series, cfg.pws_minutes);
    const auto n = static_cast<std::size_t>(predictor.topology().lags);
    const auto x = static_cast<std::size_t>(predictor.topology().channels);
    if (agg.size() < n)
        throw std::runtime_error("trace too short: need at least " + std::to_string(n) + " samples");
    if (agg.resources.size() != x)
        throw std::runtime_error("trace resources do not match the predictor");

    // normalize the live tail with the artifact's stored bounds
    std::vector<double> inputs(n * x);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < x; ++k) {
            const auto [lo, hi] = predictor.bounds()[k];
            const double v = agg.demands[agg.size() - n + i][k];
            inputs[i * x + k] = hi > lo ? (v - lo) / (hi - lo) : 0.0;
        }
    const auto f = predictor.forecast(inputs);

    fs::create_directories(cfg.out_dir);
    auto out = open_out(fs::path(cfg.out_dir) / "forecast.csv");
    out << "resource,predicted_norm,padding,padded_norm,predicted,padded\n";
    for (std::size_t k = 0; k < x; ++k) {
        out << predictor.resources()[k] << ',' << csv::format_double(f.predicted[k]) << ','
            << csv::format_double(f.padding[k]) << ',' << csv::format_double(f.padded[k]) << ','
            << csv::format_double(predictor.denormalize_value(k, f.predicted[k])) << ','
            << csv::format_double(predictor.denormalize_value(k, f.padded[k])) << '\n';
        std::printf("%s: predicted %.6g, padded %.6g\n", predictor.resources()[k].c_str(),
                    predictor.denormalize_value(k, f.predicted[k]),
                    predictor.denormalize_value(k, f.padded[k]));
    }
    return 0;
}

int cmd_autoscale(const RunConfig& cfg, const std::string& demands_path, bool dry_run) {
    require_file(demands_path, "demands file");
    if (dry_run) {
        std::puts("config ok");
        return 0;
    }
    std::ifstream in(demands_path);
    std::string line;
    if (!std::getline(in, line) || csv::split(line, cfg.delimiter).size() < 3)
        throw std::runtime_error(demands_path + ": expected header task_id,cpu,mem");
    std::vector<TaskDemand> tasks;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = csv::split(line, cfg.delimiter);
        const std::string ctx = demands_path + ":" + std::to_string(line_no);
        if (f.size() < 3) throw std::runtime_error(ctx + ": expected task_id,cpu,mem");
        tasks.push_back({std::string(csv::trim(f[0])),
                         {csv::parse_double(f[1], ctx), csv::parse_double(f[2], ctx)}});
    }

    const auto plan = autoscale(tasks, cfg.catalog, derive_seed(cfg.seed, 21), cfg.k_max);

    fs::create_directories(cfg.out_dir);
    {
        auto out = open_out(fs::path(cfg.out_dir) / "clusters.csv");
        out << "task_id,cluster,type\n";
        for (std::size_t i = 0; i < tasks.size(); ++i)
            out << tasks[i].task_id << ',' << plan.clustering.assignment[i] << ','
                << cfg.catalog.by_size(plan.task_type[i]).name << '\n';
    }
    nlohmann::json counts;
    for (std::size_t s = 0; s < 4; ++s)
        counts[cfg.catalog.types[s].name] = plan.counts[s];
    nlohmann::json doc{{"tasks", tasks.size()},
                       {"clusters", plan.clustering.k},
                       {"wcss", plan.clustering.wcss},
                       {"counts", counts}};
    auto out = open_out(fs::path(cfg.out_dir) / "vm_plan.json");
    out << doc.dump(2) << '\n';
    std::printf("%zu tasks -> %d clusters; small %d, medium %d, large %d, Xlarge %d\n", tasks.size(),
                plan.clustering.k, plan.counts[0], plan.counts[1], plan.counts[2], plan.counts[3]);
    return 0;
}

int cmd_place(const RunConfig& cfg, const std::string& vms_path, bool dry_run) {
    require_file(vms_path, "vms file");
    if (dry_run) {
        std::puts("config ok");
        return 0;
    }
    std::ifstream in(vms_path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(vms_path + ": empty file");
    std::vector<VmInstance> vms;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = csv::split(line, cfg.delimiter);
        const std::string ctx = vms_path + ":" + std::to_string(line_no);
        if (f.size() < 2) throw std::runtime_error(ctx + ": expected vm_id,type[,cpu,mem]");
        const std::string type_name(csv::trim(f[1]));
        int type_index = -1;
        for (int s = 0; s < 4; ++s)
            if (cfg.catalog.types[static_cast<std::size_t>(s)].name == type_name) type_index = s;
        if (type_index < 0) throw std::runtime_error(ctx + ": unknown VM type '" + type_name + "'");
        const auto& t = cfg.catalog.types[static_cast<std::size_t>(type_index)];
        VmInstance vm{std::string(csv::trim(f[0])), static_cast<VmSize>(type_index), t.mips, t.ram_gb};
        if (f.size() >= 4) {
            vm.cpu_mips = csv::parse_double(f[2], ctx);
            vm.ram_gb = csv::parse_double(f[3], ctx);
            if (vm.cpu_mips > t.mips || vm.ram_gb > t.ram_gb)
                throw std::runtime_error(ctx + ": demand exceeds the capacity of type " + type_name);
        }
        vms.push_back(std::move(vm));
    }

    const auto servers = build_fleet(cfg);
    Allocation alloc;
    switch (cfg.engine) {
        case PlacementEngine::Ga: {
            GaConfig ga = cfg.ga;
            ga.seed = derive_seed(cfg.seed, 31);
            alloc = place_ga(vms, servers, ga).best;
            break;
        }
        case PlacementEngine::BestFit:
            alloc = place_best_fit(vms, servers);
            break;
        case PlacementEngine::RandomFit:
            alloc = place_random_fit(vms, servers, derive_seed(cfg.seed, 31));
            break;
    }

    fs::create_directories(cfg.out_dir);
    {
        auto out = open_out(fs::path(cfg.out_dir) / "allocation.csv");
        out << "vm_id,server_id\n";
        for (std::size_t j = 0; j < vms.size(); ++j)
            out << vms[j].id << ',' << servers[static_cast<std::size_t>(alloc.genes[j])].id << '\n';
    }
    nlohmann::json doc{{"engine", to_string(cfg.engine)},
                       {"vms", vms.size()},
                       {"resource_utilization", alloc.cost.utilization},
                       {"power_watts", alloc.cost.power_watts},
                       {"active_servers", alloc.active_servers}};
    auto out = open_out(fs::path(cfg.out_dir) / "placement_summary.json");
    out << doc.dump(2) << '\n';
    std::printf("placed %zu VMs on %d servers: RU %.4f, %.2f W\n", vms.size(), alloc.active_servers,
                alloc.cost.utilization, alloc.cost.power_watts);
    return 0;
}

int cmd_simulate(const RunConfig& cfg, bool dry_run) {
    require_file(cfg.trace_path, "trace file");
    if (dry_run) {
        std::puts("config ok");
        return 0;
    }
    const auto traces = read_trace(cfg);
    const auto servers = build_fleet(cfg);
    const auto ocfg = orchestrator_config(cfg);

    std::vector<std::future<ScenarioResult>> jobs;
    for (auto kind : cfg.scenarios) {
        const Scenario sc{kind, cfg.engine};
        jobs.push_back(std::async(std::launch::async, [&, sc] {
            return run_scenario(sc, traces, servers, cfg.catalog, ocfg, cfg.seed);
        }));
    }
    std::vector<ScenarioResult> results;
    results.reserve(jobs.size());
    for (auto& j : jobs) results.push_back(j.get());

    fs::create_directories(cfg.out_dir);
    for (const auto& r : results)
        write_metrics(fs::path(cfg.out_dir) /
                          ("metrics_" + std::string(to_string(r.scenario.kind)) + ".csv"),
                      r);
    const auto report = compare_scenarios(results);
    write_summary(cfg.out_dir, report);
    print_summary(report);
    return 0;
}

int cmd_report(const RunConfig& cfg, const std::string& in_dir, bool prediction, bool dry_run) {
    if (prediction) {
        require_file(cfg.trace_path, "trace file");
        if (dry_run) {
            std::puts("config ok");
            return 0;
        }
        const auto traces = read_trace(cfg);
        const auto& series = pick_series(traces, "");
        const auto report =
            prediction_report(series, cfg.pws_set, cfg.topology, cfg.trainer, cfg.seed);
        fs::create_directories(cfg.out_dir);
        auto out = open_out(fs::path(cfg.out_dir) / "prediction_report.csv");
        out << "pws_minutes,multi_xi_cpu,multi_xi_mem,multi_ms,multi_bytes,"
               "siso_xi_cpu,siso_xi_mem,siso_ms,siso_bytes\n";
        std::printf("%4s %12s %12s %10s %12s %12s %10s\n", "PWS", "multi xi_cpu", "multi xi_mem",
                    "multi ms", "siso xi_cpu", "siso xi_mem", "siso ms");
        for (const auto& r : report.rows) {
            out << r.pws_minutes << ',' << csv::format_double(r.multi_xi_cpu) << ','
                << csv::format_double(r.multi_xi_mem) << ',' << csv::format_double(r.multi_ms) << ','
                << csv::format_double(r.multi_bytes) << ',' << csv::format_double(r.siso_xi_cpu)
                << ',' << csv::format_double(r.siso_xi_mem) << ',' << csv::format_double(r.siso_ms)
                << ',' << csv::format_double(r.siso_bytes) << '\n';
            std::printf("%4d %12.6f %12.6f %10.2f %12.6f %12.6f %10.2f\n", r.pws_minutes,
                        r.multi_xi_cpu, r.multi_xi_mem, r.multi_ms, r.siso_xi_cpu, r.siso_xi_mem,
                        r.siso_ms);
        }
        return 0;
    }

    const std::string dir = in_dir.empty() ? cfg.out_dir : in_dir;
    std::vector<ScenarioResult> results;
    for (auto kind : cfg.scenarios) {
        const fs::path path = fs::path(dir) / ("metrics_" + std::string(to_string(kind)) + ".csv");
        if (!fs::exists(path)) continue;
        results.push_back(read_metrics(path, Scenario{kind, cfg.engine}));
    }
    if (results.empty())
        throw ConfigError("config error: no metrics_<scenario>.csv files found in " + dir);
    if (dry_run) {
        std::puts("config ok");
        return 0;
    }
    const auto report = compare_scenarios(results);
    fs::create_directories(cfg.out_dir);
    write_summary(cfg.out_dir, report);
    print_summary(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"proactive VM autoscaling and energy-aware placement simulator"};
    app.require_subcommand(0, 1);

    std::string config_path, out_dir, trace_path, write_default;
    std::optional<std::uint64_t> seed;
    std::optional<int> pws;
    bool dry_run = false;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--seed", seed, "master seed override");
    app.add_option("--out", out_dir, "output directory override");
    app.add_option("--pws", pws, "forecast window minutes override");
    app.add_option("--trace", trace_path, "trace file override");
    std::string delimiter;
    app.add_option("--delimiter", delimiter, "trace field delimiter override (default comma)");
    app.add_flag("--dry-run", dry_run, "validate the configuration and inputs, write nothing");
    app.add_option("--write-default-config", write_default, "write the default configuration and exit");

    auto* gen = app.add_subcommand("gen", "generate a synthetic workload trace");
    auto* train = app.add_subcommand("train", "train a predictor on one VM's series");
    std::string train_vm;
    train->add_option("--vm", train_vm, "vm_id to train on (default: first in the trace)");
    auto* predict = app.add_subcommand("predict", "forecast the next interval from an artifact");
    std::string predictor_path, predict_vm;
    predict->add_option("--predictor", predictor_path, "predictor artifact path");
    predict->add_option("--vm", predict_vm, "vm_id to forecast (default: first in the trace)");
    auto* autoscale_cmd = app.add_subcommand("autoscale", "cluster demands and pick VM types");
    std::string demands_path;
    autoscale_cmd->add_option("--demands", demands_path, "CSV of task_id,cpu,mem in absolute units")
        ->required();
    auto* place = app.add_subcommand("place", "place VMs onto the configured fleet");
    std::string vms_path;
    place->add_option("--vms", vms_path, "CSV of vm_id,type[,cpu,mem]")->required();
    auto* simulate = app.add_subcommand("simulate", "run the configured scenarios end to end");
    auto* report = app.add_subcommand("report", "summarize metrics files or compare predictors");
    std::string report_in;
    bool report_prediction = false;
    report->add_option("--in", report_in, "directory holding metrics_<scenario>.csv files");
    report->add_flag("--prediction", report_prediction,
                     "compare multi-resource vs per-resource training instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (config_path.empty()) validate(cfg);
        if (seed) cfg.seed = *seed;
        if (pws) cfg.pws_minutes = *pws;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!trace_path.empty()) cfg.trace_path = trace_path;
        if (!delimiter.empty()) {
            if (delimiter.size() != 1)
                throw ConfigError("config error: delimiter: a single character (got " + delimiter + ")");
            cfg.delimiter = delimiter[0];
        }
        validate(cfg);

        if (!write_default.empty()) {
            auto out = open_out(write_default);
            out << to_json(RunConfig{}).dump(2) << '\n';
            std::printf("wrote %s\n", write_default.c_str());
            return 0;
        }
        if (app.get_subcommands().empty()) {
            std::cerr << "error: a subcommand is required (gen, train, predict, autoscale, place, "
                         "simulate, report)\n";
            return 1;
        }

        if (app.got_subcommand(gen)) return cmd_gen(cfg, dry_run);
        if (app.got_subcommand(train)) return cmd_train(cfg, train_vm, dry_run);
        if (app.got_subcommand(predict)) return cmd_predict(cfg, predictor_path, predict_vm, dry_run);
        if (app.got_subcommand(autoscale_cmd)) return cmd_autoscale(cfg, demands_path, dry_run);
        if (app.got_subcommand(place)) return cmd_place(cfg, vms_path, dry_run);
        if (app.got_subcommand(simulate)) return cmd_simulate(cfg, dry_run);
        if (app.got_subcommand(report)) return cmd_report(cfg, report_in, report_prediction, dry_run);
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
