#include "resman/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace resman {

namespace {

std::string range_msg(const std::string& field, const std::string& range, const std::string& got) {
    return "config error: " + field + ": " + range + " (got " + got + ")";
}

void require(bool ok, const std::string& field, const std::string& range, double got) {
    if (!ok) {
        std::ostringstream val;
        val << got;
        throw ConfigError(range_msg(field, range, val.str()));
    }
}

void require(bool ok, const std::string& field, const std::string& range, const std::string& got) {
    if (!ok) throw ConfigError(range_msg(field, range, got));
}

}  // namespace

ScenarioKind scenario_kind_from(const std::string& name) {
    if (name == "OA") return ScenarioKind::OA;
    if (name == "PA") return ScenarioKind::PA;
    if (name == "PWA") return ScenarioKind::PWA;
    if (name == "WPWA") return ScenarioKind::WPWA;
    throw ConfigError(range_msg("scenarios", "one of OA, PA, PWA, WPWA", name));
}

PlacementEngine engine_from(const std::string& name) {
    if (name == "ga") return PlacementEngine::Ga;
    if (name == "best-fit") return PlacementEngine::BestFit;
    if (name == "random-fit") return PlacementEngine::RandomFit;
    throw ConfigError(range_msg("engine", "one of ga, best-fit, random-fit", name));
}

nlohmann::json to_json(const RunConfig& cfg) {
    nlohmann::json doc;
    doc["seed"] = cfg.seed;
    doc["pws_minutes"] = cfg.pws_minutes;
    doc["out_dir"] = cfg.out_dir;
    doc["trace"] = cfg.trace_path;
    doc["delimiter"] = std::string(1, cfg.delimiter);

    nlohmann::json fleet = nlohmann::json::array();
    for (const auto& f : cfg.fleet) fleet.push_back({{"type", f.type}, {"count", f.count}});
    doc["fleet"] = std::move(fleet);

    nlohmann::json catalog = nlohmann::json::array();
    for (const auto& t : cfg.catalog.types)
        catalog.push_back({{"name", t.name},
                           {"pe", t.pe},
                           {"mips", t.mips},
                           {"ram_gb", t.ram_gb},
                           {"storage_gb", t.storage_gb}});
    doc["vm_catalog"] = std::move(catalog);

    doc["topology"] = {{"lags", cfg.topology.lags},
                       {"hidden", cfg.topology.hidden},
                       {"outputs", cfg.topology.outputs},
                       {"channels", cfg.topology.channels}};
    doc["trainer"] = {
        {"population", cfg.trainer.population},
        {"max_generations", cfg.trainer.max_generations},
        {"mutation_probs", cfg.trainer.mutation_probs},
        {"crossover_probs", cfg.trainer.crossover_probs},
        {"mutation_rate_bounds", {cfg.trainer.mutation_rate_lo, cfg.trainer.mutation_rate_hi}},
        {"crossover_rate_bounds", {cfg.trainer.crossover_rate_lo, cfg.trainer.crossover_rate_hi}},
        {"stall_threshold", cfg.trainer.stall_threshold},
        {"learning_period", cfg.trainer.learning_period},
        {"no_improve_patience", cfg.trainer.no_improve_patience},
        {"improve_epsilon", cfg.trainer.improve_epsilon},
        {"train_fraction", cfg.trainer.train_fraction},
        {"prob_form", cfg.trainer.prob_form == ProbabilityForm::Symmetric ? "symmetric" : "as-published"},
    };
    doc["edp_alpha"] = cfg.edp_alpha;
    doc["ga"] = {{"population", cfg.ga.population},
                 {"generations", cfg.ga.generations},
                 {"crossover_rate", cfg.ga.crossover_rate},
                 {"mutation_rate", cfg.ga.mutation_rate}};

    nlohmann::json scen = nlohmann::json::array();
    for (auto k : cfg.scenarios) scen.push_back(to_string(k));
    doc["scenarios"] = std::move(scen);
    doc["engine"] = to_string(cfg.engine);
    doc["warmup_intervals"] = cfg.warmup_intervals;
    doc["retrain_generations"] = cfg.retrain_generations;
    doc["reference"] = {{"cpu_mips", cfg.reference.cpu_mips}, {"mem_gb", cfg.reference.mem_gb}};
    doc["k_max"] = cfg.k_max;

    nlohmann::json patterns = nlohmann::json::array();
    for (const auto& [name, p] : cfg.synth.patterns)
        patterns.push_back({{"resource", name},
                            {"base", p.base},
                            {"amplitude", p.amplitude},
                            {"period_minutes", p.period_minutes},
                            {"noise", p.noise},
                            {"burst_prob", p.burst_prob},
                            {"burst_magnitude", p.burst_magnitude}});
    doc["synth"] = {{"tasks", cfg.synth.tasks},
                    {"duration_minutes", cfg.synth.duration_minutes},
                    {"interval_minutes", cfg.synth.interval_minutes},
                    {"scale_min", cfg.synth.scale_min},
                    {"scale_max", cfg.synth.scale_max},
                    {"patterns", std::move(patterns)}};
    doc["pws_set"] = cfg.pws_set;
    return doc;
}

RunConfig config_from_json(const nlohmann::json& doc) {
    RunConfig cfg;
    try {
        cfg.seed = doc.value("seed", cfg.seed);
        cfg.pws_minutes = doc.value("pws_minutes", cfg.pws_minutes);
        cfg.out_dir = doc.value("out_dir", cfg.out_dir);
        cfg.trace_path = doc.value("trace", cfg.trace_path);
        if (doc.contains("delimiter")) {
            const auto d = doc.at("delimiter").get<std::string>();
            require(d.size() == 1, "delimiter", "a single character", d);
            cfg.delimiter = d[0];
        }
        if (doc.contains("fleet")) {
            cfg.fleet.clear();
            for (const auto& f : doc.at("fleet"))
                cfg.fleet.push_back({f.at("type").get<std::string>(), f.at("count").get<int>()});
        }
        if (doc.contains("vm_catalog")) {
            const auto& cat = doc.at("vm_catalog");
            require(cat.size() == 4, "vm_catalog", "exactly 4 instance types",
                    std::to_string(cat.size()));
            for (std::size_t i = 0; i < 4; ++i) {
                auto& t = cfg.catalog.types[i];
                t.size = static_cast<VmSize>(i);
                t.name = cat[i].value("name", t.name);
                t.pe = cat[i].value("pe", t.pe);
                t.mips = cat[i].value("mips", t.mips);
                t.ram_gb = cat[i].value("ram_gb", t.ram_gb);
                t.storage_gb = cat[i].value("storage_gb", t.storage_gb);
            }
        }
        if (doc.contains("topology")) {
            const auto& t = doc.at("topology");
            cfg.topology.lags = t.value("lags", cfg.topology.lags);
            cfg.topology.hidden = t.value("hidden", cfg.topology.hidden);
            cfg.topology.outputs = t.value("outputs", cfg.topology.outputs);
            cfg.topology.channels = t.value("channels", cfg.topology.channels);
        }
        if (doc.contains("trainer")) {
            const auto& t = doc.at("trainer");
            auto& tr = cfg.trainer;
            tr.population = t.value("population", tr.population);
            tr.max_generations = t.value("max_generations", tr.max_generations);
            if (t.contains("mutation_probs"))
                tr.mutation_probs = t.at("mutation_probs").get<std::array<double, 3>>();
            if (t.contains("crossover_probs"))
                tr.crossover_probs = t.at("crossover_probs").get<std::array<double, 2>>();
            if (t.contains("mutation_rate_bounds")) {
                const auto b = t.at("mutation_rate_bounds").get<std::array<double, 2>>();
                tr.mutation_rate_lo = b[0];
                tr.mutation_rate_hi = b[1];
            }
            if (t.contains("crossover_rate_bounds")) {
                const auto b = t.at("crossover_rate_bounds").get<std::array<double, 2>>();
                tr.crossover_rate_lo = b[0];
                tr.crossover_rate_hi = b[1];
            }
            tr.stall_threshold = t.value("stall_threshold", tr.stall_threshold);
            tr.learning_period = t.value("learning_period", tr.learning_period);
            tr.no_improve_patience = t.value("no_improve_patience", tr.no_improve_patience);
            tr.improve_epsilon = t.value("improve_epsilon", tr.improve_epsilon);
            tr.train_fraction = t.value("train_fraction", tr.train_fraction);
            if (t.contains("prob_form")) {
                const auto f = t.at("prob_form").get<std::string>();
                require(f == "symmetric" || f == "as-published", "trainer.prob_form",
                        "symmetric or as-published", f);
                tr.prob_form =
                    f == "symmetric" ? ProbabilityForm::Symmetric : ProbabilityForm::AsPublished;
            }
        }
        cfg.edp_alpha = doc.value("edp_alpha", cfg.edp_alpha);
        if (doc.contains("ga")) {
            const auto& g = doc.at("ga");
            cfg.ga.population = g.value("population", cfg.ga.population);
            cfg.ga.generations = g.value("generations", cfg.ga.generations);
            cfg.ga.crossover_rate = g.value("crossover_rate", cfg.ga.crossover_rate);
            cfg.ga.mutation_rate = g.value("mutation_rate", cfg.ga.mutation_rate);
        }
        if (doc.contains("scenarios")) {
            cfg.scenarios.clear();
            for (const auto& s : doc.at("scenarios"))
                cfg.scenarios.push_back(scenario_kind_from(s.get<std::string>()));
        }
        if (doc.contains("engine")) cfg.engine = engine_from(doc.at("engine").get<std::string>());
        cfg.warmup_intervals = doc.value("warmup_intervals", cfg.warmup_intervals);
        cfg.retrain_generations = doc.value("retrain_generations", cfg.retrain_generations);
        if (doc.contains("reference")) {
            cfg.reference.cpu_mips = doc.at("reference").value("cpu_mips", cfg.reference.cpu_mips);
            cfg.reference.mem_gb = doc.at("reference").value("mem_gb", cfg.reference.mem_gb);
        }
        cfg.k_max = doc.value("k_max", cfg.k_max);
        if (doc.contains("synth")) {
            const auto& s = doc.at("synth");
            cfg.synth.tasks = s.value("tasks", cfg.synth.tasks);
            cfg.synth.duration_minutes = s.value("duration_minutes", cfg.synth.duration_minutes);
            cfg.synth.interval_minutes = s.value("interval_minutes", cfg.synth.interval_minutes);
            cfg.synth.scale_min = s.value("scale_min", cfg.synth.scale_min);
            cfg.synth.scale_max = s.value("scale_max", cfg.synth.scale_max);
            if (s.contains("patterns")) {
                cfg.synth.patterns.clear();
                for (const auto& p : s.at("patterns")) {
                    ResourcePattern r;
                    r.base = p.value("base", r.base);
                    r.amplitude = p.value("amplitude", r.amplitude);
                    r.period_minutes = p.value("period_minutes", r.period_minutes);
                    r.noise = p.value("noise", r.noise);
                    r.burst_prob = p.value("burst_prob", r.burst_prob);
                    r.burst_magnitude = p.value("burst_magnitude", r.burst_magnitude);
                    cfg.synth.patterns.emplace_back(p.at("resource").get<std::string>(), r);
                }
            }
        }
        if (doc.contains("pws_set")) cfg.pws_set = doc.at("pws_set").get<std::vector<int>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config error: malformed document: ") + e.what());
    }
    return cfg;
}

void validate(const RunConfig& cfg) {
    require(cfg.pws_minutes >= 1, "pws_minutes", "must be >= 1", cfg.pws_minutes);

    require(!cfg.fleet.empty(), "fleet", "must list at least one entry", "empty");
    int total = 0;
    for (const auto& f : cfg.fleet) {
        require(f.type == "S1" || f.type == "S2" || f.type == "S3", "fleet.type",
                "one of S1, S2, S3", f.type);
        require(f.count >= 0, "fleet.count", "must be >= 0", f.count);
        total += f.count;
    }
    require(total >= 1, "fleet", "must provide at least one server", total);

    for (std::size_t i = 0; i < 4; ++i) {
        const auto& t = cfg.catalog.types[i];
        require(t.pe >= 1 && t.mips > 0 && t.ram_gb > 0 && t.storage_gb > 0,
                "vm_catalog[" + std::to_string(i) + "]", "capacities must be positive", t.name);
        if (i > 0) {
            const auto& prev = cfg.catalog.types[i - 1];
            require(t.pe > prev.pe && t.mips > prev.mips && t.ram_gb > prev.ram_gb &&
                        t.storage_gb > prev.storage_gb,
                    "vm_catalog", "capacities must strictly increase small -> Xlarge", t.name);
        }
    }

    require(cfg.topology.lags >= 1, "topology.lags", "must be >= 1", cfg.topology.lags);
    require(cfg.topology.hidden >= 1, "topology.hidden", "must be >= 1", cfg.topology.hidden);
    require(cfg.topology.outputs == 1, "topology.outputs", "must be 1 (single-step forecast)",
            cfg.topology.outputs);
    require(cfg.topology.channels >= 1 && cfg.topology.channels <= 8, "topology.channels",
            "must be in [1, 8]", cfg.topology.channels);

    const auto& tr = cfg.trainer;
    require(tr.population >= 4, "trainer.population", "must be >= 4", tr.population);
    require(tr.max_generations >= 0, "trainer.max_generations", "must be >= 0", tr.max_generations);
    double gsum = 0;
    for (double g : tr.mutation_probs) {
        require(g >= 0.0 && g <= 1.0, "trainer.mutation_probs", "entries must be in [0, 1]", g);
        gsum += g;
    }
    require(std::abs(gsum - 1.0) <= 1e-9, "trainer.mutation_probs", "must sum to 1", gsum);
    const double wsum = tr.crossover_probs[0] + tr.crossover_probs[1];
    require(tr.crossover_probs[0] >= 0.0 && tr.crossover_probs[1] >= 0.0 &&
                std::abs(wsum - 1.0) <= 1e-9,
            "trainer.crossover_probs", "must be non-negative and sum to 1", wsum);
    require(tr.mutation_rate_lo >= 0.0 && tr.mutation_rate_lo < tr.mutation_rate_hi &&
                tr.mutation_rate_hi <= 1.0,
            "trainer.mutation_rate_bounds", "must satisfy 0 <= lo < hi <= 1", tr.mutation_rate_hi);
    require(tr.crossover_rate_lo >= 0.0 && tr.crossover_rate_lo < tr.crossover_rate_hi &&
                tr.crossover_rate_hi <= 1.0,
            "trainer.crossover_rate_bounds", "must satisfy 0 <= lo < hi <= 1", tr.crossover_rate_hi);
    require(tr.learning_period >= 1, "trainer.learning_period", "must be >= 1", tr.learning_period);
    require(tr.no_improve_patience >= 1, "trainer.no_improve_patience", "must be >= 1",
            tr.no_improve_patience);
    require(tr.improve_epsilon >= 0.0, "trainer.improve_epsilon", "must be >= 0", tr.improve_epsilon);
    require(tr.train_fraction > 0.0 && tr.train_fraction < 1.0, "trainer.train_fraction",
            "must be in (0, 1)", tr.train_fraction);

    require(cfg.edp_alpha > 0.5 && cfg.edp_alpha <= 1.0, "edp_alpha", "must be in (0.5, 1]",
            cfg.edp_alpha);

    require(cfg.ga.population >= 2, "ga.population", "must be >= 2", cfg.ga.population);
    require(cfg.ga.generations >= 1, "ga.generations", "must be >= 1", cfg.ga.generations);
    require(cfg.ga.crossover_rate >= 0.0 && cfg.ga.crossover_rate <= 1.0, "ga.crossover_rate",
            "must be in [0, 1]", cfg.ga.crossover_rate);
    require(cfg.ga.mutation_rate >= 0.0 && cfg.ga.mutation_rate <= 1.0, "ga.mutation_rate",
            "must be in [0, 1]", cfg.ga.mutation_rate);

    require(!cfg.scenarios.empty(), "scenarios", "must list at least one scenario", "empty");
    require(cfg.warmup_intervals >= cfg.topology.lags + 2, "warmup_intervals",
            "must be >= topology.lags + 2", cfg.warmup_intervals);
    require(cfg.retrain_generations >= 1, "retrain_generations", "must be >= 1",
            cfg.retrain_generations);
    require(cfg.reference.cpu_mips > 0.0, "reference.cpu_mips", "must be > 0",
            cfg.reference.cpu_mips);
    require(cfg.reference.mem_gb > 0.0, "reference.mem_gb", "must be > 0", cfg.reference.mem_gb);
    require(cfg.k_max >= 2, "k_max", "must be >= 2", cfg.k_max);

    const auto& sy = cfg.synth;
    require(sy.tasks >= 0, "synth.tasks", "must be >= 0", sy.tasks);
    require(sy.interval_minutes >= 1, "synth.interval_minutes", "must be >= 1", sy.interval_minutes);
    require(sy.duration_minutes >= sy.interval_minutes, "synth.duration_minutes",
            "must be >= synth.interval_minutes", sy.duration_minutes);
    require(sy.scale_min >= 0.0 && sy.scale_min <= sy.scale_max, "synth.scale_min",
            "must satisfy 0 <= scale_min <= scale_max", sy.scale_min);
    require(!sy.patterns.empty(), "synth.patterns", "must list at least one resource", "empty");
    for (const auto& [name, p] : sy.patterns) {
        require(p.period_minutes >= 1, "synth.patterns." + name + ".period_minutes", "must be >= 1",
                p.period_minutes);
        require(p.noise >= 0.0, "synth.patterns." + name + ".noise", "must be >= 0", p.noise);
        require(p.burst_prob >= 0.0 && p.burst_prob <= 1.0, "synth.patterns." + name + ".burst_prob",
                "must be in [0, 1]", p.burst_prob);
    }

    require(!cfg.pws_set.empty(), "pws_set", "must list at least one window", "empty");
    for (int p : cfg.pws_set) require(p >= 1, "pws_set", "entries must be >= 1", p);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config error: cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config error: " + path + " is not valid JSON: " + e.what());
    }
    RunConfig cfg = config_from_json(doc);
    validate(cfg);
    return cfg;
}

std::vector<ServerSpec> build_fleet(const RunConfig& cfg) {
    std::vector<ServerSpec> out;
    for (const auto& f : cfg.fleet) {
        for (int i = 0; i < f.count; ++i) {
            const std::string id = f.type + "-" + std::to_string(i);
            if (f.type == "S1")
                out.push_back(ServerSpec::s1(id));
            else if (f.type == "S2")
                out.push_back(ServerSpec::s2(id));
            else
                out.push_back(ServerSpec::s3(id));
        }
    }
    return out;
}

OrchestratorConfig orchestrator_config(const RunConfig& cfg) {
    OrchestratorConfig oc;
    oc.pws_minutes = cfg.pws_minutes;
    oc.warmup_intervals = cfg.warmup_intervals;
    oc.topology = cfg.topology;
    oc.trainer = cfg.trainer;
    oc.retrain_generations = cfg.retrain_generations;
    oc.edp_alpha = cfg.edp_alpha;
    oc.ga = cfg.ga;
    oc.reference = cfg.reference;
    oc.k_max = cfg.k_max;
    return oc;
}

}  // namespace resman
