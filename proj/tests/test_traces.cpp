#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "resman/rng.hpp"
#include "resman/traces.hpp"

using namespace resman;

namespace {

TaskSeries make_series(std::vector<double> cpu, std::vector<double> mem, int interval_min = 5) {
    TaskSeries s;
    s.vm_id = "vm-a";
    s.interval_minutes = interval_min;
    s.resources = {"cpu", "mem"};
    for (std::size_t i = 0; i < cpu.size(); ++i) {
        s.timestamps.push_back(static_cast<std::int64_t>(i) * interval_min * 60);
        s.demands.push_back({cpu[i], mem[i]});
    }
    return s;
}

double series_mean(const TaskSeries& s, std::size_t k) {
    double sum = 0;
    for (const auto& row : s.demands) sum += row[k];
    return sum / static_cast<double>(s.size());
}

}  // namespace

TEST_CASE("parse_trace: header only yields empty collection") {
    std::istringstream in("timestamp,vm_id,cpu,mem\n");
    CHECK(parse_trace(in).empty());
}

TEST_CASE("parse_trace: single vm passes through in order") {
    std::istringstream in(
        "timestamp,vm_id,cpu\n"
        "0,a,0.1\n"
        "300,a,0.2\n"
        "600,a,0.3\n");
    auto out = parse_trace(in);
    REQUIRE(out.size() == 1);
    CHECK(out[0].vm_id == "a");
    CHECK(out[0].resources == std::vector<std::string>{"cpu"});
    REQUIRE(out[0].size() == 3);
    CHECK(out[0].demands[0][0] == doctest::Approx(0.1));
    CHECK(out[0].demands[1][0] == doctest::Approx(0.2));
    CHECK(out[0].demands[2][0] == doctest::Approx(0.3));
    CHECK(out[0].interval_minutes == 5);
}

TEST_CASE("parse_trace: interleaved vms come out time-sorted (sort oracle)") {
    // raw rows deliberately out of order per vm
    struct Row { std::int64_t ts; const char* vm; double v; };
    std::vector<Row> rows = {
        {600, "b", 0.6}, {0, "a", 0.1}, {300, "b", 0.5}, {300, "a", 0.2},
        {0, "b", 0.4},   {600, "a", 0.3},
    };
    std::ostringstream text;
    text << "timestamp,vm_id,cpu\n";
    for (const auto& r : rows) text << r.ts << ',' << r.vm << ',' << r.v << '\n';
    std::istringstream in(text.str());
    auto out = parse_trace(in);
    REQUIRE(out.size() == 2);

    for (const auto& s : out) {
        // oracle: sort the raw rows for this vm independently
        std::vector<Row> expect;
        for (const auto& r : rows)
            if (r.vm == s.vm_id) expect.push_back(r);
        std::sort(expect.begin(), expect.end(), [](const Row& a, const Row& b) { return a.ts < b.ts; });
        REQUIRE(s.size() == expect.size());
        for (std::size_t i = 0; i < expect.size(); ++i) {
            CHECK(s.timestamps[i] == expect[i].ts);
            CHECK(s.demands[i][0] == doctest::Approx(expect[i].v));
        }
    }
}

TEST_CASE("parse_trace: errors name the line") {
    SUBCASE("malformed row") {
        std::istringstream in("timestamp,vm_id,cpu\n0,a,0.1\nnonsense\n");
        CHECK_THROWS_WITH_AS(parse_trace(in), doctest::Contains("line 3"), std::runtime_error);
    }
    SUBCASE("bad number") {
        std::istringstream in("timestamp,vm_id,cpu\n0,a,zz\n");
        CHECK_THROWS_WITH_AS(parse_trace(in), doctest::Contains("line 2"), std::runtime_error);
    }
    SUBCASE("negative demand") {
        std::istringstream in("timestamp,vm_id,cpu\n0,a,-0.5\n");
        CHECK_THROWS_WITH_AS(parse_trace(in), doctest::Contains("negative"), std::runtime_error);
    }
    SUBCASE("duplicate vm_id+timestamp") {
        std::istringstream in("timestamp,vm_id,cpu\n0,a,0.1\n0,a,0.2\n");
        CHECK_THROWS_WITH_AS(parse_trace(in), doctest::Contains("duplicate"), std::runtime_error);
    }
    SUBCASE("missing header") {
        std::istringstream in("");
        CHECK_THROWS_AS(parse_trace(in), std::runtime_error);
    }
}

TEST_CASE("parse_trace: alternate delimiter") {
    std::istringstream in("timestamp;vm_id;cpu\n0;a;0.25\n");
    auto out = parse_trace(in, ';');
    REQUIRE(out.size() == 1);
    CHECK(out[0].demands[0][0] == doctest::Approx(0.25));
}

TEST_CASE("aggregate: window equal to native interval is the identity") {
    auto s = make_series({0.1, 0.2, 0.3}, {0.4, 0.5, 0.6});
    auto agg = aggregate(s, 5);
    REQUIRE(agg.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(agg.timestamps[i] == s.timestamps[i]);
        CHECK(agg.demands[i][0] == doctest::Approx(s.demands[i][0]));
        CHECK(agg.demands[i][1] == doctest::Approx(s.demands[i][1]));
    }
}

TEST_CASE("aggregate: two samples in one 10-min window average to the mean") {
    auto s = make_series({0.2, 0.4}, {0.0, 1.0});
    auto agg = aggregate(s, 10);
    REQUIRE(agg.size() == 1);
    CHECK(agg.demands[0][0] == doctest::Approx(0.3));
    CHECK(agg.demands[0][1] == doctest::Approx(0.5));
    CHECK(agg.interval_minutes == 10);
}

TEST_CASE("aggregate: twelve 5-min samples to one 60-min window (hand oracle)") {
    std::vector<double> cpu, mem;
    for (int i = 0; i < 12; ++i) {
        cpu.push_back(0.05 * i);
        mem.push_back(0.3 + 0.01 * i);
    }
    // oracle: recompute the means directly
    double cpu_mean = 0, mem_mean = 0;
    for (int i = 0; i < 12; ++i) { cpu_mean += cpu[i]; mem_mean += mem[i]; }
    cpu_mean /= 12; mem_mean /= 12;

    auto agg = aggregate(make_series(cpu, mem), 60);
    REQUIRE(agg.size() == 1);
    CHECK(agg.demands[0][0] == doctest::Approx(cpu_mean).epsilon(1e-12));
    CHECK(agg.demands[0][1] == doctest::Approx(mem_mean).epsilon(1e-12));
}

TEST_CASE("aggregate: non-multiple window and gaps error") {
    auto s = make_series({0.1, 0.2}, {0.1, 0.2});
    CHECK_THROWS_AS(aggregate(s, 7), std::invalid_argument);

    auto gappy = make_series({0.1, 0.2, 0.3}, {0.1, 0.2, 0.3});
    gappy.timestamps[2] = 4 * 600;  // skip two whole 10-min windows
    CHECK_THROWS_WITH_AS(aggregate(gappy, 10), doctest::Contains("no samples"), std::runtime_error);
}

TEST_CASE("aggregate preserves total mass on full windows") {
    Rng rng(7);
    std::vector<double> cpu, mem;
    for (int i = 0; i < 48; ++i) {
        cpu.push_back(rng.uniform());
        mem.push_back(rng.uniform());
    }
    auto s = make_series(cpu, mem);
    for (int window : {10, 20, 60}) {
        auto agg = aggregate(s, window);
        CHECK(series_mean(agg, 0) == doctest::Approx(series_mean(s, 0)).epsilon(1e-9));
        CHECK(series_mean(agg, 1) == doctest::Approx(series_mean(s, 1)).epsilon(1e-9));
    }
}

TEST_CASE("normalize: endpoints and midpoint") {
    auto s = make_series({2, 4, 6}, {2, 4, 6});
    auto n = normalize(s);
    CHECK(n.values[0][0] == doctest::Approx(0.0));
    CHECK(n.values[1][0] == doctest::Approx(0.5));
    CHECK(n.values[2][0] == doctest::Approx(1.0));
    CHECK(n.bounds[0].lo == doctest::Approx(2));
    CHECK(n.bounds[0].hi == doctest::Approx(6));
}

TEST_CASE("normalize: constant series maps to zeros") {
    auto s = make_series({5, 5, 5}, {5, 5, 5});
    auto n = normalize(s);
    for (const auto& row : n.values) {
        CHECK(row[0] == 0.0);
        CHECK(row[1] == 0.0);
    }
    // denormalize still reconstructs the constant
    CHECK(denormalize(n.values[0][0], n.bounds[0].lo, n.bounds[0].hi) == doctest::Approx(5));
}

TEST_CASE("normalize: direct formula check") {
    auto s = make_series({0.1, 0.7, 0.4}, {0.1, 0.7, 0.4});
    auto n = normalize(s);
    CHECK(n.values[0][0] == doctest::Approx(0.0));
    CHECK(n.values[1][0] == doctest::Approx(1.0));
    CHECK(n.values[2][0] == doctest::Approx(0.5));
}

TEST_CASE("normalize: empty series errors") {
    TaskSeries s;
    s.resources = {"cpu"};
    s.interval_minutes = 5;
    CHECK_THROWS_AS(normalize(s), std::invalid_argument);
}

TEST_CASE("denormalize endpoints and midpoint") {
    CHECK(denormalize(0.0, 2, 6) == doctest::Approx(2));
    CHECK(denormalize(1.0, 2, 6) == doctest::Approx(6));
    CHECK(denormalize(0.5, 2, 6) == doctest::Approx(4));
}

TEST_CASE("normalize/denormalize round-trips within 1e-9") {
    Rng rng(21);
    std::vector<double> cpu, mem;
    for (int i = 0; i < 40; ++i) {
        cpu.push_back(rng.uniform(0.0, 0.9));
        mem.push_back(rng.uniform(0.1, 1.0));
    }
    auto s = make_series(cpu, mem);
    auto n = normalize(s);
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t k = 0; k < 2; ++k) {
            const double back = denormalize(n.values[i][k], n.bounds[k].lo, n.bounds[k].hi);
            CHECK(back == doctest::Approx(s.demands[i][k]).epsilon(1e-9));
        }
}

TEST_CASE("make_windows: counts and contents") {
    const int n = 3;
    SUBCASE("minimal length gives exactly one window") {
        auto s = normalize(make_series({1, 2, 3, 4}, {4, 3, 2, 1}));
        auto w = make_windows(s, n);
        REQUIRE(w.size() == 1);
        CHECK(w[0].inputs.size() == 6);
        CHECK(w[0].target.size() == 2);
    }
    SUBCASE("length n+3 gives 3 overlapping windows (index enumeration oracle)") {
        auto s = normalize(make_series({1, 2, 3, 4, 5, 6}, {6, 5, 4, 3, 2, 1}));
        auto w = make_windows(s, n);
        REQUIRE(w.size() == 3);
        // window t must contain samples [t, t+n) and target t+n
        for (std::size_t t = 0; t < w.size(); ++t) {
            for (int i = 0; i < n; ++i)
                for (std::size_t k = 0; k < 2; ++k)
                    CHECK(w[t].inputs[static_cast<std::size_t>(i) * 2 + k] ==
                          doctest::Approx(s.values[t + static_cast<std::size_t>(i)][k]));
            CHECK(w[t].target[0] == doctest::Approx(s.values[t + n][0]));
        }
        // consecutive windows share n-1 input samples
        for (std::size_t t = 1; t < w.size(); ++t)
            for (int i = 0; i < n - 1; ++i)
                for (std::size_t k = 0; k < 2; ++k)
                    CHECK(w[t].inputs[static_cast<std::size_t>(i) * 2 + k] ==
                          doctest::Approx(w[t - 1].inputs[static_cast<std::size_t>(i + 1) * 2 + k]));
    }
    SUBCASE("too short errors") {
        auto s = normalize(make_series({1, 2, 3}, {1, 2, 3}));
        CHECK_THROWS_AS(make_windows(s, n), std::invalid_argument);
    }
    SUBCASE("a missing timestamp refuses to produce windows") {
        auto raw = make_series({1, 2, 3, 4, 5}, {5, 4, 3, 2, 1});
        raw.timestamps[3] += 600;  // open a hole mid-series
        raw.timestamps[4] += 600;
        CHECK_THROWS_WITH_AS(make_windows(normalize(raw), n), doctest::Contains("gap"),
                             std::runtime_error);
    }
    SUBCASE("count is exactly length - n") {
        auto s = normalize(make_series({1, 2, 3, 4, 5, 6, 7, 8, 9}, {9, 8, 7, 6, 5, 4, 3, 2, 1}));
        CHECK(make_windows(s, n).size() == 9 - 3);
    }
}

TEST_CASE("synth_workload: degenerate generator is constant at base") {
    WorkloadSpec spec;
    spec.tasks = 2;
    spec.duration_minutes = 60;
    spec.interval_minutes = 5;
    spec.patterns = {{"cpu", {0.4, 0.0, 240, 0.0, 0.0, 0.0}}, {"mem", {0.2, 0.0, 240, 0.0, 0.0, 0.0}}};
    auto out = synth_workload(spec, 9);
    REQUIRE(out.size() == 2);
    for (const auto& s : out)
        for (const auto& row : s.demands) {
            CHECK(row[0] == doctest::Approx(0.4));
            CHECK(row[1] == doctest::Approx(0.2));
        }
}

TEST_CASE("synth_workload: same seed is bit-identical, different seed is not") {
    WorkloadSpec spec;
    spec.tasks = 3;
    spec.duration_minutes = 120;
    auto a = synth_workload(spec, 1234);
    auto b = synth_workload(spec, 1234);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].timestamps == b[i].timestamps);
        CHECK(a[i].demands == b[i].demands);
    }
    auto c = synth_workload(spec, 1235);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size() && !any_diff; ++i)
        any_diff = a[i].demands != c[i].demands;
    CHECK(any_diff);
}

TEST_CASE("synth_workload: autocorrelation peaks at the sinusoid period") {
    WorkloadSpec spec;
    spec.tasks = 1;
    spec.duration_minutes = 4 * 240;  // four full periods
    spec.interval_minutes = 5;
    spec.patterns = {{"cpu", {0.5, 0.3, 240, 0.0, 0.0, 0.0}}};
    auto out = synth_workload(spec, 77);
    REQUIRE(out.size() == 1);
    const auto& d = out[0].demands;
    const auto m = d.size();
    double mean = 0;
    for (const auto& row : d) mean += row[0];
    mean /= static_cast<double>(m);

    // oracle: raw autocorrelation; within lags 1..2P-1 the unique peak must be
    // the period lag (every multiple of P ties, so the search stays below 2P)
    auto autocorr = [&](std::size_t lag) {
        double acc = 0;
        for (std::size_t i = 0; i + lag < m; ++i)
            acc += (d[i][0] - mean) * (d[i + lag][0] - mean);
        return acc / static_cast<double>(m - lag);
    };
    const std::size_t period_lag = 240 / 5;
    std::size_t best_lag = 1;
    double best = autocorr(1);
    for (std::size_t lag = 2; lag < 2 * period_lag; ++lag)
        if (autocorr(lag) > best) { best = autocorr(lag); best_lag = lag; }
    CHECK(best_lag == period_lag);
}

TEST_CASE("synth_workload: demands stay in [0,1] under noise and bursts") {
    WorkloadSpec spec;
    spec.tasks = 4;
    spec.duration_minutes = 600;
    spec.patterns = {{"cpu", {0.8, 0.4, 120, 0.3, 0.5, 0.8}}};
    for (const auto& s : synth_workload(spec, 5))
        for (const auto& row : s.demands) {
            CHECK(row[0] >= 0.0);
            CHECK(row[0] <= 1.0);
        }
}

TEST_CASE("synth_workload: invalid specs error") {
    WorkloadSpec spec;
    spec.tasks = -1;
    CHECK_THROWS_AS(synth_workload(spec, 1), std::invalid_argument);
    spec.tasks = 1;
    spec.duration_minutes = 0;
    CHECK_THROWS_AS(synth_workload(spec, 1), std::invalid_argument);
    spec.duration_minutes = 60;
    spec.interval_minutes = -5;
    CHECK_THROWS_AS(synth_workload(spec, 1), std::invalid_argument);
}

TEST_CASE("write_trace/parse_trace round-trip is lossless") {
    WorkloadSpec spec;
    spec.tasks = 3;
    spec.duration_minutes = 180;
    auto series = synth_workload(spec, 42);
    std::ostringstream out;
    write_trace(out, series);
    std::istringstream in(out.str());
    auto back = parse_trace(in);
    REQUIRE(back.size() == series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        CHECK(back[i].vm_id == series[i].vm_id);
        CHECK(back[i].timestamps == series[i].timestamps);
        CHECK(back[i].demands == series[i].demands);  // exact: shortest round-trip formatting
    }
}
