#include "resman/traces.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "resman/csv.hpp"
#include "resman/rng.hpp"

namespace resman {

namespace {

struct RawRow {
    std::int64_t timestamp;
    std::size_t line;
    std::vector<double> demands;
};

int infer_interval_minutes(const std::vector<std::int64_t>& timestamps) {
    // No interval field in the format; use the smallest positive gap,
    // defaulting to 5 min for single-sample series.
    if (timestamps.size() < 2) return 5;
    std::int64_t gap = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 1; i < timestamps.size(); ++i)
        gap = std::min(gap, timestamps[i] - timestamps[i - 1]);
    const int minutes = static_cast<int>(std::llround(static_cast<double>(gap) / 60.0));
    return std::max(1, minutes);
}

}  // namespace

std::vector<TaskSeries> parse_trace(std::istream& in, char delim) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trace: missing header row");

    const auto header = csv::split(line, delim);
    if (header.size() < 3 || csv::trim(header[0]) != "timestamp" || csv::trim(header[1]) != "vm_id")
        throw std::runtime_error("trace: header must be 'timestamp" + std::string(1, delim) +
                                 "vm_id" + std::string(1, delim) + "<resource>...'");
    std::vector<std::string> resources;
    for (std::size_t i = 2; i < header.size(); ++i) resources.emplace_back(csv::trim(header[i]));

    std::map<std::string, std::vector<RawRow>> rows;  // vm_id -> rows (map keeps vm output order stable)
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const std::string context = "line " + std::to_string(line_no);
        const auto fields = csv::split(line, delim);
        if (fields.size() != header.size())
            throw std::runtime_error(context + ": expected " + std::to_string(header.size()) +
                                     " fields, got " + std::to_string(fields.size()));
        RawRow row;
        row.timestamp = csv::parse_int(fields[0], context);
        row.line = line_no;
        const std::string vm_id(csv::trim(fields[1]));
        if (vm_id.empty()) throw std::runtime_error(context + ": empty vm_id");
        row.demands.reserve(resources.size());
        for (std::size_t i = 2; i < fields.size(); ++i) {
            const double v = csv::parse_double(fields[i], context);
            if (!std::isfinite(v)) throw std::runtime_error(context + ": non-finite demand");
            if (v < 0.0)
                throw std::runtime_error(context + ": negative demand " + csv::format_double(v) +
                                         " for resource " + resources[i - 2]);
            row.demands.push_back(v);
        }
        rows[vm_id].push_back(std::move(row));
    }

    std::vector<TaskSeries> out;
    out.reserve(rows.size());
    for (auto& [vm_id, vm_rows] : rows) {
        std::stable_sort(vm_rows.begin(), vm_rows.end(),
                         [](const RawRow& a, const RawRow& b) { return a.timestamp < b.timestamp; });
        for (std::size_t i = 1; i < vm_rows.size(); ++i) {
            if (vm_rows[i].timestamp == vm_rows[i - 1].timestamp)
                throw std::runtime_error("duplicate timestamp " + std::to_string(vm_rows[i].timestamp) +
                                         " for vm '" + vm_id + "' (lines " +
                                         std::to_string(vm_rows[i - 1].line) + ", " +
                                         std::to_string(vm_rows[i].line) + ")");
        }
        TaskSeries s;
        s.vm_id = vm_id;
        s.resources = resources;
        s.timestamps.reserve(vm_rows.size());
        s.demands.reserve(vm_rows.size());
        for (auto& r : vm_rows) {
            s.timestamps.push_back(r.timestamp);
            s.demands.push_back(std::move(r.demands));
        }
        s.interval_minutes = infer_interval_minutes(s.timestamps);
        out.push_back(std::move(s));
    }
    return out;
}

void write_trace(std::ostream& out, const std::vector<TaskSeries>& series, char delim) {
    out << "timestamp" << delim << "vm_id";
    if (!series.empty())
        for (const auto& r : series.front().resources) out << delim << r;
    else
        out << delim << "cpu" << delim << "mem";
    out << '\n';
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            out << s.timestamps[i] << delim << s.vm_id;
            for (double v : s.demands[i]) out << delim << csv::format_double(v);
            out << '\n';
        }
    }
}

TaskSeries aggregate(const TaskSeries& series, int window_minutes) {
    if (series.interval_minutes <= 0) throw std::invalid_argument("aggregate: series has no interval");
    if (window_minutes <= 0 || window_minutes % series.interval_minutes != 0)
        throw std::invalid_argument("aggregate: window " + std::to_string(window_minutes) +
                                    " min is not a multiple of the native interval " +
                                    std::to_string(series.interval_minutes) + " min");
    if (series.size() == 0) {
        TaskSeries empty = series;
        empty.interval_minutes = window_minutes;
        return empty;
    }

    const std::int64_t window_s = static_cast<std::int64_t>(window_minutes) * 60;
    const std::int64_t t0 = series.timestamps.front();
    const std::size_t x = series.resources.size();
    const std::size_t nwin =
        static_cast<std::size_t>((series.timestamps.back() - t0) / window_s) + 1;

    std::vector<std::vector<double>> sums(nwin, std::vector<double>(x, 0.0));
    std::vector<std::size_t> counts(nwin, 0);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto w = static_cast<std::size_t>((series.timestamps[i] - t0) / window_s);
        for (std::size_t k = 0; k < x; ++k) sums[w][k] += series.demands[i][k];
        ++counts[w];
    }

    TaskSeries out;
    out.vm_id = series.vm_id;
    out.resources = series.resources;
    out.interval_minutes = window_minutes;
    out.timestamps.reserve(nwin);
    out.demands.reserve(nwin);
    for (std::size_t w = 0; w < nwin; ++w) {
        if (counts[w] == 0)
            throw std::runtime_error("aggregate: no samples in window starting at " +
                                     std::to_string(t0 + static_cast<std::int64_t>(w) * window_s) +
                                     " for vm '" + series.vm_id + "'");
        out.timestamps.push_back(t0 + static_cast<std::int64_t>(w) * window_s);
        auto& mean = sums[w];
        for (double& v : mean) v /= static_cast<double>(counts[w]);
        out.demands.push_back(std::move(mean));
    }
    return out;
}

NormalizedSeries normalize(const TaskSeries& series) {
    if (series.size() == 0) throw std::invalid_argument("normalize: empty series");
    const std::size_t x = series.resources.size();

    NormalizedSeries out;
    out.base = series;
    out.bounds.assign(x, ResourceBounds{});
    for (std::size_t k = 0; k < x; ++k) {
        double lo = series.demands[0][k], hi = series.demands[0][k];
        for (const auto& row : series.demands) {
            lo = std::min(lo, row[k]);
            hi = std::max(hi, row[k]);
        }
        out.bounds[k] = {lo, hi};
    }
    out.values.reserve(series.size());
    for (const auto& row : series.demands) {
        std::vector<double> v(x);
        for (std::size_t k = 0; k < x; ++k) {
            const auto [lo, hi] = out.bounds[k];
            v[k] = hi > lo ? (row[k] - lo) / (hi - lo) : 0.0;
        }
        out.values.push_back(std::move(v));
    }
    return out;
}

double denormalize(double value, double lo, double hi) {
    if (hi < lo) throw std::invalid_argument("denormalize: hi < lo");
    return lo + value * (hi - lo);
}

std::vector<TrainingWindow> make_windows(const NormalizedSeries& series, int lags) {
    if (lags <= 0) throw std::invalid_argument("make_windows: lags must be positive");
    const std::size_t m = series.values.size();
    const auto n = static_cast<std::size_t>(lags);
    if (m < n + 1)
        throw std::invalid_argument("make_windows: series of length " + std::to_string(m) +
                                    " is too short for " + std::to_string(lags) + " lags");
    const std::int64_t step = static_cast<std::int64_t>(series.base.interval_minutes) * 60;
    for (std::size_t i = 1; i < m; ++i)
        if (series.base.timestamps[i] - series.base.timestamps[i - 1] != step)
            throw std::runtime_error("make_windows: gap before timestamp " +
                                     std::to_string(series.base.timestamps[i]));

    const std::size_t x = series.base.resources.size();
    std::vector<TrainingWindow> out;
    out.reserve(m - n);
    for (std::size_t t = 0; t + n < m; ++t) {
        TrainingWindow w;
        w.inputs.reserve(n * x);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < x; ++k) w.inputs.push_back(series.values[t + i][k]);
        w.target = series.values[t + n];
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<TaskSeries> synth_workload(const WorkloadSpec& spec, std::uint64_t seed) {
    if (spec.tasks < 0) throw std::invalid_argument("synth_workload: negative task count");
    if (spec.duration_minutes <= 0) throw std::invalid_argument("synth_workload: non-positive duration");
    if (spec.interval_minutes <= 0) throw std::invalid_argument("synth_workload: non-positive interval");
    if (spec.patterns.empty()) throw std::invalid_argument("synth_workload: no resource patterns");
    if (spec.scale_min > spec.scale_max || spec.scale_min < 0.0)
        throw std::invalid_argument("synth_workload: bad scale range");
    for (const auto& [name, p] : spec.patterns)
        if (p.period_minutes <= 0)
            throw std::invalid_argument("synth_workload: non-positive period for " + name);

    const int steps = spec.duration_minutes / spec.interval_minutes;
    const std::size_t x = spec.patterns.size();
    constexpr double two_pi = 6.283185307179586476925287;

    std::vector<TaskSeries> out;
    out.reserve(static_cast<std::size_t>(spec.tasks));
    for (int task = 0; task < spec.tasks; ++task) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(task)));
        const double scale = rng.uniform(spec.scale_min, spec.scale_max);
        std::vector<double> phase(x);
        for (auto& ph : phase) ph = rng.uniform();

        TaskSeries s;
        s.vm_id = "vm-" + std::to_string(task);
        s.interval_minutes = spec.interval_minutes;
        for (const auto& [name, p] : spec.patterns) s.resources.push_back(name);
        s.timestamps.reserve(static_cast<std::size_t>(steps));
        s.demands.reserve(static_cast<std::size_t>(steps));
        for (int t = 0; t < steps; ++t) {
            const double minute = static_cast<double>(t) * spec.interval_minutes;
            std::vector<double> row(x);
            for (std::size_t k = 0; k < x; ++k) {
                const ResourcePattern& p = spec.patterns[k].second;
                double v = scale * (p.base + p.amplitude *
                                                 std::sin(two_pi * (minute / p.period_minutes + phase[k])));
                if (p.noise > 0.0) v += p.noise * rng.normal();
                if (p.burst_prob > 0.0 && rng.uniform() < p.burst_prob)
                    v += p.burst_magnitude * rng.uniform();
                row[k] = std::clamp(v, 0.0, 1.0);
            }
            s.timestamps.push_back(static_cast<std::int64_t>(t) * spec.interval_minutes * 60);
            s.demands.push_back(std::move(row));
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace resman
