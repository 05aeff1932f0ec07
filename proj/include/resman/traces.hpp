#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace resman {

// Per-VM multi-resource utilization time series. Demands are fractions of a
// reference capacity (typically in [0,1]); timestamps are epoch seconds and
// strictly increasing.
struct TaskSeries {
    std::string vm_id;
    int interval_minutes = 0;
    std::vector<std::string> resources;
    std::vector<std::int64_t> timestamps;
    std::vector<std::vector<double>> demands;  // [sample][resource]

    std::size_t size() const { return timestamps.size(); }
};

struct ResourceBounds {
    double lo = 0.0;
    double hi = 0.0;
};

// Min-max rescaled series; values in [0,1], one bound pair per resource.
// A constant resource (hi == lo) maps to all-zero values.
struct NormalizedSeries {
    TaskSeries base;
    std::vector<ResourceBounds> bounds;         // per resource
    std::vector<std::vector<double>> values;    // [sample][resource]
};

// One supervised sample: `lags` consecutive normalized samples as inputs
// (lag-major layout, inputs[i*x + k] = resource k at lag sample i) and the
// following sample as the target.
struct TrainingWindow {
    std::vector<double> inputs;
    std::vector<double> target;
};

struct ResourcePattern {
    double base = 0.3;
    double amplitude = 0.2;
    int period_minutes = 240;
    double noise = 0.02;
    double burst_prob = 0.0;
    double burst_magnitude = 0.3;
};

struct WorkloadSpec {
    int tasks = 20;
    int duration_minutes = 720;
    int interval_minutes = 5;
    double scale_min = 1.0;  // per-task magnitude multiplier range
    double scale_max = 1.0;
    std::vector<std::pair<std::string, ResourcePattern>> patterns = {
        {"cpu", ResourcePattern{}},
        {"mem", ResourcePattern{0.25, 0.15, 360, 0.02, 0.0, 0.2}},
    };
};

// Parses delimited text with header `timestamp,vm_id,<resource>...` into one
// series per vm_id, samples sorted by timestamp. Throws naming the offending
// line on malformed rows, duplicate (vm_id,timestamp) pairs and negative
// demands.
std::vector<TaskSeries> parse_trace(std::istream& in, char delim = ',');

void write_trace(std::ostream& out, const std::vector<TaskSeries>& series, char delim = ',');

// Mean-aggregates into windows of `window_minutes` anchored at the first
// timestamp. The window must be a multiple of the native interval and every
// window must contain at least one sample (gaps are an error, not zero-fill).
TaskSeries aggregate(const TaskSeries& series, int window_minutes);

NormalizedSeries normalize(const TaskSeries& series);

// Inverse of the min-max map: lo + value*(hi - lo).
double denormalize(double value, double lo, double hi);

// Sliding windows over a regularly spaced normalized series; yields exactly
// size - lags windows. Throws if the series is too short or has a gap.
std::vector<TrainingWindow> make_windows(const NormalizedSeries& series, int lags);

// Deterministic synthetic workload: per-task scaled sinusoid + noise +
// occasional bursts, clipped to [0,1]. A fixed (spec, seed) pair always
// produces bit-identical output.
std::vector<TaskSeries> synth_workload(const WorkloadSpec& spec, std::uint64_t seed);

}  // namespace resman
