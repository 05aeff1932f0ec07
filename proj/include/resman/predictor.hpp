#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "resman/rng.hpp"
#include "resman/traces.hpp"

namespace resman {

// Layer shape of the multi-channel feed-forward net. Each of the `channels`
// resources gets its own weight-disjoint copy of the lags->hidden->outputs
// structure; a forward pass evaluates all channels at once.
struct Topology {
    int lags = 3;      // input node sets (past samples)
    int hidden = 5;    // hidden node sets
    int outputs = 1;   // output node sets (single-step forecast)
    int channels = 2;  // resources per set
};

// Weights for one channel: (lags+1)*hidden input->hidden (the +1 is the bias
// row) followed by hidden*outputs.
int channel_weight_count(const Topology& t);
int genome_length(const Topology& t);

using Genome = std::vector<double>;

// Fresh genome with every weight uniform in [-1, 1].
Genome random_genome(const Topology& t, Rng& rng);

// Evaluates all channels; inputs are lag-major normalized values
// (inputs[i*channels + k], exactly lags*channels of them). Logistic sigmoid at
// hidden and output layers, so outputs land in (0,1). Returns one value per
// channel (per output set, channel-major when outputs > 1).
std::vector<double> forward(const Genome& g, const Topology& t, std::span<const double> inputs);

struct FitnessScore {
    std::vector<double> per_channel;  // mean squared error per resource
    double scalar = 0.0;              // mean of the per-channel errors
};

// Mean squared prediction error over the windows, per channel plus the scalar
// aggregate used for selection. Fitness is zero iff every prediction matches
// its target.
FitnessScore evaluate_fitness(const Genome& g, const Topology& t,
                              const std::vector<TrainingWindow>& samples);

// Safety margin blended from the last two error scores: (1-alpha)*prev +
// alpha*curr, with alpha in (0.5, 1] so the recent error dominates.
double error_padding(double prev_err, double curr_err, double alpha);

// One forecast in normalized space. padded = predicted + padding per resource,
// clamped into [0,1].
struct Forecast {
    std::vector<double> predicted;
    std::vector<double> padding;
    std::vector<double> padded;
};

// A trained predictor bundled with everything needed to forecast online:
// normalization bounds, the running error pair for padding, and trainer
// provenance for the serialized artifact.
class Predictor {
public:
    Predictor() = default;
    Predictor(Topology topology, std::vector<std::string> resources, Genome genome,
              std::vector<ResourceBounds> bounds, double alpha);

    bool trained() const { return !genome_.empty(); }
    const Topology& topology() const { return topology_; }
    const Genome& genome() const { return genome_; }
    Genome& genome() { return genome_; }
    const std::vector<std::string>& resources() const { return resources_; }
    const std::vector<ResourceBounds>& bounds() const { return bounds_; }
    void set_bounds(std::vector<ResourceBounds> bounds);
    double alpha() const { return alpha_; }

    // Seeds both error-history slots, e.g. from the training-set fitness.
    void reset_errors(const std::vector<double>& per_resource);
    // Shifts the error pair: prev <- curr, curr <- latest.
    void record_errors(const std::vector<double>& per_resource);
    double padding_for(std::size_t resource) const;

    // Raw + padded forecast from lag-major normalized inputs. Throws if the
    // predictor is untrained or the input size does not match the topology.
    Forecast forecast(std::span<const double> normalized_inputs) const;

    double denormalize_value(std::size_t resource, double normalized) const;

    struct Provenance {
        std::string algorithm;
        std::uint64_t seed = 0;
        int generations = 0;
        double train_fitness = 0.0;
        double validation_fitness = 0.0;
    };
    Provenance provenance;

    nlohmann::json to_json() const;
    static Predictor from_json(const nlohmann::json& doc);

private:
    Topology topology_;
    std::vector<std::string> resources_;
    Genome genome_;
    std::vector<ResourceBounds> bounds_;
    std::vector<double> err_prev_, err_curr_;
    double alpha_ = 0.8;
};

}  // namespace resman
