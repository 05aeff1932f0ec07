#include "resman/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace resman {

namespace {

void check_topology(const Topology& t) {
    if (t.lags < 1 || t.hidden < 1 || t.outputs < 1 || t.channels < 1)
        throw std::invalid_argument("topology: all dimensions must be >= 1");
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

int channel_weight_count(const Topology& t) {
    check_topology(t);
    return (t.lags + 1) * t.hidden + t.hidden * t.outputs;
}

int genome_length(const Topology& t) { return t.channels * channel_weight_count(t); }

Genome random_genome(const Topology& t, Rng& rng) {
    Genome g(static_cast<std::size_t>(genome_length(t)));
    for (double& w : g) w = rng.uniform(-1.0, 1.0);
    return g;
}

std::vector<double> forward(const Genome& g, const Topology& t, std::span<const double> inputs) {
    check_topology(t);
    const auto n = static_cast<std::size_t>(t.lags);
    const auto p = static_cast<std::size_t>(t.hidden);
    const auto q = static_cast<std::size_t>(t.outputs);
    const auto x = static_cast<std::size_t>(t.channels);
    const auto per_channel = static_cast<std::size_t>(channel_weight_count(t));
    if (g.size() != per_channel * x)
        throw std::invalid_argument("forward: genome length " + std::to_string(g.size()) +
                                    " does not match topology (" + std::to_string(per_channel * x) + ")");
    if (inputs.size() != n * x)
        throw std::invalid_argument("forward: expected " + std::to_string(n * x) + " inputs, got " +
                                    std::to_string(inputs.size()));

    std::vector<double> out(x * q);
    std::vector<double> hidden(p);
    for (std::size_t k = 0; k < x; ++k) {
        const double* w = g.data() + k * per_channel;        // (n+1) x p input->hidden block
        const double* v = w + (n + 1) * p;                   // p x q hidden->output block
        for (std::size_t j = 0; j < p; ++j) {
            double acc = w[n * p + j];                       // bias row
            for (std::size_t i = 0; i < n; ++i) acc += w[i * p + j] * inputs[i * x + k];
            hidden[j] = sigmoid(acc);
        }
        for (std::size_t o = 0; o < q; ++o) {
            double acc = 0.0;
            for (std::size_t j = 0; j < p; ++j) acc += v[j * q + o] * hidden[j];
            out[k * q + o] = sigmoid(acc);
        }
    }
    return out;
}

FitnessScore evaluate_fitness(const Genome& g, const Topology& t,
                              const std::vector<TrainingWindow>& samples) {
    if (samples.empty()) throw std::invalid_argument("fitness: no samples");
    const auto x = static_cast<std::size_t>(t.channels);
    if (t.outputs != 1) throw std::invalid_argument("fitness: single-step forecasts only (outputs=1)");

    FitnessScore score;
    score.per_channel.assign(x, 0.0);
    for (const auto& w : samples) {
        if (w.target.size() != x)
            throw std::invalid_argument("fitness: window target size does not match channels");
        const auto out = forward(g, t, w.inputs);
        for (std::size_t k = 0; k < x; ++k) {
            const double e = w.target[k] - out[k];
            score.per_channel[k] += e * e;
        }
    }
    const auto m = static_cast<double>(samples.size());
    double total = 0.0;
    for (double& v : score.per_channel) {
        v /= m;
        total += v;
    }
    score.scalar = total / static_cast<double>(x);
    return score;
}

double error_padding(double prev_err, double curr_err, double alpha) {
    if (!(alpha > 0.5 && alpha <= 1.0))
        throw std::invalid_argument("error_padding: alpha must be in (0.5, 1]");
    if (prev_err < 0.0 || curr_err < 0.0)
        throw std::invalid_argument("error_padding: errors must be non-negative");
    return (1.0 - alpha) * prev_err + alpha * curr_err;
}

Predictor::Predictor(Topology topology, std::vector<std::string> resources, Genome genome,
                     std::vector<ResourceBounds> bounds, double alpha)
    : topology_(topology),
      resources_(std::move(resources)),
      genome_(std::move(genome)),
      bounds_(std::move(bounds)),
      alpha_(alpha) {
    check_topology(topology_);
    if (static_cast<int>(resources_.size()) != topology_.channels)
        throw std::invalid_argument("predictor: resource names do not match channels");
    if (genome_.size() != static_cast<std::size_t>(genome_length(topology_)))
        throw std::invalid_argument("predictor: genome length does not match topology");
    if (bounds_.size() != resources_.size())
        throw std::invalid_argument("predictor: bounds do not match resources");
    if (!(alpha_ > 0.5 && alpha_ <= 1.0))
        throw std::invalid_argument("predictor: alpha must be in (0.5, 1]");
    err_prev_.assign(resources_.size(), 0.0);
    err_curr_.assign(resources_.size(), 0.0);
}

void Predictor::set_bounds(std::vector<ResourceBounds> bounds) {
    if (bounds.size() != resources_.size())
        throw std::invalid_argument("predictor: bounds do not match resources");
    bounds_ = std::move(bounds);
}

void Predictor::reset_errors(const std::vector<double>& per_resource) {
    if (per_resource.size() != resources_.size())
        throw std::invalid_argument("predictor: error vector size mismatch");
    err_prev_ = per_resource;
    err_curr_ = per_resource;
}

void Predictor::record_errors(const std::vector<double>& per_resource) {
    if (per_resource.size() != resources_.size())
        throw std::invalid_argument("predictor: error vector size mismatch");
    err_prev_ = err_curr_;
    err_curr_ = per_resource;
}

double Predictor::padding_for(std::size_t resource) const {
    return error_padding(err_prev_.at(resource), err_curr_.at(resource), alpha_);
}

Forecast Predictor::forecast(std::span<const double> normalized_inputs) const {
    if (!trained()) throw std::runtime_error("predictor: not trained");
    Forecast f;
    f.predicted = forward(genome_, topology_, normalized_inputs);
    f.padding.resize(f.predicted.size());
    f.padded.resize(f.predicted.size());
    for (std::size_t k = 0; k < f.predicted.size(); ++k) {
        f.padding[k] = padding_for(k);
        f.padded[k] = std::clamp(f.predicted[k] + f.padding[k], 0.0, 1.0);
    }
    return f;
}

double Predictor::denormalize_value(std::size_t resource, double normalized) const {
    const auto& b = bounds_.at(resource);
    return denormalize(normalized, b.lo, b.hi);
}

nlohmann::json Predictor::to_json() const {
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["topology"] = {{"lags", topology_.lags},
                       {"hidden", topology_.hidden},
                       {"outputs", topology_.outputs},
                       {"channels", topology_.channels}};
    doc["resources"] = resources_;
    const auto per_channel = static_cast<std::size_t>(channel_weight_count(topology_));
    nlohmann::json chans = nlohmann::json::array();
    for (int k = 0; k < topology_.channels; ++k) {
        chans.push_back(std::vector<double>(genome_.begin() + k * per_channel,
                                            genome_.begin() + (k + 1) * per_channel));
    }
    doc["channel_weights"] = std::move(chans);
    nlohmann::json bounds = nlohmann::json::array();
    for (const auto& b : bounds_) bounds.push_back({{"min", b.lo}, {"max", b.hi}});
    doc["normalization"] = std::move(bounds);
    doc["error_history"] = {{"prev", err_prev_}, {"curr", err_curr_}};
    doc["padding_alpha"] = alpha_;
    doc["trainer"] = {{"algorithm", provenance.algorithm},
                      {"seed", provenance.seed},
                      {"generations", provenance.generations},
                      {"train_fitness", provenance.train_fitness},
                      {"validation_fitness", provenance.validation_fitness}};
    return doc;
}

Predictor Predictor::from_json(const nlohmann::json& doc) {
    if (doc.value("format_version", 0) != 1)
        throw std::runtime_error("predictor artifact: unsupported format_version");
    Topology t;
    t.lags = doc.at("topology").at("lags").get<int>();
    t.hidden = doc.at("topology").at("hidden").get<int>();
    t.outputs = doc.at("topology").at("outputs").get<int>();
    t.channels = doc.at("topology").at("channels").get<int>();
    auto resources = doc.at("resources").get<std::vector<std::string>>();
    Genome genome;
    for (const auto& block : doc.at("channel_weights")) {
        const auto w = block.get<std::vector<double>>();
        genome.insert(genome.end(), w.begin(), w.end());
    }
    std::vector<ResourceBounds> bounds;
    for (const auto& b : doc.at("normalization"))
        bounds.push_back({b.at("min").get<double>(), b.at("max").get<double>()});
    Predictor p(t, std::move(resources), std::move(genome), std::move(bounds),
                doc.value("padding_alpha", 0.8));
    p.err_prev_ = doc.at("error_history").at("prev").get<std::vector<double>>();
    p.err_curr_ = doc.at("error_history").at("curr").get<std::vector<double>>();
    if (p.err_prev_.size() != p.resources_.size() || p.err_curr_.size() != p.resources_.size())
        throw std::runtime_error("predictor artifact: error history size mismatch");
    if (doc.contains("trainer")) {
        const auto& tr = doc.at("trainer");
        p.provenance.algorithm = tr.value("algorithm", "");
        p.provenance.seed = tr.value("seed", std::uint64_t{0});
        p.provenance.generations = tr.value("generations", 0);
        p.provenance.train_fitness = tr.value("train_fitness", 0.0);
        p.provenance.validation_fitness = tr.value("validation_fitness", 0.0);
    }
    return p;
}

}  // namespace resman
