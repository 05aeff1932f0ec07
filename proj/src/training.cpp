#include "resman/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace resman {

TrainerConfig basic_de_config(TrainerConfig base) {
    base.adapt_rates = false;
    base.adapt_probs = false;
    base.heuristic_crossover = false;
    base.crossover_probs = {1.0, 0.0};
    return base;
}

MutationStrategy pick_mutation_strategy(double draw, const std::array<double, 3>& probs) {
    if (draw > 0.0 && draw <= probs[0]) return MutationStrategy::BestOne;
    if (draw > probs[0] && draw <= probs[0] + probs[1]) return MutationStrategy::CurrentToBestOne;
    return MutationStrategy::RandOne;
}

CrossoverStrategy pick_crossover_strategy(double draw, const std::array<double, 2>& probs) {
    if (draw > 0.0 && draw <= probs[0]) return CrossoverStrategy::Uniform;
    return CrossoverStrategy::Heuristic;
}

Genome mutate(const std::vector<MemberState>& population, std::size_t i, MutationStrategy strategy,
              double rate, std::size_t best_index, Rng& rng) {
    const std::size_t n = population.size();
    if (n < 4) throw std::invalid_argument("mutate: population must have at least 4 members");
    if (i >= n || best_index >= n) throw std::invalid_argument("mutate: index out of range");

    std::vector<std::size_t> taken{i};
    const std::size_t r1 = rng.below_excluding(n, taken);
    taken.push_back(r1);
    const std::size_t r2 = rng.below_excluding(n, taken);
    taken.push_back(r2);
    const std::size_t r3 = rng.below_excluding(n, taken);

    const Genome& xi = population[i].genome;
    const Genome& xb = population[best_index].genome;
    const Genome& x1 = population[r1].genome;
    const Genome& x2 = population[r2].genome;
    const Genome& x3 = population[r3].genome;

    Genome out(xi.size());
    switch (strategy) {
        case MutationStrategy::BestOne:
            for (std::size_t g = 0; g < out.size(); ++g) out[g] = xb[g] + rate * (x1[g] - x2[g]);
            break;
        case MutationStrategy::CurrentToBestOne:
            for (std::size_t g = 0; g < out.size(); ++g)
                out[g] = xi[g] + rate * (xb[g] - xi[g]) + rate * (x1[g] - x2[g]);
            break;
        case MutationStrategy::RandOne:
            for (std::size_t g = 0; g < out.size(); ++g) out[g] = x3[g] + rate * (x1[g] - x2[g]);
            break;
    }
    return out;
}

std::pair<Genome, Genome> crossover_uniform(const Genome& target, const Genome& mutant, double rate,
                                            Rng& rng) {
    if (target.size() != mutant.size())
        throw std::invalid_argument("crossover_uniform: genome length mismatch");
    Genome a(target.size()), b(target.size());
    for (std::size_t g = 0; g < target.size(); ++g) {
        const bool cross = rng.uniform() <= rate;
        a[g] = cross ? mutant[g] : target[g];
        b[g] = cross ? target[g] : mutant[g];
    }
    return {std::move(a), std::move(b)};
}

Genome crossover_heuristic(const Genome& better, const Genome& other, double rate) {
    if (better.size() != other.size())
        throw std::invalid_argument("crossover_heuristic: genome length mismatch");
    Genome out(better.size());
    for (std::size_t g = 0; g < out.size(); ++g) out[g] = rate * (better[g] - other[g]) + better[g];
    return out;
}

bool offspring_survives(double current_error, double offspring_error) {
    return offspring_error <= current_error;
}

SelectionOutcome apply_selection(std::vector<MemberState>& members,
                                 std::vector<OffspringCandidate> offspring) {
    if (members.size() != offspring.size())
        throw std::invalid_argument("apply_selection: offspring count must equal population size");
    SelectionOutcome out;
    out.replaced.assign(members.size(), false);
    for (std::size_t i = 0; i < members.size(); ++i) {
        auto& cand = offspring[i];
        const auto m = static_cast<std::size_t>(cand.mutation);
        const auto c = static_cast<std::size_t>(cand.crossover);
        if (offspring_survives(members[i].fitness.scalar, cand.fitness.scalar)) {
            members[i].genome = std::move(cand.genome);
            members[i].fitness = std::move(cand.fitness);
            ++out.updated;
            ++out.mutation_success[m];
            ++out.crossover_success[c];
            out.replaced[i] = true;
        } else {
            ++out.mutation_fail[m];
            ++out.crossover_fail[c];
        }
    }
    return out;
}

double regenerate_rate(double lo, double hi, double theta) { return lo + theta * (hi - lo); }

std::optional<std::array<double, 3>> mutation_success_probs(const std::array<long, 3>& s,
                                                            const std::array<long, 3>& f,
                                                            ProbabilityForm form) {
    const long total = s[0] + s[1] + s[2];
    if (total == 0) return std::nullopt;

    const auto s1 = static_cast<double>(s[0]), s2 = static_cast<double>(s[1]),
               s3 = static_cast<double>(s[2]);
    const auto f1 = static_cast<double>(f[0]), f2 = static_cast<double>(f[1]),
               f3 = static_cast<double>(f[2]);
    double b;
    if (form == ProbabilityForm::Symmetric) {
        b = 2.0 * (s1 * s2 + s1 * s3 + s2 * s3) + f1 * (s2 + s3) + f2 * (s1 + s3) + f3 * (s1 + s2);
    } else {
        // legacy normalizer: s2*s3 counted twice, s1*s2 missing
        b = 2.0 * (s2 * s3 + s1 * s3 + s2 * s3) + f1 * (s2 + s3) + f2 * (s1 + s3) + f3 * (s1 + s2);
    }
    if (b == 0.0) {
        // degenerate normalizer: split the mass over the successful strategies
        // (with the symmetric form this happens only when a single strategy
        // was ever exercised)
        int winners = 0;
        for (std::size_t k = 0; k < 3; ++k)
            if (s[k] > 0) ++winners;
        std::array<double, 3> probs{0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < 3; ++k)
            if (s[k] > 0) probs[k] = 1.0 / winners;
        return probs;
    }
    std::array<double, 3> probs{};
    probs[0] = s1 * (s2 + f2 + s3 + f3) / b;
    probs[1] = s2 * (s1 + f1 + s3 + f3) / b;
    probs[2] = 1.0 - probs[0] - probs[1];
    return probs;
}

std::optional<std::array<double, 2>> crossover_success_probs(const std::array<long, 2>& s,
                                                             const std::array<long, 2>& f,
                                                             ProbabilityForm form) {
    if (s[0] + s[1] == 0) return std::nullopt;
    const auto s1 = static_cast<double>(s[0]), s2 = static_cast<double>(s[1]);
    const auto f1 = static_cast<double>(f[0]), f2 = static_cast<double>(f[1]);
    double c;
    if (form == ProbabilityForm::Symmetric) {
        c = 2.0 * s1 * s2 + f1 * s2 + f2 * s1;
    } else {
        // legacy normalizer mixes a linear term into a quadratic expression
        c = 2.0 * (s2 + s1) + f1 * s2 + f2 * s1;
    }
    if (c == 0.0) {
        return std::array<double, 2>{s[0] > 0 ? 1.0 : 0.0, s[1] > 0 ? 1.0 : 0.0};
    }
    std::array<double, 2> probs{};
    probs[0] = s1 * (s2 + f2) / c;
    probs[1] = 1.0 - probs[0];
    return probs;
}

// --- DeTrainer ---------------------------------------------------------------

DeTrainer::DeTrainer(Topology topology, TrainerConfig config)
    : topology_(topology), config_(config), rng_(config.seed) {
    if (config_.population < 4)
        throw std::invalid_argument("trainer: population must be at least 4");
    const double gsum = config_.mutation_probs[0] + config_.mutation_probs[1] + config_.mutation_probs[2];
    if (std::abs(gsum - 1.0) > 1e-9)
        throw std::invalid_argument("trainer: mutation strategy probabilities must sum to 1");
    const double wsum = config_.crossover_probs[0] + config_.crossover_probs[1];
    if (std::abs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("trainer: crossover strategy probabilities must sum to 1");
    if (!(config_.mutation_rate_lo >= 0.0 && config_.mutation_rate_lo < config_.mutation_rate_hi &&
          config_.mutation_rate_hi <= 1.0))
        throw std::invalid_argument("trainer: mutation rate bounds must satisfy 0 <= lo < hi <= 1");
    if (!(config_.crossover_rate_lo >= 0.0 && config_.crossover_rate_lo < config_.crossover_rate_hi &&
          config_.crossover_rate_hi <= 1.0))
        throw std::invalid_argument("trainer: crossover rate bounds must satisfy 0 <= lo < hi <= 1");
    if (config_.learning_period < 1) throw std::invalid_argument("trainer: learning_period must be >= 1");
    state_.mutation_probs = config_.mutation_probs;
    state_.crossover_probs = config_.crossover_probs;
}

int DeTrainer::stall_threshold() const {
    return config_.stall_threshold >= 0 ? config_.stall_threshold : (2 * config_.population) / 5;
}

void DeTrainer::initialize(const std::vector<TrainingWindow>& train) {
    state_.members.clear();
    state_.members.reserve(static_cast<std::size_t>(config_.population));
    for (int i = 0; i < config_.population; ++i) {
        MemberState m;
        m.genome = random_genome(topology_, rng_);
        // initial rates are plain uniforms; the lo/hi bounds apply only to
        // regenerated values
        m.mutation_rate = rng_.uniform();
        m.crossover_rate = rng_.uniform();
        state_.members.push_back(std::move(m));
    }
    evaluate_all(train);
    state_.generation = 0;
    state_.mutation_probs = config_.mutation_probs;
    state_.crossover_probs = config_.crossover_probs;
    state_.mutation_success = {};
    state_.mutation_fail = {};
    state_.crossover_success = {};
    state_.crossover_fail = {};
    period_position_ = 0;
    history_.clear();
}

void DeTrainer::evaluate_all(const std::vector<TrainingWindow>& train) {
    for (auto& m : state_.members) m.fitness = evaluate_fitness(m.genome, topology_, train);
    state_.best_index = 0;
    for (std::size_t i = 1; i < state_.members.size(); ++i)
        if (state_.members[i].fitness.scalar < state_.members[state_.best_index].fitness.scalar)
            state_.best_index = i;
    state_.best = state_.members[state_.best_index].genome;
    state_.best_fitness = state_.members[state_.best_index].fitness;
}

void DeTrainer::refresh_best() {
    state_.best_index = 0;
    for (std::size_t i = 1; i < state_.members.size(); ++i)
        if (state_.members[i].fitness.scalar < state_.members[state_.best_index].fitness.scalar)
            state_.best_index = i;
    if (state_.members[state_.best_index].fitness.scalar <= state_.best_fitness.scalar) {
        state_.best = state_.members[state_.best_index].genome;
        state_.best_fitness = state_.members[state_.best_index].fitness;
    }
}

void DeTrainer::step(const std::vector<TrainingWindow>& train) {
    const std::size_t n = state_.members.size();
    std::vector<OffspringCandidate> offspring;
    offspring.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        auto& member = state_.members[i];
        member.mutation_draw = rng_.uniform();
        member.crossover_draw = rng_.uniform();
        const MutationStrategy ms = pick_mutation_strategy(member.mutation_draw, state_.mutation_probs);
        Genome mutant = mutate(state_.members, i, ms, member.mutation_rate, state_.best_index, rng_);

        CrossoverStrategy cs = config_.heuristic_crossover
                                   ? pick_crossover_strategy(member.crossover_draw, state_.crossover_probs)
                                   : CrossoverStrategy::Uniform;
        OffspringCandidate cand;
        cand.mutation = ms;
        cand.crossover = cs;
        if (cs == CrossoverStrategy::Uniform) {
            auto [a, b] = crossover_uniform(member.genome, mutant, member.crossover_rate, rng_);
            auto fa = evaluate_fitness(a, topology_, train);
            auto fb = evaluate_fitness(b, topology_, train);
            if (fa.scalar <= fb.scalar) {
                cand.genome = std::move(a);
                cand.fitness = std::move(fa);
            } else {
                cand.genome = std::move(b);
                cand.fitness = std::move(fb);
            }
        } else {
            const auto mutant_fitness = evaluate_fitness(mutant, topology_, train);
            const bool mutant_better = mutant_fitness.scalar <= member.fitness.scalar;
            const Genome& better = mutant_better ? mutant : member.genome;
            const Genome& other = mutant_better ? member.genome : mutant;
            cand.genome = crossover_heuristic(better, other, member.crossover_rate);
            cand.fitness = evaluate_fitness(cand.genome, topology_, train);
        }
        offspring.push_back(std::move(cand));
    }

    const SelectionOutcome outcome = apply_selection(state_.members, std::move(offspring));
    refresh_best();
    ++state_.generation;
    ++period_position_;

    for (std::size_t k = 0; k < 3; ++k) {
        state_.mutation_success[k] += outcome.mutation_success[k];
        state_.mutation_fail[k] += outcome.mutation_fail[k];
    }
    for (std::size_t k = 0; k < 2; ++k) {
        state_.crossover_success[k] += outcome.crossover_success[k];
        state_.crossover_fail[k] += outcome.crossover_fail[k];
    }

    GenerationRecord rec;
    rec.generation = state_.generation;
    rec.best_per_channel = state_.best_fitness.per_channel;
    rec.best_scalar = state_.best_fitness.scalar;
    rec.updated_members = outcome.updated;
    rec.mut_success = outcome.mutation_success;
    rec.mut_fail = outcome.mutation_fail;
    rec.cross_success = outcome.crossover_success;
    rec.cross_fail = outcome.crossover_fail;

    if (config_.adapt_rates && outcome.updated <= stall_threshold()) {
        for (auto& m : state_.members) {
            m.mutation_rate =
                regenerate_rate(config_.mutation_rate_lo, config_.mutation_rate_hi, rng_.uniform());
            m.crossover_rate =
                regenerate_rate(config_.crossover_rate_lo, config_.crossover_rate_hi, rng_.uniform());
        }
        rec.rates_regenerated = true;
    }

    if (period_position_ >= config_.learning_period) {
        if (config_.adapt_probs) {
            if (auto mp = mutation_success_probs(state_.mutation_success, state_.mutation_fail,
                                                 config_.prob_form)) {
                state_.mutation_probs = *mp;
                rec.probs_refreshed = true;
            }
            if (auto cp = crossover_success_probs(state_.crossover_success, state_.crossover_fail,
                                                  config_.prob_form)) {
                state_.crossover_probs = *cp;
                rec.probs_refreshed = true;
            }
        }
        state_.mutation_success = {};
        state_.mutation_fail = {};
        state_.crossover_success = {};
        state_.crossover_fail = {};
        period_position_ = 0;
    }

    rec.mutation_probs = state_.mutation_probs;
    rec.crossover_probs = state_.crossover_probs;
    double mr = 0.0, cr = 0.0;
    for (const auto& m : state_.members) {
        mr += m.mutation_rate;
        cr += m.crossover_rate;
    }
    rec.mean_mutation_rate = mr / static_cast<double>(n);
    rec.mean_crossover_rate = cr / static_cast<double>(n);
    history_.push_back(std::move(rec));
}

void DeTrainer::run(const std::vector<TrainingWindow>& train, int generations) {
    if (train.empty()) throw std::invalid_argument("trainer: no training samples");
    if (!initialized())
        initialize(train);
    else
        evaluate_all(train);  // data may have changed since the last run

    stopped_early_ = false;
    generations_run_ = 0;
    no_improve_ = 0;
    double best_before = state_.best_fitness.scalar;
    for (int g = 0; g < generations; ++g) {
        step(train);
        ++generations_run_;
        if (best_before - state_.best_fitness.scalar >= config_.improve_epsilon)
            no_improve_ = 0;
        else
            ++no_improve_;
        best_before = state_.best_fitness.scalar;
        if (no_improve_ >= config_.no_improve_patience) {
            stopped_early_ = true;
            break;
        }
    }
}

std::pair<std::vector<TrainingWindow>, std::vector<TrainingWindow>> split_windows(
    const std::vector<TrainingWindow>& samples, double train_fraction) {
    if (samples.size() < 2)
        throw std::invalid_argument("trainer: need at least 2 windows to split train/validation");
    auto cut = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(samples.size())));
    cut = std::clamp<std::size_t>(cut, 1, samples.size() - 1);
    return {std::vector<TrainingWindow>(samples.begin(), samples.begin() + static_cast<long>(cut)),
            std::vector<TrainingWindow>(samples.begin() + static_cast<long>(cut), samples.end())};
}

namespace {

TrainOutcome run_de(const std::vector<TrainingWindow>& samples, const Topology& topology,
                    const TrainerConfig& config) {
    auto [train, validation] = split_windows(samples, config.train_fraction);
    DeTrainer trainer(topology, config);
    trainer.initialize(train);
    trainer.run(train, config.max_generations);

    TrainOutcome out;
    out.best = trainer.best_genome();
    out.train_fitness = trainer.best_fitness();
    out.validation_fitness = evaluate_fitness(out.best, topology, validation);
    out.history = trainer.history();
    out.generations_run = trainer.generations_run();
    out.stopped_early = trainer.stopped_early();
    return out;
}

}  // namespace

TrainOutcome train_adaptive_de(const std::vector<TrainingWindow>& samples, const Topology& topology,
                               const TrainerConfig& config) {
    return run_de(samples, topology, config);
}

TrainOutcome train_basic_de(const std::vector<TrainingWindow>& samples, const Topology& topology,
                            const TrainerConfig& config) {
    return run_de(samples, topology, basic_de_config(config));
}

// --- gradient baseline -------------------------------------------------------

std::vector<double> fitness_gradient(const Genome& genome, const Topology& t,
                                     const std::vector<TrainingWindow>& samples) {
    if (samples.empty()) throw std::invalid_argument("gradient: no samples");
    if (t.outputs != 1) throw std::invalid_argument("gradient: single-step forecasts only");
    const auto n = static_cast<std::size_t>(t.lags);
    const auto p = static_cast<std::size_t>(t.hidden);
    const auto x = static_cast<std::size_t>(t.channels);
    const auto per_channel = static_cast<std::size_t>(channel_weight_count(t));
    if (genome.size() != per_channel * x)
        throw std::invalid_argument("gradient: genome length does not match topology");

    std::vector<double> grad(genome.size(), 0.0);
    std::vector<double> hidden(p);
    const double m = static_cast<double>(samples.size());

    for (const auto& win : samples) {
        if (win.inputs.size() != n * x || win.target.size() != x)
            throw std::invalid_argument("gradient: window does not match topology");
        for (std::size_t k = 0; k < x; ++k) {
            const double* w = genome.data() + k * per_channel;
            const double* v = w + (n + 1) * p;
            double* gw = grad.data() + k * per_channel;
            double* gv = gw + (n + 1) * p;

            for (std::size_t j = 0; j < p; ++j) {
                double acc = w[n * p + j];
                for (std::size_t i = 0; i < n; ++i) acc += w[i * p + j] * win.inputs[i * x + k];
                hidden[j] = 1.0 / (1.0 + std::exp(-acc));
            }
            double s = 0.0;
            for (std::size_t j = 0; j < p; ++j) s += v[j] * hidden[j];
            const double out = 1.0 / (1.0 + std::exp(-s));

            // d(scalar)/d(out) for this window; the channel mean folds in 1/x
            const double dout = 2.0 * (out - win.target[k]) / (m * static_cast<double>(x));
            const double ds = dout * out * (1.0 - out);
            for (std::size_t j = 0; j < p; ++j) {
                gv[j] += ds * hidden[j];
                const double dh = ds * v[j] * hidden[j] * (1.0 - hidden[j]);
                for (std::size_t i = 0; i < n; ++i) gw[i * p + j] += dh * win.inputs[i * x + k];
                gw[n * p + j] += dh;
            }
        }
    }
    return grad;
}

TrainOutcome train_backprop(const std::vector<TrainingWindow>& samples, const Topology& topology,
                            const BackpropConfig& config) {
    if (config.learning_rate < 0.0)
        throw std::invalid_argument("backprop: learning rate must be non-negative");
    auto [train, validation] = split_windows(samples, config.train_fraction);

    Rng rng(config.seed);
    Genome genome = random_genome(topology, rng);

    TrainOutcome out;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const auto grad = fitness_gradient(genome, topology, train);
        for (std::size_t i = 0; i < genome.size(); ++i)
            genome[i] -= config.learning_rate * grad[i];
        const auto fit = evaluate_fitness(genome, topology, train);
        if (!std::isfinite(fit.scalar)) throw std::runtime_error("backprop: loss diverged");
        GenerationRecord rec;
        rec.generation = epoch + 1;
        rec.best_per_channel = fit.per_channel;
        rec.best_scalar = fit.scalar;
        out.history.push_back(std::move(rec));
        ++out.generations_run;
    }
    out.best = std::move(genome);
    out.train_fitness = evaluate_fitness(out.best, topology, train);
    out.validation_fitness = evaluate_fitness(out.best, topology, validation);
    return out;
}

std::vector<TrainingWindow> select_channel(const std::vector<TrainingWindow>& samples, int channels,
                                           int channel) {
    if (channel < 0 || channel >= channels) throw std::invalid_argument("select_channel: bad channel");
    const auto x = static_cast<std::size_t>(channels);
    const auto k = static_cast<std::size_t>(channel);
    std::vector<TrainingWindow> out;
    out.reserve(samples.size());
    for (const auto& w : samples) {
        TrainingWindow s;
        const std::size_t lags = w.inputs.size() / x;
        s.inputs.reserve(lags);
        for (std::size_t i = 0; i < lags; ++i) s.inputs.push_back(w.inputs[i * x + k]);
        s.target = {w.target.at(k)};
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace resman
