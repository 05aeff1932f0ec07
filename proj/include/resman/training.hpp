#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "resman/predictor.hpp"
#include "resman/rng.hpp"
#include "resman/traces.hpp"

namespace resman {

// The three mutation schemes selectable per member per generation.
enum class MutationStrategy { BestOne = 0, CurrentToBestOne = 1, RandOne = 2 };
enum class CrossoverStrategy { Uniform = 0, Heuristic = 1 };

// Counter-probability update variants. Symmetric is the default: it makes the
// refreshed probabilities an exact distribution (equal success counts give
// equal probabilities). AsPublished keeps the legacy normalizers, whose
// duplicated/linear terms break that symmetry; retained for comparison runs.
enum class ProbabilityForm { Symmetric, AsPublished };

struct TrainerConfig {
    int population = 10;
    int max_generations = 200;
    std::array<double, 3> mutation_probs{0.33, 0.33, 0.34};
    std::array<double, 2> crossover_probs{0.5, 0.5};
    double mutation_rate_lo = 0.1;
    double mutation_rate_hi = 0.8;
    double crossover_rate_lo = 0.1;
    double crossover_rate_hi = 0.5;
    int stall_threshold = -1;  // < 0: floor(2N/5)
    int learning_period = 10;
    int no_improve_patience = 30;
    double improve_epsilon = 1e-9;
    double train_fraction = 0.8;
    ProbabilityForm prob_form = ProbabilityForm::Symmetric;
    bool adapt_rates = true;            // per-member rate regeneration on stall
    bool adapt_probs = true;            // periodic strategy-probability refresh
    bool heuristic_crossover = true;    // false: uniform crossover only
    std::uint64_t seed = 1;
};

// Fixed-parameter baseline: strategy draws still happen against the initial
// probabilities, but rates and probabilities are never adapted and only
// uniform crossover runs.
TrainerConfig basic_de_config(TrainerConfig base);

struct MemberState {
    Genome genome;
    FitnessScore fitness;
    double mutation_rate = 0.0;
    double crossover_rate = 0.0;
    double mutation_draw = 0.0;   // last strategy-selection draws, for inspection
    double crossover_draw = 0.0;
};

struct TrainState {
    std::vector<MemberState> members;
    std::array<double, 3> mutation_probs{};
    std::array<double, 2> crossover_probs{};
    std::size_t best_index = 0;
    Genome best;
    FitnessScore best_fitness;
    // success/failure counters accumulated over the current learning period
    std::array<long, 3> mutation_success{}, mutation_fail{};
    std::array<long, 2> crossover_success{}, crossover_fail{};
    int generation = 0;
};

// --- generation-step building blocks ---------------------------------------

// Band selection: BestOne on (0, g1], CurrentToBestOne on (g1, g1+g2],
// RandOne otherwise.
MutationStrategy pick_mutation_strategy(double draw, const std::array<double, 3>& probs);

// Uniform on (0, w1], Heuristic otherwise.
CrossoverStrategy pick_crossover_strategy(double draw, const std::array<double, 2>& probs);

// Builds the mutant for member i. Draws three distinct partner indices
// (excluding i) from rng regardless of strategy, in order r1, r2, r3.
// Requires a population of at least 4.
Genome mutate(const std::vector<MemberState>& population, std::size_t i, MutationStrategy strategy,
              double rate, std::size_t best_index, Rng& rng);

// Gene-level crossover; consumes exactly one uniform draw per gene, in order.
// Returns the two complementary children: first takes the mutant gene when the
// draw is <= rate, second is the mirror.
std::pair<Genome, Genome> crossover_uniform(const Genome& target, const Genome& mutant, double rate,
                                            Rng& rng);

// child = rate * (better - other) + better; extrapolates past the fitter
// parent, so genes are deliberately not clamped to the init range.
Genome crossover_heuristic(const Genome& better, const Genome& other, double rate);

// Survival rule: the offspring enters the next generation iff its error is
// less than or equal to the current member's (ties favour the offspring).
bool offspring_survives(double current_error, double offspring_error);

struct OffspringCandidate {
    Genome genome;
    FitnessScore fitness;
    MutationStrategy mutation = MutationStrategy::RandOne;
    CrossoverStrategy crossover = CrossoverStrategy::Uniform;
};

struct SelectionOutcome {
    int updated = 0;
    std::array<int, 3> mutation_success{}, mutation_fail{};
    std::array<int, 2> crossover_success{}, crossover_fail{};
    std::vector<bool> replaced;
};

// Applies the survival rule member by member, replacing genomes/fitness in
// place and reporting per-strategy success/failure counts for the generation.
SelectionOutcome apply_selection(std::vector<MemberState>& members,
                                 std::vector<OffspringCandidate> offspring);

// lo + theta * (hi - lo)
double regenerate_rate(double lo, double hi, double theta);

// Success probabilities per mutation strategy from period counters.
// Returns nullopt when no strategy succeeded (caller keeps previous values).
std::optional<std::array<double, 3>> mutation_success_probs(const std::array<long, 3>& success,
                                                            const std::array<long, 3>& fail,
                                                            ProbabilityForm form);
std::optional<std::array<double, 2>> crossover_success_probs(const std::array<long, 2>& success,
                                                             const std::array<long, 2>& fail,
                                                             ProbabilityForm form);

// --- trainer ----------------------------------------------------------------

struct GenerationRecord {
    int generation = 0;
    std::vector<double> best_per_channel;
    double best_scalar = 0.0;
    std::array<double, 3> mutation_probs{};
    std::array<double, 2> crossover_probs{};
    double mean_mutation_rate = 0.0;
    double mean_crossover_rate = 0.0;
    int updated_members = 0;
    std::array<int, 3> mut_success{}, mut_fail{};
    std::array<int, 2> cross_success{}, cross_fail{};
    bool rates_regenerated = false;
    bool probs_refreshed = false;
};

// Evolutionary trainer with persistent state so online retraining can keep
// evolving the same population as new samples arrive.
class DeTrainer {
public:
    DeTrainer(Topology topology, TrainerConfig config);

    bool initialized() const { return !state_.members.empty(); }
    // Fresh random population, evaluated on `train`.
    void initialize(const std::vector<TrainingWindow>& train);
    // Runs up to `generations` further generations (early-stops on a fitness
    // plateau). Re-evaluates the population first so changed data is scored
    // consistently.
    void run(const std::vector<TrainingWindow>& train, int generations);

    const Topology& topology() const { return topology_; }
    const TrainerConfig& config() const { return config_; }
    const TrainState& state() const { return state_; }
    const std::vector<GenerationRecord>& history() const { return history_; }
    const Genome& best_genome() const { return state_.best; }
    const FitnessScore& best_fitness() const { return state_.best_fitness; }
    int stall_threshold() const;
    bool stopped_early() const { return stopped_early_; }
    int generations_run() const { return generations_run_; }

private:
    void evaluate_all(const std::vector<TrainingWindow>& train);
    void refresh_best();
    void step(const std::vector<TrainingWindow>& train);

    Topology topology_;
    TrainerConfig config_;
    Rng rng_;
    TrainState state_;
    std::vector<GenerationRecord> history_;
    int period_position_ = 0;
    int no_improve_ = 0;
    bool stopped_early_ = false;
    int generations_run_ = 0;
};

struct TrainOutcome {
    Genome best;
    FitnessScore train_fitness;
    FitnessScore validation_fitness;
    std::vector<GenerationRecord> history;
    int generations_run = 0;
    bool stopped_early = false;
};

// Temporal 80/20 split of the windows (first part trains, tail validates).
std::pair<std::vector<TrainingWindow>, std::vector<TrainingWindow>> split_windows(
    const std::vector<TrainingWindow>& samples, double train_fraction);

// One-shot convenience wrappers around DeTrainer with the internal split.
TrainOutcome train_adaptive_de(const std::vector<TrainingWindow>& samples, const Topology& topology,
                               const TrainerConfig& config);
TrainOutcome train_basic_de(const std::vector<TrainingWindow>& samples, const Topology& topology,
                            const TrainerConfig& config);

// --- gradient baseline -------------------------------------------------------

struct BackpropConfig {
    double learning_rate = 0.05;
    int epochs = 200;
    double train_fraction = 0.8;
    std::uint64_t seed = 1;
};

// Analytic gradient of the scalar fitness (mean over channels of the
// per-channel mean squared error) with respect to every weight.
std::vector<double> fitness_gradient(const Genome& genome, const Topology& topology,
                                     const std::vector<TrainingWindow>& samples);

// Full-batch gradient descent over the same genome encoding.
TrainOutcome train_backprop(const std::vector<TrainingWindow>& samples, const Topology& topology,
                            const BackpropConfig& config);

// Extracts the single-channel view of multi-resource windows (used to train
// one single-resource network per resource for comparison runs).
std::vector<TrainingWindow> select_channel(const std::vector<TrainingWindow>& samples, int channels,
                                           int channel);

}  // namespace resman
