#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sobgnn/graph_build.hpp"
#include "sobgnn/network.hpp"

namespace sobgnn {

enum class ModelKind { ssobgnn, gcn };

std::string to_string(ModelKind m);
ModelKind model_kind_from_string(const std::string& s);

struct TrainConfig {
    double learning_rate = 0.01;
    double weight_decay = 5e-4;
    std::size_t max_epochs = 1000;
    std::size_t patience = 50;
    double eps = 1.0;
    std::size_t alpha = 1;
    std::size_t n_layers = 2;
    std::size_t hidden_units = 16;
    std::uint64_t seed = 0;
    double dropout = 0.0;
    CombineMode combine = CombineMode::scalar;
    bool use_bias = false;
    ModelKind model = ModelKind::ssobgnn;
};

void validate(const TrainConfig& config);

struct EpochRecord {
    std::size_t epoch;
    double train_loss;
    double val_accuracy;
};

struct TrainResult {
    ModelParams params;  // parameters at the best-validation-accuracy epoch
    std::vector<EpochRecord> history;
    double best_val_accuracy = 0.0;
    std::size_t best_epoch = 0;
    double eps = 1.0;
    std::size_t alpha = 1;
};

/// Full-graph training with Adam, early stopping on validation accuracy,
/// restore-best. Deterministic given config.seed. Never reads the test
/// mask (enforced by the mask access guard).
TrainResult train(const DenseMatrix& features, const std::vector<int>& labels,
                  const SplitMasks& masks, const CsrMatrix& adjacency, const TrainConfig& config);

// -- optimizer ----------------------------------------------------------------

struct AdamState {
    ModelParams m;  // first moment, same shapes as the parameters
    ModelParams v;  // second moment
    std::uint64_t step = 0;
};

AdamState init_adam_state(const ModelParams& params);

/// One Adam step with bias correction, beta = (0.9, 0.999), eps = 1e-8,
/// decoupled weight decay.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr,
               double weight_decay);

// -- hyperparameter search ------------------------------------------------------

struct SearchSpace {
    double lr_min = 1e-4, lr_max = 1e-1;  // log-uniform
    double wd_min = 1e-6, wd_max = 1e-2;  // log-uniform
    std::vector<std::size_t> hidden_choices{16, 32, 64, 128};
    std::vector<std::size_t> alpha_choices{1, 2, 3, 4, 5, 6};
    std::vector<double> eps_choices{0.5, 1.0, 2.0, 4.0};
    std::vector<std::size_t> layer_choices{2, 3, 4};
    std::vector<double> dropout_choices{0.0};
};

struct TrialRecord {
    TrainConfig config;
    double val_mean = 0.0;
    std::vector<double> val_per_seed;
    double wallclock_sec = 0.0;
    bool failed = false;
    std::string failure;
};

struct SearchResult {
    TrainConfig best;
    double best_val_mean = 0.0;
    std::vector<TrialRecord> trials;
};

struct SearchOptions {
    std::size_t n_trials = 100;
    std::vector<std::uint64_t> val_seeds;  // dev-split seeds; size 5 in the protocol
    SplitFractions fractions;
    std::uint64_t test_seed = 0;
    std::uint64_t base_seed = 0;
    std::size_t max_epochs = 300;
    std::size_t patience = 30;
    ModelKind model = ModelKind::ssobgnn;
    std::size_t jobs = 1;
};

/// Uniform sampling over the space; each trial is scored by the mean
/// validation accuracy over the dev-split seeds. The test mask is never
/// touched. Throws NumericalError when every trial diverges.
SearchResult random_search(const DenseMatrix& features, const std::vector<int>& labels,
                           const CsrMatrix& adjacency, const SearchSpace& space,
                           const SearchOptions& options);

// -- evaluation statistics -------------------------------------------------------

struct Metrics {
    std::vector<double> per_seed_accuracies;
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct EvalOptions {
    std::size_t n_seeds = 50;
    SplitFractions fractions;
    std::uint64_t test_seed = 0;
    std::size_t bootstrap_resamples = 1000;
    double level = 0.95;
    std::uint64_t bootstrap_seed = 0;
    std::size_t jobs = 1;
};

/// Trains n_seeds models (fresh dev split and init per seed, fixed test
/// mask) and reports the test-accuracy mean with a percentile-bootstrap
/// confidence interval.
Metrics evaluate(const DenseMatrix& features, const std::vector<int>& labels,
                 const CsrMatrix& adjacency, const TrainConfig& config, const EvalOptions& options);

/// Percentile bootstrap interval for the mean; deterministic given seed.
std::pair<double, double> bootstrap_ci(const std::vector<double>& samples,
                                       std::size_t n_resamples, double level,
                                       std::uint64_t seed);

}  // namespace sobgnn
