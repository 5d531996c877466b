#include "sobgnn/training.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "sobgnn/errors.hpp"
#include "sobgnn/sobolev_ops.hpp"

namespace sobgnn {

std::string to_string(ModelKind m) { return m == ModelKind::ssobgnn ? "ssobgnn" : "gcn"; }

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "ssobgnn") return ModelKind::ssobgnn;
    if (s == "gcn") return ModelKind::gcn;
    throw ParameterError("unknown model '" + s + "' (expected ssobgnn|gcn)");
}

void validate(const TrainConfig& config) {
    if (config.learning_rate < 0.0) throw ParameterError("config: learning_rate must be >= 0");
    if (config.weight_decay < 0.0) throw ParameterError("config: weight_decay must be >= 0");
    if (config.max_epochs < 1) throw ParameterError("config: max_epochs must be >= 1");
    if (config.eps < 0.0) throw ParameterError("config: eps must be >= 0");
    if (config.alpha < 1) throw ParameterError("config: alpha must be >= 1");
    if (config.n_layers < 1) throw ParameterError("config: n_layers must be >= 1");
    if (config.hidden_units < 1) throw ParameterError("config: hidden_units must be >= 1");
    if (config.dropout < 0.0 || config.dropout >= 1.0)
        throw ParameterError("config: dropout must be in [0, 1)");
}

namespace {

// Runs fn(0..n-1) on up to `jobs` threads; results land in caller-indexed
// slots so the aggregation order never depends on scheduling.
template <typename Fn>
void parallel_for_indexed(std::size_t n, std::size_t jobs, Fn&& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

TrainConfig effective_config(TrainConfig config) {
    if (config.model == ModelKind::gcn) {
        // Eq.-(6) baseline: one filter, renormalization shift, fixed unit combination.
        config.alpha = 1;
        config.eps = 1.0;
        config.combine = CombineMode::scalar;
    }
    return config;
}

std::string layer_norms_diagnostic(const ModelParams& params) {
    std::ostringstream os;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        double norm_sq = 0.0;
        for (const DenseMatrix& w : params.layers[l].filter_weights)
            for (double v : w.values) norm_sq += v * v;
        os << (l ? ", " : "") << "layer " << l << " |W|=" << std::sqrt(norm_sq);
    }
    return os.str();
}

}  // namespace

TrainResult train(const DenseMatrix& features, const std::vector<int>& labels,
                  const SplitMasks& masks, const CsrMatrix& adjacency,
                  const TrainConfig& raw_config) {
    const TrainConfig config = effective_config(raw_config);
    validate(config);
    validate_dataset(features, labels);
    if (masks.size() != features.n_rows || adjacency.n_rows != features.n_rows)
        throw DataError("train: graph/dataset/mask sizes disagree");

    TestMaskGuard no_leakage;  // any test-mask read below throws

    const SobolevCascade cascade = build_cascade(adjacency, config.eps, config.alpha);

    ModelArch arch;
    arch.in_features = features.n_cols;
    arch.hidden_units = config.hidden_units;
    int max_label = 0;
    for (int l : labels) max_label = std::max(max_label, l);
    arch.n_classes = static_cast<std::size_t>(max_label) + 1;
    arch.n_layers = config.n_layers;
    arch.alpha = config.alpha;
    arch.combine = config.combine;
    arch.use_bias = config.use_bias;

    Rng rng(config.seed);
    ModelParams params = init_params(arch, rng);
    AdamState state = init_adam_state(params);
    Rng dropout_rng(derive_seed(config.seed, 0x5eed));

    TrainResult result;
    result.eps = config.eps;
    result.alpha = config.alpha;
    result.params = params;
    double best_val = -1.0;
    std::size_t best_epoch = 0;
    std::size_t since_best = 0;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        DropoutContext dropout{config.dropout, &dropout_rng};
        const DropoutContext* dctx = config.dropout > 0.0 ? &dropout : nullptr;
        const ForwardTrace trace = model_forward(features, cascade, params, dctx);
        const double train_loss = cross_entropy_loss(trace.probs, labels, masks.train());
        if (!std::isfinite(train_loss))
            throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                 " (" + layer_norms_diagnostic(params) + ")");
        ModelParams grads = model_backward(trace, labels, masks.train(), params, cascade);
        if (config.model == ModelKind::gcn) {
            // the baseline's combination stays frozen at [1]
            for (LayerParams& l : grads.layers) std::fill(l.combination.begin(), l.combination.end(), 0.0);
        }
        adam_step(params, grads, state, config.learning_rate, config.weight_decay);

        const ForwardTrace eval_trace = model_forward(features, cascade, params);
        const double val_acc = accuracy(eval_trace.probs, labels, masks.val());
        result.history.push_back({epoch, train_loss, val_acc});

        if (val_acc > best_val) {
            best_val = val_acc;
            best_epoch = epoch;
            result.params = params;
            since_best = 0;
        } else {
            ++since_best;
            if (config.patience > 0 && since_best >= config.patience) break;
        }
    }

    result.best_val_accuracy = best_val;
    result.best_epoch = best_epoch;
    return result;
}

AdamState init_adam_state(const ModelParams& params) {
    AdamState state;
    state.m = zeros_like(params);
    state.v = zeros_like(params);
    state.step = 0;
    return state;
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr,
               double weight_decay) {
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps_opt = 1e-8;
    ++state.step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));

    auto p_views = tensor_views(params);
    auto g_views = tensor_views(grads);
    auto m_views = tensor_views(state.m);
    auto v_views = tensor_views(state.v);
    if (p_views.size() != g_views.size())
        throw DimensionError("adam_step: gradient structure mismatch");
    for (std::size_t t = 0; t < p_views.size(); ++t) {
        std::vector<double>& p = *p_views[t];
        const std::vector<double>& g = *g_views[t];
        std::vector<double>& m = *m_views[t];
        std::vector<double>& v = *v_views[t];
        if (p.size() != g.size()) throw DimensionError("adam_step: tensor shape mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            p[i] -= lr * (m_hat / (std::sqrt(v_hat) + eps_opt) + weight_decay * p[i]);
        }
    }
}

// -- random search -----------------------------------------------------------

namespace {

TrainConfig sample_config(const SearchSpace& space, const SearchOptions& options,
                          std::size_t trial) {
    Rng rng(derive_seed(options.base_seed, trial, 0xc0));
    auto choose = [&rng](const auto& choices) {
        if (choices.empty()) throw ParameterError("random_search: empty choice list in space");
        return choices[rng.uniform_int(choices.size())];
    };
    TrainConfig c;
    c.learning_rate = std::exp(rng.uniform(std::log(space.lr_min), std::log(space.lr_max)));
    c.weight_decay = std::exp(rng.uniform(std::log(space.wd_min), std::log(space.wd_max)));
    c.hidden_units = choose(space.hidden_choices);
    c.alpha = choose(space.alpha_choices);
    c.eps = choose(space.eps_choices);
    c.n_layers = choose(space.layer_choices);
    c.dropout = choose(space.dropout_choices);
    c.max_epochs = options.max_epochs;
    c.patience = options.patience;
    c.model = options.model;
    return c;
}

}  // namespace

SearchResult random_search(const DenseMatrix& features, const std::vector<int>& labels,
                           const CsrMatrix& adjacency, const SearchSpace& space,
                           const SearchOptions& options) {
    if (options.n_trials < 1) throw ParameterError("random_search: n_trials must be >= 1");
    if (options.val_seeds.empty()) throw ParameterError("random_search: need validation seeds");
    if (space.lr_min <= 0.0 || space.lr_max < space.lr_min || space.wd_min <= 0.0 ||
        space.wd_max < space.wd_min)
        throw ParameterError("random_search: invalid lr/wd ranges");

    TestMaskGuard no_leakage;

    SearchResult result;
    result.trials.resize(options.n_trials);

    parallel_for_indexed(options.n_trials, options.jobs, [&](std::size_t trial) {
        TrialRecord record;
        record.config = sample_config(space, options, trial);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            for (std::size_t vs = 0; vs < options.val_seeds.size(); ++vs) {
                const SplitMasks masks = split_dataset(labels, options.fractions,
                                                       options.test_seed, options.val_seeds[vs]);
                TrainConfig trial_config = record.config;
                trial_config.seed = derive_seed(options.base_seed, trial, vs + 1);
                const TrainResult r = train(features, labels, masks, adjacency, trial_config);
                record.val_per_seed.push_back(r.best_val_accuracy);
            }
            record.val_mean =
                std::accumulate(record.val_per_seed.begin(), record.val_per_seed.end(), 0.0) /
                static_cast<double>(record.val_per_seed.size());
        } catch (const NumericalError& e) {
            record.failed = true;
            record.failure = e.what();
        }
        record.wallclock_sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.trials[trial] = std::move(record);
    });

    std::size_t best_trial = options.n_trials;
    for (std::size_t t = 0; t < options.n_trials; ++t) {
        const TrialRecord& r = result.trials[t];
        if (r.failed) continue;
        if (best_trial == options.n_trials || r.val_mean > result.trials[best_trial].val_mean)
            best_trial = t;
    }
    if (best_trial == options.n_trials) {
        std::string diag = "random_search: every trial diverged:";
        for (std::size_t t = 0; t < options.n_trials; ++t)
            diag += "\n  trial " + std::to_string(t) + ": " + result.trials[t].failure;
        throw NumericalError(diag);
    }
    result.best = result.trials[best_trial].config;
    result.best_val_mean = result.trials[best_trial].val_mean;
    return result;
}

// -- evaluation ----------------------------------------------------------------

Metrics evaluate(const DenseMatrix& features, const std::vector<int>& labels,
                 const CsrMatrix& adjacency, const TrainConfig& config,
                 const EvalOptions& options) {
    if (options.n_seeds < 1) throw ParameterError("evaluate: n_seeds must be >= 1");
    Metrics metrics;
    metrics.per_seed_accuracies.resize(options.n_seeds);

    parallel_for_indexed(options.n_seeds, options.jobs, [&](std::size_t s) {
        const std::uint64_t dev_seed = derive_seed(config.seed, s, 17);
        const SplitMasks masks =
            split_dataset(labels, options.fractions, options.test_seed, dev_seed);
        TrainConfig seed_config = config;
        seed_config.seed = derive_seed(config.seed, s, 23);
        const TrainResult r = train(features, labels, masks, adjacency, seed_config);
        // test mask is read only here, after training finished
        const SobolevCascade cascade = build_cascade(adjacency, r.eps, r.alpha);
        const ForwardTrace trace = model_forward(features, cascade, r.params);
        metrics.per_seed_accuracies[s] = accuracy(trace.probs, labels, masks.test());
    });

    metrics.mean = std::accumulate(metrics.per_seed_accuracies.begin(),
                                   metrics.per_seed_accuracies.end(), 0.0) /
                   static_cast<double>(options.n_seeds);
    const auto [lo, hi] = bootstrap_ci(metrics.per_seed_accuracies, options.bootstrap_resamples,
                                       options.level, options.bootstrap_seed);
    metrics.ci_low = lo;
    metrics.ci_high = hi;
    return metrics;
}

std::pair<double, double> bootstrap_ci(const std::vector<double>& samples,
                                       std::size_t n_resamples, double level,
                                       std::uint64_t seed) {
    if (samples.empty()) throw ParameterError("bootstrap_ci: empty sample vector");
    if (level <= 0.0 || level >= 1.0) throw ParameterError("bootstrap_ci: level must be in (0,1)");
    if (n_resamples < 1) throw ParameterError("bootstrap_ci: need at least one resample");

    Rng rng(seed);
    const std::size_t n = samples.size();
    std::vector<double> means(n_resamples);
    for (std::size_t b = 0; b < n_resamples; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += samples[rng.uniform_int(n)];
        means[b] = s / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());

    auto percentile = [&means](double q) {
        const double pos = q * static_cast<double>(means.size() - 1);
        const std::size_t idx = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(idx);
        if (idx + 1 >= means.size()) return means.back();
        return means[idx] + (means[idx + 1] - means[idx]) * frac;
    };
    const double tail = (1.0 - level) / 2.0;
    return {percentile(tail), percentile(1.0 - tail)};
}

}  // namespace sobgnn
