#ifndef HV_TRAINER_HPP
#define HV_TRAINER_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "hv/data.hpp"
#include "hv/models.hpp"
#include "hv/policy.hpp"

namespace hv {

enum class Aggregator { Mean, Hypervolume };

// Everything one training run needs. Defaults mirror the reference
// protocol: lr 0.1, momentum 0.9, patience 20, decay to 0.001, 200 epochs,
// minibatches of 500.
struct RunConfig {
    ModelSpec model;
    Aggregator aggregator = Aggregator::Hypervolume;
    std::vector<double> xi_schedule = {0.0};  // ignored in Mean mode
    int batch_size = 500;
    double base_lr = 0.1;
    double momentum = 0.9;
    int patience = 20;
    double lr_decay = 0.1;
    double lr_floor = 0.001;
    int max_epochs = 200;
    std::uint64_t seed = 1;

    void validate() const;
};

struct EpochRecord {
    int epoch = 0;
    double xi = 0.0;                // +inf in mean mode
    double learning_rate = 0.0;
    double mu_batch_mean = 0.0;     // NaN in mean mode
    double train_mean_loss = 0.0;
    double train_max_loss = 0.0;
    double val_error = 0.0;
    double test_error = 0.0;
};

// Per-epoch metrics plus the best-validation snapshot. Deterministic:
// identical (config, dataset) give bitwise-identical logs.
struct RunLog {
    std::vector<EpochRecord> epochs;
    int best_val_epoch = -1;
    double best_val_error = 0.0;
    double test_error_at_best = 0.0;
    ParameterVector best_params;
    ParameterVector final_params;
};

// Classical momentum: v' = momentum * v + grad; theta' = theta - lr * v'.
std::pair<std::vector<double>, std::vector<double>> sgd_momentum_step(
    std::vector<double> params, const std::vector<double>& grad, std::vector<double> velocity,
    double lr, double momentum);

// Seeds for the per-run parameter init and the per-batch dropout stream.
// Exposed so tests can replay a step exactly.
std::uint64_t param_init_seed(std::uint64_t run_seed);
std::uint64_t batch_noise_seed(std::uint64_t run_seed, int epoch, std::size_t batch_index);

// Minibatch SGD with momentum, hypervolume (or mean) aggregation and the
// stall-driven xi/learning-rate schedule. The reference point is a
// constant within each step: weights are computed from the batch losses
// and no derivative flows through mu.
RunLog train(const RunConfig& config, const SplitDataset& dataset);

}  // namespace hv

#endif  // HV_TRAINER_HPP
