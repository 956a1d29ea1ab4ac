#include "hv/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hv/errors.hpp"
#include "hv/rng.hpp"

namespace hv {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

void RunConfig::validate() const {
    model.validate();
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must be in [0, 1)");
    if (!(base_lr > 0.0)) throw ConfigError("base learning rate must be positive");
    if (aggregator == Aggregator::Hypervolume && xi_schedule.empty())
        throw ConfigError("hypervolume aggregation needs a nonempty xi schedule");
}

std::pair<std::vector<double>, std::vector<double>> sgd_momentum_step(
    std::vector<double> params, const std::vector<double>& grad, std::vector<double> velocity,
    double lr, double momentum) {
    if (grad.size() != params.size() || velocity.size() != params.size())
        throw ShapeError("sgd_momentum_step: parameter/gradient/velocity sizes differ");
    for (std::size_t k = 0; k < params.size(); ++k) {
        velocity[k] = momentum * velocity[k] + grad[k];
        params[k] -= lr * velocity[k];
    }
    return {std::move(params), std::move(velocity)};
}

std::uint64_t param_init_seed(std::uint64_t run_seed) { return Rng::derive(run_seed, 0x1717); }

std::uint64_t batch_noise_seed(std::uint64_t run_seed, int epoch, std::size_t batch_index) {
    return Rng::derive(run_seed, 0xd0 + static_cast<std::uint64_t>(epoch), batch_index);
}

RunLog train(const RunConfig& config, const SplitDataset& dataset) {
    config.validate();

    // In mean mode the schedule still drives the learning rate; its xi
    // ladder is pinned at infinity so the weights are exactly uniform and
    // the step sequence matches an explicit xi = inf hypervolume run.
    std::vector<double> schedule_xis =
        config.aggregator == Aggregator::Mean ? std::vector<double>{kInf} : config.xi_schedule;
    ScheduleState schedule =
        ScheduleState::make(std::move(schedule_xis), config.base_lr, config.lr_floor,
                            config.lr_decay, config.patience, config.max_epochs);

    ParameterVector params = init_params(config.model, param_init_seed(config.seed));
    std::vector<double> velocity(params.size(), 0.0);
    Rng shuffle_rng(Rng::derive(config.seed, 0x5f0f));

    RunLog log;
    log.best_val_error = kInf;
    log.test_error_at_best = kNaN;
    log.best_params = params;

    const std::size_t n_train = dataset.train.size();
    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), 0);

    const bool uses_dropout = config.model.dropout_prob > 0.0;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);

        double loss_sum = 0.0;
        double loss_max = 0.0;
        double mu_sum = 0.0;
        std::size_t mu_batches = 0;

        const double xi = schedule.current_xi();
        for (std::size_t start = 0, batch_index = 0; start < n_train;
             start += config.batch_size, ++batch_index) {
            const std::size_t len = std::min<std::size_t>(config.batch_size, n_train - start);
            const Batch batch =
                dataset.train.gather({order.data() + start, len});

            std::optional<std::uint64_t> noise;
            if (uses_dropout) noise = batch_noise_seed(config.seed, epoch, batch_index);

            const LossVector losses = per_sample_losses(config.model, params, batch, noise);
            const ReferencePoint ref = config.aggregator == Aggregator::Mean
                                           ? ReferencePoint::mean_loss()
                                           : reference_point(losses, xi);
            const AggregationWeights weights = hypervolume_weights(losses, ref);
            const std::vector<double> grad =
                weighted_gradient(config.model, params, batch, weights, noise);

            std::tie(params.values, velocity) =
                sgd_momentum_step(std::move(params.values), grad, std::move(velocity),
                                  schedule.learning_rate, config.momentum);

            for (double l : losses.values()) loss_sum += l;
            loss_max = std::max(loss_max, losses.max());
            if (!ref.is_mean_mode()) {
                mu_sum += ref.mu();
                ++mu_batches;
            }
        }

        const double val_error = classification_error(config.model, params, dataset.validation);
        const double test_error = classification_error(config.model, params, dataset.test);

        EpochRecord rec;
        rec.epoch = epoch;
        rec.xi = xi;
        rec.learning_rate = schedule.learning_rate;
        rec.mu_batch_mean = mu_batches > 0 ? mu_sum / static_cast<double>(mu_batches) : kNaN;
        rec.train_mean_loss = loss_sum / static_cast<double>(n_train);
        rec.train_max_loss = loss_max;
        rec.val_error = val_error;
        rec.test_error = test_error;
        log.epochs.push_back(rec);

        if (val_error < log.best_val_error) {
            log.best_val_error = val_error;
            log.best_val_epoch = epoch;
            log.test_error_at_best = test_error;
            log.best_params = params;
        }

        ScheduleAction action;
        std::tie(schedule, action) = advance_on_stall(std::move(schedule), val_error);
        schedule.epoch = epoch + 1;
    }

    log.final_params = std::move(params);
    return log;
}

}  // namespace hv
