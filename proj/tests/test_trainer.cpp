#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "hv/data.hpp"
#include "hv/errors.hpp"
#include "hv/trainer.hpp"
#include "hv/rng.hpp"
#include "test_util.hpp"

using namespace hv;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RunConfig small_config(const SplitDataset& data) {
    RunConfig cfg;
    cfg.model.kind = ModelKind::Logistic;
    cfg.model.input_dim = data.meta.feature_dim;
    cfg.model.num_classes = data.meta.num_classes;
    cfg.aggregator = Aggregator::Hypervolume;
    cfg.xi_schedule = {0.0};
    cfg.batch_size = 32;
    cfg.base_lr = 0.1;
    cfg.momentum = 0.9;
    cfg.patience = 5;
    cfg.max_epochs = 5;
    cfg.seed = 12;
    return cfg;
}

bool identical_logs(const RunLog& a, const RunLog& b) {
    if (a.epochs.size() != b.epochs.size()) return false;
    for (std::size_t i = 0; i < a.epochs.size(); ++i) {
        const EpochRecord &x = a.epochs[i], &y = b.epochs[i];
        const bool mu_same = (std::isnan(x.mu_batch_mean) && std::isnan(y.mu_batch_mean)) ||
                             x.mu_batch_mean == y.mu_batch_mean;
        if (!(x.epoch == y.epoch && x.xi == y.xi && x.learning_rate == y.learning_rate &&
              mu_same && x.train_mean_loss == y.train_mean_loss &&
              x.train_max_loss == y.train_max_loss && x.val_error == y.val_error &&
              x.test_error == y.test_error))
            return false;
    }
    return a.best_val_epoch == b.best_val_epoch &&
           a.final_params.values == b.final_params.values;
}

}  // namespace

TEST_CASE("sgd_momentum_step: hand-checked recursions") {
    SUBCASE("plain gradient descent") {
        auto [p, v] = sgd_momentum_step({0.0}, {2.0}, {0.0}, 1.0, 0.0);
        CHECK(p[0] == doctest::Approx(-2.0));
        CHECK(v[0] == doctest::Approx(2.0));
    }
    SUBCASE("two momentum steps accumulate velocity") {
        auto [p1, v1] = sgd_momentum_step({0.0}, {1.0}, {0.0}, 0.1, 0.9);
        auto [p2, v2] = sgd_momentum_step(p1, {1.0}, v1, 0.1, 0.9);
        CHECK(v2[0] == doctest::Approx(1.9).epsilon(1e-14));
        CHECK(p2[0] == doctest::Approx(-0.29).epsilon(1e-12));
    }
    SUBCASE("zero gradient and velocity is a fixed point") {
        auto [p, v] = sgd_momentum_step({1.5}, {0.0}, {0.0}, 0.1, 0.9);
        CHECK(p[0] == 1.5);
        CHECK(v[0] == 0.0);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(sgd_momentum_step({1.0, 2.0}, {1.0}, {0.0, 0.0}, 0.1, 0.9),
                        ShapeError);
    }
}

TEST_CASE("training is deterministic given (config, dataset)") {
    const SplitDataset data = gen_synthetic(SyntheticKind::GaussianBlobs, 60, 21);
    const RunConfig cfg = small_config(data);
    const RunLog a = train(cfg, data);
    const RunLog b = train(cfg, data);
    CHECK(identical_logs(a, b));
    CHECK(a.epochs.size() == 5);
}

TEST_CASE("mean aggregator and xi=inf hypervolume are exactly the same run") {
    const SplitDataset data = gen_synthetic(SyntheticKind::GaussianBlobs, 60, 22);
    RunConfig mean_cfg = small_config(data);
    mean_cfg.aggregator = Aggregator::Mean;
    RunConfig inf_cfg = small_config(data);
    inf_cfg.xi_schedule = {kInf};

    const RunLog a = train(mean_cfg, data);
    const RunLog b = train(inf_cfg, data);
    CHECK(identical_logs(a, b));
}

TEST_CASE("max_epochs = 0 returns the initial parameters untouched") {
    const SplitDataset data = gen_synthetic(SyntheticKind::GaussianBlobs, 60, 23);
    RunConfig cfg = small_config(data);
    cfg.max_epochs = 0;
    const RunLog log = train(cfg, data);
    CHECK(log.epochs.empty());
    CHECK(log.best_val_epoch == -1);
    CHECK(log.final_params.values == init_params(cfg.model, param_init_seed(cfg.seed)).values);
}

TEST_CASE("huge xi reproduces the mean-loss trajectory to 1e-3") {
    // 200-sample task, 5 epochs: the xi = 6 reference point keeps weights
    // within O(1e-6) of uniform, so parameters drift apart only slowly.
    const SplitDataset data = gen_synthetic(SyntheticKind::GaussianBlobs, 100, 24);
    RunConfig mean_cfg = small_config(data);
    mean_cfg.aggregator = Aggregator::Mean;
    RunConfig hv_cfg = small_config(data);
    hv_cfg.xi_schedule = {6.0};

    const RunLog a = train(mean_cfg, data);
    const RunLog b = train(hv_cfg, data);
    CHECK(hvtest::rel_error(b.final_params.values, a.final_params.values) <= 1e-3);
}

TEST_CASE("very negative xi steps along the max-loss sample's gradient") {
    // Two samples with distinct losses; at xi = -6 the weight of the
    // max-loss sample approaches one, so a single step from rest points
    // along that sample's gradient.
    const ModelSpec spec{ModelKind::Logistic, 2, 0, 2, 0.0};
    std::vector<double> features = {0.9, 0.1, 0.2, 0.8};
    std::vector<int> labels = {0, 1};
    const Batch batch(features, labels, 2);

    const SplitDataset data{batch, batch, batch, {"pair", 2, 2, true}};

    RunConfig cfg;
    cfg.model = spec;
    cfg.aggregator = Aggregator::Hypervolume;
    cfg.xi_schedule = {-6.0};
    cfg.batch_size = 2;
    cfg.base_lr = 0.1;
    cfg.momentum = 0.0;
    cfg.patience = 5;
    cfg.max_epochs = 1;
    cfg.seed = 3;

    const ParameterVector init = init_params(spec, param_init_seed(cfg.seed));
    const LossVector losses = per_sample_losses(spec, init, batch);
    REQUIRE(losses[0] != losses[1]);  // distinct by construction
    const std::size_t max_idx = losses[0] > losses[1] ? 0 : 1;

    const RunLog log = train(cfg, data);
    std::vector<double> step(init.size());
    for (std::size_t k = 0; k < step.size(); ++k)
        step[k] = init.values[k] - log.final_params.values[k];

    const GradientMatrix grads = per_sample_gradients(spec, init, batch);
    const auto target = grads.row(max_idx);
    double dot = 0.0;
    for (std::size_t k = 0; k < step.size(); ++k) dot += step[k] * target[k];
    const double cosine = dot / (hvtest::norm(step) * hvtest::norm(target));
    CHECK(std::acos(std::min(1.0, cosine)) <= 1e-3);
}

TEST_CASE("the reference point is a constant within a step") {
    // One full-batch step with zero momentum must equal the explicit
    // pipeline: weights from detached losses, then the aggregated
    // per-sample gradient. No derivative flows through mu.
    const SplitDataset data = gen_synthetic(SyntheticKind::GaussianBlobs, 40, 25);
    RunConfig cfg = small_config(data);
    cfg.batch_size = static_cast<int>(data.train.size());
    cfg.momentum = 0.0;
    cfg.max_epochs = 1;
    cfg.xi_schedule = {-1.0};

    const ParameterVector init = init_params(cfg.model, param_init_seed(cfg.seed));
    const LossVector losses = per_sample_losses(cfg.model, init, data.train);
    const auto weights = hypervolume_weights(losses, reference_point(losses, -1.0));
    const auto agg = aggregate_gradient(per_sample_gradients(cfg.model, init, data.train),
                                        weights);

    const RunLog log = train(cfg, data);
    std::vector<double> expected(init.size());
    for (std::size_t k = 0; k < expected.size(); ++k)
        expected[k] = init.values[k] - cfg.base_lr * agg[k];
    CHECK(hvtest::rel_error(log.final_params.values, expected) <= 1e-10);
}

TEST_CASE("weight concentration grows monotonically as xi decreases") {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.below(10);
        std::vector<double> values(n);
        for (double& v : values) v = rng.uniform(0.0, 3.0);
        const LossVector losses(values);
        std::size_t argmax = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (values[i] > values[argmax]) argmax = i;

        double prev = -1.0;
        for (double xi : {4.0, 2.0, 0.0, -2.0, -4.0}) {
            const auto w = hypervolume_weights(losses, reference_point(losses, xi));
            REQUIRE(w[argmax] >= prev - 1e-15);
            prev = w[argmax];
        }
    }
}

TEST_CASE("no batch across a full run raises a domain error") {
    const SplitDataset data = gen_synthetic(SyntheticKind::RareSubpopulation, 80, 26);
    RunConfig cfg = small_config(data);
    cfg.xi_schedule = {-4.0, -2.0, 0.0, kInf};
    cfg.patience = 2;
    cfg.max_epochs = 20;
    CHECK_NOTHROW(train(cfg, data));
}

TEST_CASE("separable blobs reach 1% error within 20 epochs") {
    const SplitDataset data = gen_synthetic(SyntheticKind::GaussianBlobs, 200, 27);
    RunConfig cfg = small_config(data);
    cfg.aggregator = Aggregator::Mean;
    cfg.max_epochs = 20;
    const RunLog log = train(cfg, data);
    CHECK(log.best_val_error <= 0.01);
    CHECK(log.test_error_at_best <= 0.01);
}
