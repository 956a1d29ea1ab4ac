#include <doctest.h>

#include <limits>
#include <tuple>
#include <vector>

#include "hv/core.hpp"
#include "hv/errors.hpp"
#include "hv/policy.hpp"
#include "hv/rng.hpp"

using namespace hv;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

ScheduleState default_state(std::vector<double> xis) {
    return ScheduleState::make(std::move(xis), 0.1, 0.001, 0.1, 20, 200);
}
}  // namespace

TEST_CASE("reference_point: adaptive rule examples") {
    CHECK(reference_point(LossVector({0.2, 0.8}), 0.0).mu() ==
          doctest::Approx(1.6).epsilon(1e-14));
    CHECK(reference_point(LossVector({0.2, 0.8}), -1.0).mu() ==
          doctest::Approx(0.88).epsilon(1e-14));
    // degenerate all-zero batch hits the loss floor
    CHECK(reference_point(LossVector({0.0, 0.0}), 0.0).mu() ==
          doctest::Approx(2e-8).epsilon(1e-12));
    CHECK(reference_point(LossVector({0.5}), kInf).is_mean_mode());
}

TEST_CASE("reference_point always strictly dominates; hv-core accepts it") {
    Rng rng(606);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 1 + rng.below(10);
        std::vector<double> values(n);
        for (double& v : values) v = rng.uniform(0.0, 4.0);
        if (rng.below(10) == 0) values[0] = 0.0;
        const LossVector losses(values);
        const double xi = rng.uniform(-4.0, 6.0);  // schedule range of the protocol
        const ReferencePoint ref = reference_point(losses, xi);
        REQUIRE(ref.mu() > losses.max());
        CHECK_NOTHROW(hypervolume_weights(losses, ref));
        CHECK_NOTHROW(log_hypervolume(losses, ref));
    }
}

TEST_CASE("schedule state validation") {
    CHECK_THROWS_AS(default_state({}), ConfigError);
    CHECK_THROWS_AS(default_state({0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(default_state({1.0, -1.0}), ConfigError);
    CHECK_THROWS_AS(default_state({kInf, 0.0}), ConfigError);
    CHECK_NOTHROW(default_state({-3.0, 0.0, kInf}));
    CHECK_THROWS_AS(ScheduleState::make({0.0}, 0.1, 0.2, 0.1, 20, 200), ConfigError);
    CHECK_THROWS_AS(ScheduleState::make({0.0}, 0.1, 0.001, 1.0, 20, 200), ConfigError);
    CHECK_THROWS_AS(ScheduleState::make({0.0}, 0.1, 0.001, 0.1, 0, 200), ConfigError);
}

TEST_CASE("advance_on_stall: xi advances before any lr decay") {
    ScheduleState s = default_state({-3.0, 0.0, kInf});
    s.best_val_metric = 0.25;

    SUBCASE("stall number 20 advances xi") {
        s.stall_counter = 19;
        auto [next, action] = advance_on_stall(s, 0.25);  // tie counts as stall
        CHECK(action == ScheduleAction::XiAdvanced);
        CHECK(next.xi_index == 1);
        CHECK(next.stall_counter == 0);
    }
    SUBCASE("last xi entry decays the learning rate instead") {
        s.xi_index = 2;
        s.stall_counter = 19;
        auto [next, action] = advance_on_stall(s, 0.3);
        CHECK(action == ScheduleAction::LrDecayed);
        CHECK(next.learning_rate == doctest::Approx(0.01));
    }
    SUBCASE("improvement resets and records") {
        s.stall_counter = 19;
        auto [next, action] = advance_on_stall(s, 0.2);
        CHECK(action == ScheduleAction::None);
        CHECK(next.stall_counter == 0);
        CHECK(next.best_val_metric == 0.2);
    }
}

TEST_CASE("schedule totality: every xi entry then every lr decade, then saturation") {
    ScheduleState s = default_state({-4.0, -3.0, -2.0, -1.0, 0.0, kInf});
    s.best_val_metric = 0.5;

    std::vector<ScheduleAction> fired;
    for (int step = 0; step < 20 * 9; ++step) {
        ScheduleAction action;
        std::tie(s, action) = advance_on_stall(std::move(s), 0.5);
        if (action != ScheduleAction::None) fired.push_back(action);
        REQUIRE(s.stall_counter <= s.patience);
        REQUIRE(s.learning_rate >= s.lr_floor);
        REQUIRE(s.learning_rate <= s.initial_learning_rate);
    }
    const std::vector<ScheduleAction> expected = {
        ScheduleAction::XiAdvanced, ScheduleAction::XiAdvanced, ScheduleAction::XiAdvanced,
        ScheduleAction::XiAdvanced, ScheduleAction::XiAdvanced, ScheduleAction::LrDecayed,
        ScheduleAction::LrDecayed,  ScheduleAction::Saturated,  ScheduleAction::Saturated};
    REQUIRE(fired == expected);
    CHECK(s.xi_index == 5);
    CHECK(s.learning_rate == doctest::Approx(0.001));
}
