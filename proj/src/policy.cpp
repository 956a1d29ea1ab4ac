#include "hv/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hv/errors.hpp"

namespace hv {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ReferencePoint reference_point(const LossVector& losses, double xi) {
    if (std::isnan(xi)) throw DomainError("reference_point: xi must not be NaN");
    if (xi == kInf) return ReferencePoint::mean_loss();
    const double base = std::max(losses.max(), kLossFloor);
    const double mu = (1.0 + std::pow(10.0, xi)) * base;
    return ReferencePoint::adaptive(mu, xi);
}

ScheduleState ScheduleState::make(std::vector<double> xi_schedule, double learning_rate,
                                  double lr_floor, double lr_decay, int patience,
                                  int max_epochs) {
    if (xi_schedule.empty()) throw ConfigError("xi schedule must not be empty");
    for (std::size_t i = 0; i < xi_schedule.size(); ++i) {
        const double x = xi_schedule[i];
        if (std::isnan(x)) throw ConfigError("xi schedule entries must not be NaN");
        if (x == kInf && i + 1 != xi_schedule.size())
            throw ConfigError("infinity is allowed only as the last xi schedule entry");
        if (i > 0 && !(xi_schedule[i - 1] < x))
            throw ConfigError("xi schedule must be strictly increasing");
    }
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (!(lr_floor > 0.0) || lr_floor > learning_rate)
        throw ConfigError("lr floor must satisfy 0 < floor <= learning rate");
    if (!(lr_decay > 0.0 && lr_decay < 1.0)) throw ConfigError("lr decay must be in (0, 1)");
    if (patience < 1) throw ConfigError("patience must be >= 1");
    if (max_epochs < 0) throw ConfigError("max epochs must be >= 0");

    ScheduleState s;
    s.xi_schedule = std::move(xi_schedule);
    s.xi_index = 0;
    s.learning_rate = learning_rate;
    s.initial_learning_rate = learning_rate;
    s.lr_floor = lr_floor;
    s.lr_decay = lr_decay;
    s.patience = patience;
    s.stall_counter = 0;
    s.best_val_metric = kInf;
    s.epoch = 0;
    s.max_epochs = max_epochs;
    return s;
}

std::pair<ScheduleState, ScheduleAction> advance_on_stall(ScheduleState state,
                                                          double val_metric) {
    if (val_metric < state.best_val_metric) {
        state.best_val_metric = val_metric;
        state.stall_counter = 0;
        return {std::move(state), ScheduleAction::None};
    }
    // Ties count as stall: "without improvement" is strict.
    ++state.stall_counter;
    if (state.stall_counter < state.patience) return {std::move(state), ScheduleAction::None};

    state.stall_counter = 0;
    if (state.xi_index + 1 < state.xi_schedule.size()) {
        ++state.xi_index;
        return {std::move(state), ScheduleAction::XiAdvanced};
    }
    if (state.learning_rate * state.lr_decay >= state.lr_floor) {
        state.learning_rate *= state.lr_decay;
        return {std::move(state), ScheduleAction::LrDecayed};
    }
    return {std::move(state), ScheduleAction::Saturated};
}

}  // namespace hv
