#ifndef HV_POLICY_HPP
#define HV_POLICY_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "hv/core.hpp"

namespace hv {

// Floor applied to the batch max loss before scaling, so the adaptive rule
// still produces a strictly dominating mu on an all-zero batch.
inline constexpr double kLossFloor = 1e-8;

// Adaptive reference: mu = (1 + 10^xi) * max(max_i l_i, kLossFloor).
// xi = +infinity selects mean-loss mode. Always yields mu strictly above
// every loss in the batch.
ReferencePoint reference_point(const LossVector& losses, double xi);

// What a stall event did to the schedule.
enum class ScheduleAction { None, XiAdvanced, LrDecayed, Saturated };

// Training-schedule state: position in the xi ladder, current learning
// rate, and the stall bookkeeping driving both.
struct ScheduleState {
    std::vector<double> xi_schedule;  // strictly increasing; +inf allowed only last
    std::size_t xi_index = 0;
    double learning_rate = 0.1;
    double initial_learning_rate = 0.1;
    double lr_floor = 0.001;
    double lr_decay = 0.1;
    int patience = 20;
    int stall_counter = 0;
    double best_val_metric = 0.0;  // set to +inf by make()
    int epoch = 0;
    int max_epochs = 200;

    // Validates all invariants and initializes best_val_metric.
    static ScheduleState make(std::vector<double> xi_schedule, double learning_rate,
                              double lr_floor, double lr_decay, int patience, int max_epochs);

    double current_xi() const { return xi_schedule[xi_index]; }
};

// One validation result in: improvement resets the stall counter and
// records the best metric; otherwise the counter grows and, at patience,
// fires exactly one of xi advancement, learning-rate decay, or saturation
// (all xi advances happen before any decay).
std::pair<ScheduleState, ScheduleAction> advance_on_stall(ScheduleState state,
                                                          double val_metric);

}  // namespace hv

#endif  // HV_POLICY_HPP
