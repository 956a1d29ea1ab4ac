#ifndef HV_THEORY_HPP
#define HV_THEORY_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hv/core.hpp"

namespace hv {

// One quadratic objective l(theta) = scale * ||theta - center||^2 +
// offset, with scale > 0 and offset >= 0 so losses stay nonnegative.
struct QuadraticLoss {
    std::vector<double> center;
    double offset = 0.0;
    double scale = 1.0;
};

// A concrete bundle of quadratic losses over an open ball, small enough to
// brute-force: the test bench for the bound certificates.
class ToyProblem {
  public:
    ToyProblem(std::vector<QuadraticLoss> losses, double domain_radius);

    std::size_t num_losses() const { return losses_.size(); }
    std::size_t dim() const { return losses_.front().center.size(); }
    double domain_radius() const { return radius_; }

    double loss(std::size_t i, std::span<const double> theta) const;
    std::vector<double> loss_gradient(std::size_t i, std::span<const double> theta) const;
    LossVector losses_at(std::span<const double> theta) const;
    GradientMatrix gradients_at(std::span<const double> theta) const;

    double mean_loss(std::span<const double> theta) const;
    std::vector<double> mean_loss_gradient(std::span<const double> theta) const;

    // Sum of log gaps and its derivatives; require mu to dominate at theta.
    double hypervolume(double mu, std::span<const double> theta) const;
    std::vector<double> hv_gradient(double mu, std::span<const double> theta) const;
    // Row-major dim x dim Hessian of H (negative definite on the feasible set).
    std::vector<double> hv_hessian(double mu, std::span<const double> theta) const;
    // The mean loss has Hessian c * I with this constant curvature.
    double mean_loss_curvature() const;

  private:
    std::vector<QuadraticLoss> losses_;
    double radius_;
};

enum class TheoremKind { MeanToH, HToMean };

// Absolute slack absorbed when judging a bound violation.
inline constexpr double kCertTolerance = 1e-9;

// Numeric verdict for one theorem instance: the located optimum, the
// sampled constants, the bound parameters, and the worst violation seen.
struct BoundCertificate {
    TheoremKind theorem = TheoremKind::MeanToH;
    std::vector<double> theta_star;
    double epsilon = 0.0;        // requested neighborhood radius
    double epsilon_prime = 0.0;  // rung at which the bound was checked
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    double nu = 0.0;
    double gamma = 0.0;  // MeanToH only; NaN otherwise
    double mu = 0.0;
    int num_samples = 0;  // delta samples per rung
    double max_violation = 0.0;
    bool applicable = true;  // false when mu fails the mu > gamma hypothesis
    bool pass = false;

    std::string to_line() const;  // one flat key=value record
};

// Certifies the mean-optimum-to-hypervolume bound: locates the mean-loss
// minimizer by grid search plus gradient refinement, samples the loss and
// gradient bounds over the epsilon ball, sets mu just above the gamma
// threshold for the requested nu (unless overridden), and checks
//   H(mu, theta* + delta) <= H(mu, theta*) + nu C3 eps' N / (mu - C2)
// over sampled deltas, walking eps' down a halving ladder until a rung
// satisfies the bound everywhere.
BoundCertificate certify_theorem1(const ToyProblem& problem, double nu, double epsilon,
                                  int grid, std::uint64_t seed = 9001,
                                  std::optional<double> mu_override = {});

// Certifies the reverse direction: locates the hypervolume maximizer for
// the given mu and checks J_m(theta* + delta) >= J_m(theta*) - nu C3 eps'
// with nu derived from the sampled bounds.
BoundCertificate certify_theorem2(const ToyProblem& problem, double mu, double epsilon,
                                  int grid, std::uint64_t seed = 9002);

// max_i |N w_i - 1| for the hypervolume weights at this mu. The weight
// deviation lemma bounds this by nu_for_mu(min loss, max loss, mu).
double check_weight_deviation(const LossVector& losses, double mu);

// Relative deviations of the normalized hypervolume direction from its two
// limits: the mean gradient (mu -> infinity, probed at xi = +6) and the
// argmax-set average gradient (mu -> max loss, probed at xi = -6).
struct LimitReport {
    double mean_limit_deviation = 0.0;
    double max_limit_deviation = 0.0;
};

LimitReport limit_checks(const LossVector& losses, const GradientMatrix& grads);

// The full certification battery driven by the validate-theory command:
// randomized toy problems through both theorems, the weight-deviation
// sweep, and the limit checks.
struct TheoryBatteryOptions {
    int problems = 50;
    double nu = 0.5;
    double epsilon = 0.25;
    int grid = 2000;
    int deviation_cases = 10000;
    int limit_batches = 100;
    std::uint64_t seed = 20240;
};

struct TheoryBatteryResult {
    std::vector<BoundCertificate> certificates;
    int applicable = 0;
    int failed = 0;
    double worst_weight_deviation_slack = 0.0;  // max of dev - nu bound (<= 0 when sound)
    double worst_limit_deviation = 0.0;
    bool pass = false;
};

TheoryBatteryResult run_theory_battery(const TheoryBatteryOptions& options);

// Deterministic random problem generator shared by the battery and tests.
ToyProblem random_toy_problem(std::uint64_t seed);

}  // namespace hv

#endif  // HV_THEORY_HPP
