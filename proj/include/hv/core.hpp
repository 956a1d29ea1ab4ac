#ifndef HV_CORE_HPP
#define HV_CORE_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace hv {

// Per-sample losses of one batch, viewed as the objectives of a
// multi-objective problem. Entries are finite and nonnegative.
class LossVector {
  public:
    explicit LossVector(std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double max() const;
    double min() const;

  private:
    std::vector<double> values_;
};

// Scalar reference value mu bounding all losses from above, together with
// the exponent xi that generated it. xi == +infinity selects mean-loss
// mode, in which mu is unused.
class ReferencePoint {
  public:
    enum class Source { Fixed, Adaptive };

    static ReferencePoint fixed(double mu);
    static ReferencePoint adaptive(double mu, double xi);
    static ReferencePoint mean_loss();

    double mu() const { return mu_; }
    double xi() const { return xi_; }
    Source source() const { return source_; }
    bool is_mean_mode() const;

  private:
    ReferencePoint(double mu, double xi, Source source);

    double mu_;
    double xi_;  // finite exponent, +infinity (mean mode), or NaN for fixed mu
    Source source_;
};

// Simplex weights turning per-sample gradients into one step direction:
// w_i >= 0, sum w_i = 1, and strictly aligned with the losses unless in
// mean-loss mode.
struct AggregationWeights {
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    double operator[](std::size_t i) const { return weights[i]; }
};

// Row i holds the gradient of sample i's loss with respect to the model
// parameters. Flat row-major storage.
class GradientMatrix {
  public:
    GradientMatrix(std::size_t rows, std::size_t cols);
    explicit GradientMatrix(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

// Smallest admissible gap mu - l_i. Below this the weights are considered
// numerically degenerate and a DomainError is raised.
inline constexpr double kMinReferenceGap = 1e-12;

// log H(mu, theta) = sum_i log(mu - l_i). Requires mu to strictly dominate
// every loss.
double log_hypervolume(const LossVector& losses, const ReferencePoint& ref);

// Normalized gradient weights w_i = (1/(mu - l_i)) / sum_j 1/(mu - l_j).
// In mean-loss mode returns exactly uniform 1/N.
AggregationWeights hypervolume_weights(const LossVector& losses, const ReferencePoint& ref);

// sum_i w_i * grad_i: the gradient of the weighted surrogate loss, i.e.
// the vector an optimizer subtracts. The paper's ascent sign lives only in
// raw_hv_gradient; this is the single sign boundary.
std::vector<double> aggregate_gradient(const GradientMatrix& grads,
                                       const AggregationWeights& weights);

// Unnormalized gradient of log H: -sum_i (1/(mu - l_i)) grad_i.
std::vector<double> raw_hv_gradient(const LossVector& losses, const GradientMatrix& grads,
                                    const ReferencePoint& ref);

// Tightness factor nu = max{(mu-c1)/(mu-c2) - 1, 1 - (mu-c2)/(mu-c1)} for
// loss bounds c1 <= c2 < mu. Strictly decreasing in mu; zero iff c1 == c2.
double nu_for_mu(double c1, double c2, double mu);

// Smallest reference threshold guaranteeing the given nu:
// gamma = max{c2, ((1+nu)c2 - c1)/nu, (c2 - (1-nu)c1)/nu}. Any mu > gamma
// yields nu_for_mu(c1, c2, mu) <= nu.
double gamma_for_nu(double c1, double c2, double nu);

}  // namespace hv

#endif  // HV_CORE_HPP
