#include "hv/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hv/errors.hpp"

namespace hv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dominating(const LossVector& losses, double mu) {
    for (std::size_t i = 0; i < losses.size(); ++i) {
        if (!(mu - losses[i] >= kMinReferenceGap)) {
            throw DomainError("reference mu=" + std::to_string(mu) +
                              " does not strictly dominate loss l[" + std::to_string(i) +
                              "]=" + std::to_string(losses[i]));
        }
    }
}

}  // namespace

LossVector::LossVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw ShapeError("LossVector must hold at least one entry");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            throw DomainError("loss l[" + std::to_string(i) + "] is not finite");
        if (values_[i] < 0.0)
            throw DomainError("loss l[" + std::to_string(i) + "] is negative");
    }
}

double LossVector::max() const { return *std::max_element(values_.begin(), values_.end()); }

double LossVector::min() const { return *std::min_element(values_.begin(), values_.end()); }

ReferencePoint::ReferencePoint(double mu, double xi, Source source)
    : mu_(mu), xi_(xi), source_(source) {
    if (xi_ != kInf && !std::isfinite(mu_))
        throw DomainError("reference mu must be finite outside mean-loss mode");
}

ReferencePoint ReferencePoint::fixed(double mu) {
    return {mu, std::numeric_limits<double>::quiet_NaN(), Source::Fixed};
}

ReferencePoint ReferencePoint::adaptive(double mu, double xi) {
    if (!std::isfinite(xi)) throw DomainError("adaptive reference needs a finite xi");
    return {mu, xi, Source::Adaptive};
}

ReferencePoint ReferencePoint::mean_loss() {
    return {std::numeric_limits<double>::quiet_NaN(), kInf, Source::Adaptive};
}

bool ReferencePoint::is_mean_mode() const { return xi_ == kInf; }

GradientMatrix::GradientMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

GradientMatrix::GradientMatrix(const std::vector<std::vector<double>>& rows)
    : rows_(rows.size()), cols_(rows.empty() ? 0 : rows.front().size()) {
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ShapeError("gradient rows have inconsistent lengths");
        for (double v : r) {
            if (!std::isfinite(v)) throw DomainError("gradient entry is not finite");
            data_.push_back(v);
        }
    }
}

double log_hypervolume(const LossVector& losses, const ReferencePoint& ref) {
    if (ref.is_mean_mode())
        throw DomainError("log_hypervolume is undefined in mean-loss mode (xi = infinity)");
    require_dominating(losses, ref.mu());
    double sum = 0.0;
    for (double l : losses.values()) sum += std::log(ref.mu() - l);
    return sum;
}

AggregationWeights hypervolume_weights(const LossVector& losses, const ReferencePoint& ref) {
    const std::size_t n = losses.size();
    if (ref.is_mean_mode()) {
        return {std::vector<double>(n, 1.0 / static_cast<double>(n))};
    }
    require_dominating(losses, ref.mu());
    std::vector<double> beta(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        beta[i] = 1.0 / (ref.mu() - losses[i]);
        total += beta[i];
    }
    for (double& b : beta) b /= total;
    return {std::move(beta)};
}

std::vector<double> aggregate_gradient(const GradientMatrix& grads,
                                       const AggregationWeights& weights) {
    if (grads.rows() != weights.size())
        throw ShapeError("gradient rows (" + std::to_string(grads.rows()) +
                         ") != weight count (" + std::to_string(weights.size()) + ")");
    std::vector<double> out(grads.cols(), 0.0);
    for (std::size_t i = 0; i < grads.rows(); ++i) {
        const auto row = grads.row(i);
        const double w = weights[i];
        for (std::size_t k = 0; k < row.size(); ++k) out[k] += w * row[k];
    }
    return out;
}

std::vector<double> raw_hv_gradient(const LossVector& losses, const GradientMatrix& grads,
                                    const ReferencePoint& ref) {
    if (ref.is_mean_mode())
        throw DomainError("raw_hv_gradient is undefined in mean-loss mode (xi = infinity)");
    if (grads.rows() != losses.size())
        throw ShapeError("gradient rows (" + std::to_string(grads.rows()) +
                         ") != loss count (" + std::to_string(losses.size()) + ")");
    require_dominating(losses, ref.mu());
    std::vector<double> out(grads.cols(), 0.0);
    for (std::size_t i = 0; i < grads.rows(); ++i) {
        const auto row = grads.row(i);
        const double coeff = -1.0 / (ref.mu() - losses[i]);
        for (std::size_t k = 0; k < row.size(); ++k) out[k] += coeff * row[k];
    }
    return out;
}

double nu_for_mu(double c1, double c2, double mu) {
    if (c1 > c2) throw DomainError("nu_for_mu requires c1 <= c2");
    if (!(mu > c2)) throw DomainError("nu_for_mu requires mu > c2");
    const double a = (mu - c1) / (mu - c2) - 1.0;
    const double b = 1.0 - (mu - c2) / (mu - c1);
    return std::max(a, b);
}

double gamma_for_nu(double c1, double c2, double nu) {
    if (c1 > c2) throw DomainError("gamma_for_nu requires c1 <= c2");
    if (!(nu > 0.0)) throw DomainError("gamma_for_nu requires nu > 0");
    const double upper = ((1.0 + nu) * c2 - c1) / nu;
    const double lower = (c2 - (1.0 - nu) * c1) / nu;
    return std::max({c2, upper, lower});
}

}  // namespace hv
