#ifndef HV_MODELS_HPP
#define HV_MODELS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hv/core.hpp"

namespace hv {

// Flattened model parameters theta.
struct ParameterVector {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

// One set of samples: row-major features plus integer class labels.
class Batch {
  public:
    Batch(std::vector<double> features, std::vector<int> labels, std::size_t feature_dim);

    std::size_t size() const { return labels_.size(); }
    std::size_t feature_dim() const { return dim_; }
    std::span<const double> input(std::size_t i) const {
        return {features_.data() + i * dim_, dim_};
    }
    int label(std::size_t i) const { return labels_[i]; }
    const std::vector<double>& features() const { return features_; }
    const std::vector<int>& labels() const { return labels_; }

    Batch gather(std::span<const std::size_t> indices) const;

  private:
    std::vector<double> features_;
    std::vector<int> labels_;
    std::size_t dim_;
};

enum class ModelKind { Logistic, Mlp };

// Small softmax classifiers with exact hand-derived backpropagation.
// Dropout (inverted, train-time scaling by 1/(1-p)) applies to the MLP
// hidden layer only; one shared mask covers a whole batch evaluation.
struct ModelSpec {
    ModelKind kind = ModelKind::Logistic;
    int input_dim = 1;
    int hidden_dim = 0;  // Mlp only
    int num_classes = 2;
    double dropout_prob = 0.0;

    std::size_t param_count() const;
    void validate() const;
};

// Softmax cross-entropy per sample, each >= 0. Deterministic given
// (params, batch, dropout_seed); dropout_prob == 0 makes the seed inert.
LossVector per_sample_losses(const ModelSpec& spec, const ParameterVector& params,
                             const Batch& batch,
                             std::optional<std::uint64_t> dropout_seed = {});

// Row i is the exact gradient of sample i's loss, under the same shared
// dropout mask the loss evaluation would draw from the seed.
GradientMatrix per_sample_gradients(const ModelSpec& spec, const ParameterVector& params,
                                    const Batch& batch,
                                    std::optional<std::uint64_t> dropout_seed = {});

// sum_i w_i * grad_i computed in one backward sweep without materializing
// the N x n gradient matrix. Agrees with
// aggregate_gradient(per_sample_gradients(...), weights).
std::vector<double> weighted_gradient(const ModelSpec& spec, const ParameterVector& params,
                                      const Batch& batch, const AggregationWeights& weights,
                                      std::optional<std::uint64_t> dropout_seed = {});

// Central differences (f(x+h e_k) - f(x-h e_k)) / 2h. Test oracle.
std::vector<double> finite_diff_gradient(
    const std::function<double(const ParameterVector&)>& loss_fn, const ParameterVector& at,
    double h);

// Glorot-uniform weights (a = sqrt(6/(fan_in+fan_out))), zero biases.
ParameterVector init_params(const ModelSpec& spec, std::uint64_t seed);

// Fraction of misclassified samples under argmax prediction, dropout off.
double classification_error(const ModelSpec& spec, const ParameterVector& params,
                            const Batch& batch);

}  // namespace hv

#endif  // HV_MODELS_HPP
