#include "hv/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hv/errors.hpp"
#include "hv/rng.hpp"

namespace hv {

namespace {

// Views into the flat parameter vector. Layout:
//   Logistic: W (K x d), b (K)
//   Mlp:      W1 (H x d), b1 (H), W2 (K x H), b2 (K)
struct LogisticView {
    const double* w;
    const double* b;
};

struct MlpView {
    const double* w1;
    const double* b1;
    const double* w2;
    const double* b2;
};

LogisticView logistic_view(const ModelSpec& spec, const double* p) {
    const std::size_t k = spec.num_classes, d = spec.input_dim;
    return {p, p + k * d};
}

MlpView mlp_view(const ModelSpec& spec, const double* p) {
    const std::size_t d = spec.input_dim, h = spec.hidden_dim, k = spec.num_classes;
    return {p, p + h * d, p + h * d + h, p + h * d + h + h * k};
}

void check_shapes(const ModelSpec& spec, const ParameterVector& params, const Batch& batch) {
    spec.validate();
    if (batch.feature_dim() != static_cast<std::size_t>(spec.input_dim))
        throw ShapeError("batch feature dim " + std::to_string(batch.feature_dim()) +
                         " != model input dim " + std::to_string(spec.input_dim));
    if (params.size() != spec.param_count())
        throw ShapeError("parameter count " + std::to_string(params.size()) + " != expected " +
                         std::to_string(spec.param_count()));
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (batch.label(i) >= spec.num_classes)
            throw ShapeError("label " + std::to_string(batch.label(i)) + " out of range [0, " +
                             std::to_string(spec.num_classes) + ")");
    }
}

// Shared inverted-dropout scale per hidden unit: 1/(1-p) if kept, 0 if
// dropped. Empty vector means no dropout.
std::vector<double> dropout_scales(const ModelSpec& spec,
                                   std::optional<std::uint64_t> dropout_seed) {
    if (spec.kind != ModelKind::Mlp || spec.dropout_prob == 0.0 || !dropout_seed)
        return {};
    std::vector<double> scale(spec.hidden_dim);
    Rng rng(*dropout_seed);
    const double keep = 1.0 - spec.dropout_prob;
    for (double& s : scale) s = (rng.uniform() < keep) ? 1.0 / keep : 0.0;
    return scale;
}

double stable_softmax(std::span<const double> scores, int label, std::vector<double>& probs) {
    const double m = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    probs.resize(scores.size());
    for (std::size_t k = 0; k < scores.size(); ++k) {
        probs[k] = std::exp(scores[k] - m);
        z += probs[k];
    }
    for (double& p : probs) p /= z;
    // Cross-entropy = logsumexp(s) - s_y.
    return m + std::log(z) - scores[label];
}

// Scratch buffers reused across samples of one batch evaluation.
struct Workspace {
    std::vector<double> hidden_pre;
    std::vector<double> hidden;
    std::vector<double> scores;
    std::vector<double> probs;
    std::vector<double> dhidden;
};

void forward(const ModelSpec& spec, const double* p, std::span<const double> x,
             const std::vector<double>& drop, Workspace& ws) {
    const std::size_t d = spec.input_dim, k = spec.num_classes;
    ws.scores.assign(k, 0.0);
    if (spec.kind == ModelKind::Logistic) {
        const auto v = logistic_view(spec, p);
        for (std::size_t c = 0; c < k; ++c) {
            double s = v.b[c];
            const double* row = v.w + c * d;
            for (std::size_t j = 0; j < d; ++j) s += row[j] * x[j];
            ws.scores[c] = s;
        }
        return;
    }
    const std::size_t h = spec.hidden_dim;
    const auto v = mlp_view(spec, p);
    ws.hidden_pre.assign(h, 0.0);
    ws.hidden.assign(h, 0.0);
    for (std::size_t u = 0; u < h; ++u) {
        double s = v.b1[u];
        const double* row = v.w1 + u * d;
        for (std::size_t j = 0; j < d; ++j) s += row[j] * x[j];
        ws.hidden_pre[u] = s;
        double a = s > 0.0 ? s : 0.0;
        if (!drop.empty()) a *= drop[u];
        ws.hidden[u] = a;
    }
    for (std::size_t c = 0; c < k; ++c) {
        double s = v.b2[c];
        const double* row = v.w2 + c * h;
        for (std::size_t u = 0; u < h; ++u) s += row[u] * ws.hidden[u];
        ws.scores[c] = s;
    }
}

// Backprop one sample's cross-entropy into `out`, scaled by `weight`.
// Assumes forward() has just filled the workspace for this sample.
void accumulate_gradient(const ModelSpec& spec, const double* p, std::span<const double> x,
                         int label, const std::vector<double>& drop, Workspace& ws,
                         double weight, double* out) {
    const std::size_t d = spec.input_dim, k = spec.num_classes;
    stable_softmax(ws.scores, label, ws.probs);
    // dscores = softmax - onehot(label)
    ws.probs[label] -= 1.0;

    if (spec.kind == ModelKind::Logistic) {
        double* gw = out;
        double* gb = out + k * d;
        for (std::size_t c = 0; c < k; ++c) {
            const double g = weight * ws.probs[c];
            double* row = gw + c * d;
            for (std::size_t j = 0; j < d; ++j) row[j] += g * x[j];
            gb[c] += g;
        }
        return;
    }

    const std::size_t h = spec.hidden_dim;
    const auto v = mlp_view(spec, p);
    double* gw1 = out;
    double* gb1 = out + h * d;
    double* gw2 = gb1 + h;
    double* gb2 = gw2 + k * h;

    ws.dhidden.assign(h, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        const double g = weight * ws.probs[c];
        const double* row = v.w2 + c * h;
        double* grow = gw2 + c * h;
        for (std::size_t u = 0; u < h; ++u) {
            grow[u] += g * ws.hidden[u];
            ws.dhidden[u] += g * row[u];
        }
        gb2[c] += g;
    }
    for (std::size_t u = 0; u < h; ++u) {
        double g = ws.dhidden[u];
        if (!drop.empty()) g *= drop[u];
        if (ws.hidden_pre[u] <= 0.0) g = 0.0;
        if (g == 0.0) continue;
        double* row = gw1 + u * d;
        for (std::size_t j = 0; j < d; ++j) row[j] += g * x[j];
        gb1[u] += g;
    }
}

}  // namespace

Batch::Batch(std::vector<double> features, std::vector<int> labels, std::size_t feature_dim)
    : features_(std::move(features)), labels_(std::move(labels)), dim_(feature_dim) {
    if (labels_.empty()) throw ShapeError("batch must hold at least one sample");
    if (dim_ == 0) throw ShapeError("batch feature dim must be >= 1");
    if (features_.size() != labels_.size() * dim_)
        throw ShapeError("feature buffer size does not match sample count * dim");
    for (int y : labels_)
        if (y < 0) throw ShapeError("labels must be nonnegative");
}

Batch Batch::gather(std::span<const std::size_t> indices) const {
    std::vector<double> f;
    f.reserve(indices.size() * dim_);
    std::vector<int> y;
    y.reserve(indices.size());
    for (std::size_t i : indices) {
        const auto row = input(i);
        f.insert(f.end(), row.begin(), row.end());
        y.push_back(labels_[i]);
    }
    return {std::move(f), std::move(y), dim_};
}

std::size_t ModelSpec::param_count() const {
    const std::size_t d = input_dim, k = num_classes;
    if (kind == ModelKind::Logistic) return k * d + k;
    const std::size_t h = hidden_dim;
    return h * d + h + k * h + k;
}

void ModelSpec::validate() const {
    if (input_dim < 1 || num_classes < 1) throw ShapeError("model dims must be >= 1");
    if (kind == ModelKind::Mlp && hidden_dim < 1)
        throw ShapeError("mlp hidden dim must be >= 1");
    if (dropout_prob < 0.0 || dropout_prob >= 1.0)
        throw ShapeError("dropout probability must be in [0, 1)");
}

LossVector per_sample_losses(const ModelSpec& spec, const ParameterVector& params,
                             const Batch& batch, std::optional<std::uint64_t> dropout_seed) {
    check_shapes(spec, params, batch);
    const auto drop = dropout_scales(spec, dropout_seed);
    Workspace ws;
    std::vector<double> losses(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        forward(spec, params.values.data(), batch.input(i), drop, ws);
        losses[i] = stable_softmax(ws.scores, batch.label(i), ws.probs);
        // Clamp the tiny negative roundoff a saturated softmax can leave.
        if (losses[i] < 0.0) losses[i] = 0.0;
    }
    return LossVector(std::move(losses));
}

GradientMatrix per_sample_gradients(const ModelSpec& spec, const ParameterVector& params,
                                    const Batch& batch,
                                    std::optional<std::uint64_t> dropout_seed) {
    check_shapes(spec, params, batch);
    const auto drop = dropout_scales(spec, dropout_seed);
    Workspace ws;
    GradientMatrix grads(batch.size(), params.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        forward(spec, params.values.data(), batch.input(i), drop, ws);
        accumulate_gradient(spec, params.values.data(), batch.input(i), batch.label(i), drop,
                            ws, 1.0, grads.row(i).data());
    }
    return grads;
}

std::vector<double> weighted_gradient(const ModelSpec& spec, const ParameterVector& params,
                                      const Batch& batch, const AggregationWeights& weights,
                                      std::optional<std::uint64_t> dropout_seed) {
    check_shapes(spec, params, batch);
    if (weights.size() != batch.size())
        throw ShapeError("weight count " + std::to_string(weights.size()) +
                         " != batch size " + std::to_string(batch.size()));
    const auto drop = dropout_scales(spec, dropout_seed);
    Workspace ws;
    std::vector<double> out(params.size(), 0.0);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        forward(spec, params.values.data(), batch.input(i), drop, ws);
        accumulate_gradient(spec, params.values.data(), batch.input(i), batch.label(i), drop,
                            ws, weights[i], out.data());
    }
    return out;
}

std::vector<double> finite_diff_gradient(
    const std::function<double(const ParameterVector&)>& loss_fn, const ParameterVector& at,
    double h) {
    if (!(h > 0.0)) throw DomainError("finite difference step must be positive");
    ParameterVector probe = at;
    std::vector<double> grad(at.size());
    for (std::size_t k = 0; k < at.size(); ++k) {
        const double saved = probe.values[k];
        probe.values[k] = saved + h;
        const double fp = loss_fn(probe);
        probe.values[k] = saved - h;
        const double fm = loss_fn(probe);
        probe.values[k] = saved;
        grad[k] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

ParameterVector init_params(const ModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    ParameterVector p{std::vector<double>(spec.param_count(), 0.0)};
    const auto fill = [&](double* w, std::size_t count, int fan_in, int fan_out) {
        const double a = std::sqrt(6.0 / (fan_in + fan_out));
        for (std::size_t i = 0; i < count; ++i) w[i] = rng.uniform(-a, a);
    };
    const std::size_t d = spec.input_dim, k = spec.num_classes;
    if (spec.kind == ModelKind::Logistic) {
        fill(p.values.data(), k * d, spec.input_dim, spec.num_classes);
    } else {
        const std::size_t h = spec.hidden_dim;
        fill(p.values.data(), h * d, spec.input_dim, spec.hidden_dim);
        fill(p.values.data() + h * d + h, k * h, spec.hidden_dim, spec.num_classes);
    }
    return p;
}

double classification_error(const ModelSpec& spec, const ParameterVector& params,
                            const Batch& batch) {
    check_shapes(spec, params, batch);
    Workspace ws;
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        forward(spec, params.values.data(), batch.input(i), {}, ws);
        const auto it = std::max_element(ws.scores.begin(), ws.scores.end());
        if (static_cast<int>(it - ws.scores.begin()) != batch.label(i)) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(batch.size());
}

}  // namespace hv
