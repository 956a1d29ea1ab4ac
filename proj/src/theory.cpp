#include "hv/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "hv/errors.hpp"
#include "hv/rng.hpp"

namespace hv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kGridAxisPoints = 41;        // coarse optimizer lattice per axis
constexpr int kConstantSamples = 10000;    // dense sampling for C1/C2/C3
constexpr int kLadderRungs = 11;           // eps' in {eps, eps/2, ..., eps/2^10}
constexpr double kRefineTolerance = 1e-10;

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<double> add(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

// Uniform point in the ball of given radius, by rejection from the cube.
std::vector<double> sample_ball(Rng& rng, std::size_t dim, double radius) {
    std::vector<double> p(dim);
    for (;;) {
        double s = 0.0;
        for (double& x : p) {
            x = rng.uniform(-1.0, 1.0);
            s += x * x;
        }
        if (s <= 1.0) {
            for (double& x : p) x *= radius;
            return p;
        }
    }
}

// Solves the 1x1 or 2x2 symmetric positive definite system A x = b.
std::vector<double> solve_spd(const std::vector<double>& a, const std::vector<double>& b) {
    if (b.size() == 1) {
        if (!(a[0] > 0.0)) throw ConvergenceError("refinement Hessian is not positive");
        return {b[0] / a[0]};
    }
    const double det = a[0] * a[3] - a[1] * a[2];
    if (!(det > 0.0) || !(a[0] > 0.0))
        throw ConvergenceError("refinement Hessian is not positive definite");
    return {(a[3] * b[0] - a[1] * b[1]) / det, (a[0] * b[1] - a[2] * b[0]) / det};
}

// Refines a minimum of f to |grad| <= tol. A backtracking gradient phase
// does the coarse work; near the optimum, where function-value comparisons
// drown in rounding noise, Newton steps judged on the gradient norm take
// over. `hess` must be the (positive definite) Hessian of f.
template <typename F, typename G, typename H, typename Feasible>
std::vector<double> refine_minimum(std::vector<double> theta, F&& f, G&& g, H&& hess,
                                   Feasible&& feasible, double tol) {
    double step = 0.5;
    double value = f(theta);
    for (int iter = 0; iter < 20000; ++iter) {
        const std::vector<double> grad = g(theta);
        const double gn = norm(grad);
        if (gn <= tol) return theta;
        if (gn <= 1e-6) break;  // hand over to the Newton polish
        bool moved = false;
        while (step > 1e-16) {
            std::vector<double> cand(theta.size());
            for (std::size_t k = 0; k < theta.size(); ++k) cand[k] = theta[k] - step * grad[k];
            if (feasible(cand)) {
                const double cand_value = f(cand);
                if (cand_value <= value - 0.25 * step * gn * gn) {
                    theta = std::move(cand);
                    value = cand_value;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!moved) break;  // at the numerical floor of value comparisons
        step = std::min(step * 2.0, 4.0);
    }

    for (int iter = 0; iter < 100; ++iter) {
        const std::vector<double> grad = g(theta);
        const double gn = norm(grad);
        if (gn <= tol) return theta;
        std::vector<double> rhs(grad.size());
        for (std::size_t k = 0; k < grad.size(); ++k) rhs[k] = -grad[k];
        const std::vector<double> direction = solve_spd(hess(theta), rhs);
        bool accepted = false;
        for (double t = 1.0; t > 1e-14; t *= 0.5) {
            std::vector<double> cand(theta.size());
            for (std::size_t k = 0; k < theta.size(); ++k) cand[k] = theta[k] + t * direction[k];
            if (!feasible(cand)) continue;
            if (norm(g(cand)) < gn) {
                theta = std::move(cand);
                accepted = true;
                break;
            }
        }
        if (!accepted) throw ConvergenceError("newton polish stalled above tolerance");
    }
    throw ConvergenceError("optimum refinement did not converge");
}

// All lattice points of the axis-aligned grid inside the given radius.
template <typename Visit>
void scan_grid(std::size_t dim, double radius, Visit&& visit) {
    std::vector<double> p(dim, 0.0);
    const int half = kGridAxisPoints / 2;
    const double h = radius / half;
    if (dim == 1) {
        for (int i = -half; i <= half; ++i) {
            p[0] = i * h;
            visit(p);
        }
        return;
    }
    for (int i = -half; i <= half; ++i) {
        for (int j = -half; j <= half; ++j) {
            p[0] = i * h;
            p[1] = j * h;
            if (p[0] * p[0] + p[1] * p[1] <= radius * radius) visit(p);
        }
    }
}

struct SampledConstants {
    double c1, c2, c3;
};

// Dense sampling of loss and gradient bounds over the epsilon ball, with a
// 1% inflation margin so the sampled bounds are conservative.
SampledConstants sample_constants(const ToyProblem& problem, std::span<const double> center,
                                  double epsilon, Rng& rng) {
    double c1 = std::numeric_limits<double>::infinity();
    double c2 = -c1;
    double c3 = 0.0;
    const auto probe = [&](const std::vector<double>& delta) {
        const std::vector<double> theta = add(center, delta);
        for (std::size_t i = 0; i < problem.num_losses(); ++i) {
            const double l = problem.loss(i, theta);
            c1 = std::min(c1, l);
            c2 = std::max(c2, l);
            c3 = std::max(c3, norm(problem.loss_gradient(i, theta)));
        }
    };
    for (int s = 0; s < kConstantSamples; ++s) probe(sample_ball(rng, problem.dim(), epsilon));
    std::vector<double> axis(problem.dim(), 0.0);
    for (std::size_t k = 0; k < problem.dim(); ++k) {
        axis[k] = epsilon;
        probe(axis);
        axis[k] = -epsilon;
        probe(axis);
        axis[k] = 0.0;
    }
    return {0.99 * c1, 1.01 * c2, 1.01 * c3};
}

// Walks eps' down the halving ladder; a rung passes when every sampled
// delta satisfies the bound within kCertTolerance. `violation(delta,
// eps_prime)` returns bound LHS minus RHS. Returns the accepted (or least
// violating) rung and records it in the certificate.
template <typename Violation>
void run_ladder(BoundCertificate& cert, const ToyProblem& problem, double epsilon, int grid,
                std::uint64_t seed, Violation&& violation) {
    Rng rng(seed);
    double best_violation = std::numeric_limits<double>::infinity();
    double best_rung = epsilon;
    for (int rung = 0; rung < kLadderRungs; ++rung) {
        const double eps_prime = epsilon / double(1 << rung);
        double max_violation = -std::numeric_limits<double>::infinity();
        for (int s = 0; s < grid; ++s) {
            const std::vector<double> delta = sample_ball(rng, problem.dim(), eps_prime);
            max_violation = std::max(max_violation, violation(delta, eps_prime));
        }
        std::vector<double> axis(problem.dim(), 0.0);
        for (std::size_t k = 0; k < problem.dim(); ++k) {
            axis[k] = eps_prime;
            max_violation = std::max(max_violation, violation(axis, eps_prime));
            axis[k] = -eps_prime;
            max_violation = std::max(max_violation, violation(axis, eps_prime));
            axis[k] = 0.0;
        }
        if (max_violation < best_violation) {
            best_violation = max_violation;
            best_rung = eps_prime;
        }
        if (max_violation <= kCertTolerance) break;
    }
    cert.epsilon_prime = best_rung;
    cert.max_violation = best_violation;
    cert.num_samples = grid + 2 * static_cast<int>(problem.dim());
}

}  // namespace

ToyProblem::ToyProblem(std::vector<QuadraticLoss> losses, double domain_radius)
    : losses_(std::move(losses)), radius_(domain_radius) {
    if (losses_.empty()) throw ShapeError("toy problem needs at least one loss");
    if (!(radius_ > 0.0)) throw DomainError("domain radius must be positive");
    const std::size_t d = losses_.front().center.size();
    if (d < 1 || d > 2) throw ShapeError("toy problems are 1- or 2-dimensional");
    for (const auto& q : losses_) {
        if (q.center.size() != d) throw ShapeError("inconsistent center dimensions");
        if (q.offset < 0.0) throw DomainError("offsets must keep losses nonnegative");
        if (!(q.scale > 0.0)) throw DomainError("quadratic scales must be positive");
    }
}

double ToyProblem::loss(std::size_t i, std::span<const double> theta) const {
    const auto& q = losses_[i];
    double s = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const double d = theta[k] - q.center[k];
        s += d * d;
    }
    return q.scale * s + q.offset;
}

std::vector<double> ToyProblem::loss_gradient(std::size_t i,
                                              std::span<const double> theta) const {
    const auto& q = losses_[i];
    std::vector<double> g(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k)
        g[k] = 2.0 * q.scale * (theta[k] - q.center[k]);
    return g;
}

LossVector ToyProblem::losses_at(std::span<const double> theta) const {
    std::vector<double> v(num_losses());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = loss(i, theta);
    return LossVector(std::move(v));
}

GradientMatrix ToyProblem::gradients_at(std::span<const double> theta) const {
    GradientMatrix g(num_losses(), dim());
    for (std::size_t i = 0; i < num_losses(); ++i) {
        const auto gi = loss_gradient(i, theta);
        std::copy(gi.begin(), gi.end(), g.row(i).begin());
    }
    return g;
}

double ToyProblem::mean_loss(std::span<const double> theta) const {
    double s = 0.0;
    for (std::size_t i = 0; i < num_losses(); ++i) s += loss(i, theta);
    return s / static_cast<double>(num_losses());
}

std::vector<double> ToyProblem::mean_loss_gradient(std::span<const double> theta) const {
    std::vector<double> g(dim(), 0.0);
    for (std::size_t i = 0; i < num_losses(); ++i) {
        const auto gi = loss_gradient(i, theta);
        for (std::size_t k = 0; k < g.size(); ++k) g[k] += gi[k];
    }
    for (double& x : g) x /= static_cast<double>(num_losses());
    return g;
}

double ToyProblem::hypervolume(double mu, std::span<const double> theta) const {
    return log_hypervolume(losses_at(theta), ReferencePoint::fixed(mu));
}

std::vector<double> ToyProblem::hv_gradient(double mu, std::span<const double> theta) const {
    return raw_hv_gradient(losses_at(theta), gradients_at(theta), ReferencePoint::fixed(mu));
}

std::vector<double> ToyProblem::hv_hessian(double mu, std::span<const double> theta) const {
    // d2H = -sum_i [ beta_i^2 grad_i grad_i^T + 2 scale_i beta_i I ]
    const std::size_t d = dim();
    std::vector<double> h(d * d, 0.0);
    for (std::size_t i = 0; i < num_losses(); ++i) {
        const double gap = mu - loss(i, theta);
        if (!(gap > 0.0)) throw DomainError("hv_hessian: mu does not dominate at theta");
        const double beta = 1.0 / gap;
        const auto gi = loss_gradient(i, theta);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) h[r * d + c] -= beta * beta * gi[r] * gi[c];
            h[r * d + r] -= 2.0 * losses_[i].scale * beta;
        }
    }
    return h;
}

double ToyProblem::mean_loss_curvature() const {
    double s = 0.0;
    for (const auto& q : losses_) s += q.scale;
    return 2.0 * s / static_cast<double>(num_losses());
}

std::string BoundCertificate::to_line() const {
    char buf[512];
    std::string ts = "(";
    for (std::size_t k = 0; k < theta_star.size(); ++k) {
        char t[40];
        std::snprintf(t, sizeof t, "%s%.9g", k ? ";" : "", theta_star[k]);
        ts += t;
    }
    ts += ")";
    std::snprintf(buf, sizeof buf,
                  "theorem=%s theta_star=%s mu=%.9g nu=%.9g gamma=%.9g c1=%.9g c2=%.9g "
                  "c3=%.9g eps=%.9g eps_prime=%.9g samples=%d max_violation=%.6e "
                  "applicable=%d pass=%d",
                  theorem == TheoremKind::MeanToH ? "mean_to_h" : "h_to_mean", ts.c_str(), mu,
                  nu, gamma, c1, c2, c3, epsilon, epsilon_prime, num_samples, max_violation,
                  applicable ? 1 : 0, pass ? 1 : 0);
    return buf;
}

BoundCertificate certify_theorem1(const ToyProblem& problem, double nu, double epsilon,
                                  int grid, std::uint64_t seed,
                                  std::optional<double> mu_override) {
    if (!(nu > 0.0)) throw DomainError("certify_theorem1 requires nu > 0");
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
    if (grid < 1) throw DomainError("grid must be >= 1");

    // Locate the mean-loss minimizer: coarse lattice, then descent.
    std::vector<double> best;
    double best_value = std::numeric_limits<double>::infinity();
    scan_grid(problem.dim(), 0.9 * problem.domain_radius(), [&](const std::vector<double>& p) {
        const double v = problem.mean_loss(p);
        if (v < best_value) {
            best_value = v;
            best = p;
        }
    });
    const double inner = problem.domain_radius() - 0.5 * epsilon;
    const std::vector<double> theta_star = refine_minimum(
        best, [&](const std::vector<double>& t) { return problem.mean_loss(t); },
        [&](const std::vector<double>& t) { return problem.mean_loss_gradient(t); },
        [&](const std::vector<double>& t) {
            std::vector<double> h(t.size() * t.size(), 0.0);
            for (std::size_t k = 0; k < t.size(); ++k)
                h[k * t.size() + k] = problem.mean_loss_curvature();
            return h;
        },
        [&](const std::vector<double>& t) { return norm(t) <= inner; }, kRefineTolerance);
    if (norm(theta_star) + epsilon > problem.domain_radius())
        throw DomainError("epsilon ball around theta* leaves the problem domain");

    Rng rng(Rng::derive(seed, 0xc0));
    const SampledConstants c = sample_constants(problem, theta_star, epsilon, rng);

    BoundCertificate cert;
    cert.theorem = TheoremKind::MeanToH;
    cert.theta_star = theta_star;
    cert.epsilon = epsilon;
    cert.c1 = c.c1;
    cert.c2 = c.c2;
    cert.c3 = c.c3;
    cert.nu = nu;
    cert.gamma = gamma_for_nu(c.c1, c.c2, nu);
    cert.mu = mu_override.value_or(1.01 * cert.gamma);
    cert.applicable = cert.mu > cert.gamma;
    if (!cert.applicable) {
        // Hypothesis mu > gamma fails: nothing to certify.
        cert.epsilon_prime = 0.0;
        cert.max_violation = kNaN;
        cert.num_samples = 0;
        cert.pass = false;
        return cert;
    }

    const double n = static_cast<double>(problem.num_losses());
    const double h_star = problem.hypervolume(cert.mu, theta_star);
    run_ladder(cert, problem, epsilon, grid, Rng::derive(seed, 0xd1),
               [&](const std::vector<double>& delta, double eps_prime) {
                   const double lhs = problem.hypervolume(cert.mu, add(theta_star, delta));
                   const double rhs =
                       h_star + nu * cert.c3 * eps_prime * n / (cert.mu - cert.c2);
                   return lhs - rhs;
               });
    cert.pass = cert.max_violation <= kCertTolerance;
    return cert;
}

BoundCertificate certify_theorem2(const ToyProblem& problem, double mu, double epsilon,
                                  int grid, std::uint64_t seed) {
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
    if (grid < 1) throw DomainError("grid must be >= 1");

    // The search region is where mu strictly dominates every loss; the
    // lattice keeps only such points. An empty region means mu is invalid.
    const auto feasible_at = [&](const std::vector<double>& p) {
        for (std::size_t i = 0; i < problem.num_losses(); ++i)
            if (mu - problem.loss(i, p) < kMinReferenceGap) return false;
        return true;
    };
    std::vector<double> best;
    double best_value = -std::numeric_limits<double>::infinity();
    scan_grid(problem.dim(), 0.9 * problem.domain_radius(), [&](const std::vector<double>& p) {
        if (!feasible_at(p)) return;
        const double v = problem.hypervolume(mu, p);
        if (v > best_value) {
            best_value = v;
            best = p;
        }
    });
    if (best.empty())
        throw DomainError("mu does not dominate any point of the search region");

    const double inner = problem.domain_radius() - 0.5 * epsilon;
    const std::vector<double> theta_star = refine_minimum(
        best, [&](const std::vector<double>& t) { return -problem.hypervolume(mu, t); },
        [&](const std::vector<double>& t) {
            std::vector<double> g = problem.hv_gradient(mu, t);
            for (double& x : g) x = -x;
            return g;
        },
        [&](const std::vector<double>& t) {
            std::vector<double> h = problem.hv_hessian(mu, t);
            for (double& x : h) x = -x;
            return h;
        },
        [&](const std::vector<double>& t) { return norm(t) <= inner && feasible_at(t); },
        kRefineTolerance);
    if (norm(theta_star) + epsilon > problem.domain_radius())
        throw DomainError("epsilon ball around theta* leaves the problem domain");

    Rng rng(Rng::derive(seed, 0xc2));
    const SampledConstants c = sample_constants(problem, theta_star, epsilon, rng);
    if (!(mu > c.c2))
        throw DomainError("mu does not dominate the sampled loss bound over the ball");

    BoundCertificate cert;
    cert.theorem = TheoremKind::HToMean;
    cert.theta_star = theta_star;
    cert.epsilon = epsilon;
    cert.c1 = c.c1;
    cert.c2 = c.c2;
    cert.c3 = c.c3;
    cert.mu = mu;
    cert.nu = nu_for_mu(c.c1, c.c2, mu);
    cert.gamma = kNaN;
    cert.applicable = true;

    const double j_star = problem.mean_loss(theta_star);
    run_ladder(cert, problem, epsilon, grid, Rng::derive(seed, 0xd3),
               [&](const std::vector<double>& delta, double eps_prime) {
                   const double lhs = j_star - cert.nu * cert.c3 * eps_prime;
                   return lhs - problem.mean_loss(add(theta_star, delta));
               });
    cert.pass = cert.max_violation <= kCertTolerance;
    return cert;
}

double check_weight_deviation(const LossVector& losses, double mu) {
    const AggregationWeights w = hypervolume_weights(losses, ReferencePoint::fixed(mu));
    const double n = static_cast<double>(losses.size());
    double dev = 0.0;
    for (std::size_t i = 0; i < losses.size(); ++i)
        dev = std::max(dev, std::abs(n * w[i] - 1.0));
    return dev;
}

LimitReport limit_checks(const LossVector& losses, const GradientMatrix& grads) {
    if (grads.rows() != losses.size())
        throw ShapeError("limit_checks: gradient rows != loss count");
    const double max_loss = losses.max();
    if (!(max_loss > 0.0))
        throw DomainError("limit_checks requires a positive maximum loss");

    const std::size_t n = losses.size(), dim = grads.cols();
    const auto normalized_direction = [&](double xi) {
        const double mu = (1.0 + std::pow(10.0, xi)) * max_loss;
        return aggregate_gradient(grads, hypervolume_weights(losses, ReferencePoint::adaptive(mu, xi)));
    };
    const auto deviation = [&](const std::vector<double>& got, const std::vector<double>& want) {
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double d = got[k] - want[k];
            num += d * d;
            den += want[k] * want[k];
        }
        return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
    };

    std::vector<double> mean_limit(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = grads.row(i);
        for (std::size_t k = 0; k < dim; ++k) mean_limit[k] += row[k];
    }
    for (double& x : mean_limit) x /= static_cast<double>(n);

    std::vector<double> argmax_limit(dim, 0.0);
    std::size_t argmax_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (losses[i] == max_loss) {
            const auto row = grads.row(i);
            for (std::size_t k = 0; k < dim; ++k) argmax_limit[k] += row[k];
            ++argmax_count;
        }
    }
    for (double& x : argmax_limit) x /= static_cast<double>(argmax_count);

    LimitReport report;
    report.mean_limit_deviation = deviation(normalized_direction(6.0), mean_limit);
    report.max_limit_deviation = deviation(normalized_direction(-6.0), argmax_limit);
    return report;
}

ToyProblem random_toy_problem(std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t dim = 1 + rng.below(2);
    const std::size_t n = 2 + rng.below(4);
    std::vector<QuadraticLoss> losses(n);
    for (auto& q : losses) {
        q.center.resize(dim);
        for (double& c : q.center) c = rng.uniform(-1.0, 1.0);
        q.offset = rng.uniform(0.0, 0.5);
    }
    return {std::move(losses), 4.0};
}

TheoryBatteryResult run_theory_battery(const TheoryBatteryOptions& options) {
    TheoryBatteryResult result;

    for (int p = 0; p < options.problems; ++p) {
        const ToyProblem problem = random_toy_problem(Rng::derive(options.seed, p));

        result.certificates.push_back(certify_theorem1(
            problem, options.nu, options.epsilon, options.grid, Rng::derive(options.seed, p, 1)));

        // Dominating mu for the reverse direction: twice the largest loss
        // seen on the search lattice, plus margin.
        double max_loss = 0.0;
        scan_grid(problem.dim(), 0.9 * problem.domain_radius(),
                  [&](const std::vector<double>& q) {
                      for (std::size_t i = 0; i < problem.num_losses(); ++i)
                          max_loss = std::max(max_loss, problem.loss(i, q));
                  });
        result.certificates.push_back(certify_theorem2(problem, 2.0 * max_loss + 1.0,
                                                       options.epsilon, options.grid,
                                                       Rng::derive(options.seed, p, 2)));
    }
    for (const auto& cert : result.certificates) {
        if (!cert.applicable) continue;
        ++result.applicable;
        if (!cert.pass) ++result.failed;
    }

    // Weight-deviation lemma sweep: mu above the gamma threshold for a
    // random target nu, deviation must stay within nu_for_mu of the
    // sample's own loss range.
    Rng rng(Rng::derive(options.seed, 0xdead));
    double worst_slack = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < options.deviation_cases; ++s) {
        const std::size_t n = 2 + rng.below(49);
        std::vector<double> values(n);
        for (double& v : values) v = rng.uniform(0.0, 10.0);
        LossVector losses(std::move(values));
        if (losses.max() == losses.min()) continue;
        const double target_nu = rng.uniform(0.05, 1.0);
        const double gamma = gamma_for_nu(losses.min(), losses.max(), target_nu);
        const double mu = gamma * (1.0 + rng.uniform(0.001, 2.0));
        const double dev = check_weight_deviation(losses, mu);
        const double bound = nu_for_mu(losses.min(), losses.max(), mu);
        worst_slack = std::max(worst_slack, dev - bound);
    }
    result.worst_weight_deviation_slack = worst_slack;

    // Limit sweep: drifted random gradients, losses with a clear argmax.
    double worst_limit = 0.0;
    for (int b = 0; b < options.limit_batches; ++b) {
        const std::size_t n = 2 + rng.below(19);
        const std::size_t dim = 2 + rng.below(9);
        std::vector<double> values(n);
        for (;;) {
            for (double& v : values) v = rng.uniform(0.1, 1.0);
            std::vector<double> sorted = values;
            std::sort(sorted.begin(), sorted.end());
            if (sorted[n - 1] - sorted[n - 2] >= 0.05) break;
        }
        std::vector<double> drift(dim);
        for (double& d : drift) d = rng.uniform(0.5, 1.5);
        GradientMatrix grads(n, dim);
        for (std::size_t i = 0; i < n; ++i) {
            auto row = grads.row(i);
            for (std::size_t k = 0; k < dim; ++k) row[k] = drift[k] + rng.uniform(-0.5, 0.5);
        }
        const LimitReport report = limit_checks(LossVector(values), grads);
        worst_limit =
            std::max({worst_limit, report.mean_limit_deviation, report.max_limit_deviation});
    }
    result.worst_limit_deviation = worst_limit;

    result.pass = result.failed == 0 && result.worst_weight_deviation_slack <= 1e-12 &&
                  result.worst_limit_deviation <= 1e-4;
    return result;
}

}  // namespace hv
