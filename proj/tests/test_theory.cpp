#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "hv/errors.hpp"
#include "hv/policy.hpp"
#include "hv/rng.hpp"
#include "hv/theory.hpp"
#include "test_util.hpp"

using namespace hv;

namespace {

// l1 = (theta-1)^2 + 1, l2 = (theta+1)^2 + 1: symmetric, both optima at 0.
ToyProblem symmetric_pair() {
    return ToyProblem({{{1.0}, 1.0}, {{-1.0}, 1.0}}, 4.0);
}

}  // namespace

TEST_CASE("toy problem evaluations and sampled constants") {
    const ToyProblem p = symmetric_pair();
    const std::vector<double> at{0.5};
    CHECK(p.loss(0, at) == doctest::Approx(1.25));
    CHECK(p.loss(1, at) == doctest::Approx(3.25));
    CHECK(p.mean_loss(at) == doctest::Approx(2.25));
    CHECK(p.loss_gradient(0, at)[0] == doctest::Approx(-1.0));
    CHECK(p.hypervolume(10.0, at) ==
          doctest::Approx(std::log(10.0 - 1.25) + std::log(10.0 - 3.25)).epsilon(1e-12));
    // gradient of H: sum of -1/(mu - l_i) * 2(theta - c_i)
    const double expected =
        -(1.0 / (10.0 - 1.25)) * (2.0 * (0.5 - 1.0)) - (1.0 / (10.0 - 3.25)) * (2.0 * 1.5);
    CHECK(p.hv_gradient(10.0, at)[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("theorem 1 certificate: symmetric pair passes with no violation") {
    const BoundCertificate cert = certify_theorem1(symmetric_pair(), 0.5, 0.25, 2000);
    CHECK(cert.applicable);
    CHECK(cert.pass);
    // theta* is the centroid by symmetry, and it maximizes H as well, so
    // the bound holds with its full positive slack.
    CHECK(std::abs(cert.theta_star[0]) <= 1e-9);
    CHECK(cert.max_violation <= 0.0);
    CHECK(cert.c1 <= cert.c2);
    CHECK(cert.mu > cert.gamma);
    CHECK(cert.gamma >= cert.c2);
}

TEST_CASE("theorem 1 certificate: single loss is trivially consistent") {
    const ToyProblem single({{{0.3, -0.4}, 0.2}}, 4.0);
    const BoundCertificate cert = certify_theorem1(single, 0.5, 0.25, 1000);
    CHECK(cert.applicable);
    CHECK(cert.pass);
    CHECK(cert.theta_star[0] == doctest::Approx(0.3).epsilon(1e-7));
    CHECK(cert.theta_star[1] == doctest::Approx(-0.4).epsilon(1e-7));
}

TEST_CASE("theorem 1 certificate: mu below gamma is gated, not failed") {
    const ToyProblem p = symmetric_pair();
    const BoundCertificate probe = certify_theorem1(p, 0.5, 0.25, 200);
    const BoundCertificate gated =
        certify_theorem1(p, 0.5, 0.25, 200, 9001, probe.c2 * 1.0001);
    CHECK_FALSE(gated.applicable);
    CHECK_FALSE(gated.pass);
}

TEST_CASE("theorem 2 certificate: symmetric pair at mu = 10") {
    const BoundCertificate cert = certify_theorem2(symmetric_pair(), 10.0, 0.25, 2000);
    CHECK(cert.applicable);
    CHECK(cert.pass);
    CHECK(std::abs(cert.theta_star[0]) <= 1e-9);  // symmetry forces 0
    CHECK(cert.nu == doctest::Approx(nu_for_mu(cert.c1, cert.c2, 10.0)));
}

TEST_CASE("theorem 2 certificate: huge mu makes the bound nearly tight") {
    const ToyProblem p = symmetric_pair();
    const BoundCertificate cert = certify_theorem2(p, 1e6, 0.25, 2000);
    CHECK(cert.pass);
    CHECK(cert.nu <= 1e-5);  // nu ~ (c2 - c1) / mu
    // The observed mean loss can dip below J(theta*) by at most nu C3 eps'.
    CHECK(cert.nu * cert.c3 * cert.epsilon_prime <= 1e-4);
}

TEST_CASE("theorem certificates: asymmetric pair, distinct optima") {
    // l1 = (theta-1)^2, l2 = 3(theta+1)^2: the steeper loss drags both
    // optima toward -1, but H and J_m settle at different points. Both
    // directions still certify on their own theorems.
    const ToyProblem p({{{1.0}, 0.0, 1.0}, {{-1.0}, 0.0, 3.0}}, 4.0);
    const BoundCertificate t1 = certify_theorem1(p, 0.5, 0.2, 1500);
    CHECK(t1.applicable);
    CHECK(t1.pass);
    const BoundCertificate t2 = certify_theorem2(p, 25.0, 0.2, 1500);
    CHECK(t2.pass);
    CHECK(std::abs(t1.theta_star[0] - t2.theta_star[0]) > 1e-4);
}

TEST_CASE("certify_theorem2 rejects a non-dominating mu") {
    CHECK_THROWS_AS(certify_theorem2(symmetric_pair(), 2.0, 0.25, 200), DomainError);
}

TEST_CASE("check_weight_deviation: examples") {
    CHECK(check_weight_deviation(LossVector({0.4, 0.4, 0.4}), 1.0) <= 1e-15);
    // w = [1/3, 1/2] normalized -> [0.4, 0.6]; max |2 w - 1| = 0.2
    CHECK(check_weight_deviation(LossVector({0.0, 1.0}), 3.0) ==
          doctest::Approx(0.2).epsilon(1e-12));
    CHECK(check_weight_deviation(LossVector({0.0, 1.0}), 3.0) <= nu_for_mu(0.0, 1.0, 3.0));
    // near the lower bound the weights collapse onto the argmax
    CHECK(check_weight_deviation(LossVector({0.0, 1.0}), 1.0 + 1e-9) ==
          doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("weight deviation is bounded by nu and shrinks as mu grows") {
    Rng rng(71);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + rng.below(20);
        std::vector<double> values(n);
        for (double& v : values) v = rng.uniform(0.0, 5.0);
        const LossVector losses(values);
        if (losses.max() == losses.min()) continue;

        double prev = std::numeric_limits<double>::infinity();
        double mu = losses.max() + 0.05;
        for (int rung = 0; rung < 12; ++rung, mu *= 2.0) {
            const double dev = check_weight_deviation(losses, mu);
            REQUIRE(dev <= nu_for_mu(losses.min(), losses.max(), mu) + 1e-12);
            REQUIRE(dev <= prev + 1e-15);
            prev = dev;
        }
        REQUIRE(prev <= 1e-2);  // vanishes along the mu ladder
    }
}

TEST_CASE("limit_checks: worked instances") {
    SUBCASE("two samples, distinct losses") {
        const LossVector losses({0.5, 1.0});
        const GradientMatrix grads({{1.0, 0.0}, {0.0, 1.0}});
        const LimitReport r = limit_checks(losses, grads);
        // limits for this instance: mean = [0.5, 0.5], argmax row = [0, 1]
        CHECK(r.mean_limit_deviation <= 1e-4);
        CHECK(r.max_limit_deviation <= 1e-4);
    }
    SUBCASE("tied maxima average over the argmax set") {
        const LossVector losses({1.0, 1.0});
        const GradientMatrix grads({{1.0, 0.0}, {0.0, 1.0}});
        const auto w = hypervolume_weights(losses, reference_point(losses, -6.0));
        CHECK(w[0] == doctest::Approx(0.5));
        const LimitReport r = limit_checks(losses, grads);
        CHECK(r.max_limit_deviation <= 1e-12);  // agg == [0.5, 0.5] exactly
    }
    SUBCASE("single sample: both limits equal its own gradient") {
        const LimitReport r = limit_checks(LossVector({0.7}), GradientMatrix({{2.0, -1.0}}));
        CHECK(r.mean_limit_deviation <= 1e-12);
        CHECK(r.max_limit_deviation <= 1e-12);
    }
    SUBCASE("shape and domain errors") {
        CHECK_THROWS_AS(limit_checks(LossVector({0.5}), GradientMatrix(2, 2)), ShapeError);
        CHECK_THROWS_AS(limit_checks(LossVector({0.0}), GradientMatrix(1, 2)), DomainError);
    }
}

TEST_CASE("sampled constants bracket the analytic bounds of a known ball") {
    // For the symmetric pair at theta* = 0 with eps = 0.25 the exact
    // bounds are l in [1 + 0.75^2, 1 + 1.25^2] and |grad| <= 2 * 1.25.
    const BoundCertificate cert = certify_theorem1(symmetric_pair(), 0.5, 0.25, 500);
    CHECK(cert.c1 <= 1.0 + 0.75 * 0.75);
    CHECK(cert.c2 >= 1.0 + 1.25 * 1.25);
    CHECK(cert.c3 >= 2.0 * 1.25);
    CHECK(cert.c1 >= 0.9 * (1.0 + 0.75 * 0.75));   // not wildly loose either
    CHECK(cert.c2 <= 1.1 * (1.0 + 1.25 * 1.25));
    CHECK(cert.c3 <= 1.1 * 2.0 * 1.25);
}

TEST_CASE("tighter nu raises gamma and mu but still certifies") {
    const ToyProblem p = symmetric_pair();
    const BoundCertificate loose = certify_theorem1(p, 0.5, 0.25, 400);
    const BoundCertificate tight = certify_theorem1(p, 0.25, 0.25, 400);
    CHECK(tight.gamma > loose.gamma);
    CHECK(tight.mu > loose.mu);
    CHECK(tight.pass);

    // a coarse delta grid samples a subset of a passing set
    const BoundCertificate coarse = certify_theorem1(p, 0.5, 0.25, 10);
    CHECK(coarse.pass);
}

TEST_CASE("randomized battery stays sound on a reduced budget") {
    TheoryBatteryOptions opts;
    opts.problems = 6;
    opts.grid = 400;
    opts.deviation_cases = 2000;
    opts.limit_batches = 20;
    const TheoryBatteryResult result = run_theory_battery(opts);
    CHECK(result.failed == 0);
    CHECK(result.applicable == 2 * opts.problems);
    CHECK(result.worst_weight_deviation_slack <= 1e-12);
    CHECK(result.worst_limit_deviation <= 1e-4);
    CHECK(result.pass);
}
