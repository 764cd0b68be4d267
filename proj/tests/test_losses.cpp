#include <doctest.h>

#include <cmath>
#include <vector>

#include "itrboost/losses.hpp"
#include "itrboost/rng.hpp"

using namespace itrboost;

namespace {

double squared_value(double target, double f) {
    const double r = target - f;
    return r * r;
}

double deviance_value(double margin) {
    // log(1 + e^{-2x}) without overflow for large |x|
    if (margin >= 0.0) return std::log1p(std::exp(-2.0 * margin));
    return -2.0 * margin + std::log1p(std::exp(2.0 * margin));
}

}  // namespace

TEST_CASE("squared loss: closed-form gradient and constant hessian") {
    const std::vector<double> target{1.0, -2.0, 0.5};
    const std::vector<double> f{0.0, 1.0, 0.5};
    const GradHess gh = grad_hess_squared(target, f);
    CHECK(gh.g[0] == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(gh.g[1] == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(gh.g[2] == doctest::Approx(0.0));
    for (double h : gh.h) CHECK(h == 2.0);
}

TEST_CASE("weighted squared loss scales both derivatives by the weight") {
    const std::vector<double> target{3.0, -1.0};
    const std::vector<double> weight{2.0, 0.25};
    const std::vector<double> f{1.0, 1.0};
    const GradHess gh = grad_hess_weighted_squared(target, weight, f);
    CHECK(gh.g[0] == doctest::Approx(-8.0).epsilon(1e-15));
    CHECK(gh.h[0] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(gh.g[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(gh.h[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("deviance derivatives at zero margin") {
    CHECK(deviance_grad(0.0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(deviance_hess(0.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("deviance derivatives match analytic forms at spot margins") {
    for (double x : {-3.0, -0.7, 0.1, 1.5, 4.0}) {
        const double e2x = std::exp(2.0 * x);
        CHECK(deviance_grad(x) == doctest::Approx(-2.0 / (1.0 + e2x)).epsilon(1e-14));
        CHECK(deviance_hess(x) ==
              doctest::Approx(4.0 * e2x / ((1.0 + e2x) * (1.0 + e2x))).epsilon(1e-13));
    }
}

TEST_CASE("deviance derivatives stay finite at saturated margins") {
    for (double x : {-1e8, -745.0, 745.0, 1e8, 1e307}) {
        CHECK(std::isfinite(deviance_grad(x)));
        CHECK(std::isfinite(deviance_hess(x)));
        CHECK(deviance_hess(x) >= 0.0);
    }
    CHECK(deviance_grad(1e8) == doctest::Approx(0.0));
    CHECK(deviance_grad(-1e8) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("weighted deviance hessian honours the floor") {
    const std::vector<double> label{1.0};
    const std::vector<double> weight{3.0};
    const std::vector<double> f{400.0};  // phi'' underflows to 0 here
    const GradHess gh = grad_hess_weighted_deviance(label, weight, f);
    CHECK(gh.h[0] >= 1e-16 * 3.0);
    CHECK(gh.h[0] <= 1e-12);
}

TEST_CASE("central differences confirm every gradient") {
    CounterRng rng(99, 5);
    const double step = 1e-6;
    const int points = 300;
    for (int i = 0; i < points; ++i) {
        const double target = rng.next_uniform(-4, 4);
        const double weight = rng.next_uniform(0.1, 3.0);
        const double label = rng.next_uniform01() < 0.5 ? -1.0 : 1.0;
        const double f = rng.next_uniform(-3, 3);

        {
            const GradHess gh = grad_hess_squared({target}, {f});
            const double num = (squared_value(target, f + step) -
                                squared_value(target, f - step)) /
                               (2 * step);
            CHECK(gh.g[0] == doctest::Approx(num).epsilon(1e-4));
        }
        {
            const GradHess gh = grad_hess_weighted_squared({target}, {weight}, {f});
            const double num = weight *
                               (squared_value(target, f + step) -
                                squared_value(target, f - step)) /
                               (2 * step);
            CHECK(gh.g[0] == doctest::Approx(num).epsilon(1e-4));
        }
        {
            const GradHess gh = grad_hess_weighted_deviance({label}, {weight}, {f});
            const double num = weight *
                               (deviance_value(label * (f + step)) -
                                deviance_value(label * (f - step))) /
                               (2 * step);
            CHECK(gh.g[0] == doctest::Approx(num).epsilon(1e-4));
        }
    }
}

TEST_CASE("evaluate_loss dispatches to the matching raw routine") {
    const std::vector<double> f{0.5, -1.0, 2.0};
    const SquaredLoss sq{{1.0, 0.0, -2.0}};
    const WeightedSquaredLoss wsq{{1.0, 0.0, -2.0}, {2.0, 1.0, 0.5}};
    const WeightedDevianceLoss wdv{{1.0, -1.0, 1.0}, {0.5, 1.5, 2.0}};

    const GradHess a = evaluate_loss(sq, f);
    const GradHess b = grad_hess_squared(sq.target, f);
    const GradHess c = evaluate_loss(wsq, f);
    const GradHess d = grad_hess_weighted_squared(wsq.target, wsq.weight, f);
    const GradHess e = evaluate_loss(wdv, f);
    const GradHess g = grad_hess_weighted_deviance(wdv.label, wdv.weight, f);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.g[i] == b.g[i]);
        CHECK(a.h[i] == b.h[i]);
        CHECK(c.g[i] == d.g[i]);
        CHECK(c.h[i] == d.h[i]);
        CHECK(e.g[i] == g.g[i]);
        CHECK(e.h[i] == g.h[i]);
    }
    CHECK(loss_size(sq) == 3);
    CHECK(loss_size(wsq) == 3);
    CHECK(loss_size(wdv) == 3);
}

TEST_CASE("size mismatches are rejected") {
    CHECK_THROWS(grad_hess_squared({1.0, 2.0}, {1.0}));
    CHECK_THROWS(grad_hess_weighted_squared({1.0}, {1.0, 2.0}, {1.0}));
    CHECK_THROWS(grad_hess_weighted_deviance({1.0}, {1.0}, {1.0, 2.0}));
}
