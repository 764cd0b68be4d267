#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "itrboost/boosting.hpp"
#include "itrboost/dataset.hpp"
#include "itrboost/losses.hpp"
#include "itrboost/rng.hpp"

using namespace itrboost;

namespace {

Dataset random_dataset(CounterRng& rng, std::size_t n, std::size_t p,
                       int distinct_values = 0) {
    std::vector<std::vector<double>> cols(p);
    std::vector<double> a, y, pi;
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& c : cols) {
            double v = rng.next_uniform(-2, 2);
            if (distinct_values > 0) {
                v = std::floor(rng.next_uniform01() * distinct_values);
            }
            c.push_back(v);
        }
        a.push_back(rng.next_uniform01() < 0.5 ? -1.0 : 1.0);
        y.push_back(rng.next_normal());
        pi.push_back(0.5);
    }
    return Dataset(std::move(cols), std::move(a), std::move(y), std::move(pi));
}

GradHess random_grad_hess(CounterRng& rng, std::size_t n) {
    GradHess gh;
    for (std::size_t i = 0; i < n; ++i) {
        gh.g.push_back(rng.next_uniform(-3, 3));
        gh.h.push_back(rng.next_uniform(0.1, 2.0));
    }
    return gh;
}

// Brute force: every feature, every midpoint between consecutive distinct
// sorted values, gains from raw sums.
std::optional<SplitCandidate> exhaustive_best_split(
    const std::vector<std::size_t>& rows, const GradHess& gh, const Dataset& data,
    const HyperParams& params) {
    std::optional<SplitCandidate> best;
    for (std::size_t j = 0; j < data.n_features(); ++j) {
        std::set<double> values;
        for (std::size_t i : rows) values.insert(data.covariate(i, j));
        std::vector<double> sorted(values.begin(), values.end());
        for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
            const double thr = sorted[k] + (sorted[k + 1] - sorted[k]) / 2.0;
            if (!(sorted[k] < thr && thr <= sorted[k + 1])) continue;
            double gl = 0, hl = 0, gr = 0, hr = 0;
            for (std::size_t i : rows) {
                if (data.covariate(i, j) < thr) {
                    gl += gh.g[i];
                    hl += gh.h[i];
                } else {
                    gr += gh.g[i];
                    hr += gh.h[i];
                }
            }
            if (hl < params.min_child_hessian || hr < params.min_child_hessian)
                continue;
            if (hl + params.weight_penalty <= 0 || hr + params.weight_penalty <= 0)
                continue;
            const double gain =
                split_gain(gl, hl, gr, hr, params.weight_penalty, params.leaf_penalty);
            if (gain <= 0) continue;
            if (!best || gain > best->gain) {
                best = SplitCandidate{static_cast<int>(j), thr, gain};
            }
        }
    }
    return best;
}

double ensemble_loss(const Dataset& data, const LossSpec& loss,
                     const BoostedEnsemble& model) {
    std::vector<double> f;
    model.predict_rows(data, f);
    double total = 0.0;
    if (const auto* sq = std::get_if<SquaredLoss>(&loss)) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double r = sq->target[i] - f[i];
            total += r * r;
        }
    } else if (const auto* wsq = std::get_if<WeightedSquaredLoss>(&loss)) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double r = wsq->target[i] - f[i];
            total += wsq->weight[i] * r * r;
        }
    } else {
        const auto& wdv = std::get<WeightedDevianceLoss>(loss);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double m = wdv.label[i] * f[i];
            const double phi = m >= 0 ? std::log1p(std::exp(-2.0 * m))
                                      : -2.0 * m + std::log1p(std::exp(2.0 * m));
            total += wdv.weight[i] * phi;
        }
    }
    return total;
}

}  // namespace

TEST_CASE("leaf weight and gain: squared-loss closed forms") {
    // Residuals r_i at h_i = 2: weight should be 2*sum(r)/(lambda + 2*count)
    // and the gain 2*[sl^2/(l+2nl) + sr^2/(l+2nr) - s^2/(l+2n)] - gamma.
    CounterRng rng(11, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const int nl = 1 + static_cast<int>(rng.next_u64() % 6);
        const int nr = 1 + static_cast<int>(rng.next_u64() % 6);
        const double lambda = rng.next_uniform(0.0, 4.0);
        const double gamma = rng.next_uniform(0.0, 2.0);
        double sl = 0, sr = 0;
        for (int i = 0; i < nl; ++i) sl += rng.next_uniform(-2, 2);
        for (int i = 0; i < nr; ++i) sr += rng.next_uniform(-2, 2);

        const double w = fit_leaf_weight(-2.0 * sl, 2.0 * nl, lambda);
        const double expected_w = 2.0 * sl / (lambda + 2.0 * nl);
        CHECK(w == doctest::Approx(expected_w).epsilon(1e-12));

        const double gain = split_gain(-2.0 * sl, 2.0 * nl, -2.0 * sr, 2.0 * nr,
                                       lambda, gamma);
        const double s = sl + sr;
        const double expected_gain =
            2.0 * (sl * sl / (lambda + 2.0 * nl) + sr * sr / (lambda + 2.0 * nr) -
                   s * s / (lambda + 2.0 * (nl + nr))) -
            gamma;
        CHECK(gain == doctest::Approx(expected_gain).epsilon(1e-12));
    }
}

TEST_CASE("fit_leaf_weight rejects a nonpositive denominator") {
    CHECK_THROWS(fit_leaf_weight(1.0, 0.0, 0.0));
    CHECK_THROWS(fit_leaf_weight(1.0, -2.0, 1.0));
    CHECK(fit_leaf_weight(-3.0, 2.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("find_best_split agrees with exhaustive enumeration") {
    CounterRng rng(7, 1);
    int found = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.next_u64() % 19;
        const std::size_t p = 1 + rng.next_u64() % 3;
        const bool ties = rng.next_uniform01() < 0.4;
        const Dataset data = random_dataset(rng, n, p, ties ? 3 : 0);
        const GradHess gh = random_grad_hess(rng, n);
        HyperParams params;
        params.weight_penalty = rng.next_uniform(0.0, 3.0);
        params.leaf_penalty = rng.next_uniform(0.0, 0.5);
        params.min_child_hessian =
            rng.next_uniform01() < 0.3 ? rng.next_uniform(0.0, 1.0) : 0.0;

        std::vector<std::size_t> rows(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = i;

        const auto fast = find_best_split(rows, gh, data, params);
        const auto slow = exhaustive_best_split(rows, gh, data, params);
        REQUIRE(fast.has_value() == slow.has_value());
        if (fast) {
            ++found;
            CHECK(fast->gain == doctest::Approx(slow->gain).epsilon(1e-10));
            // the returned (feature, threshold) must realize that gain
            double gl = 0, hl = 0, gr = 0, hr = 0;
            for (std::size_t i : rows) {
                if (data.covariate(i, fast->feature) < fast->threshold) {
                    gl += gh.g[i];
                    hl += gh.h[i];
                } else {
                    gr += gh.g[i];
                    hr += gh.h[i];
                }
            }
            CHECK(hl > 0.0);
            CHECK(hr > 0.0);
            CHECK(split_gain(gl, hl, gr, hr, params.weight_penalty,
                             params.leaf_penalty) ==
                  doctest::Approx(fast->gain).epsilon(1e-10));
        }
    }
    CHECK(found > 50);  // the oracle comparison must actually exercise splits
}

TEST_CASE("tie break: lowest feature index, then smallest threshold") {
    // Two identical columns produce identical gains; feature 0 must win.
    const Dataset data({{0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 2.0, 3.0}},
                       {1.0, 1.0, -1.0, -1.0}, {0, 0, 0, 0}, {0.5, 0.5, 0.5, 0.5});
    GradHess gh{{-2.0, -2.0, 2.0, 2.0}, {2.0, 2.0, 2.0, 2.0}};
    HyperParams params;
    params.weight_penalty = 0.0;
    std::vector<std::size_t> rows{0, 1, 2, 3};
    const auto best = find_best_split(rows, gh, data, params);
    REQUIRE(best.has_value());
    CHECK(best->feature == 0);
    CHECK(best->threshold == doctest::Approx(1.5));
}

TEST_CASE("no split is reported on constant features or when gamma eats the gain") {
    const Dataset data({{1.0, 1.0, 1.0}}, {1, 1, -1}, {0, 0, 0}, {0.5, 0.5, 0.5});
    GradHess gh{{-1, 2, 1}, {2, 2, 2}};
    HyperParams params;
    std::vector<std::size_t> rows{0, 1, 2};
    CHECK_FALSE(find_best_split(rows, gh, data, params).has_value());

    const Dataset d2({{0.0, 1.0}}, {1, -1}, {0, 0}, {0.5, 0.5});
    GradHess gh2{{-2, 2}, {2, 2}};
    HyperParams big_gamma;
    big_gamma.leaf_penalty = 1e6;
    std::vector<std::size_t> r2{0, 1};
    CHECK_FALSE(find_best_split(r2, gh2, d2, big_gamma).has_value());
}

TEST_CASE("grow_tree respects max_depth and single-leaf degenerate input") {
    CounterRng rng(21, 2);
    const Dataset data = random_dataset(rng, 60, 3);
    const GradHess gh = random_grad_hess(rng, 60);
    std::vector<std::size_t> rows(60);
    for (std::size_t i = 0; i < 60; ++i) rows[i] = i;

    for (int depth : {1, 2, 3}) {
        HyperParams params;
        params.max_depth = depth;
        const RegressionTree t = grow_tree(rows, gh, data, params);
        CHECK(t.leaf_count() <= (1 << depth));
        CHECK(t.leaf_count() >= 1);
    }

    const RegressionTree leaf = grow_tree({0}, gh, data, HyperParams{});
    CHECK(leaf.leaf_count() == 1);
    CHECK(leaf.nodes[0].is_leaf);
}

TEST_CASE("training drives the squared loss down monotonically") {
    CounterRng rng(31, 3);
    const Dataset data = random_dataset(rng, 120, 4);
    std::vector<double> target;
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        target.push_back(std::sin(2.0 * data.covariate(i, 0)) +
                         data.covariate(i, 1));
    }
    const LossSpec loss = SquaredLoss{target};

    double prev = std::numeric_limits<double>::infinity();
    for (int k : {1, 5, 20, 60}) {
        HyperParams params;
        params.rounds = k;
        params.shrinkage = 0.3;
        params.max_depth = 3;
        const BoostedEnsemble model = train(data, loss, params);
        const double cur = ensemble_loss(data, loss, model);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
    CHECK(prev < 0.1 * ensemble_loss(data, loss, BoostedEnsemble{}));
}

TEST_CASE("training reduces the weighted deviance on separable labels") {
    CounterRng rng(41, 4);
    const Dataset data = random_dataset(rng, 150, 3);
    std::vector<double> label, weight;
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        label.push_back(data.covariate(i, 0) >= 0 ? 1.0 : -1.0);
        weight.push_back(rng.next_uniform(0.2, 2.0));
    }
    const LossSpec loss = WeightedDevianceLoss{label, weight};

    HyperParams params;
    params.rounds = 40;
    params.shrinkage = 0.3;
    const BoostedEnsemble model = train(data, loss, params);
    CHECK(ensemble_loss(data, loss, model) <
          0.3 * ensemble_loss(data, loss, BoostedEnsemble{}));

    std::vector<double> f;
    model.predict_rows(data, f);
    int agree = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if ((f[i] >= 0 ? 1.0 : -1.0) == label[i]) ++agree;
    }
    CHECK(agree >= static_cast<int>(0.95 * f.size()));
}

TEST_CASE("early stop on exactly-zero gradients") {
    const Dataset data({{0.0, 1.0, 2.0}}, {1, -1, 1}, {0, 0, 0}, {0.5, 0.5, 0.5});
    HyperParams params;
    params.rounds = 50;
    params.weight_penalty = 0.0;
    // Constant target reachable in one exact step at eta = 1.
    params.shrinkage = 1.0;
    const BoostedEnsemble model = train(data, SquaredLoss{{3.0, 3.0, 3.0}}, params);
    CHECK(model.trees.size() < 50);
    CHECK(model.predict({0.5}) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("training is deterministic") {
    CounterRng rng(51, 5);
    const Dataset data = random_dataset(rng, 80, 3);
    std::vector<double> target(data.outcomes());
    HyperParams params;
    params.rounds = 30;
    const BoostedEnsemble a = train(data, SquaredLoss{target}, params);
    const BoostedEnsemble b = train(data, SquaredLoss{target}, params);
    CHECK(a.to_json() == b.to_json());
}

TEST_CASE("ensemble JSON round trip gives identical predictions") {
    CounterRng rng(61, 6);
    const Dataset data = random_dataset(rng, 70, 3);
    HyperParams params;
    params.rounds = 15;
    const BoostedEnsemble model = train(data, SquaredLoss{data.outcomes()}, params);
    const BoostedEnsemble back = BoostedEnsemble::from_json(model.to_json());
    CHECK(back.trees.size() == model.trees.size());
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x{rng.next_uniform(-2, 2), rng.next_uniform(-2, 2),
                              rng.next_uniform(-2, 2)};
        CHECK(back.predict(x) == model.predict(x));
    }
    CHECK_THROWS(BoostedEnsemble::from_json("{\"trees\": 3}"));
}

TEST_CASE("HyperParams bounds are validated") {
    HyperParams p;
    p.rounds = 0;
    CHECK_THROWS(p.validate());
    p = HyperParams{};
    p.shrinkage = 0.0;
    CHECK_THROWS(p.validate());
    p = HyperParams{};
    p.shrinkage = 1.5;
    CHECK_THROWS(p.validate());
    p = HyperParams{};
    p.max_depth = 0;
    CHECK_THROWS(p.validate());
    p = HyperParams{};
    p.weight_penalty = -1.0;
    CHECK_THROWS(p.validate());
    HyperParams ok;
    CHECK_NOTHROW(ok.validate());
}
