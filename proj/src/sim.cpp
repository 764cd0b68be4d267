#include "itrboost/sim.hpp"

#include <cmath>
#include <stdexcept>

#include "itrboost/itr.hpp"
#include "itrboost/rng.hpp"

namespace itrboost {

namespace {

// Stream ids for the independent sources within one trial.
constexpr std::uint64_t kCovariateStream = 1;
constexpr std::uint64_t kTreatmentStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

std::size_t delta_min_dim(int id) {
    switch (id) {
        case 1:
        case 2:
        case 4:
            return 2;
        case 3:
            return 4;
        case 5:
            return 8;
        default:
            throw std::invalid_argument("scenario id must lie in 1..5");
    }
}

}  // namespace

std::size_t scenario_min_dim(int id) {
    // mu(X) reads the first three components.
    return std::max<std::size_t>(delta_min_dim(id), 3);
}

double scenario_mu(const std::vector<double>& x) {
    return 1.0 + 2.0 * x[0] + x[1] + 0.5 * x[2];
}

double scenario_delta(int id, const std::vector<double>& x) {
    if (x.size() < delta_min_dim(id)) {
        throw std::invalid_argument("scenario_delta: covariate row too short");
    }
    switch (id) {
        case 1:
            return 3.0 * (x[0] <= 0.5 ? 1.0 : 0.0) * ((x[1] > -0.5 ? 1.0 : 0.0) - 1.0) +
                   1.0;
        case 2:
            return 1.3 * (x[1] - 2.0 * x[0] * x[0] + 0.3);
        case 3:
            return 0.2 + x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3];
        case 4:
            return 3.8 * (0.8 - x[0] * x[0] - x[1] * x[1]);
        case 5:
            return 1.0 - x[0] * x[0] * x[0] + std::exp(x[2] * x[2] + x[4]) +
                   0.6 * x[5] - (x[6] + x[7]) * (x[6] + x[7]);
        default:
            throw std::invalid_argument("scenario id must lie in 1..5");
    }
}

double oracle_decide(int id, const std::vector<double>& x) {
    if (x.size() < delta_min_dim(id)) {
        throw std::invalid_argument("oracle_decide: covariate row too short");
    }
    switch (id) {
        case 1:
            return (x[0] <= 0.5 && x[1] <= -0.5) ? -1.0 : 1.0;
        case 2:
            return decision_sign(x[1] - 2.0 * x[0] * x[0] + 0.3);
        case 3:
            return decision_sign(0.2 + x[0] * x[0] + x[1] * x[1] - x[2] * x[2] -
                                 x[3] * x[3]);
        case 4:
            return x[0] * x[0] + x[1] * x[1] > 0.8 ? -1.0 : 1.0;
        case 5:
            return decision_sign(scenario_delta(5, x));
        default:
            throw std::invalid_argument("scenario id must lie in 1..5");
    }
}

SimulatedTrial generate(const ScenarioSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("generate: n must be >= 1");
    if (spec.p < scenario_min_dim(spec.id)) {
        throw std::invalid_argument("generate: scenario " + std::to_string(spec.id) +
                                    " needs p >= " +
                                    std::to_string(scenario_min_dim(spec.id)));
    }
    CounterRng cov_rng(spec.seed, kCovariateStream);
    CounterRng trt_rng(spec.seed, kTreatmentStream);
    CounterRng eps_rng(spec.seed, kNoiseStream);

    std::vector<std::vector<double>> columns(spec.p, std::vector<double>(spec.n));
    for (std::size_t i = 0; i < spec.n; ++i) {
        for (std::size_t j = 0; j < spec.p; ++j) {
            columns[j][i] = cov_rng.next_uniform(-1.0, 1.0);
        }
    }
    std::vector<double> treatments(spec.n), outcomes(spec.n);
    std::vector<double> propensities(spec.n, 0.5);
    std::vector<double> oracle(spec.n), delta(spec.n);
    std::vector<double> x(spec.p);
    for (std::size_t i = 0; i < spec.n; ++i) {
        for (std::size_t j = 0; j < spec.p; ++j) x[j] = columns[j][i];
        treatments[i] = trt_rng.next_uniform01() < 0.5 ? -1.0 : 1.0;
        delta[i] = scenario_delta(spec.id, x);
        oracle[i] = decision_sign(delta[i]);
        outcomes[i] = scenario_mu(x) + delta[i] * treatments[i] + eps_rng.next_normal();
    }
    return SimulatedTrial{
        Dataset(std::move(columns), std::move(treatments), std::move(outcomes),
                std::move(propensities)),
        std::move(oracle), std::move(delta)};
}

}  // namespace itrboost
